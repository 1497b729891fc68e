"""제약 조건 마이닝 모듈"""
