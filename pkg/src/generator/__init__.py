"""테스트 데이터 생성 모듈"""
