"""MT 실행 모듈"""
