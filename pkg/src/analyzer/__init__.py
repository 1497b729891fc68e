"""빈도 분석 모듈"""
