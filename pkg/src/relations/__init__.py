"""메타모픽 관계 카탈로그 모듈"""
