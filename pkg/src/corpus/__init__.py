"""테스트 대상 메서드 코퍼스 모듈"""
