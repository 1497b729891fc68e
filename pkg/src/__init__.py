"""MetaTrimmer - 테스트 데이터 기반 메타모픽 관계 선택 및 제약 도출 도구"""

__version__ = "0.1.0"
