"""아티팩트 입출력 모듈"""
