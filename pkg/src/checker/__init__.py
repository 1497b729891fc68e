"""MR 판정 모듈"""
