"""
RSSI 멀티레터레이션 위치 추정 모듈
- 기하 (원 교점, 후보점 선택, 무게중심)
- 경로손실 (α 추정, 거리 역변환)
- 보정 데이터베이스
- 위치 추정
"""
