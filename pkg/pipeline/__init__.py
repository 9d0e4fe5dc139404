"""
데이터 파이프라인
- 스캔 레코드
- 트레이스/앵커/정답 위치 파일 입출력
- iwlist 스캔 출력 변환
"""
