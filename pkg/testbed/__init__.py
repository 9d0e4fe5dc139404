"""
실내 무선 테스트베드 시뮬레이터
- 채널 모델 (경로손실 + 섀도잉 + 드롭아웃, 카운터 기반 난수)
- 웨이포인트 궤적 → 스캔 트레이스 + 정답 위치
- YAML 설정 로드/저장
"""

from .channel import ChannelModel
from .simulator import GroundTruthTrace, TestbedConfig, Trajectory, runTrajectory, simulateScan

__all__ = ["ChannelModel", "GroundTruthTrace", "TestbedConfig", "Trajectory", "runTrajectory", "simulateScan"]
