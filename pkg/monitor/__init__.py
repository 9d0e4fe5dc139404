"""
위치 추정 결과 확인 모듈
- 정답 위치 대비 오차 평가 / 보고서
- 평균 RSSI 버블맵
- 대시보드
"""

from .dashboard import Dashboard
from .evaluator import EvaluationReport, evaluateTrace

__all__ = ["Dashboard", "EvaluationReport", "evaluateTrace"]
