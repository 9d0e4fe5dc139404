"""테스트용 독립 계산기

- 원 교점 전수 탐색: 원 A 둘레를 각도로 촘촘히 샘플링해 원 B까지 거리 - r_B의 부호가
  바뀌는 지점을 선형 보간으로 찾는다. 해석적 공식과 무관한 검산용.
- 노이즈 없는 스캔 생성
"""

import math
from functools import lru_cache

import numpy as np

from locator.geometry import Circle, Point2D, distance
from locator.pathloss import powerAtDistance
from pipeline.records import ScanRecord


@lru_cache(maxsize=4)
def _unitCircle(samples: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    theta = np.arange(samples) * (2.0 * np.pi / samples)
    return theta, np.cos(theta), np.sin(theta)


def bruteForceIntersections(a: Circle, b: Circle, samples: int = 1_000_000) -> list[Point2D]:
    step = 2.0 * np.pi / samples
    theta, cos, sin = _unitCircle(samples)
    px = a.center.x + a.radius * cos
    py = a.center.y + a.radius * sin
    f = np.hypot(px - b.center.x, py - b.center.y) - b.radius

    inside = f < 0
    crossings = np.nonzero(inside != np.roll(inside, -1))[0]
    points = []
    for i in crossings:
        j = (i + 1) % samples
        t = f[i] / (f[i] - f[j])
        angle = theta[i] + t * step
        points.append(Point2D(a.center.x + a.radius * math.cos(angle), a.center.y + a.radius * math.sin(angle)))
    return points


def nearTangent(a: Circle, b: Circle, margin: float) -> bool:
    """접하는 경우에 가까운 원 쌍 (전수 탐색이 불안정해지는 구간)"""
    d = distance(a.center, b.center)
    return abs(d - (a.radius + b.radius)) < margin or abs(d - abs(a.radius - b.radius)) < margin


def noiselessScan(position: Point2D, anchors: dict, refPower: float, refDistance: float,
                  alpha: float, timestamp: float = 0.0) -> ScanRecord:
    """앵커 ID → Point2D 사전으로 노이즈 없는 스캔 생성"""
    return ScanRecord(timestamp, {
        anchorId: powerAtDistance(refPower, refDistance, distance(position, anchor), alpha)
        for anchorId, anchor in anchors.items()
    })
