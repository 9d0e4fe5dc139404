"""2D 원 교점 계산 모듈

- 두 원(앵커 중심, 추정 거리 반지름)의 교점 계산
- 교점 2개 중 후보점 선택 (나머지 앵커 기준)
- 교점 없음(분리/내포)이면 두 중심의 중점 사용
- 좌표 평균으로 최종 위치 산출

모든 함수는 값 입력에 대한 순수 함수이므로 스레드 간 공유 상태가 없다.
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

from locator.constants import COINCIDENT_EPS, TANGENT_EPS_SQ, TIE_EPS
from locator.errors import CoincidentCenters, EmptyInput, InvalidCircle, NonFiniteCoordinate

TWO_POINTS = "two_points"
TANGENT = "tangent"
NO_INTERSECTION = "no_intersection"

IntersectionKind = Literal["two_points", "tangent", "no_intersection"]


@dataclass(frozen=True)
class Point2D:
    """평면 좌표 (cm)"""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise NonFiniteCoordinate(f"non-finite coordinate ({self.x!r}, {self.y!r})")

    def translated(self, dx: float, dy: float) -> "Point2D":
        return Point2D(self.x + dx, self.y + dy)


@dataclass(frozen=True)
class Circle:
    """앵커 중심 + 추정 거리 반지름"""
    center: Point2D
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidCircle(f"circle radius must be positive, got {self.radius!r}")


@dataclass(frozen=True)
class IntersectionOutcome:
    """교점 계산 결과

    two_points: 점 2개, tangent: 점 1개, no_intersection: 점 0개 + 중심 중점
    """
    kind: IntersectionKind
    points: tuple = ()
    fallback_midpoint: Optional[Point2D] = None


def distance(a: Point2D, b: Point2D) -> float:
    """유클리드 거리"""
    return math.hypot(a.x - b.x, a.y - b.y)


def midpoint(a: Point2D, b: Point2D) -> Point2D:
    return Point2D((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)


def circleIntersection(a: Circle, b: Circle) -> IntersectionOutcome:
    """두 원의 교점 계산

    d = |c_a - c_b|, l = (r_a² - r_b² + d²) / 2d, h² = r_a² - l²
    h² 가 접점 밴드 안이면 접점 1개, 음수면 교점 없음(분리 또는 내포).
    접점 밴드는 ε_h² · max(1, r_a², r_b²) (큰 반지름에서의 부동소수점 잡음 흡수).

    두 원은 (x, y, r) 순으로 정렬해 계산하므로 (a, b)와 (b, a)의 결과는
    같은 점 집합이다. 교점 순서는 인자 순서 기준 공식을 따른다.

    Raises:
        CoincidentCenters: 두 중심 거리 d <= ε_d (해당 앵커 쌍은 건너뛰어야 함)
    """
    swapped = (b.center.x, b.center.y, b.radius) < (a.center.x, a.center.y, a.radius)
    if swapped:
        a, b = b, a

    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    d = math.hypot(dx, dy)
    if d <= COINCIDENT_EPS:
        raise CoincidentCenters(
            f"circle centers coincide at ({a.center.x!r}, {a.center.y!r})"
        )

    ra, rb = a.radius, b.radius
    l = (ra * ra - rb * rb + d * d) / (2.0 * d)
    hSq = ra * ra - l * l
    band = TANGENT_EPS_SQ * max(1.0, ra * ra, rb * rb)

    if hSq < -band:
        return IntersectionOutcome(
            kind=NO_INTERSECTION,
            points=(),
            fallback_midpoint=midpoint(a.center, b.center),
        )

    # 중심선 위의 기준점 (두 교점의 중점)
    baseX = a.center.x + (l / d) * dx
    baseY = a.center.y + (l / d) * dy

    if hSq <= band:
        return IntersectionOutcome(kind=TANGENT, points=(Point2D(baseX, baseY),))

    h = math.sqrt(hSq)
    offX = (h / d) * dy
    offY = (h / d) * dx
    first = Point2D(baseX + offX, baseY - offY)
    second = Point2D(baseX - offX, baseY + offY)
    if swapped:
        first, second = second, first
    return IntersectionOutcome(kind=TWO_POINTS, points=(first, second))


def _breakTie(points: Sequence[Point2D]) -> Point2D:
    """동률이면 y가 작은 점, 그다음 x가 작은 점"""
    return min(points, key=lambda p: (p.y, p.x))


def _pickByScore(points: Sequence[Point2D], scores: Sequence[float]) -> Point2D:
    if abs(scores[0] - scores[1]) <= TIE_EPS:
        return _breakTie(points)
    return points[0] if scores[0] < scores[1] else points[1]


def selectCandidate(outcome: IntersectionOutcome, otherAnchors: Sequence[Point2D]) -> Point2D:
    """교점 후보 중 나머지 앵커들에 더 가까운 점 선택

    "더 가깝다" = 나머지 앵커 좌표까지의 유클리드 거리 합이 작다.
    나머지 앵커가 없거나 거리합이 ε_tie 이내로 같으면 (작은 y, 작은 x) 순.
    """
    if outcome.kind == NO_INTERSECTION:
        return outcome.fallback_midpoint
    if outcome.kind == TANGENT:
        return outcome.points[0]

    if not otherAnchors:
        return _breakTie(outcome.points)

    scores = [math.fsum(distance(p, anchor) for anchor in otherAnchors) for p in outcome.points]
    return _pickByScore(outcome.points, scores)


def selectCandidateByResidual(
    outcome: IntersectionOutcome,
    otherTargets: Sequence[tuple[Point2D, float]],
) -> Point2D:
    """교점 후보 중 나머지 앵커의 추정 거리와 가장 잘 맞는 점 선택

    점수 = Σ | |p - anchor_k| - r̂_k |. 동률 처리는 selectCandidate와 같다.
    """
    if outcome.kind == NO_INTERSECTION:
        return outcome.fallback_midpoint
    if outcome.kind == TANGENT:
        return outcome.points[0]

    if not otherTargets:
        return _breakTie(outcome.points)

    scores = [
        math.fsum(abs(distance(p, anchor) - radius) for anchor, radius in otherTargets)
        for p in outcome.points
    ]
    return _pickByScore(outcome.points, scores)


def centroid(points: Sequence[Point2D]) -> Point2D:
    """좌표 산술 평균 (fsum 사용으로 순서와 무관한 결과)"""
    if not points:
        raise EmptyInput("centroid of an empty point list")
    n = len(points)
    return Point2D(
        math.fsum(p.x for p in points) / n,
        math.fsum(p.y for p in points) / n,
    )
