"""로그-거리 경로손실 계산 모듈

- 보정 쌍으로부터 경로손실 지수 α 계산, 평균으로 α̂ 추정
- 수신 전력 → 거리 역변환, 거리 추정값 평균
- 시뮬레이터용 순방향 모델 (거리 → 수신 전력)

단위: 거리 cm, 전력 dBm. 로그는 상용로그(log10).
"""

import math
from typing import Optional, Sequence

from locator.constants import LOG_RATIO_EPS
from locator.errors import EmptyInput, EqualDistances, NonPositiveAlpha, NonPositiveDistance


def alphaFromPair(pI: float, rI: float, pJ: float, rJ: float) -> float:
    """두 앵커의 (전력, 거리) 쌍으로 경로손실 지수 계산

    α = (P_i - P_j) / (10 · log10(r_j / r_i))

    Raises:
        EqualDistances: |log10(r_j / r_i)| <= ε_log (분모 0, 해당 쌍은 건너뛴다)
    """
    if rI <= 0 or rJ <= 0:
        raise NonPositiveDistance(f"distances must be positive, got {rI!r}, {rJ!r}")
    logRatio = math.log10(rJ / rI)
    if abs(logRatio) <= LOG_RATIO_EPS:
        raise EqualDistances(f"reference distances {rI!r} and {rJ!r} are effectively equal")
    return (pI - pJ) / (10.0 * logRatio)


def aggregateAlpha(alphas: Sequence[float]) -> float:
    """α 샘플 산술 평균 → α̂"""
    if not alphas:
        raise EmptyInput("no path-loss exponent samples to average")
    return math.fsum(alphas) / len(alphas)


def filterAlphas(alphas: Sequence[float], bounds: Optional[tuple[float, float]]) -> tuple[list[float], int]:
    """타당성 범위 [α_min, α_max] 밖의 샘플 제거

    Returns:
        (남은 샘플, 제거된 개수). bounds가 None이면 그대로 반환.
    """
    if bounds is None:
        return list(alphas), 0
    low, high = bounds
    kept = [a for a in alphas if low <= a <= high]
    return kept, len(alphas) - len(kept)


def distanceFromPower(pK: float, refP: float, refR: float, alphaHat: float) -> float:
    """수신 전력으로부터 거리 추정 (기준 항목 1개 사용)

    r_k = r_i · 10^((P_i - P_k) / (10 · α̂))
    """
    if not alphaHat > 0:
        raise NonPositiveAlpha(f"path-loss exponent must be positive, got {alphaHat!r}")
    if refR <= 0:
        raise NonPositiveDistance(f"reference distance must be positive, got {refR!r}")
    try:
        estimate = refR * 10.0 ** ((refP - pK) / (10.0 * alphaHat))
    except OverflowError:
        estimate = math.inf
    if not (math.isfinite(estimate) and estimate > 0):
        raise NonPositiveDistance(f"distance estimate for {pK!r} dBm is out of range ({estimate!r})")
    return estimate


def aggregateDistance(estimates: Sequence[float]) -> float:
    """기준 항목별 거리 추정값 평균 → r̂_k"""
    if not estimates:
        raise EmptyInput("no distance estimates to average")
    return math.fsum(estimates) / len(estimates)


def powerAtDistance(refP: float, refR: float, r: float, alpha: float) -> float:
    """순방향 로그-거리 모델: P(r) = P_ref - 10 · α · log10(r / r_ref)"""
    if r <= 0 or refR <= 0:
        raise NonPositiveDistance(f"distances must be positive, got r={r!r}, ref={refR!r}")
    if not alpha > 0:
        raise NonPositiveAlpha(f"path-loss exponent must be positive, got {alpha!r}")
    return refP - 10.0 * alpha * math.log10(r / refR)
