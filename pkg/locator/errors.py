"""오류 분류 모듈

모든 예외는 LocatorError를 상속하고, CLI 종료 코드로 매핑되는 category를 가진다.
- usage (1): 잘못된 명령/플래그
- malformed_input (2): 입력 파일/설정 오류
- estimation_failure (3): 보정/추정 계산 실패
- io_failure (4): 파일 입출력 실패
"""

from typing import Optional


class LocatorError(Exception):
    """rssiloc 공통 예외"""
    category = "estimation_failure"
    exitCode = 3


class UsageError(LocatorError):
    category = "usage"
    exitCode = 1


class IoFailure(LocatorError):
    category = "io_failure"
    exitCode = 4


# === 입력 오류 (exit 2) ===

class InvalidInputError(LocatorError):
    """값 자체가 계약을 어긴 입력"""
    category = "malformed_input"
    exitCode = 2


class MalformedInputError(InvalidInputError):
    """파싱 실패 (줄/필드 위치 포함)"""

    def __init__(self, message: str, source: Optional[str] = None,
                 line: Optional[int] = None, field: Optional[str] = None):
        self.message = message
        self.source = source
        self.line = line
        self.field = field
        super().__init__(self._render())

    def _render(self) -> str:
        where = self.source or "<input>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        if self.field:
            return f"{where}: {self.field}: {self.message}"
        return f"{where}: {self.message}"


class MalformedTrace(MalformedInputError):
    pass


class MalformedAnchors(MalformedInputError):
    pass


class MalformedGroundTruth(MalformedInputError):
    pass


class MalformedDatabase(MalformedInputError):
    pass


class MalformedConfig(MalformedInputError):
    pass


class MissingGroundTruth(InvalidInputError):
    def __init__(self, timestamp: float):
        self.timestamp = timestamp
        super().__init__(f"no ground-truth position for timestamp {timestamp!r}")


class EmptyTrace(InvalidInputError):
    pass


class UnknownAnchorInTrace(InvalidInputError):
    def __init__(self, anchorId: str):
        self.anchorId = anchorId
        super().__init__(f"anchor '{anchorId}' appears in the trace but not in the anchor map")


class PositionOutOfBounds(InvalidInputError):
    pass


class PositionOnAnchor(InvalidInputError):
    pass


class NonFiniteCoordinate(InvalidInputError):
    pass


class InvalidCircle(InvalidInputError):
    pass


# === 계산 실패 (exit 3) ===

class EstimationError(LocatorError):
    category = "estimation_failure"
    exitCode = 3


class CoincidentCenters(EstimationError):
    pass


class EmptyInput(EstimationError):
    pass


class EqualDistances(EstimationError):
    pass


class NonPositiveAlpha(EstimationError):
    pass


class NonPositiveDistance(EstimationError):
    pass


class InsufficientAnchors(EstimationError):
    pass


class AnchorAtCalibrationPoint(EstimationError):
    pass


class NoAlphaSamples(EstimationError):
    pass


class MixedCalibrationSize(EstimationError):
    pass


class EmptyDatabase(EstimationError):
    pass


class TooFewTargets(EstimationError):
    pass


class TooFewUsablePairs(EstimationError):
    pass
