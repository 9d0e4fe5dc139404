"""스캔 레코드 데이터 클래스

주기적 RSSI 스캔 1회 = ScanRecord 1개 (앵커 ID → 수신 전력 dBm)
"""

import math
from dataclasses import dataclass, field

from locator.errors import InvalidInputError


@dataclass(frozen=True)
class ScanRecord:
    """RSSI 스냅샷 1회분"""
    timestamp: float                              # 트레이스 시작 기준 초
    readings: dict = field(default_factory=dict)  # anchor_id -> power_dbm

    def __post_init__(self):
        if not (math.isfinite(self.timestamp) and self.timestamp >= 0):
            raise InvalidInputError(f"scan timestamp must be finite and non-negative, got {self.timestamp!r}")
        for anchorId, power in self.readings.items():
            if not math.isfinite(power):
                raise InvalidInputError(f"non-finite reading for anchor '{anchorId}': {power!r}")

    def shifted(self, offsetDb: float) -> "ScanRecord":
        """모든 전력에 같은 dB 오프셋을 더한 복사본"""
        return ScanRecord(self.timestamp, {k: v + offsetDb for k, v in self.readings.items()})
