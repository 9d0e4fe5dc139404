"""무선 채널 모델 (log-distance 경로손실 + 가우시안 섀도잉 + 드롭아웃)

난수는 (seed, draw_index, 앵커 ID)로 키를 만든 카운터 기반 스트림(Philox)에서 뽑는다.
- 같은 키 → 항상 같은 값 (실행 순서, 병렬화 여부와 무관)
- 앵커를 추가/삭제해도 다른 앵커의 값은 변하지 않음
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from locator.constants import (
    DEFAULT_ALPHA_TRUE,
    DEFAULT_DROPOUT_PROB,
    DEFAULT_REF_DISTANCE_CM,
    DEFAULT_REF_POWER_DBM,
    DEFAULT_RSSI_FLOOR_DBM,
    DEFAULT_SEED,
    DEFAULT_SHADOW_SIGMA_DB,
)
from locator.errors import InvalidInputError
from locator.pathloss import powerAtDistance

UINT64_LIMIT = 2 ** 64


@dataclass(frozen=True)
class ChannelModel:
    """시뮬레이터 채널 파라미터 (기본값은 실내 환경 가정값)"""
    alpha_true: float = DEFAULT_ALPHA_TRUE
    ref_power: float = DEFAULT_REF_POWER_DBM          # ref_distance에서의 수신 전력
    ref_distance: float = DEFAULT_REF_DISTANCE_CM
    shadow_sigma_db: float = DEFAULT_SHADOW_SIGMA_DB
    dropout_prob: float = DEFAULT_DROPOUT_PROB
    rssi_floor: float = DEFAULT_RSSI_FLOOR_DBM        # 이보다 약한 측정값은 버림
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        for name in ("alpha_true", "ref_power", "ref_distance", "shadow_sigma_db", "dropout_prob", "rssi_floor"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidInputError(f"channel {name} must be a finite number, got {value!r}")
        if not self.alpha_true > 0:
            raise InvalidInputError(f"channel alpha_true must be positive, got {self.alpha_true!r}")
        if not self.ref_distance > 0:
            raise InvalidInputError(f"channel ref_distance must be positive, got {self.ref_distance!r}")
        if self.shadow_sigma_db < 0:
            raise InvalidInputError(f"channel shadow_sigma_db must be >= 0, got {self.shadow_sigma_db!r}")
        if not 0.0 <= self.dropout_prob <= 1.0:
            raise InvalidInputError(f"channel dropout_prob must be in [0, 1], got {self.dropout_prob!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < UINT64_LIMIT:
            raise InvalidInputError(f"channel seed must be an integer in [0, 2^64), got {self.seed!r}")

    def meanPower(self, distanceCm: float) -> float:
        """노이즈 없는 수신 전력 (dBm)"""
        return powerAtDistance(self.ref_power, self.ref_distance, distanceCm, self.alpha_true)

    def describe(self) -> dict:
        """출력 파일 헤더용 파라미터 (키 순서 고정)"""
        return {
            "alpha_true": repr(float(self.alpha_true)),
            "ref_power_dbm": repr(float(self.ref_power)),
            "ref_distance_cm": repr(float(self.ref_distance)),
            "shadow_sigma_db": repr(float(self.shadow_sigma_db)),
            "dropout_prob": repr(float(self.dropout_prob)),
            "rssi_floor_dbm": repr(float(self.rssi_floor)),
            "seed": str(self.seed),
        }


def anchorHash(anchorId: str) -> int:
    """앵커 ID → 64비트 정수 (blake2b, 플랫폼 무관)"""
    digest = hashlib.blake2b(anchorId.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def drawStream(seed: int, drawIndex: int, anchorId: str) -> np.random.Generator:
    """(seed, draw_index, 앵커) 전용 난수 생성기

    Philox 키 = seed | anchorHash << 64, 카운터 = draw_index << 64
    """
    if drawIndex < 0 or drawIndex >= UINT64_LIMIT:
        raise InvalidInputError(f"draw_index must be in [0, 2^64), got {drawIndex!r}")
    key = seed + (anchorHash(anchorId) << 64)
    return np.random.Generator(np.random.Philox(key=key, counter=drawIndex << 64))


def sampleReading(channel: ChannelModel, distanceCm: float, drawIndex: int, anchorId: str):
    """앵커 1개의 측정값 생성 → dBm 또는 None(드롭아웃)

    정규분포 1개, 균등분포 1개를 항상 같은 순서로 뽑는다.
    """
    stream = drawStream(channel.seed, drawIndex, anchorId)
    gaussian = float(stream.standard_normal())
    uniform = float(stream.random())

    power = channel.meanPower(distanceCm)
    if channel.shadow_sigma_db > 0:
        power += channel.shadow_sigma_db * gaussian
    if uniform < channel.dropout_prob or power < channel.rssi_floor:
        return None
    return power
