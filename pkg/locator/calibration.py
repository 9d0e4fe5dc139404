"""보정(Calibration) 모듈

- 알려진 위치에서 측정한 스캔으로 상위 M개 앵커의 (전력, 거리) 기준 항목 생성
- 앵커 쌍마다 경로손실 지수 α_l 계산 (C(M,2)개)
- 여러 보정 지점의 결과를 합쳐 α̂ 추정 → 보정 데이터베이스
- 데이터베이스 JSON 저장/로드 (항목 1줄 1레코드, 전체 정밀도)
"""

import json
import re
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from locator.constants import COINCIDENT_EPS, DEFAULT_M, FORMAT_DATABASE
from locator.errors import (
    AnchorAtCalibrationPoint,
    EqualDistances,
    InsufficientAnchors,
    InvalidInputError,
    MalformedDatabase,
    MixedCalibrationSize,
    NoAlphaSamples,
)
from locator.geometry import Point2D, distance
from locator.pathloss import aggregateAlpha, alphaFromPair, filterAlphas
from pipeline.records import ScanRecord
from pipeline.storage import readText, writeTextAtomic

ENTRY_FIELDS = ["anchor_id", "power_dbm", "distance_cm", "source_x_cm", "source_y_cm"]
ALPHA_CONSISTENCY_TOL = 1e-9
ENTRIES_KEY = re.compile(r"\"entries\"\s*:\s*\[")


@dataclass(frozen=True)
class AnchorMap:
    """고정 노드(앵커) 좌표표: anchor_id -> Point2D"""
    anchors: dict = field(default_factory=dict)

    def __post_init__(self):
        for anchorId, position in self.anchors.items():
            if not isinstance(anchorId, str) or not anchorId:
                raise InvalidInputError(f"anchor id must be a non-empty string, got {anchorId!r}")
            if not isinstance(position, Point2D):
                raise InvalidInputError(f"anchor '{anchorId}' position must be a Point2D")

    def __contains__(self, anchorId) -> bool:
        return anchorId in self.anchors

    def __len__(self) -> int:
        return len(self.anchors)

    def position(self, anchorId: str) -> Point2D:
        return self.anchors[anchorId]

    def ids(self) -> list[str]:
        """정렬된 앵커 ID 목록"""
        return sorted(self.anchors)

    def translated(self, dx: float, dy: float) -> "AnchorMap":
        return AnchorMap({k: p.translated(dx, dy) for k, p in self.anchors.items()})


@dataclass(frozen=True)
class CalibrationEntry:
    """기준 항목: 알려진 위치에서 앵커 1개의 수신 전력과 실제 거리"""
    anchor: str
    power: float               # P_i (dBm)
    distance: float            # r_i (cm)
    source_position: Point2D   # 측정 위치


@dataclass
class CalibrationBatch:
    """보정 지점 1곳의 결과"""
    entries: list
    alpha_samples: list
    m: int
    skipped_pairs: int = 0     # 거리 동일로 건너뛴 앵커 쌍 수


@dataclass
class CalibrationDatabase:
    """보정 데이터베이스 (생성 후 변경하지 않음)"""
    entries: list
    alpha_hat: Optional[float]
    alpha_samples: list
    m: int = DEFAULT_M
    discarded_alphas: int = field(default=0, compare=False)  # 타당성 필터로 제거된 샘플 수 (저장 안 함)

    @classmethod
    def empty(cls, m: int = DEFAULT_M) -> "CalibrationDatabase":
        return cls(entries=[], alpha_hat=None, alpha_samples=[], m=m)

    def anchorIds(self) -> list[str]:
        return sorted({e.anchor for e in self.entries})


def strongestReadings(scan: ScanRecord, anchors: AnchorMap, count: int) -> list[tuple[str, float]]:
    """앵커맵에 있는 측정값 중 전력 상위 count개 (동률은 ID 사전순)"""
    usable = [(anchorId, power) for anchorId, power in scan.readings.items() if anchorId in anchors]
    usable.sort(key=lambda item: (-item[1], item[0]))
    return usable[:count]


def calibrateAt(knownPosition: Point2D, scan: ScanRecord, anchors: AnchorMap, m: int = DEFAULT_M) -> CalibrationBatch:
    """알려진 위치 1곳에서 보정

    1. 앵커맵에 있는 측정값 중 상위 M개 선택 (동률은 ID 사전순)
    2. 각 앵커까지 실제 거리 계산 → 기준 항목
    3. 모든 앵커 쌍에 대해 α_l 계산 (거리 동일 쌍은 건너뛰고 개수 기록)

    Raises:
        InsufficientAnchors: 사용 가능한 측정값 < M 또는 M < 2
        AnchorAtCalibrationPoint: 보정 위치가 앵커 좌표와 겹침
    """
    if m < 2:
        raise InsufficientAnchors(f"calibration needs m >= 2, got {m}")

    for anchorId in anchors.ids():
        if distance(knownPosition, anchors.position(anchorId)) <= COINCIDENT_EPS:
            raise AnchorAtCalibrationPoint(
                f"calibration point ({knownPosition.x!r}, {knownPosition.y!r}) coincides with anchor '{anchorId}'"
            )

    selected = strongestReadings(scan, anchors, m)
    if len(selected) < m:
        raise InsufficientAnchors(
            f"scan at t={scan.timestamp!r} has {len(selected)} usable readings, calibration needs {m}"
        )

    entries = [
        CalibrationEntry(
            anchor=anchorId,
            power=power,
            distance=distance(knownPosition, anchors.position(anchorId)),
            source_position=knownPosition,
        )
        for anchorId, power in selected
    ]

    alphas = []
    skipped = 0
    for first, second in combinations(entries, 2):
        try:
            alphas.append(alphaFromPair(first.power, first.distance, second.power, second.distance))
        except EqualDistances:
            skipped += 1

    return CalibrationBatch(entries=entries, alpha_samples=alphas, m=m, skipped_pairs=skipped)


def mergeCalibrations(
    batches: Sequence[CalibrationBatch],
    alphaBounds: Optional[tuple[float, float]] = None,
) -> CalibrationDatabase:
    """여러 보정 지점 결과 병합 → 데이터베이스

    모든 지점의 α 샘플을 가중치 없이 모아 평균한다.
    alphaBounds가 주어지면 범위 밖 샘플은 평균 전에 제거된다.

    Raises:
        NoAlphaSamples: 사용할 α 샘플이 하나도 없음
        MixedCalibrationSize: 배치마다 M이 다름
    """
    if not batches:
        raise NoAlphaSamples("no calibration batches to merge")

    sizes = {batch.m for batch in batches}
    if len(sizes) > 1:
        raise MixedCalibrationSize(f"calibration batches use different m values: {sorted(sizes)}")

    entries = [entry for batch in batches for entry in batch.entries]
    pooled = [alpha for batch in batches for alpha in batch.alpha_samples]
    kept, discarded = filterAlphas(pooled, alphaBounds)
    if not kept:
        raise NoAlphaSamples(
            f"no usable path-loss exponent samples ({len(pooled)} computed, {discarded} outside bounds)"
        )

    return CalibrationDatabase(
        entries=entries,
        alpha_hat=aggregateAlpha(kept),
        alpha_samples=kept,
        m=batches[0].m,
        discarded_alphas=discarded,
    )


# === 저장/로드 ===

def _formatDatabase(db: CalibrationDatabase) -> str:
    """JSON 텍스트 생성 (항목은 1줄 1레코드, 필드 순서 고정)"""
    records = [
        json.dumps(
            [e.anchor, e.power, e.distance, e.source_position.x, e.source_position.y],
            ensure_ascii=False,
        )
        for e in db.entries
    ]
    lines = [
        "{",
        f'  "format": {json.dumps(FORMAT_DATABASE)},',
        f'  "m": {db.m},',
        f'  "alpha_hat": {json.dumps(db.alpha_hat)},',
        f'  "alpha_samples": {json.dumps(list(db.alpha_samples))},',
        f'  "entry_fields": {json.dumps(ENTRY_FIELDS)},',
        '  "entries": [',
    ]
    if records:
        lines.append(",\n".join(f"    {r}" for r in records))
    lines.extend(["  ]", "}"])
    return "\n".join(lines) + "\n"


def saveDatabase(db: CalibrationDatabase, destination):
    """데이터베이스 저장 (원자적 쓰기)"""
    _validateDatabase(db, str(destination))
    writeTextAtomic(destination, _formatDatabase(db))


def _number(value, source: str, fieldName: str, line: Optional[int] = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedDatabase(f"expected a number, got {value!r}", source=source, line=line, field=fieldName)
    value = float(value)
    if not math.isfinite(value):
        raise MalformedDatabase(f"non-finite number {value!r}", source=source, line=line, field=fieldName)
    return value


def _entryLines(text: str) -> list[int]:
    """entries 배열 각 레코드의 시작 줄 번호 (1부터)"""
    matches = list(ENTRIES_KEY.finditer(text))
    if not matches:
        return []
    decoder = json.JSONDecoder()
    pos = matches[-1].end()
    lines = []
    while True:
        while pos < len(text) and text[pos] in " \t\r\n,":
            pos += 1
        if pos >= len(text) or text[pos] == "]":
            return lines
        lines.append(text.count("\n", 0, pos) + 1)
        try:
            _, pos = decoder.raw_decode(text, pos)
        except json.JSONDecodeError:
            return lines


def _validateDatabase(db: CalibrationDatabase, source: str):
    if db.m < 2:
        raise MalformedDatabase(f"m must be >= 2, got {db.m}", source=source, field="m")
    if db.alpha_hat is None:
        if db.entries or db.alpha_samples:
            raise MalformedDatabase("alpha_hat is null but entries/samples are present", source=source, field="alpha_hat")
        return
    if not db.entries:
        raise MalformedDatabase("alpha_hat present but no entries", source=source, field="entries")
    if not db.alpha_samples:
        raise MalformedDatabase("alpha_hat present but alpha_samples is empty", source=source, field="alpha_samples")
    if abs(db.alpha_hat - aggregateAlpha(db.alpha_samples)) > ALPHA_CONSISTENCY_TOL:
        raise MalformedDatabase("alpha_hat does not equal the mean of alpha_samples", source=source, field="alpha_hat")


def parseDatabase(text: str, source: str = "<database>") -> CalibrationDatabase:
    """데이터베이스 JSON 텍스트 파싱 + 스키마 검증"""
    if not text.strip():
        raise MalformedDatabase("empty database file", source=source, line=1)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedDatabase(e.msg, source=source, line=e.lineno) from e

    if not isinstance(raw, dict):
        raise MalformedDatabase("top level must be an object", source=source, line=1)
    if raw.get("format") != FORMAT_DATABASE:
        raise MalformedDatabase(
            f"unsupported format {raw.get('format')!r}, expected {FORMAT_DATABASE!r}", source=source, field="format"
        )
    for key in ("m", "alpha_hat", "alpha_samples", "entries"):
        if key not in raw:
            raise MalformedDatabase("missing required field", source=source, field=key)

    m = raw["m"]
    if isinstance(m, bool) or not isinstance(m, int):
        raise MalformedDatabase(f"m must be an integer, got {m!r}", source=source, field="m")

    alphaHat = None if raw["alpha_hat"] is None else _number(raw["alpha_hat"], source, "alpha_hat")

    if not isinstance(raw["alpha_samples"], list):
        raise MalformedDatabase("alpha_samples must be a list", source=source, field="alpha_samples")
    samples = [_number(v, source, f"alpha_samples[{i}]") for i, v in enumerate(raw["alpha_samples"])]

    if "entry_fields" in raw and raw["entry_fields"] != ENTRY_FIELDS:
        raise MalformedDatabase(f"entry field order must be {ENTRY_FIELDS}", source=source, field="entry_fields")
    if not isinstance(raw["entries"], list):
        raise MalformedDatabase("entries must be a list", source=source, field="entries")

    entries = []
    entryLines = _entryLines(text)
    for idx, record in enumerate(raw["entries"]):
        where = f"entries[{idx}]"
        line = entryLines[idx] if idx < len(entryLines) else None
        if not isinstance(record, list) or len(record) != len(ENTRY_FIELDS):
            raise MalformedDatabase(f"record must have {len(ENTRY_FIELDS)} fields", source=source, line=line, field=where)
        anchorId = record[0]
        if not isinstance(anchorId, str) or not anchorId:
            raise MalformedDatabase("anchor_id must be a non-empty string", source=source, line=line,
                                    field=f"{where}.anchor_id")
        power = _number(record[1], source, f"{where}.power_dbm", line)
        dist = _number(record[2], source, f"{where}.distance_cm", line)
        if dist <= 0:
            raise MalformedDatabase(f"distance must be positive, got {dist!r}", source=source, line=line,
                                    field=f"{where}.distance_cm")
        srcX = _number(record[3], source, f"{where}.source_x_cm", line)
        srcY = _number(record[4], source, f"{where}.source_y_cm", line)
        entries.append(CalibrationEntry(anchorId, power, dist, Point2D(srcX, srcY)))

    db = CalibrationDatabase(entries=entries, alpha_hat=alphaHat, alpha_samples=samples, m=m)
    _validateDatabase(db, source)
    return db


def loadDatabase(source) -> CalibrationDatabase:
    """데이터베이스 파일 로드"""
    return parseDatabase(readText(source, MalformedDatabase), source=str(source))
