"""트레이스/앵커/정답 위치 파일 입출력

포맷 (UTF-8, 쉼표 구분, 첫 줄 버전 헤더 + 컬럼 헤더 필수):
- anchors:      # rssiloc-anchors v1      / anchor_id,x_cm,y_cm
- trace:        # rssiloc-trace v1        / timestamp_s,anchor_id,rssi_dbm
- ground truth: # rssiloc-groundtruth v1  / timestamp_s,x_cm,y_cm

버전 헤더 뒤에는 key=value 메타데이터(기본값/시드 등)를 붙일 수 있다.
숫자는 repr()로 기록하여 파싱 시 정확히 같은 값으로 복원된다.
"""

import csv
import io
import math
from typing import Optional, Sequence

from locator.calibration import AnchorMap
from locator.constants import FORMAT_ANCHORS, FORMAT_ESTIMATES, FORMAT_GROUND_TRUTH, FORMAT_TRACE
from locator.errors import MalformedAnchors, MalformedGroundTruth, MalformedTrace
from locator.geometry import Point2D
from pipeline.records import ScanRecord
from pipeline.storage import readText, writeTextAtomic

ANCHOR_COLUMNS = ["anchor_id", "x_cm", "y_cm"]
TRACE_COLUMNS = ["timestamp_s", "anchor_id", "rssi_dbm"]
GROUND_TRUTH_COLUMNS = ["timestamp_s", "x_cm", "y_cm"]


# === 공통 ===

def formatHeader(tag: str, meta: Optional[dict] = None) -> str:
    """버전 헤더 한 줄: '# <tag> key=value ...'"""
    parts = [f"# {tag}"]
    for key, value in (meta or {}).items():
        parts.append(f"{key}={value}")
    return " ".join(parts)


def parseHeader(line: str, tag: str, errorCls: type, source: str) -> dict:
    """버전 헤더 검증 후 메타데이터 반환"""
    prefix = f"# {tag}"
    if line != prefix and not line.startswith(prefix + " "):
        raise errorCls(f"expected version header '{prefix}', got {line[:60]!r}", source=source, line=1)
    meta = {}
    for token in line[len(prefix):].split():
        key, sep, value = token.partition("=")
        if not sep or not key:
            raise errorCls(f"header metadata must be key=value, got {token!r}", source=source, line=1)
        meta[key] = value
    return meta


def _rows(text: str, tag: str, columns: list[str], errorCls: type, source: str):
    """헤더 두 줄을 검증하고 (줄 번호, 필드 목록)을 순서대로 생성"""
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader, None)
        if first is None:
            return
        parseHeader(",".join(first), tag, errorCls, source)
        header = next(reader, None)
        if header != columns:
            raise errorCls(f"expected column header {','.join(columns)}", source=source, line=2)
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(columns):
                raise errorCls(f"expected {len(columns)} fields, got {len(row)}", source=source, line=reader.line_num)
            yield reader.line_num, row
    except csv.Error as e:
        raise errorCls(f"csv error: {e}", source=source, line=reader.line_num) from e


def _parseNumber(raw: str, errorCls: type, source: str, line: int, fieldName: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise errorCls(f"not a number: {raw!r}", source=source, line=line, field=fieldName) from None
    if not math.isfinite(value):
        raise errorCls(f"non-finite value {raw!r}", source=source, line=line, field=fieldName)
    return value


def _parseId(raw: str, errorCls: type, source: str, line: int) -> str:
    if not raw or raw != raw.strip():
        raise errorCls(f"anchor id must be non-empty without surrounding spaces, got {raw!r}",
                       source=source, line=line, field="anchor_id")
    return raw


def _csvText(headerLine: str, columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(headerLine + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


# === anchors ===

def parseAnchors(text: str, source: str = "<anchors>") -> AnchorMap:
    """앵커 파일 파싱 → AnchorMap (중복 ID, 숫자 아닌 좌표, 빈 파일은 오류)"""
    anchors = {}
    for line, row in _rows(text, FORMAT_ANCHORS, ANCHOR_COLUMNS, MalformedAnchors, source):
        anchorId = _parseId(row[0], MalformedAnchors, source, line)
        if anchorId in anchors:
            raise MalformedAnchors(f"duplicate anchor id '{anchorId}'", source=source, line=line, field="anchor_id")
        x = _parseNumber(row[1], MalformedAnchors, source, line, "x_cm")
        y = _parseNumber(row[2], MalformedAnchors, source, line, "y_cm")
        anchors[anchorId] = Point2D(x, y)
    if not anchors:
        raise MalformedAnchors("anchor file defines no anchors", source=source)
    return AnchorMap(anchors)


def formatAnchors(anchors: AnchorMap, meta: Optional[dict] = None) -> str:
    rows = [[anchorId, repr(p.x), repr(p.y)] for anchorId, p in
            ((k, anchors.position(k)) for k in anchors.ids())]
    return _csvText(formatHeader(FORMAT_ANCHORS, meta), ANCHOR_COLUMNS, rows)


def loadAnchors(path) -> AnchorMap:
    return parseAnchors(readText(path, MalformedAnchors), source=str(path))


def saveAnchors(anchors: AnchorMap, path, meta: Optional[dict] = None):
    writeTextAtomic(path, formatAnchors(anchors, meta))


# === trace ===

def parseTrace(text: str, source: str = "<trace>") -> list[ScanRecord]:
    """트레이스 파싱 → 타임스탬프 오름차순 ScanRecord 목록

    같은 타임스탬프의 행들이 스캔 1개를 이룬다. (timestamp, anchor) 중복은 오류.
    빈 파일은 빈 목록.
    """
    scans: dict[float, dict] = {}
    for line, row in _rows(text, FORMAT_TRACE, TRACE_COLUMNS, MalformedTrace, source):
        timestamp = _parseNumber(row[0], MalformedTrace, source, line, "timestamp_s")
        if timestamp < 0:
            raise MalformedTrace(f"negative timestamp {row[0]!r}", source=source, line=line, field="timestamp_s")
        anchorId = _parseId(row[1], MalformedTrace, source, line)
        power = _parseNumber(row[2], MalformedTrace, source, line, "rssi_dbm")
        readings = scans.setdefault(timestamp, {})
        if anchorId in readings:
            raise MalformedTrace(f"duplicate reading for anchor '{anchorId}' at t={row[0]}",
                                 source=source, line=line, field="anchor_id")
        readings[anchorId] = power
    return [ScanRecord(timestamp, scans[timestamp]) for timestamp in sorted(scans)]


def formatTrace(records: Sequence[ScanRecord], meta: Optional[dict] = None) -> str:
    rows = []
    for record in records:
        for anchorId in sorted(record.readings):
            rows.append([repr(record.timestamp), anchorId, repr(record.readings[anchorId])])
    return _csvText(formatHeader(FORMAT_TRACE, meta), TRACE_COLUMNS, rows)


def loadTrace(path) -> list[ScanRecord]:
    return parseTrace(readText(path, MalformedTrace), source=str(path))


def saveTrace(records: Sequence[ScanRecord], path, meta: Optional[dict] = None):
    writeTextAtomic(path, formatTrace(records, meta))


# === ground truth ===

def parseGroundTruth(text: str, source: str = "<ground-truth>") -> list[tuple[float, Point2D]]:
    """정답 위치 파일 파싱 → (timestamp, Point2D) 목록 (타임스탬프 중복은 오류)"""
    points = []
    seen = set()
    for line, row in _rows(text, FORMAT_GROUND_TRUTH, GROUND_TRUTH_COLUMNS, MalformedGroundTruth, source):
        timestamp = _parseNumber(row[0], MalformedGroundTruth, source, line, "timestamp_s")
        if timestamp < 0:
            raise MalformedGroundTruth(f"negative timestamp {row[0]!r}", source=source, line=line, field="timestamp_s")
        if timestamp in seen:
            raise MalformedGroundTruth(f"duplicate timestamp {row[0]}", source=source, line=line, field="timestamp_s")
        seen.add(timestamp)
        x = _parseNumber(row[1], MalformedGroundTruth, source, line, "x_cm")
        y = _parseNumber(row[2], MalformedGroundTruth, source, line, "y_cm")
        points.append((timestamp, Point2D(x, y)))
    return points


def formatGroundTruth(points: Sequence[tuple[float, Point2D]], meta: Optional[dict] = None) -> str:
    rows = [[repr(t), repr(p.x), repr(p.y)] for t, p in points]
    return _csvText(formatHeader(FORMAT_GROUND_TRUTH, meta), GROUND_TRUTH_COLUMNS, rows)


def loadGroundTruth(path) -> list[tuple[float, Point2D]]:
    return parseGroundTruth(readText(path, MalformedGroundTruth), source=str(path))


def saveGroundTruth(points: Sequence[tuple[float, Point2D]], path, meta: Optional[dict] = None):
    writeTextAtomic(path, formatGroundTruth(points, meta))


# === estimates (locate 결과) ===

ESTIMATE_COLUMNS = ["timestamp_s", "est_x_cm", "est_y_cm", "anchors_used", "pairs_used", "pairs_skipped", "status"]


def formatEstimates(results: Sequence[tuple[float, object]], meta: Optional[dict] = None) -> str:
    """(timestamp, PositionEstimate 또는 예외) 목록 → estimates 파일 텍스트

    사용 앵커는 ';'로 이어 붙이고, 실패 행은 좌표를 비우고 status에 예외 이름을 쓴다.
    """
    rows = []
    for timestamp, outcome in results:
        if isinstance(outcome, Exception):
            rows.append([repr(timestamp), "", "", "", "0", "0", type(outcome).__name__])
            continue
        rows.append([
            repr(timestamp),
            repr(outcome.position.x),
            repr(outcome.position.y),
            ";".join(anchorId for anchorId, _ in outcome.used_anchors),
            str(len(outcome.per_pair_points)),
            str(len(outcome.skipped_pairs)),
            "ok",
        ])
    return _csvText(formatHeader(FORMAT_ESTIMATES, meta), ESTIMATE_COLUMNS, rows)


def saveEstimates(results: Sequence[tuple[float, object]], path, meta: Optional[dict] = None):
    writeTextAtomic(path, formatEstimates(results, meta))
