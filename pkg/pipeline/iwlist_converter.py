"""iwlist 스캔 출력 → 트레이스 변환기

`iwlist <iface> scan` 출력을 스캔 1회당 파일 1개로 저장해 두었을 때,
파일 순서대로 타임스탬프(기본 60초 간격)를 붙여 트레이스 포맷으로 바꾼다.

- 앵커 ID = ESSID, 전력 = "Signal level=-NN dBm"
- ESSID나 dBm 신호값이 없는 셀은 건너뛰고 개수만 센다
- 한 스캔에서 같은 ESSID가 여러 번 나오면 가장 강한 값 사용

실행 방법:
    python pipeline/iwlist_converter.py scan_000.txt scan_001.txt -o trace.csv
"""

import argparse
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

# 상위 경로 추가
sys.path.insert(0, str(Path(__file__).parent.parent))

from locator.constants import SCAN_INTERVAL_S
from locator.errors import InvalidInputError, LocatorError, MalformedTrace
from pipeline.records import ScanRecord
from pipeline.storage import readText
from pipeline.trace_io import saveTrace

CELL_RE = re.compile(r"^Cell\s+\d+\s+-\s+Address:\s*(?P<mac>\S+)")
ESSID_RE = re.compile(r'^ESSID:"(?P<essid>.*)"\s*$')
SIGNAL_RE = re.compile(r"Signal level[=:]\s*(?P<level>-?\d+(?:\.\d+)?)\s*dBm")


@dataclass
class ConversionStats:
    """변환 통계"""
    scans: int = 0
    cells: int = 0
    skipped_cells: int = 0      # ESSID/신호값 없음
    duplicate_essids: int = 0   # 같은 스캔 내 중복 ESSID


def _flushCell(cell: dict, readings: dict, stats: ConversionStats):
    stats.cells += 1
    essid = cell.get("essid")
    level = cell.get("level")
    if not essid or essid != essid.strip() or level is None:
        stats.skipped_cells += 1
        return
    if essid in readings:
        stats.duplicate_essids += 1
        readings[essid] = max(readings[essid], level)
    else:
        readings[essid] = level


def parseIwlistScan(text: str, stats: Optional[ConversionStats] = None) -> dict:
    """iwlist 출력 1개 → {ESSID: dBm}"""
    stats = stats if stats is not None else ConversionStats()
    readings = {}
    cell = None
    for rawLine in text.splitlines():
        line = rawLine.strip()
        if CELL_RE.match(line):
            if cell is not None:
                _flushCell(cell, readings, stats)
            cell = {}
            continue
        if cell is None:
            continue
        essid = ESSID_RE.match(line)
        if essid:
            cell["essid"] = essid.group("essid")
            continue
        signal = SIGNAL_RE.search(line)
        if signal:
            cell["level"] = float(signal.group("level"))
    if cell is not None:
        _flushCell(cell, readings, stats)
    stats.scans += 1
    return readings


def convertIwlistFiles(
    paths: Sequence,
    timestamps: Optional[Sequence[float]] = None,
    interval: float = SCAN_INTERVAL_S,
) -> tuple[list[ScanRecord], ConversionStats]:
    """스캔 파일 목록 → ScanRecord 목록 (파일 순서 = 스캔 순서)"""
    if timestamps is not None and len(timestamps) != len(paths):
        raise InvalidInputError(f"{len(timestamps)} timestamps given for {len(paths)} scan files")
    if timestamps is not None and any(b <= a for a, b in zip(timestamps, timestamps[1:])):
        raise InvalidInputError("scan timestamps must be strictly increasing")

    stats = ConversionStats()
    records = []
    for idx, path in enumerate(paths):
        readings = parseIwlistScan(readText(path, MalformedTrace), stats)
        timestamp = float(timestamps[idx]) if timestamps is not None else idx * interval
        records.append(ScanRecord(timestamp, readings))
    return records, stats


def main():
    """CLI 진입점"""
    parser = argparse.ArgumentParser(description="iwlist 스캔 출력 → RSSI 트레이스 변환")
    parser.add_argument("scans", nargs="+", help="스캔 출력 파일 (스캔 순서대로)")
    parser.add_argument("--output", "-o", required=True, help="트레이스 파일 경로")
    parser.add_argument(
        "--interval",
        type=float,
        default=SCAN_INTERVAL_S,
        help=f"스캔 간격 초 (기본값: {SCAN_INTERVAL_S:.0f})"
    )

    args = parser.parse_args()

    try:
        records, stats = convertIwlistFiles(args.scans, interval=args.interval)
        saveTrace(records, args.output, {"source": "iwlist", "interval_s": repr(args.interval)})
    except LocatorError as e:
        print(f"[오류] {e}")
        sys.exit(e.exitCode)

    print(f"[변환] {stats.scans}개 스캔, {stats.cells}개 셀 → {args.output}")
    if stats.skipped_cells:
        print(f"[경고] ESSID/신호값 없는 셀 {stats.skipped_cells}개 건너뜀")
    if stats.duplicate_essids:
        print(f"[경고] 중복 ESSID {stats.duplicate_essids}개 (가장 강한 값 사용)")


if __name__ == "__main__":
    main()
