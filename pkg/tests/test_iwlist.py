#!/usr/bin/env python3
"""
iwlist 스캔 출력 변환기 테스트

실행:
    python tests/test_iwlist.py
"""

import sys
from pathlib import Path

import pytest

projectPath = Path(__file__).parent.parent
sys.path.insert(0, str(projectPath))

from locator.errors import InvalidInputError, IoFailure
from pipeline.iwlist_converter import ConversionStats, convertIwlistFiles, parseIwlistScan

SCAN_OUTPUT = """\
wlan0     Scan completed :
          Cell 01 - Address: 00:1A:2B:3C:4D:01
                    Channel:36
                    Frequency:5.18 GHz (Channel 36)
                    Quality=52/70  Signal level=-58 dBm
                    Encryption key:on
                    ESSID:"AP01"
          Cell 02 - Address: 00:1A:2B:3C:4D:02
                    Channel:40
                    Quality=30/70  Signal level=-80 dBm
                    ESSID:"AP02"
          Cell 03 - Address: 00:1A:2B:3C:4D:03
                    Quality=45/70  Signal level=-65.5 dBm
                    ESSID:""
          Cell 04 - Address: 00:1A:2B:3C:4D:04
                    Quality:0  Signal level:0  Noise level:0
                    ESSID:"AP04"
          Cell 05 - Address: 00:1A:2B:3C:4D:05
                    Quality=60/70  Signal level=-49 dBm
                    ESSID:"AP01"
"""


def test_parse_scan_output():
    stats = ConversionStats()
    readings = parseIwlistScan(SCAN_OUTPUT, stats)
    assert readings == {"AP01": -49.0, "AP02": -80.0}
    assert stats.cells == 5
    assert stats.skipped_cells == 2       # 빈 ESSID, dBm 없는 신호값
    assert stats.duplicate_essids == 1
    assert stats.scans == 1


def test_parse_empty_output():
    assert parseIwlistScan("wlan0     No scan results\n") == {}


def test_convert_files_in_order(tmp_path):
    paths = []
    for idx, level in enumerate((-58, -61, -64)):
        path = tmp_path / f"scan_{idx:03d}.txt"
        path.write_text(SCAN_OUTPUT.replace("Signal level=-58 dBm", f"Signal level={level} dBm")
                        .replace('"AP01"\n', '"AP09"\n', 1), encoding="utf-8")
        paths.append(path)
    records, stats = convertIwlistFiles(paths)
    assert [r.timestamp for r in records] == [0.0, 60.0, 120.0]
    assert [r.readings["AP09"] for r in records] == [-58.0, -61.0, -64.0]
    assert stats.scans == 3


def test_convert_with_explicit_timestamps(tmp_path):
    path = tmp_path / "scan.txt"
    path.write_text(SCAN_OUTPUT, encoding="utf-8")
    records, _ = convertIwlistFiles([path, path], timestamps=[5.0, 65.5])
    assert [r.timestamp for r in records] == [5.0, 65.5]
    with pytest.raises(InvalidInputError):
        convertIwlistFiles([path, path], timestamps=[5.0])
    with pytest.raises(InvalidInputError):
        convertIwlistFiles([path, path], timestamps=[5.0, 5.0])


def test_convert_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        convertIwlistFiles([tmp_path / "missing.txt"])


if __name__ == "__main__":
    from tests.runner import runModule
    sys.exit(runModule(globals()))
