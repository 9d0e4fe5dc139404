"""위치 추정 평가 모듈

- 스캔마다 locate 실행 → 정답 위치와의 유클리드 오차
- 오차 오름차순 정렬된 행 + 요약 통계 (최소/중앙값/최대/평균, 백분위, 반경 내 비율)
- 평가 보고서 파일 생성 (오차 컬럼은 소수점 2자리)
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from tqdm import tqdm

from locator.calibration import AnchorMap, CalibrationDatabase
from locator.constants import FORMAT_REPORT, REPORT_PERCENTILES, REPORT_WITHIN_CM, SHOW_PROGRESS, evalWorkers
from locator.errors import EstimationError, InvalidInputError, MalformedInputError, MissingGroundTruth
from locator.estimator import EstimatorConfig, PositionEstimate, locate
from locator.geometry import Point2D
from pipeline.records import ScanRecord
from pipeline.storage import readText, writeTextAtomic
from pipeline.trace_io import formatHeader, parseHeader

STATUS_OK = "ok"
REPORT_COLUMNS = ["timestamp_s", "est_x_cm", "est_y_cm", "act_x_cm", "act_y_cm", "error_cm", "status"]


def positionError(estimated: Point2D, actual: Point2D) -> float:
    """추정 위치와 실제 위치 사이 유클리드 거리 (cm)"""
    return math.hypot(estimated.x - actual.x, estimated.y - actual.y)


@dataclass(frozen=True)
class EvaluationRow:
    """평가 행 1개 (실패 행은 estimated/error_cm가 None)"""
    timestamp: float
    estimated: Optional[Point2D]
    actual: Point2D
    error_cm: Optional[float]
    status: str = STATUS_OK

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


@dataclass
class EvaluationReport:
    rows: list = field(default_factory=list)       # 성공 행, 오차 오름차순
    failures: list = field(default_factory=list)   # 실패 행, 타임스탬프 순
    summary: dict = field(default_factory=dict)

    @property
    def failureCount(self) -> int:
        return len(self.failures)

    def allRows(self) -> list[EvaluationRow]:
        return self.rows + self.failures


def summarize(errors: Sequence[float], failures: int = 0) -> dict:
    """오차 목록 → 요약 통계 (빈 목록이면 통계값은 None)"""
    summary = {"count": len(errors), "failures": failures}
    keys = ["min_cm", "median_cm", "max_cm", "mean_cm"]
    keys += [f"p{p}_cm" for p in REPORT_PERCENTILES]
    keys += [f"within_{int(r)}cm" for r in REPORT_WITHIN_CM]
    if not errors:
        summary.update({key: None for key in keys})
        return summary

    values = np.asarray(errors, dtype=float)
    summary["min_cm"] = float(values.min())
    summary["median_cm"] = float(np.median(values))
    summary["max_cm"] = float(values.max())
    summary["mean_cm"] = math.fsum(errors) / len(errors)
    for p in REPORT_PERCENTILES:
        summary[f"p{p}_cm"] = float(np.percentile(values, p))
    for radius in REPORT_WITHIN_CM:
        summary[f"within_{int(radius)}cm"] = float(np.count_nonzero(values <= radius)) / len(errors)
    return summary


def buildReport(rows: Sequence[EvaluationRow]) -> EvaluationReport:
    """행 목록 → 정렬된 보고서 (성공 행은 오차, 타임스탬프 순으로 안정 정렬)"""
    okRows = sorted((r for r in rows if r.ok), key=lambda r: (r.error_cm, r.timestamp))
    failed = sorted((r for r in rows if not r.ok), key=lambda r: r.timestamp)
    return EvaluationReport(
        rows=okRows,
        failures=failed,
        summary=summarize([r.error_cm for r in okRows], len(failed)),
    )


def reportFromPairs(pairs: Sequence[tuple[Point2D, Point2D]]) -> EvaluationReport:
    """(추정, 실제) 좌표 쌍을 그대로 평가 (타임스탬프는 입력 순서 × 1)"""
    rows = [
        EvaluationRow(float(idx), estimated, actual, positionError(estimated, actual))
        for idx, (estimated, actual) in enumerate(pairs)
    ]
    return buildReport(rows)


def locateScans(
    scans: Sequence[ScanRecord],
    db: CalibrationDatabase,
    anchors: AnchorMap,
    config: EstimatorConfig = EstimatorConfig(),
    workers: Optional[int] = None,
    showProgress: bool = SHOW_PROGRESS,
    desc: str = "[추정]",
) -> list:
    """스캔마다 locate 실행 → 입력 순서대로 PositionEstimate 또는 예외 객체

    추정 실패(EstimationError / InvalidInputError)는 예외 객체로 돌려주고 중단하지 않는다.
    workers가 None이면 RSSILOC_EVAL_WORKERS 값을 쓴다.
    """
    def _run(scan: ScanRecord):
        try:
            return locate(scan, db, anchors, config)
        except (EstimationError, InvalidInputError) as e:
            return e

    workers = evalWorkers() if workers is None else max(1, workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(tqdm(executor.map(_run, scans), total=len(scans), desc=desc,
                         disable=not showProgress, leave=False))


def evaluateTrace(
    trace: Sequence[ScanRecord],
    groundTruth: Sequence[tuple[float, Point2D]],
    db: CalibrationDatabase,
    anchors: AnchorMap,
    config: EstimatorConfig = EstimatorConfig(),
    workers: Optional[int] = None,
    showProgress: bool = SHOW_PROGRESS,
) -> EvaluationReport:
    """트레이스 전체 평가

    스캔과 정답 위치는 타임스탬프가 정확히 같아야 매칭된다.

    Raises:
        MissingGroundTruth: 정답 위치가 없는 스캔
    """
    truth = {timestamp: position for timestamp, position in groundTruth}
    for scan in trace:
        if scan.timestamp not in truth:
            raise MissingGroundTruth(scan.timestamp)

    outcomes = locateScans(trace, db, anchors, config, workers, showProgress, desc="[평가]")
    rows = []
    for scan, outcome in zip(trace, outcomes):
        actual = truth[scan.timestamp]
        if isinstance(outcome, PositionEstimate):
            rows.append(EvaluationRow(scan.timestamp, outcome.position, actual,
                                      positionError(outcome.position, actual)))
        else:
            rows.append(EvaluationRow(scan.timestamp, None, actual, None, type(outcome).__name__))
    return buildReport(rows)


# === 보고서 파일 ===

def _summaryValue(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def formatReport(report: EvaluationReport, meta: Optional[dict] = None) -> str:
    """보고서 텍스트: 버전 헤더, 컬럼 헤더, 행, '# summary' 블록"""
    lines = [formatHeader(FORMAT_REPORT, meta), ",".join(REPORT_COLUMNS)]
    for row in report.allRows():
        if row.ok:
            lines.append(",".join([
                repr(row.timestamp), repr(row.estimated.x), repr(row.estimated.y),
                repr(row.actual.x), repr(row.actual.y), f"{row.error_cm:.2f}", row.status,
            ]))
        else:
            lines.append(",".join([
                repr(row.timestamp), "", "", repr(row.actual.x), repr(row.actual.y), "", row.status,
            ]))
    lines.append("# summary")
    for key, value in report.summary.items():
        lines.append(f"# {key}={_summaryValue(value)}")
    return "\n".join(lines) + "\n"


def writeReport(report: EvaluationReport, destination, meta: Optional[dict] = None):
    writeTextAtomic(destination, formatReport(report, meta))


def parseReport(text: str, source: str = "<report>") -> EvaluationReport:
    """보고서 파일 다시 읽기 (대시보드용, error_cm는 파일의 2자리 값)"""
    lines = text.splitlines()
    if not lines:
        raise MalformedInputError("empty report file", source=source, line=1)
    parseHeader(lines[0], FORMAT_REPORT, MalformedInputError, source)
    if len(lines) < 2 or lines[1] != ",".join(REPORT_COLUMNS):
        raise MalformedInputError(f"expected column header {','.join(REPORT_COLUMNS)}", source=source, line=2)

    rows = []
    summary = {}
    for lineNo, line in enumerate(lines[2:], start=3):
        if line.startswith("# "):
            key, sep, value = line[2:].partition("=")
            if sep:
                try:
                    summary[key] = None if value == "none" else (int(value) if value.isdigit() else float(value))
                except ValueError as e:
                    raise MalformedInputError(f"bad summary value {value!r}", source=source, line=lineNo,
                                              field=key) from e
            continue
        fields = line.split(",")
        if len(fields) != len(REPORT_COLUMNS):
            raise MalformedInputError(f"expected {len(REPORT_COLUMNS)} fields", source=source, line=lineNo)
        try:
            timestamp = float(fields[0])
            actual = Point2D(float(fields[3]), float(fields[4]))
            if fields[6] == STATUS_OK:
                estimated = Point2D(float(fields[1]), float(fields[2]))
                rows.append(EvaluationRow(timestamp, estimated, actual, float(fields[5])))
            else:
                rows.append(EvaluationRow(timestamp, None, actual, None, fields[6]))
        except (ValueError, InvalidInputError) as e:
            raise MalformedInputError(f"bad row: {e}", source=source, line=lineNo) from e

    return EvaluationReport(
        rows=[r for r in rows if r.ok],
        failures=[r for r in rows if not r.ok],
        summary=summary,
    )


def loadReport(path) -> EvaluationReport:
    return parseReport(readText(path), source=str(path))
