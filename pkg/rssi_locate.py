#!/usr/bin/env python3
"""
RSSI 위치 추정 CLI

서브커맨드:
    calibrate       앵커 + 트레이스 + 알려진 위치 → 보정 데이터베이스
    locate          데이터베이스 + 앵커 + 트레이스 → 추정 위치 파일
    simulate        테스트베드 설정 → 트레이스 + 정답 위치
    evaluate        데이터베이스 + 앵커 + 트레이스 + 정답 위치 → 평가 보고서
    render-map      앵커 + 트레이스 → 버블맵 SVG + 표
    convert-iwlist  iwlist 스캔 출력 → 트레이스

종료 코드: 0 성공, 1 사용법 오류, 2 입력 오류, 3 추정 실패, 4 입출력 오류
실패 시 stderr 첫 줄: rssiloc-error: <category>: <ErrorClass>: <message>

## 터미널 실행 커멘드
 -  python3 rssi_locate.py simulate --config testbed.yaml --trace trace.csv --ground-truth truth.csv
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from locator.calibration import calibrateAt, loadDatabase, mergeCalibrations, saveDatabase
from locator.constants import (
    DEFAULT_M,
    DEFAULT_MIN_PAIRS,
    DEFAULT_N,
    DEFAULT_SELECTION,
    SCAN_INTERVAL_S,
    SELECTION_POLICIES,
    SHOW_PROGRESS,
    SUGGESTED_ALPHA_BOUNDS,
)
from locator.errors import EmptyDatabase, EstimationError, InvalidInputError, LocatorError, MissingGroundTruth, UsageError
from locator.estimator import EstimatorConfig
from monitor.bubble_map import emitBubbleMap, tablePathFor
from monitor.dashboard import Dashboard
from monitor.evaluator import evaluateTrace, locateScans, writeReport
from pipeline.iwlist_converter import convertIwlistFiles
from pipeline.trace_io import (
    loadAnchors,
    loadGroundTruth,
    loadTrace,
    saveAnchors,
    saveEstimates,
    saveGroundTruth,
    saveTrace,
)
from testbed.config import SimulationOverrides, loadTestbedConfig
from testbed.simulator import runTrajectory

ERROR_PREFIX = "rssiloc-error"


class CliArgumentParser(argparse.ArgumentParser):
    """argparse 오류를 UsageError로 바꾸는 파서 (종료 코드 1)"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# === 공통 옵션 ===

def _addEstimatorOptions(parser: argparse.ArgumentParser):
    parser.add_argument("--n", type=int, default=DEFAULT_N, help=f"사용할 상위 앵커 수 (기본값: {DEFAULT_N})")
    parser.add_argument("--min-pairs", type=int, default=DEFAULT_MIN_PAIRS,
                        help=f"최소 유효 앵커 쌍 수 (기본값: {DEFAULT_MIN_PAIRS})")
    parser.add_argument("--selection", choices=SELECTION_POLICIES, default=DEFAULT_SELECTION,
                        help=f"교점 후보 선택 정책 (기본값: {DEFAULT_SELECTION})")


def _estimatorConfig(args) -> EstimatorConfig:
    try:
        return EstimatorConfig(n=args.n, min_pairs=args.min_pairs, selection=args.selection)
    except InvalidInputError as e:
        raise UsageError(str(e)) from e


def _estimatorMeta(config: EstimatorConfig, db) -> dict:
    return {
        "n": str(config.n),
        "min_pairs": str(config.min_pairs),
        "selection": config.selection,
        "tie_break": config.tie_break,
        "m": str(db.m),
        "alpha_hat": repr(db.alpha_hat),
    }


def _requireEntries(db):
    if not db.entries:
        raise EmptyDatabase("calibration database has no reference entries")


# === 서브커맨드 ===

def cmdCalibrate(args) -> int:
    anchors = loadAnchors(args.anchors)
    trace = loadTrace(args.trace)
    known = dict(loadGroundTruth(args.positions))

    bounds = None
    if args.alpha_filter:
        bounds = (args.alpha_min, args.alpha_max)
        if not bounds[0] < bounds[1]:
            raise UsageError(f"--alpha-min must be below --alpha-max, got {bounds}")

    batches = []
    skippedScans = 0
    for scan in trace:
        if scan.timestamp not in known:
            raise MissingGroundTruth(scan.timestamp)
        try:
            batch = calibrateAt(known[scan.timestamp], scan, anchors, args.m)
        except EstimationError as e:
            if args.strict:
                raise
            skippedScans += 1
            print(f"[경고] t={scan.timestamp!r}s 스캔 건너뜀: {type(e).__name__}: {e}")
            continue
        batches.append(batch)
        if batch.skipped_pairs:
            print(f"[보정] t={scan.timestamp!r}s 거리 동일 쌍 {batch.skipped_pairs}개 제외")

    db = mergeCalibrations(batches, bounds)
    saveDatabase(db, args.output)

    print(f"[보정] {len(batches)}개 지점, 기준 항목 {len(db.entries)}개, α 샘플 {len(db.alpha_samples)}개")
    print(f"[보정] α̂ = {db.alpha_hat:.6f}")
    if db.discarded_alphas:
        print(f"[보정] 범위 밖 α 샘플 {db.discarded_alphas}개 제외")
    if skippedScans:
        print(f"[경고] 보정에 쓰지 못한 스캔 {skippedScans}개")
    print(f"[저장] {args.output}")
    return 0


def cmdLocate(args) -> int:
    config = _estimatorConfig(args)
    db = loadDatabase(args.database)
    _requireEntries(db)
    anchors = loadAnchors(args.anchors)
    trace = loadTrace(args.trace)

    outcomes = locateScans(trace, db, anchors, config, showProgress=SHOW_PROGRESS)
    results = [(scan.timestamp, outcome) for scan, outcome in zip(trace, outcomes)]
    saveEstimates(results, args.output, _estimatorMeta(config, db))

    failed = sum(1 for _, outcome in results if isinstance(outcome, Exception))
    print(f"[추정] {len(results)}개 스캔, 실패 {failed}건")
    print(f"[저장] {args.output}")
    return 0


def cmdSimulate(args) -> int:
    setup = loadTestbedConfig(args.config)
    overrides = SimulationOverrides(
        seed=args.seed,
        alpha_true=args.alpha_true,
        shadow_sigma_db=args.sigma,
        dropout_prob=args.dropout,
        scans_per_waypoint=args.scans_per_waypoint,
    )
    try:
        channel, trajectory = overrides.apply(setup.channel, setup.trajectory)
    except InvalidInputError as e:
        raise UsageError(str(e)) from e

    trace = runTrajectory(trajectory, setup.testbed, channel, showProgress=SHOW_PROGRESS)
    meta = dict(channel.describe())
    meta["scans_per_waypoint"] = str(trajectory.scans_per_waypoint)
    meta["scan_interval_s"] = repr(SCAN_INTERVAL_S)

    saveTrace(trace.scans(), args.trace, meta)
    saveGroundTruth(trace.groundTruth(), args.ground_truth, meta)
    if args.anchors_out:
        saveAnchors(setup.testbed.anchors, args.anchors_out)

    print(f"[저장] {args.trace}, {args.ground_truth}")
    return 0


def cmdEvaluate(args) -> int:
    config = _estimatorConfig(args)
    db = loadDatabase(args.database)
    _requireEntries(db)
    anchors = loadAnchors(args.anchors)
    trace = loadTrace(args.trace)
    truth = loadGroundTruth(args.ground_truth)

    report = evaluateTrace(trace, truth, db, anchors, config, showProgress=SHOW_PROGRESS)
    writeReport(report, args.output, _estimatorMeta(config, db))

    if args.dashboard:
        Dashboard().show(report)
    else:
        summary = report.summary
        if summary["median_cm"] is not None:
            print(f"[평가] {summary['count']}개 성공, 실패 {summary['failures']}건, "
                  f"중앙값 오차 {summary['median_cm']:.2f} cm")
        else:
            print(f"[평가] 성공한 추정 없음, 실패 {summary['failures']}건")
    print(f"[저장] {args.output}")
    return 0


def cmdRenderMap(args) -> int:
    anchors = loadAnchors(args.anchors)
    trace = loadTrace(args.trace)
    truth = loadGroundTruth(args.ground_truth) if args.ground_truth else None
    data = emitBubbleMap(trace, anchors, args.output, truth)
    print(f"[버블맵] 앵커 {len(data)}개 → {args.output}, {tablePathFor(args.output)}")
    return 0


def cmdConvertIwlist(args) -> int:
    if not args.interval > 0:
        raise UsageError(f"--interval must be positive, got {args.interval!r}")
    records, stats = convertIwlistFiles(args.scans, interval=args.interval)
    saveTrace(records, args.output, {"source": "iwlist", "interval_s": repr(args.interval)})
    print(f"[변환] {stats.scans}개 스캔, {stats.cells}개 셀 → {args.output}")
    if stats.skipped_cells:
        print(f"[경고] ESSID/신호값 없는 셀 {stats.skipped_cells}개 건너뜀")
    return 0


def buildParser() -> CliArgumentParser:
    parser = CliArgumentParser(prog="rssi_locate", description="RSSI 멀티레터레이션 위치 추정")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = subparsers.add_parser("calibrate", help="보정 데이터베이스 생성")
    p.add_argument("--anchors", required=True, help="앵커 파일")
    p.add_argument("--trace", required=True, help="보정 지점 스캔 트레이스")
    p.add_argument("--positions", required=True, help="보정 지점 좌표 (ground-truth 포맷)")
    p.add_argument("--output", required=True, help="데이터베이스 출력 경로")
    p.add_argument("--m", type=int, default=DEFAULT_M, help=f"보정에 쓰는 상위 앵커 수 (기본값: {DEFAULT_M})")
    p.add_argument("--alpha-filter", action="store_true", help="범위 밖 α 샘플 제외")
    p.add_argument("--alpha-min", type=float, default=SUGGESTED_ALPHA_BOUNDS[0])
    p.add_argument("--alpha-max", type=float, default=SUGGESTED_ALPHA_BOUNDS[1])
    p.add_argument("--strict", action="store_true", help="보정 실패 스캔이 있으면 중단")
    p.set_defaults(handler=cmdCalibrate)

    p = subparsers.add_parser("locate", help="스캔별 위치 추정")
    p.add_argument("--database", required=True)
    p.add_argument("--anchors", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--output", required=True, help="추정 결과 파일")
    _addEstimatorOptions(p)
    p.set_defaults(handler=cmdLocate)

    p = subparsers.add_parser("simulate", help="테스트베드 시뮬레이션")
    p.add_argument("--config", required=True, help="테스트베드 YAML 설정")
    p.add_argument("--trace", required=True, help="트레이스 출력 경로")
    p.add_argument("--ground-truth", required=True, help="정답 위치 출력 경로")
    p.add_argument("--anchors-out", help="앵커 파일 출력 경로 (선택)")
    p.add_argument("--seed", type=int, help="채널 시드 덮어쓰기")
    p.add_argument("--alpha-true", type=float, help="경로손실 지수 덮어쓰기")
    p.add_argument("--sigma", type=float, help="섀도잉 표준편차(dB) 덮어쓰기")
    p.add_argument("--dropout", type=float, help="드롭아웃 확률 덮어쓰기")
    p.add_argument("--scans-per-waypoint", type=int, help="웨이포인트당 스캔 수 덮어쓰기")
    p.set_defaults(handler=cmdSimulate)

    p = subparsers.add_parser("evaluate", help="정답 위치 대비 오차 평가")
    p.add_argument("--database", required=True)
    p.add_argument("--anchors", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--ground-truth", required=True)
    p.add_argument("--output", required=True, help="평가 보고서 출력 경로")
    p.add_argument("--dashboard", action="store_true", help="대시보드 출력")
    _addEstimatorOptions(p)
    p.set_defaults(handler=cmdEvaluate)

    p = subparsers.add_parser("render-map", help="평균 RSSI 버블맵")
    p.add_argument("--anchors", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--output", required=True, help="SVG 출력 경로 (표는 같은 이름 .csv)")
    p.add_argument("--ground-truth", help="로봇 위치 마커용 정답 위치 (선택)")
    p.set_defaults(handler=cmdRenderMap)

    p = subparsers.add_parser("convert-iwlist", help="iwlist 스캔 출력 → 트레이스")
    p.add_argument("scans", nargs="+", help="스캔 출력 파일 (스캔 순서대로)")
    p.add_argument("--output", required=True)
    p.add_argument("--interval", type=float, default=SCAN_INTERVAL_S,
                   help=f"스캔 간격 초 (기본값: {SCAN_INTERVAL_S:.0f})")
    p.set_defaults(handler=cmdConvertIwlist)

    return parser


def reportError(error: LocatorError):
    """stderr 첫 줄은 기계 판독용 한 줄, 이후는 사람용 안내"""
    message = " ".join(str(error).split())
    print(f"{ERROR_PREFIX}: {error.category}: {type(error).__name__}: {message}", file=sys.stderr)
    if isinstance(error, UsageError):
        print("  자세한 사용법: rssi_locate.py --help", file=sys.stderr)


def run(argv=None) -> int:
    """CLI 실행 → 종료 코드"""
    parser = buildParser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as e:
        # --help
        return e.code if isinstance(e.code, int) else 0
    except LocatorError as e:
        reportError(e)
        return e.exitCode


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
