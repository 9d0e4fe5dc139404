#!/usr/bin/env python3
"""
CLI 테스트 (종료 코드, 오류 한 줄 형식, simulate → calibrate → evaluate 파이프라인)

실행:
    python tests/test_cli.py
"""

import contextlib
import io
import os
import sys
from pathlib import Path

projectPath = Path(__file__).parent.parent
sys.path.insert(0, str(projectPath))

from locator.calibration import loadDatabase
from monitor.evaluator import loadReport
from pipeline.trace_io import loadTrace
from rssi_locate import ERROR_PREFIX, run
from tests.acceptance import runCliPipeline


def _run(argv) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


def _errorLine(stderr: str) -> str:
    return next(line for line in stderr.splitlines() if line.startswith(ERROR_PREFIX + ":"))


# === 종료 코드 ===

def test_help_exits_zero():
    code, out, _ = _run(["--help"])
    assert code == 0
    assert "calibrate" in out


def test_unknown_subcommand_is_usage_error():
    code, _, err = _run(["triangulate"])
    assert code == 1
    assert err.splitlines()[0].startswith(f"{ERROR_PREFIX}: usage: UsageError: ")


def test_missing_required_flag_is_usage_error():
    code, _, err = _run(["locate", "--anchors", "a.csv"])
    assert code == 1
    assert _errorLine(err).startswith(f"{ERROR_PREFIX}: usage:")


def test_missing_database_is_io_failure(tmp_path):
    code, _, err = _run(["locate", "--database", tmp_path / "nope.json", "--anchors", tmp_path / "a.csv",
                         "--trace", tmp_path / "t.csv", "--output", tmp_path / "est.csv"])
    assert code == 4
    assert err.splitlines()[0].startswith(f"{ERROR_PREFIX}: io_failure: IoFailure: ")
    assert not (tmp_path / "est.csv").exists()


def test_malformed_input_exit_code(tmp_path):
    anchors = tmp_path / "anchors.csv"
    anchors.write_text("# rssiloc-anchors v1\nanchor_id,x_cm,y_cm\nA,1,2\nA,3,4\n", encoding="utf-8")
    code, _, err = _run(["render-map", "--anchors", anchors, "--trace", tmp_path / "t.csv",
                         "--output", tmp_path / "map.svg"])
    assert code == 2
    assert err.splitlines()[0].startswith(f"{ERROR_PREFIX}: malformed_input: MalformedAnchors: ")


def test_invalid_utf8_is_malformed_input(tmp_path):
    anchors = tmp_path / "anchors.csv"
    anchors.write_bytes(b"# rssiloc-anchors v1\nanchor_id,x_cm,y_cm\n\xff\xfeA,1,2\n")
    code, _, err = _run(["render-map", "--anchors", anchors, "--trace", tmp_path / "t.csv",
                         "--output", tmp_path / "map.svg"])
    assert code == 2
    line = err.splitlines()[0]
    assert line.startswith(f"{ERROR_PREFIX}: malformed_input: MalformedAnchors: ")
    assert f"{anchors}:3:" in line


def test_estimation_failure_exit_code(tmp_path):
    files = runCliPipeline(tmp_path / "ok", sigma=0.0, dropout=0.0, selection="range_residual")
    lonely = tmp_path / "lonely.csv"
    lonely.write_text("# rssiloc-trace v1\ntimestamp_s,anchor_id,rssi_dbm\n0.0,AP01,-50.0\n", encoding="utf-8")
    code, _, err = _run(["calibrate", "--anchors", files["anchors"], "--trace", lonely,
                         "--positions", files["calib_truth"], "--output", tmp_path / "db.json", "--strict"])
    assert code == 3
    assert _errorLine(err).startswith(f"{ERROR_PREFIX}: estimation_failure: InsufficientAnchors: ")
    assert not (tmp_path / "db.json").exists()


# === 파이프라인 ===

def test_zero_noise_pipeline_is_exact(tmp_path):
    # 잡음 0에서의 정확 복원은 range_residual 선택에서만 성립 (nearest_anchors는 거울상 교점을 고를 수 있음)
    files = runCliPipeline(tmp_path, sigma=0.0, dropout=0.0, selection="range_residual")
    db = loadDatabase(files["database"])
    assert abs(db.alpha_hat - 2.4) <= 1e-9

    report = loadReport(files["report"])
    assert report.summary["count"] == 5
    assert report.summary["failures"] == 0
    assert report.summary["max_cm"] <= 1e-4


def test_evaluate_dashboard(tmp_path):
    files = runCliPipeline(tmp_path, sigma=0.0, dropout=0.0, selection="range_residual")
    code, out, _ = _run(["evaluate", "--database", files["database"], "--anchors", files["anchors"],
                         "--trace", files["trace"], "--ground-truth", files["truth"],
                         "--output", tmp_path / "again.csv", "--selection", "range_residual", "--dashboard"])
    assert code == 0
    assert "요약 통계" in out
    assert "총 스캔 수: 5개" in out
    assert (tmp_path / "again.csv").read_bytes() == files["report"].read_bytes()


def test_bad_worker_setting_is_usage_error(tmp_path):
    files = runCliPipeline(tmp_path, sigma=0.0, dropout=0.0, selection="range_residual")
    previous = os.environ.get("RSSILOC_EVAL_WORKERS")
    os.environ["RSSILOC_EVAL_WORKERS"] = "many"
    try:
        code, _, err = _run(["locate", "--database", files["database"], "--anchors", files["anchors"],
                             "--trace", files["trace"], "--output", tmp_path / "est.csv"])
    finally:
        if previous is None:
            del os.environ["RSSILOC_EVAL_WORKERS"]
        else:
            os.environ["RSSILOC_EVAL_WORKERS"] = previous
    assert code == 1
    assert _errorLine(err).startswith(f"{ERROR_PREFIX}: usage: UsageError: RSSILOC_EVAL_WORKERS")
    assert not (tmp_path / "est.csv").exists()


def test_locate_writes_estimates(tmp_path):
    files = runCliPipeline(tmp_path, sigma=0.0, dropout=0.0, selection="range_residual")
    output = tmp_path / "estimates.csv"
    code, _, _ = _run(["locate", "--database", files["database"], "--anchors", files["anchors"],
                       "--trace", files["trace"], "--output", output, "--n", "3"])
    assert code == 0
    lines = output.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# rssiloc-estimates v1 n=3 min_pairs=1 selection=nearest_anchors")
    assert len(lines) == 2 + len(loadTrace(files["trace"]))
    assert all(line.endswith(",3,0,ok") for line in lines[2:])


def test_simulate_header_echoes_channel(tmp_path):
    files = runCliPipeline(tmp_path, sigma=0.0, dropout=0.0, selection="range_residual")
    header = files["trace"].read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("# rssiloc-trace v1 alpha_true=2.4 ref_power_dbm=-40.0 ref_distance_cm=100.0 "
                             "shadow_sigma_db=0.0 dropout_prob=0.0 rssi_floor_dbm=-95.0 seed=22")
    assert header.endswith("scans_per_waypoint=1 scan_interval_s=60.0")


def test_pipeline_is_byte_identical(tmp_path):
    first = runCliPipeline(tmp_path / "first", sigma=3.0, dropout=0.05, selection="nearest_anchors")
    second = runCliPipeline(tmp_path / "second", sigma=3.0, dropout=0.05, selection="nearest_anchors")
    for key in first:
        assert first[key].read_bytes() == second[key].read_bytes(), key


def test_render_map(tmp_path):
    files = runCliPipeline(tmp_path, sigma=0.0, dropout=0.0, selection="range_residual")
    output = tmp_path / "map.svg"
    code, out, _ = _run(["render-map", "--anchors", files["anchors"], "--trace", files["trace"],
                         "--ground-truth", files["truth"], "--output", output])
    assert code == 0
    assert output.exists()
    assert (tmp_path / "map.csv").exists()
    assert "[버블맵]" in out


if __name__ == "__main__":
    from tests.runner import runModule
    sys.exit(runModule(globals()))
