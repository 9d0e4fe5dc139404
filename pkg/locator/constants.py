"""위치 추정 상수/설정 모듈

기하 허용오차, 보정/추정 기본값, 시뮬레이터 기본 채널, 파일 포맷 태그 등
모든 상수를 정의. 출력 파일 내용에 영향을 주지 않는 실행 옵션만 환경변수로 받는다.
"""
import os
from typing import Optional

from dotenv import load_dotenv

from locator.errors import UsageError

load_dotenv()

# 기하 허용오차 (단위: cm)
COINCIDENT_EPS = 1e-9      # 두 원 중심 일치 판정 ε_d
TANGENT_EPS_SQ = 1e-12     # 접점 판정 밴드 ε_h² (cm², max(1, r²) 배로 적용)
TIE_EPS = 1e-9             # 후보점 거리합 동률 판정 ε_tie

# 경로손실
LOG_RATIO_EPS = 1e-9       # 거리 동일 판정 (|log10(r_j/r_i)|)
SUGGESTED_ALPHA_BOUNDS = (1.0, 6.0)  # 타당성 필터 권장 범위 (기본 비활성)

# 보정/추정 기본값
DEFAULT_M = 4              # 보정 시 사용하는 상위 앵커 수
DEFAULT_N = 4              # 추정 시 사용하는 상위 앵커 수
DEFAULT_MIN_PAIRS = 1

# 후보점 선택 정책
SELECTION_NEAREST_ANCHORS = "nearest_anchors"   # 나머지 앵커 좌표까지 거리합 최소
SELECTION_RANGE_RESIDUAL = "range_residual"     # 나머지 앵커 추정거리 잔차합 최소
SELECTION_POLICIES = (SELECTION_NEAREST_ANCHORS, SELECTION_RANGE_RESIDUAL)
DEFAULT_SELECTION = SELECTION_NEAREST_ANCHORS
TIE_BREAK_POLICY = "min_y_then_min_x"

# 시뮬레이터 기본 채널 (실측값 아님, 실내 환경 가정치)
DEFAULT_REF_POWER_DBM = -40.0
DEFAULT_REF_DISTANCE_CM = 100.0
DEFAULT_ALPHA_TRUE = 2.4
DEFAULT_SHADOW_SIGMA_DB = 3.0
DEFAULT_DROPOUT_PROB = 0.05
DEFAULT_RSSI_FLOOR_DBM = -95.0
DEFAULT_SEED = 1
SCAN_INTERVAL_S = 60.0     # 스캔 스크립트 1분 주기
DEFAULT_SCANS_PER_WAYPOINT = 1

# 파일 포맷 태그 (첫 줄 버전 헤더)
FORMAT_ANCHORS = "rssiloc-anchors v1"
FORMAT_TRACE = "rssiloc-trace v1"
FORMAT_GROUND_TRUTH = "rssiloc-groundtruth v1"
FORMAT_DATABASE = "rssiloc-calibration/1"
FORMAT_TESTBED = "rssiloc-testbed/1"
FORMAT_ESTIMATES = "rssiloc-estimates v1"
FORMAT_REPORT = "rssiloc-evaluation v1"
FORMAT_BUBBLES = "rssiloc-bubbles v1"

# 버블맵 렌더링
BUBBLE_MIN_RADIUS = 6.0    # px, 가장 약한 평균 RSSI
BUBBLE_MAX_RADIUS = 30.0   # px, 가장 강한 평균 RSSI
BUBBLE_CANVAS_WIDTH = 960.0
BUBBLE_MARGIN = 60.0
BUBBLE_COLOR_WEAK = (49, 54, 149)     # 파랑
BUBBLE_COLOR_STRONG = (215, 48, 39)   # 빨강
ROBOT_MARKER_COLOR = "#1a9850"

# 평가 요약 (오차 CDF 지점)
REPORT_PERCENTILES = (50, 80, 95)
REPORT_WITHIN_CM = (100.0, 200.0, 500.0)

# 실행 옵션 (출력 바이트와 무관)
SHOW_PROGRESS = os.getenv("RSSILOC_PROGRESS", "true").lower() == "true"


def evalWorkers(raw: Optional[str] = None) -> int:
    """추정 스레드 수 (RSSILOC_EVAL_WORKERS, 기본 4)

    Raises:
        UsageError: 양의 정수가 아닌 값
    """
    if raw is None:
        raw = os.getenv("RSSILOC_EVAL_WORKERS", "4")
    try:
        workers = int(raw)
    except ValueError:
        workers = 0
    if workers < 1:
        raise UsageError(f"RSSILOC_EVAL_WORKERS must be a positive integer, got {raw!r}")
    return workers
