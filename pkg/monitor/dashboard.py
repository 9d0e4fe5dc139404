"""
CLI 대시보드
- 평가 보고서 요약 통계 출력
- 오차 분포 (구간별 개수)
- 오차가 큰 행 / 실패 행 확인
"""

import argparse
import sys
from pathlib import Path

# 상위 경로 추가
sys.path.insert(0, str(Path(__file__).parent.parent))

from locator.constants import REPORT_PERCENTILES, REPORT_WITHIN_CM
from locator.errors import LocatorError
from monitor.evaluator import EvaluationReport, loadReport

# 오차 분포 구간 (cm)
ERROR_BUCKETS = (50.0, 100.0, 200.0, 500.0, 1000.0)


class Dashboard:
    """평가 결과 대시보드"""

    def printHeader(self, title: str):
        """헤더 출력"""
        print("\n" + "=" * 60)
        print(f" {title}")
        print("=" * 60)

    def printSummary(self, summary: dict):
        """요약 통계 출력"""
        self.printHeader("요약 통계")

        total = summary.get("count", 0) + summary.get("failures", 0)
        print(f"  총 스캔 수: {total:,}개")
        print(f"  추정 성공: {summary.get('count', 0):,}개")
        print(f"  추정 실패: {summary.get('failures', 0)}건")
        if summary.get("min_cm") is None:
            print("  오차 통계 없음 (성공한 추정이 없습니다)")
            return

        print(f"  최소 오차: {summary['min_cm']:.2f} cm")
        print(f"  중앙값:   {summary['median_cm']:.2f} cm")
        print(f"  평균 오차: {summary['mean_cm']:.2f} cm")
        print(f"  최대 오차: {summary['max_cm']:.2f} cm")
        for p in REPORT_PERCENTILES:
            print(f"  {p}번째 백분위: {summary[f'p{p}_cm']:.2f} cm")
        for radius in REPORT_WITHIN_CM:
            print(f"  {radius:.0f} cm 이내: {summary[f'within_{int(radius)}cm'] * 100:.1f}%")

    def printDistribution(self, report: EvaluationReport):
        """오차 구간별 개수 출력"""
        self.printHeader("오차 분포")

        if not report.rows:
            print("  데이터가 없습니다.")
            return

        print(f"  {'구간 (cm)':<16} {'개수':<8} {'비율':<8}")
        print("  " + "-" * 34)

        lower = 0.0
        for upper in ERROR_BUCKETS + (float("inf"),):
            count = sum(1 for r in report.rows if lower <= r.error_cm < upper)
            label = f"{lower:.0f}-{upper:.0f}" if upper != float("inf") else f"{lower:.0f}+"
            rate = count / len(report.rows) * 100
            print(f"  {label:<16} {count:<8} {rate:.1f}%")
            lower = upper

    def printWorstRows(self, report: EvaluationReport, limit: int = 10):
        """오차가 큰 행 출력"""
        self.printHeader(f"오차 상위 {limit}개")

        if not report.rows:
            print("  데이터가 없습니다.")
            return

        print(f"  {'시각(s)':<10} {'추정 (x, y)':<24} {'실제 (x, y)':<24} {'오차':<8}")
        print("  " + "-" * 68)

        for row in reversed(report.rows[-limit:]):
            est = f"({row.estimated.x:.1f}, {row.estimated.y:.1f})"
            act = f"({row.actual.x:.1f}, {row.actual.y:.1f})"
            print(f"  {row.timestamp:<10.0f} {est:<24} {act:<24} {row.error_cm:.2f}")

    def printFailures(self, report: EvaluationReport, limit: int = 10):
        """실패 행 출력"""
        self.printHeader(f"추정 실패 (최대 {limit}개)")

        if not report.failures:
            print("  실패 케이스가 없습니다.")
            return

        for i, row in enumerate(report.failures[:limit], 1):
            print(f"  [{i}] t={row.timestamp:.0f}s  실제 ({row.actual.x:.1f}, {row.actual.y:.1f})  사유: {row.status}")

    def show(self, report: EvaluationReport, title: str = "위치 추정 평가 대시보드",
             showWorst: bool = True, showFailed: bool = True, limit: int = 10):
        """대시보드 표시"""
        print("\n" + "=" * 60)
        print(f" {title}")
        print("=" * 60)

        self.printSummary(report.summary)
        self.printDistribution(report)
        if showWorst:
            self.printWorstRows(report, limit)
        if showFailed:
            self.printFailures(report, limit)

        print("\n" + "=" * 60)


def main():
    """CLI 진입점"""
    parser = argparse.ArgumentParser(description="위치 추정 평가 보고서 대시보드")
    parser.add_argument("report", help="evaluate 명령이 만든 보고서 파일")
    parser.add_argument(
        "--limit", "-n",
        type=int,
        default=10,
        help="표시할 행 수 (기본값: 10)"
    )
    parser.add_argument(
        "--summary",
        action="store_true",
        help="요약만 표시"
    )

    args = parser.parse_args()

    try:
        report = loadReport(args.report)
    except LocatorError as e:
        print(f"[오류] {e}")
        sys.exit(e.exitCode)

    dashboard = Dashboard()
    dashboard.show(
        report,
        title=f"위치 추정 평가 대시보드: {Path(args.report).name}",
        showWorst=not args.summary,
        showFailed=not args.summary,
        limit=args.limit,
    )


if __name__ == "__main__":
    main()
