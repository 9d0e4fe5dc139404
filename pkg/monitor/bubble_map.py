"""RSSI 버블맵 생성

트레이스 전체에서 앵커별 평균 RSSI를 구해 앵커 좌표에 원으로 그린다.
- 반지름: 관측된 최소~최대 평균을 [BUBBLE_MIN_RADIUS, BUBBLE_MAX_RADIUS]로 선형 매핑
  (모든 평균이 같으면 중간 반지름)
- 색상: 약함(파랑) → 강함(빨강) 2색 보간 + 범례
- 트레이스에 한 번도 안 나온 앵커는 회색 사각형
- 정답 위치가 주어지면 로봇 평균 위치를 초록 마커로 표시
함께 BubbleDatum 표(CSV)를 평균 RSSI 내림차순으로 저장한다.
"""

import csv
import html
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from locator.calibration import AnchorMap
from locator.constants import (
    BUBBLE_CANVAS_WIDTH,
    BUBBLE_COLOR_STRONG,
    BUBBLE_COLOR_WEAK,
    BUBBLE_MARGIN,
    BUBBLE_MAX_RADIUS,
    BUBBLE_MIN_RADIUS,
    FORMAT_BUBBLES,
    ROBOT_MARKER_COLOR,
)
from locator.errors import EmptyTrace, UnknownAnchorInTrace
from locator.geometry import Point2D, centroid
from pipeline.records import ScanRecord
from pipeline.storage import writeTextAtomic
from pipeline.trace_io import formatHeader

BUBBLE_COLUMNS = ["anchor_id", "x_cm", "y_cm", "mean_rssi_dbm", "samples"]
UNOBSERVED_COLOR = "#9e9e9e"
LEGEND_HEIGHT = 40.0


@dataclass(frozen=True)
class BubbleDatum:
    """앵커 1개의 평균 RSSI"""
    anchor: str
    position: Point2D
    mean_rssi: float
    samples: int


def computeBubbleData(trace: Sequence[ScanRecord], anchors: AnchorMap) -> list[BubbleDatum]:
    """앵커별 평균 RSSI (평균 내림차순, 동률은 ID 순)

    Raises:
        EmptyTrace: 측정값이 하나도 없음
        UnknownAnchorInTrace: 앵커맵에 없는 앵커가 트레이스에 있음
    """
    readings: dict[str, list[float]] = {}
    for scan in trace:
        for anchorId, power in scan.readings.items():
            readings.setdefault(anchorId, []).append(power)
    if not readings:
        raise EmptyTrace("trace has no readings to map")

    for anchorId in sorted(readings):
        if anchorId not in anchors:
            raise UnknownAnchorInTrace(anchorId)

    data = [
        BubbleDatum(anchorId, anchors.position(anchorId), math.fsum(values) / len(values), len(values))
        for anchorId, values in readings.items()
    ]
    data.sort(key=lambda d: (-d.mean_rssi, d.anchor))
    return data


def _unitScale(value: float, low: float, high: float) -> float:
    """[low, high] → [0, 1] (구간이 0이면 0.5)"""
    if not high > low:
        return 0.5
    return min(1.0, max(0.0, (value - low) / (high - low)))


def bubbleRadius(meanRssi: float, low: float, high: float,
                 minRadius: float = BUBBLE_MIN_RADIUS, maxRadius: float = BUBBLE_MAX_RADIUS) -> float:
    return minRadius + _unitScale(meanRssi, low, high) * (maxRadius - minRadius)


def _hex(rgb) -> str:
    return "#" + "".join(f"{c:02x}" for c in rgb)


def bubbleColor(meanRssi: float, low: float, high: float) -> str:
    t = _unitScale(meanRssi, low, high)
    return _hex([round(w + t * (s - w)) for w, s in zip(BUBBLE_COLOR_WEAK, BUBBLE_COLOR_STRONG)])


class SvgCanvas:
    """최소 SVG 문서 빌더"""

    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.body = []
        self.defs = []

    def circle(self, cx: float, cy: float, r: float, fill: str, extra: str = ""):
        self.body.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{fill}" {extra}/>')

    def rect(self, x: float, y: float, w: float, h: float, fill: str, extra: str = ""):
        self.body.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}" {extra}/>')

    def polygon(self, points: list[tuple[float, float]], fill: str, extra: str = ""):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.body.append(f'<polygon points="{coords}" fill="{fill}" {extra}/>')

    def text(self, x: float, y: float, string: str, extra: str = ""):
        self.body.append(f'<text x="{x:.2f}" y="{y:.2f}" {extra}>{html.escape(string)}</text>')

    def title(self, string: str):
        self.body.append(f"<title>{html.escape(string)}</title>")

    def linearGradient(self, gradientId: str, startColor: str, endColor: str):
        self.defs.append(
            f'<linearGradient id="{gradientId}" x1="0" y1="0" x2="1" y2="0">'
            f'<stop offset="0" stop-color="{startColor}"/><stop offset="1" stop-color="{endColor}"/>'
            f"</linearGradient>"
        )

    def getSvg(self) -> str:
        lines = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg version="1.1" width="{self.width:.0f}" height="{self.height:.0f}" '
            f'viewBox="0 0 {self.width:.0f} {self.height:.0f}" xmlns="http://www.w3.org/2000/svg">',
        ]
        if self.defs:
            lines.append("<defs>" + "".join(self.defs) + "</defs>")
        lines.extend(self.body)
        lines.append("</svg>")
        return "\n".join(lines) + "\n"


class FloorProjection:
    """바닥 좌표(cm, y 위쪽) → 캔버스 좌표(px, y 아래쪽)"""

    def __init__(self, points: Sequence[Point2D], width: float = BUBBLE_CANVAS_WIDTH, margin: float = BUBBLE_MARGIN):
        self.minX = min(p.x for p in points)
        self.maxY = max(p.y for p in points)
        spanX = max(p.x for p in points) - self.minX
        spanY = self.maxY - min(p.y for p in points)
        self.scale = (width - 2 * margin) / max(spanX, spanY, 1.0)
        self.margin = margin
        self.width = width
        self.plotHeight = spanY * self.scale + 2 * margin

    def __call__(self, p: Point2D) -> tuple[float, float]:
        return (self.margin + (p.x - self.minX) * self.scale,
                self.margin + (self.maxY - p.y) * self.scale)


def renderBubbleSvg(data: Sequence[BubbleDatum], anchors: AnchorMap,
                    robotPosition: Optional[Point2D] = None) -> str:
    """버블맵 SVG 텍스트"""
    allPoints = [anchors.position(k) for k in anchors.ids()]
    if robotPosition is not None:
        allPoints.append(robotPosition)
    project = FloorProjection(allPoints)
    canvas = SvgCanvas(project.width, project.plotHeight + LEGEND_HEIGHT)
    canvas.rect(0, 0, canvas.width, canvas.height, "#ffffff")

    means = [d.mean_rssi for d in data]
    low, high = min(means), max(means)
    observed = {d.anchor for d in data}

    for anchorId in anchors.ids():
        if anchorId in observed:
            continue
        x, y = project(anchors.position(anchorId))
        canvas.rect(x - 4, y - 4, 8, 8, UNOBSERVED_COLOR, f'class="unobserved" data-anchor="{html.escape(anchorId)}"')

    # 큰 원이 작은 원을 가리지 않도록 약한 순서부터 그림
    for datum in sorted(data, key=lambda d: (d.mean_rssi, d.anchor)):
        x, y = project(datum.position)
        radius = bubbleRadius(datum.mean_rssi, low, high)
        canvas.circle(x, y, radius, bubbleColor(datum.mean_rssi, low, high),
                      f'fill-opacity="0.75" stroke="#333333" class="bubble" data-anchor="{html.escape(datum.anchor)}"')
        canvas.text(x, y - radius - 4, f"{datum.anchor} {datum.mean_rssi:.1f} dBm",
                    'font-size="10" text-anchor="middle"')

    if robotPosition is not None:
        x, y = project(robotPosition)
        canvas.polygon([(x, y - 8), (x + 8, y), (x, y + 8), (x - 8, y)], ROBOT_MARKER_COLOR,
                       'stroke="#000000" class="robot"')

    legendY = project.plotHeight + 8
    legendX = BUBBLE_MARGIN
    legendW = canvas.width - 2 * BUBBLE_MARGIN
    canvas.linearGradient("rssi-scale", _hex(BUBBLE_COLOR_WEAK), _hex(BUBBLE_COLOR_STRONG))
    canvas.rect(legendX, legendY, legendW, 10, "url(#rssi-scale)", 'class="legend"')
    canvas.text(legendX, legendY + 24, f"{low:.1f} dBm", 'font-size="10" text-anchor="start"')
    canvas.text(legendX + legendW, legendY + 24, f"{high:.1f} dBm", 'font-size="10" text-anchor="end"')
    return canvas.getSvg()


def formatBubbleTable(data: Sequence[BubbleDatum]) -> str:
    buf = io.StringIO()
    buf.write(formatHeader(FORMAT_BUBBLES) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BUBBLE_COLUMNS)
    for d in data:
        writer.writerow([d.anchor, repr(d.position.x), repr(d.position.y), repr(d.mean_rssi), d.samples])
    return buf.getvalue()


def tablePathFor(destination) -> Path:
    """SVG 경로 → 동반 표 경로 (같은 이름, .csv)"""
    return Path(destination).with_suffix(".csv")


def emitBubbleMap(
    trace: Sequence[ScanRecord],
    anchors: AnchorMap,
    destination,
    groundTruth: Optional[Sequence[tuple[float, Point2D]]] = None,
) -> list[BubbleDatum]:
    """버블맵 SVG + 동반 표 저장

    Raises:
        EmptyTrace, UnknownAnchorInTrace
    """
    data = computeBubbleData(trace, anchors)
    robot = centroid([p for _, p in groundTruth]) if groundTruth else None
    writeTextAtomic(destination, renderBubbleSvg(data, anchors, robot))
    writeTextAtomic(tablePathFor(destination), formatBubbleTable(data))
    return data
