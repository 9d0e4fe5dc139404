"""파일 저장/읽기 유틸리티

- 원자적 쓰기: 같은 디렉토리의 임시 파일에 쓴 뒤 os.replace
- 실패 시 반쯤 쓰인 출력 파일을 남기지 않는다
"""

import os
import tempfile
from pathlib import Path

from locator.errors import IoFailure, MalformedInputError


def writeTextAtomic(path, text: str):
    """UTF-8 텍스트를 원자적으로 저장"""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmpName = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=str(target.parent))
    except OSError as e:
        raise IoFailure(f"cannot prepare output {target}: {e}") from e

    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmpName, target)
    except OSError as e:
        if os.path.exists(tmpName):
            os.unlink(tmpName)
        raise IoFailure(f"cannot write {target}: {e}") from e


def readText(path, malformed: type = MalformedInputError) -> str:
    """UTF-8 텍스트 읽기

    - 파일 없음/권한 오류: IoFailure
    - UTF-8 디코딩 실패: malformed (파일 종류별 Malformed* 예외, 줄 번호 포함)
    """
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        line = raw.count(b"\n", 0, e.start) + 1
        raise malformed(f"invalid UTF-8 byte at offset {e.start}", source=str(path), line=line) from e
    # 텍스트 모드 open과 같은 줄바꿈 정규화
    return text.replace("\r\n", "\n").replace("\r", "\n")
