"""
Atomic file writes.

Outputs are written to a temporary file next to the target and moved into
place with os.replace, so a reader never sees a half-written file and a
rerun simply overwrites the previous result.
"""

import logging
import os
import tempfile
from pathlib import Path
from typing import Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    """
    Write bytes to `path` atomically, creating parent directories.

    Returns:
        The target path
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, target)
    except Exception:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise
    logger.debug(f"Wrote {len(data)} bytes to {target}")
    return target


def atomic_write_text(path: PathLike, text: str) -> Path:
    """UTF-8 text variant of atomic_write_bytes."""
    return atomic_write_bytes(path, text.encode("utf-8"))
