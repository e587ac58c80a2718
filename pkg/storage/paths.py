"""
Dataset path resolution.

Relative dataset paths resolve against FEATURE_LEVELING_DATA_DIR when it is
set, else against the repository's datasets/ directory.
"""

import os
from pathlib import Path

from config import settings
from utils.errors import DatasetNotFoundError


def get_data_dir() -> str:
    """
    Directory that relative dataset paths are resolved against.

    Returns:
        FEATURE_LEVELING_DATA_DIR if set, else <repo>/datasets (created on demand)
    """
    if settings.DATA_DIR:
        return settings.DATA_DIR

    current_dir = os.path.dirname(os.path.abspath(__file__))
    project_root = os.path.dirname(current_dir)
    data_dir = os.path.join(project_root, "datasets")
    os.makedirs(data_dir, exist_ok=True)
    return data_dir


def resolve_data_path(path: str) -> str:
    """
    Absolute form of a dataset path.

    Absolute paths and paths that exist relative to the working directory
    are returned as they are; anything else is looked up in the data dir.

    Raises:
        DatasetNotFoundError: if the file exists in neither place
    """
    candidate = Path(path)
    if candidate.is_absolute() or candidate.exists():
        if not candidate.exists():
            raise DatasetNotFoundError(path)
        return str(candidate)
    in_data_dir = Path(get_data_dir()) / candidate
    if not in_data_dir.exists():
        raise DatasetNotFoundError(path)
    return str(in_data_dir)
