from __future__ import annotations

"""
Input guards for task ids and job file paths.
"""

import uuid
from pathlib import Path

from fastapi import HTTPException


def validate_task_id(task_id: str) -> bool:
    """Task ids are UUIDs; anything else never reaches the filesystem."""
    try:
        return str(uuid.UUID(task_id)) == task_id.lower()
    except (ValueError, AttributeError, TypeError):
        return False


def validate_path_in_storage(storage_root: str | Path, target_path: str | Path) -> Path:
    """Resolve ``target_path`` and refuse it unless it lies under ``storage_root``."""
    root = Path(storage_root).resolve()
    target = Path(target_path).resolve()
    try:
        target.relative_to(root)
        return target
    except ValueError as exc:
        raise HTTPException(status_code=403, detail="Invalid path: path traversal detected") from exc
