from __future__ import annotations

"""
System memory readings for /healthz and /metrics.
"""

from typing import Optional, Tuple

import psutil


def get_system_memory_gb() -> Optional[Tuple[float, float]]:
    """(available_gb, total_gb), or None when psutil cannot read it."""
    try:
        mem = psutil.virtual_memory()
        return float(mem.available / (1024 ** 3)), float(mem.total / (1024 ** 3))
    except Exception:
        return None


def check_memory_pressure(min_available_gb: float = 1.0) -> bool:
    mem = get_system_memory_gb()
    if not mem:
        return False
    available_gb, _ = mem
    return available_gb < min_available_gb

