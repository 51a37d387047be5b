from __future__ import annotations

from datetime import datetime

from fastapi import APIRouter, Request

from ...schemas import HealthResponse
from ...utils.system import check_memory_pressure, get_system_memory_gb

router = APIRouter(tags=["health"])


@router.get("/healthz", response_model=HealthResponse)
async def healthz(request: Request):
    app = request.app
    settings = app.state.settings
    job_queue = app.state.job_queue
    uptime = datetime.now().timestamp() - app.state.started_at

    sys_mem = get_system_memory_gb()
    sys_free_gb = sys_total_gb = None
    if sys_mem:
        sys_free_gb, sys_total_gb = sys_mem

    return HealthResponse(
        status="ok",
        uptime_seconds=uptime,
        queue_size=job_queue.queue_size(),
        running_workers=job_queue.running_workers(),
        max_workers=settings.max_workers,
        queue_capacity=job_queue.queue_capacity(),
        trial_workers=settings.trial_workers,
        system_memory_free_gb=sys_free_gb,
        system_memory_total_gb=sys_total_gb,
        memory_pressure=check_memory_pressure(settings.min_system_memory_gb),
    )
