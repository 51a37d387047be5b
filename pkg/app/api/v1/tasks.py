from __future__ import annotations

import math
import shutil
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Optional

from fastapi import APIRouter, HTTPException, Request
from fastapi.responses import FileResponse

from ...config import build_config
from ...domain.job import Job
from ...schemas import (
    AntennaSweepRequest,
    ClassSweepRequest,
    CreateTaskResponse,
    GridSweepRequest,
    JobKind,
    JobStatus,
    MixedSweepRequest,
    ScenarioRequest,
    SimulationRequest,
    TaskProgress,
)
from ...services.simulation import build_options
from ...services.sweeps import check_classes
from ...storage import init_storage, load_status, new_job
from ...utils.security import validate_path_in_storage, validate_task_id

router = APIRouter(prefix="/v1", tags=["tasks"])


def _services(request: Request):
    app = request.app
    return app.state.settings, app.state.job_queue


def _json_safe(value: Any) -> Any:
    """Non-finite floats (an interference-free SINR) become strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def _submit(
    request: Request,
    kind: JobKind,
    payload: ScenarioRequest | SimulationRequest,
    classes: Optional[Iterable[int]] = None,
) -> CreateTaskResponse:
    settings, job_queue = _services(request)
    # reject a bad scenario now rather than inside the worker
    config = build_config(**payload.config)
    if classes is not None:
        check_classes(classes, config.max_class)
    if isinstance(payload, SimulationRequest):
        build_options(config, coherence_class=payload.coherence_class, profile=payload.profile)

    if job_queue.is_queue_full():
        raise HTTPException(status_code=503, detail="Server busy: task queue is full. Please retry later.")

    storage_root = init_storage(settings.storage_root)
    task_id, paths = new_job(storage_root.as_posix())
    job = Job(task_id=task_id, kind=kind, paths=paths, request=payload.model_dump())
    if not job_queue.submit(job):
        shutil.rmtree(paths.root, ignore_errors=True)
        raise HTTPException(status_code=503, detail="Server busy: failed to enqueue task. Please retry later.")
    return CreateTaskResponse(task_id=task_id, status=JobStatus.queued)


@router.post("/sweeps/antennas", response_model=CreateTaskResponse)
async def create_antenna_sweep(request: Request, payload: AntennaSweepRequest):
    return _submit(request, JobKind.sweep_antennas, payload, payload.classes)


@router.post("/sweeps/class", response_model=CreateTaskResponse)
async def create_class_sweep(request: Request, payload: ClassSweepRequest):
    return _submit(request, JobKind.sweep_class, payload, range(1, payload.n_max + 1))


@router.post("/sweeps/grid", response_model=CreateTaskResponse)
async def create_grid_sweep(request: Request, payload: GridSweepRequest):
    return _submit(request, JobKind.sweep_grid, payload, range(1, payload.n_max + 1))


@router.post("/sweeps/mixed", response_model=CreateTaskResponse)
async def create_mixed_sweep(request: Request, payload: MixedSweepRequest):
    return _submit(request, JobKind.sweep_mixed, payload, [n for n, k in payload.classes.items() if k > 0])


@router.post("/simulations", response_model=CreateTaskResponse)
async def create_simulation(request: Request, payload: SimulationRequest):
    return _submit(request, JobKind.simulation, payload)


def _ts(value) -> datetime | None:
    return datetime.fromtimestamp(value) if value else None


@router.get("/tasks/{task_id}", response_model=TaskProgress)
async def get_task(request: Request, task_id: str):
    if not validate_task_id(task_id):
        raise HTTPException(status_code=404, detail="Task not found")

    settings, job_queue = _services(request)
    # the status file also carries the summary once the job is done
    data = load_status(settings.storage_root, task_id)
    job = job_queue.get(task_id)
    if job is not None:
        data = {**(data or {}), **job.to_dict()}
    if not data:
        raise HTTPException(status_code=404, detail="Task not found")

    kind = data.get("kind")
    is_sweep = kind is not None and kind != JobKind.simulation.value
    return TaskProgress(
        task_id=task_id,
        kind=JobKind(kind) if kind else None,
        status=JobStatus(data.get("status", "queued")),
        queued_at=datetime.fromtimestamp(data.get("queued_at", 0)),
        started_at=_ts(data.get("started_at")),
        finished_at=_ts(data.get("finished_at")),
        message=data.get("message"),
        result_csv=f"/v1/tasks/{task_id}/result.csv" if is_sweep else f"/v1/tasks/{task_id}/trace.csv",
        plot_svg=f"/v1/tasks/{task_id}/plot.svg" if is_sweep else None,
        summary=_json_safe(data.get("summary")),
    )


def _job_file(request: Request, task_id: str, name: str) -> Path:
    if not validate_task_id(task_id):
        raise HTTPException(status_code=404, detail="Task not found")
    settings, _ = _services(request)
    target = validate_path_in_storage(settings.storage_root, Path(settings.storage_root) / task_id / name)
    if not target.exists():
        raise HTTPException(status_code=404, detail="Result not generated yet")
    return target


@router.get("/tasks/{task_id}/result.csv")
async def download_result(request: Request, task_id: str):
    return FileResponse(_job_file(request, task_id, "result.csv"), media_type="text/csv")


@router.get("/tasks/{task_id}/trace.csv")
async def download_trace(request: Request, task_id: str):
    return FileResponse(_job_file(request, task_id, "trace.csv"), media_type="text/csv")


@router.get("/tasks/{task_id}/plot.svg")
async def download_plot(request: Request, task_id: str):
    return FileResponse(_job_file(request, task_id, "plot.svg"), media_type="image/svg+xml")


@router.delete("/tasks/{task_id}")
async def delete_task(request: Request, task_id: str):
    if not validate_task_id(task_id):
        raise HTTPException(status_code=404, detail="Task not found")

    settings, _ = _services(request)
    root = validate_path_in_storage(settings.storage_root, Path(settings.storage_root) / task_id)
    if not root.exists():
        raise HTTPException(status_code=404, detail="Task not found")
    shutil.rmtree(root, ignore_errors=True)
    return {"code": 0, "msg": "deleted"}
