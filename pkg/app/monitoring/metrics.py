from __future__ import annotations

"""
Lightweight Prometheus metrics for the simulator service.

Exposes /metrics and provides helpers to update counters and gauges
without background threads. The helpers never raise, so the numerics can
record progress without caring whether metrics are enabled. System memory
gauges are refreshed on each scrape.
"""

import time
from typing import Callable

from fastapi import FastAPI, Request, Response
from prometheus_client import CONTENT_TYPE_LATEST, Counter, Gauge, Histogram, generate_latest
from starlette.responses import PlainTextResponse

from ..utils.system import get_system_memory_gb

# HTTP request metrics
REQUEST_COUNTER = Counter(
    "http_requests_total", "Total HTTP requests", ["method", "path", "status"]
)
REQUEST_LATENCY = Histogram(
    "http_request_duration_seconds", "HTTP request duration seconds", ["method", "path"]
)

# Job metrics
TASKS_SUBMITTED = Counter("tasks_submitted_total", "Total submitted jobs", ["kind"])
TASKS_SUCCEEDED = Counter("tasks_succeeded_total", "Total succeeded jobs", ["kind"])
TASKS_FAILED = Counter("tasks_failed_total", "Total failed jobs", ["kind"])

# Queue metrics
QUEUE_SIZE = Gauge("queue_size", "Current job queue size")
RUNNING_WORKERS = Gauge("running_workers", "Running worker threads")

# Simulation metrics
SIMULATED_TRIALS = Counter("simulated_trials_total", "Monte Carlo trials completed")
SIMULATED_SLOTS = Counter("simulated_slots_total", "Measured slots simulated over all trials")
SWEEP_POINTS = Counter("sweep_points_total", "Closed-form sweep points evaluated")

# System memory (updated on scrape)
SYSTEM_MEMORY_FREE_GB = Gauge("system_memory_free_gb", "Available system memory (GB)")
SYSTEM_MEMORY_TOTAL_GB = Gauge("system_memory_total_gb", "Total system memory (GB)")


def register(app: FastAPI):
    """Register middleware and /metrics route."""

    @app.middleware("http")
    async def metrics_middleware(request: Request, call_next: Callable):
        start = time.time()
        path = request.url.path
        method = request.method
        if path == "/metrics":
            return await call_next(request)

        response: Response = await call_next(request)

        try:
            REQUEST_COUNTER.labels(method=method, path=path, status=str(response.status_code)).inc()
            REQUEST_LATENCY.labels(method=method, path=path).observe(max(0.0, time.time() - start))
        except Exception:
            pass
        return response

    @app.get("/metrics")
    async def metrics_endpoint():
        try:
            mem = get_system_memory_gb()
            if mem:
                free_gb, total_gb = mem
                SYSTEM_MEMORY_FREE_GB.set(free_gb)
                SYSTEM_MEMORY_TOTAL_GB.set(total_gb)
        except Exception:
            pass
        payload = generate_latest()
        return PlainTextResponse(content=payload.decode("utf-8"), media_type=CONTENT_TYPE_LATEST)


def update_queue(size: int, workers: int):
    try:
        QUEUE_SIZE.set(size)
        RUNNING_WORKERS.set(workers)
    except Exception:
        pass


def task_submitted(kind: str):
    try:
        TASKS_SUBMITTED.labels(kind=kind).inc()
    except Exception:
        pass


def task_succeeded(kind: str):
    try:
        TASKS_SUCCEEDED.labels(kind=kind).inc()
    except Exception:
        pass


def task_failed(kind: str):
    try:
        TASKS_FAILED.labels(kind=kind).inc()
    except Exception:
        pass


def simulation_recorded(trials: int, slots: int):
    try:
        SIMULATED_TRIALS.inc(trials)
        SIMULATED_SLOTS.inc(slots)
    except Exception:
        pass


def sweep_recorded(points: int):
    try:
        SWEEP_POINTS.inc(points)
    except Exception:
        pass
