from __future__ import annotations

"""
FastAPI entry point:
- build settings and services (pipeline, job queue)
- register routers, middleware and exception handlers
"""

import time

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from .api.v1 import coherence_router, health_router, tasks_router
from .config import Settings, load_settings
from .errors import SimulatorError
from .logging import setup_logging
from .middleware import (
    http_exception_handler,
    request_logger,
    simulator_exception_handler,
    unhandled_exception_handler,
    validation_exception_handler,
)
from .monitoring import metrics as app_metrics
from .services.pipeline import ExperimentPipeline
from .services.queue import JobQueue
from .storage import init_storage


def create_app() -> FastAPI:
    settings: Settings = load_settings()
    app = FastAPI(title="Time-shifted pilot massive MIMO simulator (v1)")
    setup_logging(settings.log_level)
    init_storage(settings.storage_root)

    app.state.settings = settings
    app.state.started_at = time.time()
    app.state.pipeline = ExperimentPipeline(settings)
    app.state.job_queue = JobQueue(app.state.pipeline, settings)

    if settings.metrics_enabled:
        app_metrics.register(app)

    @app.on_event("startup")
    async def on_startup():
        app.state.job_queue.start()

    @app.on_event("shutdown")
    async def on_shutdown():
        app.state.job_queue.stop()

    app.include_router(health_router)
    app.include_router(tasks_router)
    app.include_router(coherence_router)

    app.middleware("http")(request_logger)
    app.add_exception_handler(StarletteHTTPException, http_exception_handler)
    app.add_exception_handler(RequestValidationError, validation_exception_handler)
    app.add_exception_handler(SimulatorError, simulator_exception_handler)
    app.add_exception_handler(Exception, unhandled_exception_handler)

    return app
