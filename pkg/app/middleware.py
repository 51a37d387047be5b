from __future__ import annotations

import logging
import time
from typing import Callable

from fastapi import Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .errors import ConfigSchemaError, ConfigValidationError, SchedulingError, SimulatorError
from .logging import LOGGER_NAME


async def request_logger(request: Request, call_next: Callable):
    start = time.time()
    logger = logging.getLogger(LOGGER_NAME)
    response = None
    try:
        response = await call_next(request)
        return response
    finally:
        dur = (time.time() - start) * 1000
        status_code = getattr(response, "status_code", 0) if response is not None else 500

        if status_code >= 500:
            log_level = logging.ERROR
        elif status_code >= 400:
            log_level = logging.WARNING
        else:
            log_level = logging.INFO

        logger.log(log_level, "%s %s -> %s %.1fms", request.method, request.url.path, status_code, dur)


async def http_exception_handler(request: Request, exc: StarletteHTTPException):
    return JSONResponse(
        status_code=exc.status_code,
        content={"code": exc.status_code, "msg": exc.detail},
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError):
    return JSONResponse(status_code=422, content={"code": 422, "msg": str(exc)})


def status_for(exc: SimulatorError) -> int:
    if isinstance(exc, (ConfigSchemaError, ConfigValidationError, ValueError)):
        return 422
    if isinstance(exc, SchedulingError):
        return 409
    return 500


async def simulator_exception_handler(request: Request, exc: SimulatorError):
    code = status_for(exc)
    content = {"code": code, "msg": str(exc)}
    if exc.field:
        content["field"] = exc.field
    return JSONResponse(status_code=code, content=content)


async def unhandled_exception_handler(request: Request, exc: Exception):
    logging.getLogger(LOGGER_NAME).exception("Unhandled error")
    return JSONResponse(status_code=500, content={"code": 500, "msg": "internal error"})
