from __future__ import annotations

import enum
from datetime import datetime
from typing import Annotated, Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator

ClassIndex = Annotated[int, Field(ge=1)]


class JobStatus(str, enum.Enum):
    queued = "queued"
    processing = "processing"
    succeeded = "succeeded"
    failed = "failed"


class JobKind(str, enum.Enum):
    sweep_antennas = "sweep-antennas"
    sweep_class = "sweep-class"
    sweep_grid = "sweep-grid"
    sweep_mixed = "sweep-mixed"
    simulation = "simulation"


class ScenarioRequest(BaseModel):
    # Partial SystemConfig; missing keys take the scenario defaults
    config: Dict[str, Any] = Field(default_factory=dict)
    plot: bool = True
    metric: str = Field("ee", pattern="^(ee|se)$")


class AntennaSweepRequest(ScenarioRequest):
    m_min: int = Field(10, ge=2, le=10_000)
    m_max: int = Field(300, ge=2, le=10_000)
    m_step: int = Field(10, ge=1)
    classes: List[ClassIndex] = Field(default_factory=lambda: [1, 3], min_length=1)

    @model_validator(mode="after")
    def _grid_order(self):
        if self.m_max < self.m_min:
            raise ValueError("m_max must be >= m_min")
        return self


class ClassSweepRequest(ScenarioRequest):
    m: int = Field(300, ge=2, le=10_000)
    n_max: int = Field(30, ge=1)


class GridSweepRequest(AntennaSweepRequest):
    n_max: int = Field(30, ge=1)


class MixedSweepRequest(ScenarioRequest):
    m: int = Field(100, ge=2, le=10_000)
    # class -> number of users in that class
    classes: Dict[ClassIndex, Annotated[int, Field(ge=0)]] = Field(..., min_length=1)


class SimulationRequest(BaseModel):
    config: Dict[str, Any] = Field(default_factory=dict)
    class_n: int = Field(1, ge=1)
    trials: Optional[int] = Field(None, ge=1, le=10_000)
    slots: Optional[int] = Field(None, ge=1, le=100_000)
    num_antennas: Optional[int] = Field(None, ge=1)
    adaptive: bool = False
    noiseless: bool = False
    static_channels: bool = False
    # true coherence class of every user; defaults to class_n
    coherence_class: Optional[ClassIndex] = None
    profile: Optional[str] = Field(None, pattern="^(static|pedestrian|train)$")


class CreateTaskResponse(BaseModel):
    task_id: str
    status: JobStatus


class TaskProgress(BaseModel):
    task_id: str
    kind: Optional[JobKind] = None
    status: JobStatus
    queued_at: datetime
    started_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None
    message: Optional[str] = None
    # Result availability
    result_csv: Optional[str] = None
    plot_svg: Optional[str] = None
    summary: Optional[Dict[str, Any]] = None


class CoherenceResponse(BaseModel):
    velocity: float
    carrier_freq: float
    coherence_samples: int
    frame_len: int
    class_n: int


class HealthResponse(BaseModel):
    status: str
    uptime_seconds: float
    queue_size: int
    running_workers: int
    max_workers: int
    queue_capacity: int
    trial_workers: int
    system_memory_free_gb: Optional[float] = None
    system_memory_total_gb: Optional[float] = None
    memory_pressure: bool = False
