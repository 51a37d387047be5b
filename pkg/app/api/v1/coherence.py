from __future__ import annotations

from typing import Optional

from fastapi import APIRouter, Query

from ...config import SystemConfig
from ...domain.performance import class_for_coherence, coherence_samples
from ...schemas import CoherenceResponse

router = APIRouter(prefix="/v1", tags=["coherence"])


@router.get("/coherence", response_model=CoherenceResponse)
async def coherence(
    velocity: float = Query(..., gt=0, description="m/s"),
    freq: float = Query(..., gt=0, description="carrier frequency in Hz"),
    frame_len: Optional[int] = Query(None, ge=1),
    max_class: Optional[int] = Query(None, ge=1),
):
    defaults = SystemConfig()
    T = frame_len or defaults.frame_len
    samples = coherence_samples(velocity, freq)
    return CoherenceResponse(
        velocity=velocity,
        carrier_freq=freq,
        coherence_samples=samples,
        frame_len=T,
        class_n=class_for_coherence(samples, T, max_class or defaults.max_class),
    )
