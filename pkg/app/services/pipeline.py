from __future__ import annotations

"""
Experiment pipeline: turns a queued job request into files under the job
directory.

Sweeps write config.json, result.csv and (optionally) plot.svg;
simulations write config.json, trace.csv and summary.json.
"""

import logging
import time
from typing import Any, Dict, Optional

from ..config import Settings, SystemConfig, build_config, emit_config, load_settings
from ..domain.scheduler import assign_network
from ..logging import LOGGER_NAME
from ..schemas import (
    AntennaSweepRequest,
    ClassSweepRequest,
    GridSweepRequest,
    JobKind,
    MixedSweepRequest,
    SimulationRequest,
)
from ..storage import JobPaths, emit_csv, export_trace_csv, write_json, write_text
from ..utils.plot import emit_plot
from .simulation import build_options, run_trials
from .sweeps import (
    ResultTable,
    SweepSpec,
    antenna_grid,
    mixed_population_rows,
    sweep_antennas,
    sweep_class,
    sweep_grid,
)


class ExperimentPipeline:
    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or load_settings()
        self._logger = logging.getLogger(LOGGER_NAME)

    def run(self, kind: JobKind, request: Dict[str, Any], paths: JobPaths) -> Dict[str, Any]:
        """Execute one job; returns the summary stored with the job status."""
        t0 = time.time()
        self._logger.info("pipeline start: kind=%s, job=%s", kind.value, paths.root.name)
        config = build_config(**request.get("config", {}))
        write_text(paths.config_file, emit_config(config))

        if kind is JobKind.simulation:
            summary = self._run_simulation(config, SimulationRequest.model_validate(request), paths)
        else:
            table = self._run_sweep(kind, config, request)
            emit_csv(table, paths.result_csv)
            if request.get("plot", True):
                emit_plot(table, paths.plot_svg, request.get("metric", "ee"))
            summary = {
                "rows": len(table),
                "classes": table.classes(),
                "config_hash": table.provenance.config_hash,
                "seed": table.provenance.seed,
            }
            write_json(paths.summary_json, summary)

        self._logger.info("pipeline finished: job=%s in %.2fs", paths.root.name, time.time() - t0)
        return summary

    def _run_sweep(self, kind: JobKind, config: SystemConfig, request: Dict[str, Any]) -> ResultTable:
        if kind is JobKind.sweep_antennas:
            req = AntennaSweepRequest.model_validate(request)
            spec = SweepSpec("antennas", antenna_grid(req.m_min, req.m_max, req.m_step), config)
            return sweep_antennas(spec, req.classes)
        if kind is JobKind.sweep_class:
            req_c = ClassSweepRequest.model_validate(request)
            spec = SweepSpec("class_index", tuple(range(1, req_c.n_max + 1)), config)
            return sweep_class(spec, req_c.m)
        if kind is JobKind.sweep_mixed:
            req_m = MixedSweepRequest.model_validate(request)
            return mixed_population_rows(config, req_m.classes, req_m.m)
        req_g = GridSweepRequest.model_validate(request)
        return sweep_grid(config, antenna_grid(req_g.m_min, req_g.m_max, req_g.m_step), range(1, req_g.n_max + 1))

    def _run_simulation(self, config: SystemConfig, req: SimulationRequest, paths: JobPaths) -> Dict[str, Any]:
        plan = assign_network([[req.class_n] * config.num_users] * config.num_cells, config.num_pilots, config.max_class)
        options = build_options(
            config,
            noiseless=req.noiseless,
            static=req.static_channels,
            adaptive=req.adaptive,
            num_antennas=req.num_antennas,
            coherence_class=req.coherence_class,
            profile=req.profile,
        )
        result = run_trials(
            config,
            plan,
            self.settings.default_slots if req.slots is None else req.slots,
            self.settings.default_trials if req.trials is None else req.trials,
            options,
            self.settings,
        )
        export_trace_csv(result.trace, paths.trace_csv)
        summary = result.summary(config)
        write_json(paths.summary_json, summary)
        return summary
