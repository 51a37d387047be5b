from __future__ import annotations

"""
Lightweight job queue:
- In-memory bounded queue + worker threads
- Persist job status via storage (atomic writes)
"""

import logging
import queue
import threading
import time
from typing import Dict, Optional

from ..config import Settings, load_settings
from ..domain.job import Job
from ..logging import LOGGER_NAME
from ..monitoring import metrics as app_metrics
from ..schemas import JobStatus
from ..storage import cleanup_old_jobs, save_status
from .pipeline import ExperimentPipeline


class JobQueue:
    def __init__(self, pipeline: ExperimentPipeline, settings: Optional[Settings] = None):
        self.settings = settings or load_settings()
        self.pipeline = pipeline
        max_size = max(1, self.settings.max_queue_size)
        self._q: "queue.Queue[Optional[Job]]" = queue.Queue(maxsize=max_size)
        self._jobs: Dict[str, Job] = {}
        self._workers: list[threading.Thread] = []
        self._stop = threading.Event()
        self._lock = threading.RLock()
        self._logger = logging.getLogger(LOGGER_NAME)

    def submit(self, job: Job) -> bool:
        """
        Enqueue a job without blocking.
        Returns False when the queue is full; the job is then forgotten.
        """
        with self._lock:
            self._jobs[job.task_id] = job
        job.dump_status()
        try:
            self._q.put(job, block=False)
        except queue.Full:
            with self._lock:
                self._jobs.pop(job.task_id, None)
            return False
        app_metrics.task_submitted(job.kind.value)
        app_metrics.update_queue(self._q.qsize(), self.running_workers())
        self._logger.info("job %s queued: kind=%s", job.task_id, job.kind.value)
        return True

    def get(self, task_id: str) -> Optional[Job]:
        with self._lock:
            return self._jobs.get(task_id)

    def start(self):
        for i in range(max(1, self.settings.max_workers)):
            t = threading.Thread(target=self._worker, name=f"worker-{i}", daemon=True)
            t.start()
            self._workers.append(t)

    def stop(self):
        self._stop.set()
        # Wake up workers so they can exit
        for _ in self._workers:
            try:
                self._q.put(None, block=False)
            except queue.Full:
                pass
        for t in self._workers:
            t.join(timeout=1.0)

    def _worker(self):
        while not self._stop.is_set():
            try:
                job = self._q.get(timeout=0.5)
            except queue.Empty:
                continue
            if job is None:
                continue
            job.status = JobStatus.processing
            job.started_at = time.time()
            job.dump_status()
            summary = None
            try:
                summary = self.pipeline.run(job.kind, job.request, job.paths)
                job.status = JobStatus.succeeded
                app_metrics.task_succeeded(job.kind.value)
            except Exception as e:
                job.status = JobStatus.failed
                job.message = str(e)
                app_metrics.task_failed(job.kind.value)
                self._logger.warning("job %s failed: %s", job.task_id, e)
            finally:
                job.finished_at = time.time()
                data = job.to_dict()
                if summary is not None:
                    data["summary"] = summary
                save_status(job.paths, data)
                self._q.task_done()
                app_metrics.update_queue(self._q.qsize(), self.running_workers())
                cleanup_old_jobs(self.settings.storage_root, self.settings.max_job_retention)

    def queue_size(self) -> int:
        return self._q.qsize()

    def is_queue_full(self) -> bool:
        return self._q.full()

    def queue_capacity(self) -> int:
        return self.settings.max_queue_size

    def running_workers(self) -> int:
        return sum(1 for t in self._workers if t.is_alive())
