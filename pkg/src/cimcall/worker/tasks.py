from __future__ import annotations

from typing import Any

from cimcall.evaluator.executors import run_target
from cimcall.worker.celery import app


@app.task(
    autoretry_for=(ConnectionError,),
    retry_backoff=True,
    retry_jitter=True,
    retry_backoff_max=600,
    max_retries=5,
)
def run_cell(target: str, payload: dict[str, Any]) -> dict[str, Any]:
    """Evaluate one sweep cell; failures come back as data, not retries."""
    return run_target(target, payload)
