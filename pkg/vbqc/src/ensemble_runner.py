"""
Ensemble Runner - runs many independent protocol sessions concurrently.

Every session gets its own numpy Generator spawned from the master seed by
session index, so results do not depend on scheduling. Sessions run in worker
threads under a semaphore; results come back in session-index order.
"""

import asyncio
import time
from dataclasses import dataclass, field
from typing import Any, Callable, List, Tuple

import numpy as np
from rich.console import Console
from rich.panel import Panel

from config import DEFAULT_WORKERS, VERBOSE_SESSIONS


console = Console()

Session = Callable[[np.random.Generator], Any]


def format_duration(seconds: float) -> str:
    """Format duration in seconds to a human-readable string.

    Shows seconds for times under 60 seconds, minutes for longer times.
    """
    if seconds < 60:
        return f"{seconds:.2f}s"
    else:
        minutes = seconds / 60
        return f"{minutes:.2f} min"


def session_generators(master_seed: int, count: int) -> List[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(master_seed).spawn(count)]


@dataclass
class EnsembleResult:
    label: str
    results: List[Any] = field(default_factory=list)
    failures: List[Tuple[int, str]] = field(default_factory=list)
    duration: float = 0.0

    @property
    def completed(self) -> List[Any]:
        return [r for r in self.results if r is not None]

    @property
    def ok(self) -> bool:
        return not self.failures


async def _run_session(
    index: int, session: Session, rng: np.random.Generator, semaphore: asyncio.Semaphore
) -> Any:
    async with semaphore:
        if VERBOSE_SESSIONS:
            console.log(f"[dim]session {index} started[/dim]")
        return await asyncio.to_thread(session, rng)


async def run_ensemble_async(
    session: Session,
    count: int,
    master_seed: int,
    workers: int = DEFAULT_WORKERS,
    label: str = "ensemble",
) -> EnsembleResult:
    """Run `count` sessions; exceptions are collected per session, not raised."""
    if count < 0:
        raise ValueError(f"Session count must be non-negative, got {count}")
    if workers < 1:
        raise ValueError(f"Worker count must be at least 1, got {workers}")
    start = time.time()
    semaphore = asyncio.Semaphore(workers)
    rngs = session_generators(master_seed, count)
    tasks = [_run_session(i, session, rng, semaphore) for i, rng in enumerate(rngs)]
    outcomes = await asyncio.gather(*tasks, return_exceptions=True)

    ensemble = EnsembleResult(label)
    for i, res in enumerate(outcomes):
        if isinstance(res, Exception):
            console.print(Panel(
                f"Session {i} of {label} failed ({type(res).__name__}): {res}",
                title="Session Error",
                style="red",
            ))
            ensemble.failures.append((i, f"{type(res).__name__}: {res}"))
            ensemble.results.append(None)
        else:
            ensemble.results.append(res)
    ensemble.duration = time.time() - start
    console.print(f"[dim]{label}: {count - len(ensemble.failures)}/{count} sessions in {format_duration(ensemble.duration)}[/]")
    return ensemble


def run_ensemble(
    session: Session,
    count: int,
    master_seed: int,
    workers: int = DEFAULT_WORKERS,
    label: str = "ensemble",
) -> EnsembleResult:
    """Blocking wrapper around run_ensemble_async."""
    return asyncio.run(run_ensemble_async(session, count, master_seed, workers, label))
