"""Environment Setup Module.

Handles environment validation and configuration:
- Loading VBQC_* variables from .env and the process environment
- Validating seeds, backend names, worker counts and the output directory
- Checking that the numerical packages import
"""

import os
from typing import Optional

from dotenv import load_dotenv
from rich.console import Console
from rich.panel import Panel

from config import (
    DEFAULT_BACKEND,
    DEFAULT_OUT_DIR,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
)


console = Console()

BACKENDS = ("statevector", "frame")


class EnvironmentValidator:
    """Validates and sets up the environment for simulation runs"""

    def __init__(self):
        self.seed: int = DEFAULT_SEED
        self.backend: str = DEFAULT_BACKEND
        self.out_dir: str = DEFAULT_OUT_DIR
        self.workers: int = DEFAULT_WORKERS
        self.verbose: bool = False
        self._raw_seed: Optional[str] = None
        self._raw_workers: Optional[str] = None

    def load_environment(self) -> None:
        """Load environment variables from .env file"""
        load_dotenv()

        self._raw_seed = os.getenv("VBQC_SEED")
        self._raw_workers = os.getenv("VBQC_WORKERS")
        self.backend = os.getenv("VBQC_BACKEND", DEFAULT_BACKEND).strip().lower()
        self.out_dir = os.getenv("VBQC_OUT_DIR", DEFAULT_OUT_DIR)
        self.verbose = os.getenv("VBQC_VERBOSE", "false").lower() in {"1", "true", "yes"}

    def validate_run_config(self) -> None:
        """Validate seed, backend and worker settings"""
        if self._raw_seed is not None:
            try:
                self.seed = int(self._raw_seed)
            except ValueError as exc:
                raise RuntimeError(f"VBQC_SEED must be an integer, got {self._raw_seed!r}") from exc
            if self.seed < 0:
                raise RuntimeError(f"VBQC_SEED must be non-negative, got {self.seed}")
        if self.backend not in BACKENDS:
            raise RuntimeError(
                f"VBQC_BACKEND must be one of {', '.join(BACKENDS)}, got {self.backend!r}"
            )
        if self._raw_workers is not None:
            try:
                self.workers = int(self._raw_workers)
            except ValueError as exc:
                raise RuntimeError(f"VBQC_WORKERS must be an integer, got {self._raw_workers!r}") from exc
            if self.workers < 1:
                raise RuntimeError(f"VBQC_WORKERS must be at least 1, got {self.workers}")

    def validate_output_dir(self) -> bool:
        """
        Check the output directory

        Returns:
            True if it exists and is a directory, False otherwise (it is created on first write)
        """
        if os.path.isdir(self.out_dir):
            return True
        if os.path.exists(self.out_dir):
            raise RuntimeError(f"VBQC_OUT_DIR {self.out_dir!r} exists and is not a directory")
        console.print(Panel(
            f"Output directory {self.out_dir!r} does not exist yet.\n"
            "It will be created when the first report is written.",
            title="Output Directory",
            style="yellow",
        ))
        return False

    def check_numerics(self) -> None:
        """Check that the numerical stack is importable"""
        try:
            import galois  # noqa: F401
            import networkx  # noqa: F401
            import numpy  # noqa: F401
        except ImportError as e:
            console.print(Panel(
                "The numerical packages are not installed.\n\n"
                "Install the project dependencies and retry:\n"
                "  poetry install\n\n"
                f"Import error: {e}",
                title="Dependencies Missing",
                style="red",
            ))
            raise RuntimeError("Numerical dependencies not available") from e


def validate_and_setup_environment() -> EnvironmentValidator:
    """Setup and validate environment"""
    validator = EnvironmentValidator()
    validator.load_environment()
    validator.check_numerics()
    validator.validate_run_config()
    validator.validate_output_dir()
    return validator
