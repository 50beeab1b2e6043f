"""
Report Writer - JSON reports, CSV summaries and console tables for experiment runs.

Floats are pinned to FLOAT_SIGNIFICANT_DIGITS before anything is written, so
a report re-generated from the same seed and config is byte-identical and
hashes the same. Experiment configs are JSON objects carrying the
vbqc-config/1 schema tag.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.table import Table

from config import CONFIG_SCHEMA, DEFAULT_OUT_DIR, DEFAULT_SEED, FLOAT_SIGNIFICANT_DIGITS


console = Console()


@dataclass
class OutputConfig:
    """Where reports go and which master seed produced them."""

    out_dir: Path
    seed: int

    @classmethod
    def from_env(cls, out_dir: Optional[str] = None, seed: Optional[int] = None) -> "OutputConfig":
        """Flags win over VBQC_OUT_DIR / VBQC_SEED, which win over the defaults."""
        env_seed = os.getenv("VBQC_SEED")
        return cls(
            out_dir=Path(out_dir or os.getenv("VBQC_OUT_DIR") or DEFAULT_OUT_DIR),
            seed=int(seed if seed is not None else (env_seed if env_seed is not None else DEFAULT_SEED)),
        )

    def path(self, name: str) -> Path:
        return self.out_dir / name


def pin_floats(value: Any) -> Any:
    """Recursively round floats to FLOAT_SIGNIFICANT_DIGITS and turn numpy scalars into Python ones."""
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.{FLOAT_SIGNIFICANT_DIGITS}g}")
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Mapping):
        return {str(k): pin_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [pin_floats(v) for v in value]
    if isinstance(value, np.ndarray):
        return [pin_floats(v) for v in value.tolist()]
    return value


def config_hash(config: Mapping[str, Any]) -> str:
    canonical = json.dumps(pin_floats(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_experiment_config(path: Path) -> Dict[str, Any]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"Config {path} must hold a JSON object")
    schema = data.get("schema")
    if schema != CONFIG_SCHEMA:
        raise ValueError(f"Config {path} has schema {schema!r}, expected {CONFIG_SCHEMA!r}")
    return data


def write_json_report(path: Path, report: Mapping[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(pin_floats(report), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def write_summary_csv(path: Path, rows: Sequence[Mapping[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fields: List[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(pin_floats(dict(row)))
    return path


def summary_table(title: str, rows: Sequence[Mapping[str, Any]]) -> Table:
    table = Table(title=title)
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    for col in columns:
        table.add_column(col)
    for row in rows:
        cells = []
        for col in columns:
            value = row.get(col, "")
            cells.append(f"{value:.4g}" if isinstance(value, float) else str(value))
        table.add_row(*cells)
    return table


def print_summary(title: str, rows: Sequence[Mapping[str, Any]], passed: bool) -> None:
    console.print(summary_table(title, rows))
    verdict = "[bold green]PASS[/]" if passed else "[bold red]FAIL[/]"
    console.print(f"{title}: {verdict}")
