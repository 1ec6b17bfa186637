"""Per (environment, method, episode) mean and standard error across seeds."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable

import pandas as pd

from .records import BASE_COLUMNS, ENERGY_PREFIX, SELECTION_PREFIX
from .runner import MANIFEST_NAME

logger = logging.getLogger(__name__)

GROUP_COLUMNS = ["environment", "method", "episode"]
SEED_SUFFIX = "_seed"


def _method_from_file(path: Path) -> str:
    stem = path.stem
    if SEED_SUFFIX not in stem:
        raise ValueError(f"{path}: expected <method>{SEED_SUFFIX}<n>.csv")
    return stem.rsplit(SEED_SUFFIX, 1)[0]


def _environment(run_dir: Path) -> str:
    manifest = run_dir / MANIFEST_NAME
    if manifest.is_file():
        return json.loads(manifest.read_text(encoding="utf-8")).get("environment", run_dir.name)
    return run_dir.name


def load_runs(run_dirs: Iterable[Path]) -> pd.DataFrame:
    """All run CSVs below ``run_dirs`` in one frame, tagged with environment and method."""
    frames = []
    for run_dir in run_dirs:
        environment = _environment(run_dir)
        files = sorted(run_dir.glob(f"*{SEED_SUFFIX}*.csv"))
        if not files:
            logger.warning("no run CSVs in %s", run_dir)
        for path in files:
            frame = pd.read_csv(path, dtype={"run_id": str})
            frame.insert(0, "method", _method_from_file(path))
            frame.insert(0, "environment", environment)
            frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=GROUP_COLUMNS + list(BASE_COLUMNS))
    return pd.concat(frames, ignore_index=True, sort=False)


def metric_columns(frame: pd.DataFrame) -> list[str]:
    base = ["steps", "acc_reward", "truncated"]
    spaces = [c for c in frame.columns if c.startswith((ENERGY_PREFIX, SELECTION_PREFIX))]
    return [c for c in base if c in frame.columns] + spaces


def aggregate(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard error of every metric; a single seed leaves the error empty."""
    metrics = metric_columns(frame)
    if frame.empty:
        return pd.DataFrame(columns=GROUP_COLUMNS + ["seeds"] + [f"{m}_{s}" for m in metrics for s in ("mean", "sem")])
    ordered = frame.sort_values(GROUP_COLUMNS + ["seed"], kind="mergesort")
    grouped = ordered.groupby(GROUP_COLUMNS, sort=True)
    summary = grouped[metrics].agg(["mean", "sem"])
    summary.columns = [f"{metric}_{stat}" for metric, stat in summary.columns]
    summary.insert(0, "seeds", grouped["seed"].nunique())
    return summary.reset_index()


def aggregate_dirs(run_dirs: Iterable[Path], out_path: Path) -> pd.DataFrame:
    summary = aggregate(load_runs(run_dirs))
    out_path.parent.mkdir(parents=True, exist_ok=True)
    summary.to_csv(out_path, index=False)
    return summary


def read_aggregate(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)
