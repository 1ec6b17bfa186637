"""Paired one-sided Wilcoxon signed-rank comparison of two runs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

from exceptions import InsufficientDataError

from .aggregate import load_runs

MIN_SEEDS = 5


@dataclass(frozen=True)
class CompareResult:
    metric: str
    window: tuple[int, int]
    seeds: int
    mean_a: float
    mean_b: float
    statistic: float
    p_value: float


def parse_window(raw: str) -> tuple[int, int]:
    """``"0:50"`` is episodes 0..49."""
    first, sep, last = raw.partition(":")
    if not sep:
        raise ValueError(f"window must look like start:stop, got {raw!r}")
    start, stop = int(first), int(last)
    if not 0 <= start < stop:
        raise ValueError(f"window must satisfy 0 <= start < stop, got {raw!r}")
    return start, stop


def _run_frame(ref: str) -> pd.DataFrame:
    """``DIR`` or ``DIR:METHOD``; a directory holding several methods needs the method."""
    path, _, method = (ref, "", "") if Path(ref).exists() else ref.rpartition(":")
    frame = load_runs([Path(path)])
    if method:
        frame = frame[frame["method"] == method]
    methods = frame["method"].unique()
    if len(methods) != 1:
        raise ValueError(f"{ref!r} must select exactly one method, found {sorted(methods)}")
    return frame


def window_totals(frame: pd.DataFrame, metric: str, window: tuple[int, int]) -> pd.Series:
    """Per-seed sum of ``metric`` over the episodes inside ``window``."""
    if metric not in frame.columns:
        raise ValueError(f"unknown metric {metric!r}")
    start, stop = window
    inside = frame[(frame["episode"] >= start) & (frame["episode"] < stop)]
    return inside.groupby("seed")[metric].sum()


def wilcoxon_greater(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """One-sided test that ``a`` exceeds ``b``; identical samples give ``(0.0, 0.5)``."""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"paired samples differ in shape: {a.shape} vs {b.shape}")
    if a.size < MIN_SEEDS:
        raise InsufficientDataError(f"need at least {MIN_SEEDS} paired seeds, got {a.size}")
    if np.all(a == b):
        return 0.0, 0.5
    result = stats.wilcoxon(a, b, alternative="greater")
    return float(result.statistic), float(result.pvalue)


def compare_runs(ref_a: str, ref_b: str, metric: str = "acc_reward", window: str = "0:50") -> CompareResult:
    bounds = parse_window(window)
    totals_a = window_totals(_run_frame(ref_a), metric, bounds)
    totals_b = window_totals(_run_frame(ref_b), metric, bounds)
    seeds = totals_a.index.intersection(totals_b.index).sort_values()
    a, b = totals_a.loc[seeds].to_numpy(), totals_b.loc[seeds].to_numpy()
    statistic, p_value = wilcoxon_greater(a, b)
    return CompareResult(metric, bounds, len(seeds), float(a.mean()), float(b.mean()), statistic, p_value)
