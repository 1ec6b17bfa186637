"""Markdown report with reward, free-energy and selection charts per environment."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams.update({"svg.hashsalt": "fets", "axes.unicode_minus": False})
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from agents import METHODS  # noqa: E402

from .aggregate import read_aggregate  # noqa: E402
from .records import ENERGY_PREFIX, PARTITION_TOLERANCE, SELECTION_PREFIX  # noqa: E402

logger = logging.getLogger(__name__)

EARLY_WINDOW = 50
LATE_WINDOW = 100
REPORT_NAME = "report.md"
FAMILIES = ("reward", "free_energy", "selection")


@dataclass
class CheckRow:
    check: str
    environment: str
    result: str
    detail: str


@dataclass
class ReportResult:
    path: Path
    charts: list[Path] = field(default_factory=list)
    gaps: list[str] = field(default_factory=list)
    checks: list[CheckRow] = field(default_factory=list)


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_") or "env"


def _space_columns(frame: pd.DataFrame, prefix: str) -> list[str]:
    return [c[: -len("_mean")] for c in frame.columns if c.startswith(prefix) and c.endswith("_mean")]


def _series(frame: pd.DataFrame, prefix: str) -> list[tuple[str, pd.DataFrame, str]]:
    """``(label, rows, metric)`` for every method/space pair with data."""
    series = []
    for method, rows in frame.groupby("method", sort=True):
        for metric in _space_columns(frame, prefix):
            if rows[f"{metric}_mean"].notna().any():
                series.append((f"{method} {metric[len(prefix):]}", rows, metric))
    return series


def _chart(series: list[tuple[str, pd.DataFrame, str]], title: str, ylabel: str, path: Path, unit_range: bool = False) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5), constrained_layout=True)
    for label, rows, metric in series:
        x = rows["episode"].to_numpy()
        y = rows[f"{metric}_mean"].to_numpy()
        sem = rows[f"{metric}_sem"].fillna(0.0).to_numpy()
        (line,) = ax.plot(x, y, label=label, linewidth=1.2)
        ax.fill_between(x, y - sem, y + sem, color=line.get_color(), alpha=0.2, linewidth=0)
    ax.set_title(title)
    ax.set_xlabel("episode")
    ax.set_ylabel(ylabel)
    if unit_range:
        ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _charts(environment: str, frame: pd.DataFrame, out_dir: Path, result: ReportResult) -> list[str]:
    lines = []
    reward = [(method, rows, "acc_reward") for method, rows in frame.groupby("method", sort=True)]
    families = {
        "reward": (reward, "average accumulated reward", "accumulated reward", False),
        "free_energy": (_series(frame, ENERGY_PREFIX), "average free energy per space", "free energy", False),
        "selection": (_series(frame, SELECTION_PREFIX), "selection fraction per space", "selection fraction", True),
    }
    for family, (series, title, ylabel, unit_range) in families.items():
        if not series:
            note = f"{environment}: no {family.replace('_', ' ')} series, chart omitted"
            result.gaps.append(note)
            lines.append(f"- _{note}_")
            continue
        path = out_dir / f"{_slug(environment)}_{family}.svg"
        _chart(series, f"{environment}: {title}", ylabel, path, unit_range)
        result.charts.append(path)
        lines.append(f"![{family}]({path.name})")
    return lines


def _checks(environment: str, frame: pd.DataFrame) -> list[CheckRow]:
    rows = []
    selections = [f"{c}_mean" for c in _space_columns(frame, SELECTION_PREFIX)]
    if selections:
        totals = frame[selections].sum(axis=1, min_count=1).dropna()
        worst = float((totals - 1.0).abs().max()) if not totals.empty else 0.0
        ok = worst <= max(PARTITION_TOLERANCE, 1e-6)
        rows.append(CheckRow("selection fractions sum to 1", environment, "PASS" if ok else "FAIL", f"max deviation {worst:.2e}"))

    methods = set(frame["method"])
    for tag in sorted(methods):
        spec = METHODS[tag]
        if not (spec.fets and spec.acting == "FE") or spec.learner not in methods:
            continue
        early = frame[frame["episode"] < EARLY_WINDOW]
        fets = early.loc[early["method"] == tag, "acc_reward_mean"].mean()
        base = early.loc[early["method"] == spec.learner, "acc_reward_mean"].mean()
        verdict = "PASS" if fets > base else "FAIL"
        rows.append(
            CheckRow(f"{tag} beats {spec.learner} early", environment, verdict, f"{fets:.3f} vs {base:.3f} over episodes < {EARLY_WINDOW}")
        )

    energies = [f"{c}_mean" for c in _space_columns(frame, ENERGY_PREFIX)]
    for tag, method_rows in frame.groupby("method", sort=True):
        if not METHODS[tag].fets or not energies:
            continue
        late = method_rows[method_rows["episode"] > method_rows["episode"].max() - LATE_WINDOW][energies].mean()
        late = late.dropna()
        if late.empty:
            continue
        best = late.idxmin()[len(ENERGY_PREFIX) : -len("_mean")]
        rows.append(CheckRow(f"{tag} lowest late free energy", environment, "INFO", f"space {best} ({late.min():.3f})"))
    return rows


def write_report(aggregate_path: Path, out_dir: Path | None = None) -> ReportResult:
    """Render charts and ``report.md`` next to the aggregate (or into ``out_dir``)."""
    out_dir = out_dir or aggregate_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    result = ReportResult(out_dir / REPORT_NAME)
    frame = read_aggregate(aggregate_path)

    lines = ["# FETS report", "", f"Aggregate: `{aggregate_path.name}`", ""]
    if frame.empty:
        result.gaps.append("no data")
        lines += ["_no data_", ""]
    for environment, rows in frame.groupby("environment", sort=True):
        logger.info("rendering %s (%d rows)", environment, len(rows))
        lines += [f"## {environment}", ""]
        lines += _charts(str(environment), rows, out_dir, result)
        lines.append("")
        result.checks += _checks(str(environment), rows)

    lines += ["## Acceptance checks", ""]
    if result.checks:
        lines += ["| check | environment | result | detail |", "|---|---|---|---|"]
        lines += [f"| {c.check} | {c.environment} | {c.result} | {c.detail} |" for c in result.checks]
    else:
        lines.append("_no checks could be evaluated_")
    result.path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return result
