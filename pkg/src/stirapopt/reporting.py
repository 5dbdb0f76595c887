"""Efficiency reports, CSV/JSON serialization and SVG figures."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import Trajectory

REPORT_FIELDS = ("protocol", "model", "T", "gamma_ratio", "efficiency", "closed_form", "abs_gap")
TRAJECTORY_FIELDS = ("t", "pop1", "pop2", "pop3")


def fmt(x) -> str:
    """12 significant digits; ``inf`` for the infinite ratio, empty for missing."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def _parse(s: str) -> float | None:
    return None if s == "" else float(s)


@dataclass(frozen=True)
class ReportRow:
    protocol: str
    model: str
    T: float
    gamma_ratio: float
    efficiency: float
    closed_form: float | None = None
    abs_gap: float | None = None

    def __post_init__(self):
        if self.closed_form is not None and self.abs_gap is None:
            object.__setattr__(self, "abs_gap", abs(self.efficiency - self.closed_form))


@dataclass
class EfficiencyReport:
    rows: list[ReportRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for r in self.rows:
            w.writerow([r.protocol, r.model, fmt(r.T), fmt(r.gamma_ratio), fmt(r.efficiency),
                        fmt(r.closed_form), fmt(r.abs_gap)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EfficiencyReport":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != REPORT_FIELDS:
            raise ValueError(f"unexpected report header {reader.fieldnames}")
        rows = [
            ReportRow(d["protocol"], d["model"], float(d["T"]), float(d["gamma_ratio"]),
                      float(d["efficiency"]), _parse(d["closed_form"]), _parse(d["abs_gap"]))
            for d in reader
        ]
        return cls(rows)

    def to_records(self) -> list[dict]:
        out = []
        for r in self.rows:
            d = asdict(r)
            d["gamma_ratio"] = fmt(r.gamma_ratio) if math.isinf(r.gamma_ratio) else r.gamma_ratio
            out.append(d)
        return out


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJECTORY_FIELDS)
    for t, (p1, p2, p3) in zip(traj.times, traj.populations):
        w.writerow([fmt(t), fmt(p1), fmt(p2), fmt(p3)])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> dict[str, np.ndarray]:
    """Columns of a trajectory CSV; empty ``pop2`` cells become NaN."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != TRAJECTORY_FIELDS:
        raise ValueError(f"unexpected trajectory header {reader.fieldnames}")
    cols: dict[str, list[float]] = {k: [] for k in TRAJECTORY_FIELDS}
    for d in reader:
        for k in TRAJECTORY_FIELDS:
            v = _parse(d[k])
            cols[k].append(math.nan if v is None else v)
    return {k: np.array(v) for k, v in cols.items()}


def table_csv(columns: dict[str, np.ndarray]) -> str:
    """Generic numeric table, one column per key."""
    names = list(columns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*(columns[n] for n in names)):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def read_table_csv(text: str) -> dict[str, np.ndarray]:
    reader = csv.DictReader(io.StringIO(text))
    cols: dict[str, list[float]] = {k: [] for k in reader.fieldnames or ()}
    for d in reader:
        for k in cols:
            v = _parse(d[k])
            cols[k].append(math.nan if v is None else v)
    return {k: np.array(v) for k, v in cols.items()}


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- SVG -------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "stirapopt"
    matplotlib.rcParams["svg.fonttype"] = "none"
    return plt


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def plot_fig1(report_csv: str, path: Path) -> None:
    """Optimal efficiency versus duration with full-model markers per ratio."""
    plt = _pyplot()
    report = EfficiencyReport.from_csv(report_csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    ratios = sorted({r.gamma_ratio for r in report.rows}, reverse=True)
    first = [r for r in report.rows if r.gamma_ratio == ratios[0]]
    ax.plot([r.T for r in first], [r.closed_form for r in first], "r-", label="optimal (closed form)")
    markers = ["bo", "gs", "m^", "cv"]
    for k, ratio in enumerate(ratios):
        rows = [r for r in report.rows if r.gamma_ratio == ratio]
        ax.plot([r.T for r in rows], [r.efficiency for r in rows], markers[k % len(markers)],
                mfc="none", label=f"full model, Gamma/Omega0={fmt(ratio)}")
    ax.set_xlabel("normalized duration T")
    ax.set_ylabel("|c3(T)|^2")
    ax.set_ylim(0, 1.02)
    ax.legend(loc="lower right")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_fig2(table: str, path: Path) -> None:
    """Optimal and sigmoid pulses with the reduced-model populations they produce."""
    plt = _pyplot()
    d = read_table_csv(table)
    t = d["t"]
    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    (a, b), (c, e) = axes
    a.plot(t, d["omega_p_optimal"], "b--", label="pump")
    a.plot(t, d["omega_s_optimal"], "r-", label="Stokes")
    a.set_title("optimal fields")
    b.plot(t, d["omega_p_sigmoid"], "b--", label="pump")
    b.plot(t, d["omega_s_sigmoid"], "r-", label="Stokes")
    b.set_title("sigmoid fields")
    c.plot(t, d["pop1_optimal"], "r-", label="|c1|^2")
    c.plot(t, d["pop3_optimal"], "b--", label="|c3|^2")
    c.set_title("populations, optimal")
    e.plot(t, d["pop1_sigmoid"], "r-", label="|c1|^2")
    e.plot(t, d["pop3_sigmoid"], "b--", label="|c3|^2")
    e.set_title("populations, sigmoid")
    for ax in axes.flat:
        ax.legend(loc="center right")
    for ax in axes[1]:
        ax.set_xlabel("normalized time t")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_fig3(table: str, path: Path) -> None:
    """Target population for several dissipation ratios, optimal and sigmoid."""
    plt = _pyplot()
    d = read_table_csv(table)
    t = d["t"]
    styles = ["r-", "b--", "g-."]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
    for ax, proto in zip(axes, ("optimal", "sigmoid")):
        cols = [k for k in d if k.startswith(f"pop3_{proto}_")]
        for k, name in enumerate(cols):
            ratio = name.rsplit("_", 1)[1]
            ax.plot(t, d[name], styles[k % len(styles)], label=f"Gamma/Omega0={ratio}")
        ax.set_title(proto)
        ax.set_xlabel("normalized time t")
        ax.legend(loc="upper left")
    axes[0].set_ylabel("|c3(t)|^2")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
