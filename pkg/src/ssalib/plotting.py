"""Static SVG diagnostics with a companion CSV of the plotted numbers.

Every builder returns a :class:`PlotArtifact`; :meth:`PlotArtifact.save`
writes ``<stem>.svg`` and ``<stem>.csv``. Output is byte-stable for fixed
input: the SVG id salt is fixed and no creation date is embedded.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .errors import IoError, ParameterError
from .forecasting import lrr
from .parest import roots as lrr_roots
from .reconstruction import _as_grouping, elementary, reconstruct, wcor

__all__ = [
    "PlotArtifact",
    "KINDS",
    "plot_values",
    "plot_vectors",
    "plot_paired",
    "plot_wcor",
    "plot_series",
    "plot_reconstruction",
    "plot_roots",
    "plot_forecast",
]

KINDS = ("values", "vectors", "paired", "wcor", "series", "reconstruction", "roots", "forecast")

_RC = {
    "svg.hashsalt": "ssalib",
    "svg.fonttype": "path",
    "font.size": 8,
    "axes.titlesize": 8,
    "lines.linewidth": 0.8,
}


def _fmt(v):
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


@dataclass
class PlotArtifact:
    """A rendered figure plus the table of numbers it shows."""

    kind: str
    figure: Figure
    header: list
    rows: list = field(repr=False)

    def csv_text(self):
        buf = io.StringIO()
        buf.write(",".join(self.header) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def svg_text(self):
        buf = io.StringIO()
        with matplotlib.rc_context(_RC):
            self.figure.savefig(buf, format="svg", metadata={"Date": None})
        return buf.getvalue()

    def save(self, stem):
        """Write ``stem.svg`` and ``stem.csv``; returns both paths."""
        stem = os.fspath(stem)
        if stem.endswith(".svg"):
            stem = stem[:-4]
        paths = (stem + ".svg", stem + ".csv")
        try:
            for path, text in zip(paths, (self.svg_text(), self.csv_text())):
                with open(path, "w", newline="") as fh:
                    fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write plot {stem!r}: {exc}") from exc
        return paths


def _figure(nplots, ncols=None, size=2.2):
    ncols = ncols or min(nplots, 4)
    nrows = -(-nplots // ncols)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(size * ncols + 0.4, size * nrows + 0.4), layout="constrained")
        axes = fig.subplots(nrows, ncols, squeeze=False).ravel()
    for ax in axes[nplots:]:
        ax.set_axis_off()
    return fig, axes[:nplots]


def _indices(session, idx):
    if idx is None:
        idx = range(1, min(session.nu, 10) + 1)
    idx = [int(i) for i in idx]
    if not idx:
        raise ParameterError("no eigentriple indices given")
    session.ensure(idx)
    return idx


def _pct(session, i):
    total = session.operator.frobenius_norm2
    return 100.0 * session.lambdas[i - 1] / total if total > 0 else 0.0


def plot_values(session, idx=None) -> PlotArtifact:
    """Scree plot of the eigenvalues (log scale)."""
    if idx is None:
        idx = range(1, session.nu + 1)
    idx = _indices(session, idx)
    lam = session.lambdas[np.asarray(idx) - 1]
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(5, 3.2), layout="constrained")
        ax = fig.subplots()
        pos = lam > 0
        ax.plot(np.asarray(idx)[pos], lam[pos], "o-", ms=3, color="black")
        ax.set_yscale("log")
        ax.set_xlabel("index")
        ax.set_ylabel("eigenvalue")
        ax.set_title("Eigenvalues")
    return PlotArtifact("values", fig, ["index", "lambda"], [(i, v) for i, v in zip(idx, lam)])


def plot_vectors(session, idx=None) -> PlotArtifact:
    """One panel per eigenvector, titled with its share of the norm."""
    idx = _indices(session, idx)
    U = session.eigenvectors(idx)
    fig, axes = _figure(len(idx))
    coord = np.arange(1, session.L + 1)
    for ax, i, u in zip(axes, idx, U.T):
        ax.plot(coord, u, color="black")
        ax.set_title(f"{i} ({_pct(session, i):.2f}%)")
        ax.tick_params(labelsize=6)
    header = ["coord"] + [f"U{i}" for i in idx]
    return PlotArtifact("vectors", fig, header, np.column_stack([coord, U]).tolist())


def plot_paired(session, idx=None) -> PlotArtifact:
    """Scatter of each eigenvector against the next one in ``idx``."""
    idx = _indices(session, idx)
    if len(idx) < 2:
        raise ParameterError("paired plot needs at least two indices")
    U = session.eigenvectors(idx)
    fig, axes = _figure(len(idx) - 1)
    for k, ax in enumerate(axes):
        ax.plot(U[:, k], U[:, k + 1], color="black")
        ax.set_title(f"{idx[k]} vs {idx[k + 1]}")
        ax.set_aspect("equal", adjustable="datalim")
        ax.tick_params(labelsize=6)
    coord = np.arange(1, session.L + 1)
    header = ["coord"] + [f"U{i}" for i in idx]
    return PlotArtifact("paired", fig, header, np.column_stack([coord, U]).tolist())


def plot_wcor(session, groups=None) -> PlotArtifact:
    """Grayscale map of |w-correlation| (black is 1)."""
    if groups is None:
        groups = [[i] for i in range(1, session.nu + 1)]
    w = wcor(session, groups)
    mat = np.abs(w.matrix)
    n = len(w.labels)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(5, 5), layout="constrained")
        ax = fig.subplots()
        ax.imshow(mat, cmap="gray_r", vmin=0, vmax=1, interpolation="nearest")
        step = max(1, n // 15)
        ticks = np.arange(0, n, step)
        ax.set_xticks(ticks, [w.labels[t] for t in ticks], rotation=90, fontsize=6)
        ax.set_yticks(ticks, [w.labels[t] for t in ticks], fontsize=6)
        ax.set_title("W-correlation matrix")
    rows = [[lab, *row] for lab, row in zip(w.labels, w.matrix)]
    return PlotArtifact("wcor", fig, ["label", *w.labels], rows)


def _time_axis(series, n=None):
    n = len(series) if n is None else n
    return series.index.times(n) if series.index is not None else np.arange(1.0, n + 1)


def plot_series(session, idx=None) -> PlotArtifact:
    """Elementary reconstructed series, one panel each."""
    idx = _indices(session, idx)
    comps = np.column_stack([elementary(session, i) for i in idx])
    t = _time_axis(session.series)
    fig, axes = _figure(len(idx), ncols=2, size=3.0)
    for ax, i, c in zip(axes, idx, comps.T):
        ax.plot(t, c, color="black")
        ax.set_title(f"F{i}")
        ax.tick_params(labelsize=6)
    header = ["time"] + [f"F{i}" for i in idx]
    return PlotArtifact("series", fig, header, np.column_stack([t, comps]).tolist())


def plot_reconstruction(session, groups, add_original=True, add_residuals=True) -> PlotArtifact:
    """Original series, grouped components and residual, stacked vertically."""
    grouping = _as_grouping(groups)
    rec = reconstruct(session, grouping)
    cols = {}
    if add_original:
        cols["Original"] = rec.original.values
    for lab, c in zip(grouping.labels, rec.components):
        cols[lab] = c.values
    if add_residuals and rec.residual is not None:
        cols["Residuals"] = rec.residual.values
    t = _time_axis(session.series)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6, 1.4 * len(cols) + 0.4), layout="constrained")
        axes = fig.subplots(len(cols), 1, sharex=True, squeeze=False).ravel()
        for ax, (lab, v) in zip(axes, cols.items()):
            ax.plot(t, v, color="black")
            ax.set_ylabel(lab)
            ax.tick_params(labelsize=6)
        axes[0].set_title("Reconstructed series")
    header = ["time", *cols]
    return PlotArtifact("reconstruction", fig, header, np.column_stack([t, *cols.values()]).tolist())


def plot_roots(rootset) -> PlotArtifact:
    """Roots in the complex plane against the unit circle."""
    mu = rootset.roots
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(4, 4), layout="constrained")
        ax = fig.subplots()
        phi = np.linspace(0, 2 * np.pi, 361)
        ax.plot(np.cos(phi), np.sin(phi), color="gray", lw=0.5)
        ax.plot(mu.real, mu.imag, "o", ms=3, color="black", mfc="none")
        ax.axhline(0, color="gray", lw=0.3)
        ax.axvline(0, color="gray", lw=0.3)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        ax.set_title("Roots")
    rows = [(m.real, m.imag, abs(m)) for m in mu]
    return PlotArtifact("roots", fig, ["re", "im", "modulus"], rows)


def plot_forecast(ahead, times=None, base=None, base_times=None, lower=None, upper=None):
    """Base series, forecast and optional bounds on a common axis."""
    ahead = np.asarray(ahead, dtype=float)
    times = np.arange(1.0, ahead.size + 1) if times is None else np.asarray(times, float)
    rows = []
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6, 3.2), layout="constrained")
        ax = fig.subplots()
        if base is not None:
            base = np.asarray(base, dtype=float)
            if base_times is None:
                base_times = np.arange(times[0] - base.size, times[0])
            ax.plot(base_times, base, color="black")
            rows += [("base", t, v) for t, v in zip(base_times, base)]
        if lower is not None and upper is not None:
            ax.fill_between(times, lower, upper, color="0.8", lw=0)
            rows += [("lower", t, v) for t, v in zip(times, lower)]
            rows += [("upper", t, v) for t, v in zip(times, upper)]
        ax.plot(times, ahead, color="red")
        rows += [("forecast", t, v) for t, v in zip(times, ahead)]
        ax.set_title("Forecast")
    return PlotArtifact("forecast", fig, ["role", "time", "value"], rows)


def plot_rootset(session, group):
    """Convenience: roots of the recurrence of ``group``."""
    return plot_roots(lrr_roots(lrr(session, group)))
