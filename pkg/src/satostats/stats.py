"""Empirical convergence statistics: delta, the asymptotic L^2-norm, psi,
and the bias mean, all with exact per-segment closed-form integration.

delta(phi, x) is the average of phi over classes of norm <= x; it is a
step function jumping at each distinct norm, so the integrals

    I(phi, X)  = (1/log X) * integral_2^X |delta(phi, x)|^2 dx
    bias mean  = (1/log X) * integral_2^X psi(phi, x) dx / x,
    psi(phi, x) = (log x / sqrt x) * sum_{norm <= x} phi(y)

are sums of closed forms over the inter-norm segments (the second uses
the antiderivative of log(x) x^{-3/2}, which is -2 x^{-1/2} (log x + 2)).
Norm-equal primes are merged into a single jump; the prime counter counts
primes, not norms.  Before the first norm delta is 0 by convention and
the integrals start at exactly 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import chars
from .errors import EmptySeries, OrderError
from .stgroup import ClassGrid, ClassPoint, STGroup


@dataclass
class StatSeries:
    """Cumulative character sums indexed by strictly increasing norms.

    S[k] is the sum of phi over all primes of norm <= norms[k]; pi[k]
    counts those primes (several primes may share a norm).
    """

    norms: np.ndarray          # int64, strictly increasing
    S: np.ndarray              # complex128, cumulative
    pi: np.ndarray             # int64, cumulative prime count
    char_id: str = ""
    curve_label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.norms = np.asarray(self.norms, dtype=np.int64)
        self.S = np.asarray(self.S, dtype=np.complex128)
        self.pi = np.asarray(self.pi, dtype=np.int64)
        if len(self.norms) and np.any(np.diff(self.norms) <= 0):
            raise OrderError("norms must be strictly increasing")

    def __len__(self) -> int:
        return len(self.norms)

    def _index_at(self, x: float) -> int:
        if len(self) == 0:
            raise EmptySeries("no data in series")
        i = int(np.searchsorted(self.norms, x, side="right")) - 1
        if i < 0:
            raise EmptySeries(f"x = {x} precedes the first norm {self.norms[0]}")
        return i

    def sum_at(self, x: float) -> complex:
        return complex(self.S[self._index_at(x)])

    def count_at(self, x: float) -> int:
        return int(self.pi[self._index_at(x)])

    def delta_at(self, x: float) -> complex:
        """delta(phi, x) = S(x) / pi(x)."""
        i = self._index_at(x)
        return complex(self.S[i]) / int(self.pi[i])

    def delta_values(self) -> np.ndarray:
        """delta at every norm jump."""
        return self.S / self.pi


def build_series(stream, phi, group: STGroup | None = None,
                 char_id: str = "", curve_label: str = "") -> StatSeries:
    """Fold an ordered (norm, class point) stream into a StatSeries.

    `stream` is an iterable of (norm, ClassPoint) pairs sorted ascending
    by norm (ties allowed: split primes of equal norm merge into one
    jump), or a pair (norms array, ClassGrid) for the vectorized path.
    """
    if isinstance(stream, tuple) and len(stream) == 2 \
            and isinstance(stream[1], ClassGrid):
        norms, grid = stream
        norms = np.asarray(norms, dtype=np.int64)
    else:
        pairs = list(stream)
        if not pairs:
            return StatSeries(np.array([], dtype=np.int64),
                              np.array([], dtype=np.complex128),
                              np.array([], dtype=np.int64),
                              char_id, curve_label)
        norms = np.array([n for n, _ in pairs], dtype=np.int64)
        pts: list[ClassPoint] = [p for _, p in pairs]
        g = group or pts[0].group
        grid = ClassGrid.from_points(g, pts)
    if np.any(np.diff(norms) < 0):
        raise OrderError("stream not sorted ascending by norm")
    values = chars.values_on(phi, grid)
    uniq, start = np.unique(norms, return_index=True)
    sums = np.add.reduceat(values, start)
    counts = np.diff(np.append(start, len(norms)))
    return StatSeries(uniq, np.cumsum(sums), np.cumsum(counts),
                      char_id, curve_label)


# ---------------------------------------------------------------------------
# exact integrals of the step function

def _segments(series: StatSeries, X: float):
    """(lo, hi, index) covering [first norm, X] between consecutive jumps."""
    if len(series) == 0:
        raise EmptySeries("no data in series")
    if X < series.norms[0]:
        raise ValueError(f"X = {X} precedes the first norm {series.norms[0]}")
    bounds = series.norms.astype(np.float64)
    k = int(np.searchsorted(bounds, X, side="right"))  # segments 0..k-1 active
    lo = bounds[:k]
    hi = np.append(bounds[1:k], X)
    return lo, hi, np.arange(k)


def i_norm(series: StatSeries, X: float) -> float:
    """I(phi, X): log-normalized exact integral of |delta|^2 from 2 to X.

    delta vanishes on [2, first norm) by convention, so that stretch
    contributes nothing.  The caller is responsible for phi having no
    trivial constituent (see chars.trivial_multiplicity).
    """
    lo, hi, idx = _segments(series, X)
    d2 = np.abs(series.S[idx] / series.pi[idx]) ** 2
    return float(np.sum(d2 * (hi - lo)) / math.log(X))


def psi_value(series: StatSeries, x: float) -> complex:
    """psi(phi, x) = (log x / sqrt x) * S(x)."""
    s = series.sum_at(x)
    return (math.log(x) / math.sqrt(x)) * s


def _bias_antiderivative(x: np.ndarray) -> np.ndarray:
    # integral of log(t) t^{-3/2} dt = -2 t^{-1/2} (log t + 2)
    return -2.0 / np.sqrt(x) * (np.log(x) + 2.0)


def bias_mean(series: StatSeries, X: float) -> complex:
    """(1/log X) * integral_2^X psi(phi, x) dx/x, exactly per segment."""
    lo, hi, idx = _segments(series, X)
    seg = _bias_antiderivative(hi) - _bias_antiderivative(lo)
    return complex(np.sum(series.S[idx] * seg) / math.log(X))


def tilde_char(group: STGroup, phi):
    """phi minus its trivial multiplicity (Haar mean), as a class function."""
    m = chars.trivial_multiplicity(group, phi)
    if isinstance(phi, chars.VirtualCharacter):
        phi = phi.to_function()
    if isinstance(phi, chars.ClassFunction):
        return phi - chars.ClassFunction.constant(group, m)
    return lambda grid: chars.values_on(phi, grid) - complex(m)


# ---------------------------------------------------------------------------
# emitters

def checkpoint_norms(series: StatSeries, n: int) -> np.ndarray:
    """Indices of about n logarithmically spaced jumps (always includes the
    first and last)."""
    if len(series) == 0:
        raise EmptySeries("no data in series")
    if len(series) <= n:
        return np.arange(len(series))
    marks = np.geomspace(series.norms[0], series.norms[-1], n)
    idx = np.searchsorted(series.norms, marks, side="right") - 1
    return np.unique(np.clip(idx, 0, len(series) - 1))


def series_to_csv(series: StatSeries, path, checkpoints: int | None = None,
                  squared: bool = False, header_comment: str | None = None
                  ) -> None:
    """x,delta_re[,delta_im] at every jump (or checkpointed); with
    squared=True a two-column x,delta_sq file."""
    idx = (np.arange(len(series)) if checkpoints is None
           else checkpoint_norms(series, checkpoints))
    delta = series.delta_values()[idx]
    xs = series.norms[idx]
    imag = bool(np.max(np.abs(delta.imag), initial=0.0) > 1e-10)
    with open(path, "w") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        if squared:
            fh.write("x,delta_sq\n")
            for x, d in zip(xs, delta):
                fh.write(f"{x},{abs(d) ** 2:.12g}\n")
        elif imag:
            fh.write("x,delta_re,delta_im\n")
            for x, d in zip(xs, delta):
                fh.write(f"{x},{d.real:.12g},{d.imag:.12g}\n")
        else:
            fh.write("x,delta_re\n")
            for x, d in zip(xs, delta):
                fh.write(f"{x},{d.real:.12g}\n")


def write_svg(path, lines: Iterable[tuple[np.ndarray, np.ndarray, str]],
              logx: bool = True, width: int = 900, height: int = 480,
              title: str = "") -> None:
    """Minimal standalone SVG line plot (one polyline per series)."""
    lines = [(np.asarray(x, dtype=float), np.asarray(y, dtype=float), lab)
             for x, y, lab in lines]
    if not lines:
        raise ValueError("nothing to plot")
    tx = (lambda v: np.log10(np.maximum(v, 1e-300))) if logx else (lambda v: v)
    xmin = min(tx(x).min() for x, _, _ in lines)
    xmax = max(tx(x).max() for x, _, _ in lines)
    ymin = min(y.min() for _, y, _ in lines)
    ymax = max(y.max() for _, y, _ in lines)
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0
    pad = 50
    sx = (width - 2 * pad) / (xmax - xmin)
    sy = (height - 2 * pad) / (ymax - ymin)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{pad}" y="20" font-family="monospace" font-size="13">'
        f'{title}</text>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" '
        f'y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" '
        f'stroke="black"/>',
    ]
    for i, (x, y, lab) in enumerate(lines):
        px = pad + (tx(x) - xmin) * sx
        py = height - pad - (y - ymin) * sy
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        col = colors[i % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{col}" '
                     f'stroke-width="1"/>')
        parts.append(f'<text x="{width - pad - 150}" y="{pad + 16 * i}" '
                     f'fill="{col}" font-family="monospace" font-size="12">'
                     f'{lab}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
