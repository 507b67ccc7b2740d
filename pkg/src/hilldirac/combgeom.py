"""Comb geometry: the Poisson correction V_n, its extrema, and the moments Q_p.

Away from its own gap g_n the quasimomentum satisfies v = v_n (1 + V_n) with
v_n(x) = |(x - z_n^-)(x - z_n^+)|^{1/2} and

    V_n(x)   = (1/pi) sum_{m != n} int_{g_m} v(t) dt / (v_n(t) |t - x|),
    V_n'(x)  = (1/pi) sum_{m != n} int_{g_m} v(t) dt / (v_n(t) (t - x) |t - x|),
    V_n''(x) = (2/pi) sum_{m != n} int_{g_m} v(t) dt / (v_n(t) |t - x|^3).

Each source gap is mapped by t = z_m^0 + c_m sin(theta), c_m = |g_m|/2, so that
v(t) dt = v(t) c_m cos(theta) dtheta is analytic in theta; Gauss-Legendre in
theta then converges geometrically. The resulting nodes and weights (the
"measure" of the gap) are shared by V_n, the moments and the action integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .bands import OPEN_EXCESS, OPEN_WIDTH, BandStructure, Gap, mirror
from .floquet import DEFAULT_TOL
from .quasimomentum import v_only

DEFAULT_ORDER = 64
MAX_ORDER = 512
QUAD_RTOL = 1e-10
GRID_POINTS = 129
TAIL_TERMS = 60  # gaps beyond the cutoff summed explicitly in the decay model


class GapOverlapError(ValueError):
    """Open gaps of a band structure are not disjoint and ordered."""


class SourceGapError(ValueError):
    """Kernel evaluated at a point inside (or across) a source gap."""


@dataclass(frozen=True)
class GapMeasure:
    """Quadrature nodes t_k on g_m and weights w_k with int_{g_m} f v = sum w_k f(t_k).

    ``coarse_*`` hold the previous doubling level; their difference from the
    final rule is the quadrature error estimate. ``weight_err`` carries the ODE
    error of v at each node.
    """

    gap: Gap
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    weight_err: np.ndarray
    coarse_nodes: np.ndarray
    coarse_weights: np.ndarray
    converged: bool

    def integral(self, f=None) -> tuple[float, float]:
        """(int_{g_m} f v dx, error estimate); f defaults to 1."""
        fine = self.weights if f is None else self.weights * f(self.nodes)
        coarse = self.coarse_weights if f is None else self.coarse_weights * f(self.coarse_nodes)
        ferr = self.weight_err if f is None else self.weight_err * np.abs(f(self.nodes))
        val = float(np.sum(fine))
        return val, abs(val - float(np.sum(coarse))) + float(np.sum(ferr))

    def mirrored(self) -> GapMeasure:
        return GapMeasure(mirror(self.gap), self.order, -self.nodes[::-1], self.weights[::-1],
                          self.weight_err[::-1], -self.coarse_nodes[::-1],
                          self.coarse_weights[::-1], self.converged)


def _rule(gap: Gap, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    theta = 0.5 * math.pi * x
    c = gap.half_width
    return gap.center + c * np.sin(theta), 0.5 * math.pi * w * c * np.cos(theta)


def _weights(pot, gap, order, tol):
    nodes, base = _rule(gap, order)
    vals = np.empty(order)
    errs = np.empty(order)
    for k, t in enumerate(nodes):
        vals[k], errs[k] = v_only(pot, gap, float(t), tol)
    return nodes, base * vals, base * errs


def gap_measure(pot, gap: Gap, order: int = DEFAULT_ORDER, tol: float | None = None,
                max_order: int = MAX_ORDER) -> GapMeasure:
    """Doubling Gauss-Legendre rule on an open gap until int v and int x v settle."""
    if not gap.open:
        raise ValueError(f"gap {gap.n} is closed")
    tol = DEFAULT_TOL if tol is None else tol
    prev = _weights(pot, gap, order, tol)
    while True:
        nxt_order = 2 * order
        cur = _weights(pot, gap, nxt_order, tol)
        settled = True
        scale = float(np.sum(cur[1] * np.abs(cur[0])))
        for f in (lambda t: 1.0, lambda t: t):
            a = float(np.sum(prev[1] * f(prev[0])))
            b = float(np.sum(cur[1] * f(cur[0])))
            if abs(a - b) > QUAD_RTOL * max(abs(b), scale, 1e-300):
                settled = False
        order = nxt_order
        if settled or order >= max_order:
            return GapMeasure(gap, order, cur[0], cur[1], cur[2], prev[0], prev[1], settled)
        prev = cur


@dataclass(frozen=True)
class PseudoGap:
    """Bound on a gap left out of the quadrature (sub-threshold or beyond N_max)."""

    n: int
    center: float
    width: float
    height: float


def _closed_bounds(g: Gap, hill: bool) -> tuple[float, float]:
    """(width, height) bounds in the momentum plane for a gap classified closed."""
    excess = max(g.excess, OPEN_EXCESS)
    height = math.asinh(math.sqrt(2.0 * excess + excess * excess))
    if g.excess <= OPEN_EXCESS:
        width = 2.0 * math.sqrt(2.0 * excess / max(g.curvature, 1e-300))
    else:
        width = OPEN_WIDTH
    if hill:
        # native widths are in lam = z^2
        width /= 2.0 * max(abs(g.critical), 1e-3)
    return width, height


def tail_model(bands: BandStructure) -> list[PseudoGap]:
    """Closed gaps inside the cutoff plus a halving-per-index model beyond it.

    Gaps with |m| > N_max are assigned |g_m| <= w_N 2^{-(|m|-N)} and the same
    decay for heights, where (w_N, h_N) bound the outermost computed gap, and
    positions advance by pi per index.
    """
    hill = bands.kind == "hill"
    out: list[PseudoGap] = []
    for g in bands.momentum:
        if not g.open:
            w, h = _closed_bounds(g, hill)
            out.append(PseudoGap(g.n, g.critical, w, h))
    n_max = bands.n_max
    for side in (-1, 1):
        edge = bands.gap(side * n_max)
        if edge.open:
            w0, h0 = edge.width, edge.height
        else:
            w0, h0 = _closed_bounds(edge, hill)
        for j in range(1, TAIL_TERMS + 1):
            f = 2.0 ** (-j)
            out.append(PseudoGap(side * (n_max + j), edge.critical + side * math.pi * j,
                                 w0 * f, h0 * f))
    return out


@dataclass
class CombMeasures:
    """Measures of every open gap plus the tail model; shared by V_n, Q_p and actions."""

    bands: BandStructure
    measures: dict[int, GapMeasure]
    tail: list[PseudoGap]
    order: int
    tol: float

    def sources(self, exclude: int | None = None) -> list[GapMeasure]:
        keys = sorted((m for m in self.measures if m != exclude), key=lambda m: (abs(m), m))
        return [self.measures[m] for m in keys]


def _check_disjoint(gaps: list[Gap]):
    for a, b in zip(gaps[:-1], gaps[1:]):
        if not (a.n < b.n and a.right < b.left):
            raise GapOverlapError(f"gaps {a.n} and {b.n} overlap or are out of order")


def source_measures(bands: BandStructure, order: int = DEFAULT_ORDER, tol: float | None = None,
                    max_order: int = MAX_ORDER) -> CombMeasures:
    """Quadrature measures for all open gaps of ``bands`` (computed per gap in parallel)."""
    pot = bands.pot
    tol = bands.ode_tol if tol is None else tol
    opens = bands.open_gaps()
    _check_disjoint(opens)
    hill = bands.kind == "hill"
    todo = [g for g in opens if not hill or g.n > 0]
    computed = ordered_map(lambda g: gap_measure(pot, g, order, tol, max_order), todo)
    measures = {m.gap.n: m for m in computed}
    if hill:
        for m in computed:
            measures[-m.gap.n] = m.mirrored()
    return CombMeasures(bands, measures, tail_model(bands), order, tol)


# --- kernels ---------------------------------------------------------------


def _vn(gap: Gap, t):
    return np.sqrt(np.abs((t - gap.left) * (t - gap.right)))


def _kernel_sums(gap, meas_list, x, nodes_attr, weights_attr):
    V = np.zeros_like(x)
    V1 = np.zeros_like(x)
    V2 = np.zeros_like(x)
    for m in meas_list:
        t = getattr(m, nodes_attr)
        w = getattr(m, weights_attr) / _vn(gap, t)
        d = t[None, :] - x[:, None]
        ad = np.abs(d)
        V += (w / ad).sum(axis=1)
        V1 += (w / (d * ad)).sum(axis=1)
        V2 += (w / (ad * ad * ad)).sum(axis=1)
    return V / math.pi, V1 / math.pi, 2.0 * V2 / math.pi


@dataclass(frozen=True)
class CorrectionValues:
    V: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    V_err: np.ndarray
    V1_err: np.ndarray
    V2_err: np.ndarray

    def scalar(self) -> CorrectionValues:
        return CorrectionValues(*(float(np.asarray(a).reshape(-1)[0]) for a in
                                  (self.V, self.V1, self.V2, self.V_err, self.V1_err, self.V2_err)))


def _tail_bound(gap: Gap, tail: list[PseudoGap], h_plus: float):
    """(V, V', V'') bounds from omitted gaps, uniform over x in the closed gap."""
    tv = t1 = t2 = 0.0
    for p in tail:
        if p.n == gap.n:
            continue
        dist = max(p.center - gap.right, gap.left - p.center) - 0.5 * p.width
        if dist <= 0:
            continue
        vbound = min(h_plus, p.height) if h_plus > 0 else p.height
        base = 2.0 / math.pi * vbound * p.width / (dist * dist)
        tv += base
        t1 += base / dist
        t2 += 2.0 * base / (dist * dist)
    return tv, t1, t2


@dataclass
class GapCorrection:
    """V_n with derivatives on the closed gap g_n, their maxima and error bounds."""

    gap: Gap
    comb: CombMeasures = field(repr=False)
    grid: np.ndarray = field(repr=False)
    values: CorrectionValues = field(repr=False)
    tail: tuple[float, float, float]
    M: float = 0.0
    M1: float = 0.0
    M2: float = 0.0
    M_err: float = 0.0
    M1_err: float = 0.0
    M2_err: float = 0.0
    at_critical: CorrectionValues | None = None
    at_center: CorrectionValues | None = None
    at_left: CorrectionValues | None = None
    at_right: CorrectionValues | None = None

    def __call__(self, x) -> CorrectionValues:
        return evaluate_correction(self.comb, self.gap, x, self.tail)

    def ratio_check(self, x) -> np.ndarray:
        """v(x)/v_n(x) - 1 from the monodromy, at points strictly inside g_n."""
        pot = self.comb.bands.pot
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        return np.array([v_only(pot, self.gap, float(s), self.comb.tol)[0]
                         / float(_vn(self.gap, s)) - 1.0 for s in xs])


def evaluate_correction(comb: CombMeasures, gap: Gap, x, tail=None) -> CorrectionValues:
    """V_n, V_n', V_n'' at x in the closed gap g_n with absolute error estimates."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = gap.left, gap.right
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.any(x < lo - slack) or np.any(x > hi + slack):
        bad = x[(x < lo - slack) | (x > hi + slack)][0]
        for m in comb.measures.values():
            if m.gap.left < bad < m.gap.right:
                raise SourceGapError(f"x = {bad:.15g} lies inside source gap {m.gap.n}")
        raise SourceGapError(f"x = {bad:.15g} lies outside the target gap {gap.n}")
    src = comb.sources(exclude=gap.n)
    if tail is None:
        tail = _tail_bound(gap, comb.tail, comb.bands.h_plus)
    fine = _kernel_sums(gap, src, x, "nodes", "weights")
    coarse = _kernel_sums(gap, src, x, "coarse_nodes", "coarse_weights")
    werr = _kernel_sums(gap, src, x, "nodes", "weight_err")
    errs = [np.abs(f - c) + np.abs(e) + tb for f, c, e, tb in zip(fine, coarse, werr, tail)]
    return CorrectionValues(*fine, *errs)


def _golden_max(f, a, b, iters=40):
    """Maximise a unimodal f on [a, b] by golden-section search."""
    r = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - r * (b - a), a + r * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if b - a <= 1e-15 * max(1.0, abs(a)):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = f(d)
    return (c, fc) if fc > fd else (d, fd)


def chebyshev_grid(gap: Gap, points: int = GRID_POINTS) -> np.ndarray:
    j = np.arange(points)
    return gap.center - gap.half_width * np.cos(np.pi * j / (points - 1))


def _maximise(corr: GapCorrection, key: str) -> tuple[float, float]:
    vals = np.abs(getattr(corr.values, key))
    j = int(np.argmax(vals))
    best, x_best = float(vals[j]), float(corr.grid[j])
    a = float(corr.grid[max(j - 1, 0)])
    b = float(corr.grid[min(j + 1, len(corr.grid) - 1)])
    if b > a:
        xp, fp = _golden_max(lambda s: abs(float(getattr(corr(s), key)[0])), a, b)
        if fp > best:
            best, x_best = fp, xp
    return best, float(getattr(corr(x_best), key + "_err")[0])


def extrema(corr: GapCorrection) -> tuple[float, float, float]:
    """(M_n, M_n', M_n'') = max over the closed gap of V_n, |V_n'|, V_n''."""
    if not corr.comb.sources(exclude=corr.gap.n):
        corr.M = corr.M1 = corr.M2 = 0.0
        corr.M_err, corr.M1_err, corr.M2_err = corr.tail
        return 0.0, 0.0, 0.0
    corr.M, corr.M_err = _maximise(corr, "V")
    corr.M1, corr.M1_err = _maximise(corr, "V1")
    corr.M2, corr.M2_err = _maximise(corr, "V2")
    return corr.M, corr.M1, corr.M2


def correction_profile(bands: BandStructure, comb: CombMeasures, n: int,
                       points: int = GRID_POINTS) -> GapCorrection:
    """V_n on a Chebyshev grid of the open gap g_n (momentum plane), with extrema."""
    if comb.bands is not bands:
        raise ValueError("measures were computed for a different band structure")
    gap = bands.gap(n)
    if not gap.open:
        raise ValueError(f"gap {n} is closed")
    tail = _tail_bound(gap, comb.tail, bands.h_plus)
    grid = chebyshev_grid(gap, points)
    values = evaluate_correction(comb, gap, grid, tail)
    corr = GapCorrection(gap=gap, comb=comb, grid=grid, values=values, tail=tail)
    corr.at_critical = corr(gap.critical).scalar()
    corr.at_center = corr(gap.center).scalar()
    corr.at_left = corr(gap.left).scalar()
    corr.at_right = corr(gap.right).scalar()
    extrema(corr)
    return corr


def all_corrections(bands: BandStructure, comb: CombMeasures) -> dict[int, GapCorrection]:
    gaps = bands.open_gaps()
    out = ordered_map(lambda g: correction_profile(bands, comb, g.n), gaps)
    return {g.n: c for g, c in zip(gaps, out)}


# --- moments ---------------------------------------------------------------


@dataclass(frozen=True)
class Moments:
    Q0: float
    Q2: float
    Q0_err: float
    Q2_err: float
    Q0_tail: float
    Q2_tail: float


def moments(bands: BandStructure, comb: CombMeasures) -> Moments:
    """Q0 = (1/pi) int v, Q2 = (1/pi) int x^2 v over all gaps (Hill: both mirrors)."""
    q0 = q2 = e0 = e2 = 0.0
    for m in comb.sources():
        a, ea = m.integral()
        b, eb = m.integral(lambda t: t * t)
        q0, q2, e0, e2 = q0 + a, q2 + b, e0 + ea, e2 + eb
    t0 = sum(p.height * p.width for p in comb.tail)
    t2 = sum(p.height * p.width * (abs(p.center) + p.width) ** 2 for p in comb.tail)
    pi = math.pi
    return Moments(q0 / pi, q2 / pi, (e0 + t0) / pi, (e2 + t2) / pi, t0 / pi, t2 / pi)
