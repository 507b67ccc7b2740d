"""Band edges, gap critical points, heights and gap separations."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from ._parallel import ordered_map
from .floquet import DEFAULT_TOL, system_for
from .potential import HillPotential

DEFAULT_EDGE_TOL = 1e-9
OPEN_EXCESS = 1e-12  # (-1)^n Delta(critical) - 1 must exceed this
OPEN_WIDTH = 1e-9  # and right - left must exceed this
INF = math.inf


class EdgePairingError(RuntimeError):
    """Count or parity of located critical points is inconsistent."""


class NegativeSpectrumError(RuntimeError):
    """Hill spectrum starts below zero: potential not of Riccati form."""


@dataclass(frozen=True)
class Gap:
    """One spectral gap (left, right) with its critical point and height.

    Parameters live in the operator's native variable (lam for Hill
    lam-gaps, z for Dirac gaps and Hill momentum gaps). ``slope_left`` and
    ``slope_right`` are Delta' at the edges with respect to that variable.
    """

    n: int
    left: float
    right: float
    critical: float
    height: float
    open: bool
    left_err: float = 0.0
    right_err: float = 0.0
    critical_err: float = 0.0
    height_err: float = 0.0
    slope_left: float = 0.0
    slope_right: float = 0.0
    slope_err: float = 0.0
    excess: float = 0.0  # (-1)^n Delta(critical) - 1
    curvature: float = 0.0  # |Delta''(critical)| in the native variable

    @property
    def width(self) -> float:
        return self.right - self.left if self.open else 0.0

    @property
    def center(self) -> float:
        return 0.5 * (self.left + self.right)

    @property
    def half_width(self) -> float:
        return 0.5 * self.width

    def contains(self, x: float) -> bool:
        return self.open and self.left < x < self.right


@dataclass
class BandStructure:
    kind: str
    n_max: int
    ode_tol: float
    edge_tol: float
    gaps: list[Gap]
    lambda0_plus: float | None = None
    lambda0_err: float = 0.0
    momentum: list[Gap] = field(default_factory=list)
    rho: dict[int, float] = field(default_factory=dict)
    rho_inf: float = INF
    h_plus: float = 0.0
    g_plus: float = 0.0
    cutoff_limited: bool = True
    pot: object = None

    def open_gaps(self) -> list[Gap]:
        """Open gaps of the comb picture (z-plane), ordered by n."""
        return [g for g in self.momentum if g.open]

    def gap(self, n: int) -> Gap:
        for g in self.momentum:
            if g.n == n:
                return g
        raise KeyError(n)


def _sign(n: int) -> float:
    return -1.0 if n % 2 else 1.0


def _find_criticals(system, grid, tol):
    """Sign changes of Delta' on ``grid``, refined to zeros of Delta'."""
    def dd(s):
        return system.lyapunov(s, tol).d_delta

    vals = [dd(s) for s in grid]
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            roots.append(brentq(dd, a, b, xtol=1e-15 * max(1.0, abs(a)), rtol=1e-15, maxiter=200))
    return roots


def _edge(system, n, a, b, tol, xtol):
    """Unique root of (-1)^n Delta - 1 between a (inside a band) and b."""
    sgn = _sign(n)

    def f(s):
        ev = system.lyapunov(s, tol)
        if sgn * ev.delta <= 0.0:
            return -1.0 - abs(ev.delta)
        return ev.disc

    fa, fb = f(a), f(b)
    if fa * fb > 0.0:
        raise EdgePairingError(f"no edge of gap {n} between {a:.12g} and {b:.12g}")
    root = brentq(f, a, b, xtol=xtol, rtol=1e-15, maxiter=300)
    ev = system.lyapunov(root, tol)
    slope = abs(2.0 * ev.delta * ev.d_delta)
    err = xtol + (ev.disc_error / slope if slope > 0 else xtol)
    return root, ev, err


def _build_gap(system, n, crit, lo, hi, tol, edge_tol):
    """Classify gap n from its critical point; locate edges when open.

    ``lo``/``hi`` are points inside the neighbouring bands.
    """
    sgn = _sign(n)
    ev = system.lyapunov(crit, tol)
    if sgn * ev.delta <= 0.0:
        raise EdgePairingError(f"critical point {crit:.12g} has the wrong parity for n={n}")
    excess = ev.disc / (sgn * ev.delta + 1.0) if ev.disc > 0 else ev.disc
    crit_err = 1e-15 * max(1.0, abs(crit)) + ev.d_error / max(abs(ev.dd_delta), 1e-300)
    if excess > OPEN_EXCESS:
        half = math.sqrt(2.0 * excess / max(abs(ev.dd_delta), 1e-300))
        xtol = max(edge_tol * min(1.0, half), 1e-15 * max(1.0, abs(crit)))
        left, ev_l, err_l = _edge(system, n, lo, crit, tol, xtol)
        right, ev_r, err_r = _edge(system, n, crit, hi, tol, xtol)
        if right - left > OPEN_WIDTH:
            sh = math.sqrt(ev.disc)
            height = math.asinh(sh)
            # d(asinh sqrt D) = dD / (2 sinh h cosh h)
            h_err = ev.disc_error / (2.0 * sh * math.sqrt(1.0 + ev.disc))
            return Gap(
                n=n, left=left, right=right, critical=crit, height=height, open=True,
                left_err=err_l, right_err=err_r, critical_err=crit_err, height_err=h_err,
                slope_left=ev_l.d_delta, slope_right=ev_r.d_delta,
                slope_err=max(ev_l.d_error, ev_r.d_error),
                excess=excess, curvature=abs(ev.dd_delta),
            )
    return Gap(n=n, left=crit, right=crit, critical=crit, height=0.0, open=False,
               left_err=crit_err, right_err=crit_err, critical_err=crit_err,
               excess=excess, curvature=abs(ev.dd_delta))


def _z_grid(z_lo, z_hi, pitch):
    m = max(2, int(math.ceil((z_hi - z_lo) / pitch)) + 1)
    return np.linspace(z_lo, z_hi, m)


def locate(pot, n_max: int = 32, tol: float = DEFAULT_TOL, edge_tol: float = DEFAULT_EDGE_TOL,
           pitch: float = 1.0 / 8.0) -> BandStructure:
    """Edges, critical points and heights for all gaps with |n| <= n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    system = system_for(pot)
    locator = _locate_hill if isinstance(pot, HillPotential) else _locate_dirac
    bs = locator(system, pot, n_max, tol, edge_tol, pitch)
    bs.pot = pot
    return bs


def _locate_hill(system, pot, n_max, tol, edge_tol, pitch):
    q0 = pot.q0
    z_top = math.sqrt((math.pi * (n_max + 1.5)) ** 2 + q0)
    grid = _z_grid(0.0, z_top, pitch) ** 2
    crits = _find_criticals(system, grid, tol)
    if len(crits) < n_max + 1:
        raise EdgePairingError(f"found {len(crits)} critical points, need {n_max + 1}")
    crits = crits[: n_max + 1]
    for n, c in enumerate(crits, start=1):
        if _sign(n) * system.lyapunov(c, tol).delta <= 0.0:
            raise EdgePairingError(f"parity mismatch at lambda_{n}={c:.12g}")

    # bottom of the spectrum: Delta = 1 below lambda_1
    lo = -1.0
    while system.lyapunov(lo, tol).delta <= 1.0:
        lo *= 2.0
        if lo < -1e6:
            raise NegativeSpectrumError("no lower bracket for the spectral bottom")
    lam0, ev0, lam0_err = _edge(system, 0, lo, crits[0], tol, 1e-15)
    if lam0 < -max(edge_tol, 1e-7):
        raise NegativeSpectrumError(f"lambda_0^+ = {lam0:.3e} < 0")
    elif abs(lam0) > 1e-7:
        warnings.warn(f"lambda_0^+ = {lam0:.3e}; spectrum not normalised to start at 0")

    anchors = [lam0] + crits

    def build(n):
        return _build_gap(system, n, anchors[n], anchors[n - 1], anchors[n + 1], tol, edge_tol)

    gaps = ordered_map(build, range(1, n_max + 1))
    bs = BandStructure(kind="hill", n_max=n_max, ode_tol=tol, edge_tol=edge_tol, gaps=gaps,
                       lambda0_plus=lam0, lambda0_err=lam0_err)
    bs.momentum = momentum_gaps(bs)
    separations(bs)
    return bs


def _locate_dirac(system, pot, n_max, tol, edge_tol, pitch):
    z_top = math.pi * (n_max + 1.5) + system.scale
    grid = _z_grid(-z_top, z_top, pitch)
    crits = _find_criticals(system, grid, tol)
    if not crits:
        raise EdgePairingError("no critical points found")
    # index by counting inward from the outermost critical point
    n_top = int(round(crits[-1] / math.pi))
    idx = list(range(n_top - len(crits) + 1, n_top + 1))
    for n, c in zip(idx, crits):
        if _sign(n) * system.lyapunov(c, tol).delta <= 0.0:
            raise EdgePairingError(f"parity mismatch at z_{n}={c:.12g}")
    if idx[0] > -n_max - 1 or idx[-1] < n_max + 1:
        raise EdgePairingError(f"critical points cover n in [{idx[0]}, {idx[-1]}], "
                               f"need [{-n_max - 1}, {n_max + 1}]")
    by_n = dict(zip(idx, crits))

    def build(n):
        return _build_gap(system, n, by_n[n], by_n[n - 1], by_n[n + 1], tol, edge_tol)

    gaps = ordered_map(build, range(-n_max, n_max + 1))
    bs = BandStructure(kind="dirac", n_max=n_max, ode_tol=tol, edge_tol=edge_tol, gaps=gaps)
    bs.momentum = list(gaps)
    separations(bs)
    return bs


def momentum_gaps(bs: BandStructure) -> list[Gap]:
    """Map Hill lam-gaps to z = sqrt(lam) and add the mirrored gaps g_{-n} = -g_n."""
    if bs.kind != "hill":
        raise ValueError("momentum gaps are defined for the Hill operator")
    if bs.lambda0_plus is not None and bs.lambda0_plus < -max(bs.edge_tol, 1e-7):
        raise NegativeSpectrumError(f"lambda_0^+ = {bs.lambda0_plus:.3e} < 0")
    pos = []
    for g in bs.gaps:
        zl, zr, zc = math.sqrt(g.left), math.sqrt(g.right), math.sqrt(g.critical)
        pos.append(Gap(
            n=g.n, left=zl, right=zr, critical=zc, height=g.height, open=g.open,
            left_err=g.left_err / (2 * zl), right_err=g.right_err / (2 * zr),
            critical_err=g.critical_err / (2 * zc), height_err=g.height_err,
            # dDelta/dz = 2 z dDelta/dlam
            slope_left=2 * zl * g.slope_left, slope_right=2 * zr * g.slope_right,
            slope_err=2 * zr * g.slope_err,
            excess=g.excess, curvature=g.curvature,
        ))
    neg = [mirror(g) for g in reversed(pos)]
    return neg + pos


def mirror(g: Gap) -> Gap:
    return replace(g, n=-g.n, left=-g.right, right=-g.left, critical=-g.critical,
                   left_err=g.right_err, right_err=g.left_err,
                   slope_left=-g.slope_right, slope_right=-g.slope_left)


def interval_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(0.0, max(a[0], b[0]) - min(a[1], b[1]))


def separations(bs: BandStructure):
    """rho_n = dist(g_n, union of other open gaps); fills rho, rho_inf, h_plus, g_plus.

    Gaps beyond n_max are treated as closed, so each rho_n is an upper
    estimate (``cutoff_limited``).
    """
    opens = bs.open_gaps()
    rho = {}
    for g in opens:
        d = INF
        for o in opens:
            if o.n != g.n:
                d = min(d, interval_distance((g.left, g.right), (o.left, o.right)))
        rho[g.n] = d
    bs.rho = rho
    bs.rho_inf = min(rho.values()) if rho else INF
    bs.h_plus = max((g.height for g in opens), default=0.0)
    bs.g_plus = max((g.width for g in opens), default=0.0)
    bs.cutoff_limited = True
    return [rho[g.n] for g in opens], bs.rho_inf, bs.h_plus, bs.g_plus
