"""Monodromy matrices and Lyapunov functions of the Hill and Dirac operators.

Hill: fundamental solutions of -y'' - 2 p y' = lam y are integrated as the
first-order system

    y' = w,    w' = -lam y - 2 p w,

with columns (theta, phi) = ((1, 0), (0, 1)) at t = 0. The Lyapunov function
is Delta(lam) = (phi'(1) + theta(1)) / 2.

Dirac: J psi' + q_D psi = z psi with J = [[0, 1], [-1, 0]] is solved for psi'
using J^{-1} = -J, which gives

    y1' =  q2 y1 - (z + q1) y2,
    y2' = (z - q1) y1 -  q2 y2,

and Delta(z) = tr psi(1, z) / 2. Both systems are traceless (for Hill because
p has zero mean), so det psi(1) = 1.

Both have the form Y' = (A0(t) + s B) Y with constant B, so the s-derivatives
satisfy Y_s' = A Y_s + B Y and Y_ss' = A Y_ss + 2 B Y_s; Delta', Delta'' come
from one joint solve.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _dop853
from .potential import DiracPotential, HillPotential, TrigPoly

DEFAULT_TOL = 1e-13


class StepUnderflowError(ArithmeticError):
    """Adaptive step size fell below the minimum; carries the failure time."""

    def __init__(self, t: float, param: float):
        super().__init__(f"step size underflow at t={t:.6g} (parameter {param:.10g})")
        self.t = t
        self.param = param


@dataclass(frozen=True)
class Monodromy:
    matrix: np.ndarray
    param: float
    tol: float
    error: float

    @property
    def det(self) -> float:
        m = self.matrix
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def trace(self) -> float:
        return float(self.matrix[0, 0] + self.matrix[1, 1])


@dataclass(frozen=True)
class LyapunovEvaluation:
    """Delta and its first two parameter derivatives at one spectral point.

    ``disc`` is Delta^2 - 1 evaluated as ((M11 - M22) / 2)^2 + M12 M21, which
    equals Delta^2 - det M and keeps full relative accuracy near double
    eigenvalues where M is close to +-I.
    """

    delta: float
    d_delta: float
    dd_delta: float
    param: float
    error: float
    d_error: float
    dd_error: float
    disc: float
    disc_error: float
    det: float
    monodromy: np.ndarray


class _DetLog:
    def __init__(self):
        self._lock = threading.Lock()
        self._stack: list[list[float]] = []

    def push(self, value: float) -> None:
        if self._stack:
            with self._lock:
                for bucket in self._stack:
                    bucket.append(value)


_DET_LOG = _DetLog()


@contextmanager
def record_determinants():
    """Collect |det M - 1| for every evaluation made inside the block."""
    bucket: list[float] = []
    with _DET_LOG._lock:
        _DET_LOG._stack.append(bucket)
    try:
        yield bucket
    finally:
        with _DET_LOG._lock:
            _DET_LOG._stack.remove(bucket)


class FloquetSystem:
    """Coefficient tables for one potential, reusable across spectral points."""

    def __init__(self, pot):
        if isinstance(pot, HillPotential):
            p = pot.p
            zero = TrigPoly.zero()
            entries = [zero, TrigPoly.constant(1.0), zero, p.scale(-2.0)]
            self.B = np.array([[0.0, 0.0], [-1.0, 0.0]])
            self.kind = "hill"
            self.scale = float(np.sum(np.abs(p.cos)) + np.sum(np.abs(p.sin)))
        elif isinstance(pot, DiracPotential):
            q1, q2 = pot.q1, pot.q2
            entries = [q2, -q1, -q1, -q2]
            self.B = np.array([[0.0, -1.0], [1.0, 0.0]])
            self.kind = "dirac"
            self.scale = float(
                np.sum(np.abs(q1.cos)) + np.sum(np.abs(q1.sin))
                + np.sum(np.abs(q2.cos)) + np.sum(np.abs(q2.sin))
            )
        else:
            raise TypeError(f"unsupported potential type {type(pot).__name__}")
        self.pot = pot
        K = max(e.degree for e in entries)
        self.cos_tab = np.zeros((4, K + 1))
        self.sin_tab = np.zeros((4, K))
        for i, e in enumerate(entries):
            self.cos_tab[i, : e.degree + 1] = e.cos
            self.sin_tab[i, : e.degree] = e.sin

    def _h_init(self, s: float) -> float:
        omega = np.sqrt(abs(s)) if self.kind == "hill" else abs(s)
        return 0.25 / (1.0 + omega + self.scale)

    def solve(self, s: float, tol: float, order: int):
        if not (1e-14 < tol <= 1e-3):
            raise ValueError(f"tolerance {tol} outside (1e-14, 1e-3]")
        y, err, _, status, t_fail = _dop853.integrate(
            self.cos_tab, self.sin_tab, self.B, float(s), order, tol, self._h_init(s)
        )
        if status:
            raise StepUnderflowError(t_fail, s)
        return y, err

    def monodromy(self, s: float, tol: float = DEFAULT_TOL) -> Monodromy:
        y, err = self.solve(s, tol, 0)
        m = y[:4].reshape(2, 2).copy()
        mono = Monodromy(m, float(s), tol, float(err[0]))
        _DET_LOG.push(abs(mono.det - 1.0))
        return mono

    def lyapunov(self, s: float, tol: float = DEFAULT_TOL) -> LyapunovEvaluation:
        y, err = self.solve(s, tol, 2)
        m = y[:4].reshape(2, 2).copy()
        m1 = y[4:8].reshape(2, 2)
        m2 = y[8:12].reshape(2, 2)
        det = float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
        _DET_LOG.push(abs(det - 1.0))
        half_diff = 0.5 * (m[0, 0] - m[1, 1])
        disc = half_diff * half_diff + m[0, 1] * m[1, 0]
        e0 = float(err[0])
        disc_err = e0 * (2.0 * abs(half_diff) + abs(m[0, 1]) + abs(m[1, 0])) + 2.0 * e0 * e0
        return LyapunovEvaluation(
            delta=0.5 * float(m[0, 0] + m[1, 1]),
            d_delta=0.5 * float(m1[0, 0] + m1[1, 1]),
            dd_delta=0.5 * float(m2[0, 0] + m2[1, 1]),
            param=float(s),
            error=e0,
            d_error=float(err[1]),
            dd_error=float(err[2]),
            disc=float(disc),
            disc_error=float(disc_err),
            det=det,
            monodromy=m,
        )


@lru_cache(maxsize=64)
def _system_cached(pot) -> FloquetSystem:
    return FloquetSystem(pot)


def system_for(pot) -> FloquetSystem:
    return _system_cached(pot)


def monodromy_hill(pot: HillPotential, lam: float, tol: float = DEFAULT_TOL) -> Monodromy:
    return system_for(pot).monodromy(lam, tol)


def lyapunov_hill(pot: HillPotential, lam: float, tol: float = DEFAULT_TOL) -> LyapunovEvaluation:
    return system_for(pot).lyapunov(lam, tol)


def monodromy_dirac(pot: DiracPotential, z: float, tol: float = DEFAULT_TOL) -> Monodromy:
    return system_for(pot).monodromy(z, tol)


def lyapunov_dirac(pot: DiracPotential, z: float, tol: float = DEFAULT_TOL) -> LyapunovEvaluation:
    return system_for(pot).lyapunov(z, tol)
