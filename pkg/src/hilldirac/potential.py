"""Periodic coefficient data for the Hill and Dirac operators.

All functions are 1-periodic real trigonometric polynomials

    f(t) = sum_j a_j cos(2 pi j t) + sum_{j>=1} b_j sin(2 pi j t).

Arithmetic (products, antiderivatives) is done exactly on the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_MODES = 64


class ModeOverflowError(ValueError):
    """A coefficient operation produced more than the allowed number of modes."""


def _as_coeffs(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float)).copy()
    if arr.ndim != 1:
        raise ValueError(f"{name} coefficients must be a flat sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} coefficients must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Real 1-periodic trigonometric polynomial.

    ``cos[j]`` multiplies cos(2 pi j t) for j >= 0 (``cos[0]`` is the mean);
    ``sin[j - 1]`` multiplies sin(2 pi j t) for j >= 1.
    """

    cos: np.ndarray = field(default_factory=lambda: np.zeros(1))
    sin: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        c = _as_coeffs(self.cos, "cos") if np.size(self.cos) else _as_coeffs([0.0], "cos")
        s = _as_coeffs(self.sin, "sin") if np.size(self.sin) else np.zeros(0)
        n = max(len(c) - 1, len(s))
        if n > MAX_MODES:
            raise ModeOverflowError(f"{n} modes exceeds the cap of {MAX_MODES}")
        cc = np.zeros(n + 1)
        cc[: len(c)] = c
        ss = np.zeros(n)
        ss[: len(s)] = s
        cc.flags.writeable = False
        ss.flags.writeable = False
        object.__setattr__(self, "cos", cc)
        object.__setattr__(self, "sin", ss)

    def _key(self):
        return (tuple(self.cos.tolist()), tuple(self.sin.tolist()))

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def degree(self) -> int:
        return len(self.sin)

    @property
    def mean(self) -> float:
        return float(self.cos[0])

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls([0.0], [])

    @classmethod
    def constant(cls, value: float) -> "TrigPoly":
        return cls([value], [])

    # complex exponential form: f = sum_{k=-n}^{n} c_k e^{2 pi i k t}
    def to_exp(self) -> np.ndarray:
        n = self.degree
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n] = self.cos[0]
        if n:
            j = np.arange(1, n + 1)
            c[n + j] = 0.5 * (self.cos[1:] - 1j * self.sin)
            c[n - j] = 0.5 * (self.cos[1:] + 1j * self.sin)
        return c

    @classmethod
    def from_exp(cls, c: np.ndarray) -> "TrigPoly":
        n = (len(c) - 1) // 2
        a = np.empty(n + 1)
        a[0] = c[n].real
        b = np.empty(n)
        if n:
            j = np.arange(1, n + 1)
            a[1:] = (c[n + j] + c[n - j]).real
            b[:] = (1j * (c[n + j] - c[n - j])).real
        a, b = _trim(a, b)
        return cls(a, b)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        # reduce to one period so that t and t + 1 give identical results
        t = t - np.floor(t)
        out = np.full(t.shape, self.cos[0])
        for j in range(1, self.degree + 1):
            arg = 2.0 * np.pi * j * t
            out = out + self.cos[j] * np.cos(arg) + self.sin[j - 1] * np.sin(arg)
        return out if out.ndim else float(out)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        n = max(self.degree, other.degree)
        a = np.zeros(n + 1)
        b = np.zeros(n)
        a[: self.degree + 1] += self.cos
        a[: other.degree + 1] += other.cos
        b[: self.degree] += self.sin
        b[: other.degree] += other.sin
        return TrigPoly(a, b)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(-self.cos, -self.sin)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def scale(self, factor: float) -> "TrigPoly":
        return TrigPoly(factor * self.cos, factor * self.sin)

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        if self.degree + other.degree > MAX_MODES:
            raise ModeOverflowError(
                f"product has {self.degree + other.degree} modes, cap is {MAX_MODES}"
            )
        return TrigPoly.from_exp(np.convolve(self.to_exp(), other.to_exp()))

    def derivative(self) -> "TrigPoly":
        n = self.degree
        j = np.arange(1, n + 1)
        a = np.zeros(n + 1)
        a[1:] = 2.0 * np.pi * j * self.sin
        b = -2.0 * np.pi * j * self.cos[1:]
        return TrigPoly(a, b)

    def antiderivative(self) -> "TrigPoly":
        """Zero-mean periodic antiderivative; requires a zero-mean input."""
        if abs(self.cos[0]) > 1e-14 * max(1.0, np.abs(self.cos).max()):
            raise ValueError("antiderivative of a function with nonzero mean is not periodic")
        n = self.degree
        j = np.arange(1, n + 1)
        a = np.zeros(n + 1)
        a[1:] = -self.sin / (2.0 * np.pi * j)
        b = self.cos[1:] / (2.0 * np.pi * j)
        return TrigPoly(a, b)

    def l2_norm_sq(self) -> float:
        """Integral of f^2 over one period (Parseval)."""
        return float(self.cos[0] ** 2 + 0.5 * (np.sum(self.cos[1:] ** 2) + np.sum(self.sin**2)))

    def sup_norm(self, samples: int = 2048) -> float:
        t = np.arange(samples) / samples
        return float(np.max(np.abs(self(t)))) if self.degree else abs(self.cos[0])


def _trim(a: np.ndarray, b: np.ndarray, tol: float = 0.0):
    n = len(b)
    while n > 0 and abs(a[n]) <= tol and abs(b[n - 1]) <= tol:
        n -= 1
    return a[: n + 1], b[:n]


@dataclass(frozen=True)
class HillPotential:
    """Zero-mean coefficient p of the weighted operator -y'' - 2 p y'."""

    p: TrigPoly

    def __post_init__(self):
        if abs(self.p.mean) > 1e-14:
            raise ValueError("Hill coefficient p must have zero mean")

    kind = "hill"

    @property
    def q0(self) -> float:
        return self.p.l2_norm_sq()

    @classmethod
    def from_coeffs(cls, cos=(0.0,), sin=()) -> "HillPotential":
        return cls(TrigPoly(cos, sin))

    def scale(self, factor: float) -> "HillPotential":
        return HillPotential(self.p.scale(factor))

    def describe(self) -> dict:
        return {"kind": "hill", "p": {"cos": self.p.cos.tolist(), "sin": self.p.sin.tolist()}}


@dataclass(frozen=True)
class DiracPotential:
    """Matrix potential [[q1, q2], [q2, -q1]] of J d/dt + q_D."""

    q1: TrigPoly
    q2: TrigPoly

    kind = "dirac"

    @classmethod
    def from_coeffs(cls, q1_cos=(0.0,), q1_sin=(), q2_cos=(0.0,), q2_sin=()) -> "DiracPotential":
        return cls(TrigPoly(q1_cos, q1_sin), TrigPoly(q2_cos, q2_sin))

    def scale(self, factor: float) -> "DiracPotential":
        return DiracPotential(self.q1.scale(factor), self.q2.scale(factor))

    def describe(self) -> dict:
        return {
            "kind": "dirac",
            "q1": {"cos": self.q1.cos.tolist(), "sin": self.q1.sin.tolist()},
            "q2": {"cos": self.q2.cos.tolist(), "sin": self.q2.sin.tolist()},
        }


def riccati_map(pot: HillPotential) -> TrigPoly:
    """Hill potential q = p + int_0^x (p^2 - |p|^2) dt + int_0^1 (t - 1/2) p^2 dt.

    The constant in the last term equals minus the mean of the running
    integral, so q is p plus the zero-mean antiderivative of p^2 - |p|^2.
    """
    p = pot.p
    p2 = p * p
    centered = p2 - TrigPoly.constant(p2.mean)
    return p + centered.antiderivative()


def hill_q_prime(pot: HillPotential) -> TrigPoly:
    """q' = p' + p^2 - |p|^2, the zero-mean part of the Schrodinger potential."""
    p = pot.p
    p2 = p * p
    return p.derivative() + p2 - TrigPoly.constant(pot.q0)


def norms(pot) -> dict:
    if isinstance(pot, TrigPoly):
        return {"l2_norm_sq": pot.l2_norm_sq(), "sup_norm": pot.sup_norm()}
    if isinstance(pot, HillPotential):
        return {"l2_norm_sq": pot.q0, "sup_norm": pot.p.sup_norm()}
    if isinstance(pot, DiracPotential):
        t = np.arange(2048) / 2048
        sup = float(np.max(np.hypot(pot.q1(t), pot.q2(t))))
        return {"l2_norm_sq": pot.q1.l2_norm_sq() + pot.q2.l2_norm_sq(), "sup_norm": sup}
    raise TypeError(f"unsupported potential type {type(pot).__name__}")


def evaluate(pot, t):
    if isinstance(pot, TrigPoly):
        return pot(t)
    if isinstance(pot, HillPotential):
        return pot.p(t)
    if isinstance(pot, DiracPotential):
        return np.stack([np.asarray(pot.q1(t)), np.asarray(pot.q2(t))])
    raise TypeError(f"unsupported potential type {type(pot).__name__}")


def trace_identities(pot) -> tuple[float, float]:
    """Right-hand sides (Q0, Q2) of the first two trace identities, exact in the coefficients.

    Hill:  Q0 = q0/2,             Q2 = (q0^2 + |q'|^2) / 8.
    Dirac: Q0 = |q1|^2/2 + |q2|^2/2, Q2 = (|q1'|^2 + |q2'|^2 + |q1^2 + q2^2|^2) / 8.
    Norms are L^2(0, 1), evaluated by Parseval.
    """
    if isinstance(pot, HillPotential):
        q0 = pot.q0
        return q0 / 2.0, (q0 * q0 + hill_q_prime(pot).l2_norm_sq()) / 8.0
    if isinstance(pot, DiracPotential):
        q1, q2 = pot.q1, pot.q2
        rho = q1 * q1 + q2 * q2
        q0 = (q1.l2_norm_sq() + q2.l2_norm_sq()) / 2.0
        q2_ = (q1.derivative().l2_norm_sq() + q2.derivative().l2_norm_sq() + rho.l2_norm_sq()) / 8.0
        return q0, q2_
    raise TypeError(f"unsupported potential type {type(pot).__name__}")
