"""Deterministic test corpus: trig-polynomial Hill and Dirac potentials.

Every potential has at most 5 modes and sup norm at most 2.
"""

from __future__ import annotations

import numpy as np

from hilldirac.potential import DiracPotential, HillPotential, norms

SEED = 20240611


def _random_trig(rng, modes):
    cos = np.zeros(modes + 1)
    sin = np.zeros(modes)
    cos[1:] = rng.uniform(-1, 1, modes) / np.arange(1, modes + 1)
    sin[:] = rng.uniform(-1, 1, modes) / np.arange(1, modes + 1)
    return cos, sin


def _rescaled(pot, amp):
    return pot.scale(amp / norms(pot)["sup_norm"])


def corpus() -> list[tuple[str, object]]:
    rng = np.random.default_rng(SEED)
    out = [
        ("hill-0.5cos", HillPotential.from_coeffs([0.0, 0.5])),
        ("hill-mixed3", HillPotential.from_coeffs([0.0, 0.8, -0.5, 0.3], [0.4, 0.2])),
        ("dirac-const1", DiracPotential.from_coeffs([1.0])),
        ("dirac-cos", DiracPotential.from_coeffs([0.0, 0.7], (), [0.3], [0.0, 0.4])),
    ]
    for i in range(9):
        modes = 1 + i % 5
        cos, sin = _random_trig(rng, modes)
        amp = rng.uniform(0.3, 2.0)
        out.append((f"hill-r{i}", _rescaled(HillPotential.from_coeffs(cos, sin), amp)))
    for i in range(9):
        modes = 1 + i % 5
        c1, s1 = _random_trig(rng, modes)
        c2, s2 = _random_trig(rng, modes)
        c1[0], c2[0] = rng.uniform(-0.5, 0.5, 2)
        amp = rng.uniform(0.3, 2.0)
        out.append((f"dirac-r{i}", _rescaled(DiracPotential.from_coeffs(c1, s1, c2, s2), amp)))
    return out
