"""Numba kernel: DOP853 with PI step control for Y' = (A0(t) + s B) Y and its
first two s-derivatives.

The coefficient matrix A0(t) is a 2x2 matrix of trigonometric polynomials,
passed as cosine/sine tables of shape (4, K + 1) / (4, K) in row-major entry
order (a11, a12, a21, a22). State layout: ``y[4 d + 2 i + j]`` holds entry
(i, j) of the d-th s-derivative of Y, d = 0, 1, 2.
"""

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dop

N_STAGES = _dop.N_STAGES
RK_A = np.ascontiguousarray(_dop.A[:N_STAGES, :N_STAGES])
RK_B = np.ascontiguousarray(_dop.B)
RK_C = np.ascontiguousarray(_dop.C[:N_STAGES])
RK_E3 = np.ascontiguousarray(_dop.E3)
RK_E5 = np.ascontiguousarray(_dop.E5)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 6.0
ALPHA = 1.0 / 8.0 - 0.75 * 0.04
BETA = 0.04
H_MIN = 1e-13


@njit(cache=True, nogil=True)
def _coeff_matrix(t, cos_tab, sin_tab, out):
    K = sin_tab.shape[1]
    for e in range(4):
        out[e] = cos_tab[e, 0]
    if K == 0:
        return
    c1 = np.cos(2.0 * np.pi * t)
    s1 = np.sin(2.0 * np.pi * t)
    cj = c1
    sj = s1
    for j in range(1, K + 1):
        for e in range(4):
            out[e] += cos_tab[e, j] * cj + sin_tab[e, j - 1] * sj
        cj, sj = cj * c1 - sj * s1, sj * c1 + cj * s1


@njit(cache=True, nogil=True)
def _rhs(t, y, nvar, s, cos_tab, sin_tab, B, a, dy):
    _coeff_matrix(t, cos_tab, sin_tab, a)
    a11 = a[0] + s * B[0, 0]
    a12 = a[1] + s * B[0, 1]
    a21 = a[2] + s * B[1, 0]
    a22 = a[3] + s * B[1, 1]
    nd = nvar // 4
    for d in range(nd):
        o = 4 * d
        for j in range(2):
            y1 = y[o + j]
            y2 = y[o + 2 + j]
            f1 = a11 * y1 + a12 * y2
            f2 = a21 * y1 + a22 * y2
            if d > 0:
                p = o - 4
                w = float(d)  # d/ds of B Y^{(d-1)} terms: 1 * B Y' , 2 * B Y''
                f1 += w * (B[0, 0] * y[p + j] + B[0, 1] * y[p + 2 + j])
                f2 += w * (B[1, 0] * y[p + j] + B[1, 1] * y[p + 2 + j])
            dy[o + j] = f1
            dy[o + 2 + j] = f2


@njit(cache=True, nogil=True)
def integrate(cos_tab, sin_tab, B, s, order, tol, h_init):
    """Integrate from t = 0 to t = 1 with Y(0) = I and zero derivative data.

    Returns (y, err, nsteps, status, t_fail). ``err[d]`` accumulates the
    absolute local error estimates of the d-th derivative block; ``status``
    is 0 on success and 1 on step-size underflow at ``t_fail``.
    """
    nvar = 4 * (order + 1)
    y = np.zeros(nvar)
    y[0] = 1.0
    y[3] = 1.0
    K = np.zeros((N_STAGES + 1, nvar))
    a = np.zeros(4)
    dy = np.zeros(nvar)
    ytmp = np.zeros(nvar)
    ynew = np.zeros(nvar)
    err = np.zeros(3)
    e5 = np.zeros(nvar)
    e3 = np.zeros(nvar)

    t = 0.0
    h = h_init
    err_prev = 1e-4
    nsteps = 0
    _rhs(t, y, nvar, s, cos_tab, sin_tab, B, a, dy)
    for i in range(nvar):
        K[0, i] = dy[i]
    while t < 1.0:
        if h < H_MIN:
            return y, err, nsteps, 1, t
        last = False
        if t + h >= 1.0:
            h = 1.0 - t
            last = True
        for st in range(1, N_STAGES):
            for i in range(nvar):
                acc = 0.0
                for r in range(st):
                    acc += RK_A[st, r] * K[r, i]
                ytmp[i] = y[i] + h * acc
            _rhs(t + RK_C[st] * h, ytmp, nvar, s, cos_tab, sin_tab, B, a, dy)
            for i in range(nvar):
                K[st, i] = dy[i]
        for i in range(nvar):
            acc = 0.0
            for r in range(N_STAGES):
                acc += RK_B[r] * K[r, i]
            ynew[i] = y[i] + h * acc
        _rhs(t + h, ynew, nvar, s, cos_tab, sin_tab, B, a, dy)
        for i in range(nvar):
            K[N_STAGES, i] = dy[i]

        n5 = 0.0
        n3 = 0.0
        for i in range(nvar):
            acc5 = 0.0
            acc3 = 0.0
            for r in range(N_STAGES + 1):
                acc5 += RK_E5[r] * K[r, i]
                acc3 += RK_E3[r] * K[r, i]
            sc = tol + tol * max(abs(y[i]), abs(ynew[i]))
            e5[i] = acc5
            e3[i] = acc3
            n5 += (acc5 / sc) ** 2
            n3 += (acc3 / sc) ** 2
        if n5 == 0.0 and n3 == 0.0:
            enorm = 0.0
        else:
            enorm = h * n5 / np.sqrt((n5 + 0.01 * n3) * nvar)

        if enorm < 1.0:
            # absolute local error per derivative block
            if n5 > 0.0:
                corr = h / np.sqrt(1.0 + 0.01 * n3 / n5)
            else:
                corr = 0.0
            for d in range(order + 1):
                m = 0.0
                for i in range(4 * d, 4 * d + 4):
                    v = abs(e5[i]) * corr
                    if v > m:
                        m = v
                err[d] += m
            t = 1.0 if last else t + h
            for i in range(nvar):
                y[i] = ynew[i]
                K[0, i] = K[N_STAGES, i]
            nsteps += 1
            if enorm == 0.0:
                fac = MAX_FACTOR
            else:
                fac = SAFETY * enorm ** (-ALPHA) * err_prev ** BETA
                fac = min(MAX_FACTOR, max(MIN_FACTOR, fac))
            err_prev = max(enorm, 1e-4)
            h = h * fac
        else:
            fac = max(MIN_FACTOR, SAFETY * enorm ** (-1.0 / 8.0))
            h = h * fac
    return y, err, nsteps, 0, t
