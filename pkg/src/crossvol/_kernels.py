"""Numerical kernels for the bivariate BEKK(1,1) recursion.

Hot loops are JIT-compiled when numba is available and fall back to pure
Python otherwise; both paths run the identical code. Conditional
covariances use symmetric storage (h11, h12, h22) and the variance
recursions are written in expanded scalar form, term by term, so the
downstream variance decomposition sums to these elements exactly.

Parameter vector layout (13 free parameters):

    theta = [mu1, mu2, c11, c21, c22, a11, a21, a12, a22, b11, b21, b12, b22]

with matrices

    C = [[c11, 0], [c21, c22]]   (intercept factor, Omega = C C')
    A = [[a11, a12], [a21, a22]] (shock loadings, sandwich A' ee' A)
    B = [[b11, b12], [b21, b22]] (persistence, sandwich B' H B)

The likelihood gradient is analytic: per-parameter sensitivities of the
(h11, h12, h22) state are propagated through the recursion alongside the
state itself.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrapper(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrapper


_LN_2PI = math.log(2.0 * math.pi)


@njit(cache=True)
def bekk_filter(theta, e, h0):
    """Filtered conditional covariances, (T, 3) rows of (h11, h12, h22).

    Row 0 is the given initial condition; row t for t >= 1 applies the
    recursion to the centered residual at t-1 and the previous covariance.
    """
    mu1, mu2 = theta[0], theta[1]
    c11, c21, c22 = theta[2], theta[3], theta[4]
    a11, a21, a12, a22 = theta[5], theta[6], theta[7], theta[8]
    b11, b21, b12, b22 = theta[9], theta[10], theta[11], theta[12]
    t_len = e.shape[0]
    h = np.empty((t_len, 3))
    h[0, 0] = h0[0]
    h[0, 1] = h0[1]
    h[0, 2] = h0[2]
    for t in range(1, t_len):
        u = e[t - 1, 0] - mu1
        v = e[t - 1, 1] - mu2
        p11 = h[t - 1, 0]
        p12 = h[t - 1, 1]
        p22 = h[t - 1, 2]
        h[t, 0] = (
            c11 * c11
            + a11 * a11 * u * u
            + 2.0 * a11 * a21 * u * v
            + a21 * a21 * v * v
            + b11 * b11 * p11
            + 2.0 * b11 * b21 * p12
            + b21 * b21 * p22
        )
        h[t, 1] = (
            c11 * c21
            + a11 * a12 * u * u
            + (a11 * a22 + a12 * a21) * u * v
            + a21 * a22 * v * v
            + b11 * b12 * p11
            + (b11 * b22 + b12 * b21) * p12
            + b21 * b22 * p22
        )
        h[t, 2] = (
            c21 * c21
            + c22 * c22
            + a12 * a12 * u * u
            + 2.0 * a12 * a22 * u * v
            + a22 * a22 * v * v
            + b12 * b12 * p11
            + 2.0 * b12 * b22 * p12
            + b22 * b22 * p22
        )
    return h


@njit(cache=True)
def bekk_loglik(theta, e, h0):
    """Gaussian log-likelihood of the residual panel under the recursion.

    Returns NaN when a conditional covariance turns singular; callers
    translate that into an error or an optimizer penalty.
    """
    mu1, mu2 = theta[0], theta[1]
    c11, c21, c22 = theta[2], theta[3], theta[4]
    a11, a21, a12, a22 = theta[5], theta[6], theta[7], theta[8]
    b11, b21, b12, b22 = theta[9], theta[10], theta[11], theta[12]
    t_len = e.shape[0]
    h11, h12, h22 = h0[0], h0[1], h0[2]
    f = 0.0
    for t in range(t_len):
        det = h11 * h22 - h12 * h12
        if not (det > 1e-300) or h11 <= 0.0 or not np.isfinite(det):
            return np.nan
        eps1 = e[t, 0] - mu1
        eps2 = e[t, 1] - mu2
        quad = (h22 * eps1 * eps1 - 2.0 * h12 * eps1 * eps2 + h11 * eps2 * eps2) / det
        f += -_LN_2PI - 0.5 * math.log(det) - 0.5 * quad
        if t < t_len - 1:
            u, v = eps1, eps2
            p11, p12, p22 = h11, h12, h22
            h11 = (
                c11 * c11
                + a11 * a11 * u * u
                + 2.0 * a11 * a21 * u * v
                + a21 * a21 * v * v
                + b11 * b11 * p11
                + 2.0 * b11 * b21 * p12
                + b21 * b21 * p22
            )
            h12 = (
                c11 * c21
                + a11 * a12 * u * u
                + (a11 * a22 + a12 * a21) * u * v
                + a21 * a22 * v * v
                + b11 * b12 * p11
                + (b11 * b22 + b12 * b21) * p12
                + b21 * b22 * p22
            )
            h22 = (
                c21 * c21
                + c22 * c22
                + a12 * a12 * u * u
                + 2.0 * a12 * a22 * u * v
                + a22 * a22 * v * v
                + b12 * b12 * p11
                + 2.0 * b12 * b22 * p12
                + b22 * b22 * p22
            )
    return f


@njit(cache=True)
def bekk_loglik_grad(theta, e, h0):
    """Log-likelihood and its analytic 13-vector gradient.

    Forward sensitivities: dh holds d(h11, h12, h22)/d(theta_k) and is
    pushed through the recursion with the state. The mu parameters also
    enter each date's density directly through the centered residual.
    """
    mu1, mu2 = theta[0], theta[1]
    c11, c21, c22 = theta[2], theta[3], theta[4]
    a11, a21, a12, a22 = theta[5], theta[6], theta[7], theta[8]
    b11, b21, b12, b22 = theta[9], theta[10], theta[11], theta[12]
    t_len = e.shape[0]
    h11, h12, h22 = h0[0], h0[1], h0[2]
    dh = np.zeros((13, 3))
    grad = np.zeros(13)
    f = 0.0
    bb11 = b11 * b11
    bb12 = b11 * b12
    bb21 = 2.0 * b11 * b21
    bbmid = b11 * b22 + b12 * b21
    bb1222 = 2.0 * b12 * b22
    bbsq12 = b12 * b12
    bb2122 = b21 * b22
    bbsq21 = b21 * b21
    bb22 = b22 * b22
    for t in range(t_len):
        det = h11 * h22 - h12 * h12
        if not (det > 1e-300) or h11 <= 0.0 or not np.isfinite(det):
            return np.nan, grad
        eps1 = e[t, 0] - mu1
        eps2 = e[t, 1] - mu2
        q11 = h22 / det
        q12 = -h12 / det
        q22 = h11 / det
        m1 = q11 * eps1 + q12 * eps2
        m2 = q12 * eps1 + q22 * eps2
        f += -_LN_2PI - 0.5 * math.log(det) - 0.5 * (eps1 * m1 + eps2 * m2)
        for k in range(13):
            d0 = dh[k, 0]
            d1 = dh[k, 1]
            d2 = dh[k, 2]
            trace = q11 * d0 + 2.0 * q12 * d1 + q22 * d2
            mdm = d0 * m1 * m1 + 2.0 * d1 * m1 * m2 + d2 * m2 * m2
            grad[k] += 0.5 * (mdm - trace)
        grad[0] += m1
        grad[1] += m2
        if t < t_len - 1:
            u, v = eps1, eps2
            w1 = a11 * u + a21 * v
            w2 = a12 * u + a22 * v
            # propagate yesterday's sensitivities through the B sandwich
            for k in range(13):
                x0 = dh[k, 0]
                x1 = dh[k, 1]
                x2 = dh[k, 2]
                dh[k, 0] = bb11 * x0 + bb21 * x1 + bbsq21 * x2
                dh[k, 1] = bb12 * x0 + bbmid * x1 + bb2122 * x2
                dh[k, 2] = bbsq12 * x0 + bb1222 * x1 + bb22 * x2
            # direct terms: mu enters the shock through the centering
            dh[0, 0] += -2.0 * a11 * w1
            dh[0, 1] += -(a11 * w2 + a12 * w1)
            dh[0, 2] += -2.0 * a12 * w2
            dh[1, 0] += -2.0 * a21 * w1
            dh[1, 1] += -(a21 * w2 + a22 * w1)
            dh[1, 2] += -2.0 * a22 * w2
            # intercept factor
            dh[2, 0] += 2.0 * c11
            dh[2, 1] += c21
            dh[3, 1] += c11
            dh[3, 2] += 2.0 * c21
            dh[4, 2] += 2.0 * c22
            # shock loadings
            dh[5, 0] += 2.0 * u * w1
            dh[5, 1] += u * w2
            dh[6, 0] += 2.0 * v * w1
            dh[6, 1] += v * w2
            dh[7, 1] += u * w1
            dh[7, 2] += 2.0 * u * w2
            dh[8, 1] += v * w1
            dh[8, 2] += 2.0 * v * w2
            # persistence: columns of B' H applied to the previous state
            g1c1 = b11 * h11 + b21 * h12
            g2c1 = b12 * h11 + b22 * h12
            g1c2 = b11 * h12 + b21 * h22
            g2c2 = b12 * h12 + b22 * h22
            dh[9, 0] += 2.0 * g1c1
            dh[9, 1] += g2c1
            dh[10, 0] += 2.0 * g1c2
            dh[10, 1] += g2c2
            dh[11, 1] += g1c1
            dh[11, 2] += 2.0 * g2c1
            dh[12, 1] += g1c2
            dh[12, 2] += 2.0 * g2c2
            p11, p12, p22 = h11, h12, h22
            h11 = (
                c11 * c11
                + a11 * a11 * u * u
                + 2.0 * a11 * a21 * u * v
                + a21 * a21 * v * v
                + b11 * b11 * p11
                + 2.0 * b11 * b21 * p12
                + b21 * b21 * p22
            )
            h12 = (
                c11 * c21
                + a11 * a12 * u * u
                + (a11 * a22 + a12 * a21) * u * v
                + a21 * a22 * v * v
                + b11 * b12 * p11
                + (b11 * b22 + b12 * b21) * p12
                + b21 * b22 * p22
            )
            h22 = (
                c21 * c21
                + c22 * c22
                + a12 * a12 * u * u
                + 2.0 * a12 * a22 * u * v
                + a22 * a22 * v * v
                + b12 * b12 * p11
                + 2.0 * b12 * b22 * p12
                + b22 * b22 * p22
            )
    return f, grad


@njit(cache=True)
def bekk_simulate(theta, z, h0):
    """Draw a residual panel from the recursion given standard-normal
    innovations z (T, 2). Returns (e, ok); ok flips to False if a variance
    exceeds 1e12 (runaway path) or degenerates to zero."""
    mu1, mu2 = theta[0], theta[1]
    c11, c21, c22 = theta[2], theta[3], theta[4]
    a11, a21, a12, a22 = theta[5], theta[6], theta[7], theta[8]
    b11, b21, b12, b22 = theta[9], theta[10], theta[11], theta[12]
    t_len = z.shape[0]
    e = np.zeros((t_len, 2))
    h11, h12, h22 = h0[0], h0[1], h0[2]
    for t in range(t_len):
        if h11 > 1e12 or h22 > 1e12 or h11 <= 0.0:
            return e, False
        l11 = math.sqrt(h11)
        l21 = h12 / l11
        arg = h22 - l21 * l21
        if arg < 0.0:
            arg = 0.0
        l22 = math.sqrt(arg)
        e[t, 0] = mu1 + l11 * z[t, 0]
        e[t, 1] = mu2 + l21 * z[t, 0] + l22 * z[t, 1]
        u = e[t, 0] - mu1
        v = e[t, 1] - mu2
        p11, p12, p22 = h11, h12, h22
        h11 = (
            c11 * c11
            + a11 * a11 * u * u
            + 2.0 * a11 * a21 * u * v
            + a21 * a21 * v * v
            + b11 * b11 * p11
            + 2.0 * b11 * b21 * p12
            + b21 * b21 * p22
        )
        h12 = (
            c11 * c21
            + a11 * a12 * u * u
            + (a11 * a22 + a12 * a21) * u * v
            + a21 * a22 * v * v
            + b11 * b12 * p11
            + (b11 * b22 + b12 * b21) * p12
            + b21 * b22 * p22
        )
        h22 = (
            c21 * c21
            + c22 * c22
            + a12 * a12 * u * u
            + 2.0 * a12 * a22 * u * v
            + a22 * a22 * v * v
            + b12 * b12 * p11
            + 2.0 * b12 * b22 * p12
            + b22 * b22 * p22
        )
    return e, True
