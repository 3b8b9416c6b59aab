"""Transfer-matrix kernels for piecewise-constant channel potentials.

Both kernels integrate psi'' + Q(z) psi = 0 backwards, from the right edge of
the support where the state is the outgoing wave (psi, psi') = (1, ik), to the
left edge.  Q is constant on each slice of width h, so each step is the exact
(psi, psi') propagator

    [[ c, -s ], [ Q s, c ]],   c = cos(qh), s = sin(qh)/q,   q^2 = Q

(cosh/sinh for Q < 0).  Evanescent slices are propagated with the e^{ph}
growth factored out and accumulated in a log-scale, so no intermediate
quantity overflows.  The kernels return the left-edge vector together with
that log-scale; the true vector is ``v * exp(logscale)``.

``propagate_loop`` is a sequential loop compiled with numba; ``propagate_tree``
is the pure-numpy fallback built on pairwise (log2 N deep) matrix products.
"""
import numpy as np

from ._accel import njit

# |Q| h^2 below this uses the Taylor form of cos/sin(qh)/q (|q| h < 1e-4)
SERIES_CUTOFF = 1e-8
_RENORM = 1e100


@njit(cache=True)
def slice_factors(Q, h):
    """(c, s, log_growth) for one slice; the true c, s are scaled by exp(log_growth)."""
    x2 = Q * h * h
    if abs(x2) < SERIES_CUTOFF:
        c = 1.0 - 0.5 * x2 + x2 * x2 / 24.0
        s = h * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
        return c, s, 0.0
    if Q > 0.0:
        q = np.sqrt(Q)
        return np.cos(q * h), np.sin(q * h) / q, 0.0
    p = np.sqrt(-Q)
    x = p * h
    e = np.exp(-2.0 * x)
    return 0.5 * (1.0 + e), -0.5 * np.expm1(-2.0 * x) / p, x


@njit(cache=True)
def propagate_loop(Q, h, k):
    v0 = 1.0 + 0.0j
    v1 = 1j * k
    logscale = 0.0
    for j in range(Q.shape[0] - 1, -1, -1):
        c, s, g = slice_factors(Q[j], h)
        w0 = c * v0 - s * v1
        w1 = Q[j] * s * v0 + c * v1
        v0 = w0
        v1 = w1
        logscale += g
        m = max(abs(v0), abs(v1))
        if m > _RENORM:
            v0 /= m
            v1 /= m
            logscale += np.log(m)
    return v0, v1, logscale


def _slice_factors_vec(Q, h):
    Q = np.asarray(Q, dtype=float)
    x2 = Q * h * h
    c = np.empty_like(Q)
    s = np.empty_like(Q)
    g = np.zeros_like(Q)

    ser = np.abs(x2) < SERIES_CUTOFF
    osc = ~ser & (Q > 0)
    eva = ~ser & (Q < 0)

    xs = x2[ser]
    c[ser] = 1.0 - 0.5 * xs + xs * xs / 24.0
    s[ser] = h * (1.0 - xs / 6.0 + xs * xs / 120.0)

    q = np.sqrt(Q[osc])
    c[osc] = np.cos(q * h)
    s[osc] = np.sin(q * h) / q

    p = np.sqrt(-Q[eva])
    x = p * h
    c[eva] = 0.5 * (1.0 + np.exp(-2.0 * x))
    s[eva] = -0.5 * np.expm1(-2.0 * x) / p
    g[eva] = x
    return c, s, g


def propagate_tree(Q, h, k):
    Q = np.asarray(Q, dtype=float)
    c, s, g = _slice_factors_vec(Q, h)
    mats = np.empty((Q.size, 2, 2))
    mats[:, 0, 0] = c
    mats[:, 0, 1] = -s
    mats[:, 1, 0] = Q * s
    mats[:, 1, 1] = c
    logs = g.copy()
    # ordered product P_0 P_1 ... P_{N-1}, leftmost slice first
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, np.eye(2)[None]], axis=0)
            logs = np.append(logs, 0.0)
        mats = mats[0::2] @ mats[1::2]
        logs = logs[0::2] + logs[1::2]
        norm = np.abs(mats).max(axis=(1, 2))
        mats /= norm[:, None, None]
        logs += np.log(norm)
    v = mats[0] @ np.array([1.0 + 0.0j, 1j * k])
    return complex(v[0]), complex(v[1]), float(logs[0])
