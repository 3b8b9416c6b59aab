"""Reflection and transmission amplitudes of the dressed channels.

Channel (n, +) sees the barrier kappa_n^2 u(z) and channel (n, -) the well
-kappa_n^2 u(z), with kappa_n^2 = sqrt(n + 1) in units of kappa^2.  With
positions in units of 1/kappa the stationary equation reads

    psi'' + (k^2 -+ sqrt(n + 1) u(z)) psi = 0,

and the amplitudes follow the asymptotic convention

    psi = e^{ikz} + r e^{-ikz}   (z < 0),      psi = t e^{ik(z - L)}   (z > L),

so that a vanishing potential gives r = 0, t = e^{ikL}.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel, _kernels
from .errors import NumericalFailure, ValidationError
from .profiles import ModeProfile, sample_slices

BRANCHES = ("+", "-")

# added to the Richardson difference; covers rounding in long slice products
ERROR_FLOOR = 1e-12


@dataclass(frozen=True)
class Channel:
    n: int
    branch: str

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValidationError(f"photon index must be a non-negative integer, got {self.n}")
        if self.branch not in BRANCHES:
            raise ValidationError(f"branch must be '+' or '-', got {self.branch!r}")

    @property
    def sign(self) -> int:
        """+1 for the barrier branch, -1 for the well."""
        return 1 if self.branch == "+" else -1

    @property
    def strength(self) -> float:
        """kappa_n^2 / kappa^2."""
        return math.sqrt(self.n + 1)


@dataclass(frozen=True)
class Amplitudes:
    r: complex
    t: complex
    k: float
    channel: Channel
    error: float = 0.0


@dataclass(frozen=True)
class SolverConfig:
    segments: int = 4096
    support_epsilon: float = 1e-10
    unitarity_tol: float = 1e-6
    max_doublings: int = 3

    def __post_init__(self):
        if int(self.segments) != self.segments or self.segments < 2:
            raise ValidationError(f"segments must be an integer >= 2, got {self.segments}")
        for name in ("support_epsilon", "unitarity_tol"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise ValidationError(f"{name} must lie in (0, 1), got {val}")
        if self.max_doublings < 0:
            raise ValidationError("max_doublings must be >= 0")


DEFAULT_CONFIG = SolverConfig()


def kappa_n_ratio(n: int) -> float:
    """kappa_n / kappa = (n + 1)^(1/4)."""
    if n < 0:
        raise ValidationError(f"photon index must be >= 0, got {n}")
    return (n + 1) ** 0.25


def unitarity_defect(a: Amplitudes) -> float:
    return abs(abs(a.r) ** 2 + abs(a.t) ** 2 - 1.0)


def _check_k(k):
    if not (k > 0 and math.isfinite(k)):
        raise ValidationError(f"k/kappa must be positive and finite, got {k}")


def square_slab(k: float, Q: float, L: float):
    """(r, t) for a constant q^2 = Q on [0, L] and q^2 = k^2 outside.

    r = (k^2 - Q) s / D,  t = 2ik / D,  D = 2ik c + (k^2 + Q) s,
    with c = cos(qL), s = sin(qL)/q.  For Q < 0 both c and s are divided by
    e^{pL} (p^2 = -Q), which keeps deep barriers finite.
    """
    c, s, g = _kernels.slice_factors(float(Q), float(L))
    D = 2j * k * c + (k * k + Q) * s
    r = (k * k - Q) * s / D
    t = 2j * k * math.exp(-g) / D
    return complex(r), complex(t)


def scatter_mesa_analytic(channel: Channel, k: float, kappa_L: float) -> Amplitudes:
    """Closed-form amplitudes for the top-hat mode u = 1 on [0, L]."""
    _check_k(k)
    if not (kappa_L > 0 and math.isfinite(kappa_L)):
        raise ValidationError(f"kappa_L must be positive and finite, got {kappa_L}")
    Q = k * k - channel.sign * channel.strength
    r, t = square_slab(k, Q, kappa_L)
    return Amplitudes(r, t, float(k), channel)


def _propagate(Q, h, k):
    if _accel.USE_NUMBA:
        return _kernels.propagate_loop(Q, h, k)
    return _kernels.propagate_tree(Q, h, k)


def _raw_transfer(profile, channel, k, segments, epsilon):
    z_a, z_b, h, u = sample_slices(profile, segments, epsilon)
    Q = k * k - channel.sign * channel.strength * u
    v0, v1, logscale = _propagate(Q, h, k)
    # left edge: psi = A e^{ikz} + B e^{-ikz}
    A = cmath.exp(-1j * k * z_a) * 0.5 * (v0 + v1 / (1j * k))
    B = cmath.exp(1j * k * z_a) * 0.5 * (v0 - v1 / (1j * k))
    r = B / A
    t = cmath.exp(1j * k * (profile.kappa_L - z_b)) / A * math.exp(-logscale)
    return r, t


def scatter_transfer_matrix(profile: ModeProfile, channel: Channel, k: float,
                            config: SolverConfig = DEFAULT_CONFIG) -> Amplitudes:
    """Amplitudes from slicing the effective support into piecewise-constant pieces.

    Runs with ``segments`` and ``2 * segments`` slices and returns the
    Richardson combination (4 a_2N - a_N) / 3 (the slicing error is O(h^2)).
    ``error`` holds the raw difference between the two resolutions plus a
    rounding floor.  If the flux defect exceeds ``unitarity_tol`` the
    resolution is doubled again, up to ``max_doublings`` times.
    """
    _check_k(k)
    n_seg = config.segments
    coarse = _raw_transfer(profile, channel, k, n_seg, config.support_epsilon)
    defect = float("nan")
    for _ in range(config.max_doublings + 1):
        fine = _raw_transfer(profile, channel, k, 2 * n_seg, config.support_epsilon)
        r = (4.0 * fine[0] - coarse[0]) / 3.0
        t = (4.0 * fine[1] - coarse[1]) / 3.0
        err = max(abs(fine[0] - coarse[0]), abs(fine[1] - coarse[1])) + ERROR_FLOOR
        amp = Amplitudes(complex(r), complex(t), float(k), channel, err)
        defect = unitarity_defect(amp)
        if defect <= config.unitarity_tol:
            return amp
        coarse = fine
        n_seg *= 2
    raise NumericalFailure(
        f"flux defect {defect:.3e} exceeds {config.unitarity_tol:g} for channel "
        f"({channel.n}, {channel.branch}) at k/kappa={k}", defect)


@lru_cache(maxsize=1 << 17)
def _scatter_cached(profile, channel, k, config):
    if profile.kind == "mesa":
        return scatter_mesa_analytic(channel, k, profile.kappa_L)
    return scatter_transfer_matrix(profile, channel, k, config)


def scatter(profile: ModeProfile, channel: Channel, k: float,
            config: SolverConfig = DEFAULT_CONFIG) -> Amplitudes:
    """Analytic path for the mesa mode, transfer matrices for everything else.

    Results are memoised on (profile, channel, k, config); all four are
    immutable.
    """
    _check_k(k)
    return _scatter_cached(profile, channel, float(k), config)


def clear_cache():
    _scatter_cached.cache_clear()
    sample_slices.cache_clear()


def amplitude_table(profile: ModeProfile, n_max: int, k_list,
                    config: SolverConfig = DEFAULT_CONFIG) -> dict:
    """All channels n = 0..n_max, both branches, every k.

    Keys are ``(n, branch, k)``; insertion order is n ascending, '+' before
    '-', then k ascending.
    """
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    ks = sorted(float(k) for k in k_list)
    if not ks:
        raise ValidationError("k_list must not be empty")
    for k in ks:
        _check_k(k)
    table = {}
    for n in range(n_max + 1):
        for branch in BRANCHES:
            ch = Channel(n, branch)
            for k in ks:
                try:
                    table[(n, branch, k)] = scatter(profile, ch, k, config)
                except NumericalFailure as exc:
                    raise NumericalFailure(f"channel ({n}, {branch}), k/kappa={k}: {exc}",
                                           exc.defect) from exc
    return table


def table_rows(table: dict):
    """Rows (n, branch, k, re_r, im_r, re_t, im_t, defect) in table order."""
    return [(n, b, k, a.r.real, a.r.imag, a.t.real, a.t.imag, unitarity_defect(a))
            for (n, b, k), a in table.items()]


def kernel_backends():
    """Names of the propagation kernels usable in this process."""
    return ("numba", "numpy") if _accel.NUMBA_AVAILABLE else ("numpy",)


def propagate_with(backend: str, Q, h, k):
    """Run one kernel explicitly; used by the benchmark and cross-checks."""
    Q = np.ascontiguousarray(Q, dtype=float)
    if backend == "numba":
        return _kernels.propagate_loop(Q, h, k)
    if backend == "numpy":
        return _kernels.propagate_tree(Q, h, k)
    raise ValidationError(f"unknown backend {backend!r}")
