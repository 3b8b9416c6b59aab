"""Populations, photon statistics and reflection/transmission probabilities.

Everything here combines dressed-state coordinates with channel amplitudes:

    K_n      = r+_n conj(r-_n) + t+_n conj(t-_n)
    Delta_n  = (w_n^2 / 2) sin(theta_n) [Re(e^{i phi_n} K_n) - cos(phi_n)]
    dsigma_aa = sum_n Delta_n,     dP_0 = Delta_0,     dP_n = Delta_n - Delta_{n-1}
    R = sum_n w_n^2 (cos^2(theta_n/2) |r+_n|^2 + sin^2(theta_n/2) |r-_n|^2)
    T = sum_n w_n^2 (cos^2(theta_n/2) |t+_n|^2 + sin^2(theta_n/2) |t-_n|^2) + w_{-1}^2
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import scattering
from .dressed import (DressedCoordinates, PureState, TrappingParam, half_angle_weights,
                      sin_theta, to_dressed_coordinates, trapping_state)
from .errors import ValidationError
from .profiles import ModeProfile
from .scattering import Amplitudes, Channel, SolverConfig

OCCUPIED_THRESHOLD = 1e-14
DEFAULT_EPSILON_TAIL = 1e-12


def kernel_K(a_plus: Amplitudes, a_minus: Amplitudes) -> complex:
    if a_plus.channel.n != a_minus.channel.n or a_plus.k != a_minus.k:
        raise ValidationError("K_n needs the two branches of one channel at one k")
    if (a_plus.channel.branch, a_minus.channel.branch) != ("+", "-"):
        raise ValidationError("kernel_K expects the '+' amplitudes first, then '-'")
    return a_plus.r * a_minus.r.conjugate() + a_plus.t * a_minus.t.conjugate()


def delta_n(entry, K: complex) -> float:
    """Delta_n for one coordinate entry (w, theta, chi, phi)."""
    w, theta, _chi, phi = entry
    st = float(sin_theta(theta))
    if st == 0.0:
        return 0.0
    return 0.5 * w * w * st * ((np.exp(1j * phi) * K).real - math.cos(phi))


def sigma_aa_initial(coords: DressedCoordinates) -> float:
    s = float(np.sum(coords.w ** 2 * sin_theta(coords.theta) * np.cos(coords.phi)))
    return 0.5 * (1.0 - coords.w_minus1 ** 2 + s)


def _deltas(coords, K_map, upto):
    out = np.zeros(upto + 1)
    for n in range(upto + 1):
        entry = coords.entry(n)
        if entry[0] <= OCCUPIED_THRESHOLD:
            continue
        if n not in K_map:
            raise ValidationError(f"K_n missing for occupied level n={n}")
        out[n] = delta_n(entry, K_map[n])
    return out


def delta_sigma_aa(coords: DressedCoordinates, K_map: dict) -> float:
    return float(np.sum(_deltas(coords, K_map, coords.n_max)))


def delta_P(coords: DressedCoordinates, K_map: dict, n: int) -> float:
    if n < 0:
        raise ValidationError("photon index must be >= 0")
    d = _deltas(coords, K_map, n)
    return float(d[n] - d[n - 1]) if n >= 1 else float(d[0])


def _lookup(table, n, branch, k):
    key = (n, branch) if k is None else (n, branch, k)
    try:
        return table[key]
    except KeyError:
        raise ValidationError(f"amplitudes missing for channel ({n}, {branch})"
                              + ("" if k is None else f" at k/kappa={k}")) from None


def _single_k(table):
    ks = {key[2] for key in table if len(key) == 3}
    if len(ks) > 1:
        raise ValidationError("amplitude table holds several k values; pass k explicitly")
    return ks.pop() if ks else None


def reflection_transmission(coords: DressedCoordinates, table: dict, k: Optional[float] = None):
    """(R, T) for one incident wave number.

    ``table`` maps ``(n, branch)`` or ``(n, branch, k)`` to ``Amplitudes``.
    Only channels with weight above ``OCCUPIED_THRESHOLD`` are looked up.
    """
    if k is None:
        k = _single_k(table)
    cos2, sin2 = half_angle_weights(coords.theta)
    R = T = 0.0
    for n in range(coords.n_max + 1):
        if coords.w[n] <= OCCUPIED_THRESHOLD:
            continue
        w2 = coords.w[n] ** 2
        if cos2[n] != 0.0:
            a = _lookup(table, n, "+", k)
            R += w2 * cos2[n] * abs(a.r) ** 2
            T += w2 * cos2[n] * abs(a.t) ** 2
        if sin2[n] != 0.0:
            a = _lookup(table, n, "-", k)
            R += w2 * sin2[n] * abs(a.r) ** 2
            T += w2 * sin2[n] * abs(a.t) ** 2
    return R, T + coords.w_minus1 ** 2


def trapping_RT(p: TrappingParam, profile: ModeProfile, k: float,
                config: SolverConfig = scattering.DEFAULT_CONFIG,
                epsilon_tail: float = DEFAULT_EPSILON_TAIL):
    """(R, T) of |gamma+->; only the matching branch is ever solved."""
    coords = trapping_state(p, epsilon_tail)
    top = coords.occupied_max(OCCUPIED_THRESHOLD)
    table = {(n, p.branch): scattering.scatter(profile, Channel(n, p.branch), k, config)
             for n in range(top + 1)}
    return reflection_transmission(coords, table)


def ultracold_RT_plus(gamma_abs: float):
    """Totally reflecting barriers: R = 2g^2/(1+g^2), T = (1-g^2)/(1+g^2)."""
    if not 0 <= gamma_abs < 1:
        raise ValidationError(f"gamma_abs must lie in [0, 1), got {gamma_abs}")
    g2 = gamma_abs * gamma_abs
    return 2.0 * g2 / (1.0 + g2), (1.0 - g2) / (1.0 + g2)


# ---------------------------------------------------------------- wave packets

@dataclass(frozen=True)
class WavePacketSpec:
    """Incident momentum distribution |A(k)|^2.

    kind is ``"delta"`` (k0), ``"gaussian"`` (k0, sigma_k) or ``"tabulated"``
    (``table`` of (k, weight) pairs, ascending k).
    """

    kind: str
    k0: Optional[float] = None
    sigma_k: Optional[float] = None
    table: tuple = field(default=())
    nodes: int = 64
    window: float = 6.0

    def __post_init__(self):
        if self.kind == "delta":
            _positive(self.k0, "k0")
        elif self.kind == "gaussian":
            _positive(self.k0, "k0")
            _positive(self.sigma_k, "sigma_k")
            if self.nodes < 2:
                raise ValidationError("quadrature needs at least 2 nodes")
        elif self.kind == "tabulated":
            if len(self.table) < 1:
                raise ValidationError("tabulated packet needs at least one point")
            ks = [k for k, _ in self.table]
            ws = [w for _, w in self.table]
            for k in ks:
                _positive(k, "k")
            if any(w < 0 for w in ws) or sum(ws) <= 0:
                raise ValidationError("tabulated weights must be non-negative and not all zero")
            if any(b <= a for a, b in zip(ks, ks[1:])):
                raise ValidationError("tabulated k values must be strictly ascending")
        else:
            raise ValidationError(f"unknown wave-packet kind {self.kind!r}")

    def describe(self) -> dict:
        if self.kind == "delta":
            return {"kind": "delta", "k0": self.k0}
        if self.kind == "gaussian":
            return {"kind": "gaussian", "k0": self.k0, "sigma_k": self.sigma_k}
        return {"kind": "tabulated", "table": [list(p) for p in self.table]}


def _positive(x, name):
    if x is None or not (x > 0 and math.isfinite(x)):
        raise ValidationError(f"{name} must be positive and finite, got {x}")


def quadrature(spec: WavePacketSpec):
    """Nodes and normalised weights (ascending k) for ``spec``."""
    if spec.kind == "delta":
        return np.array([float(spec.k0)]), np.array([1.0])
    if spec.kind == "tabulated":
        k = np.array([p[0] for p in spec.table], dtype=float)
        a2 = np.array([p[1] for p in spec.table], dtype=float)
        if k.size == 1:
            return k, np.array([1.0])
        dk = np.diff(k)
        w = np.zeros_like(k)
        w[:-1] += 0.5 * dk
        w[1:] += 0.5 * dk
        w = w * a2
        return k, w / w.sum()
    lo = max(spec.k0 - spec.window * spec.sigma_k, 0.0)
    hi = spec.k0 + spec.window * spec.sigma_k
    x, gw = np.polynomial.legendre.leggauss(spec.nodes)
    k = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    if np.any(k <= 0):
        raise ValidationError("wave-packet quadrature produced a node with k <= 0")
    w = gw * np.exp(-0.5 * ((k - spec.k0) / spec.sigma_k) ** 2)
    return k, w / w.sum()


def wavepacket_average(spec: WavePacketSpec, f: Callable[[float], float]) -> float:
    """Weighted average of f(k) over |A(k)|^2, accumulated in ascending k."""
    ks, ws = quadrature(spec)
    total = 0.0
    for k, w in zip(ks, ws):
        total += w * f(float(k))
    return total


# ---------------------------------------------------------------- report

@dataclass
class LevelEntry:
    n: int
    K: complex
    Delta: float
    delta_P: float


@dataclass
class ObservablesReport:
    sigma_aa_initial: float
    delta_sigma_aa: float
    per_n: list
    R: float
    T: float
    k: Union[float, dict]

    def to_dict(self) -> dict:
        return {
            "sigma_aa_initial": self.sigma_aa_initial,
            "delta_sigma_aa": self.delta_sigma_aa,
            "per_n": [
                {"n": e.n, "K": [e.K.real, e.K.imag], "Delta": e.Delta, "delta_P": e.delta_P}
                for e in self.per_n
            ],
            "R": self.R,
            "T": self.T,
            "k": self.k,
        }

    @property
    def delta_P(self) -> np.ndarray:
        return np.array([e.delta_P for e in self.per_n])


def _monochromatic(coords, profile, k, config, top):
    K = {}
    table = {}
    for n in range(top + 2):
        ap = scattering.scatter(profile, Channel(n, "+"), k, config)
        am = scattering.scatter(profile, Channel(n, "-"), k, config)
        table[(n, "+")] = ap
        table[(n, "-")] = am
        K[n] = kernel_K(ap, am)
    deltas = np.array([delta_n(coords.entry(n), K[n]) for n in range(top + 2)])
    R, T = reflection_transmission(coords, table)
    return K, deltas, R, T


def as_coordinates(state, epsilon_tail=DEFAULT_EPSILON_TAIL) -> DressedCoordinates:
    if isinstance(state, DressedCoordinates):
        return state
    if isinstance(state, TrappingParam):
        return trapping_state(state, epsilon_tail)
    if isinstance(state, PureState):
        return to_dressed_coordinates(state)
    raise ValidationError(f"unsupported state type {type(state).__name__}")


def full_report(state, profile: ModeProfile, k: Union[float, WavePacketSpec],
                config: SolverConfig = scattering.DEFAULT_CONFIG,
                epsilon_tail: float = DEFAULT_EPSILON_TAIL) -> ObservablesReport:
    """All observables for one initial state, mode profile and incident k or packet.

    ``state`` may be a ``PureState``, a ``TrappingParam`` or ready-made
    ``DressedCoordinates``.  Levels run to one above the highest occupied n so
    that emission into n_max + 1 shows up in ``delta_P``.  For a wave packet
    every k-dependent quantity (K_n included) is the |A(k)|^2-weighted mean.
    """
    coords = as_coordinates(state, epsilon_tail)
    top = coords.occupied_max(OCCUPIED_THRESHOLD)
    if isinstance(k, WavePacketSpec):
        ks, ws = quadrature(k)
        k_field = k.describe()
    else:
        ks, ws = np.array([float(k)]), np.array([1.0])
        k_field = float(k)

    size = top + 2
    K_avg = np.zeros(size, dtype=complex)
    D_avg = np.zeros(size)
    R = T = 0.0
    for kk, w in zip(ks, ws):
        K, deltas, Rk, Tk = _monochromatic(coords, profile, float(kk), config, top)
        K_avg += w * np.array([K[n] for n in range(size)])
        D_avg += w * deltas
        R += w * Rk
        T += w * Tk

    dP = np.empty(size)
    dP[0] = D_avg[0]
    dP[1:] = D_avg[1:] - D_avg[:-1]
    per_n = [LevelEntry(n, complex(K_avg[n]), float(D_avg[n]), float(dP[n])) for n in range(size)]
    return ObservablesReport(
        sigma_aa_initial=sigma_aa_initial(coords),
        delta_sigma_aa=float(np.sum(D_avg)),
        per_n=per_n,
        R=float(R),
        T=float(T),
        k=k_field,
    )
