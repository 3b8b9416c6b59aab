"""Dressed-state coordinates of pure atom-field states.

The dressed basis is |b,0> and |+-,n> = (|a,n> +- |b,n+1>)/sqrt(2).  A pure
state is written

    w_{-1} |b,0> + sum_n w_n e^{i chi_n} [cos(theta_n/2)|+,n> + e^{-i phi_n} sin(theta_n/2)|-,n>]

with the global phase fixed so that the |b,0> amplitude is real and
non-negative.  Undefined angles are set to zero: all three when w_n = 0, and
phi_n when theta_n is 0 or pi.  Phases live in [0, 2 pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError

NORM_TOL = 1e-12
TWO_PI = 2.0 * math.pi
# amplitudes below this are treated as exactly zero when assigning angles
_ZERO = 1e-300
# a branch amplitude this small relative to w_n is rounding noise
_REL_ZERO = 1e-13


@dataclass(frozen=True, eq=False)
class PureState:
    """Joint coefficients: ``a[n] = <a,n|psi>`` and ``b[n] = <b,n|psi>``.

    Arrays are padded so that ``len(b) == len(a) + 1``; the truncation index
    is ``n_max = len(a) - 1``.
    """

    a: np.ndarray
    b: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.a) - 1

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.a) ** 2) + np.sum(np.abs(self.b) ** 2)))

    def vector(self) -> np.ndarray:
        """Flat basis vector (a_0, b_0, a_1, b_1, ..., b_{n_max+1})."""
        out = np.zeros(2 * len(self.b), dtype=complex)
        out[0:-2:2] = self.a
        out[1::2] = self.b
        return out


def _check_norm(norm):
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"state is not normalised: norm = {norm!r}")


def joint_state(a, b, check: bool = True) -> PureState:
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.ndim != 1 or b.ndim != 1:
        raise ValidationError("coefficient lists must be one-dimensional")
    size = max(len(a), len(b) - 1, 1)
    aa = np.zeros(size, dtype=complex)
    bb = np.zeros(size + 1, dtype=complex)
    aa[:len(a)] = a
    bb[:len(b)] = b
    state = PureState(aa, bb)
    if check:
        _check_norm(state.norm)
    return state


def product_state(atom, field, check: bool = True) -> PureState:
    """(c_a |a> + c_b |b>) (x) sum_n f_n |n>; atom and field each normalised."""
    c_a, c_b = (complex(x) for x in atom)
    field = np.atleast_1d(np.asarray(field, dtype=complex))
    if check:
        _check_norm(math.hypot(abs(c_a), abs(c_b)))
        _check_norm(float(np.linalg.norm(field)))
    return joint_state(c_a * field, c_b * field, check=check)


def basis_state(level: str, n: int) -> PureState:
    """|a,n> or |b,n>."""
    if level not in ("a", "b") or n < 0:
        raise ValidationError(f"invalid basis state |{level},{n}>")
    field = np.zeros(n + 1)
    field[n] = 1.0
    atom = (1.0, 0.0) if level == "a" else (0.0, 1.0)
    return product_state(atom, field)


@dataclass(frozen=True, eq=False)
class DressedCoordinates:
    w_minus1: float
    w: np.ndarray
    theta: np.ndarray
    chi: np.ndarray
    phi: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.w) - 1

    def occupied_max(self, threshold: float = 1e-14) -> int:
        """Largest n with w_n > threshold, or -1 if none."""
        idx = np.flatnonzero(self.w > threshold)
        return int(idx[-1]) if idx.size else -1

    def entry(self, n: int):
        """(w_n, theta_n, chi_n, phi_n); zeros beyond the stored range."""
        if n < 0:
            raise ValidationError("entry index must be >= 0")
        if n > self.n_max:
            return 0.0, 0.0, 0.0, 0.0
        return float(self.w[n]), float(self.theta[n]), float(self.chi[n]), float(self.phi[n])

    def with_chi(self, chi) -> "DressedCoordinates":
        return make_coordinates(self.w_minus1, self.w, self.theta, chi, self.phi)

    def to_dict(self) -> dict:
        return {
            "w_minus1": float(self.w_minus1),
            "entries": [
                {"n": n, "w": float(w), "theta": float(t), "chi": float(c), "phi": float(p)}
                for n, (w, t, c, p) in enumerate(zip(self.w, self.theta, self.chi, self.phi))
            ],
        }


def _wrap(x):
    x = np.mod(x, TWO_PI)
    # mod can round up to exactly 2 pi for tiny negative inputs
    return np.where(x >= TWO_PI, 0.0, x)


def make_coordinates(w_minus1, w, theta, chi, phi) -> DressedCoordinates:
    """Validate and canonicalise a coordinate set."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    theta = np.broadcast_to(np.asarray(theta, dtype=float), w.shape).copy()
    chi = _wrap(np.broadcast_to(np.asarray(chi, dtype=float), w.shape))
    phi = _wrap(np.broadcast_to(np.asarray(phi, dtype=float), w.shape))
    w_minus1 = float(w_minus1)
    if w_minus1 < 0 or w_minus1 > 1 or np.any(w < 0) or np.any(w > 1):
        raise ValidationError("dressed weights must lie in [0, 1]")
    if np.any(theta < 0) or np.any(theta > math.pi):
        raise ValidationError("theta_n must lie in [0, pi]")
    _check_norm(math.sqrt(w_minus1 ** 2 + float(np.sum(w ** 2))))
    empty = w == 0
    theta[empty] = 0.0
    chi[empty] = 0.0
    phi[empty | (theta == 0.0) | (theta == math.pi)] = 0.0
    for arr in (w, theta, chi, phi):
        arr.setflags(write=False)
    return DressedCoordinates(w_minus1, w, theta, chi, phi)


def sin_theta(theta):
    """sin(theta) with exact zeros at theta = 0 and theta = pi."""
    theta = np.asarray(theta, dtype=float)
    return np.where((theta == 0.0) | (theta == math.pi), 0.0, np.sin(theta))


def half_angle_weights(theta):
    """(cos^2(theta/2), sin^2(theta/2)), exact at theta = 0 and pi."""
    theta = np.asarray(theta, dtype=float)
    cos2 = np.cos(0.5 * theta) ** 2
    sin2 = np.sin(0.5 * theta) ** 2
    cos2 = np.where(theta == 0.0, 1.0, np.where(theta == math.pi, 0.0, cos2))
    sin2 = np.where(theta == 0.0, 0.0, np.where(theta == math.pi, 1.0, sin2))
    return cos2, sin2


def to_dressed_coordinates(state: PureState) -> DressedCoordinates:
    _check_norm(state.norm)
    b0 = state.b[0]
    # fix the global phase so that the |b,0> amplitude is real and >= 0
    rot = np.exp(-1j * np.angle(b0)) if abs(b0) > _ZERO else 1.0
    a = state.a * rot
    b1 = state.b[1:] * rot
    c_plus = (a + b1) / math.sqrt(2.0)
    c_minus = (a - b1) / math.sqrt(2.0)
    mp, mm = np.abs(c_plus), np.abs(c_minus)
    w = np.hypot(mp, mm)
    plus_zero = mp <= np.maximum(_REL_ZERO * w, _ZERO)
    minus_zero = mm <= np.maximum(_REL_ZERO * w, _ZERO)
    theta = 2.0 * np.arctan2(mm, mp)
    theta[plus_zero & ~minus_zero] = math.pi
    theta[minus_zero] = 0.0
    arg_p, arg_m = np.angle(c_plus), np.angle(c_minus)
    chi = np.where(plus_zero, arg_m, arg_p)
    phi = np.where(plus_zero | minus_zero, 0.0, arg_p - arg_m)
    w[plus_zero & minus_zero] = 0.0
    # renormalise away rounding so the invariant holds at 1e-12
    total = math.sqrt(abs(b0) ** 2 + float(np.sum(w ** 2)))
    return make_coordinates(min(abs(b0) / total, 1.0), np.minimum(w / total, 1.0), theta, chi, phi)


def from_dressed_coordinates(coords: DressedCoordinates) -> PureState:
    c_plus = coords.w * np.exp(1j * coords.chi) * np.cos(0.5 * coords.theta)
    c_minus = coords.w * np.exp(1j * (coords.chi - coords.phi)) * np.sin(0.5 * coords.theta)
    cos2, sin2 = half_angle_weights(coords.theta)
    # exact zeros where a half-angle factor vanishes
    c_plus = np.where(cos2 == 0.0, 0.0, c_plus)
    c_minus = np.where(sin2 == 0.0, 0.0, c_minus)
    a = (c_plus + c_minus) / math.sqrt(2.0)
    b = np.concatenate([[coords.w_minus1], (c_plus - c_minus) / math.sqrt(2.0)])
    return joint_state(a, b)


@dataclass(frozen=True)
class TrappingParam:
    gamma: complex
    branch: str = "+"

    def __post_init__(self):
        if not abs(self.gamma) < 1:
            raise ValidationError(f"|gamma| must be < 1, got {abs(self.gamma)}")
        if self.branch not in ("+", "-"):
            raise ValidationError(f"branch must be '+' or '-', got {self.branch!r}")


def trapping_tail(gamma_abs: float, n_max: int) -> float:
    """Exact weight sum_{n > n_max} w_n^2 of an untruncated trapping state."""
    g2 = gamma_abs * gamma_abs
    return 2.0 * g2 ** (n_max + 2) / (1.0 + g2)


def truncation_level(gamma_abs: float, epsilon_tail: float) -> int:
    """Smallest n_max whose discarded trapping-state weight is below epsilon_tail."""
    if not 0 <= gamma_abs < 1:
        raise ValidationError(f"gamma_abs must lie in [0, 1), got {gamma_abs}")
    if not 0 < epsilon_tail < 1:
        raise ValidationError(f"epsilon_tail must lie in (0, 1), got {epsilon_tail}")
    if trapping_tail(gamma_abs, 0) < epsilon_tail:
        return 0
    g2 = gamma_abs * gamma_abs
    guess = math.log(epsilon_tail * (1.0 + g2) / 2.0) / math.log(g2) - 2.0
    n = max(int(math.floor(guess)) - 1, 0)
    while trapping_tail(gamma_abs, n) >= epsilon_tail:
        n += 1
    while n > 0 and trapping_tail(gamma_abs, n - 1) < epsilon_tail:
        n -= 1
    return n


def trapping_state(p: TrappingParam, epsilon_tail: float = 1e-12) -> DressedCoordinates:
    """Coordinates of the perfect trapping state |gamma+-> (truncated, renormalised).

    Every occupied n carries a single dressed state, theta_n = 0 for '+' and
    pi for '-', so sin(theta_n) vanishes exactly.  With the |b,0> amplitude
    made positive, chi_n = (n+1) arg(gamma) for '+' and (n+1) arg(gamma) + pi
    for '-'.
    """
    g = abs(p.gamma)
    n_max = truncation_level(g, epsilon_tail)
    n = np.arange(n_max + 1)
    pref = math.sqrt((1.0 - g * g) / (1.0 + g * g))
    w = pref * math.sqrt(2.0) * g ** (n + 1.0)
    w_m1 = pref
    total = math.sqrt(w_m1 ** 2 + float(np.sum(w ** 2)))
    chi = (n + 1) * np.angle(p.gamma) + (0.0 if p.branch == "+" else math.pi)
    theta = 0.0 if p.branch == "+" else math.pi
    return make_coordinates(w_m1 / total, w / total, theta, chi, 0.0)


def trapping_product_state(p: TrappingParam, n_field: int) -> PureState:
    """|gamma+-> in product form, field truncated at n_field and renormalised."""
    gamma = complex(p.gamma)
    sign = 1.0 if p.branch == "+" else -1.0
    atom = np.array([gamma, sign]) / math.sqrt(1.0 + abs(gamma) ** 2)
    field = gamma ** np.arange(n_field + 1)
    field = field / np.linalg.norm(field)
    return product_state(atom, field)


def state_from_json(obj: dict) -> PureState:
    """Parse the state-file shape.

    ``{"form": "product", "atom": [re, im, re, im], "field": [[re, im], ...]}``
    or ``{"form": "joint", "a": [[re, im], ...], "b": [[re, im], ...]}``.
    """
    if not isinstance(obj, dict):
        raise ValidationError("state must be a JSON object")
    form = obj.get("form")
    try:
        if form == "product":
            atom = [float(x) for x in obj["atom"]]
            if len(atom) != 4:
                raise ValidationError("'atom' must hold four numbers [re, im, re, im]")
            field = _pairs(obj["field"])
            return product_state((complex(atom[0], atom[1]), complex(atom[2], atom[3])), field)
        if form == "joint":
            return joint_state(_pairs(obj.get("a", [])), _pairs(obj.get("b", [])))
    except KeyError as exc:
        raise ValidationError(f"state is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed state: {exc}") from None
    raise ValidationError(f"state 'form' must be 'product' or 'joint', got {form!r}")


def _pairs(items):
    out = []
    for item in items:
        re, im = item
        out.append(complex(float(re), float(im)))
    return np.array(out, dtype=complex)


def state_to_json(state: PureState) -> dict:
    return {
        "form": "joint",
        "a": [[float(z.real), float(z.imag)] for z in state.a],
        "b": [[float(z.real), float(z.imag)] for z in state.b],
    }


def parse_state_shorthand(text: str) -> Optional[PureState]:
    """``"a,2"`` -> |a,2>, ``"b,0"`` -> |b,0>."""
    try:
        level, n = (s.strip() for s in text.split(","))
        return basis_state(level, int(n))
    except ValueError:
        raise ValidationError(f"state shorthand must look like 'a,0' or 'b,1', got {text!r}") from None
