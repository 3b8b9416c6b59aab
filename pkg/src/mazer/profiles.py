"""Cavity mode functions u(z) on the scattering axis.

Positions and lengths are in units of 1/kappa, so a profile is fully fixed by
its kind, the dimensionless cavity length ``kappa_L`` and a shape parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import expr as _expr
from .errors import ValidationError

KINDS = ("mesa", "sech2", "gaussian", "sin", "expr")
COMPACT_KINDS = ("mesa", "sin", "expr")


@dataclass(frozen=True)
class ModeProfile:
    """Immutable description of u(z).

    ``width`` is the sech^2 width or the Gaussian sigma, ``lobes`` the number
    of half-periods of the sinusoidal mode, ``expr`` the parsed custom tree.
    Both sech^2 and Gaussian are centred on L/2 with unit peak.
    """

    kind: str
    kappa_L: float
    width: Optional[float] = None
    lobes: Optional[int] = None
    expr: Optional[_expr.Node] = None

    @property
    def is_compact(self) -> bool:
        return self.kind in COMPACT_KINDS

    def __call__(self, z):
        return eval_mode(self, z)

    def describe(self) -> dict:
        """Descriptor dict in the config-file shape."""
        d = {"mode": self.kind, "kappa_L": self.kappa_L}
        if self.width is not None:
            d["width"] = self.width
        if self.lobes is not None:
            d["lobes"] = self.lobes
        if self.expr is not None:
            d["expr"] = _expr.to_text(self.expr)
        return d


def make_profile(kind: str, kappa_L: float, *, width: float = 1.0, lobes: int = 1,
                 expr=None) -> ModeProfile:
    """Validate parameters and build a ``ModeProfile``.

    ``expr`` may be a string (parsed here) or an already-parsed tree.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown mode kind {kind!r}; expected one of {KINDS}")
    kappa_L = float(kappa_L)
    if not (kappa_L > 0 and math.isfinite(kappa_L)):
        raise ValidationError(f"kappa_L must be positive and finite, got {kappa_L}")
    if kind in ("sech2", "gaussian"):
        width = float(width)
        if not (width > 0 and math.isfinite(width)):
            raise ValidationError(f"width must be positive and finite, got {width}")
        return ModeProfile(kind, kappa_L, width=width)
    if kind == "sin":
        if int(lobes) != lobes or lobes < 1:
            raise ValidationError(f"lobes must be a positive integer, got {lobes}")
        return ModeProfile(kind, kappa_L, lobes=int(lobes))
    if kind == "expr":
        if expr is None:
            raise ValidationError("mode 'expr' needs an expression")
        tree = _expr.parse_profile_expr(expr) if isinstance(expr, str) else expr
        return ModeProfile(kind, kappa_L, expr=tree)
    return ModeProfile(kind, kappa_L)


def from_descriptor(desc: dict) -> ModeProfile:
    """Build a profile from ``{"mode": ..., "kappa_L": ..., "width"?, "lobes"?, "expr"?}``."""
    if not isinstance(desc, dict):
        raise ValidationError("profile descriptor must be an object")
    unknown = set(desc) - {"mode", "kappa_L", "width", "lobes", "expr"}
    if unknown:
        raise ValidationError(f"unknown profile keys: {sorted(unknown)}")
    try:
        kind = desc["mode"]
        kappa_L = desc["kappa_L"]
    except KeyError as exc:
        raise ValidationError(f"profile descriptor is missing {exc.args[0]!r}") from None
    kw = {k: desc[k] for k in ("width", "lobes", "expr") if desc.get(k) is not None}
    return make_profile(kind, kappa_L, **kw)


def eval_mode(profile: ModeProfile, z):
    """u(z) for scalar or array ``z``; exactly 0 outside [0, L] for compact kinds."""
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValidationError("z must be finite")
    L = profile.kappa_L
    kind = profile.kind
    if kind == "sech2":
        with np.errstate(over="ignore"):  # cosh -> inf gives the correct 0
            out = 1.0 / np.cosh((z - 0.5 * L) / profile.width) ** 2
    elif kind == "gaussian":
        out = np.exp(-0.5 * ((z - 0.5 * L) / profile.width) ** 2)
    else:
        inside = (z >= 0.0) & (z <= L)
        out = np.zeros_like(z)
        if kind == "mesa":
            out[inside] = 1.0
        elif kind == "sin":
            zi = z[inside]
            vals = np.sin(profile.lobes * np.pi * zi / L)
            # pin the nodes at the cavity edges
            vals[(zi == 0.0) | (zi == L)] = 0.0
            out[inside] = vals
        elif inside.any():
            out[inside] = _expr.evaluate(profile.expr, z[inside], L)
    return float(out) if scalar else out


def effective_support(profile: ModeProfile, epsilon: float = 1e-10):
    """Integration window (z_min, z_max) outside of which |u| < epsilon.

    Compact kinds return exactly (0, L).  For sech^2 and Gaussian the window is
    centred on L/2 with half-width L/2 + d, where u(L/2 +- d) = epsilon.
    """
    if not 0 < epsilon < 1:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon}")
    L = profile.kappa_L
    if profile.is_compact:
        return 0.0, L
    if profile.kind == "gaussian":
        d = profile.width * math.sqrt(2.0 * math.log(1.0 / epsilon))
    else:
        d = profile.width * math.acosh(1.0 / math.sqrt(epsilon))
    half = 0.5 * L + d
    return 0.5 * L - half, 0.5 * L + half


@lru_cache(maxsize=64)
def sample_slices(profile: ModeProfile, segments: int, epsilon: float):
    """Midpoint samples of u on ``segments`` equal slices of the support.

    Returns ``(z_min, z_max, h, u_mid)``; ``u_mid`` is read-only because it
    is shared through the cache.
    """
    z_min, z_max = effective_support(profile, epsilon)
    h = (z_max - z_min) / segments
    mid = z_min + h * (np.arange(segments) + 0.5)
    u = np.ascontiguousarray(eval_mode(profile, mid), dtype=float)
    u.setflags(write=False)
    return z_min, z_max, h, u
