import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mazer.errors import ExpressionEvalError, ValidationError
from mazer.profiles import (effective_support, eval_mode, from_descriptor, make_profile,
                            sample_slices)


def test_mesa_inside_and_outside():
    p = make_profile("mesa", 10)
    assert eval_mode(p, 5) == 1.0
    assert eval_mode(p, -1) == 0.0
    assert eval_mode(p, 10.0) == 1.0 and eval_mode(p, 10.0 + 1e-12) == 0.0


def test_sinusoidal():
    p = make_profile("sin", 10, lobes=1)
    assert eval_mode(p, 5.0) == 1.0
    assert eval_mode(p, 0.0) == 0.0 and eval_mode(p, 10.0) == 0.0
    p2 = make_profile("sin", 10, lobes=2)
    assert eval_mode(p2, 2.5) == pytest.approx(1.0, abs=1e-15)
    assert eval_mode(p2, 10.0) == 0.0


def test_gaussian_and_sech2_shape():
    g = make_profile("gaussian", 10, width=1)
    assert eval_mode(g, 5.0) == 1.0
    assert eval_mode(g, 6.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    s = make_profile("sech2", 10, width=1)
    assert eval_mode(s, 5.0) == 1.0
    assert eval_mode(s, 6.0) == pytest.approx(1 / math.cosh(1.0) ** 2, rel=1e-15)


@pytest.mark.parametrize("kind, kw", [("mesa", {}), ("sech2", {"width": 0}), ("gaussian", {"width": -1}),
                                      ("sin", {"lobes": 0}), ("sin", {"lobes": 1.5}), ("bogus", {})])
def test_invalid_parameters(kind, kw):
    with pytest.raises(ValidationError):
        make_profile(kind, 0 if kind == "mesa" else 10, **kw)


def test_custom_expression_is_clipped():
    p = make_profile("expr", 10, expr="sin(pi*z/L)^2")
    assert eval_mode(p, 5.0) == pytest.approx(1.0)
    assert eval_mode(p, -3.0) == 0.0 and eval_mode(p, 12.0) == 0.0


def test_custom_error_propagates_with_position():
    p = make_profile("expr", 10, expr="1/(z-5)")
    with pytest.raises(ExpressionEvalError) as exc:
        eval_mode(p, np.array([4.0, 5.0]))
    assert exc.value.z == 5.0


@given(st.floats(min_value=-10, max_value=20))
def test_custom_one_equals_mesa(z):
    mesa = make_profile("mesa", 10)
    one = make_profile("expr", 10, expr="1")
    assert eval_mode(one, z) == eval_mode(mesa, z)


def test_effective_support_compact():
    assert effective_support(make_profile("mesa", 10), 1e-8) == (0.0, 10.0)
    assert effective_support(make_profile("sin", 10, lobes=2), 1e-8) == (0.0, 10.0)


def test_effective_support_gaussian_half_width():
    lo, hi = effective_support(make_profile("gaussian", 10, width=1), 1e-8)
    half = 5 + math.sqrt(2 * math.log(1e8))
    assert (lo + hi) / 2 == pytest.approx(5.0)
    assert (hi - lo) / 2 >= half - 1e-12


@pytest.mark.parametrize("kind", ["mesa", "sech2", "gaussian", "sin"])
@given(eps=st.floats(min_value=1e-14, max_value=0.5), offset=st.floats(min_value=1e-9, max_value=50))
def test_outside_support_is_below_epsilon(kind, eps, offset):
    p = make_profile(kind, 10, width=0.7) if kind in ("sech2", "gaussian") else make_profile(kind, 10)
    lo, hi = effective_support(p, eps)
    assert abs(eval_mode(p, hi + offset)) < eps
    assert abs(eval_mode(p, lo - offset)) < eps


def test_effective_support_rejects_bad_epsilon():
    with pytest.raises(ValidationError):
        effective_support(make_profile("mesa", 1), 1.0)


def test_descriptor_round_trip():
    for desc in ({"mode": "mesa", "kappa_L": 10.0}, {"mode": "sech2", "kappa_L": 4.0, "width": 2.0},
                 {"mode": "sin", "kappa_L": 3.0, "lobes": 2},
                 {"mode": "expr", "kappa_L": 1.0, "expr": "z * (L - z)"}):
        assert from_descriptor(desc).describe() == desc
    with pytest.raises(ValidationError):
        from_descriptor({"mode": "mesa"})
    with pytest.raises(ValidationError):
        from_descriptor({"mode": "mesa", "kappa_L": 1, "colour": "red"})


def test_sample_slices_midpoints():
    z_a, z_b, h, u = sample_slices(make_profile("mesa", 10), 8, 1e-10)
    assert (z_a, z_b, h) == (0.0, 10.0, 1.25)
    assert np.all(u == 1.0) and not u.flags.writeable
