import cmath
import math
import os

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import bundled_profiles
from oracles import mesa_oracle, ode_amplitudes
from mazer.errors import NumericalFailure, ValidationError
from mazer.io import amplitude_csv, read_csv
from mazer.profiles import effective_support, eval_mode, make_profile
from mazer.scattering import (Amplitudes, Channel, SolverConfig, amplitude_table, kappa_n_ratio,
                              scatter, scatter_mesa_analytic, scatter_transfer_matrix,
                              square_slab, table_rows, unitarity_defect)

KS = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0)

# integration oracle, rtol 1e-13, frozen
R_WELL = complex(-0.9123599547004682, 0.24913822846554068)
T_WELL = complex(-0.08557446653397527, -0.31337911042926603)
R_BARRIER_COLD = complex(-0.9997999999967001, -0.019999000057457243)
T2_BARRIER_COLD = 3.300815272775839e-12


@pytest.mark.parametrize("n, expected", [(0, 1.0), (3, math.sqrt(2)), (15, 2.0)])
def test_kappa_n_ratio(n, expected):
    assert kappa_n_ratio(n) == pytest.approx(expected, rel=1e-15)


def test_free_propagation_phase():
    r, t = square_slab(0.1, 0.1 ** 2, 10.0)
    assert r == 0
    assert abs(t - cmath.exp(1j)) < 1e-15


@given(st.floats(min_value=1e-3, max_value=20), st.floats(min_value=1e-2, max_value=50))
def test_free_propagation_any_k(k, L):
    r, t = square_slab(k, k * k, L)
    assert abs(r) < 1e-15 and abs(t - cmath.exp(1j * k * L)) < 1e-12


def test_well_channel_matches_frozen_oracle():
    a = scatter_mesa_analytic(Channel(0, "-"), 0.1, 10.0)
    assert abs(a.r - R_WELL) < 1e-11 and abs(a.t - T_WELL) < 1e-11
    assert unitarity_defect(a) < 1e-14


def test_cold_barrier_is_opaque():
    a = scatter_mesa_analytic(Channel(0, "+"), 0.01, 10.0)
    assert abs(a.r) ** 2 > 1 - 1e-8 and abs(a.t) ** 2 < 1e-8
    assert abs(a.r - R_BARRIER_COLD) < 1e-11
    assert abs(abs(a.t) ** 2 - T2_BARRIER_COLD) < 1e-15


@pytest.mark.parametrize("n, branch, k, L", [(0, "+", 0.5, 1.0), (2, "-", 2.0, 10.0),
                                             (5, "+", 1.3, 3.0), (1, "-", 0.05, 1.0)])
def test_analytic_against_live_oracle(n, branch, k, L):
    a = scatter_mesa_analytic(Channel(n, branch), k, L)
    r, t = mesa_oracle(n, branch, k, L)
    assert abs(a.r - r) < 1e-9 and abs(a.t - t) < 1e-9


@pytest.mark.parametrize("n", [0, 3, 8])
def test_continuity_at_branch_point(n):
    k0 = kappa_n_ratio(n)
    ch = Channel(n, "+")
    at = scatter_mesa_analytic(ch, k0, 10.0)
    for dk in (1e-9, -1e-9):
        near = scatter_mesa_analytic(ch, k0 + dk, 10.0)
        assert abs(near.r - at.r) < 1e-6 and abs(near.t - at.t) < 1e-6
    assert unitarity_defect(at) < 1e-12


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        scatter_mesa_analytic(Channel(0, "+"), 0.0, 10.0)
    with pytest.raises(ValidationError):
        scatter_mesa_analytic(Channel(0, "+"), 0.1, -1.0)
    with pytest.raises(ValidationError):
        Channel(-1, "+")
    with pytest.raises(ValidationError):
        Channel(0, "x")
    with pytest.raises(ValidationError):
        SolverConfig(segments=0)


@pytest.mark.parametrize("L", [1.0, 10.0])
def test_transfer_matrix_reproduces_mesa(L):
    p = make_profile("mesa", L)
    for n in range(6):
        for b in "+-":
            for k in KS:
                ex = scatter_mesa_analytic(Channel(n, b), k, L)
                tm = scatter_transfer_matrix(p, Channel(n, b), k)
                assert abs(tm.r - ex.r) < 1e-6 and abs(tm.t - ex.t) < 1e-6
                assert abs(abs(tm.r) - abs(ex.r)) < 1e-6
                if abs(ex.r) > 1e-3:
                    assert abs(cmath.phase(tm.r / ex.r)) < 1e-6


def test_dispatch_identity():
    mesa = make_profile("mesa", 10.0)
    ch = Channel(2, "-")
    assert scatter(mesa, ch, 0.3) == scatter_mesa_analytic(ch, 0.3, 10.0)
    g = make_profile("gaussian", 10.0)
    assert scatter(g, ch, 0.3) == scatter_transfer_matrix(g, ch, 0.3)


def test_custom_one_matches_mesa():
    one = make_profile("expr", 10.0, expr="1")
    for ch in (Channel(0, "+"), Channel(3, "-")):
        a = scatter(one, ch, 0.1)
        b = scatter_mesa_analytic(ch, 0.1, 10.0)
        assert abs(a.r - b.r) < 1e-6 and abs(a.t - b.t) < 1e-6


def test_gaussian_high_energy_transmits():
    a = scatter(make_profile("gaussian", 10.0, width=1.0), Channel(0, "+"), 5.0)
    assert abs(a.t) ** 2 > 0.99


def test_smooth_profile_against_integration_oracle():
    p = make_profile("gaussian", 10.0, width=1.0)
    z_a, z_b = effective_support(p, 1e-10)
    for ch, k in ((Channel(0, "+"), 0.5), (Channel(2, "-"), 0.1)):
        a = scatter(p, ch, k)
        r, t = ode_amplitudes(lambda z: float(eval_mode(p, z)), k, ch.sign * ch.strength,
                              z_a, z_b, p.kappa_L)
        assert abs(a.r - r) < 1e-7 and abs(a.t - t) < 1e-7


def test_sin_profile_flux():
    a = scatter(make_profile("sin", 10.0), Channel(0, "-"), 0.1)
    assert unitarity_defect(a) < 1e-6


@pytest.mark.parametrize("kind", ["sech2", "gaussian", "sin"])
@pytest.mark.parametrize("n, branch, k", [(0, "+", 0.3), (4, "-", 1.0), (1, "+", 0.05)])
def test_richardson_consistency(kind, n, branch, k):
    p = bundled_profiles(10.0)[kind]
    ch = Channel(n, branch)
    coarse = scatter_transfer_matrix(p, ch, k, SolverConfig(segments=1024))
    fine = scatter_transfer_matrix(p, ch, k, SolverConfig(segments=2048))
    assert abs(abs(fine.r) - abs(coarse.r)) < coarse.error


@pytest.mark.parametrize("kind", ["mesa", "sech2", "gaussian", "sin"])
def test_high_energy_limit(kind):
    p = bundled_profiles(10.0)[kind]
    for k in (10.0, 14.0):
        for b in "+-":
            assert abs(scatter(p, Channel(0, b), k).t) ** 2 >= 0.99


def test_failure_carries_defect():
    cfg = SolverConfig(segments=2, unitarity_tol=1e-15, max_doublings=0)
    with pytest.raises(NumericalFailure) as exc:
        scatter_transfer_matrix(make_profile("gaussian", 10.0), Channel(0, "-"), 0.3, cfg)
    assert exc.value.defect > 1e-15


@pytest.mark.parametrize("r, t, d", [(1, 0, 0.0), (0.6, 0.8, 0.0), (0.5, 0.5, 0.5)])
def test_unitarity_defect(r, t, d):
    assert unitarity_defect(Amplitudes(r, t, 1.0, Channel(0, "+"))) == pytest.approx(d, abs=1e-16)


def test_amplitude_table_shape_and_order():
    p = make_profile("mesa", 10.0)
    t = amplitude_table(p, 2, [0.1])
    assert len(t) == 6
    assert all(unitarity_defect(a) < 1e-10 for a in t.values())
    t2 = amplitude_table(p, 0, [0.2, 0.1])
    assert list(t2) == [(0, "+", 0.1), (0, "+", 0.2), (0, "-", 0.1), (0, "-", 0.2)]
    with pytest.raises(ValidationError):
        amplitude_table(p, 0, [])
    with pytest.raises(ValidationError):
        amplitude_table(p, 0, [0.1, -1.0])


def test_golden_mesa_table(data_dir):
    with open(os.path.join(data_dir, "mesa_table_k0.1_L10.csv")) as fh:
        golden = fh.read()
    fresh = amplitude_csv(table_rows(amplitude_table(make_profile("mesa", 10.0), 5, [0.1])))
    gh, grows = read_csv(golden)
    fh_, frows = read_csv(fresh)
    assert gh == fh_ and len(grows) == len(frows) == 12
    for g, f in zip(grows, frows):
        assert g[:3] == f[:3]
        np.testing.assert_allclose([float(x) for x in f[3:7]], [float(x) for x in g[3:7]],
                                   rtol=0, atol=1e-13)
