import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_lo_metric, random_stiefel_metric
from ricciscope.core import scalar_full
from ricciscope.errors import DomainError
from ricciscope.fibration import GLOBAL_MAX, alpha_of_stratum, beta_of_stratum
from ricciscope.solver import find_critical
from ricciscope.spaces import ledger_obata as lo
from ricciscope.spaces import stiefel
from ricciscope.strata import make_stratum


def test_stiefel_closed_form_scalar():
    fam = stiefel.stiefel_family()
    rng = np.random.default_rng(21)
    for _ in range(200):
        x = random_stiefel_metric(rng)
        s = stiefel.stiefel_scalar(x)
        assert fam.scalar(x) == pytest.approx(s, rel=1e-9)


def test_stiefel_closed_form_trace():
    rng = np.random.default_rng(22)
    for _ in range(50):
        x = random_stiefel_metric(rng)
        T = random_stiefel_metric(rng)
        assert stiefel.stiefel_family(T).trace(x) == pytest.approx(stiefel.stiefel_trace(x, T), rel=1e-12)


def test_lo_closed_form_scalar_and_trace():
    fam = lo.lo_family()
    rng = np.random.default_rng(23)
    for _ in range(200):
        x = random_lo_metric(rng)
        T = random_lo_metric(rng)
        assert scalar_full(fam.bt, fam.matrix(x)) == pytest.approx(lo.lo_scalar(x, 3), rel=1e-9)
        assert lo.lo_family(T).trace(x) == pytest.approx(lo.lo_trace(x, T, 3), rel=1e-12)


def test_lo_large_a_is_linear():
    x = (1.3, 0.7, 0.2)
    assert lo.lo_scalar(x, 84) == pytest.approx(28 * lo.lo_scalar(x, 3), rel=1e-14)
    with pytest.raises(DomainError):
        lo.lo_spec(2)


def test_pd_criteria():
    rng = np.random.default_rng(24)
    for _ in range(200):
        x = rng.uniform(-1, 2, 5)
        g = stiefel.StiefelMetric.from_params(x)
        assert g.is_pd() == bool(np.all(np.linalg.eigvalsh(g.matrix()) > 0))
    with pytest.raises(DomainError):
        stiefel.stiefel_scalar([1, 1, 1, 1, 0])
    with pytest.raises(DomainError):
        lo.LedgerObataPoint(3, 1, 1, 1)


def test_stiefel_normalizer():
    rng = np.random.default_rng(25)
    for _ in range(20):
        x = random_stiefel_metric(rng)
        g = stiefel.StiefelMetric.from_params(x)
        h = stiefel.stiefel_normalizer(rng.uniform(-3, 3), g)
        assert np.allclose(h.params[:3], x[:3], rtol=1e-12)
        assert h.x3**2 + h.x4**2 == pytest.approx(x[3] ** 2 + x[4] ** 2, rel=1e-12)
        assert stiefel.stiefel_scalar(h) == pytest.approx(stiefel.stiefel_scalar(g), rel=1e-12)


def test_normalizer_rotates_x3_x4():
    g = stiefel.StiefelMetric(1.0, 1.0, 1.0, 0.3, 0.0)
    hs = [stiefel.stiefel_normalizer(eta, g) for eta in np.linspace(0, 2 * math.pi, 9)]
    angles = {round(math.atan2(h.x4, h.x3), 6) for h in hs}
    assert len(angles) > 2


def test_stiefel_swap():
    rng = np.random.default_rng(26)
    for _ in range(20):
        x = random_stiefel_metric(rng)
        h = stiefel.stiefel_swap(x)
        assert np.allclose(h.params, [x[0], x[2], x[1], x[3], x[4]], atol=1e-12)
        assert stiefel.stiefel_scalar(h) == pytest.approx(stiefel.stiefel_scalar(x), rel=1e-12)


def test_lo_rotation_invariance():
    rng = np.random.default_rng(27)
    for _ in range(50):
        x = random_lo_metric(rng)
        for n in (1, 2):
            assert lo.lo_scalar(lo.r_pullback(x, n)) == pytest.approx(lo.lo_scalar(x), rel=1e-12)


def test_lo_r_cubed():
    T = np.array([0.3, 0.7, 0.1])
    assert np.array_equal(lo.r_pullback(T, 3), T)
    assert np.allclose(lo.r_pullback(lo.r_pullback(lo.r_pullback(T))), T, atol=1e-15)


def test_lo_rotation_is_two_pi_over_three():
    rot = np.array([[math.cos(2 * math.pi / 3), -math.sin(2 * math.pi / 3)], [math.sin(2 * math.pi / 3), math.cos(2 * math.pi / 3)]])
    rng = np.random.default_rng(28)
    for _ in range(20):
        T = random_lo_metric(rng)
        assert np.allclose(lo.to_xy(lo.r_pullback(T)), rot @ np.array(lo.to_xy(T)), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.49, 0.49), st.floats(-0.49, 0.49))
def test_lo_rotation_conjugacy(x, y):
    T = lo.from_xy(x, y)
    M = lo.block(*T)
    RM = lo.block(*lo.r_pullback(T))
    assert np.allclose(RM, lo.R_MATRIX @ M @ lo.R_MATRIX.T, atol=1e-15)
    assert np.allclose(lo.R_MATRIX @ lo.R_MATRIX.T, np.eye(2), atol=1e-15)


def test_lo_einstein_flags():
    assert lo.einstein_flags((0.75, 0.25, 0.0))["product_k1"]
    assert lo.einstein_flags((1.0, 1.0, 0.0))["normal"]
    flags = lo.einstein_flags(lo.r_pullback((0.75, 0.25, 0.0), 1))
    assert flags["product_k2"] and not flags["product_k1"]


def test_lo_diagonal_critical():
    for t in (0.5, 0.6, 0.9):
        p = lo.diagonal_critical(t)
        fam = lo.lo_family((t, 1 - t, 0))
        r = fam.ricci(p)
        c = r[0] / t
        assert np.allclose(r, c * fam.tensor, atol=1e-10)
        assert lo.lo_trace(p, (t, 1 - t, 0)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        lo.diagonal_critical(0.3)


def test_lo_report_scales():
    rep = lo.lo_report((1.2, 0.8, 0.0))
    assert rep["condition"] and rep["diag_critical"] is not None
    fam = lo.lo_family((1.2, 0.8, 0.0))
    assert fam.trace(rep["diag_critical"]) == pytest.approx(1.0, abs=1e-12)


def test_lo_closed_form_alpha_beta():
    rng = np.random.default_rng(29)
    for _ in range(10):
        T = random_lo_metric(rng)
        reps = {r.label: r for r in lo.lo_reports(T)}
        for key, (a, b) in lo._k_values(*T).items():
            assert reps[key].alpha == pytest.approx(a, abs=1e-6)
            assert reps[key].beta == pytest.approx(b, abs=1e-6)


def test_stiefel_closed_form_alpha_beta():
    rng = np.random.default_rng(30)
    for _ in range(5):
        T = random_stiefel_metric(rng)
        T = T / T[0]
        cf = stiefel.stiefel_alpha_beta(T)
        reps = {r.label: r for r in stiefel.stiefel_reports(T)}
        for key in ("k1", "k2"):
            assert reps[key].alpha == pytest.approx(cf[key][0], abs=1e-6)
            assert reps[key].beta == pytest.approx(cf[key][1], abs=1e-6)
        theta = [r for r in reps.values() if r.label.startswith("ktheta")][0]
        assert theta.alpha == pytest.approx(cf["ktheta0"][0], abs=1e-6)
        assert theta.beta == pytest.approx(cf["ktheta0"][1], abs=1e-6)


def test_theta_isometry():
    T = (1.0, 0.6, 0.4, 0.15, -0.1)
    for theta in np.linspace(-math.pi, math.pi, 8, endpoint=False):
        assert stiefel.theta_alpha(T, theta) == pytest.approx(stiefel.alpha_theta(T, theta), abs=1e-6)


def test_theta_zero():
    assert stiefel.theta_zero(0.0, 0.0) == 0.0
    T = (1.0, 0.6, 0.4, 0.15, -0.1)
    th = stiefel.theta_zero(T[3], T[4])
    grid = np.linspace(-math.pi, math.pi, 721)
    assert stiefel.alpha_theta(T, th) >= max(stiefel.alpha_theta(T, g) for g in grid) - 1e-12


def test_stiefel_s_one_constants():
    spec, _ = stiefel.stiefel_space(1.0, 0.0)
    assert spec.sc[0, 1, 1] == pytest.approx(4.0, abs=1e-12)
    assert spec.sc[0, 1, 2] == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(spec.killing, 8.0)
    with pytest.raises(DomainError):
        stiefel.stiefel_space(1.5, 0.0)


def test_stiefel_alpha_k2_closed_form():
    T = (1.0, 1.0, 0.25, 0.0, 0.0)
    spec, _ = stiefel.stiefel_space(1.0, 0.0, T)
    st_k2 = make_stratum(spec, [0, 2])
    assert alpha_of_stratum(spec, st_k2).value == pytest.approx(stiefel.alpha_k(1.0, 0.25), abs=1e-6)
    assert beta_of_stratum(spec, st_k2, base_valid=True).value == pytest.approx(4.0, abs=1e-6)


def test_jensen_guaranteed():
    assert stiefel.stiefel_check((1.0, 0.75, 0.75, 0.0, 0.0)).kind == GLOBAL_MAX
    cp = find_critical(stiefel.stiefel_family((1.0, 0.75, 0.75, 0, 0)), [1, 1, 1, 0, 0])
    assert np.allclose(cp.g, [5, 3.75, 3.75, 0, 0], atol=1e-8)
