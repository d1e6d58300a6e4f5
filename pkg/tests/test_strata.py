import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import specs
from ricciscope.core import HomSpaceSpec, scalar_curvature_diag, trace_constraint
from ricciscope.errors import DomainError, UsageError
from ricciscope.fibration import alpha_of_stratum, canonical_variation
from ricciscope.spaces import ledger_obata as lo
from ricciscope.spaces import stiefel
from ricciscope.strata import (
    INFINITY,
    INTERIOR,
    SUBALGEBRA,
    GeodesicRay,
    divergence_witness,
    enumerate_strata,
    fiber_killing,
    make_stratum,
    sample_near_stratum,
    stratum_of_limit,
    upper_bound_near_stratum,
)


def stiefel_spec(T=(1, 0.6, 0.4, 0, 0)):
    return stiefel.stiefel_space(1.0, 0.0, T)[0]


def test_stiefel_markings():
    spec = stiefel_spec()
    marks = {s.J: s.marking for s in enumerate_strata(spec)}
    assert marks == {
        (0,): SUBALGEBRA,
        (1,): INFINITY,
        (2,): INFINITY,
        (0, 1): SUBALGEBRA,
        (0, 2): SUBALGEBRA,
        (1, 2): INFINITY,
    }
    assert make_stratum(spec, [0, 2]).dim_k == 4


def test_zero_structure_constants_mark_everything_subalgebra():
    spec = HomSpaceSpec((2, 3, 1), (1.0, 2.0, 0.5), {})
    strata = enumerate_strata(spec)
    assert len(strata) == 6 and all(s.is_subalgebra for s in strata)


def test_enumeration_cap():
    spec = HomSpaceSpec([1] * 17, [1.0] * 17, {})
    with pytest.raises(UsageError):
        enumerate_strata(spec)


def test_improper_J_rejected():
    spec = stiefel_spec()
    with pytest.raises(UsageError):
        make_stratum(spec, [])
    with pytest.raises(UsageError):
        make_stratum(spec, [0, 1, 2])


def test_witness_on_subalgebra_is_usage_error():
    spec = stiefel_spec()
    stratum = make_stratum(spec, [0, 2])
    ray = GeodesicRay.toward(spec, [1.0, 0.0, 1.0])
    with pytest.raises(UsageError):
        divergence_witness(spec, stratum, ray, 10.0)


def test_witness_ray_must_exit_through_stratum():
    spec = stiefel_spec()
    ray = GeodesicRay.toward(spec, [1.0, 0.0, 1.0])
    with pytest.raises(UsageError):
        divergence_witness(spec, make_stratum(spec, [1, 2]), ray, 10.0)


def test_constant_sequence_is_interior():
    spec = stiefel_spec()
    y = np.array([1.0, 1.0, 1.0])
    y = y / trace_constraint(spec, y)
    assert stratum_of_limit(spec, [y] * 5) == INTERIOR


def test_ray_toward_k2():
    spec = stiefel_spec()
    ray = GeodesicRay.toward(spec, [1.0, 0.0, 2.0])
    assert ray.exit_set() == (0, 2)
    ts = ray.t_v * (1 - np.logspace(-2, -9, 8))
    stratum = stratum_of_limit(spec, ray(ts))
    assert stratum.J == (0, 2) and stratum.is_subalgebra


def test_canonical_variation_limit_is_fiber_stratum():
    spec = stiefel_spec((1, 0.5, 0.3, 0, 0))
    y = np.array([0.4, 0.7, 0.2])
    y = y / trace_constraint(spec, y)
    ts = np.logspace(-2, -9, 8)
    pts = canonical_variation(spec, [0, 1], y, ts)
    assert stratum_of_limit(spec, pts).J == (0, 1)


def test_limit_needs_constraint():
    spec = stiefel_spec()
    with pytest.raises(DomainError):
        stratum_of_limit(spec, [[1.0, 1.0, 1.0]])


def test_lo_fiber_killing():
    spec = lo.lo_spec(3, (1, 1))
    # b1 - [011]/d = 1 - (1/2)/3
    assert fiber_killing(spec, [0])[0] == pytest.approx(5 / 6, abs=1e-15)


def test_upper_bound_requires_subalgebra():
    spec = stiefel_spec()
    with pytest.raises(UsageError):
        upper_bound_near_stratum(spec, make_stratum(spec, [1]), 0.0, 0.1)


@settings(max_examples=80, deadline=None)
@given(specs())
def test_marking_soundness(spec):
    assume(spec.r > 1)
    for s in enumerate_strata(spec):
        J, Jc = list(s.J), list(s.complement(spec.r))
        leak = spec.sc[np.ix_(J, J, Jc)].sum()
        if s.is_subalgebra:
            assert leak == 0.0
        else:
            assert leak > 0.0


@settings(max_examples=80, deadline=None)
@given(specs(), st.data())
def test_fiber_consistency(spec, data):
    assume(spec.r > 1)
    strata = [s for s in enumerate_strata(spec) if s.is_subalgebra]
    assume(strata)
    s = data.draw(st.sampled_from(strata))
    J = list(s.J)
    bbar = fiber_killing(spec, J)
    assume(np.all(bbar >= 0))
    y = np.array(data.draw(st.lists(st.floats(0.05, 20.0), min_size=len(J), max_size=len(J))))
    sc = spec.sc[np.ix_(J, J, J)]
    d = spec.d[J]
    want = 0.5 * np.sum(d * bbar * y) - 0.25 * np.einsum("ijk,i,j,k->", sc, y, y, 1.0 / y)
    got = scalar_curvature_diag(s.fiber_spec, y)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-12 * (1 + np.sum(d * bbar * y)))


@settings(max_examples=60, deadline=None)
@given(specs(), st.data(), st.floats(0.0, 1.0))
def test_geodesic_exit(spec, data, frac):
    assume(spec.r > 1)
    v = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=spec.r, max_size=spec.r)))
    w = spec.d * spec.tensor
    assume(np.linalg.norm(v - (v @ w) / (w @ w) * w) > 1e-3)
    ray = GeodesicRay.from_direction(spec, v)
    assert trace_constraint(spec, ray(frac * ray.t_v)) == pytest.approx(1.0, abs=1e-12)
    assert np.all(ray(frac * ray.t_v * 0.999) > 0)
    assert np.min(ray.exit_point) == 0.0


def test_adjacency_monotonicity():
    rng = np.random.default_rng(5)
    for _ in range(10):
        T = (1.0, *rng.uniform(0.1, 2.0, 2), 0.0, 0.0)
        spec = stiefel_spec(T)
        a0 = alpha_of_stratum(spec, make_stratum(spec, [0]), certificate=False).value
        a1 = alpha_of_stratum(spec, make_stratum(spec, [0, 1]), certificate=False).value
        a2 = alpha_of_stratum(spec, make_stratum(spec, [0, 2]), certificate=False).value
        assert a0 <= a1 + 1e-6 and a0 <= a2 + 1e-6


def test_near_stratum_bound_sampled():
    rng = np.random.default_rng(11)
    spec = stiefel_spec((1, 0.8, 0.3, 0, 0))
    stratum = make_stratum(spec, [0, 1])
    alpha = alpha_of_stratum(spec, stratum, certificate=False).value
    for eps in (0.1, 0.01):
        pts = sample_near_stratum(spec, stratum, eps, 2000, rng)
        assert np.all(np.abs(pts @ (spec.d * spec.tensor) - 1) < 1e-12)
        bound = upper_bound_near_stratum(spec, stratum, alpha, eps)
        assert np.all(scalar_curvature_diag(spec, pts) <= bound + 1e-12)


def test_divergence_witness_tail():
    spec = stiefel_spec()
    stratum = make_stratum(spec, [1, 2])
    ray = GeodesicRay.toward(spec, [0.0, 1.0, 1.0])
    eps, triple = divergence_witness(spec, stratum, ray, 100.0)
    assert 0 < eps <= 0.5 and triple in ((1, 1, 0), (2, 2, 0))
    ts = ray.t_v * (1 - eps * np.linspace(1e-3, 1 - 1e-3, 200))
    assert np.all(scalar_curvature_diag(spec, ray(ts)) < -100.0)
