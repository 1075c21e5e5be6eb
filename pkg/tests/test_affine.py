import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliffdirac import affine as af
from cliffdirac import algebra as alg
from cliffdirac import fields as fl
from cliffdirac import geometry as geo
from cliffdirac.errors import CompatibilityError, NotSpinError, PreconditionError

from oracles import GammaRep

H = geo.DEFAULT_H
FD = 50 * H * H
NESTED = 100 * H * H
X0 = np.array([0.1, -0.2, 0.15, 0.05])
seeds = st.integers(0, 2 ** 31)


def antisym_torsion(rng):
    T = rng.normal(size=(4, 4, 4))
    return T - T.transpose(0, 2, 1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from(["minkowski", "flrw", "conformally-flat"]))
def test_torsion_contorsion_round_trip(seed, name):
    rng = np.random.default_rng(seed)
    mf = geo.metric_catalog(name)
    x = rng.uniform(-0.5, 0.5, 4)
    T = antisym_torsion(rng)
    K = af.contorsion_from_torsion(T, x, mf)
    assert np.abs(af.torsion_from_contorsion(K) - T).max() <= 1e-12 * max(1, np.abs(T).max())
    kl = af.lower_first(K, mf.at(x).g)
    # K_{n m l} = -K_{l m n}
    assert np.abs(kl + kl.transpose(2, 1, 0)).max() <= 1e-12 * max(1, np.abs(kl).max())
    K2 = af.random_contorsion_field(rng, mf)(x)
    back = af.contorsion_from_torsion(af.torsion_from_contorsion(K2), x, mf)
    assert np.abs(back - K2).max() <= 1e-12 * max(1, np.abs(K2).max())


def test_zero_torsion_gives_zero_contorsion():
    mf = geo.flrw()
    assert not af.contorsion_from_torsion(np.zeros((4, 4, 4)), X0, mf).any()


def test_non_antisymmetric_torsion_rejected():
    with pytest.raises(CompatibilityError):
        af.contorsion_from_torsion(np.ones((4, 4, 4)), X0, geo.minkowski())


def test_incompatible_constant_contorsion_rejected():
    with pytest.raises(CompatibilityError):
        af.ContorsionField.constant(np.ones((4, 4, 4)), geo.minkowski())


@pytest.mark.parametrize("seed", range(3))
def test_b_dictionary_by_matrix_oracle(seed):
    """[B_mu, dx^n] = K^n_{mu l} dx^l, checked with gamma matrices on Minkowski."""
    rng = np.random.default_rng(seed)
    mf = geo.minkowski()
    rep = GammaRep(np.linalg.inv(alg.ETA))
    K = af.random_contorsion_field(rng, mf)
    B = af.b_from_contorsion(K, X0)
    k = K(X0)
    for mu in range(4):
        Bm = rep.to_matrix(B[mu])
        for nu in range(4):
            dn = rep.to_matrix(alg.blade(nu))
            got = rep.from_matrix(Bm @ dn - dn @ Bm)
            assert np.allclose(got, alg.vector(k[nu, mu]), atol=1e-12)


def test_b_inverse_map_on_curved_metric():
    mf = geo.flrw()
    K = af.random_contorsion_field(np.random.default_rng(1), mf)
    B = af.b_from_contorsion(K, X0)
    assert np.abs(af.contorsion_from_B(B, mf.at(X0)) - K(X0)).max() < 1e-12


@pytest.mark.parametrize("name", ["minkowski", "flrw"])
def test_compatible_connection_preserves_metric(name):
    mf = geo.metric_catalog(name)
    conn = af.AffineConnectionField(af.random_contorsion_field(np.random.default_rng(2), mf))
    assert np.abs(conn.nabla_metric(X0)).max() < 1e-13
    T = conn.torsion(X0)
    assert np.allclose(T, -T.transpose(0, 2, 1))


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from(["minkowski", "flrw"]), st.integers(0, 3))
def test_contorsion_split_of_derivative(seed, name, mu):
    rng = np.random.default_rng(seed)
    mf = geo.metric_catalog(name)
    K = af.random_contorsion_field(rng, mf)
    U = fl.random_multivector_field(rng)
    r = af.contorsion_split_residual(U, K, X0, mf, mu)
    assert np.abs(r).max() < FD * (1 + np.abs(U(X0)).max())


def test_contorsion_split_zero_contorsion():
    mf = geo.flrw()
    U = fl.random_multivector_field(np.random.default_rng(0))
    assert np.abs(af.contorsion_split_residual(U, af.ContorsionField.zero(mf), X0, mf, 1)).max() == 0


@pytest.mark.parametrize("name", ["minkowski", "flrw"])
def test_affine_curvature_equals_minus_twice_q(name):
    mf = geo.metric_catalog(name)
    K = af.random_contorsion_field(np.random.default_rng(3), mf)
    q, rc, res = af.affine_curvature_check(K, X0, mf)
    assert res < NESTED * (1 + np.abs(rc).max())
    assert np.abs(rc).max() > 1e-3  # nontrivial


def test_affine_curvature_reduces_to_riemann():
    mf = geo.flrw()
    conn = af.AffineConnectionField(af.ContorsionField.zero(mf))
    rc = af.affine_curvature(conn, X0)
    assert np.abs(rc - geo.riemann(mf, X0).riemann_lower).max() < NESTED


@pytest.mark.parametrize("name", ["flrw", "conformally-flat", "polynomial-perturbed"])
def test_coframe_connection_is_flat(name):
    mf = geo.metric_catalog(name)
    W = af.weitzenbock_affine(mf)
    q, rc, _ = af.affine_curvature_check(W.K, X0, mf, conn=W)
    assert np.abs(rc).max() < NESTED
    assert np.abs(q).max() < NESTED
    assert np.abs(W.nabla_metric(X0)).max() < 1e-8


def _bb_max(B, mf, x):
    return max(np.abs(af.bb_residual(B, x, mf, mu, nu)).max() for mu in range(4) for nu in range(mu + 1, 4))


@pytest.mark.parametrize("seed", range(3))
def test_pure_gauge_potential_is_flat(seed):
    mf = geo.minkowski()
    U = fl.random_spin_field(np.random.default_rng(seed), mf)
    B = af.pure_gauge_field(U, mf)
    scale = 1 + np.abs(B(X0)).max()
    assert _bb_max(B, mf, X0) < NESTED * scale
    K = af.ContorsionField(lambda y: af.contorsion_from_B(B(y), mf.at(y)), mf)
    assert np.abs(af.affine_curvature(af.AffineConnectionField(K), X0)).max() < NESTED * scale


def test_pure_gauge_with_printed_sign_fails():
    """B = +U^-1 dU does not solve the flat system; B = -U^-1 dU does."""
    mf = geo.minkowski()
    U = fl.random_spin_field(np.random.default_rng(0), mf)
    bad = af.pure_gauge_field(U, mf, sign=+1.0)
    good = af.pure_gauge_field(U, mf)
    assert _bb_max(bad, mf, X0) > 1e-2
    assert _bb_max(good, mf, X0) < 1e-6


def test_pure_gauge_preconditions():
    with pytest.raises(PreconditionError):
        af.spin_pure_gauge_B(fl.Field.constant(alg.scalar()), X0, geo.flrw())
    with pytest.raises(NotSpinError):
        af.spin_pure_gauge_B(fl.Field.constant(2 * alg.scalar()), X0, geo.minkowski())
