import numpy as np
import pytest

from isoprincipal import ratfun
from isoprincipal.errors import NotRankOne, RelationViolation, ZeroVector
from isoprincipal.singularity import (
    PrincipalFactor,
    SingularityKind,
    classify_point,
    laurent_coeffs,
    local_data,
    principal_factor_at,
    principal_factor_from_semiresidue,
    semiresidues,
    verify_regular_factor,
)

from conftest import crandn, random_ratfun

POLE, ZERO = SingularityKind.POLE, SingularityKind.ZERO


# -- Laurent coefficients ------------------------------------------------------------------

def test_laurent_simple_pole():
    M = np.array([[1.0, 2j], [3.0, -1.0]])
    (c,) = laurent_coeffs(lambda z: M / (z - 0.5), 0.5, 0.1, [-1])
    assert np.linalg.norm(c - M) <= 1e-10


def test_laurent_constant():
    K = np.array([[2.0, 1.0], [0.0, 1j]])
    c0, cm1 = laurent_coeffs(lambda z: K, 1j, 0.3, [0, -1])
    assert np.linalg.norm(c0 - K) <= 1e-14
    assert np.linalg.norm(cm1) <= 1e-14


def test_laurent_three_terms():
    rng = np.random.default_rng(0)
    A, B, C = (crandn(rng, 3, 3) for _ in range(3))
    t = 0.2 - 0.7j
    f = lambda z: A / (z - t) + B + C * (z - t)
    a, b, c = laurent_coeffs(f, t, 0.1, [-1, 0, 1], 256)
    for got, want in [(a, A), (b, B), (c, C)]:
        assert np.linalg.norm(got - want) <= 1e-9


# -- classification and local data ------------------------------------------------------------

def test_classify(scalar_pz):
    assert classify_point(scalar_pz, 0.0) is POLE
    assert classify_point(scalar_pz, 1.0) is ZERO
    assert classify_point(scalar_pz, 5.0) is SingularityKind.REGULAR


def test_local_data_scalar_pole(scalar_pz):
    d = local_data(scalar_pz, 0.0)
    assert d.kind is POLE
    # R'R^-1 = 1/(z-1) - 1/z = -1/z - 1 - z - ... near 0
    assert abs(d.residue_R[0, 0] + 1) <= 1e-12
    assert abs(d.Q_t[0, 0] + 1) <= 1e-12
    assert abs(d.C_t[0, 0] + 1) <= 1e-12
    assert max(d.relation_residuals()) <= 1e-12


def test_local_data_scalar_zero(scalar_pz):
    d = local_data(scalar_pz, 1.0)
    assert d.kind is ZERO
    assert abs(d.residue_R[0, 0] - 1) <= 1e-12
    assert abs(d.Q_t[0, 0] - 1) <= 1e-12
    # 1/(z-1) - 1/z at z = 1 + w: constant term -1
    assert abs(d.C_t[0, 0] + 1) <= 1e-12


def test_local_data_rejects_regular_point(scalar_pz):
    with pytest.raises(ValueError):
        local_data(scalar_pz, 3.0)


@pytest.mark.parametrize("m,n,seed", [(2, 2, 0), (3, 3, 1), (5, 2, 2), (4, 4, 3)])
@pytest.mark.parametrize("variant", ["PZ", "ZP"])
def test_local_relations_random(m, n, seed, variant):
    R = random_ratfun(m, n, seed, variant)
    closed = R.residues()
    for k in range(2 * n):
        d = local_data(R, R.loci.t[k])
        assert max(d.relation_residuals()) <= 1e-8
        assert d.subspace_mismatch() <= 1e-6
        assert np.linalg.norm(d.Q_t - closed.Q[k], 2) <= 1e-8 * max(1.0, np.linalg.norm(d.Q_t, 2))


def test_local_data_detects_inconsistency(scalar_pz):
    # double pole at 0: the log-derivative residue is -2, so Q^2 + Q != 0
    class Fake:
        loci = scalar_pz.loci
        poles, zeros = scalar_pz.poles, scalar_pz.zeros
        evaluate = staticmethod(lambda z: np.array([[(z - 1) ** 2 / z ** 2]]))
        evaluate_inverse = staticmethod(lambda z: np.array([[z ** 2 / (z - 1) ** 2]]))
        log_derivative = staticmethod(lambda z: np.array([[2 / (z - 1) - 2 / z]]))

    with pytest.raises(RelationViolation):
        local_data(Fake(), 0.0)


# -- semiresidues and principal factors ------------------------------------------------------

def test_semiresidues_delegate():
    f, g = semiresidues(np.array([[1.0, 2.0], [2.0, 4.0]]))
    np.testing.assert_allclose(f @ g, [[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(NotRankOne):
        semiresidues(np.eye(2))


def test_principal_factor_zero_example():
    E = principal_factor_from_semiresidue(ZERO, [1.0, 0.0])
    np.testing.assert_array_equal(E.L, [[1, 0], [0, 0]])
    np.testing.assert_allclose(E(3.0), np.diag([3.0, 1.0]))


def test_principal_factor_pole_example():
    E = principal_factor_from_semiresidue(POLE, [0.0, 1.0])
    np.testing.assert_array_equal(E.L, [[0, 0], [0, -1]])
    for zeta in (2.0, 0.5j, -3 + 1j):
        np.testing.assert_allclose(E(zeta), np.diag([1.0, 1.0 / zeta]), atol=1e-15)


def test_principal_factor_scale_invariance():
    rng = np.random.default_rng(1)
    v = crandn(rng, 4)
    for kind in (POLE, ZERO):
        L = principal_factor_from_semiresidue(kind, v).L
        np.testing.assert_array_equal(principal_factor_from_semiresidue(kind, 2 * v).L, L)
        np.testing.assert_array_equal(principal_factor_from_semiresidue(kind, -4 * v).L, L)
        c = 0.3 - 1.7j
        assert np.linalg.norm(principal_factor_from_semiresidue(kind, c * v).L - L) <= 1e-15


def test_principal_factor_invariants():
    rng = np.random.default_rng(2)
    for kind in (POLE, ZERO):
        E = principal_factor_from_semiresidue(kind, crandn(rng, 3))
        assert E.idempotency_residual() <= 1e-12
        for zeta in crandn(rng, 5):
            assert np.linalg.norm(E(zeta) @ E.inverse(zeta) - np.eye(3)) <= 1e-12


def test_principal_factor_zero_vector():
    with pytest.raises(ZeroVector):
        principal_factor_from_semiresidue(POLE, [0.0, 0.0])
    with pytest.raises(ValueError):
        principal_factor_from_semiresidue(SingularityKind.REGULAR, [1.0])


# -- regular factors ---------------------------------------------------------------------------

def test_regular_factor_scalar(scalar_pz):
    E0 = principal_factor_at(scalar_pz, 0)
    assert E0.L[0, 0] == -1
    assert abs(E0(0.25)[0, 0] - 4.0) <= 1e-15
    assert verify_regular_factor(scalar_pz, E0, 0.0).passed
    E1 = principal_factor_at(scalar_pz, 1)
    assert abs(E1(0.25)[0, 0] - 0.25) <= 1e-15
    assert verify_regular_factor(scalar_pz, E1, 1.0).passed


def test_regular_factor_negative_control(scalar_pz):
    wrong = PrincipalFactor(POLE, np.zeros((1, 1)))
    rep = verify_regular_factor(scalar_pz, wrong, 0.0)
    assert not rep.passed
    assert not rep["regular_factor_residue"].passed


@pytest.mark.parametrize("m,n,seed", [(2, 2, 0), (3, 3, 1), (5, 3, 2), (1, 3, 3)])
def test_regular_factor_random(m, n, seed):
    R = random_ratfun(m, n, seed)
    for k in range(2 * n):
        rep = verify_regular_factor(R, principal_factor_at(R, k), R.loci.t[k])
        assert rep.passed, rep.summary()


def test_regular_factor_wrong_locus():
    # a factor built for one pole does not regularise another
    R = random_ratfun(3, 2, 4)
    rep = verify_regular_factor(R, principal_factor_at(R, 0), R.loci.t[1])
    assert not rep.passed
