import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoprincipal import family as fam
from isoprincipal import linalg, problem, ratfun
from isoprincipal.errors import NearSingularSet, NotAdmissible, PathHitsSingularSet
from isoprincipal.singularity import laurent_coeffs, row_projector

from conftest import crandn

# real data whose det S_PZ vanishes at t = (0, 6/3.25, 2, 3)
GAMMA_F = np.array([[1.0, 2.0], [0.5, -1.0]])
GAMMA_G = np.array([[1.0, 1.0], [2.0, -1.0]])


def random_family(m, n, seed):
    p = problem.random_problem(m, n, seed)
    return fam.make_family(p.F, p.G), p.t


@pytest.fixture
def scalar():
    return fam.make_family([[1.0]], [[1.0]])


# -- admissibility -------------------------------------------------------------------------

def test_admissibility_examples(scalar):
    assert scalar.admissible
    assert not fam.make_family([[1.0], [0.0]], [[0.0, 1.0]]).admissible  # G F = 0
    assert not fam.make_family(np.eye(2), [[0.0, 1.0], [0.0, 1.0]]).admissible


def test_inadmissible_handle_is_inert():
    h = fam.make_family(np.eye(2), [[0.0, 1.0], [0.0, 1.0]])
    t = [0.0, 1.0, 2.0, 3.0]
    for call in (lambda: fam.coupling_at(h, t), lambda: fam.family_point(h, t),
                 lambda: fam.schlesinger_state(h, t), lambda: fam.family_eval(h, t, 5.0)):
        with pytest.raises(NotAdmissible):
            call()


def test_make_family_shape_check():
    with pytest.raises(ValueError):
        fam.make_family(np.ones((2, 3)), np.ones((2, 3)))


# -- coupling ---------------------------------------------------------------------------------

def test_coupling_scalar(scalar):
    assert fam.coupling_at(scalar, [0.0, 1.0])[0, 0] == -1
    assert fam.coupling_at(scalar, [0.0, 1.0], "ZP")[0, 0] == 1


def test_coupling_permutation_duality():
    h, t = random_family(2, 3, 0)
    swapped = np.concatenate([t[3:], t[:3]])
    np.testing.assert_array_equal(fam.coupling_at(h, swapped, "PZ"), fam.coupling_at(h, t, "ZP"))


@pytest.mark.parametrize("seed", range(4))
def test_coupling_entries_and_lyapunov(seed):
    h, t = random_family(2, 3, seed)
    S = fam.coupling_at(h, t)
    GF = h.G @ h.F
    for i in range(3):
        for j in range(3):
            assert S[i, j] == GF[i, j] / (t[i] - t[3 + j])
    res = np.diag(t[:3]) @ S - S @ np.diag(t[3:]) - GF
    assert np.linalg.norm(res) <= 1e-13 * np.linalg.norm(GF)


def test_coupling_derivative_matches_fd():
    h, t = random_family(2, 3, 1)
    eps = 1e-6
    for i in range(6):
        e = np.zeros(6)
        e[i] = eps
        fd = (fam.coupling_at(h, t + e) - fam.coupling_at(h, t - e)) / (2 * eps)
        exact = fam.coupling_derivative(h, t, i)
        assert np.linalg.norm(fd - exact) <= 1e-7 * max(1.0, np.linalg.norm(exact))


# -- evaluation and state --------------------------------------------------------------------

def test_family_eval_scalar(scalar):
    assert fam.family_eval(scalar, [0.0, 1.0], 2.0)[0, 0] == pytest.approx(0.5, abs=1e-15)
    assert abs(fam.family_eval(scalar, [0.0, 1.0], 1e9)[0, 0] - 1) <= 1e-8


@pytest.mark.parametrize("seed", range(3))
def test_family_eval_matches_ratfun(seed):
    h, t = random_family(3, 2, seed)
    R = ratfun.build(t, (h.F, h.G), "PZ")
    for z in 3 * crandn(np.random.default_rng(seed), 5):
        assert np.linalg.norm(fam.family_eval(h, t, z) - R(z), 2) <= 1e-12 * np.linalg.norm(R(z), 2)


@pytest.mark.parametrize("t", [(0.0, 1.0), (2.0 + 1j, -0.5), (0.1j, 0.3)])
def test_state_scalar(scalar, t):
    s = fam.schlesinger_state(scalar, t)
    t1, t2 = t
    assert abs(s.Q[0][0, 0] + 1) <= 1e-12
    assert abs(s.Q[1][0, 0] - 1) <= 1e-12
    assert abs(s.V[0, 0] - (t2 - t1)) <= 1e-12 * abs(t2 - t1)
    assert abs(s.tau - 1 / (t1 - t2)) <= 1e-12 * abs(s.tau)


@pytest.mark.parametrize("seed", range(4))
def test_state_residues(seed):
    h, t = random_family(2, 2 + seed % 2, seed)
    s = fam.schlesinger_state(h, t)
    qs = max(np.linalg.norm(q, 2) for q in s.Q)
    assert np.linalg.norm(sum(s.Q), 2) <= 1e-10 * max(1.0, qs)
    R = ratfun.build(t, (h.F, h.G), "PZ")
    closed = R.residues().Q
    for k, tk in enumerate(t):
        r = 0.25 * R.loci.distance_to_others(k)
        (Qk,) = laurent_coeffs(R.log_derivative, tk, r, [-1])
        assert np.linalg.norm(Qk - s.Q[k], 2) <= 1e-8 * max(1.0, qs)
        assert np.linalg.norm(closed[k] - s.Q[k], 2) <= 1e-10 * max(1.0, qs)
    assert abs(s.tau) > 0


def test_near_singular_set_refused():
    h = fam.make_family(GAMMA_F, GAMMA_G)
    with pytest.raises(NearSingularSet):
        fam.schlesinger_state(h, [0.0, 6 / 3.25, 2.0, 3.0])


def test_gauge_invariance():
    h, t = random_family(3, 3, 2)
    rng = np.random.default_rng(3)
    dc, dr = crandn(rng, 3), crandn(rng, 3)
    h2 = fam.make_family(h.F * dc, dr[:, None] * h.G)
    a, b = fam.schlesinger_state(h, t), fam.schlesinger_state(h2, t)
    qs = max(np.linalg.norm(q, 2) for q in a.Q)
    for qa, qb in zip(a.Q, b.Q):
        assert np.linalg.norm(qa - qb, 2) <= 1e-10 * qs
    assert np.linalg.norm(a.V - b.V, 2) <= 1e-10 * np.linalg.norm(a.V, 2)
    assert abs(b.tau - a.tau * np.prod(dc) * np.prod(dr)) <= 1e-10 * abs(b.tau)
    z = 2.0 + 3.0j
    Ra = fam.family_eval(h, t, z)
    assert np.linalg.norm(fam.family_eval(h2, t, z) - Ra, 2) <= 1e-10 * np.linalg.norm(Ra, 2)


# -- Schlesinger system ---------------------------------------------------------------------

@pytest.mark.parametrize("t", [(0.0, 1.0), (0.0, 1.0, 2.5j, -1.0 + 0.5j)])
def test_schlesinger_scalar(t):
    n = len(t) // 2
    h = fam.make_family(np.ones((1, n)), np.arange(1.0, n + 1).reshape(n, 1))
    assert fam.schlesinger_residual(h, t) <= 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_schlesinger_random(seed):
    h, t = random_family(2, 2, seed)
    assert fam.schlesinger_residual(h, t, 1e-5) <= 1e-6
    assert fam.cauchy_riemann_residual(h, t, 1e-5) <= 1e-5


def test_schlesinger_second_order():
    h, t = random_family(2, 2, 7)
    r1 = fam.schlesinger_residual(h, t, 1e-2)
    r2 = fam.schlesinger_residual(h, t, 5e-3)
    assert 3.5 <= r1 / r2 <= 4.5


def test_schlesinger_detects_wrong_residues(monkeypatch):
    h, t = random_family(2, 2, 1)
    good = fam._state

    def flipped(point):
        s = good(point)
        return fam.SchlesingerState([q.T for q in s.Q], s.V, s.tau)

    monkeypatch.setattr(fam, "_state", flipped)
    assert fam.schlesinger_residual(h, t) > 1e-3


# -- potential and tau -----------------------------------------------------------------------

def test_potential_scalar(scalar):
    assert fam.potential_check(scalar, [0.0, 1.0]) <= 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_potential_random(seed):
    h, t = random_family(2, 2, seed)
    assert fam.potential_check(h, t, 1e-5) <= 1e-6
    V = fam.schlesinger_state(h, t).V
    assert np.linalg.norm(fam.potential_at_infinity(h, t) - V, 2) <= 1e-6 * max(1.0, np.linalg.norm(V, 2))


def test_tau_logderiv_scalar(scalar):
    assert fam.tau_logderiv_check(scalar, [0.0, 1.0]) <= 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_tau_logderiv_random(seed):
    h, t = random_family(2, 2, seed)
    assert fam.tau_logderiv_check(h, t, 1e-5) <= 1e-6


def test_tau_path_empty(scalar):
    assert fam.tau_path_integral(scalar, [0.0, 1.0], [0.0, 1.0]) == -1


def test_tau_path_scalar(scalar):
    # tau halves; trapezoid error ~ steps^-2 on this unit-length path
    e = [abs(fam.tau_path_integral(scalar, [0.0, 1.0], [0.0, 2.0], s) + 0.5) / 0.5 for s in (2048, 4096)]
    assert e[1] <= 1e-8
    assert 3.5 <= e[0] / e[1] <= 4.5


@pytest.mark.parametrize("seed", range(3))
def test_tau_path_random_convergence(seed):
    h, t = random_family(2, 2, seed)
    t1 = t + 0.4 * np.exp(1j * np.arange(4)) / 2
    direct = fam.schlesinger_state(h, t1).tau
    e = [abs(fam.tau_path_integral(h, t, t1, s) - direct) / abs(direct) for s in (64, 128, 256)]
    assert e[2] <= 1e-6
    assert 3.5 <= e[0] / e[1] <= 4.5


def test_tau_path_homotopic_paths_agree():
    h, t = random_family(2, 2, 3)
    t1 = t + 0.3
    tm = t + 0.15 + 0.1j
    direct = fam.tau_path_integral(h, t, t1, 512)
    via = fam.tau_path_integral(h, tm, t1, 512) / fam.schlesinger_state(h, tm).tau \
        * fam.tau_path_integral(h, t, tm, 512)
    assert abs(direct - via) <= 1e-6 * abs(direct)


@pytest.mark.parametrize("steps", [4, 16, 256])
def test_tau_path_crossing_singular_set(steps):
    h = fam.make_family(GAMMA_F, GAMMA_G)
    t0, t1 = np.array([0.0, 1.0, 2.0, 3.0]), np.array([0.0, 1.9, 2.0, 3.0])
    d0 = linalg.det(fam.coupling_at(h, t0)).real
    d1 = linalg.det(fam.coupling_at(h, t1)).real
    assert d0 * d1 < 0
    with pytest.raises(PathHitsSingularSet):
        fam.tau_path_scan(h, t0, t1, steps)


# -- isoprincipality --------------------------------------------------------------------------

def test_isoprincipal_scalar(scalar):
    assert fam.isoprincipal_check(scalar, [0.0, 1.0], [0.5j, 2.0]) <= 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_isoprincipal_random(seed):
    h, t = random_family(3, 2, seed)
    t2 = t + 0.05 * crandn(np.random.default_rng(seed), 4)
    assert fam.isoprincipal_check(h, t, t2) <= 1e-9


def test_isoprincipal_negative_control():
    h, _ = random_family(3, 2, 0)
    assert np.linalg.norm(row_projector(h.G[0]) - row_projector(h.G[1]), 2) > 0.1


# -- properties -------------------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(m=st.integers(1, 4), n=st.integers(1, 4), seed=st.integers(0, 10_000))
def test_state_invariants_property(m, n, seed):
    h, t = random_family(m, n, seed)
    point = fam.family_point(h, t)
    GF = h.G @ h.F
    res = np.diag(t[:n]) @ point.S - point.S @ np.diag(t[n:]) - GF
    assert np.linalg.norm(res) <= 1e-12 * np.linalg.norm(GF)
    s = fam.schlesinger_state(h, t)
    assert np.linalg.norm(sum(s.Q), 2) <= 1e-10 * max(1.0, max(np.linalg.norm(q, 2) for q in s.Q))
