"""Families of generic rational functions with constant semiresidual data.

For fixed ``F`` (``m x n``) and ``G`` (``n x m``) and moving loci ``t``, the
PZ coupling matrix ``S(t)_ij = (G F)_ij / (t_i - t_{n+j})`` defines

``R(z, t) = I + F S(t)^-1 (zI - A_P(t))^-1 G``.

The residues ``Q_k(t)`` of ``R' R^-1`` solve the Schlesinger system.  Their
potential is ``V(t) = -F S(t)^-1 G`` and their tau function is ``det S(t)``.
All checks here are numerical: finite differences in ``t`` are compared with
closed forms, and trapezoidal path integrals with direct determinants.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import linalg
from .errors import NearSingularSet, NotAdmissible, PathHitsSingularSet, SpectraCollide
from .ratfun import COND_MAX, GenericRatFn, PoleZeroLoci, SemiresidualPair
from .singularity import column_projector, laurent_coeffs, row_projector

__all__ = [
    "FamilyHandle",
    "FamilyPoint",
    "SchlesingerState",
    "TauPath",
    "make_family",
    "family_point",
    "coupling_at",
    "coupling_derivative",
    "family_eval",
    "schlesinger_state",
    "schlesinger_residual",
    "cauchy_riemann_residual",
    "potential_check",
    "potential_at_infinity",
    "tau_logderiv_check",
    "tau_path_scan",
    "tau_path_integral",
    "isoprincipal_check",
    "default_step",
    "COND_MAX_PATH",
]

COND_MAX_PATH = 1e8


def default_step(t) -> float:
    return 1e-5 * (1.0 + float(np.abs(np.asarray(t)).max()))


def _as_loci(t) -> PoleZeroLoci:
    return t if isinstance(t, PoleZeroLoci) else PoleZeroLoci(t)


@dataclass(frozen=True, eq=False)
class FamilyHandle:
    """Constant semiresidual data of a family and its admissibility verdict.

    An inadmissible handle is inert: every point constructor refuses it.
    """

    F: np.ndarray
    G: np.ndarray
    admissible: bool

    @property
    def m(self) -> int:
        return self.F.shape[0]

    @property
    def n(self) -> int:
        return self.F.shape[1]

    @property
    def GF(self) -> np.ndarray:
        return self.G @ self.F

    @property
    def pair(self) -> SemiresidualPair:
        return SemiresidualPair(self.F, self.G)

    def require_admissible(self):
        if not self.admissible:
            raise NotAdmissible("G F is Frobenius-singular; the coupling determinant vanishes identically")


def make_family(F, G) -> FamilyHandle:
    """Wrap ``(F, G)`` and decide admissibility by the matching test on ``G F``."""
    F = linalg.as_matrix(F)
    G = linalg.as_matrix(G)
    if G.shape != F.shape[::-1]:
        raise ValueError(f"shapes F{F.shape} and G{G.shape} are not m x n and n x m")
    F.setflags(write=False)
    G.setflags(write=False)
    return FamilyHandle(F, G, not linalg.is_frobenius_singular(G @ F))


def coupling_at(h: FamilyHandle, t, which: str = "PZ") -> np.ndarray:
    """``S_PZ(t)`` or ``S_ZP(t)`` in closed Cauchy-like form."""
    h.require_admissible()
    loci = _as_loci(t)
    if loci.n != h.n:
        raise ValueError(f"family has n={h.n}, got {loci.n} pole/zero pairs")
    if which == "PZ":
        return linalg.solve_lyapunov_diag(loci.poles, loci.zeros, h.GF)
    if which == "ZP":
        return linalg.solve_lyapunov_diag(loci.zeros, loci.poles, h.GF)
    raise ValueError(f"which must be 'PZ' or 'ZP', got {which!r}")


def coupling_derivative(h: FamilyHandle, t, i: int) -> np.ndarray:
    """``dS_PZ/dt_i`` in closed form (0-based ``i``)."""
    loci = _as_loci(t)
    S = coupling_at(h, loci)
    n = h.n
    dS = np.zeros_like(S)
    if i < n:
        dS[i, :] = -S[i, :] / (loci.t[i] - loci.zeros)
    else:
        q = i - n
        dS[:, q] = S[:, q] / (loci.poles - loci.t[i])
    return dS


@dataclass(frozen=True, eq=False)
class FamilyPoint:
    handle: FamilyHandle
    loci: PoleZeroLoci
    S: np.ndarray
    cond: float

    def ratfun(self) -> GenericRatFn:
        return GenericRatFn(self.loci, self.handle.pair, "PZ", self.S, self.cond)


def family_point(h: FamilyHandle, t, cond_max: float = COND_MAX) -> FamilyPoint:
    """The family member at ``t``.

    Raises
    ------
    NotAdmissible
        For an inadmissible handle.
    NearSingularSet
        If ``cond(S_PZ(t)) >= cond_max``.
    """
    loci = _as_loci(t)
    S = coupling_at(h, loci)
    cond = linalg.cond_estimate(S)
    if not cond < cond_max:
        raise NearSingularSet(f"cond(S_PZ) = {cond:.3e} >= {cond_max:.1e} at t = {loci.t}")
    return FamilyPoint(h, loci, S, cond)


def family_eval(h: FamilyHandle, t, z) -> np.ndarray:
    """``R(z, t)``."""
    return family_point(h, t).ratfun().evaluate(z)


@dataclass(frozen=True, eq=False)
class SchlesingerState:
    Q: list
    V: np.ndarray
    tau: complex


def _state(point: FamilyPoint) -> SchlesingerState:
    h, loci, S = point.handle, point.loci, point.S
    F, G = h.F, h.G
    Sinv = linalg.lu_solve(S, np.eye(h.n))
    FS, SG = F @ Sinv, Sinv @ G
    Q = []
    for k, tk in enumerate(loci.poles):
        row = (S[k] / (tk - loci.zeros)) @ SG
        Q.append(-np.outer(FS[:, k], row))
    for j, tk in enumerate(loci.zeros):
        col = (FS / (tk - loci.poles)) @ S[:, j]
        Q.append(-np.outer(col, SG[j]))
    return SchlesingerState(Q, -F @ SG, complex(linalg.det(S)))


def schlesinger_state(h: FamilyHandle, t, cond_max: float = COND_MAX) -> SchlesingerState:
    """The :class:`SchlesingerState` at ``t``; its ``tau`` is ``det S_PZ(t)``."""
    return _state(family_point(h, t, cond_max))


def _shifted(t: np.ndarray, k: int, delta: complex) -> np.ndarray:
    s = t.copy()
    s[k] += delta
    return s


def _partials(fun, t: np.ndarray, step: float, direction: complex = 1.0) -> list:
    """Central differences of ``fun`` along ``direction`` in each coordinate of ``t``."""
    d = step * direction
    return [(fun(_shifted(t, k, d)) - fun(_shifted(t, k, -d))) / (2 * d) for k in range(t.size)]


def _loci_array(t) -> np.ndarray:
    return np.array(_as_loci(t).t)


def _Q_stack(h):
    return lambda s: np.array(schlesinger_state(h, s).Q)


def _q_scale(Q) -> float:
    return max(1.0, max(np.linalg.norm(q, 2) for q in Q))


def schlesinger_residual(h: FamilyHandle, t, step: float | None = None) -> float:
    """Max finite-difference residual of the Schlesinger system at ``t``.

    Off-diagonal equations ``dQ_k/dt_l = [Q_l, Q_k]/(t_l - t_k)`` and the
    diagonal ones ``dQ_k/dt_k = sum_{l != k} [Q_l, Q_k]/(t_k - t_l)`` are
    checked with central differences in the real direction.  Residuals are
    divided by ``max(1, max_k ||Q_k||)``; the truncation error of the
    differences grows with the size of the residues.
    """
    t = _loci_array(t)
    step = default_step(t) if step is None else step
    Q = schlesinger_state(h, t).Q
    dQ = _partials(_Q_stack(h), t, step)
    N = t.size
    comm = [[Q[l] @ Q[k] - Q[k] @ Q[l] for k in range(N)] for l in range(N)]
    worst = 0.0
    for k in range(N):
        for l in range(N):
            if l != k:
                expect = comm[l][k] / (t[l] - t[k])
            else:
                expect = sum(comm[j][k] / (t[k] - t[j]) for j in range(N) if j != k)
            worst = max(worst, np.linalg.norm(dQ[l][k] - expect, 2))
    return float(worst / _q_scale(Q))


def cauchy_riemann_residual(h: FamilyHandle, t, step: float | None = None) -> float:
    """Max mismatch between real- and imaginary-direction derivatives of every ``Q_k``.

    Scaled like :func:`schlesinger_residual`.
    """
    t = _loci_array(t)
    step = default_step(t) if step is None else step
    fun = _Q_stack(h)
    re = _partials(fun, t, step, 1.0)
    im = _partials(fun, t, step, 1j)
    worst = max(np.linalg.norm(a - b, 2, axis=(1, 2)).max() for a, b in zip(re, im))
    return float(worst / _q_scale(fun(t)))


def potential_at_infinity(h: FamilyHandle, t, radii=(1e4, 1e6), direction: float = 0.3) -> np.ndarray:
    """``V`` as minus the ``1/z`` coefficient of ``R(z, t)``, by Richardson extrapolation.

    ``c(z) = z (I - R(z))`` behaves like ``V + B/z``; two samples on a ray
    eliminate ``B``.
    """
    R = family_point(h, t).ratfun()
    z1, z2 = (r * np.exp(1j * direction) for r in radii)
    eye = np.eye(h.m)
    c1 = z1 * (eye - R.evaluate(z1))
    c2 = z2 * (eye - R.evaluate(z2))
    return (z2 * c2 - z1 * c1) / (z2 - z1)


def potential_check(h: FamilyHandle, t, step: float | None = None) -> float:
    """Max of ``||dV/dt_k - Q_k||`` and the large-``z`` mismatch of ``V``.

    The gradient term is divided by ``max(1, max_k ||Q_k||)`` and the
    large-``z`` term by ``max(1, ||V||)``.
    """
    t = _loci_array(t)
    step = default_step(t) if step is None else step
    st = schlesinger_state(h, t)
    dV = _partials(lambda s: schlesinger_state(h, s).V, t, step)
    grad = max(np.linalg.norm(d - q, 2) for d, q in zip(dV, st.Q)) / _q_scale(st.Q)
    far = np.linalg.norm(potential_at_infinity(h, t) - st.V, 2) / max(1.0, np.linalg.norm(st.V, 2))
    return float(max(grad, far))


def _tau_rhs(Q, t) -> np.ndarray:
    """``sum_{j != i} tr(Q_i Q_j) / (t_i - t_j)`` for every ``i``."""
    N = t.size
    out = np.zeros(N, dtype=np.complex128)
    for i in range(N):
        for j in range(N):
            if j != i:
                out[i] += np.trace(Q[i] @ Q[j]) / (t[i] - t[j])
    return out


def tau_logderiv_check(h: FamilyHandle, t, step: float | None = None) -> float:
    """Compare ``d log tau / dt_i`` with ``sum_{j != i} tr(Q_i Q_j)/(t_i - t_j)``.

    The log-derivative is computed by central differences of ``log tau``
    (as the log of the ratio, which stays on the principal branch for small
    steps) and by the Jacobi formula ``tr(S^-1 dS/dt_i)`` with the closed
    form derivative.  Mismatches are relative to ``max(1, |rhs_i|)``.
    """
    t = _loci_array(t)
    step = default_step(t) if step is None else step
    point = family_point(h, t)
    rhs = _tau_rhs(_state(point).Q, t)
    tau = lambda s: schlesinger_state(h, s).tau
    worst = 0.0
    for i in range(t.size):
        fd = np.log(tau(_shifted(t, i, step)) / tau(_shifted(t, i, -step))) / (2 * step)
        jac = np.trace(linalg.lu_solve(point.S, coupling_derivative(h, t, i)))
        scale = max(1.0, abs(rhs[i]))
        worst = max(worst, abs(fd - rhs[i]) / scale, abs(jac - rhs[i]) / scale)
    return float(worst)


@dataclass(frozen=True, eq=False)
class TauPath:
    """Samples of ``tau`` along ``t(s) = t0 + s (t1 - t0)``, ``s`` in ``[0, 1]``.

    ``predicted`` is ``tau(t0)`` times the exponential of the running
    trapezoidal integral of ``d log tau``; ``direct`` is ``det S_PZ(t(s))``.
    """

    s: np.ndarray
    predicted: np.ndarray
    direct: np.ndarray
    cond: np.ndarray

    @property
    def rel_mismatch(self) -> float:
        return float(abs(self.predicted[-1] - self.direct[-1]) / abs(self.direct[-1]))


def _refine_cond_peak(h, t0, dt, a, b, cond_max_path):
    def neg_log_cond(s):
        try:
            c = linalg.cond_estimate(coupling_at(h, t0 + s * dt))
        except SpectraCollide:
            return -np.inf
        return -np.log(c)

    res = minimize_scalar(neg_log_cond, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
    if -res.fun >= np.log(cond_max_path):
        raise PathHitsSingularSet(f"cond(S_PZ) >= {cond_max_path:.1e} near s = {res.x:.12f}")


def tau_path_scan(h: FamilyHandle, t0, t1, steps: int = 256,
                  cond_max_path: float = COND_MAX_PATH) -> TauPath:
    """Integrate ``d log tau`` along the straight segment from ``t0`` to ``t1``.

    Every node must have ``cond(S_PZ) < cond_max_path``; around local
    maxima of the sampled condition number a bounded scalar search looks for
    a crossing of the singular set between nodes.

    Raises
    ------
    PathHitsSingularSet
    """
    h.require_admissible()
    t0, t1 = _loci_array(t0), _loci_array(t1)
    dt = t1 - t0
    if not np.any(dt):
        p = family_point(h, t0, cond_max_path)
        tau = complex(linalg.det(p.S))
        return TauPath(np.zeros(1), np.array([tau]), np.array([tau]), np.array([p.cond]))

    s = np.linspace(0.0, 1.0, steps + 1)
    direct = np.empty(s.size, dtype=np.complex128)
    cond = np.empty(s.size)
    dlog = np.empty(s.size, dtype=np.complex128)
    for j, sj in enumerate(s):
        tj = t0 + sj * dt
        try:
            p = family_point(h, tj, cond_max_path)
        except NearSingularSet as exc:
            raise PathHitsSingularSet(f"at s = {sj:.6f}: {exc}") from None
        st = _state(p)
        direct[j], cond[j] = st.tau, p.cond
        dlog[j] = _tau_rhs(st.Q, tj) @ dt
    # local maxima of the sampled condition, endpoints included
    padded = np.concatenate([[-np.inf], cond, [-np.inf]])
    for j in range(s.size):
        c, left, right = padded[j + 1], padded[j], padded[j + 2]
        # a crossing makes cond grow like 1/distance; ignore rounding-level ties
        if c >= left and c >= right and c > (1 + 1e-6) * min(left, right):
            lo, hi = s[max(j - 1, 0)], s[min(j + 1, s.size - 1)]
            _refine_cond_peak(h, t0, dt, lo, hi, cond_max_path)

    integral = np.concatenate([[0.0], np.cumsum((dlog[1:] + dlog[:-1]) / 2 * np.diff(s))])
    return TauPath(s, direct[0] * np.exp(integral), direct, cond)


def tau_path_integral(h: FamilyHandle, t0, t1, steps: int = 256,
                      cond_max_path: float = COND_MAX_PATH) -> complex:
    """``tau(t1)`` predicted from ``tau(t0)`` by the trapezoidal path integral."""
    return complex(tau_path_scan(h, t0, t1, steps, cond_max_path).predicted[-1])


def _extracted_projectors(h: FamilyHandle, t, quad_points: int = 256) -> list:
    R = family_point(h, t).ratfun()
    out = []
    for k in range(2 * h.n):
        tk = R.loci.t[k]
        radius = 0.25 * R.loci.distance_to_others(k)
        if k < h.n:
            (res,) = laurent_coeffs(R.evaluate, tk, radius, [-1], quad_points)
            f, g = linalg.rank_one_factor(res)
            out.append(row_projector(g))
        else:
            (res,) = laurent_coeffs(R.evaluate_inverse, tk, radius, [-1], quad_points)
            f, g = linalg.rank_one_factor(res)
            out.append(column_projector(f))
    return out


def isoprincipal_check(h: FamilyHandle, t_a, t_b, quad_points: int = 256) -> float:
    """Max change of the principal-factor projectors between two family points.

    Residues are extracted by contour quadrature; row projectors of the
    right semiresidues are compared at poles, column projectors of the left
    semiresidues of ``R^-1`` at zeros.
    """
    Pa = _extracted_projectors(h, t_a, quad_points)
    Pb = _extracted_projectors(h, t_b, quad_points)
    return float(max(np.linalg.norm(a - b, 2) for a, b in zip(Pa, Pb)))
