"""Local analysis at a simple singular point.

Laurent coefficients are extracted by trapezoidal quadrature on a small
circle, which makes every quantity here an independent numerical check of
the closed forms in :mod:`isoprincipal.ratfun`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import RelationViolation, ZeroVector
from .ratfun import GenericRatFn, numerical_rank, residue_relation_residuals
from .report import VerificationReport

__all__ = [
    "SingularityKind",
    "LocalData",
    "PrincipalFactor",
    "laurent_coeffs",
    "classify_point",
    "local_data",
    "semiresidues",
    "principal_factor_from_semiresidue",
    "row_projector",
    "column_projector",
    "verify_regular_factor",
]

TOL_LOCAL = 1e-8
QUAD_POINTS = 256


class SingularityKind(enum.Enum):
    POLE = "pole"
    ZERO = "zero"
    REGULAR = "regular"


def laurent_coeffs(f, t, radius: float, orders, quad_points: int = QUAD_POINTS) -> list:
    """Laurent coefficients of ``f`` about ``t`` by contour quadrature.

    The coefficient of ``(z - t)^k`` is
    ``(1/2 pi i) \\oint f(z) (z - t)^(-k-1) dz`` over ``|z - t| = radius``.
    ``f`` must be holomorphic on the punctured disc of that radius; the
    trapezoidal rule then converges geometrically in ``quad_points``.

    Parameters
    ----------
    f : callable
        Matrix-valued function of one complex variable.
    t : complex
        Expansion point.
    radius : float
        Circle radius; keep it well inside the distance to other singularities.
    orders : iterable of int
        Requested powers ``k``.

    Returns
    -------
    list of ndarray
        One coefficient per requested order.
    """
    t = complex(t)
    theta = 2.0 * np.pi * np.arange(quad_points) / quad_points
    zeta = radius * np.exp(1j * theta)
    values = np.array([np.atleast_2d(f(t + s)) for s in zeta])
    out = []
    for k in orders:
        w = zeta ** (-k) / quad_points
        out.append(np.tensordot(w, values, axes=1))
    return out


def classify_point(R: GenericRatFn, t) -> SingularityKind:
    """Kind of the point ``t`` for ``R``, by bookkeeping against its loci."""
    t = complex(t)
    eps = R.loci.dist_eps
    if np.abs(R.poles - t).min() < eps:
        return SingularityKind.POLE
    if np.abs(R.zeros - t).min() < eps:
        return SingularityKind.ZERO
    return SingularityKind.REGULAR


def _locus_index(R: GenericRatFn, t) -> int:
    d = np.abs(R.loci.t - complex(t))
    k = int(np.argmin(d))
    if d[k] >= R.loci.dist_eps:
        raise ValueError(f"{t} is not a locus of R")
    return k


def _local_radius(R: GenericRatFn, k: int) -> float:
    return 0.25 * R.loci.distance_to_others(k)


@dataclass(frozen=True, eq=False)
class LocalData:
    """Residue data of ``R`` at one of its singular points.

    ``residue_R`` is the residue of ``R`` (pole) or of ``R^-1`` (zero);
    ``Q_t`` and ``C_t`` are the residue and constant Laurent term of the
    logarithmic derivative ``R' R^-1``.
    """

    point: complex
    kind: SingularityKind
    residue_R: np.ndarray
    Q_t: np.ndarray
    C_t: np.ndarray

    def relation_residuals(self) -> tuple[float, float]:
        return residue_relation_residuals(self.Q_t, self.C_t, self.kind is SingularityKind.POLE)

    def subspace_mismatch(self) -> float:
        """Largest principal-angle sine between ``im(Q_t)`` and ``im(R_t)`` (pole).

        For a zero the row spaces (orthogonal complements of the null
        spaces) are compared instead.
        """
        A, B = self.Q_t, self.residue_R
        if self.kind is SingularityKind.ZERO:
            A, B = A.conj().T, B.conj().T
        ra, rb = numerical_rank(A), numerical_rank(B)
        if ra != rb:
            return 1.0
        Ua = np.linalg.svd(A)[0][:, :ra]
        Ub = np.linalg.svd(B)[0][:, :rb]
        # sin of the largest principal angle; avoids the cancellation in sqrt(1 - cos^2)
        return float(np.linalg.norm(Ub - Ua @ (Ua.conj().T @ Ub), 2))


def local_data(R: GenericRatFn, t, tol_local: float | None = TOL_LOCAL,
               quad_points: int = QUAD_POINTS) -> LocalData:
    """Extract residue and constant terms at a pole or zero of ``R`` numerically.

    The radius is a quarter of the distance from ``t`` to the nearest other
    locus.  With ``tol_local=None`` no relation is enforced.

    Raises
    ------
    ValueError
        If ``t`` is a regular point.
    RelationViolation
        If the residue relations fail by more than ``tol_local`` (scaled), or
        the image/null spaces of ``Q_t`` and the residue disagree.
    """
    kind = classify_point(R, t)
    if kind is SingularityKind.REGULAR:
        raise ValueError(f"{t} is a regular point of R")
    k = _locus_index(R, t)
    tk = complex(R.loci.t[k])
    radius = _local_radius(R, k)
    fun = R.evaluate if kind is SingularityKind.POLE else R.evaluate_inverse
    (residue,) = laurent_coeffs(fun, tk, radius, [-1], quad_points)
    Q_t, C_t = laurent_coeffs(R.log_derivative, tk, radius, [-1, 0], quad_points)
    data = LocalData(tk, kind, residue, Q_t, C_t)
    if tol_local is None:
        return data
    r1, r2 = data.relation_residuals()
    if max(r1, r2) > tol_local:
        raise RelationViolation(
            f"{kind.value} at {tk}: projector residual {r1:.3e}, constant-term residual {r2:.3e}"
        )
    angle = data.subspace_mismatch()
    if angle > 1e-6:
        raise RelationViolation(f"{kind.value} at {tk}: residue subspaces differ by sin {angle:.3e}")
    return data


def semiresidues(residue, rank_eps: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Left and right semiresidues ``(f, g)`` of a rank-one residue, gauge fixed."""
    return linalg.rank_one_factor(residue, rank_eps)


def row_projector(g) -> np.ndarray:
    """Orthogonal projector ``g^* (g g^*)^-1 g`` onto the span of the row ``g``."""
    g = np.asarray(g, dtype=np.complex128).reshape(1, -1)
    gg = (g @ g.conj().T).real.item()
    if gg == 0.0:
        raise ZeroVector("semiresidue is zero")
    return (g.conj().T @ g) / gg


def column_projector(f) -> np.ndarray:
    """Orthogonal projector ``f (f^* f)^-1 f^*`` onto the span of the column ``f``."""
    f = np.asarray(f, dtype=np.complex128).reshape(-1, 1)
    ff = (f.conj().T @ f).real.item()
    if ff == 0.0:
        raise ZeroVector("semiresidue is zero")
    return (f @ f.conj().T) / ff


@dataclass(frozen=True, eq=False)
class PrincipalFactor:
    """``E(z) = I + L - L/z`` at a pole, ``E(z) = I - L + z L`` at a zero."""

    kind: SingularityKind
    L: np.ndarray

    def __call__(self, zeta) -> np.ndarray:
        zeta = complex(zeta)
        eye = np.eye(self.L.shape[0])
        if self.kind is SingularityKind.POLE:
            return eye + self.L - self.L / zeta
        return eye - self.L + zeta * self.L

    def inverse(self, zeta) -> np.ndarray:
        zeta = complex(zeta)
        eye = np.eye(self.L.shape[0])
        if self.kind is SingularityKind.POLE:
            return eye + self.L - zeta * self.L
        return eye - self.L + self.L / zeta

    def idempotency_residual(self) -> float:
        sign = 1.0 if self.kind is SingularityKind.POLE else -1.0
        return float(np.linalg.norm(self.L @ self.L + sign * self.L, 2))


def principal_factor_from_semiresidue(kind: SingularityKind, v) -> PrincipalFactor:
    """Canonical principal factor from one semiresidue.

    At a pole ``v`` is the right semiresidue ``g`` of ``R`` and
    ``L = -g^* (g g^*)^-1 g``; at a zero ``v`` is the left semiresidue ``f``
    of ``R^-1`` and ``L = f (f^* f)^-1 f^*``.  Both are invariant under
    ``v -> c v``.
    """
    if kind is SingularityKind.POLE:
        return PrincipalFactor(kind, -row_projector(v))
    if kind is SingularityKind.ZERO:
        return PrincipalFactor(kind, column_projector(v))
    raise ValueError("a principal factor needs a pole or a zero")


def principal_factor_at(R: GenericRatFn, k: int) -> PrincipalFactor:
    """Principal factor at the ``k``-th locus built from the closed-form residues."""
    residue = R.residues().R[k]
    f, g = semiresidues(residue)
    if k < R.n:
        return principal_factor_from_semiresidue(SingularityKind.POLE, g)
    return principal_factor_from_semiresidue(SingularityKind.ZERO, f)


def verify_regular_factor(R: GenericRatFn, E: PrincipalFactor, t,
                          tol_local: float = TOL_LOCAL, quad_points: int = QUAD_POINTS
                          ) -> VerificationReport:
    """Check that ``H(z) = R(z) E(z - t)^-1`` is holomorphic and invertible at ``t``.

    Reports three checks: the residue of ``H`` at ``t``, the residue of
    ``H^-1 = E(z - t) R(z)^-1`` at ``t`` (both relative to the size of
    ``H`` on the circle) and ``1e-10 * scale^m / |det H(t)|``, which is at
    most one iff ``|det H(t)|`` clears the invertibility threshold.
    """
    k = _locus_index(R, t)
    tk = complex(R.loci.t[k])
    radius = _local_radius(R, k)

    def H(z):
        return R.evaluate(z) @ E.inverse(z - tk)

    def H_inv(z):
        return E(z - tk) @ R.evaluate_inverse(z)

    res_H, H0 = laurent_coeffs(H, tk, radius, [-1, 0], quad_points)
    (res_Hinv,) = laurent_coeffs(H_inv, tk, radius, [-1], quad_points)
    scale_H = max(1.0, np.linalg.norm(H0, 2), np.linalg.norm(H(tk + radius), 2))
    scale_Hinv = max(1.0, np.linalg.norm(H_inv(tk + radius), 2))

    rep = VerificationReport(environment={"point": str(tk), "kind": E.kind.value})
    rep.add("regular_factor_residue", np.linalg.norm(res_H, 2) / scale_H, tol_local)
    rep.add("regular_factor_inverse_residue", np.linalg.norm(res_Hinv, 2) / scale_Hinv, tol_local)
    inv_eps = 1e-10 * scale_H ** R.m
    d = abs(linalg.det(H0))
    rep.add("regular_factor_det", inv_eps / d if d > 0 else np.inf, 1.0)
    return rep
