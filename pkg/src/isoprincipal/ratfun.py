"""Generic rational matrix functions with prescribed pole/zero data.

A normalised (``R(oo) = I``) generic rational matrix function of size
``m x m`` with ``n`` simple poles ``t_1..t_n`` and ``n`` simple zeros
``t_{n+1}..t_{2n}`` is fixed by the loci and one pair of semiresidual
matrices ``F`` (``m x n``) and ``G`` (``n x m``):

* ``"ZP"``: ``F`` are the left pole and ``G`` the right zero semiresidues;
  ``S`` solves ``A_Z S - S A_P = G F`` and ``R(z) = I - F (zI - A_P)^-1 S^-1 G``.
* ``"PZ"``: ``F`` are the left zero and ``G`` the right pole semiresidues;
  ``S`` solves ``A_P S - S A_Z = G F`` and ``R(z) = I + F S^-1 (zI - A_P)^-1 G``.

Only these two pairings are accepted; prescribing the left and right pole
semiresidues together over-determines the function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    AtPole,
    AtSingularity,
    AtZero,
    NotAdmissible,
    SingularMatrix,
    SpectraCollide,
)
from .report import VerificationReport

__all__ = [
    "PoleZeroLoci",
    "SemiresidualPair",
    "GenericRatFn",
    "ResidueSet",
    "build",
    "structural_checks",
    "monodromy_loop",
    "COND_MAX",
]

COND_MAX = 1e12
VARIANTS = ("ZP", "PZ")


def default_dist_eps(t) -> float:
    t = np.asarray(t)
    return 1e-8 * (1.0 + (np.abs(t).max() if t.size else 0.0))


@dataclass(frozen=True, eq=False)
class PoleZeroLoci:
    """Ordered loci: the first half are poles, the second half zeros."""

    t: np.ndarray
    dist_eps: float | None = None

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.complex128).ravel().copy()
        if t.size == 0 or t.size % 2:
            raise ValueError(f"need an even, positive number of loci, got {t.size}")
        if not np.all(np.isfinite(t)):
            raise ValueError("loci must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)
        if self.dist_eps is None:
            object.__setattr__(self, "dist_eps", default_dist_eps(t))
        gap = self.min_separation()
        if gap < self.dist_eps:
            raise SpectraCollide(f"loci {gap:.3e} apart (threshold {self.dist_eps:.3e})")

    @property
    def n(self) -> int:
        return self.t.size // 2

    @property
    def poles(self) -> np.ndarray:
        return self.t[: self.n]

    @property
    def zeros(self) -> np.ndarray:
        return self.t[self.n:]

    def min_separation(self) -> float:
        d = np.abs(self.t[:, None] - self.t[None, :])
        np.fill_diagonal(d, np.inf)
        return float(d.min())

    def distance_to_others(self, k: int) -> float:
        d = np.abs(self.t - self.t[k])
        d[k] = np.inf
        return float(d.min())

    def swapped(self) -> "PoleZeroLoci":
        """Loci with every pole exchanged for the zero of the same index."""
        return PoleZeroLoci(np.concatenate([self.zeros, self.poles]), self.dist_eps)

    def __len__(self):
        return self.t.size


@dataclass(frozen=True, eq=False)
class SemiresidualPair:
    """Semiresidual data ``F`` (``m x n``, no zero column) and ``G`` (``n x m``, no zero row)."""

    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        F = linalg.as_matrix(self.F)
        G = linalg.as_matrix(self.G)
        if G.shape != F.shape[::-1]:
            raise ValueError(f"shapes F{F.shape} and G{G.shape} are not m x n and n x m")
        col_eps = 1e-14 * max(1.0, np.abs(F).max())
        row_eps = 1e-14 * max(1.0, np.abs(G).max())
        if np.any(np.linalg.norm(F, axis=0) <= col_eps):
            raise ValueError("F has a zero column")
        if np.any(np.linalg.norm(G, axis=1) <= row_eps):
            raise ValueError("G has a zero row")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)

    @property
    def m(self) -> int:
        return self.F.shape[0]

    @property
    def n(self) -> int:
        return self.F.shape[1]


@dataclass(frozen=True, eq=False)
class ResidueSet:
    """Residues of ``R`` at poles / of ``R^-1`` at zeros, and of ``R' R^-1`` at both."""

    R: list
    Q: list

    def __len__(self):
        return len(self.R)


def _coupling(loci: PoleZeroLoci, pair: SemiresidualPair, variant: str) -> np.ndarray:
    GF = pair.G @ pair.F
    if variant == "ZP":
        return linalg.solve_lyapunov_diag(loci.zeros, loci.poles, GF)
    return linalg.solve_lyapunov_diag(loci.poles, loci.zeros, GF)


@dataclass(frozen=True, eq=False)
class GenericRatFn:
    """A realised generic rational matrix function.

    Construct with :func:`build`.  Instances are immutable; evaluations are
    pure.  Near (but not at) the loci accuracy degrades like the inverse
    distance.
    """

    loci: PoleZeroLoci
    pair: SemiresidualPair
    variant: str
    S: np.ndarray
    cond_S: float = math.nan
    Sinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.pair.n != self.loci.n:
            raise ValueError(f"pair has n={self.pair.n}, loci have n={self.loci.n}")
        S = linalg.as_matrix(self.S, (self.n, self.n))
        object.__setattr__(self, "S", S)
        try:
            Sinv = linalg.lu_solve(S, np.eye(self.n))
        except SingularMatrix as exc:
            raise NotAdmissible(f"coupling matrix is singular: {exc}") from None
        object.__setattr__(self, "Sinv", Sinv)

    # -- shapes and data ---------------------------------------------------------

    @property
    def m(self) -> int:
        return self.pair.m

    @property
    def n(self) -> int:
        return self.loci.n

    @property
    def F(self) -> np.ndarray:
        return self.pair.F

    @property
    def G(self) -> np.ndarray:
        return self.pair.G

    @property
    def poles(self) -> np.ndarray:
        return self.loci.poles

    @property
    def zeros(self) -> np.ndarray:
        return self.loci.zeros

    def semiresidual_matrices(self) -> dict:
        """All four semiresidual matrices in the gauge fixed by the prescribed pair.

        Returns a dict with keys ``F_P, G_P, F_Z, G_Z``; the two prescribed
        matrices are returned as given, the other two follow from the
        coupling relations.
        """
        F, G, Sinv = self.F, self.G, self.Sinv
        if self.variant == "ZP":
            return {"F_P": F, "G_Z": G, "G_P": -Sinv @ G, "F_Z": F @ Sinv}
        return {"F_Z": F, "G_P": G, "F_P": F @ Sinv, "G_Z": -Sinv @ G}

    def zp_data(self):
        """``(F_P, G_Z, S_ZP^-1)`` regardless of the variant."""
        if self.variant == "ZP":
            return self.F, self.G, self.Sinv
        return self.F @ self.Sinv, -self.Sinv @ self.G, self.S

    def converted(self) -> "GenericRatFn":
        """The same function realised in the other variant.

        The new coupling matrix is recomputed from the converted
        semiresidual pair by solving its own Lyapunov equation.
        """
        mats = self.semiresidual_matrices()
        if self.variant == "ZP":
            pair = SemiresidualPair(mats["F_Z"], mats["G_P"])
            return build(self.loci, pair, "PZ")
        return build(self.loci, SemiresidualPair(mats["F_P"], mats["G_Z"]), "ZP")

    # -- evaluation -------------------------------------------------------------------

    def _guard(self, z, points, exc):
        z = complex(z)
        if np.abs(points - z).min() < self.loci.dist_eps:
            raise exc(f"z={z} is at a locus")
        return z

    def evaluate(self, z) -> np.ndarray:
        """``R(z)``.

        Raises
        ------
        AtPole
            If ``z`` is within ``dist_eps`` of a pole locus.
        """
        z = self._guard(z, self.poles, AtPole)
        d = 1.0 / (z - self.poles)
        if self.variant == "ZP":
            return np.eye(self.m) - (self.F * d) @ (self.Sinv @ self.G)
        return np.eye(self.m) + (self.F @ self.Sinv * d) @ self.G

    __call__ = evaluate

    def evaluate_inverse(self, w) -> np.ndarray:
        """``R(w)^-1`` from its own separate representation (no matrix inversion).

        Raises
        ------
        AtZero
            If ``w`` is within ``dist_eps`` of a zero locus.
        """
        w = self._guard(w, self.zeros, AtZero)
        d = 1.0 / (w - self.zeros)
        if self.variant == "ZP":
            return np.eye(self.m) + (self.F @ self.Sinv * d) @ self.G
        return np.eye(self.m) - (self.F * d) @ (self.Sinv @ self.G)

    def joint(self, z, w) -> np.ndarray:
        """``R(z) R(w)^-1`` from the joint representation."""
        z = self._guard(z, self.poles, AtPole)
        w = self._guard(w, self.zeros, AtZero)
        F_P, G_Z, M = self.zp_data()
        dp = 1.0 / (z - self.poles)
        dz = 1.0 / (w - self.zeros)
        return np.eye(self.m) + (z - w) * ((F_P * dp) @ M * dz) @ G_Z

    def log_derivative(self, z) -> np.ndarray:
        """``R'(z) R(z)^-1``.

        Raises
        ------
        AtSingularity
            If ``z`` is at any pole or zero locus.
        """
        z = self._guard(z, self.loci.t, AtSingularity)
        dp = 1.0 / (z - self.poles)
        dz = 1.0 / (z - self.zeros)
        if self.variant == "ZP":
            return ((self.F * dp) @ self.Sinv * dz) @ self.G
        FS = self.F @ self.Sinv
        return -((FS * dp) @ self.S * dz) @ (self.Sinv @ self.G)

    # -- residues ------------------------------------------------------------------------

    def residues(self) -> ResidueSet:
        """Closed-form residues.

        The resolvent ``(zI - A)^-1`` of a diagonal ``A`` has the rank-one
        residue ``e_k e_k^T`` at ``a_k``; substituting into the separate and
        logarithmic-derivative representations gives every residue as an
        outer product of one column and one row.
        """
        n = self.n
        F, G, Sinv = self.F, self.G, self.Sinv
        FS, SG = F @ Sinv, Sinv @ G
        R = []
        for k in range(n):
            if self.variant == "ZP":
                R.append(-np.outer(F[:, k], SG[k]))
            else:
                R.append(np.outer(FS[:, k], G[k]))
        for k in range(n):
            if self.variant == "ZP":
                R.append(np.outer(FS[:, k], G[k]))
            else:
                R.append(-np.outer(F[:, k], SG[k]))

        F_P, G_Z, M = self.zp_data()
        Q = []
        for k, tk in enumerate(self.poles):
            row = (M / (tk - self.zeros)) @ G_Z
            Q.append(np.outer(F_P[:, k], row[k]))
        for k, tk in enumerate(self.zeros):
            col = (F_P / (tk - self.poles)) @ M
            Q.append(np.outer(col[:, k], G_Z[k]))
        return ResidueSet(R, Q)


def build(loci, pair, variant: str = "PZ", cond_max: float = COND_MAX) -> GenericRatFn:
    """Realise the unique normalised generic function with the given data.

    Parameters
    ----------
    loci : PoleZeroLoci or array_like
        ``t_1..t_2n``; the first ``n`` are poles.
    pair : SemiresidualPair or (F, G)
    variant : {"ZP", "PZ"}
        Which semiresidual matrices ``F`` and ``G`` prescribe.
    cond_max : float
        The coupling matrix must have condition number below this.

    Raises
    ------
    NotAdmissible
        The coupling matrix is singular or too ill-conditioned.
    SpectraCollide
        Two loci coincide.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if not isinstance(loci, PoleZeroLoci):
        loci = PoleZeroLoci(loci)
    if not isinstance(pair, SemiresidualPair):
        pair = SemiresidualPair(*pair)
    if pair.n != loci.n:
        raise ValueError(f"pair has n={pair.n}, loci have n={loci.n}")
    S = _coupling(loci, pair, variant)
    cond = linalg.cond_estimate(S)
    if not cond < cond_max:
        raise NotAdmissible(f"{variant} coupling matrix has condition {cond:.3e} >= {cond_max:.1e}")
    return GenericRatFn(loci, pair, variant, S, cond)


# -- verification -----------------------------------------------------------------------


def constant_terms(t, Q) -> list:
    """Constant Laurent terms ``C_k = sum_{j != k} Q_j / (t_k - t_j)`` of ``sum Q_j/(z - t_j)``."""
    t = np.asarray(t)
    out = []
    for k in range(len(Q)):
        C = np.zeros_like(Q[k])
        for j in range(len(Q)):
            if j != k:
                C = C + Q[j] / (t[k] - t[j])
        out.append(C)
    return out


def residue_relation_residuals(Q, C, is_pole: bool) -> tuple[float, float]:
    """Scaled residuals of ``Q^2 = -+Q`` and ``QCQ = -CQ`` (pole) / ``QCQ = QC`` (zero)."""
    nQ = max(1.0, np.linalg.norm(Q, 2))
    nC = max(1.0, np.linalg.norm(C, 2))
    if is_pole:
        r1 = np.linalg.norm(Q @ Q + Q, 2)
        r2 = np.linalg.norm(Q @ C @ Q + C @ Q, 2)
    else:
        r1 = np.linalg.norm(Q @ Q - Q, 2)
        r2 = np.linalg.norm(Q @ C @ Q - Q @ C, 2)
    return float(r1 / nQ**2), float(r2 / (nQ**2 * nC))


def numerical_rank(M, rank_eps: float = 1e-8) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rank_eps * s[0]))


def _extract_rows(residues, cols):
    """Right factors of rank-one residues given their left factors (column gauge)."""
    return np.array([(c.conj() @ Rk) / (c.conj() @ c) for Rk, c in zip(residues, cols)])


def _extract_cols(residues, rows):
    return np.array([(Rk @ r.conj()) / (r @ r.conj()) for Rk, r in zip(residues, rows)]).T


def _sample_points(R: GenericRatFn, count: int = 5) -> list:
    t = R.loci.t
    center = t.mean()
    radius = np.abs(t - center).max() + 1.0
    pts = []
    for j in range(count):
        z = center + radius * (0.5 + 0.3 * j) * np.exp(1j * (0.7 + 2.1 * j))
        pts.append(complex(z))
    return pts


def structural_checks(R: GenericRatFn, tol: float = 1e-9) -> VerificationReport:
    """Verify the global relations a generic rational function must satisfy.

    Checks (residuals are scaled by the relevant norms):

    ``lyapunov``
        the stored coupling matrix solves its Lyapunov equation;
    ``residue_sum``
        the residues of ``R' R^-1`` sum to zero;
    ``projector``
        ``Q_k^2 = -Q_k`` at poles and ``Q_k^2 = Q_k`` at zeros;
    ``constant_term``
        ``Q_k C_k Q_k = -C_k Q_k`` (pole) / ``Q_k C_k`` (zero);
    ``coupling_inverse``
        the other coupling matrix, solved from the semiresidues extracted
        from the residues, is the inverse of the stored one;
    ``coupling_relations``
        ``G_Z = -S_ZP G_P`` and ``F_P = F_Z S_ZP``;
    ``rank_sum``
        total residue rank at poles equals that at zeros;
    ``inverse``
        ``R(z)`` times the separately represented ``R(z)^-1`` is ``I`` at a
        few sample points.
    """
    rep = VerificationReport(environment={"tol": tol, "variant": R.variant})
    n, t = R.n, R.loci.t
    F, G, S = R.F, R.G, R.S

    GF = G @ F
    if R.variant == "ZP":
        lyap = np.diag(R.zeros) @ S - S @ np.diag(R.poles) - GF
    else:
        lyap = np.diag(R.poles) @ S - S @ np.diag(R.zeros) - GF
    rep.add("lyapunov", np.linalg.norm(lyap) / max(np.linalg.norm(GF), 1e-300), tol)

    res = R.residues()
    Q = res.Q
    qscale = max(1.0, max(np.linalg.norm(q, 2) for q in Q))
    rep.add("residue_sum", np.linalg.norm(sum(Q), 2) / qscale, tol)

    C = constant_terms(t, Q)
    r1 = r2 = 0.0
    for k in range(2 * n):
        a, b = residue_relation_residuals(Q[k], C[k], k < n)
        r1, r2 = max(r1, a), max(r2, b)
    rep.add("projector", r1, tol)
    rep.add("constant_term", r2, tol)

    # semiresidues extracted from the residues in the gauge of the prescribed pair
    if R.variant == "PZ":
        G_P, F_Z = G, F
        F_P = _extract_cols(res.R[:n], G_P)
        G_Z = _extract_rows(res.R[n:], F_Z.T)
        S_PZ = S
        S_ZP = linalg.solve_lyapunov_diag(R.zeros, R.poles, G_Z @ F_P)
    else:
        F_P, G_Z = F, G
        G_P = _extract_rows(res.R[:n], F_P.T)
        F_Z = _extract_cols(res.R[n:], G_Z)
        S_ZP = S
        S_PZ = linalg.solve_lyapunov_diag(R.poles, R.zeros, G_P @ F_Z)
    rep.add("coupling_inverse", np.linalg.norm(S_ZP @ S_PZ - np.eye(n), 2), tol)
    rel = max(
        np.linalg.norm(G_Z + S_ZP @ G_P) / max(np.linalg.norm(G_Z), 1e-300),
        np.linalg.norm(F_P - F_Z @ S_ZP) / max(np.linalg.norm(F_P), 1e-300),
    )
    rep.add("coupling_relations", rel, tol)

    ranks = [numerical_rank(Rk) for Rk in res.R]
    rep.add("rank_sum", abs(sum(ranks[:n]) - sum(ranks[n:])), 0.5)
    rep.add("rank_one", max(abs(r - 1) for r in ranks), 0.5)

    inv = 0.0
    for z in _sample_points(R):
        Rz = R.evaluate(z)
        err = np.linalg.norm(Rz @ R.evaluate_inverse(z) - np.eye(R.m), 2)
        inv = max(inv, err / max(1.0, np.linalg.norm(Rz, 2)))
    rep.add("inverse", inv, tol)
    return rep


def monodromy_loop(R: GenericRatFn, k: int | None = None, steps: int = 512, *,
                   center=None, radius: float | None = None) -> float:
    """Relative change of a fundamental solution continued once around a circle.

    Integrates ``Y' = Q(z) Y`` (``Q = R' R^-1``) with classical RK4 in the
    angle along ``|z - c| = r`` starting from ``Y = R(z0)``, ``z0 = c + r``.
    The centre is the ``k``-th locus or an arbitrary ``center``; the radius
    defaults to a quarter of the distance to the nearest other locus.
    Returns ``||Y(2 pi) - R(z0)|| / ||R(z0)||``, which vanishes (up to
    integration error) exactly when the solution is single-valued.
    """
    t = R.loci.t
    if k is not None:
        c = complex(t[k])
        dist = R.loci.distance_to_others(k)
    elif center is not None:
        c = complex(center)
        dist = float(np.abs(t - c).min())
    else:
        raise ValueError("give a locus index k or a center")
    r = 0.25 * dist if radius is None else float(radius)

    def rhs(theta, Y):
        z = c + r * np.exp(1j * theta)
        return (1j * r * np.exp(1j * theta)) * (R.log_derivative(z) @ Y)

    Y0 = R.evaluate(c + r)
    Y = Y0.copy()
    h = 2.0 * np.pi / steps
    for j in range(steps):
        th = j * h
        k1 = rhs(th, Y)
        k2 = rhs(th + h / 2, Y + h / 2 * k1)
        k3 = rhs(th + h / 2, Y + h / 2 * k2)
        k4 = rhs(th + h, Y + h * k3)
        Y = Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return float(np.linalg.norm(Y - Y0, 2) / np.linalg.norm(Y0, 2))
