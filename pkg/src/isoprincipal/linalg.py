"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Besides the
LU-backed solvers this module holds the independent oracles the rest of the
package is checked against: the contour-integral Lyapunov solver, the
permutation expansion of the determinant and the brute-force Frobenius test.
"""
from __future__ import annotations

import itertools
import math
import warnings

import numpy as np
import scipy.linalg

from .errors import (
    NoSeparatingContour,
    NotRankOne,
    SingularMatrix,
    SpectraCollide,
    TooLarge,
)

__all__ = [
    "as_matrix",
    "lu_solve",
    "det",
    "det_expansion",
    "cond_estimate",
    "solve_lyapunov_diag",
    "contour_lyapunov_oracle",
    "is_frobenius_singular",
    "frobenius_brute",
    "max_matching",
    "rank_one_factor",
    "cauchy_matrix",
    "cauchy_determinant",
]

PIVOT_EPS = 1e-13
BRUTE_MAX_N = 8


def as_matrix(a, shape=None) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D ``complex128`` array."""
    m = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {m.shape}")
    if shape is not None and m.shape != tuple(shape):
        raise ValueError(f"expected shape {tuple(shape)}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _as_spectrum(a) -> np.ndarray:
    v = np.asarray(a, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(v)):
        raise ValueError("spectrum has non-finite entries")
    return v


def _lu(A, pivot_eps):
    A = as_matrix(A)
    n, k = A.shape
    if n != k:
        raise ValueError(f"matrix must be square, got {A.shape}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    scale = np.abs(A).max() if A.size else 0.0
    pivots = np.abs(np.diag(lu))
    if n and (scale == 0.0 or pivots.min() < pivot_eps * scale):
        raise SingularMatrix(
            f"pivot {pivots.min():.3e} below {pivot_eps:g} x max entry {scale:.3e}"
        )
    return lu, piv


def lu_solve(A, B, pivot_eps: float = PIVOT_EPS) -> np.ndarray:
    """Solve ``A X = B`` by LU factorisation with partial pivoting.

    Raises
    ------
    SingularMatrix
        If a pivot magnitude falls below ``pivot_eps * max|A_ij|``.
    """
    B = np.asarray(B, dtype=np.complex128)
    vector = B.ndim == 1
    B2 = B.reshape(-1, 1) if vector else B
    lu, piv = _lu(A, pivot_eps)
    if B2.shape[0] != lu.shape[0]:
        raise ValueError(f"row mismatch: A is {lu.shape}, B is {B2.shape}")
    X = scipy.linalg.lu_solve((lu, piv), B2, check_finite=False)
    return X.ravel() if vector else X


def det(A) -> complex:
    """Determinant from the LU factors; exactly singular input gives 0."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got {A.shape}")
    if A.shape[0] == 0:
        return 1.0 + 0j
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    sign = -1.0 if swaps % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def det_expansion(A) -> complex:
    """Determinant as the signed sum over all ``n!`` permutation products.

    Independent of the LU route; only meant as an oracle for ``n <= 8``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValueError(f"matrix must be square, got {A.shape}")
    if n > BRUTE_MAX_N:
        raise TooLarge(f"n={n} exceeds {BRUTE_MAX_N} for permutation expansion")
    total = 0j
    rows = range(n)
    for perm in itertools.permutations(rows):
        total += _perm_sign(perm) * math.prod(A[i, perm[i]] for i in rows)
    return complex(total)


def cond_estimate(A) -> float:
    """1-norm condition number ``||A||_1 ||A^-1||_1``; ``inf`` if singular."""
    A = as_matrix(A)
    n = A.shape[0]
    try:
        inv = lu_solve(A, np.eye(n))
    except SingularMatrix:
        return math.inf
    return float(np.linalg.norm(A, 1) * np.linalg.norm(inv, 1))


def _separation(a, b) -> float:
    if a.size == 0 or b.size == 0:
        return math.inf
    return float(np.abs(a[:, None] - b[None, :]).min())


def _spectral_scale(*arrays) -> float:
    mags = [np.abs(x).max() for x in arrays if x.size]
    return max([1.0, *mags])


def solve_lyapunov_diag(a, b, Y, dist_eps: float | None = None) -> np.ndarray:
    """Solve ``diag(a) X - X diag(b) = Y`` in closed (Cauchy) form.

    ``X_ij = Y_ij / (a_i - b_j)``.

    Parameters
    ----------
    a, b : array_like
        Diagonal entries of the two coefficient matrices.
    Y : array_like
        Right-hand side, shape ``(len(a), len(b))``.
    dist_eps : float, optional
        Minimal admissible ``|a_i - b_j|``; defaults to ``1e-12`` times the
        magnitude scale of the spectra.

    Raises
    ------
    SpectraCollide
        If some ``a_i`` and ``b_j`` are closer than ``dist_eps``.
    """
    a = _as_spectrum(a)
    b = _as_spectrum(b)
    Y = as_matrix(Y, (a.size, b.size)) if a.size and b.size else np.zeros((a.size, b.size), complex)
    if dist_eps is None:
        dist_eps = 1e-12 * _spectral_scale(a, b)
    sep = _separation(a, b)
    if sep < dist_eps:
        raise SpectraCollide(f"spectra {sep:.3e} apart (threshold {dist_eps:.3e})")
    return Y / (a[:, None] - b[None, :])


def _circle_for(a, b):
    """Best circle (center, radius, contraction ratio) enclosing ``a`` and excluding ``b``."""
    candidates = [a.mean(), 0.5 * (a.real.min() + a.real.max()) + 0.5j * (a.imag.min() + a.imag.max())]
    candidates.extend(a)
    best = None
    for c in candidates:
        r_in = np.abs(a - c).max()
        r_out = np.abs(b - c).min() if b.size else math.inf
        if not r_in < r_out:
            continue
        if math.isinf(r_out):
            radius = 2.0 * r_in + 1.0
            ratio = r_in / radius
        else:
            # geometric mean balances the inner and outer convergence factors
            radius = max(math.sqrt(r_in * r_out), 0.5 * r_out)
            ratio = max(r_in / radius, radius / r_out)
        if best is None or ratio < best[2]:
            best = (complex(c), float(radius), float(ratio))
    if best is None:
        raise NoSeparatingContour("no circle encloses a while excluding b")
    return best


def contour_lyapunov_oracle(a, b, Y, quad_points: int = 256, contour: str = "circle") -> np.ndarray:
    """Solve ``diag(a) X - X diag(b) = Y`` by contour quadrature.

    Evaluates ``(1/2 pi i) \\oint (zI - U)^{-1} Y (zI - V)^{-1} dz`` with the
    trapezoidal rule, ``U = diag(a)`` inside and ``V = diag(b)`` outside the
    contour.  ``contour="circle"`` uses one circle (searched over a few
    centres); ``contour="discs"`` uses a small circle around every ``a_i``,
    which always exists for disjoint spectra.

    Raises
    ------
    NoSeparatingContour
        ``contour="circle"`` and no separating circle was found.
    """
    a = _as_spectrum(a)
    b = _as_spectrum(b)
    Y = as_matrix(Y, (a.size, b.size))
    theta = 2.0 * np.pi * np.arange(quad_points) / quad_points
    unit = np.exp(1j * theta)

    if contour == "circle":
        center, radius, _ = _circle_for(a, b)
        circles = [(center, radius)]
    elif contour == "discs":
        pts = np.concatenate([a, b])
        circles = []
        for ai in np.unique(a):
            others = pts[np.abs(pts - ai) > 0]
            gap = np.abs(others - ai).min() if others.size else 1.0
            circles.append((complex(ai), 0.4 * gap))
    else:
        raise ValueError(f"unknown contour {contour!r}")

    X = np.zeros_like(Y)
    for center, radius in circles:
        z = center + radius * unit
        # dz = i r e^{i theta} dtheta, the 1/(2 pi i) and dtheta = 2 pi/N cancel to r e^{i theta}/N
        w = radius * unit / quad_points
        left = 1.0 / (z[:, None] - a[None, :])
        right = 1.0 / (z[:, None] - b[None, :])
        X += np.einsum("k,ki,ij,kj->ij", w, left, Y, right)
    return X


def _support(M, zero_eps):
    M = as_matrix(M)
    n = M.shape[0]
    if M.shape[1] != n:
        raise ValueError(f"matrix must be square, got {M.shape}")
    mags = np.abs(M)
    if zero_eps is None:
        zero_eps = 1e-13 * mags.max() if mags.size else 0.0
    return mags > zero_eps


def max_matching(support) -> list[int | None]:
    """Maximum bipartite matching of rows to columns by augmenting paths.

    Returns ``match`` with ``match[j]`` the row matched to column ``j`` or
    ``None``.
    """
    support = np.asarray(support, dtype=bool)
    n_rows, n_cols = support.shape
    adj = [np.flatnonzero(support[i]).tolist() for i in range(n_rows)]
    match: list[int | None] = [None] * n_cols

    def augment(i, seen):
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match[j] is None or augment(match[j], seen):
                match[j] = i
                return True
        return False

    for i in range(n_rows):
        augment(i, [False] * n_cols)
    return match


def is_frobenius_singular(M, zero_eps: float | None = None) -> bool:
    """True iff no permutation product of ``M`` is nonzero.

    Equivalently the bipartite graph of nonzero entries has no perfect
    matching.  Entries with ``|m_ij| <= zero_eps`` are structural zeros;
    the default threshold is ``1e-13 * max|m_ij|`` (pass ``0.0`` for exact
    patterns).
    """
    support = _support(M, zero_eps)
    n = support.shape[0]
    if n == 0:
        return False
    matched = sum(1 for row in max_matching(support) if row is not None)
    return matched < n


def frobenius_brute(M, zero_eps: float | None = None) -> bool:
    """Enumerate all ``n!`` permutation products; ground truth for small ``n``."""
    support = _support(M, zero_eps)
    n = support.shape[0]
    if n > BRUTE_MAX_N:
        raise TooLarge(f"n={n} exceeds {BRUTE_MAX_N} for brute-force enumeration")
    for perm in itertools.permutations(range(n)):
        if all(support[i, perm[i]] for i in range(n)):
            return False
    return True


def rank_one_factor(M, rank_eps: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Factor a numerically rank-one matrix as ``M = f @ g``.

    ``f`` (``m x 1``) is the column of ``M`` with the largest norm, rotated
    by a unit phase so that its largest-magnitude entry is real positive;
    ``g`` (``1 x m``) is the least-squares row.  The gauge is deterministic.

    Raises
    ------
    NotRankOne
        If ``M`` is zero or its second singular value exceeds
        ``rank_eps`` times the first.
    """
    M = as_matrix(M)
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise NotRankOne("matrix is zero")
    if s.size > 1 and s[1] > rank_eps * s[0]:
        raise NotRankOne(f"sigma_2/sigma_1 = {s[1] / s[0]:.3e} > {rank_eps:g}")
    col = int(np.argmax(np.linalg.norm(M, axis=0)))
    f = M[:, col].copy()
    idx = int(np.argmax(np.abs(f)))
    lead = f[idx]
    f *= np.conj(lead) / abs(lead)
    f[idx] = abs(lead)
    f = f.reshape(-1, 1)
    g = (f.conj().T @ M) / (f.conj().T @ f)
    return f, g


def cauchy_matrix(z, t) -> np.ndarray:
    """The matrix ``(1 / (z_l - t_k))``."""
    z = _as_spectrum(z)
    t = _as_spectrum(t)
    return 1.0 / (z[:, None] - t[None, :])


def cauchy_determinant(z, t, dist_eps: float | None = None) -> complex:
    """Closed-form determinant of :func:`cauchy_matrix`.

    ``prod_{p<q} (z_q - z_p)(t_p - t_q) / prod_{l,k} (z_l - t_k)``.
    """
    z = _as_spectrum(z)
    t = _as_spectrum(t)
    if z.size != t.size:
        raise ValueError("z and t must have the same length")
    if dist_eps is None:
        dist_eps = 1e-12 * _spectral_scale(z, t)
    n = z.size
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    for v in (z, t):
        if pairs and min(abs(v[p] - v[q]) for p, q in pairs) < dist_eps:
            raise SpectraCollide("points within a spectrum coincide")
    if _separation(z, t) < dist_eps:
        raise SpectraCollide("z and t spectra coincide")
    num = math.prod((z[q] - z[p]) * (t[p] - t[q]) for p, q in pairs)
    den = np.prod(z[:, None] - t[None, :])
    return complex(num / den)
