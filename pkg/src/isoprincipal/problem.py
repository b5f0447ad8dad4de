"""Problem files and seeded random admissible data.

A problem is ``(F, G, t)`` plus optional metadata.  On disk every complex
number is a ``[re, im]`` pair of shortest round-trip decimal doubles, so a
save/load cycle is bit-exact and output is byte-identical for equal input.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import GiveUp
from .ratfun import PoleZeroLoci

__all__ = ["Problem", "load", "save", "dumps", "loads", "random_problem", "random_loci"]

BOX = 2.0
MIN_SEP = 0.3
COND_LIMIT = 1e6
MAX_DRAWS = 1000


@dataclass(frozen=True, eq=False)
class Problem:
    """Semiresidual data and loci of one family point.

    ``S_PZ`` is an optional stored coupling matrix; when present, the
    verifier checks it against the Lyapunov equation for ``(F, G, t)``.
    """

    F: np.ndarray
    G: np.ndarray
    t: np.ndarray
    seed: int | None = None
    S_PZ: np.ndarray | None = None

    def __post_init__(self):
        F = linalg.as_matrix(self.F)
        G = linalg.as_matrix(self.G)
        t = np.asarray(self.t, dtype=np.complex128).ravel()
        if G.shape != F.shape[::-1]:
            raise ValueError(f"shapes F{F.shape} and G{G.shape} are not m x n and n x m")
        if t.size != 2 * F.shape[1]:
            raise ValueError(f"need 2n = {2 * F.shape[1]} loci, got {t.size}")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "t", t)
        if self.S_PZ is not None:
            object.__setattr__(self, "S_PZ", linalg.as_matrix(self.S_PZ, (F.shape[1], F.shape[1])))

    @property
    def m(self) -> int:
        return self.F.shape[0]

    @property
    def n(self) -> int:
        return self.F.shape[1]

    @property
    def loci(self) -> PoleZeroLoci:
        """Validated loci; raises ``SpectraCollide`` on repeated entries."""
        return PoleZeroLoci(self.t)

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        same = lambda a, b: (a is None and b is None) or (
            a is not None and b is not None and a.shape == b.shape and np.array_equal(a, b))
        return (self.seed == other.seed and same(self.F, other.F) and same(self.G, other.G)
                and same(self.t, other.t) and same(self.S_PZ, other.S_PZ))


def _pairs(a) -> list:
    a = np.asarray(a)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_pairs(x) for x in a]


def _complex(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1:] != (2,):
        raise ValueError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def to_dict(p: Problem) -> dict:
    d = {"m": p.m, "n": p.n, "F": _pairs(p.F), "G": _pairs(p.G), "t": _pairs(p.t)}
    if p.seed is not None:
        d["seed"] = p.seed
    if p.S_PZ is not None:
        d["S_PZ"] = _pairs(p.S_PZ)
    return d


def from_dict(d: dict) -> Problem:
    try:
        m, n = int(d["m"]), int(d["n"])
        F, G, t = _complex(d["F"]), _complex(d["G"]), _complex(d["t"])
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed problem: {exc!r}") from None
    if F.shape != (m, n) or G.shape != (n, m) or t.shape != (2 * n,):
        raise ValueError(f"declared m={m}, n={n} but F{F.shape}, G{G.shape}, t{t.shape}")
    S = _complex(d["S_PZ"]) if "S_PZ" in d else None
    return Problem(F, G, t, d.get("seed"), S)


def dumps(p: Problem) -> str:
    # json uses repr for floats, the shortest string that round-trips
    return json.dumps(to_dict(p), sort_keys=True, indent=1) + "\n"


def loads(text: str) -> Problem:
    return from_dict(json.loads(text))


def save(p: Problem, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(p))


def load(path) -> Problem:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _uniform_complex(rng, size, half_width):
    return rng.uniform(-half_width, half_width, size) + 1j * rng.uniform(-half_width, half_width, size)


def random_loci(rng, n: int, box: float = BOX, min_sep: float = MIN_SEP,
                max_draws: int = MAX_DRAWS) -> np.ndarray:
    """``2n`` points in the square ``[-box, box]^2`` at pairwise distance ``>= min_sep``."""
    pts = []
    for _ in range(max_draws * 2 * n):
        z = complex(_uniform_complex(rng, None, box))
        if all(abs(z - w) >= min_sep for w in pts):
            pts.append(z)
            if len(pts) == 2 * n:
                return np.array(pts)
    raise GiveUp(f"could not place {2 * n} loci at separation {min_sep} in the box")


def random_problem(m: int, n: int, seed: int, cond_limit: float = COND_LIMIT,
                   max_draws: int = MAX_DRAWS, with_coupling: bool = True) -> Problem:
    """Seeded random admissible problem.

    Entries of ``F`` and ``G`` are uniform in the unit complex box; loci are
    drawn once and ``(F, G)`` is redrawn until ``G F`` is not
    Frobenius-singular and ``cond(S_PZ(t)) <= cond_limit``.

    Raises
    ------
    GiveUp
        After ``max_draws`` rejected draws, naming the last failure mode.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    rng = np.random.default_rng(seed)
    t = random_loci(rng, n)
    reason = ""
    for _ in range(max_draws):
        F = _uniform_complex(rng, (m, n), 1.0)
        G = _uniform_complex(rng, (n, m), 1.0)
        GF = G @ F
        if linalg.is_frobenius_singular(GF):
            reason = "G F is Frobenius-singular"
            continue
        S = linalg.solve_lyapunov_diag(t[:n], t[n:], GF)
        cond = linalg.cond_estimate(S)
        if cond > cond_limit:
            reason = f"cond(S_PZ) = {cond:.3e} > {cond_limit:.1e}"
            continue
        return Problem(F, G, t, seed, S if with_coupling else None)
    raise GiveUp(f"no admissible draw in {max_draws} attempts: {reason}")
