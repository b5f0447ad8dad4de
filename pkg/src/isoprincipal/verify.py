"""The full verification sweep for one problem."""
from __future__ import annotations

import numpy as np

from . import family
from .problem import Problem
from .ratfun import monodromy_loop, structural_checks
from .report import VerificationReport
from .singularity import local_data, principal_factor_at, verify_regular_factor

__all__ = ["run_suite", "perturbed_loci", "DEFAULTS"]

DEFAULTS = {
    "tol": 1e-6,
    "fd_step": 1e-5,
    "structural_tol": 1e-9,
    "local_tol": 1e-8,
    "subspace_tol": 1e-6,
    "isoprincipal_tol": 1e-9,
    "monodromy_steps": 1024,
    "path_steps": 256,
    "quad_points": 256,
    "perturbation": 0.02,
}


def perturbed_loci(t, size: float = DEFAULTS["perturbation"]) -> np.ndarray:
    """Deterministic nearby loci ``t_k + size * exp(i k)``, ``k = 1..2n``."""
    t = np.asarray(t, dtype=np.complex128)
    return t + size * np.exp(1j * np.arange(1, t.size + 1))


def run_suite(p: Problem, tol: float = DEFAULTS["tol"], fd_step: float = DEFAULTS["fd_step"]
              ) -> VerificationReport:
    """Run every check on ``p``.

    Unusable input raises instead of producing a report; see
    :mod:`isoprincipal.cli` for the exit-code mapping.
    """
    cfg = dict(DEFAULTS, tol=tol, fd_step=fd_step)
    loci = p.loci
    h = family.make_family(p.F, p.G)
    h.require_admissible()
    point = family.family_point(h, loci)
    R = point.ratfun()

    rep = VerificationReport(environment={**cfg, "m": p.m, "n": p.n, "cond_S_PZ": point.cond})

    if p.S_PZ is not None:
        S, GF = p.S_PZ, p.G @ p.F
        lyap = np.diag(loci.poles) @ S - S @ np.diag(loci.zeros) - GF
        rep.add("certificate.lyapunov", np.linalg.norm(lyap) / max(np.linalg.norm(GF), 1e-300),
                cfg["structural_tol"])

    rep.extend(structural_checks(R, cfg["structural_tol"]), "structural.")
    rep.extend(structural_checks(R.converted(), cfg["structural_tol"]), "structural_zp.")

    closed = R.residues()
    for k in range(2 * p.n):
        d = local_data(R, loci.t[k], tol_local=None, quad_points=cfg["quad_points"])
        r1, r2 = d.relation_residuals()
        rep.add(f"local[{k}].projector", r1, cfg["local_tol"])
        rep.add(f"local[{k}].constant_term", r2, cfg["local_tol"])
        rep.add(f"local[{k}].subspace", d.subspace_mismatch(), cfg["subspace_tol"])
        qs = max(1.0, np.linalg.norm(closed.Q[k], 2))
        rep.add(f"local[{k}].closed_form", np.linalg.norm(d.Q_t - closed.Q[k], 2) / qs, cfg["local_tol"])
        E = principal_factor_at(R, k)
        rep.extend(verify_regular_factor(R, E, loci.t[k], cfg["local_tol"], cfg["quad_points"]),
                   f"local[{k}].")
        rep.add(f"monodromy[{k}]", monodromy_loop(R, k, cfg["monodromy_steps"]), tol)

    rep.add("schlesinger", family.schlesinger_residual(h, loci, fd_step), tol)
    rep.add("cauchy_riemann", family.cauchy_riemann_residual(h, loci, fd_step), 10 * tol)
    rep.add("potential", family.potential_check(h, loci, fd_step), tol)
    rep.add("tau_logderiv", family.tau_logderiv_check(h, loci, fd_step), tol)

    t2 = perturbed_loci(loci.t, cfg["perturbation"])
    rep.add("isoprincipal", family.isoprincipal_check(h, loci, t2, cfg["quad_points"]),
            cfg["isoprincipal_tol"])
    path = family.tau_path_scan(h, loci.t, t2, cfg["path_steps"])
    rep.add("tau_path", path.rel_mismatch, tol)
    return rep
