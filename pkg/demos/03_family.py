# Moving the loci with F, G fixed: residues follow the Schlesinger system.
import numpy as np

from isoprincipal import family as fam
from isoprincipal import problem

p = problem.random_problem(2, 2, seed=3)
h = fam.make_family(p.F, p.G)
print("admissible:", h.admissible)

t = p.t
state = fam.schlesinger_state(h, t)
print("sum of residues:", np.linalg.norm(sum(state.Q)))
print("tau(t) =", state.tau)

# finite differences in t against the closed forms, at decreasing steps
for step in (1e-2, 5e-3, 2.5e-3, 1e-5):
    print(f"step {step:.1e}: Schlesinger {fam.schlesinger_residual(h, t, step):.2e}, "
          f"potential {fam.potential_check(h, t, step):.2e}, "
          f"tau log-derivative {fam.tau_logderiv_check(h, t, step):.2e}")

# principal factors do not move with t
t_other = problem.random_loci(np.random.default_rng(0), p.n)
print("projector change between two far-apart points:", fam.isoprincipal_check(h, t, t_other))

# tau along a segment: integral of the log-derivative against det S
t1 = t + 0.3 * np.exp(1j * np.arange(t.size))
for steps in (64, 128, 256):
    scan = fam.tau_path_scan(h, t, t1, steps)
    print(f"{steps:4d} steps: relative mismatch {scan.rel_mismatch:.2e}")
