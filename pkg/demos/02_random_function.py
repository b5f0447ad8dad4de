# A random 3x3 generic function with three poles and three zeros.
import numpy as np

from isoprincipal import linalg, problem, ratfun
from isoprincipal.singularity import local_data

p = problem.random_problem(3, 3, seed=1)
R = ratfun.build(p.t, (p.F, p.G), "PZ")
print("loci:", np.round(p.t, 3))
print("cond(S_PZ) = %.2e" % R.cond_S)

# every global relation at once
print(ratfun.structural_checks(R).summary())

# det R vanishes at zeros and blows up at poles
for k, tk in enumerate(p.t):
    kind = "pole" if k < p.n else "zero"
    dets = [abs(linalg.det(R(tk + eps))) for eps in (1e-2, 1e-4)]
    print(f"{kind} {tk:.3f}: |det R| at distance 1e-2, 1e-4 -> {dets[0]:.2e}, {dets[1]:.2e}")

# residues of the logarithmic derivative are rank-one projectors (up to sign)
for tk in p.t:
    d = local_data(R, tk)
    r1, r2 = d.relation_residuals()
    print(f"{d.kind.value:4s} at {tk:.3f}: relation residuals {r1:.1e} {r2:.1e}, "
          f"rank {np.linalg.matrix_rank(d.Q_t, 1e-8)}")
