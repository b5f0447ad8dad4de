# Where det S_PZ vanishes the family is undefined; paths through it are refused.
import numpy as np
from scipy.optimize import brentq

from isoprincipal import family as fam
from isoprincipal import linalg
from isoprincipal.errors import NotAdmissible, PathHitsSingularSet

# an inadmissible pair: G F has no perfect matching, so det S_PZ(t) = 0 for every t
bad = fam.make_family(np.eye(2), [[0.0, 1.0], [0.0, 1.0]])
try:
    fam.schlesinger_state(bad, [0.0, 1.0, 2.0, 3.0])
except NotAdmissible as exc:
    print("refused:", exc)

# admissible real data, moving the second pole along the real axis
h = fam.make_family([[1.0, 2.0], [0.5, -1.0]], [[1.0, 1.0], [2.0, -1.0]])
t0 = np.array([0.0, 1.0, 2.0, 3.0])
t1 = np.array([0.0, 1.9, 2.0, 3.0])
det = lambda s: linalg.det(fam.coupling_at(h, t0 + s * (t1 - t0))).real
print("det S at the ends:", det(0.0), det(1.0))
s_star = brentq(det, 0.0, 1.0)
print("det S vanishes at s =", s_star, "i.e. t_2 =", 1.0 + 0.9 * s_star)

try:
    fam.tau_path_scan(h, t0, t1, 64)
except PathHitsSingularSet as exc:
    print("refused:", exc)

# stopping short of the crossing is fine
scan = fam.tau_path_scan(h, t0, t0 + 0.8 * (t1 - t0), 2048)
print("short path: relative mismatch %.2e, max cond %.2e" % (scan.rel_mismatch, scan.cond.max()))
