# A scalar walk-through: R(z) = (z - 1)/z has a pole at 0 and a zero at 1.
import numpy as np

from isoprincipal import ratfun
from isoprincipal.singularity import local_data, principal_factor_at, verify_regular_factor

# PZ data: F is the left zero semiresidue, G the right pole semiresidue
R = ratfun.build([0.0, 1.0], ([[1.0]], [[1.0]]), "PZ")
print("coupling S_PZ =", R.S[0, 0])

for z in (2.0, -1.0, 3j):
    print(f"R({z}) = {R(z)[0, 0]:.6f}   expected {(z - 1) / z:.6f}")

# the same function realised with ZP data
Z = R.converted()
print("ZP coupling =", Z.S[0, 0], " max |R - R_zp| on samples:",
      max(abs(R(z) - Z(z)).max() for z in (2.0, -1.0, 3j)))

# residues of R' R^-1, read off by contour quadrature
for t in (0.0, 1.0):
    d = local_data(R, t)
    print(f"t={t}: {d.kind.value}, residue {d.residue_R[0, 0].real:+.3f}, "
          f"Q {d.Q_t[0, 0].real:+.3f}, C {d.C_t[0, 0].real:+.3f}")

# dividing out the principal factor leaves something regular and invertible
for k, t in enumerate(R.loci.t):
    rep = verify_regular_factor(R, principal_factor_at(R, k), t)
    print(rep.summary())

print("monodromy around the pole, 512 RK4 steps:", ratfun.monodromy_loop(R, 0, 512))
