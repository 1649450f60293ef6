# Two non-orthogonal qubit states made orthogonal by a PT-symmetric metric.
#
# psi1 and psi2 are separated by an angle epsilon, so their ordinary overlap
# is cos(epsilon). Choosing the Hamiltonian's metric angle with
# sin(alpha) = cos(epsilon) makes the CPT overlap vanish, and it stays zero
# while the states evolve.

import math

import numpy as np

from ptqsd import cpt_inner, cpt_projector, design_cpt_orthogonal, inner_hermitian, propagator
from ptqsd.ptcore import FamilyParams, state_family

np.set_printoptions(precision=4, suppress=True)

eps = math.pi / 6
psi1, psi2, _ = state_family(FamilyParams(eps))
print("Hermitian overlap <psi1|psi2> =", inner_hermitian(psi1, psi2), " cos(eps) =", math.cos(eps))

h = design_cpt_orthogonal(psi1, psi2)
print(f"designed H: r={h.r:.4f} s={h.s} beta={h.beta:.4f}  sin(alpha)={h.sin_alpha:.4f}  omega={h.omega:.4f}")
print("CPT overlap <psi1|psi2>_CPT =", abs(cpt_inner(h, psi1, psi2)))

# The two CPT projectors resolve the identity.
p1 = cpt_projector(h, psi1)
p2 = cpt_projector(h, psi2)
print("P1 =\n", p1)
print("P2 =\n", p2)
print("P1 + P2 =\n", p1 + p2)

# Orthogonality persists, while the Hermitian overlap moves around.
print("\n   omega t   |CPT overlap|   |Hermitian overlap|")
for x in np.linspace(0, math.pi, 7):
    u = propagator(h, x / h.omega)
    a, b = u @ psi1, u @ psi2
    herm = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    print(f"  {x:8.4f}    {abs(cpt_inner(h, a, b)):.2e}        {herm:.4f}")
