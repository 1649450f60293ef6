# When do psi2 and psi3 become orthogonal in the ordinary sense?
#
# The Hamiltonian is already fixed by the CPT condition on psi1/psi2, and
# the Gram matrix exp(iH^dagger t) exp(-iHt) depends only on alpha and
# omega t. So for each (epsilon, gamma) the evolved overlap traces a fixed
# periodic curve, and it may or may not cross zero.

import math

import numpy as np

from ptqsd import closed_form_locus, design_cpt_orthogonal, tau_closed_form, tau_numeric
from ptqsd.discriminate import hermitian_residual
from ptqsd.errors import NoOrthogonalizingTime
from ptqsd.ptcore import FamilyParams, state_family

print(" eps    gamma   omega*tau   residual")
for eps in (0.3, 0.6, 0.9):
    for gamma in (-0.2, 0.0, 0.2, 0.4, 0.6):
        psi1, psi2, psi3 = state_family(FamilyParams(eps, gamma))
        h = design_cpt_orthogonal(psi1, psi2)
        try:
            t = tau_numeric(h, psi2, psi3)
            print(f" {eps:.1f}   {gamma:5.2f}   {h.omega * t:9.6f}   {hermitian_residual(h, psi2, psi3, t):.1e}")
        except NoOrthogonalizingTime as err:
            print(f" {eps:.1f}   {gamma:5.2f}   ---         best {err.achieved:.3f}")

# The closed form depends on epsilon alone. It coincides with the numeric
# roots when psi3 is the basis vector (1, 0), i.e. gamma = -(pi - 2 eps)/4.
print("\nclosed-form branches and where they apply")
for eps in (0.3, math.pi / 6, 0.9):
    plus, minus = tau_closed_form(eps, "+"), tau_closed_form(eps, "-")
    locus = closed_form_locus(eps)
    gammas = sorted({round(p.gamma, 10) for p in locus})
    print(f" eps={eps:.4f}: omega*tau = {plus:.6f} (+), {minus:.6f} (-); gamma = {gammas}"
          f"  [-(pi-2eps)/4 = {-(math.pi - 2 * eps) / 4:.10f}]")
