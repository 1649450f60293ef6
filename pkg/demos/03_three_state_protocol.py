# Telling three states apart with two samples.
#
# Sample 1 gets the CPT projector onto psi1: a zero result means psi2.
# Sample 2, after evolving for tau, gets the Hermitian projector onto the
# evolved psi2: a zero result means psi3. Otherwise the state is psi1.

import math

from ptqsd import ALL_CPT, COMBINED, discriminate3
from ptqsd.ptcore import FamilyParams, state_family

states = state_family(FamilyParams(math.pi / 6, gamma=0.2))

for mode in (COMBINED, ALL_CPT):
    print(f"--- {mode} mode")
    for true in (1, 2, 3):
        res = discriminate3(states, true, mode)
        plan, records = res.rounds[0]
        outcome = ", ".join(f"{m.kind} onto psi{m.target_index}: {m.verdict} ({m.residual:.2e})" for m in records)
        print(f"  true psi{true} -> identified psi{res.identified}   [{outcome}]")
    print(f"  tau = {plan.tau:.6f}, sin(alpha) = {plan.hamiltonian.sin_alpha:.6f}")
