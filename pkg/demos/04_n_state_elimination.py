# N candidates, N-1 samples.
#
# Each round takes a triple (i, j, k): one sample either confirms psi_j,
# the other psi_k, or both are ruled out. Two candidates left need a single
# CPT measurement. The candidate states alternate on either side of pi/4,
# which is what makes every pair in a round CPT-orthogonalizable.

import math

from ptqsd import COMBINED, discriminate_n, plan_protocol, spread_family

for n in (4, 5, 7):
    states = spread_family(n, math.pi / 6, spacing=0.1)
    plans = plan_protocol(states, COMBINED)
    print(f"N={n}: rounds " + " ".join(f"({p.i},{p.j},{p.k or '-'})" for p in plans))
    for true in range(1, n + 1):
        res = discriminate_n(states, true, COMBINED, plans=plans)
        print(f"   true {true} -> {res.identified}, samples used {res.samples_used}")
