# The same protocol with Born-rule measurements.
#
# Replacing the ideal zero test with a two-outcome measurement shows that a
# single shot is not conclusive: a sample that is not exactly orthogonal to
# the projector can still come out "orthogonal". The confusion matrix makes
# that visible. Trials use seeded counter-based streams, so the counts below
# are the same for any number of workers.

import math

import numpy as np

from ptqsd import simulate_trials
from ptqsd.ptcore import FamilyParams, state_family

states = list(state_family(FamilyParams(math.pi / 6, gamma=0.2)))
res = simulate_trials(states, trials=100_000, seed=2024)

print("Born probabilities of 'along' per measurement (rows: true state)")
print(np.round(res.probabilities, 4))
print("confusion (rows: true state, columns: identified)")
print(res.confusion)
print("accuracy:", res.accuracy)
print("largest |z| of observed vs Born frequencies:", np.abs(res.born_zscores()).max().round(2))

same = simulate_trials(states, trials=100_000, seed=2024, workers=4)
print("identical with 4 workers:", np.array_equal(res.confusion, same.confusion))
