"""
Seeded Monte Carlo over the stochastic (Born-rule) protocol.

Every trial owns a fixed block of ``block`` uniforms from a single Philox
stream keyed by the master seed: trial ``g`` reads doubles
``[g*block, (g+1)*block)``. Philox is counter-based, so a worker handling
trials ``[a, b)`` jumps straight to counter ``a*block/4`` and the numbers it
sees do not depend on how trials were split across workers.

Within a trial, round ``r`` reads uniform ``2r`` for its first measurement
and ``2r + 1`` for its second; the final two-candidate step reads the next
slot. A measurement comes out *along* iff ``u < p``, exactly as in
:func:`ptqsd.discriminate.measure_stochastic`.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discriminate import (
    COMBINED,
    DEFAULT_TOL,
    _as_states,
    born_probability,
    plan_protocol,
    round_measurements,
)
from .errors import InvalidParameter


def trial_block(plans):
    """Uniforms reserved per trial, rounded up to a whole Philox counter step."""
    draws = sum(p.samples for p in plans)
    return max(4, -(-draws // 4) * 4)


def trial_uniforms(seed, start, stop, block):
    """Uniforms for global trials ``start <= g < stop`` as a ``(stop-start, block)`` array."""
    bitgen = np.random.Philox(key=seed, counter=[start * block // 4, 0, 0, 0])
    return np.random.Generator(bitgen).random((stop - start, block))


def born_table(states, plans, true_index):
    """Born probabilities for every measurement slot when ``true_index`` is the true state."""
    probs = []
    for plan in plans:
        for basis, sample, metric, _ in round_measurements(plan, states, true_index):
            probs.append(born_probability(basis, sample, metric))
    return np.array(probs)


def _slot_layout(plans):
    layout = []
    slot = 0
    for plan in plans:
        layout.append((slot, plan))
        slot += plan.samples
    return layout


def _walk(uniforms, probs, layout, n):
    """Vectorized decision logic. Returns identified indices and along-outcome flags."""
    trials = uniforms.shape[0]
    along = uniforms[:, : len(probs)] < probs
    identified = np.zeros(trials, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    for slot, plan in layout:
        if plan.k is None:
            identified[active] = np.where(along[active, slot], plan.i, plan.j)
            active[:] = False
            break
        m1_zero = ~along[:, slot]
        m2_zero = ~along[:, slot + 1]
        hit_j = active & m1_zero
        hit_k = active & ~m1_zero & m2_zero
        identified[hit_j] = plan.j
        identified[hit_k] = plan.k
        active &= ~(hit_j | hit_k)
    if active.any():
        removed = {x for _, p in layout for x in (p.j, p.k)}
        (survivor,) = [c for c in range(1, n + 1) if c not in removed]
        identified[active] = survivor
    return identified, along


def _run_chunk(args):
    seed, start, stop, block, probs, layout, n, true_index, offset = args
    uniforms = trial_uniforms(seed, offset + start, offset + stop, block)
    identified, along = _walk(uniforms, probs, layout, n)
    # reached[s]: trials in which measurement slot s was performed
    reached = np.zeros(len(probs), dtype=np.int64)
    along_counts = np.zeros(len(probs), dtype=np.int64)
    live = np.ones(len(identified), dtype=bool)
    for slot, plan in layout:
        for s in range(slot, slot + plan.samples):
            reached[s] = live.sum()
            along_counts[s] = (live & along[:, s]).sum()
        if plan.k is not None:
            live &= along[:, slot] & along[:, slot + 1]
    confusion = np.bincount(identified - 1, minlength=n)
    return confusion, reached, along_counts


@dataclass
class MonteCarloResult:
    """Aggregated stochastic runs.

    ``confusion[t-1, m-1]`` counts trials with true state ``t`` identified
    as ``m``. ``probabilities``, ``reached`` and ``along`` are indexed by
    true state and measurement slot.
    """

    plans: list
    trials: int
    seed: int
    true_indices: list
    confusion: np.ndarray
    probabilities: np.ndarray
    reached: np.ndarray
    along: np.ndarray

    @property
    def accuracy(self):
        rows = [t - 1 for t in self.true_indices]
        return float(self.confusion[rows, rows].sum() / (self.trials * len(rows)))

    def per_state_accuracy(self):
        return {t: float(self.confusion[t - 1, t - 1] / self.trials) for t in self.true_indices}

    def born_zscores(self):
        """(observed - expected) / standard error of along counts, per (true state, slot).

        Slots with p in {0, 1} have zero variance; there any deviation gives inf.
        """
        n = self.reached
        p = self.probabilities
        expected = n * p
        se = np.sqrt(n * p * (1 - p))
        diff = self.along - expected
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(se > 0, diff / np.where(se > 0, se, 1), np.where(np.abs(diff) < 0.5, 0.0, np.inf))
        return z


def simulate_trials(
    states,
    trials,
    seed,
    mode=COMBINED,
    true_indices=None,
    workers=1,
    tol=DEFAULT_TOL,
    plans=None,
    chunk_size=None,
):
    """Run ``trials`` stochastic protocol runs for each true state.

    Results are bit-identical for a given ``seed`` whatever ``workers`` and
    ``chunk_size`` are.
    """
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials!r}")
    states = _as_states(states)
    n = len(states)
    if plans is None:
        plans = plan_protocol(states, mode, tol)
    if true_indices is None:
        true_indices = list(range(1, n + 1))
    block = trial_block(plans)
    layout = _slot_layout(plans)
    slots = sum(p.samples for p in plans)
    if chunk_size is None:
        chunk_size = max(1, -(-trials // max(workers, 1)))

    confusion = np.zeros((n, n), dtype=np.int64)
    probabilities = np.zeros((n, slots))
    reached = np.zeros((n, slots), dtype=np.int64)
    along = np.zeros((n, slots), dtype=np.int64)

    jobs = []
    for t in true_indices:
        probs = born_table(states, plans, t)
        probabilities[t - 1] = probs
        offset = (t - 1) * trials
        for start in range(0, trials, chunk_size):
            stop = min(trials, start + chunk_size)
            jobs.append((t, (seed, start, stop, block, probs, layout, n, t, offset)))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_chunk, [a for _, a in jobs]))
    else:
        outputs = [_run_chunk(a) for _, a in jobs]

    for (t, _), (conf, reach, al) in zip(jobs, outputs):
        confusion[t - 1] += conf
        reached[t - 1] += reach
        along[t - 1] += al
    return MonteCarloResult(
        plans, trials, seed, list(true_indices), confusion, probabilities, reached, along
    )


class UniformStream:
    """Replays a row of pre-drawn uniforms through a ``random()`` method.

    Lets the single-run protocol consume the same numbers as a Monte Carlo
    trial, which is how the two code paths are checked against each other.
    """

    def __init__(self, values):
        self._values = list(values)
        self._pos = 0

    def random(self):
        value = self._values[self._pos]
        self._pos += 1
        return value
