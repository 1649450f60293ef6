"""
Design of orthogonalizing Hamiltonians and the state-elimination protocol.

Candidate states are indexed from 1, both in plans and in results. A
*round* works on an ordered triple ``(i, j, k)``: a Hamiltonian is chosen
so that psi_i and psi_j are CPT-orthogonal, and either an evolution time
(combined mode) or a second Hamiltonian (all-CPT mode) makes psi_j and
psi_k orthogonal as well. Two samples are then measured:

* M1 projects sample 1 onto psi_i in the CPT metric. Zero means psi_j.
* M2 projects sample 2 onto psi_j (Hermitian metric after evolution, or the
  second CPT metric). Zero means psi_k.
* Both nonzero rules out psi_j and psi_k.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    DegenerateTriple,
    InvalidParameter,
    NoOrthogonalizingTime,
    NotOrthogonalizable,
    PlanningError,
    SampleBudgetExceeded,
    ZeroCPTNorm,
)
from .linalg2 import SIGMA_Y, inner_hermitian, norm_hermitian
from .ptcore import (
    PTHamiltonian,
    cpt_inner,
    cpt_norm,
    cpt_projector,
    evolved_overlap,
    propagator,
)

COMBINED = "combined"
ALL_CPT = "all-cpt"
MODES = (COMBINED, ALL_CPT)

DETERMINISTIC = "deterministic"
STOCHASTIC = "stochastic"
MEASUREMENTS = (DETERMINISTIC, STOCHASTIC)

DEFAULT_TOL = 1e-9
TAU_GRID = 2048


def _check_mode(mode):
    if mode not in MODES:
        raise InvalidParameter(f"mode must be one of {MODES}, got {mode!r}")


# -- design -----------------------------------------------------------------


def design_cpt_orthogonal(u, v, tol=DEFAULT_TOL):
    """Hamiltonian whose CPT metric makes ``u`` and ``v`` orthogonal.

    The metric is ``(I + sin(alpha) sigma_y) / cos(alpha)``, so the required
    angle is ``sin(alpha) = <u|v> / ((sigma_y conj(u))^T v)``. The returned
    Hamiltonian uses the gauge ``s = 1, beta = pi/2, r = sin(alpha)``.

    Raises
    ------
    NotOrthogonalizable
        If the ratio is not real or its modulus is not below one.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    scale = norm_hermitian(u) * norm_hermitian(v)
    if scale == 0:
        raise InvalidParameter("cannot orthogonalize a zero vector")
    num = inner_hermitian(u, v)
    den = complex((SIGMA_Y @ np.conj(u)) @ v)
    if abs(den) <= tol * scale:
        if abs(num) <= tol * scale:
            sin_alpha = 0.0
        else:
            raise NotOrthogonalizable(
                f"sigma_y overlap vanishes while <u|v> = {num:.6g}; no metric angle exists"
            )
    else:
        ratio = num / den
        if abs(ratio.imag) > tol:
            raise NotOrthogonalizable(f"required sin(alpha) = {ratio:.6g} is not real")
        if abs(ratio.real) >= 1:
            raise NotOrthogonalizable(
                f"required sin(alpha) = {ratio.real:.12g} lies outside the unbroken regime"
            )
        sin_alpha = ratio.real
    h = PTHamiltonian(sin_alpha, 1.0, math.pi / 2)
    residual = abs(cpt_inner(h, u, v)) / (cpt_norm(h, u) * cpt_norm(h, v))
    if residual > tol:
        raise NotOrthogonalizable(f"post-check residual {residual:.3e} exceeds {tol:g}")
    return h


def tan_omega_tau(epsilon, sign):
    """Closed-form tan(omega tau) for the family's psi2/psi3 pair, both sign branches."""
    if sign not in ("+", "-", 1, -1):
        raise InvalidParameter(f"sign must be '+' or '-', got {sign!r}")
    if not 0 < epsilon <= math.pi / 2:
        raise InvalidParameter(f"epsilon must lie in (0, pi/2], got {epsilon!r}")
    pm = 1.0 if sign in ("+", 1) else -1.0
    ce = math.cos(epsilon)
    t = math.tan((math.pi + 2 * epsilon) / 4)
    radicand = 2 * ce * t - 1
    if radicand < 0:
        raise InvalidParameter(f"radicand 2 cos(eps) tan((pi+2eps)/4) - 1 = {radicand:.6g} < 0")
    num = math.sin(epsilon) * (ce + pm * math.sqrt(radicand))
    den = 2 * ce * t - ce * ce - 1
    if den == 0:
        return math.copysign(math.inf, num)
    return num / den


def tau_closed_form(epsilon, sign):
    """omega*tau from the closed form, mapped into (0, pi] so that tau > 0."""
    x = tan_omega_tau(epsilon, sign)
    if math.isinf(x):
        return math.pi / 2
    phase = math.atan(x)
    if phase <= 0:
        phase += math.pi
    return phase


def _golden_section(f, a, b, xtol):
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if abs(b - a) <= xtol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return c if fc < fd else d


def hermitian_residual(h, u, v, t):
    """|<U u|U v>| normalized by the evolved Hermitian norms."""
    ov = evolved_overlap(h, u, v, t)
    nu = np.sqrt(np.abs(evolved_overlap(h, u, u, t)))
    nv = np.sqrt(np.abs(evolved_overlap(h, v, v, t)))
    return np.abs(ov) / (nu * nv)


def _refined_minima(h, u, v, grid):
    """Yield (t, residual) for each local minimum of the residual over one period, in order of t."""
    period = h.period
    ts = np.linspace(0.0, period, grid + 1)
    g = hermitian_residual(h, u, v, ts) ** 2
    # g is periodic, so g[grid] == g[0] and the neighbour of the last point is g[1]
    left = np.concatenate(([g[-2]], g[:-1]))
    right = np.concatenate((g[1:], [g[1]]))

    def sq(t):
        return float(hermitian_residual(h, u, v, t)) ** 2

    for k in range(1, grid + 1):
        if g[k] > left[k] or g[k] > right[k]:
            continue
        if g[k] == 0.0:
            yield float(ts[k]), 0.0
            continue
        t = _golden_section(sq, ts[k - 1], ts[k - 1] + 2 * period / grid, 1e-15 * period)
        yield t, math.sqrt(sq(t))


def tau_numeric(h, u, v, tol=DEFAULT_TOL, grid=TAU_GRID):
    """Smallest t in (0, pi/omega] at which the evolved states are Hermitian-orthogonal.

    The squared residual is tabulated on ``grid`` points over one period;
    every local minimum is refined by golden-section search, in order of
    increasing t, and the first one whose residual is within ``tol`` wins.

    Raises
    ------
    NoOrthogonalizingTime
        If no minimum reaches ``tol``. ``err.achieved`` holds the best residual.
    """
    best = math.inf
    for t, res in _refined_minima(h, u, v, grid):
        if res <= tol:
            return t
        best = min(best, res)
    raise NoOrthogonalizingTime(
        f"minimum evolved Hermitian overlap over one period is {best:.6g} > tol {tol:g}",
        achieved=best,
    )


def orthogonalizing_times(h, u, v, tol=DEFAULT_TOL, grid=TAU_GRID):
    """All times in (0, pi/omega] where the evolved Hermitian overlap vanishes."""
    return [t for t, res in _refined_minima(h, u, v, grid) if res <= tol]


class LocusPoint(NamedTuple):
    sign: str
    delta: float
    gamma: float
    omega_tau: float
    is_first_root: bool


def closed_form_locus(epsilon, deltas=(0.0,), tol=DEFAULT_TOL):
    """Family parameters for which the closed-form time orthogonalizes psi2 and psi3.

    The closed form depends on epsilon only. At a fixed phase ``x = omega t``
    the evolved overlap of psi2 with ``(cos(theta), -i e^{i delta} sin(theta))``
    is ``a cos(theta) + b sin(theta)``, so for each branch and each delta
    there is at most one gamma (mod pi) that makes it vanish: the one with
    ``tan(theta) = -a/b``, which must be real. ``is_first_root`` says
    whether :func:`tau_numeric` would return that same time.
    """
    from .ptcore import FamilyParams, gram_evolution, state_family

    psi1, psi2, _ = state_family(FamilyParams(epsilon))
    h = design_cpt_orthogonal(psi1, psi2, tol)
    theta1 = (math.pi - 2 * epsilon) / 4
    points = []
    for sign in "+-":
        try:
            phase = tau_closed_form(epsilon, sign)
        except InvalidParameter:
            continue
        row = np.conj(psi2) @ gram_evolution(h, phase / h.omega)
        for delta in deltas:
            a = row[0]
            b = -1j * np.exp(1j * delta) * row[1]
            if abs(b) <= tol * abs(a):
                theta = math.pi / 2
            else:
                ratio = -a / b
                if abs(ratio.imag) > tol * max(1.0, abs(ratio)):
                    continue
                theta = math.atan(ratio.real)
            gamma = (theta - theta1 + math.pi / 2) % math.pi - math.pi / 2
            _, _, psi3 = state_family(FamilyParams(epsilon, gamma, delta))
            try:
                first = tau_numeric(h, psi2, psi3, tol)
            except NoOrthogonalizingTime:
                first = math.nan
            points.append(
                LocusPoint(sign, delta, gamma, phase, abs(h.omega * first - phase) <= 1e-8)
            )
    return points


# -- measurement ------------------------------------------------------------


@dataclass
class MeasurementRecord:
    kind: str  # "CPT" or "Hermitian"
    target_index: Optional[int]
    residual: float
    verdict: str  # "zero" or "nonzero"
    outcome_bit: Optional[str] = None  # "along" / "orthogonal", stochastic only
    probability: Optional[float] = None

    @property
    def is_zero(self):
        return self.verdict == "zero"


def _metric_inner(metric, u, v):
    return inner_hermitian(u, v) if metric is None else cpt_inner(metric, u, v)


def _metric_norm(metric, u):
    return norm_hermitian(u) if metric is None else cpt_norm(metric, u)


def _kind(metric):
    return "Hermitian" if metric is None else "CPT"


def hermitian_projector(u):
    u = np.asarray(u, dtype=complex)
    return np.outer(u, np.conj(u)) / inner_hermitian(u, u).real


def measure_deterministic(p, sample, metric=None, tol=DEFAULT_TOL, target_index=None):
    """Ideal zero test of a projector on a sample, without collapse.

    ``metric`` is a :class:`PTHamiltonian` for the CPT metric or ``None``
    for the Hermitian one. The residual is the metric norm of ``P sample``
    relative to that of ``sample``.
    """
    sample = np.asarray(sample, dtype=complex)
    n = _metric_norm(metric, sample)
    if n <= 1e-300:
        raise ZeroCPTNorm("sample has vanishing metric norm")
    residual = _metric_norm(metric, np.asarray(p) @ sample) / n
    return MeasurementRecord(
        _kind(metric), target_index, residual, "zero" if residual <= tol else "nonzero"
    )


def born_probability(basis_state, sample, metric=None):
    """|<basis|sample>|^2 / (|basis|^2 |sample|^2) in the given metric, clamped to [0, 1]."""
    nb = _metric_norm(metric, basis_state)
    ns = _metric_norm(metric, sample)
    if nb <= 1e-300 or ns <= 1e-300:
        raise ZeroCPTNorm("basis state or sample has vanishing metric norm")
    p = abs(_metric_inner(metric, basis_state, sample)) ** 2 / (nb * nb * ns * ns)
    return min(max(p, 0.0), 1.0)


def measure_stochastic(basis_state, sample, metric, rng, target_index=None):
    """Born-rule two-outcome measurement; consumes exactly one uniform from ``rng``."""
    p = born_probability(basis_state, sample, metric)
    along = rng.random() < p
    return MeasurementRecord(
        _kind(metric),
        target_index,
        residual=math.sqrt(p),
        verdict="nonzero" if along else "zero",
        outcome_bit="along" if along else "orthogonal",
        probability=p,
    )


# -- planning ---------------------------------------------------------------


@dataclass
class DiscriminationPlan:
    """One protocol step. ``k is None`` marks the final two-candidate step."""

    i: int
    j: int
    k: Optional[int]
    hamiltonian: PTHamiltonian
    tau: float
    mode: str
    second_hamiltonian: Optional[PTHamiltonian] = None

    @property
    def samples(self):
        return 1 if self.k is None else 2

    def residuals(self, states):
        """Orthogonality residuals (first pair, second pair) for post-verification."""
        u, v = states[self.i - 1], states[self.j - 1]
        h = self.hamiltonian
        first = abs(cpt_inner(h, u, v)) / (cpt_norm(h, u) * cpt_norm(h, v))
        if self.k is None:
            return first, None
        w = states[self.k - 1]
        if self.mode == COMBINED:
            second = float(hermitian_residual(h, v, w, self.tau))
        else:
            h2 = self.second_hamiltonian
            second = abs(cpt_inner(h2, v, w)) / (cpt_norm(h2, v) * cpt_norm(h2, w))
        return first, second


def _as_states(states):
    return [np.asarray(s, dtype=complex) for s in states]


def _check_indices(n, *idx):
    if len(set(idx)) != len(idx):
        raise InvalidParameter(f"indices must be distinct, got {idx}")
    for a in idx:
        if not 1 <= a <= n:
            raise InvalidParameter(f"index {a} outside 1..{n}")


def plan_round(states, i, j, k, mode=COMBINED, tol=DEFAULT_TOL, candidates=None):
    """Design the Hamiltonian(s) and time for the ordered triple (i, j, k).

    ``candidates`` lists the indices still in play; if any of them other
    than psi_j (resp. psi_k) would also give a zero first (resp. second)
    measurement, the triple is rejected with :class:`DegenerateTriple`.
    """
    _check_mode(mode)
    states = _as_states(states)
    _check_indices(len(states), i, j, k)
    u, v, w = states[i - 1], states[j - 1], states[k - 1]
    h = design_cpt_orthogonal(u, v, tol)
    if mode == COMBINED:
        plan = DiscriminationPlan(i, j, k, h, tau_numeric(h, v, w, tol), mode)
    else:
        plan = DiscriminationPlan(i, j, k, h, 0.0, mode, design_cpt_orthogonal(v, w, tol))
    first, second = plan.residuals(states)
    if first > tol or second > tol:
        raise PlanningError(f"plan post-check failed: residuals {first:.3e}, {second:.3e}")
    others = set(candidates if candidates is not None else (i, j, k))
    for m in others - {j}:
        z = states[m - 1]
        if abs(cpt_inner(h, u, z)) / (cpt_norm(h, u) * cpt_norm(h, z)) <= tol:
            raise DegenerateTriple(f"psi_{m} is CPT-orthogonal to psi_{i} as well as psi_{j}")
    for m in others - {k}:
        z = states[m - 1]
        if mode == COMBINED:
            res = float(hermitian_residual(h, v, z, plan.tau))
        else:
            h2 = plan.second_hamiltonian
            res = abs(cpt_inner(h2, v, z)) / (cpt_norm(h2, v) * cpt_norm(h2, z))
        if res <= tol:
            raise DegenerateTriple(f"psi_{m} would pass the second measurement as well as psi_{k}")
    return plan


def plan_pair(states, i, j, mode=COMBINED, tol=DEFAULT_TOL):
    _check_mode(mode)
    states = _as_states(states)
    _check_indices(len(states), i, j)
    h = design_cpt_orthogonal(states[i - 1], states[j - 1], tol)
    return DiscriminationPlan(i, j, None, h, 0.0, mode)


def _orderings(cands):
    """Ordered triples to try: the front three first (rotations, then reversals), then later candidates."""
    for combo in itertools.combinations(range(len(cands)), 3):
        a, b, c = (cands[x] for x in combo)
        yield from ((a, b, c), (b, c, a), (c, a, b), (a, c, b), (c, b, a), (b, a, c))


def plan_protocol(states, mode=COMBINED, tol=DEFAULT_TOL):
    """Plan every round of the elimination protocol for the given candidates.

    The sequence of rounds does not depend on measurement outcomes (a round
    either ends the protocol or removes its j and k), so it can be fixed in
    advance. Triples are tried in a fixed order with backtracking, so the
    result is reproducible.
    """
    _check_mode(mode)
    states = _as_states(states)
    n = len(states)
    if n < 1:
        raise InvalidParameter("need at least one candidate state")
    for a, b in itertools.combinations(range(n), 2):
        overlap = abs(inner_hermitian(states[a], states[b]))
        if overlap >= (1 - 1e-12) * norm_hermitian(states[a]) * norm_hermitian(states[b]):
            raise InvalidParameter(f"states {a + 1} and {b + 1} coincide up to phase")

    cache = {}
    dead = set()
    first_error = []

    def attempt(key, fn):
        if key not in cache:
            try:
                cache[key] = fn()
            except PlanningError as err:
                cache[key] = err
        result = cache[key]
        if isinstance(result, PlanningError):
            if not first_error:
                first_error.append(result)
            return None
        return result

    def solve(cands):
        if len(cands) <= 1:
            return []
        if frozenset(cands) in dead:
            return None
        if len(cands) == 2:
            i, j = cands
            plan = attempt((i, j), lambda: plan_pair(states, i, j, mode, tol))
            if plan is None:
                dead.add(frozenset(cands))
                return None
            return [plan]
        for i, j, k in _orderings(cands):
            key = (i, j, k, frozenset(cands))
            plan = attempt(key, lambda: plan_round(states, i, j, k, mode, tol, cands))
            if plan is None:
                continue
            rest = solve([c for c in cands if c not in (j, k)])
            if rest is not None:
                return [plan] + rest
        dead.add(frozenset(cands))
        return None

    plans = solve(list(range(1, n + 1)))
    if plans is None:
        err = first_error[0] if first_error else PlanningError("no feasible plan")
        raise type(err)(f"no feasible ordering of the candidates; first failure: {err}")
    return plans


# -- protocol ---------------------------------------------------------------


@dataclass
class ProtocolResult:
    identified: int
    rounds: list = field(default_factory=list)  # (DiscriminationPlan, [MeasurementRecord, ...])
    samples_used: int = 0
    mode: str = DETERMINISTIC


def round_measurements(plan, states, true_index):
    """(basis state, projector-free sample, metric, target) for each measurement of a round.

    Shared by the single-run protocol and the Monte Carlo driver so that
    both see identical Born probabilities.
    """
    psi = states[true_index - 1]
    u, v = states[plan.i - 1], states[plan.j - 1]
    if plan.k is None:
        return [(u, psi, plan.hamiltonian, plan.i)]
    if plan.mode == COMBINED:
        evo = propagator(plan.hamiltonian, plan.tau)
        sample = evo @ psi
        return [
            (evo @ u, sample, plan.hamiltonian, plan.i),
            (evo @ v, sample, None, plan.j),
        ]
    return [(u, psi, plan.hamiltonian, plan.i), (v, psi, plan.second_hamiltonian, plan.j)]


def _measure(basis, sample, metric, target, measurement, rng, tol):
    if measurement == STOCHASTIC:
        return measure_stochastic(basis, sample, metric, rng, target)
    if metric is None:
        proj = hermitian_projector(basis)
    else:
        proj = cpt_projector(metric, basis)
    return measure_deterministic(proj, sample, metric, tol, target)


def run_protocol(states, plans, true_index, measurement=DETERMINISTIC, rng=None, tol=DEFAULT_TOL):
    """Execute precomputed plans against the true state ``true_index`` (1-based)."""
    states = _as_states(states)
    n = len(states)
    if not 1 <= true_index <= n:
        raise InvalidParameter(f"true_index {true_index} outside 1..{n}")
    if measurement not in MEASUREMENTS:
        raise InvalidParameter(f"measurement must be one of {MEASUREMENTS}, got {measurement!r}")
    if measurement == STOCHASTIC and rng is None:
        raise InvalidParameter("stochastic measurement needs an rng")

    result = ProtocolResult(identified=1 if n == 1 else 0, mode=measurement)
    for plan in plans:
        records = [
            _measure(b, s, m, t, measurement, rng, tol)
            for b, s, m, t in round_measurements(plan, states, true_index)
        ]
        result.rounds.append((plan, records))
        result.samples_used += plan.samples
        if plan.k is None:
            result.identified = plan.j if records[0].is_zero else plan.i
            break
        if records[0].is_zero:
            result.identified = plan.j
            break
        if records[1].is_zero:
            result.identified = plan.k
            break
    else:
        removed = {x for p, _ in result.rounds for x in (p.j, p.k)}
        (result.identified,) = [c for c in range(1, n + 1) if c not in removed]
    if measurement == DETERMINISTIC and result.samples_used > max(n - 1, 0):
        raise SampleBudgetExceeded(f"used {result.samples_used} samples for {n} candidates")
    return result


def discriminate3(
    states, true_index, mode=COMBINED, measurement=DETERMINISTIC, rng=None, tol=DEFAULT_TOL
):
    """Two-measurement protocol on three states with the fixed ordering (1, 2, 3)."""
    states = _as_states(states)
    if len(states) != 3:
        raise InvalidParameter(f"discriminate3 needs exactly three states, got {len(states)}")
    plan = plan_round(states, 1, 2, 3, mode, tol)
    return run_protocol(states, [plan], true_index, measurement, rng, tol)


def discriminate_n(
    states,
    true_index,
    mode=COMBINED,
    measurement=DETERMINISTIC,
    rng=None,
    tol=DEFAULT_TOL,
    plans=None,
):
    """Identify one of N candidate states by repeated two-sample elimination rounds."""
    if plans is None:
        plans = plan_protocol(states, mode, tol)
    return run_protocol(states, plans, true_index, measurement, rng, tol)
