"""Command-line driver: ``ptqsd {design,tau,simulate,sweep,verify}``.

Exit status is 0 on success, 1 on domain errors (broken regime, infeasible
design, ...) and 2 on usage errors. Single runs print one JSON document;
sweeps print CSV. Floats are written with 12 significant digits.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from . import discriminate as dsc
from .errors import PTError
from .linalg2 import norm_hermitian
from .montecarlo import simulate_trials
from .ptcore import FamilyParams, spread_family, state_family
from .verify import run_all

SWEEP_HEADER = [
    "param",
    "value",
    "alpha",
    "omega",
    "tau_numeric",
    "tau_closed_plus",
    "tau_closed_minus",
    "residual",
    "identified",
    "accuracy",
]
ANGLE_KEYS = ("epsilon", "gamma", "delta")
MIN_COS_ALPHA = 1e-3


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    epsilon: Optional[float] = None
    gamma: float = 0.0
    delta: float = 0.0
    states: list = field(default_factory=list)  # explicit extra states, "a,b" strings
    n_states: Optional[int] = None
    spacing: float = 0.1
    mode: str = dsc.COMBINED
    measurement: str = dsc.DETERMINISTIC
    trials: int = 1000
    seed: int = 0
    tolerance: float = dsc.DEFAULT_TOL
    true_state: Optional[int] = None
    workers: int = 1
    sweep_param: Optional[str] = None
    sweep_start: Optional[float] = None
    sweep_stop: Optional[float] = None
    sweep_steps: Optional[int] = None

    def validate(self):
        if self.mode not in dsc.MODES:
            raise UsageError(f"--mode must be one of {dsc.MODES}")
        if self.measurement not in dsc.MEASUREMENTS:
            raise UsageError(f"--measurement must be one of {dsc.MEASUREMENTS}")
        if self.measurement == dsc.STOCHASTIC and self.trials < 1:
            raise UsageError(f"--trials must be >= 1, got {self.trials}")
        if not 0 < self.tolerance <= 1e-3:
            raise UsageError(f"--tolerance must lie in (0, 1e-3], got {self.tolerance}")
        if not 0 <= self.seed < 2**64:
            raise UsageError(f"--seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise UsageError(f"--workers must be >= 1, got {self.workers}")
        if self.sweep_param is not None:
            if self.sweep_steps is None or self.sweep_steps < 2:
                raise UsageError("--steps must be >= 2 for a sweep")
            if self.sweep_start is None or self.sweep_stop is None:
                raise UsageError("--start and --stop are required for a sweep")

    def candidate_states(self):
        extra = [parse_state(s) for s in self.states]
        if self.n_states is not None:
            if self.epsilon is None:
                raise UsageError("--n-states needs --epsilon")
            return spread_family(self.n_states, self.epsilon, self.spacing) + extra
        if self.epsilon is not None:
            return list(state_family(FamilyParams(self.epsilon, self.gamma, self.delta))) + extra
        if len(extra) < 2:
            raise UsageError("give --epsilon or at least two --state vectors")
        return extra


def parse_state(text):
    """Parse ``"a,b"`` (Python complex literals) into a normalized 2-vector."""
    try:
        a, b = (complex(part.strip().replace(" ", "")) for part in text.split(","))
    except ValueError:
        raise UsageError(f"--state {text!r}: expected two complex numbers 'a,b'") from None
    v = np.array([a, b], dtype=complex)
    n = norm_hermitian(v)
    if n == 0:
        raise UsageError(f"--state {text!r} is the zero vector")
    return v / n


def fmt(x):
    """Round to 12 significant digits for output."""
    if x is None:
        return None
    if isinstance(x, (complex, np.complexfloating)):
        return [fmt(x.real), fmt(x.imag)]
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


def hamiltonian_record(h):
    return {
        "r": fmt(h.r),
        "s": fmt(h.s),
        "beta": fmt(h.beta),
        "alpha": fmt(h.alpha),
        "omega": fmt(h.omega),
    }


def check_cos_alpha(h):
    if math.cos(h.alpha) < MIN_COS_ALPHA:
        raise dsc.NotOrthogonalizable(
            f"design too close to the exceptional point: cos(alpha) = {math.cos(h.alpha):.3e} < {MIN_COS_ALPHA:g}"
        )


def plan_record(plan, states):
    first, second = plan.residuals(states)
    rec = {
        "i": plan.i,
        "j": plan.j,
        "k": plan.k,
        "mode": plan.mode,
        "hamiltonian": hamiltonian_record(plan.hamiltonian),
        "tau": fmt(plan.tau),
        "second_hamiltonian": None
        if plan.second_hamiltonian is None
        else hamiltonian_record(plan.second_hamiltonian),
        "residual_first": fmt(first),
        "residual_second": fmt(second),
    }
    return rec


def measurement_record(m):
    return {
        "kind": m.kind,
        "target_index": m.target_index,
        "residual": fmt(m.residual),
        "verdict": m.verdict,
        "outcome_bit": m.outcome_bit,
        "probability": fmt(m.probability),
    }


def verified_plans(states, cfg):
    plans = dsc.plan_protocol(states, cfg.mode, cfg.tolerance)
    for plan in plans:
        for h in (plan.hamiltonian, plan.second_hamiltonian):
            if h is not None:
                check_cos_alpha(h)
        first, second = plan.residuals(states)
        if first > cfg.tolerance or (second is not None and second > cfg.tolerance):
            raise dsc.PlanningError(f"emitted plan fails re-verification: {first:.3e}, {second}")
    return plans


# -- subcommands ------------------------------------------------------------


def cmd_design(cfg, args):
    states = cfg.candidate_states()
    i, j = args.pair
    for x in (i, j):
        if not 1 <= x <= len(states):
            raise UsageError(f"--pair index {x} outside 1..{len(states)}")
    u, v = states[i - 1], states[j - 1]
    h = dsc.design_cpt_orthogonal(u, v, cfg.tolerance)
    check_cos_alpha(h)
    from .ptcore import cpt_inner

    return {
        "command": "design",
        "config": config_record(cfg),
        "pair": [i, j],
        "hamiltonian": hamiltonian_record(h),
        "sin_alpha": fmt(h.sin_alpha),
        "cpt_overlap": fmt(abs(cpt_inner(h, u, v))),
    }


def tau_report(cfg):
    psi1, psi2, psi3 = state_family(FamilyParams(cfg.epsilon, cfg.gamma, cfg.delta))
    h = dsc.design_cpt_orthogonal(psi1, psi2, cfg.tolerance)
    check_cos_alpha(h)
    closed = {}
    for sign, name in (("+", "plus"), ("-", "minus")):
        try:
            phase = dsc.tau_closed_form(cfg.epsilon, sign)
            closed[name] = {
                "tan_omega_tau": fmt(dsc.tan_omega_tau(cfg.epsilon, sign)),
                "omega_tau": fmt(phase),
                "tau": fmt(phase / h.omega),
                "residual": fmt(dsc.hermitian_residual(h, psi2, psi3, phase / h.omega)),
            }
        except PTError as err:
            closed[name] = {"error": f"{type(err).__name__}: {err}"}
    try:
        tau = dsc.tau_numeric(h, psi2, psi3, cfg.tolerance)
        numeric = {
            "tau": fmt(tau),
            "omega_tau": fmt(h.omega * tau),
            "residual": fmt(dsc.hermitian_residual(h, psi2, psi3, tau)),
        }
    except dsc.NoOrthogonalizingTime as err:
        numeric = {"error": f"NoOrthogonalizingTime: {err}", "achieved": fmt(err.achieved)}
    for branch in closed.values():
        if "omega_tau" in branch and "omega_tau" in numeric:
            branch["matches_numeric"] = abs(branch["omega_tau"] - numeric["omega_tau"]) <= 1e-8
    return h, closed, numeric


def cmd_tau(cfg, args):
    if cfg.epsilon is None:
        raise UsageError("tau needs --epsilon")
    h, closed, numeric = tau_report(cfg)
    locus = [
        {"sign": p.sign, "delta": fmt(p.delta), "gamma": fmt(p.gamma),
         "omega_tau": fmt(p.omega_tau), "is_first_root": bool(p.is_first_root)}
        for p in dsc.closed_form_locus(cfg.epsilon, (cfg.delta,), cfg.tolerance)
    ]
    out = {
        "command": "tau",
        "config": config_record(cfg),
        "hamiltonian": hamiltonian_record(h),
        "closed_form": closed,
        "numeric": numeric,
        "closed_form_locus": locus,
    }
    if "error" in numeric:
        # reported in full, but still a domain failure
        return out, 1
    return out


def simulate(cfg, states):
    plans = verified_plans(states, cfg)
    n = len(states)
    truths = [cfg.true_state] if cfg.true_state is not None else list(range(1, n + 1))
    for t in truths:
        if not 1 <= t <= n:
            raise UsageError(f"--true-state {t} outside 1..{n}")
    out = {"plans": [plan_record(p, states) for p in plans]}
    if cfg.measurement == dsc.DETERMINISTIC:
        runs = []
        for t in truths:
            res = dsc.run_protocol(states, plans, t, dsc.DETERMINISTIC, tol=cfg.tolerance)
            runs.append(
                {
                    "true_state": t,
                    "identified": res.identified,
                    "samples_used": res.samples_used,
                    "measurements": [
                        [measurement_record(m) for m in recs] for _, recs in res.rounds
                    ],
                }
            )
        out["runs"] = runs
        out["accuracy"] = fmt(sum(r["identified"] == r["true_state"] for r in runs) / len(runs))
        if len(runs) == 1:
            out["identified"] = runs[0]["identified"]
    else:
        mc = simulate_trials(
            states, cfg.trials, cfg.seed, cfg.mode, truths, cfg.workers, cfg.tolerance, plans
        )
        out["accuracy"] = fmt(mc.accuracy)
        out["per_state_accuracy"] = {str(k): fmt(v) for k, v in mc.per_state_accuracy().items()}
        out["confusion"] = mc.confusion.tolist()
        out["born_probabilities"] = [[fmt(p) for p in row] for row in mc.probabilities]
        out["measured"] = mc.reached.tolist()
        out["along"] = mc.along.tolist()
    return out


def cmd_simulate(cfg, args):
    states = cfg.candidate_states()
    out = {"command": "simulate", "config": config_record(cfg)}
    out.update(simulate(cfg, states))
    return out


def sweep_row(cfg, name, value):
    row = dict.fromkeys(SWEEP_HEADER, "")
    row["param"] = name
    row["value"] = fmt(value)
    try:
        states = cfg.candidate_states()
        if cfg.epsilon is not None:
            psi1, psi2, psi3 = state_family(FamilyParams(cfg.epsilon, cfg.gamma, cfg.delta))
            h = dsc.design_cpt_orthogonal(psi1, psi2, cfg.tolerance)
            row["alpha"] = fmt(h.alpha)
            row["omega"] = fmt(h.omega)
            for sign, col in (("+", "tau_closed_plus"), ("-", "tau_closed_minus")):
                try:
                    row[col] = fmt(dsc.tau_closed_form(cfg.epsilon, sign) / h.omega)
                except PTError:
                    pass
            try:
                tau = dsc.tau_numeric(h, psi2, psi3, cfg.tolerance)
                row["tau_numeric"] = fmt(tau)
                row["residual"] = fmt(dsc.hermitian_residual(h, psi2, psi3, tau))
            except dsc.NoOrthogonalizingTime as err:
                row["residual"] = fmt(err.achieved)
        result = simulate(cfg, states)
        if cfg.measurement == dsc.DETERMINISTIC and "identified" in result:
            row["identified"] = result["identified"]
        row["accuracy"] = result["accuracy"]
    except PTError:
        pass
    return ["" if row[k] is None else row[k] for k in SWEEP_HEADER]


def cmd_sweep(cfg, args):
    if cfg.sweep_param is None:
        raise UsageError("sweep needs --param, --start, --stop and --steps")
    if cfg.sweep_param not in ("epsilon", "gamma", "delta", "spacing"):
        raise UsageError(f"cannot sweep {cfg.sweep_param!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for value in np.linspace(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_steps):
        point = ExperimentConfig(**{**asdict(cfg), cfg.sweep_param: float(value)})
        writer.writerow(sweep_row(point, cfg.sweep_param, value))
    return buf.getvalue()


def cmd_verify(cfg, args):
    checks = run_all(seed=cfg.seed)
    passed = sum(bool(ok) for _, ok, _ in checks)
    out = {
        "command": "verify",
        "passed": passed,
        "failed": len(checks) - passed,
        "checks": [{"name": n, "passed": bool(ok), "worst_error": fmt(e)} for n, ok, e in checks],
    }
    return out, 0 if passed == len(checks) else 1


# -- plumbing ---------------------------------------------------------------


def config_record(cfg):
    rec = asdict(cfg)
    for key in ANGLE_KEYS + ("spacing", "tolerance", "sweep_start", "sweep_stop"):
        rec[key] = fmt(rec[key])
    return rec


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with ExperimentConfig keys; flags win")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--degrees", action="store_true", help="angles given in degrees")
    common.add_argument("--state", action="append", dest="states", metavar="A,B",
                        help="extra candidate state as two complex numbers, repeatable")
    common.add_argument("--n-states", type=int)
    common.add_argument("--spacing", type=float)
    common.add_argument("--mode", choices=dsc.MODES)
    common.add_argument("--measurement", choices=dsc.MEASUREMENTS)
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--true-state", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--out", help="write the result here instead of stdout")

    parser = _Parser(prog="ptqsd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("design", parents=[common], help="Hamiltonian making a pair CPT-orthogonal")
    p.add_argument("--pair", type=int, nargs=2, default=[1, 2], metavar=("I", "J"))
    sub.add_parser("tau", parents=[common], help="closed-form and numeric orthogonalizing time")
    sub.add_parser("simulate", parents=[common], help="run the discrimination protocol")
    p = sub.add_parser("sweep", parents=[common], help="vary one parameter, emit CSV")
    p.add_argument("--param", dest="sweep_param")
    p.add_argument("--start", dest="sweep_start", type=float)
    p.add_argument("--stop", dest="sweep_stop", type=float)
    p.add_argument("--steps", dest="sweep_steps", type=int)
    sub.add_parser("verify", parents=[common], help="run the invariant self-checks")
    return parser


def make_config(args):
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"--config {args.config}: {err}") from None
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"--config: unknown keys {sorted(unknown)}")
    for f in fields(ExperimentConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    cfg = ExperimentConfig(**values)
    if args.degrees:
        for key in ANGLE_KEYS:
            if getattr(cfg, key) is not None:
                setattr(cfg, key, math.radians(getattr(cfg, key)))
        if cfg.sweep_param in ANGLE_KEYS:
            cfg.sweep_start = math.radians(cfg.sweep_start)
            cfg.sweep_stop = math.radians(cfg.sweep_stop)
    cfg.validate()
    return cfg


COMMANDS = {
    "design": cmd_design,
    "tau": cmd_tau,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def run_command(argv, stdout=None, stderr=None):
    """Run one subcommand; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = make_config(args)
        result = COMMANDS[args.command](cfg, args)
    except UsageError as err:
        print(f"usage error: {err}", file=stderr)
        return 2
    except PTError as err:
        print(f"{type(err).__name__}: {err}", file=stderr)
        return 1

    status = 0
    if isinstance(result, tuple):
        result, status = result
    text = result if isinstance(result, str) else json.dumps(result, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
