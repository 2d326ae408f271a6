"""Command-line harness wiring every module together.

Commands: simulate, verify, cost-table, compare-joint, primitives-check.
Reports are deterministic functions of (config, seed): anything runtime-
dependent (wall time, worker count, backend name) goes to stderr so that
the emitted report bytes never depend on how the work was scheduled.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .backend import active_backend, simulate_trials
from .battery import run_battery
from .enumeration import exact_joint
from .quantum import quantum_joint
from .randomness import DEFAULT_SEED, Direction, cos_between, unit_direction
from .spins import (
    HalfInteger,
    Spin,
    build_chain,
    comm_cost,
    outcome_support,
    parse_spin,
    randomness_budget,
)
from .stats import OutcomeSums, chi_square_uniform, z_test
from .verify import empirical_tables, verify_spins

SCHEMA_VERSION = 1
SEED_ENV_VAR = "SINGLET_SIM_SEED"


@dataclass(frozen=True)
class RunConfig:
    spin: Spin
    direction_a: Direction
    direction_b: Direction
    trials: int
    seed: int
    workers: int
    output_format: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def _parse_direction(text: str, spherical: bool) -> Direction:
    parts = [float(p) for p in text.split(",")]
    if spherical:
        if len(parts) != 2:
            raise ValueError(f"spherical direction needs 'theta,phi', got {text!r}")
        theta, phi = parts
        return unit_direction(
            math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)
        )
    if len(parts) != 3:
        raise ValueError(f"direction needs 'x,y,z', got {text!r}")
    return unit_direction(*parts)


def _resolve_seed(arg_seed: int | None) -> int:
    if arg_seed is not None:
        return arg_seed
    env = os.environ.get(SEED_ENV_VAR)
    if env:
        return int(env, 0)
    return DEFAULT_SEED


def _direction_json(d: Direction) -> list[float]:
    return [d.x, d.y, d.z]


def _chain_json(spin: Spin) -> dict:
    chain = build_chain(spin)
    budget = randomness_budget(spin)
    return {
        "dimension": spin.dimension,
        "binary": bin(spin.dimension)[2:],
        "comm_cost": comm_cost(spin),
        "n_lambda": budget.n_lambda,
        "n_mu": budget.n_mu,
        "n_nu": budget.n_nu,
        "f_biases": {
            str(step.prefix_dim): str(step.f_bias)
            for step in chain.steps
            if step.f_bias is not None
        },
    }


def _quantum_target(spin: Spin, cos_ab: float) -> float:
    return -spin.twice * (spin.twice + 2) / 12.0 * cos_ab


def cmd_simulate(config: RunConfig, backend: str | None = None,
                 transcript_path: str | None = None) -> dict:
    """Run trials and assemble the simulate report."""
    spin, a, b = config.spin, config.direction_a, config.direction_b
    chain = build_chain(spin)
    arrays = simulate_trials(chain, a, b, config.trials, config.seed,
                             workers=config.workers, backend=backend)
    counts_a, counts_b = empirical_tables(arrays, spin)
    support = outcome_support(spin)
    d = spin.dimension

    joint = np.zeros((d, d), dtype=np.int64)
    ia = (spin.twice - arrays.alpha2.astype(np.int64)) >> 1
    ib = (spin.twice - arrays.beta2.astype(np.int64)) >> 1
    np.add.at(joint, (ia, ib), 1)

    cos_ab = cos_between(a, b)
    target = _quantum_target(spin, cos_ab)
    results: dict = {
        "marginal_alpha": _marginal_json(counts_a, support),
        "marginal_beta": _marginal_json(counts_b, support),
        "joint": [
            {
                "alpha": support[i].to_json(),
                "beta": support[j].to_json(),
                "count": int(joint[i, j]),
                "frequency": int(joint[i, j]) / config.trials,
            }
            for i in range(d)
            for j in range(d)
            if joint[i, j]
        ],
        "quantum_target": target,
        "cbits_per_trial": chain.n_steps,
    }
    if config.trials >= 2:
        estimate = OutcomeSums.from_arrays(arrays.alpha2, arrays.beta2).estimate()
        results["correlation"] = estimate.to_json_obj()
        results["z_score_vs_target"] = z_test(estimate, target)
    else:
        results["correlation"] = None
        results["z_score_vs_target"] = None

    if transcript_path:
        _dump_transcripts(transcript_path, arrays)

    return {
        "schema": SCHEMA_VERSION,
        "command": "simulate",
        "config": {
            "spin": str(spin),
            "a": _direction_json(a),
            "b": _direction_json(b),
            "trials": config.trials,
            "seed": config.seed,
        },
        "chain": _chain_json(spin),
        "results": results,
    }


def _marginal_json(counts, support) -> dict:
    obj = {"counts": {str(v): int(c) for v, c in zip(support, counts)}}
    if len(support) >= 2:
        obj["uniformity"] = chi_square_uniform(counts).to_json_obj()
    else:
        obj["uniformity"] = None
    return obj


def _dump_transcripts(path: str, arrays) -> None:
    with open(path, "w") as fh:
        for t in range(len(arrays)):
            rec = {
                "trial": t,
                "alpha": HalfInteger(int(arrays.alpha2[t])).to_json(),
                "beta": HalfInteger(int(arrays.beta2[t])).to_json(),
                "cbits": [int(c) for c in arrays.cbits[t]],
                "f_bits": [int(f) for f in arrays.fbits[t]],
            }
            fh.write(json.dumps(rec) + "\n")


def cmd_verify(spin_max: Spin, pairs: int, trials: int, seed: int, tol: float,
               workers: int = 1, backend: str | None = None,
               perturb_bias: float = 0.0, perturb_coeff: int = 0) -> dict:
    """Run the verification grid; the report carries an overall ok flag."""
    if spin_max.twice > 40:
        raise ValueError("spin-max is capped at 20 (enumeration guard)")
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    report = verify_spins(spin_max, pairs, trials, seed, tol, workers, backend,
                          bias_delta=perturb_bias, coeff_delta_twice=perturb_coeff)
    obj = report.to_json_obj()
    obj["config"] = {
        "spin_max": str(spin_max),
        "pairs": pairs,
        "trials": trials,
        "seed": seed,
        "tolerance": tol,
        "perturb_bias": perturb_bias,
        "perturb_coeff": perturb_coeff,
    }
    return obj


def cmd_cost_table(spin_max: Spin) -> dict:
    """Communication and randomness budget per spin up to spin_max."""
    rows = []
    for twice in range(1, spin_max.twice + 1):
        spin = Spin(twice)
        rows.append({"spin": str(spin)} | _chain_json(spin))
    return {"schema": SCHEMA_VERSION, "command": "cost-table", "rows": rows}


def cmd_compare_joint(spin: Spin, a: Direction, b: Direction) -> dict:
    """Protocol joint law vs quantum joint law, side by side."""
    chain = build_chain(spin)
    cos_ab = cos_between(a, b)
    protocol = exact_joint(chain, cos_ab)
    quantum = quantum_joint(spin, a, b)
    corr_protocol = float(protocol.correlation())
    corr_quantum = float(quantum.correlation())
    target = _quantum_target(spin, cos_ab)
    marg_a = protocol.marginal_alpha().max_abs_diff(quantum.marginal_alpha())
    marg_b = protocol.marginal_beta().max_abs_diff(quantum.marginal_beta())
    agree = (
        marg_a <= 1e-9
        and marg_b <= 1e-9
        and abs(corr_protocol - corr_quantum) <= 1e-9
    )
    return {
        "schema": SCHEMA_VERSION,
        "command": "compare-joint",
        "config": {"spin": str(spin), "a": _direction_json(a), "b": _direction_json(b)},
        "results": {
            "cos_ab": cos_ab,
            "protocol_joint": protocol.to_json_obj(),
            "quantum_joint": quantum.to_json_obj(),
            "total_variation": protocol.total_variation(quantum),
            "marginal_alpha_max_diff": marg_a,
            "marginal_beta_max_diff": marg_b,
            "correlation_protocol": corr_protocol,
            "correlation_quantum": corr_quantum,
            "correlation_closed_form": target,
            "marginals_and_correlation_agree": agree,
        },
    }


def cmd_primitives_check(trials: int, seed: int, a: Direction, b: Direction) -> dict:
    """Run the primitive statistics battery."""
    checks = run_battery(trials, seed, a, b)
    return {
        "schema": SCHEMA_VERSION,
        "command": "primitives-check",
        "config": {
            "trials": trials,
            "seed": seed,
            "a": _direction_json(a),
            "b": _direction_json(b),
        },
        "checks": [c.to_json_obj() for c in checks],
        "ok": all(c.passed for c in checks),
    }


# ---------------------------------------------------------------------------
# rendering


def _render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _render_csv(report: dict) -> str:
    command = report.get("command")
    lines = []
    if command == "simulate":
        lines.append("alpha,beta,probability")
        for row in report["results"]["joint"]:
            lines.append(f"{row['alpha']},{row['beta']},{row['frequency']!r}")
    elif command == "cost-table":
        lines.append("s,d,binary,n_c,n_lambda,n_mu,n_nu,f_biases")
        for row in report["rows"]:
            biases = ";".join(f"{k}={v}" for k, v in row["f_biases"].items())
            lines.append(
                f"{row['spin']},{row['dimension']},{row['binary']},{row['comm_cost']},"
                f"{row['n_lambda']},{row['n_mu']},{row['n_nu']},{biases}"
            )
    elif command == "compare-joint":
        quantum = {
            (row["alpha"], row["beta"]): row["probability"]
            for row in report["results"]["quantum_joint"]
        }
        lines.append("alpha,beta,protocol_probability,quantum_probability")
        keys = {(r["alpha"], r["beta"]) for r in report["results"]["protocol_joint"]} | set(quantum)
        rows = {(r["alpha"], r["beta"]): r["probability"]
                for r in report["results"]["protocol_joint"]}
        for key in sorted(keys, key=str):
            lines.append(
                f"{key[0]},{key[1]},{rows.get(key, 0.0)!r},{quantum.get(key, 0.0)!r}"
            )
    elif command == "primitives-check":
        lines.append("name,n_samples,estimate,target,std_error,z_score,passed")
        for c in report["checks"]:
            lines.append(
                f"{c['name']},{c['n_samples']},{c['estimate']!r},{c['target']!r},"
                f"{c['std_error']!r},{c['z_score']!r},{c['passed']}"
            )
    elif command == "verify":
        lines.append("spin,pair,cos_ab,enum_error,mc_z_score,support_ok,p_alpha,p_beta,ok")
        for spin_obj in report["spins"]:
            for i, p in enumerate(spin_obj["pairs"]):
                lines.append(
                    f"{spin_obj['spin']},{i},{p['cos_ab']!r},{p['enum_error']!r},"
                    f"{p['mc_z_score']!r},{p['support_ok']},"
                    f"{spin_obj['p_alpha']!r},{spin_obj['p_beta']!r},{spin_obj['ok']}"
                )
    else:
        raise ValueError(f"no CSV rendering for command {command!r}")
    return "\n".join(lines) + "\n"


def _render_table(report: dict) -> str:
    command = report.get("command")
    lines = []
    if command == "simulate":
        cfg, res = report["config"], report["results"]
        lines.append(f"spin {cfg['spin']}  trials {cfg['trials']}  seed {cfg['seed']}")
        lines.append(f"cbits/trial {res['cbits_per_trial']}")
        for side in ("alpha", "beta"):
            counts = res[f"marginal_{side}"]["counts"]
            body = "  ".join(f"{k}:{v}" for k, v in counts.items())
            lines.append(f"{side}-counts  {body}")
        corr = res["correlation"]
        if corr is not None:
            lines.append(
                f"correlation {corr['mean']:+.6f} +- {corr['std_error']:.6f}"
                f"  target {res['quantum_target']:+.6f}"
                f"  z {res['z_score_vs_target']:.2f}"
            )
    elif command == "cost-table":
        lines.append(f"{'s':>5} {'d':>4} {'binary':>8} {'n_c':>4} {'n_lam':>6} "
                     f"{'n_mu':>5} {'n_nu':>5}  f_biases")
        for row in report["rows"]:
            biases = " ".join(f"{k}->{v}" for k, v in row["f_biases"].items())
            lines.append(
                f"{row['spin']:>5} {row['dimension']:>4} {row['binary']:>8} "
                f"{row['comm_cost']:>4} {row['n_lambda']:>6} {row['n_mu']:>5} "
                f"{row['n_nu']:>5}  {biases}"
            )
    elif command == "compare-joint":
        res = report["results"]
        lines.append(f"cos_ab {res['cos_ab']:+.6f}")
        lines.append(f"total variation distance {res['total_variation']:.3e}")
        lines.append(
            f"correlation: protocol {res['correlation_protocol']:+.9f}"
            f"  quantum {res['correlation_quantum']:+.9f}"
            f"  closed form {res['correlation_closed_form']:+.9f}"
        )
        lines.append(f"marginals+correlation agree: {res['marginals_and_correlation_agree']}")
    elif command == "primitives-check":
        lines.append(f"{'check':<32} {'estimate':>12} {'target':>12} {'z':>7}  pass")
        for c in report["checks"]:
            lines.append(
                f"{c['name']:<32} {c['estimate']:>12.6f} {c['target']:>12.6f} "
                f"{c['z_score']:>7.2f}  {c['passed']}"
            )
        lines.append(f"ok: {report['ok']}")
    elif command == "verify":
        for spin_obj in report["spins"]:
            worst_z = max(p["mc_z_score"] for p in spin_obj["pairs"])
            worst_e = max(p["enum_error"] for p in spin_obj["pairs"])
            lines.append(
                f"s={spin_obj['spin']:<5} n_c={spin_obj['comm_cost']} "
                f"max_enum_err={worst_e:.2e} max_z={worst_z:.2f} "
                f"p_alpha={spin_obj['p_alpha']:.3f} p_beta={spin_obj['p_beta']:.3f} "
                f"ok={spin_obj['ok']}"
            )
        lines.append(f"ok: {report['ok']}")
    else:
        raise ValueError(f"no table rendering for command {command!r}")
    return "\n".join(lines) + "\n"


def _emit(report: dict, fmt: str, out: str | None) -> None:
    if fmt == "json":
        text = _render_json(report)
    elif fmt == "csv":
        text = _render_csv(report)
    elif fmt == "table":
        text = _render_table(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_exit(exc: Exception) -> int:
    obj = {
        "schema": SCHEMA_VERSION,
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }
    sys.stdout.write(json.dumps(obj) + "\n")
    return 2


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                   help=f"RNG seed (default: ${SEED_ENV_VAR} or {hex(DEFAULT_SEED)})")
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--out", metavar="FILE", default=None, help="write the report to FILE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="singletsim",
        description="Classical-communication simulation of two spin-s singlet correlations.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("simulate", help="run protocol trials and report statistics")
    p.add_argument("--spin", required=True, help="spin s, e.g. 2, 3/2 or 1.5")
    p.add_argument("--a", default="0,0,1", help="Alice direction 'x,y,z' (or 'theta,phi')")
    p.add_argument("--b", default="0,0,1", help="Bob direction 'x,y,z' (or 'theta,phi')")
    p.add_argument("--spherical", action="store_true",
                   help="parse --a/--b as spherical 'theta,phi' in radians")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=("auto", "cython", "python"), default="auto")
    p.add_argument("--dump-transcripts", metavar="FILE", default=None,
                   help="write per-trial JSON-lines transcripts to FILE")
    _add_common(p)

    p = sub.add_parser("verify", help="check enumeration, closed form and Monte Carlo agree")
    p.add_argument("--spin-max", default="15/2")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=("auto", "cython", "python"), default="auto")
    p.add_argument("--perturb-bias", type=float, default=0.0,
                   help="bug-injection self-test: offset every f-bias by this much")
    p.add_argument("--perturb-coeff", type=int, default=0,
                   help="bug-injection self-test: shift every coefficient by this many 1/2 units")
    _add_common(p)

    p = sub.add_parser("cost-table", help="communication / randomness budget per spin")
    p.add_argument("--spin-max", default="20")
    _add_common(p)

    p = sub.add_parser("compare-joint", help="protocol joint law vs quantum joint law")
    p.add_argument("--spin", required=True)
    p.add_argument("--a", default="0,0,1")
    p.add_argument("--b", default="0,0,1")
    p.add_argument("--spherical", action="store_true")
    _add_common(p)

    p = sub.add_parser("primitives-check", help="statistical battery for the sign/f primitives")
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--a", default="0.6,0,0.8")
    p.add_argument("--b", default="0,0.8,0.6")
    p.add_argument("--spherical", action="store_true")
    _add_common(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        exit_code = 0
        if args.cmd == "simulate":
            config = RunConfig(
                spin=parse_spin(args.spin),
                direction_a=_parse_direction(args.a, args.spherical),
                direction_b=_parse_direction(args.b, args.spherical),
                trials=args.trials,
                seed=_resolve_seed(args.seed),
                workers=args.workers,
                output_format=args.format,
            )
            report = cmd_simulate(config, backend=args.backend,
                                  transcript_path=args.dump_transcripts)
            print(f"backend={active_backend(args.backend)} workers={args.workers}",
                  file=sys.stderr)
        elif args.cmd == "verify":
            report = cmd_verify(
                parse_spin(args.spin_max), args.pairs, args.trials,
                _resolve_seed(args.seed), args.tol, args.workers, args.backend,
                args.perturb_bias, args.perturb_coeff,
            )
            exit_code = 0 if report["ok"] else 1
        elif args.cmd == "cost-table":
            report = cmd_cost_table(parse_spin(args.spin_max))
        elif args.cmd == "compare-joint":
            report = cmd_compare_joint(
                parse_spin(args.spin),
                _parse_direction(args.a, args.spherical),
                _parse_direction(args.b, args.spherical),
            )
        elif args.cmd == "primitives-check":
            report = cmd_primitives_check(
                args.trials, _resolve_seed(args.seed),
                _parse_direction(args.a, args.spherical),
                _parse_direction(args.b, args.spherical),
            )
            exit_code = 0 if report["ok"] else 1
        else:  # pragma: no cover
            raise ValueError(f"unknown command {args.cmd!r}")
        _emit(report, args.format, args.out)
    except (ValueError, RuntimeError, OSError) as exc:
        return _error_exit(exc)
    print(f"wall_time_s={time.perf_counter() - started:.3f}", file=sys.stderr)
    return exit_code


if __name__ == "__main__":
    raise SystemExit(main())
