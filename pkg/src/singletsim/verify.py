"""End-to-end verification: enumeration vs closed form vs Monte Carlo.

For every spin on the grid and a batch of random direction pairs this
checks, in order: the enumeration oracle reproduces -(1/3)s(s+1) a.b, the
Monte Carlo estimate agrees with the oracle within 5 standard errors, all
outcomes stay on the 2s+1 value grid, and both empirical marginals pass a
uniformity chi-square. The perturbation hooks deliberately corrupt the
chain (f-bias offset or coefficient shift) so the suite can demonstrate it
actually catches broken protocols.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import TrialArrays, simulate_trials
from .enumeration import exact_correlation
from .randomness import DEFAULT_SEED, RandomStream, cos_between, sample_direction
from .spins import BinaryChain, HalfInteger, Spin, build_chain
from .stats import OutcomeSums, chi_square_uniform, z_test

P_VALUE_FLOOR = 0.001
Z_MAX = 5.0


def perturb_chain(chain: BinaryChain, bias_delta: float = 0.0,
                  coeff_delta_twice: int = 0, step_index: int | None = None) -> BinaryChain:
    """Deliberately corrupted copy of a chain, for sensitivity self-tests.

    `bias_delta` shifts the f-bias of integer steps; `coeff_delta_twice`
    shifts step coefficients in units of 1/2. With step_index None every
    eligible step is perturbed, otherwise only that step.
    """
    steps = []
    for k, step in enumerate(chain.steps):
        touch = step_index is None or step_index == k
        if touch and bias_delta and step.f_bias is not None:
            new_bias = step.f_bias + Fraction(bias_delta)
            if not 0 < new_bias < 1:
                raise ValueError(f"perturbed bias {float(new_bias)} leaves (0, 1)")
            step = dataclasses.replace(step, f_bias=new_bias)
        if touch and coeff_delta_twice:
            step = dataclasses.replace(
                step, coefficient=HalfInteger(step.coefficient.twice + coeff_delta_twice)
            )
        steps.append(step)
    return dataclasses.replace(chain, steps=tuple(steps))


def empirical_tables(arrays: TrialArrays, spin: Spin):
    """Marginal counts over the outcome grid; rejects off-grid outcomes."""
    d = spin.dimension
    counts = []
    for values in (arrays.alpha2, arrays.beta2):
        idx = (spin.twice - values.astype(np.int64)) >> 1
        if len(values) and ((spin.twice - values) % 2).any():
            raise ValueError("outcome off the half-integer grid")
        if len(values) and (int(idx.min()) < 0 or int(idx.max()) >= d):
            raise ValueError("outcome outside the support s .. -s")
        counts.append(np.bincount(idx, minlength=d).astype(int))
    return counts[0], counts[1]


@dataclass(frozen=True)
class PairCheck:
    cos_ab: float
    enum_correlation: float
    target_correlation: float
    enum_error: float
    mc_mean: float
    mc_std_error: float
    mc_z_score: float
    support_ok: bool

    def passed(self, tol: float) -> bool:
        return self.enum_error <= tol and self.support_ok and self.mc_z_score <= Z_MAX


@dataclass(frozen=True)
class SpinReport:
    """Per-spin verdict.

    The marginal law does not depend on the direction pair, so the
    uniformity chi-square is computed once per spin on the counts pooled
    over all pairs; testing it per pair would trip the 0.001 floor by
    chance alone at this check count.
    """

    spin: Spin
    comm_cost: int
    pairs: tuple[PairCheck, ...]
    p_alpha: float
    p_beta: float
    ok: bool

    def to_json_obj(self) -> dict:
        return {
            "spin": str(self.spin),
            "comm_cost": self.comm_cost,
            "ok": self.ok,
            "p_alpha": self.p_alpha,
            "p_beta": self.p_beta,
            "pairs": [dataclasses.asdict(p) for p in self.pairs],
        }


@dataclass(frozen=True)
class VerifyReport:
    seed: int
    trials: int
    tol: float
    spins: tuple[SpinReport, ...]
    ok: bool

    def to_json_obj(self) -> dict:
        return {
            "schema": 1,
            "command": "verify",
            "seed": self.seed,
            "trials": self.trials,
            "tolerance": self.tol,
            "ok": self.ok,
            "spins": [s.to_json_obj() for s in self.spins],
        }


def _closed_form(spin: Spin, cos_ab: float) -> float:
    return -spin.twice * (spin.twice + 2) / 12.0 * cos_ab


def verify_spins(max_spin: Spin, pairs: int, trials: int, seed: int = DEFAULT_SEED,
                 tol: float = 1e-10, workers: int = 1, backend: str | None = None,
                 bias_delta: float = 0.0, coeff_delta_twice: int = 0,
                 step_index: int | None = None) -> VerifyReport:
    """Run the verification grid for every s with 1 <= 2s <= 2*max_spin."""
    root = RandomStream(seed, 0)
    spin_reports = []
    for twice in range(1, max_spin.twice + 1):
        spin = Spin(twice)
        chain = build_chain(spin)
        if bias_delta or coeff_delta_twice:
            chain = perturb_chain(chain, bias_delta, coeff_delta_twice, step_index)
        spin_stream = root.split(twice)
        dir_stream = spin_stream.split(0)
        pair_checks = []
        pooled_a = np.zeros(spin.dimension, dtype=np.int64)
        pooled_b = np.zeros(spin.dimension, dtype=np.int64)
        pooled_any = False
        for pair in range(pairs):
            a = sample_direction(dir_stream)
            b = sample_direction(dir_stream)
            cos_ab = cos_between(a, b)
            enum_corr = float(exact_correlation(chain, cos_ab))
            target = _closed_form(spin, cos_ab)
            arrays = simulate_trials(
                chain, a, b, trials, seed,
                base_stream=spin_stream.split(1 + pair).stream,
                workers=workers, backend=backend,
            )
            estimate = OutcomeSums.from_arrays(arrays.alpha2, arrays.beta2).estimate()
            z = z_test(estimate, enum_corr)
            try:
                counts_a, counts_b = empirical_tables(arrays, spin)
                support_ok = True
                pooled_a += counts_a
                pooled_b += counts_b
                pooled_any = True
            except ValueError:
                support_ok = False
            pair_checks.append(PairCheck(
                cos_ab=cos_ab,
                enum_correlation=enum_corr,
                target_correlation=target,
                enum_error=abs(enum_corr - target),
                mc_mean=estimate.mean,
                mc_std_error=estimate.std_error,
                mc_z_score=z,
                support_ok=support_ok,
            ))
        if pooled_any:
            p_alpha = chi_square_uniform(pooled_a).p_value
            p_beta = chi_square_uniform(pooled_b).p_value
        else:
            p_alpha = p_beta = 0.0
        ok = (
            all(p.passed(tol) for p in pair_checks)
            and p_alpha > P_VALUE_FLOOR
            and p_beta > P_VALUE_FLOOR
        )
        spin_reports.append(
            SpinReport(spin, chain.n_steps, tuple(pair_checks), p_alpha, p_beta, ok)
        )
    return VerifyReport(seed, trials, tol, tuple(spin_reports),
                        all(s.ok for s in spin_reports))
