"""Statistical battery for the protocol's randomness primitives.

Checks, at Monte Carlo scale, every statistical fact the protocol engine
relies on: the +/-1 signs have fair marginals, same-step sign pairs
correlate exactly as a.b while cross-step pairs do not, and the biased
f-bits have mean equal to their bias with the induced (1+f)^2 moments.
Each check passes when the estimate sits within `z_max` standard errors of
its target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _philox
from .randomness import DEFAULT_SEED, Direction, dot, unit_direction

_BIASES = (Fraction(1, 3), Fraction(3, 5), Fraction(5, 7))

_DEFAULT_A = unit_direction(0.3, -0.5, 0.81, tol=1.0)
_DEFAULT_B = unit_direction(-0.4, 0.9, 0.17, tol=1.0)


@dataclass(frozen=True)
class BatteryCheck:
    name: str
    n_samples: int
    estimate: float
    target: float
    std_error: float
    z_score: float
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "n_samples": self.n_samples,
            "estimate": self.estimate,
            "target": self.target,
            "std_error": self.std_error,
            "z_score": self.z_score,
            "passed": self.passed,
        }


def _mean_check(name, values, target, z_max) -> BatteryCheck:
    n = len(values)
    mean = float(values.mean())
    se = float(values.std(ddof=1)) / math.sqrt(n)
    z = abs(mean - target) / se if se > 0 else (0.0 if mean == target else math.inf)
    return BatteryCheck(name, n, mean, float(target), se, z, z <= z_max)


def _prob_check(name, indicator, target, z_max) -> BatteryCheck:
    n = len(indicator)
    p_hat = float(np.count_nonzero(indicator)) / n
    se = math.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / n)
    z = abs(p_hat - target) / se
    return BatteryCheck(name, n, p_hat, float(target), se, z, z <= z_max)


def run_battery(trials: int = 1_000_000, seed: int = DEFAULT_SEED,
                a: Direction = _DEFAULT_A, b: Direction = _DEFAULT_B,
                z_max: float = 5.0) -> list[BatteryCheck]:
    """Run every primitive check on `trials` independent sample tuples."""
    streams = _philox.split_index_vec(0, np.arange(trials, dtype=np.uint64))

    def directions(slot):
        x, y, z = _philox.directions_vec(seed, streams, np.uint64(slot))
        return x, y, z

    def signs_against(direction, x, y, z):
        v = direction.x * x + direction.y * y + direction.z * z
        return np.where(v >= 0.0, 1, -1).astype(np.int8)

    # slots 0..3: lambda/mu for two independent steps; 4..6: nu for each bias
    lam1 = directions(0)
    mu1 = directions(1)
    lam2 = directions(2)
    mu2 = directions(3)
    x1 = signs_against(a, *lam1)
    x2 = signs_against(a, *lam2)
    c1 = x1 * signs_against(a, *mu1)
    c2 = x2 * signs_against(a, *mu2)

    def corrected_sign(lam, c, mu):
        cf = c.astype(np.float64)
        return signs_against(b, lam[0] + cf * mu[0], lam[1] + cf * mu[1], lam[2] + cf * mu[2])

    y1 = corrected_sign(lam1, c1, mu1)
    y2 = corrected_sign(lam2, c2, mu2)
    y21 = corrected_sign(lam2, c1, mu2)  # mixed indices, for the delta_lm = 0 case

    fs = []
    for j, bias in enumerate(_BIASES):
        nu_z = _philox.directions_z_vec(seed, streams, np.uint64(4 + j))
        fs.append(np.where(nu_z + float(bias) >= 0.0, 1, -1).astype(np.int8))
    f1, f2, _ = fs

    cos_ab = dot(a, b)
    p1, p2 = float(_BIASES[0]), float(_BIASES[1])
    checks = [
        _prob_check("sign_prob_plus_step1", x1 == 1, 0.5, z_max),
        _prob_check("sign_prob_plus_step2", x2 == 1, 0.5, z_max),
        _mean_check("sign_mean_step1", x1.astype(np.float64), 0.0, z_max),
        _prob_check("corrected_sign_prob_plus_step1", y1 == 1, 0.5, z_max),
        _prob_check("corrected_sign_prob_plus_step2", y2 == 1, 0.5, z_max),
        _mean_check("corrected_sign_mean_step1", y1.astype(np.float64), 0.0, z_max),
        _mean_check("pair_correlation_step1", (x1 * y1).astype(np.float64), cos_ab, z_max),
        _mean_check("pair_correlation_step2", (x2 * y2).astype(np.float64), cos_ab, z_max),
        _mean_check("pair_correlation_cross_12", (x1 * y2).astype(np.float64), 0.0, z_max),
        _mean_check("pair_correlation_cross_21", (x2 * y1).astype(np.float64), 0.0, z_max),
    ]
    for bias, f in zip(_BIASES, fs):
        p = float(bias)
        tag = f"bias_{bias.numerator}_{bias.denominator}"
        checks.append(_prob_check(f"f_plus_prob_{tag}", f == 1, (1.0 + p) / 2.0, z_max))
        checks.append(_prob_check(f"f_minus_prob_{tag}", f == -1, (1.0 - p) / 2.0, z_max))
        checks.append(_mean_check(f"f_mean_{tag}", f.astype(np.float64), p, z_max))
        one_plus_sq = (1.0 + f.astype(np.float64)) ** 2
        checks.append(_mean_check(f"f_second_moment_{tag}", one_plus_sq, 2.0 * (1.0 + p), z_max))

    g1 = (1.0 + f1.astype(np.float64)) ** 2
    g2 = (1.0 + f2.astype(np.float64)) ** 2
    pair11 = (x1 * y1).astype(np.float64)
    pair12 = (x1 * y2).astype(np.float64)
    mix = (x1 * y21).astype(np.float64)
    checks += [
        _mean_check("f_product_moment", g1 * g2, 4.0 * (1.0 + p1) * (1.0 + p2), z_max),
        _mean_check("f_weighted_pair_same", g1 * pair11, 2.0 * (1.0 + p1) * cos_ab, z_max),
        _mean_check("f_weighted_pair_mixed", g1 * mix, 0.0, z_max),
        _mean_check("ff_weighted_pair_same", g1 * g2 * pair11,
                    4.0 * (1.0 + p1) * (1.0 + p2) * cos_ab, z_max),
        _mean_check("ff_weighted_pair_cross", g1 * g2 * pair12, 0.0, z_max),
    ]
    return checks
