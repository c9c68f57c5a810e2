"""Repeated reduction runs with per-trial reproducible randomness.

Trial i draws everything from random.Random(f"{seed}/{i}/<experiment>"), so
results do not depend on scheduling and stats from worker processes merge by
plain addition.  Each trial runs four experiments against a fresh adversary:
the plain forgery experiment (epsilon), the reduction M^A, and the
distinguisher M' on a fair-key sample (epsilon-hat) and on a uniform sample
(epsilon-tilde).
"""
from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from statistics import NormalDist

from ..errors import DomainTooLarge, InternalInconsistency
from ..hash_family import TOY_MAX_N, EvalCounter, FamilySpec, sample_key, sample_string
from ..params import Params, derive_params
from .adversaries import make_adversary
from .reduction import (FAIL_REASONS, PREIMAGE, SECOND_PREIMAGE, overhead_bound, run_eu_cma,
                        run_B, run_M_A, run_M_prime, sample_d_kg, sample_d_m, sample_ow_spr_challenge)

PRESETS = {
    "toy": (8, 8, 4),
    "toy-m4": (8, 4, 4),
    "toy-w8": (8, 9, 8),
    "toy-n12": (12, 8, 4),
    "toy-wide": (8, 256, 2),
}

Z95 = NormalDist().inv_cdf(0.975)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 0.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class TrialConfig:
    n: int
    m: int
    w: int
    adversary: str
    trials: int
    seed: int = 0
    workers: int = 1

    @classmethod
    def from_preset(cls, preset: str, adversary: str, trials: int, seed: int = 0, workers: int = 1):
        try:
            n, m, w = PRESETS[preset]
        except KeyError:
            raise ValueError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}") from None
        return cls(n, m, w, adversary, trials, seed, workers)

    @property
    def params(self) -> Params:
        return derive_params(self.n, self.m, self.w)


@dataclass
class TrialStats:
    trials: int = 0
    valid_forgeries: int = 0         # plain experiment
    queries_answered: int = 0        # M^A: b_alpha >= beta
    b_alpha_eq_beta: int = 0
    reduction_valid_forgeries: int = 0
    fortunate_forgeries: int = 0     # M^A reached extraction with b'_alpha < beta
    fortunate_strict: int = 0          # b'_alpha < b_alpha variant of the event
    preimages: int = 0
    second_preimages: int = 0
    fail_bad_query: int = 0
    fail_no_forgery: int = 0
    fail_wrong_position: int = 0
    fail_collision_elsewhere: int = 0
    collision_cases: int = 0         # fortunate, chain misses y_c at level beta
    collision_at_gamma: int = 0
    collision_expected_hits: float = 0.0   # sum of 1/(w-1-beta) over collision cases
    kg_hits: int = 0                 # M' on a fair-key sample returned 1
    uniform_hits: int = 0            # M' on a uniform sample returned 1
    inconsistencies: int = 0
    budget_violations: int = 0
    max_overhead: int = 0            # largest reduction-side evaluation count seen
    flag_mismatches: int = 0

    def __add__(self, other: "TrialStats") -> "TrialStats":
        merged = TrialStats()
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            setattr(merged, f.name, max(a, b) if f.name == "max_overhead" else a + b)
        return merged

    @property
    def fails(self) -> dict[str, int]:
        return {r: getattr(self, "fail_" + r.replace("-", "_")) for r in FAIL_REASONS}

    def rate(self, count: int) -> dict:
        lo, hi = wilson_interval(count, self.trials)
        return {"estimate": count / self.trials if self.trials else 0.0, "wilson95": [lo, hi]}

    @property
    def epsilon(self) -> float:
        return self.valid_forgeries / self.trials if self.trials else 0.0

    def summary(self, params: Params) -> dict:
        """Derived rates and the epsilon-hat > epsilon/(lw) check."""
        lw = params.l * params.w
        eps_hat = self.rate(self.kg_hits)
        out = {
            "epsilon": self.rate(self.valid_forgeries),
            "epsilon_tilde": self.rate(self.fortunate_forgeries),
            "epsilon_tilde_uniform_sample": self.rate(self.uniform_hits),
            "epsilon_hat": eps_hat,
            "p_b_alpha_eq_beta": self.rate(self.b_alpha_eq_beta),
            "success": self.rate(self.preimages + self.second_preimages),
            "counting_bound_rhs": self.epsilon / lw,
            "counting_bound_pass": self.trials > 0 and eps_hat["wilson95"][0] > self.epsilon / lw,
            "overhead_bound": overhead_bound(params),
        }
        if self.collision_cases:
            out["collision_at_gamma_rate"] = self.collision_at_gamma / self.collision_cases
            out["collision_at_gamma_expected"] = self.collision_expected_hits / self.collision_cases
        return out


def trial_rng(seed: int, index: int, label: str) -> random.Random:
    return random.Random(f"{seed}/{index}/{label}")


def run_one_trial(config: TrialConfig, index: int) -> TrialStats:
    params = config.params
    spec = FamilySpec.for_n(params.n)
    st = TrialStats(trials=1)

    res = run_eu_cma(make_adversary(config.adversary), params, trial_rng(config.seed, index, "eu-cma"), spec)
    st.valid_forgeries += res.valid

    rng = trial_rng(config.seed, index, "M_A")
    key, y_c, x_c = sample_ow_spr_challenge(spec, rng)
    try:
        out = run_M_A(make_adversary(config.adversary), params, key, y_c, x_c, rng)
    except InternalInconsistency:
        st.inconsistencies += 1
        return st
    st.b_alpha_eq_beta += out.b_alpha == out.beta
    st.queries_answered += out.b_alpha is not None and out.b_alpha >= out.beta
    st.reduction_valid_forgeries += out.forgery_valid
    st.fortunate_forgeries += out.fortunate
    st.fortunate_strict += out.fortunate_strict
    st.preimages += out.kind == PREIMAGE
    st.second_preimages += out.kind == SECOND_PREIMAGE
    if out.reason:
        name = "fail_" + out.reason.replace("-", "_")
        setattr(st, name, getattr(st, name) + 1)
    if out.fortunate and out.kind != PREIMAGE:
        st.collision_cases += 1
        st.collision_at_gamma += out.collision_level == out.gamma
        st.collision_expected_hits += 1 / (params.w - 1 - out.beta)
    # success branches only follow a fortunate forgery
    st.flag_mismatches += out.success and not out.fortunate
    within = out.within_budget and out.adversary_evaluations <= out.adversary_budget
    st.budget_violations += not within
    st.max_overhead = out.extra["reduction_evaluations"]

    for label, sampler in (("M_prime_kg", sample_d_kg), ("M_prime_uniform", sample_d_m)):
        rng = trial_rng(config.seed, index, label)
        sample = sampler(params, spec, rng)
        ours, theirs = EvalCounter(), EvalCounter()
        adv = make_adversary(config.adversary)
        bit = run_M_prime(adv, params, sample, rng, ours, theirs)
        if label == "M_prime_kg":
            st.kg_hits += bit
        else:
            st.uniform_hits += bit
        st.budget_violations += (ours.count > overhead_bound(params)
                                 or theirs.count > adv.budget(params))
        st.max_overhead = max(st.max_overhead, ours.count)
    return st


def _run_range(config: TrialConfig, start: int, stop: int) -> TrialStats:
    total = TrialStats()
    for i in range(start, stop):
        total = total + run_one_trial(config, i)
    return total


def run_trials(config: TrialConfig) -> TrialStats:
    if config.n > TOY_MAX_N:
        raise DomainTooLarge(f"the harness runs only at toy sizes (n <= {TOY_MAX_N}), got n={config.n}")
    make_adversary(config.adversary)
    if config.trials <= 0:
        return TrialStats()
    if config.workers <= 1:
        return _run_range(config, 0, config.trials)
    chunks = max(config.workers * 4, 1)
    bounds = [config.trials * k // chunks for k in range(chunks + 1)]
    total = TrialStats()
    with ProcessPoolExecutor(config.workers) as pool:
        futures = [pool.submit(_run_range, config, a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
        for fut in futures:
            total = total + fut.result()
    return total


def stats_records(config: TrialConfig, stats: TrialStats) -> list[dict]:
    """Line-oriented report: one config record, one stats record, one record per check."""
    params = config.params
    summary = stats.summary(params)
    counts = asdict(stats)
    return [
        {"record": "config", **asdict(config), "l": params.l},
        {"record": "stats", **counts, **{k: v for k, v in summary.items()
                                         if k not in ("counting_bound_pass", "counting_bound_rhs")}},
        {"record": "check", "name": "counting_bound", "lhs": summary["epsilon_hat"]["wilson95"][0],
         "rhs": summary["counting_bound_rhs"], "pass": summary["counting_bound_pass"]},
        {"record": "check", "name": "budget", "violations": stats.budget_violations,
         "pass": stats.budget_violations == 0},
        {"record": "check", "name": "extraction", "inconsistencies": stats.inconsistencies,
         "pass": stats.inconsistencies == 0},
    ]


def dumps_records(records) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def loads_records(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@dataclass
class HybridCell:
    beta_star: int
    i_star: int
    trials: int
    hits_image: int      # u = f_k(x): hybrid i*
    hits_uniform: int    # u uniform: hybrid i*+1

    @property
    def gap(self) -> float:
        return abs(self.hits_image - self.hits_uniform) / self.trials if self.trials else 0.0


def hybrid_sweep(params: Params, adversary: str, trials_per_cell: int, seed: int = 0) -> list[HybridCell]:
    """Run B at every (beta*, i*) with 0 <= i* < beta* <= w-1, on both kinds of UD sample."""
    spec = FamilySpec.for_n(params.n)
    cells = []
    for beta_star in range(1, params.w):
        for i_star in range(beta_star):
            cell = HybridCell(beta_star, i_star, trials_per_cell, 0, 0)
            for t in range(trials_per_cell):
                for label in ("image", "uniform"):
                    rng = trial_rng(seed, t, f"B/{beta_star}/{i_star}/{label}")
                    key = sample_key(spec, rng)
                    x = sample_string(params.n, rng)
                    u = key(x) if label == "image" else x
                    bit = run_B(make_adversary(adversary), params, (u, key), beta_star, i_star, rng)
                    if label == "image":
                        cell.hits_image += bit
                    else:
                        cell.hits_uniform += bit
            cells.append(cell)
    return cells
