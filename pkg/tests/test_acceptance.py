"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""
import itertools
import math
import random
import time

import pytest

from conftest import ACCEPTANCE_LINES
from wotsplus import cli
from wotsplus.hash_family import FamilySpec
from wotsplus.harness.adversaries import NastyForger, Replay, make_adversary
from wotsplus.harness.reduction import overhead_bound, run_M_A, sample_ow_spr_challenge
from wotsplus.harness.trials import TrialConfig, run_trials
from wotsplus.params import derive_params, encode
from wotsplus.security_bounds import level_gap, security_level, security_level_numeric
from wotsplus.wots import keygen, sign, verify

TRIALS = 10_000


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def toy_run():
    cfg = TrialConfig.from_preset("toy", "brute-force", TRIALS, seed=2024)
    start = time.perf_counter()
    stats = run_trials(cfg)
    return cfg, stats, time.perf_counter() - start


def test_1_round_trips():
    details, ok = [], True
    for n in (128, 256):
        p = derive_params(n, 256, 16)
        rng = random.Random(n)
        start = time.perf_counter()
        accepted = 0
        for _ in range(1000):
            sk, pk = keygen(p, rng)
            msg = rng.getrandbits(256)
            accepted += verify(pk, sign(sk, msg), msg)
        elapsed = time.perf_counter() - start
        ok &= accepted == 1000 and elapsed < 60
        details.append(f"n={n}: {accepted}/1000 in {elapsed:.1f}s")
    report(1, ok, "; ".join(details))


def test_2_checksum_exhaustive():
    p = derive_params(8, 4, 4)
    bad = [(a, b) for a, b in itertools.permutations(range(16), 2)
           if not any(y < x for x, y in zip(encode(a, p), encode(b, p)))]
    report(2, not bad, f"240 ordered pairs, {len(bad)} without a lowered digit")


def test_3_parameters():
    p = derive_params(256, 256, 16)
    report(3, (p.l1, p.l2, p.l) == (64, 3, 67), f"(l1, l2, l) = {(p.l1, p.l2, p.l)}")


def test_4_security_table(capsys):
    code = cli.main(["seclevel", "--n", "256", "--m", "256", "--w", "16", "--compare"])
    table = capsys.readouterr().out
    gap = level_gap(67, 16)
    expected = math.log2(67 * 33 / 1073)
    worst = max(abs(security_level(256, 16, 256, a, k) - security_level_numeric(256, 16, 256, a, k))
                for a in ("classical", "quantum") for k in ("new", "prior"))
    measured_gap = security_level(256, 16, 256, bound_kind="prior") - security_level(256, 16, 256)
    ok = (code == 0 and abs(gap - 1.043) <= 1e-3 and abs(measured_gap - expected) <= 1e-9
          and worst <= 1e-6 and "b > 240.89" in table and "b > 112.89" in table)
    report(4, ok, f"gap {measured_gap:.6f} bits (target 1.043 +/- 1e-3), "
                  f"closed form vs root finding max diff {worst:.1e}")


def test_5_extraction_soundness(toy_run):
    cfg, stats, elapsed = toy_run
    solved = stats.preimages + stats.second_preimages
    ok = stats.inconsistencies == 0 and solved > 0 and elapsed < 300 and stats.trials >= TRIALS
    report(5, ok, f"{stats.trials} trials: {stats.preimages} preimages, {stats.second_preimages} "
                  f"second preimages, {stats.inconsistencies} inconsistencies, {elapsed:.0f}s total")


def test_6_distinguisher_bound(toy_run):
    cfg, stats, _ = toy_run
    s = stats.summary(cfg.params)
    lo = s["epsilon_hat"]["wilson95"][0]
    report(6, bool(s["counting_bound_pass"]), f"epsilon^ = {s['epsilon_hat']['estimate']:.4f} "
                                    f"(Wilson lower {lo:.4f}) > epsilon/(lw) = {s['counting_bound_rhs']:.4f}")


def test_7_budget(toy_run):
    _, stats, _ = toy_run
    # every other adversary, checked trial by trial
    p = derive_params(8, 8, 4)
    spec = FamilySpec.for_n(8)
    rng = random.Random(7)
    extra = violations = 0
    for name in ("give-up", "replay", "digit-walker", "collision-seeker", "nasty"):
        for _ in range(500):
            key, y, x = sample_ow_spr_challenge(spec, rng)
            out = run_M_A(make_adversary(name), p, key, y, x, rng)
            violations += out.evaluations_used > out.adversary_budget + overhead_bound(p)
            extra += 1
    total = stats.budget_violations + violations
    report(7, total == 0, f"{stats.trials + extra} reduction runs (plus {2 * stats.trials} M' runs), "
                          f"{total} over budget + 3lw + w - 2 = budget + {overhead_bound(p)}; "
                          f"max reduction overhead seen {stats.max_overhead}")


def _b_alpha_eq_beta(adversary_cls, params, trials, seed):
    spec = FamilySpec.for_n(params.n)
    rng = random.Random(seed)
    hits = 0
    for _ in range(trials):
        key, y, x = sample_ow_spr_challenge(spec, rng)
        out = run_M_A(adversary_cls(), params, key, y, x, rng)
        hits += out.b_alpha == out.beta
    return hits / trials


def test_8_nasty_adversary():
    # On toy (8,8,4) the low-digit message still has nonzero checksum digits, so the ratio
    # stays near 1/4; the wide preset (m=256, w=2) shows the collapse the critique describes.
    rows, ok = [], True
    for preset, nmw, trials in (("toy-wide", (8, 256, 2), 20_000), ("toy", (8, 8, 4), 5_000)):
        p = derive_params(*nmw)
        base = _b_alpha_eq_beta(Replay, p, trials, 1)
        nasty = _b_alpha_eq_beta(NastyForger, p, trials, 2)
        nonzero = sum(1 for d in encode(0, p) if d)
        closed = nonzero / (p.l * (p.w - 1))
        ratio = nasty / base
        if preset == "toy-wide":
            ok = ratio <= 0.01
        rows.append(f"{preset}: nasty {nasty:.4f} (closed form {closed:.4f}) vs uniform {base:.4f}, "
                    f"ratio {ratio:.4f}")
    report(8, ok, "; ".join(rows))
