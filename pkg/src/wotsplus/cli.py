"""Command-line interface.

Exit codes: 0 success / signature accepted, 1 signature rejected,
2 malformed input file, 3 usage error, 4 key already used, 5 I/O error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import tempfile

from . import security_bounds as sb
from .errors import DomainTooLarge, InvalidParameter, KeyAlreadyUsed, MalformedEncoding
from .harness.adversaries import ADVERSARIES
from .harness.trials import PRESETS, TrialConfig, dumps_records, run_trials, stats_records
from .params import Params, derive_params
from .wots import (deserialize_public_key, deserialize_secret_key, deserialize_signature, keygen,
                   serialize_public_key, serialize_secret_key, serialize_signature, sign, verify)

EXIT_OK, EXIT_REJECT, EXIT_MALFORMED, EXIT_USAGE, EXIT_KEY_USED, EXIT_IO = range(6)
SEED_ENV = "WOTSPLUS_SEED"
MESSAGE_TAG = b"WOTSPLUS-MSG\x01"


def digest_message(data: bytes, params: Params) -> int:
    """Compress arbitrary input to an m-bit message: first m bits of SHAKE-256(tag || data)."""
    raw = hashlib.shake_256(MESSAGE_TAG + data).digest(params.mbytes)
    return int.from_bytes(raw, "big") >> (8 * params.mbytes - params.m)


def fingerprint(pk_bytes: bytes) -> str:
    return hashlib.sha256(pk_bytes).hexdigest()[:32]


def marker_path(key_path: str) -> str:
    return key_path + ".used"


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _create_marker(path: str, note: dict) -> None:
    """Create the usage marker; fails if it already exists."""
    fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL, 0o600)
    with os.fdopen(fd, "w") as fh:
        json.dump(note, fh)
        fh.flush()
        os.fsync(fh.fileno())


def _before_release() -> None:
    """Runs after the marker is durable and before the signature is written."""


def _rng(seed):
    if seed is None:
        seed = os.environ.get(SEED_ENV)
    if seed is None:
        return random.SystemRandom()
    print("warning: deterministic seed in use; keys are reproducible and only fit for testing",
          file=sys.stderr)
    return random.Random(str(seed))


def cmd_keygen(args) -> int:
    params = derive_params(args.n, args.m, args.w)
    sk, pk = keygen(params, _rng(args.seed))
    pk_bytes = serialize_public_key(pk)
    _atomic_write(args.out + ".sk", serialize_secret_key(sk))
    _atomic_write(args.out + ".pk", pk_bytes)
    print(f"wrote {args.out}.sk and {args.out}.pk (n={params.n} m={params.m} w={params.w} l={params.l})")
    print(f"fingerprint {fingerprint(pk_bytes)}")
    return EXIT_OK


def cmd_sign(args) -> int:
    with open(args.key, "rb") as fh:
        sk = deserialize_secret_key(fh.read())
    marker = marker_path(args.key)
    if sk.used or os.path.exists(marker):
        raise KeyAlreadyUsed(f"{args.key} has already signed a message")
    with open(args.input, "rb") as fh:
        data = fh.read()
    message = digest_message(data, sk.params)
    try:
        _create_marker(marker, {"input_sha256": hashlib.sha256(data).hexdigest()})
    except FileExistsError:
        raise KeyAlreadyUsed(f"{args.key} has already signed a message") from None
    sig = sign(sk, message)
    _atomic_write(args.key, serialize_secret_key(sk))
    _before_release()
    _atomic_write(args.out, serialize_signature(sig))
    print(f"note: input digested to {sk.params.m} bits with SHAKE-256 before signing; "
          "this step lies outside the one-time signature's security model", file=sys.stderr)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    with open(args.pub, "rb") as fh:
        pk = deserialize_public_key(fh.read())
    with open(args.sig, "rb") as fh:
        sig = deserialize_signature(fh.read())
    with open(args.input, "rb") as fh:
        message = digest_message(fh.read(), pk.params)
    ok = verify(pk, sig, message)
    print("accept" if ok else "reject")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_seclevel(args) -> int:
    derive_params(args.n, args.m, args.w)
    attacks = sb.ATTACKS if args.attack is None else (args.attack,)
    kinds = sb.BOUNDS if args.compare else ("new",)
    reports = sb.comparison_table(args.n, args.w, args.m, attacks, kinds)
    gap = sb.level_gap(reports[0].l, args.w)
    if args.format == "records":
        for r in reports:
            print(json.dumps({"record": "level", "bound": r.bound_kind, "attack": r.attack, "n": r.n,
                              "m": r.m, "w": r.w, "l": r.l, "level": r.level,
                              "level_floor": r.level_floor}, sort_keys=True))
        if args.compare:
            print(json.dumps({"record": "gap", "bits": gap}, sort_keys=True))
    else:
        print(f"n={args.n} m={args.m} w={args.w} l={reports[0].l}")
        print(sb.render_table(reports, integer=args.integer))
        if args.compare:
            print(f"gap (prior - new) = {gap:.4f} bits")
    return EXIT_OK


def cmd_harness(args) -> int:
    if args.n is not None:
        config = TrialConfig(args.n, args.m, args.w, args.adversary, args.trials, args.seed, args.workers)
    else:
        config = TrialConfig.from_preset(args.params, args.adversary, args.trials, args.seed, args.workers)
    stats = run_trials(config)
    records = stats_records(config, stats)
    if args.format == "records":
        sys.stdout.write(dumps_records(records))
        return EXIT_OK
    params = config.params
    summary = stats.summary(params)
    print(f"preset n={params.n} m={params.m} w={params.w} l={params.l}  adversary={config.adversary}  "
          f"trials={stats.trials}  seed={config.seed}")

    def show(label, key):
        r = summary[key]
        lo, hi = r["wilson95"]
        print(f"  {label:<28} {r['estimate']:.4f}  [{lo:.4f}, {hi:.4f}]")

    show("epsilon (forgery rate)", "epsilon")
    show("epsilon~ (fortunate, M^A)", "epsilon_tilde")
    show("epsilon^ (M' on fair keys)", "epsilon_hat")
    show("Pr[b_alpha = beta]", "p_b_alpha_eq_beta")
    print(f"  preimages={stats.preimages} second_preimages={stats.second_preimages} "
          f"fails={stats.fails}")
    print(f"  extraction inconsistencies={stats.inconsistencies}  budget violations={stats.budget_violations}"
          f"  (reduction overhead max {stats.max_overhead} <= {summary['overhead_bound']})")
    verdict = "PASS" if summary["counting_bound_pass"] else "FAIL"
    print(f"  epsilon^ lower CI {summary['epsilon_hat']['wilson95'][0]:.4f} > epsilon/(lw) "
          f"{summary['counting_bound_rhs']:.4f}: {verdict}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wotsplus", description="W-OTS+ one-time signatures")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key pair")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--m", type=int, default=256)
    p.add_argument("--w", type=int, default=16)
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.sk and PREFIX.pk")
    p.add_argument("--seed", help=f"deterministic seed for testing (also ${SEED_ENV})")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="sign a file once")
    p.add_argument("--key", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", help="verify a signature")
    p.add_argument("--pub", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--sig", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("seclevel", help="security level from the insecurity bounds")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--m", type=int, default=256)
    p.add_argument("--w", type=int, default=16)
    p.add_argument("--attack", choices=sb.ATTACKS)
    p.add_argument("--compare", action="store_true", help="show the prior bound as well")
    p.add_argument("--integer", action="store_true", help="floor levels to whole bits")
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.set_defaults(func=cmd_seclevel)

    p = sub.add_parser("harness", help="run the reduction simulator at toy sizes")
    p.add_argument("--params", choices=sorted(PRESETS), default="toy")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--w", type=int)
    p.add_argument("--adversary", choices=sorted(ADVERSARIES), default="brute-force")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.set_defaults(func=cmd_harness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "n", None) is not None and args.command == "harness" and (args.m is None or args.w is None):
        parser.print_usage(sys.stderr)
        print("error: --n, --m and --w go together", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except MalformedEncoding as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except KeyAlreadyUsed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_KEY_USED
    except (InvalidParameter, DomainTooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
