"""EU-CMA insecurity bounds for W-OTS+ and the security levels they imply.

Two bounds are compared:

* new:   lw * (w*UD + OW + w*SPR)
* prior: wl * max(OW, w*SPR) + w*UD

Component insecurities follow brute-force cost models: t / 2**n for a
classical attacker and t / 2**(n/2) for a Grover attacker.  The security
level b is the smallest value with bound(t) >= 1/2 at t = 2**(b-1); the
runtime overheads (3lw + ...) are dropped, i.e. t is assumed much larger
than 4lw.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import InvalidParameter, OutOfRange
from .params import Params, derive_params

ATTACKS = ("classical", "quantum")
BOUNDS = ("new", "prior")


@dataclass(frozen=True)
class InSecModel:
    attack: str

    def __post_init__(self):
        if self.attack not in ATTACKS:
            raise InvalidParameter(f"attack must be one of {ATTACKS}")

    def effective_bits(self, n: int) -> float:
        return n if self.attack == "classical" else n / 2

    def __call__(self, t: float, n: int) -> float:
        """InSec^OW = InSec^SPR = InSec^UD for a time-t attacker."""
        return min(1.0, t / 2.0 ** self.effective_bits(n))


def _check(*values):
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(f"insecurity {v!r} outside [0, 1]")


def _new_raw(l: int, w: int, ow: float, spr: float, ud: float) -> float:
    return l * w * (w * ud + ow + w * spr)


def _prior_raw(l: int, w: int, ow: float, spr: float, ud: float) -> float:
    return w * l * max(ow, w * spr) + w * ud


def theorem1_bound(params: Params, insec_ow: float, insec_spr: float, insec_ud: float) -> float:
    _check(insec_ow, insec_spr, insec_ud)
    return min(1.0, _new_raw(params.l, params.w, insec_ow, insec_spr, insec_ud))


def prior_bound(params: Params, insec_ow: float, insec_spr: float, insec_ud: float) -> float:
    _check(insec_ow, insec_spr, insec_ud)
    return min(1.0, _prior_raw(params.l, params.w, insec_ow, insec_spr, insec_ud))


def level_closed_form(n: int, l: int, w: int, attack: str = "classical", bound_kind: str = "new") -> float:
    bits = InSecModel(attack).effective_bits(n)
    if bound_kind == "new":
        return bits - math.log2(l * w) - math.log2(2 * w + 1)
    if bound_kind == "prior":
        return bits - math.log2(w) - math.log2(l * w + 1)
    raise InvalidParameter(f"bound_kind must be one of {BOUNDS}")


def security_level(n: int, w: int, m: int, attack: str = "classical", bound_kind: str = "new") -> float:
    """Lower bound on the security level b in bits (the right-hand side of b > ...)."""
    params = derive_params(n, m, w)
    return level_closed_form(n, params.l, params.w, attack, bound_kind)


def security_level_numeric(n: int, w: int, m: int, attack: str = "classical", bound_kind: str = "new") -> float:
    """Same level found by root-finding bound(2**(b-1)) = 1/2 in log2 space."""
    if bound_kind not in BOUNDS:
        raise InvalidParameter(f"bound_kind must be one of {BOUNDS}")
    params = derive_params(n, m, w)
    bits = InSecModel(attack).effective_bits(n)
    raw = _new_raw if bound_kind == "new" else _prior_raw

    def excess(log_t: float) -> float:
        # unclamped bound with every component at t / 2**bits, compared in log2
        p = 2.0 ** (log_t - bits)
        return math.log2(raw(params.l, params.w, p, p, p)) + 1.0

    log_t = brentq(excess, -64.0, bits + 64.0, xtol=1e-13, rtol=1e-15, maxiter=500)
    return log_t + 1.0


def level_gap(l: int, w: int) -> float:
    """prior level minus new level: log2(l(2w+1) / (lw+1))."""
    return math.log2(l * (2 * w + 1) / (l * w + 1))


@dataclass(frozen=True)
class BoundReport:
    bound_kind: str
    attack: str
    n: int
    m: int
    w: int
    l: int
    level: float

    @property
    def level_floor(self) -> int:
        return math.floor(self.level)


def comparison_table(n: int, w: int, m: int, attacks=ATTACKS, kinds=BOUNDS) -> list[BoundReport]:
    params = derive_params(n, m, w)
    return [BoundReport(kind, attack, n, m, w, params.l, security_level(n, w, m, attack, kind))
            for attack in attacks for kind in kinds]


def render_table(reports: list[BoundReport], integer: bool = False) -> str:
    """Text table laid out like the classical/quantum x prior/new comparison."""
    by = {(r.attack, r.bound_kind): r for r in reports}
    attacks = [a for a in ATTACKS if any(k[0] == a for k in by)]
    kinds = [k for k in BOUNDS[::-1] if any(key[1] == k for key in by)]
    fmt = (lambda r: f"b > {r.level_floor}") if integer else (lambda r: f"b > {r.level:.2f}")
    head = ["attack"] + [f"{k} bound" for k in kinds]
    rows = [[a] + [fmt(by[(a, k)]) if (a, k) in by else "-" for k in kinds] for a in attacks]
    widths = [max(len(str(row[i])) for row in [head] + rows) for i in range(len(head))]
    lines = ["  ".join(str(c).ljust(wd) for c, wd in zip(row, widths)).rstrip() for row in [head] + rows]
    lines.insert(1, "  ".join("-" * wd for wd in widths))
    return "\n".join(lines)
