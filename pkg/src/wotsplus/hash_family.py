"""Keyed function family f_k: {0,1}^n -> {0,1}^n and the masked chaining function.

f_k(x) is the top n bits of SHA-256(DOMAIN_TAG || k || x), where x is encoded
big-endian in ceil(n/8) bytes.  The toy variant is the same construction at
small n, which keeps brute-force search over the whole domain feasible.

n-bit strings are carried as Python ints in [0, 2**n).
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidLength, InvalidParameter, MaskRangeError

# ASCII "WOTSPLUS-F" followed by a 0x01 format byte.
DOMAIN_TAG = b"WOTSPLUS-F\x01"

PRODUCTION_N = (128, 192, 256)
TOY_MAX_N = 20
TOY_KEY_BYTES = 16


@dataclass(frozen=True)
class FamilySpec:
    variant: str
    n: int

    def __post_init__(self):
        if self.variant == "production":
            if self.n not in PRODUCTION_N:
                raise InvalidParameter(f"production family needs n in {PRODUCTION_N}, got {self.n}")
        elif self.variant == "toy":
            if not 1 <= self.n <= TOY_MAX_N:
                raise InvalidParameter(f"toy family needs n <= {TOY_MAX_N}, got {self.n}")
        else:
            raise InvalidParameter(f"unknown family variant {self.variant!r}")

    @classmethod
    def for_n(cls, n: int) -> "FamilySpec":
        return cls("production" if n in PRODUCTION_N else "toy", n)

    @property
    def key_bytes(self) -> int:
        return self.n // 8 if self.variant == "production" else TOY_KEY_BYTES

    @property
    def nbytes(self) -> int:
        return (self.n + 7) // 8


@dataclass(frozen=True)
class FamilyKey:
    spec: FamilySpec
    k: bytes

    @cached_property
    def _prefix(self):
        return hashlib.sha256(DOMAIN_TAG + self.k)

    def __call__(self, x: int) -> int:
        h = self._prefix.copy()
        h.update(x.to_bytes(self.spec.nbytes, "big"))
        return int.from_bytes(h.digest(), "big") >> (256 - self.spec.n)


class EvalCounter:
    """Tally of f_k evaluations, owned by whoever is doing the accounting."""

    __slots__ = ("count",)

    def __init__(self, count: int = 0):
        self.count = count

    def __repr__(self):
        return f"EvalCounter({self.count})"


def sample_key(spec: FamilySpec, rng) -> FamilyKey:
    return FamilyKey(spec, rng.randbytes(spec.key_bytes))


def sample_masks(n: int, w: int, rng) -> tuple[int, ...]:
    """Draw the bitmask vector r_1..r_{w-1} (stored 0-based)."""
    return tuple(rng.getrandbits(n) for _ in range(w - 1))


def sample_string(n: int, rng) -> int:
    return rng.getrandbits(n)


def check_string(x, n: int) -> int:
    if not isinstance(x, int) or x < 0 or x >> n:
        raise InvalidLength(f"expected an {n}-bit string")
    return x


def evaluate(key: FamilyKey, x: int, counter: EvalCounter | None = None) -> int:
    check_string(x, key.spec.n)
    if counter is not None:
        counter.count += 1
    return key(x)


def chain(key: FamilyKey, x: int, masks, start_level: int, steps: int,
          counter: EvalCounter | None = None) -> int:
    """Walk `steps` levels up a chain from `start_level`.

    The step from level j to level j+1 computes f_k(x XOR r_{j+1}); with
    0-based storage that mask is masks[j].
    """
    if steps < 0 or start_level < 0:
        raise MaskRangeError(f"bad chain range: start={start_level}, steps={steps}")
    if start_level + steps > len(masks):
        raise MaskRangeError(
            f"masks r_{start_level + 1}..r_{start_level + steps} needed, only {len(masks)} available")
    for j in range(start_level, start_level + steps):
        x = key(x ^ masks[j])
    if counter is not None:
        counter.count += steps
    return x


def chain_nodes(key: FamilyKey, x: int, masks, start_level: int, steps: int,
                counter: EvalCounter | None = None) -> list[int]:
    """Like chain() but return every node, levels start_level..start_level+steps."""
    nodes = [x]
    for j in range(steps):
        nodes.append(chain(key, nodes[-1], masks, start_level + j, 1, counter))
    return nodes
