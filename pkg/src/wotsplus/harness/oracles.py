"""Exhaustive-search oracles over the whole toy domain."""
from __future__ import annotations

from collections import Counter

from ..errors import DomainTooLarge
from ..hash_family import TOY_MAX_N, EvalCounter, FamilyKey


def _domain(key: FamilyKey, n_toy: int | None) -> int:
    n = key.spec.n if n_toy is None else n_toy
    if n > TOY_MAX_N or n != key.spec.n:
        raise DomainTooLarge(f"exhaustive search needs n <= {TOY_MAX_N} matching the key, got {n}")
    return n


def image_table(key: FamilyKey, counter: EvalCounter | None = None) -> list[int]:
    """f_k(x) for every x in the domain, indexed by x."""
    n = _domain(key, None)
    if counter is not None:
        counter.count += 1 << n
    return [key(x) for x in range(1 << n)]


def preimage_map(table) -> dict[int, list[int]]:
    inv: dict[int, list[int]] = {}
    for x, y in enumerate(table):
        inv.setdefault(y, []).append(x)
    return inv


def brute_force_ow(key: FamilyKey, y: int, n_toy: int | None = None) -> int | None:
    n = _domain(key, n_toy)
    for x in range(1 << n):
        if key(x) == y:
            return x
    return None


def brute_force_spr(key: FamilyKey, x: int, n_toy: int | None = None) -> int | None:
    n = _domain(key, n_toy)
    target = key(x)
    for cand in range(1 << n):
        if cand != x and key(cand) == target:
            return cand
    return None


def ud_advantage(key: FamilyKey) -> float:
    """Best possible undetectability advantage for one key.

    This is the statistical distance between the uniform distribution and
    f_k applied to a uniform input, which no distinguisher can beat.
    """
    n = _domain(key, None)
    size = 1 << n
    hits = Counter(key(x) for x in range(size))
    return sum(c - 1 for c in hits.values() if c > 1) / size
