"""Built-in forgers for the reduction harness.

The brute-force family inverts chain steps using a full table of f_k, which
costs 2**n evaluations and is only sensible at toy n.
"""
from __future__ import annotations

from functools import lru_cache

from ..hash_family import chain
from ..params import Params, encode
from ..wots import Signature
from .oracles import image_table, preimage_map
from .reduction import Adversary

ENUMERATE_MAX_M = 12


class GiveUp(Adversary):
    name = "give-up"


class Replay(Adversary):
    """Asks for one signature and hands the same pair back."""

    name = "replay"

    def sign_query(self):
        self.message = self.rng.getrandbits(self.pk.params.m)
        return self.message

    def produce_forgery(self, sig):
        if sig is None:
            return None
        return self.message, sig


def candidate_messages(message: int, params: Params, rng) -> list[int]:
    """Alternative messages worth pricing: all of them for short m, else one-digit edits."""
    if params.m <= ENUMERATE_MAX_M:
        out = [x for x in range(1 << params.m) if x != message]
    else:
        lw = params.log_w
        out = []
        for i in range(params.l1):
            shift = lw * (params.l1 - 1 - i)
            digit = (message >> shift) & (params.w - 1)
            for d in range(params.w):
                cand = message ^ ((digit ^ d) << shift)
                if d != digit and cand >> params.m == 0:
                    out.append(cand)
    rng.shuffle(out)
    return out


def inversion_cost(b, b_prime) -> int:
    return sum(x - y for x, y in zip(b, b_prime) if y < x)


class DigitWalker(Adversary):
    """Forges only by walking chains forward, which the checksum always prevents."""

    name = "digit-walker"

    def budget(self, params):
        return params.l * (params.w - 1)

    def sign_query(self):
        self.message = self.rng.getrandbits(self.pk.params.m)
        return self.message

    def produce_forgery(self, sig):
        if sig is None:
            return None
        params = self.pk.params
        b = encode(self.message, params)
        for cand in candidate_messages(self.message, params, self.rng):
            bp = encode(cand, params)
            if all(y >= x for x, y in zip(b, bp)):
                nodes = tuple(chain(self.pk.key, s, self.pk.masks, x, y - x, self.counter)
                              for s, x, y in zip(sig.nodes, b, bp))
                return cand, Signature(params, nodes)
        return None


class BruteForceForger(Adversary):
    """Queries a random message, then forges the cheapest reachable other message.

    Chains that must go down are inverted step by step through a full
    preimage table of f_k; chains that go up are walked forward.
    """

    name = "brute-force"
    max_attempts = 16

    def budget(self, params):
        return (1 << params.n) + params.l * (params.w - 1)

    def receive_pk(self, pk, counter, rng):
        super().receive_pk(pk, counter, rng)
        self._inv = None

    def sign_query(self):
        self.message = self.choose_query()
        return self.message

    def choose_query(self) -> int:
        return self.rng.getrandbits(self.pk.params.m)

    def preimages(self, y: int) -> list[int]:
        if self._inv is None:
            self._inv = preimage_map(image_table(self.pk.key, self.counter))
        return self._inv.get(y, [])

    def descend(self, node: int, level: int, target: int):
        """Some node at level `target` whose chain reaches `node` at `level`, or None."""
        if level == target:
            return node
        mask = self.pk.masks[level - 1]
        options = list(self.preimages(node))
        self.rng.shuffle(options)
        for y in options:
            found = self.descend(y ^ mask, level - 1, target)
            if found is not None:
                return found
        return None

    def lower_chain(self, node: int, level: int, target: int):
        return self.descend(node, level, target)

    def plans(self, b):
        params = self.pk.params
        priced = [(inversion_cost(b, encode(c, params)), c)
                  for c in candidate_messages(self.message, params, self.rng)]
        priced.sort(key=lambda pc: pc[0])
        return [c for _, c in priced[: self.max_attempts]]

    def produce_forgery(self, sig):
        if sig is None:
            return None
        params = self.pk.params
        b = encode(self.message, params)
        for cand in self.plans(b):
            bp = encode(cand, params)
            nodes = list(sig.nodes)
            for i, (x, y) in enumerate(zip(b, bp)):
                if y < x:
                    nodes[i] = self.lower_chain(sig.nodes[i], x, y)
                    if nodes[i] is None:
                        break
            else:
                # forward walks only once every lowering has worked
                for i, (x, y) in enumerate(zip(b, bp)):
                    if y > x:
                        nodes[i] = chain(self.pk.key, nodes[i], self.pk.masks, x, y - x, self.counter)
                return cand, Signature(params, tuple(nodes))
        return None


class CollisionSeeker(BruteForceForger):
    """Like the brute-force forger, but leaves the honest chain above the signed node.

    When lowering a chain it first walks up to a merge level chosen uniformly
    above the signed level and steps down through a different preimage there,
    so its chain joins the honest one exactly at that level.
    """

    name = "collision-seeker"

    def budget(self, params):
        walk_ups = self.max_attempts * params.l * (params.w - 1)
        return super().budget(params) + walk_ups

    def plans(self, b):
        top = self.pk.params.w - 1
        out = []
        for cand in super().plans(b):
            bp = encode(cand, self.pk.params)
            if all(x < top for x, y in zip(b, bp) if y < x):
                out.append(cand)
        return out

    def lower_chain(self, node, level, target):
        top = self.pk.params.w - 1
        merge = self.rng.randint(level + 1, top)
        key, masks = self.pk.key, self.pk.masks
        path = [node]
        for j in range(level, merge):
            path.append(chain(key, path[-1], masks, j, 1, self.counter))
        honest_below = path[-2]
        mask = masks[merge - 1]
        options = [y ^ mask for y in self.preimages(path[-1]) if y ^ mask != honest_below]
        self.rng.shuffle(options)
        for start in options:
            found = self.descend(start, merge - 1, target)
            if found is not None:
                return found
        return None


@lru_cache(maxsize=None)
def low_digit_message(params: Params) -> int:
    """Message with the fewest non-zero chain lengths (ties: smallest digit sum)."""
    if params.m > 16:
        return 0
    return min(range(1 << params.m),
               key=lambda x: (sum(1 for d in encode(x, params) if d), sum(encode(x, params)), x))


class NastyForger(BruteForceForger):
    """Always asks for a signature on a message whose chain lengths are mostly zero."""

    name = "nasty"

    def choose_query(self):
        return low_digit_message(self.pk.params)


ADVERSARIES = {cls.name: cls for cls in
               (GiveUp, Replay, DigitWalker, BruteForceForger, CollisionSeeker, NastyForger)}


def make_adversary(name: str) -> Adversary:
    try:
        return ADVERSARIES[name]()
    except KeyError:
        raise ValueError(f"unknown adversary {name!r}; choose from {sorted(ADVERSARIES)}") from None
