"""Oracle machines from the W-OTS+ security reduction.

`run_M_A` embeds a one-wayness challenge y_c and a second-preimage challenge
x_c into one chain of an otherwise honest key and turns a forgery into a
solution for one of them.  `run_M_prime` is the distinguishing variant that
only reports whether the forgery was fortunate, and `run_B` feeds an
undetectability sample into it at a chosen hybrid position.

All costs are counted in f_k evaluations.  The reduction's own work and the
adversary's work go to separate counters so the runtime overhead can be
checked against 3lw + w - 2.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..errors import IndexRange, InternalInconsistency
from ..hash_family import (EvalCounter, FamilyKey, FamilySpec, chain, chain_nodes, sample_key,
                           sample_masks, sample_string)
from ..params import Params, encode
from ..wots import PublicKey, SecretKey, Signature, keygen, sign, sign_digits, verify

PREIMAGE = "preimage"
SECOND_PREIMAGE = "second-preimage"
FAIL = "fail"

BAD_QUERY = "bad-query"
NO_FORGERY = "no-forgery"
WRONG_POSITION = "wrong-position"
COLLISION_ELSEWHERE = "collision-elsewhere"
FAIL_REASONS = (BAD_QUERY, NO_FORGERY, WRONG_POSITION, COLLISION_ELSEWHERE)


def overhead_bound(params: Params) -> int:
    """Evaluations the reduction may add on top of the adversary: 3lw + w - 2."""
    return 3 * params.l * params.w + params.w - 2


@dataclass(frozen=True)
class ChallengeSpec:
    alpha: int          # 1-based chain index
    beta: int           # level of y_c, in 1..w-1
    gamma: int | None   # level whose mask carries x_c; None when beta == w-1
    y_c: int
    x_c: int


@dataclass
class Planted:
    masks: tuple[int, ...]
    pk: PublicKey
    challenge: ChallengeSpec
    sk: SecretKey
    trail: list[int]    # planted chain alpha, levels beta..w-1


@dataclass
class ReductionOutcome:
    kind: str
    value: int | None = None
    reason: str | None = None
    evaluations_used: int = 0
    adversary_evaluations: int = 0
    adversary_budget: int = 0
    alpha: int | None = None
    beta: int | None = None
    gamma: int | None = None
    b_alpha: int | None = None
    b_prime_alpha: int | None = None
    forgery_valid: bool = False
    fortunate: bool = False          # b_alpha >= beta, valid forgery, b'_alpha < beta
    fortunate_strict: bool = False     # same event with b'_alpha < b_alpha
    collision_level: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.evaluations_used <= self.adversary_budget + self.extra.get("overhead_bound", 0)

    @property
    def success(self) -> bool:
        return self.kind in (PREIMAGE, SECOND_PREIMAGE)


class Adversary:
    """One-time-signature forger interacting with at most one signing query.

    Subclasses override the three callbacks.  `budget` is the adversary's
    declared running time t in f_k evaluations; it must charge every
    evaluation it makes to the counter handed over in `receive_pk`.
    """

    name = "abstract"

    def budget(self, params: Params) -> int:
        return 0

    def receive_pk(self, pk: PublicKey, counter: EvalCounter, rng: random.Random) -> None:
        self.pk = pk
        self.counter = counter
        self.rng = rng

    def sign_query(self) -> int | None:
        return None

    def produce_forgery(self, sig: Signature | None) -> tuple[int, Signature] | None:
        return None


def sample_challenges(params: Params, rng) -> tuple[int, int, int | None]:
    alpha = rng.randint(1, params.l)
    beta = rng.randint(1, params.w - 1)
    gamma = None if beta == params.w - 1 else rng.randint(beta + 1, params.w - 1)
    return alpha, beta, gamma


def plant_challenges(params: Params, key: FamilyKey, y_c: int, x_c: int, rng,
                     counter: EvalCounter | None = None, indices=None) -> Planted:
    """Generate a key pair with y_c at level beta of chain alpha and x_c behind mask gamma.

    Chain alpha is not computed from its secret seed; its public end is the
    walk from y_c, and r'_gamma is chosen so that the node entering f_k at
    level gamma is exactly x_c.  Costs (l-1)(w-1) + (w-1-beta) evaluations.
    """
    w = params.w
    masks = list(sample_masks(params.n, w, rng))
    seeds = tuple(sample_string(params.n, rng) for _ in range(params.l))
    alpha, beta, gamma = indices if indices is not None else sample_challenges(params, rng)

    if gamma is None:
        trail = [y_c]
    else:
        # levels beta..gamma-1 use unmodified masks
        trail = chain_nodes(key, y_c, masks, beta, gamma - beta - 1, counter)
        masks[gamma - 1] = trail[-1] ^ x_c
        trail += chain_nodes(key, trail[-1], masks, gamma - 1, w - gamma, counter)[1:]
    masks = tuple(masks)

    ends = []
    for i, s in enumerate(seeds, start=1):
        ends.append(trail[-1] if i == alpha else chain(key, s, masks, 0, w - 1, counter))
    pk = PublicKey(params, key, masks, tuple(ends))
    sk = SecretKey(params, key, masks, seeds)
    spec = ChallengeSpec(alpha, beta, gamma, y_c, x_c)
    return Planted(masks, pk, spec, sk, trail)


def answer_query(challenge: ChallengeSpec, sk: SecretKey, masks, message: int,
                 counter: EvalCounter | None = None) -> Signature | None:
    """Sign `message` under the planted key; None means the query sits below the challenge."""
    digits = encode(message, sk.params)
    a, beta = challenge.alpha - 1, challenge.beta
    if digits[a] < beta:
        return None
    nodes = list(sign_digits(sk.key, masks, sk.chains[:a], digits[:a], counter))
    nodes.append(chain(sk.key, challenge.y_c, masks, beta, digits[a] - beta, counter))
    nodes += sign_digits(sk.key, masks, sk.chains[a + 1:], digits[a + 1:], counter)
    return Signature(sk.params, tuple(nodes))


def extract(challenge: ChallengeSpec, masks, key: FamilyKey, forgery: tuple[int, Signature],
            trail=None, counter: EvalCounter | None = None) -> ReductionOutcome:
    """Read a preimage of y_c or a second preimage of x_c off a valid forgery.

    The caller has already checked that the forgery verifies and differs from
    the queried message.  Every solution is re-checked with uncounted f_k
    calls; a mismatch raises InternalInconsistency.
    """
    m_prime, sig = forgery
    params = sig.params
    w, beta, gamma = params.w, challenge.beta, challenge.gamma
    a = challenge.alpha - 1
    bp = encode(m_prime, params)[a]
    out = ReductionOutcome(FAIL, alpha=challenge.alpha, beta=beta, gamma=gamma, b_prime_alpha=bp)
    if bp >= beta:
        out.reason = WRONG_POSITION
        return out

    forged = chain_nodes(key, sig.nodes[a], masks, bp, w - 1 - bp, counter)   # levels bp..w-1
    if trail is None:
        trail = _planted_trail(challenge, masks, key, w, counter)
    out.collision_level = next(
        (lev for lev in range(beta, w) if forged[lev - bp] == trail[lev - beta]), None)

    if beta == w - 1 or forged[beta - bp] == challenge.y_c:
        x = forged[beta - 1 - bp] ^ masks[beta - 1]
        if key(x) != challenge.y_c:
            raise InternalInconsistency("claimed preimage does not map to y_c")
        out.kind, out.value = PREIMAGE, x
        return out

    x_prime = forged[gamma - 1 - bp] ^ masks[gamma - 1]
    if x_prime != challenge.x_c and forged[gamma - bp] == trail[gamma - beta]:
        if key(x_prime) != key(challenge.x_c):
            raise InternalInconsistency("claimed second preimage does not collide with x_c")
        out.kind, out.value = SECOND_PREIMAGE, x_prime
        return out

    out.reason = COLLISION_ELSEWHERE
    return out


def _planted_trail(challenge, masks, key, w, counter):
    return chain_nodes(key, challenge.y_c, masks, challenge.beta, w - 1 - challenge.beta, counter)


def _adversary_rng(rng) -> random.Random:
    return random.Random(rng.getrandbits(64))


def run_M_A(adversary: Adversary, params: Params, key: FamilyKey, y_c: int, x_c: int, rng,
            indices=None) -> ReductionOutcome:
    """Run the reduction against `adversary` with challenges y_c (OW) and x_c (SPR)."""
    ours, theirs = EvalCounter(), EvalCounter()
    planted = plant_challenges(params, key, y_c, x_c, rng, ours, indices=indices)
    ch = planted.challenge
    t = adversary.budget(params)

    def finish(out: ReductionOutcome) -> ReductionOutcome:
        out.alpha, out.beta, out.gamma = ch.alpha, ch.beta, ch.gamma
        out.b_alpha = b_alpha
        out.evaluations_used = ours.count + theirs.count
        out.adversary_evaluations = theirs.count
        out.adversary_budget = t
        out.extra["overhead_bound"] = overhead_bound(params)
        out.extra["reduction_evaluations"] = ours.count
        return out

    adversary.receive_pk(planted.pk, theirs, _adversary_rng(rng))
    message = adversary.sign_query()
    b_alpha = None
    sig = None
    if message is not None:
        b_alpha = encode(message, params)[ch.alpha - 1]
        if b_alpha < ch.beta:
            return finish(ReductionOutcome(FAIL, reason=BAD_QUERY))
        sig = answer_query(ch, planted.sk, planted.masks, message, ours)

    forgery = adversary.produce_forgery(sig)
    if forgery is None:
        return finish(ReductionOutcome(FAIL, reason=NO_FORGERY))
    m_prime, sig_prime = forgery
    if m_prime == message or not verify(planted.pk, sig_prime, m_prime, ours):
        return finish(ReductionOutcome(FAIL, reason=NO_FORGERY))

    out = extract(ch, planted.masks, key, forgery, planted.trail, ours)
    out.forgery_valid = True
    out.fortunate = out.b_prime_alpha < ch.beta
    out.fortunate_strict = b_alpha is not None and out.b_prime_alpha < b_alpha
    if out.success and not out.fortunate:
        raise InternalInconsistency("extraction succeeded without a fortunate forgery")
    return finish(out)


# -- distinguisher machines ------------------------------------------------------

def sample_d_m(params: Params, spec: FamilySpec, rng):
    """(beta, u, r, k) with every component uniform."""
    beta = rng.randint(1, params.w - 1)
    u = sample_string(params.n, rng)
    masks = sample_masks(params.n, params.w, rng)
    return beta, u, masks, sample_key(spec, rng)


def sample_d_kg(params: Params, spec: FamilySpec, rng):
    """(beta, u, r, k) with u = c^beta(x, r) for uniform x, i.e. an honest level-beta node."""
    beta = rng.randint(1, params.w - 1)
    x = sample_string(params.n, rng)
    masks = sample_masks(params.n, params.w, rng)
    key = sample_key(spec, rng)
    return beta, chain(key, x, masks, 0, beta), masks, key


def run_M_prime(adversary: Adversary, params: Params, sample, rng,
                counter: EvalCounter | None = None,
                adversary_counter: EvalCounter | None = None) -> int:
    """Return 1 iff the adversary's forgery is fortunate for chain alpha at level beta.

    The planted node is the sample value u (the challenge y_c of run_M_A
    plays no role here).
    """
    beta, u, masks, key = sample
    ours = counter if counter is not None else EvalCounter()
    theirs = adversary_counter if adversary_counter is not None else EvalCounter()
    w = params.w
    seeds = tuple(sample_string(params.n, rng) for _ in range(params.l))
    alpha = rng.randint(1, params.l)
    a = alpha - 1
    ends = [chain(key, s, masks, 0, w - 1, ours) if i != a else None for i, s in enumerate(seeds)]
    ends[a] = chain(key, u, masks, beta, w - 1 - beta, ours)
    pk = PublicKey(params, key, tuple(masks), tuple(ends))
    sk = SecretKey(params, key, tuple(masks), seeds)

    adversary.receive_pk(pk, theirs, _adversary_rng(rng))
    message = adversary.sign_query()
    sig = None
    if message is not None:
        challenge = ChallengeSpec(alpha, beta, None, u, 0)
        sig = answer_query(challenge, sk, masks, message, ours)
        if sig is None:
            return 0
    forgery = adversary.produce_forgery(sig)
    if forgery is None:
        return 0
    m_prime, sig_prime = forgery
    if m_prime == message or not verify(pk, sig_prime, m_prime, ours):
        return 0
    return int(encode(m_prime, params)[a] < beta)


def embed_ud_sample(params: Params, u: int, masks, key: FamilyKey, beta_star: int, i_star: int,
                    counter: EvalCounter | None = None) -> int:
    """Treat u as a level-(i*+1) node and walk it up to level beta*."""
    if not 0 <= i_star < beta_star <= params.w - 1:
        raise IndexRange(f"need 0 <= i* < beta* <= w-1, got i*={i_star}, beta*={beta_star}")
    return chain(key, u, masks, i_star + 1, beta_star - i_star - 1, counter)


def run_B(adversary: Adversary, params: Params, sample, beta_star: int, i_star: int, rng,
          counter: EvalCounter | None = None,
          adversary_counter: EvalCounter | None = None) -> int:
    """Undetectability distinguisher: hybrid i* if u = f_k(x), hybrid i*+1 if u is uniform."""
    u, key = sample
    masks = sample_masks(params.n, params.w, rng)
    top = embed_ud_sample(params, u, masks, key, beta_star, i_star, counter)
    return run_M_prime(adversary, params, (beta_star, top, masks, key), rng,
                       counter, adversary_counter)


def sample_hybrid(params: Params, spec: FamilySpec, beta_star: int, i: int, rng):
    """Draw from hybrid H_i: u is a uniform node at level i walked up to beta*."""
    x = sample_string(params.n, rng)
    masks = sample_masks(params.n, params.w, rng)
    key = sample_key(spec, rng)
    return beta_star, chain(key, x, masks, i, beta_star - i), masks, key


# -- plain experiment -------------------------------------------------------------

@dataclass
class ExperimentResult:
    valid: bool
    evaluations_used: int
    adversary_evaluations: int


def run_eu_cma(adversary: Adversary, params: Params, rng, spec: FamilySpec | None = None) -> ExperimentResult:
    """The one-query existential-forgery experiment against an honest key."""
    ours, theirs = EvalCounter(), EvalCounter()
    spec = spec or FamilySpec.for_n(params.n)
    sk, pk = keygen(params, rng, key=sample_key(spec, rng), counter=ours)
    adversary.receive_pk(pk, theirs, _adversary_rng(rng))
    message = adversary.sign_query()
    sig = sign(sk, message, ours) if message is not None else None
    forgery = adversary.produce_forgery(sig)
    valid = False
    if forgery is not None:
        m_prime, sig_prime = forgery
        valid = m_prime != message and verify(pk, sig_prime, m_prime, ours)
    return ExperimentResult(valid, ours.count + theirs.count, theirs.count)


def sample_ow_spr_challenge(spec: FamilySpec, rng):
    """Key k, OW target y_c = f_k(x) for uniform x, and uniform SPR input x_c."""
    key = sample_key(spec, rng)
    y_c = key(sample_string(spec.n, rng))
    return key, y_c, sample_string(spec.n, rng)
