"""W-OTS+ key generation, signing and verification, plus canonical encodings.

Byte layout (version 1, all integers big-endian)::

    magic      2 bytes   b"W+"
    version    u8        1
    kind       u8        1 = secret key, 2 = public key, 3 = signature
    n, m, w    u16 x 3
    variant    u8        0 = production, 1 = toy
    -- secret and public keys --
    key_len    u16, then key_len bytes of k
    masks      (w-1) x ceil(n/8) bytes, r_1 first
    -- secret key only --
    used       u8        0 or 1
    -- body --
    l x ceil(n/8) bytes  (secret chain seeds, public chain ends, or signature nodes)

Nothing may follow the body.
"""
from __future__ import annotations

import random
import struct
import threading
from dataclasses import dataclass, field

from .errors import KeyAlreadyUsed, InvalidLength, MalformedEncoding
from .hash_family import (EvalCounter, FamilyKey, FamilySpec, chain, sample_key,
                          sample_masks, sample_string)
from .params import Params, derive_params, encode

MAGIC = b"W+"
VERSION = 1
KIND_SECRET, KIND_PUBLIC, KIND_SIGNATURE = 1, 2, 3
_VARIANTS = {"production": 0, "toy": 1}
_HEADER = struct.Struct(">2sBBHHHB")


@dataclass(frozen=True)
class PublicKey:
    params: Params
    key: FamilyKey
    masks: tuple[int, ...]
    chains: tuple[int, ...]


@dataclass
class SecretKey:
    params: Params
    key: FamilyKey
    masks: tuple[int, ...]
    chains: tuple[int, ...] = field(repr=False)
    used: bool = False
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def public_key(self, counter: EvalCounter | None = None) -> PublicKey:
        w = self.params.w
        ends = tuple(chain(self.key, s, self.masks, 0, w - 1, counter) for s in self.chains)
        return PublicKey(self.params, self.key, self.masks, ends)


@dataclass(frozen=True)
class Signature:
    params: Params
    nodes: tuple[int, ...]


def keygen(params: Params, rng=None, *, key: FamilyKey | None = None, masks=None,
           counter: EvalCounter | None = None) -> tuple[SecretKey, PublicKey]:
    """Sample k, r and sk, then compute pk_i = c^{w-1}(sk_i, r).

    `key` and `masks` may be supplied by a caller that needs to embed its own
    function and bitmasks; otherwise they are drawn from `rng`.  Without an
    rng the operating system's randomness is used.
    """
    if rng is None:
        rng = random.SystemRandom()
    if key is None:
        key = sample_key(FamilySpec.for_n(params.n), rng)
    if masks is None:
        masks = sample_masks(params.n, params.w, rng)
    seeds = tuple(sample_string(params.n, rng) for _ in range(params.l))
    sk = SecretKey(params, key, tuple(masks), seeds)
    return sk, sk.public_key(counter)


def sign_digits(key: FamilyKey, masks, seeds, digits, counter: EvalCounter | None = None) -> tuple[int, ...]:
    return tuple(chain(key, s, masks, 0, b, counter) for s, b in zip(seeds, digits))


def sign(sk: SecretKey, message: int, counter: EvalCounter | None = None) -> Signature:
    digits = encode(message, sk.params)
    with sk._lock:
        if sk.used:
            raise KeyAlreadyUsed("this one-time key has already produced a signature")
        sk.used = True
    return Signature(sk.params, sign_digits(sk.key, sk.masks, sk.chains, digits, counter))


def verify(pk: PublicKey, sig: Signature, message: int, counter: EvalCounter | None = None) -> bool:
    """Return True iff every signature node walks up to the matching public chain end.

    Structural problems (wrong parameters, lengths, out-of-range values or
    messages) are reported as a rejection rather than an exception.
    """
    params = pk.params
    if sig.params != params or len(sig.nodes) != params.l or len(pk.chains) != params.l:
        return False
    if any(not isinstance(s, int) or s < 0 or s >> params.n for s in sig.nodes):
        return False
    try:
        digits = encode(message, params)
    except InvalidLength:
        return False
    top = params.w - 1
    for s, b, end in zip(sig.nodes, digits, pk.chains):
        if chain(pk.key, s, pk.masks, b, top - b, counter) != end:
            return False
    return True


# -- serialization -----------------------------------------------------------

def _header(kind: int, params: Params, variant: str) -> bytes:
    return _HEADER.pack(MAGIC, VERSION, kind, params.n, params.m, params.w, _VARIANTS[variant])


def _strings(values, nb: int) -> bytes:
    return b"".join(v.to_bytes(nb, "big") for v in values)


def _key_block(key: FamilyKey, masks, nb: int) -> bytes:
    return struct.pack(">H", len(key.k)) + key.k + _strings(masks, nb)


def serialize_public_key(pk: PublicKey) -> bytes:
    nb = pk.params.nbytes
    return (_header(KIND_PUBLIC, pk.params, pk.key.spec.variant)
            + _key_block(pk.key, pk.masks, nb) + _strings(pk.chains, nb))


def serialize_secret_key(sk: SecretKey) -> bytes:
    nb = sk.params.nbytes
    return (_header(KIND_SECRET, sk.params, sk.key.spec.variant)
            + _key_block(sk.key, sk.masks, nb) + bytes([int(sk.used)]) + _strings(sk.chains, nb))


def serialize_signature(sig: Signature) -> bytes:
    return (_header(KIND_SIGNATURE, sig.params, FamilySpec.for_n(sig.params.n).variant)
            + _strings(sig.nodes, sig.params.nbytes))


class _Reader:
    def __init__(self, data: bytes):
        self.data = bytes(data)
        self.pos = 0

    def take(self, size: int, what: str) -> bytes:
        if self.pos + size > len(self.data):
            raise MalformedEncoding(f"truncated {what}", self.pos)
        chunk = self.data[self.pos:self.pos + size]
        self.pos += size
        return chunk

    def strings(self, count: int, n: int, what: str) -> tuple[int, ...]:
        nb = (n + 7) // 8
        out = []
        for _ in range(count):
            at = self.pos
            v = int.from_bytes(self.take(nb, what), "big")
            if v >> n:
                raise MalformedEncoding(f"{what} value exceeds {n} bits", at)
            out.append(v)
        return tuple(out)

    def finish(self):
        if self.pos != len(self.data):
            raise MalformedEncoding("trailing bytes", self.pos)


def _read_header(r: _Reader, kind: int) -> tuple[Params, FamilySpec]:
    magic, version, got_kind, n, m, w, variant = _HEADER.unpack(r.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise MalformedEncoding("bad magic", 0)
    if version != VERSION:
        raise MalformedEncoding(f"unsupported version {version}", 2)
    if got_kind != kind:
        raise MalformedEncoding(f"expected object kind {kind}, found {got_kind}", 3)
    names = {v: k for k, v in _VARIANTS.items()}
    if variant not in names:
        raise MalformedEncoding(f"unknown family variant {variant}", 10)
    try:
        params = derive_params(n, m, w)
        spec = FamilySpec(names[variant], n)
    except ValueError as exc:
        raise MalformedEncoding(str(exc), 4) from None
    return params, spec


def _read_key_block(r: _Reader, params: Params, spec: FamilySpec):
    (klen,) = struct.unpack(">H", r.take(2, "key length"))
    if klen != spec.key_bytes:
        raise MalformedEncoding(f"key length {klen}, expected {spec.key_bytes}", r.pos - 2)
    key = FamilyKey(spec, r.take(klen, "function key"))
    masks = r.strings(params.w - 1, params.n, "bitmask")
    return key, masks


def deserialize_public_key(data: bytes) -> PublicKey:
    r = _Reader(data)
    params, spec = _read_header(r, KIND_PUBLIC)
    key, masks = _read_key_block(r, params, spec)
    chains = r.strings(params.l, params.n, "public chain end")
    r.finish()
    return PublicKey(params, key, masks, chains)


def deserialize_secret_key(data: bytes) -> SecretKey:
    r = _Reader(data)
    params, spec = _read_header(r, KIND_SECRET)
    key, masks = _read_key_block(r, params, spec)
    at = r.pos
    used = r.take(1, "usage flag")[0]
    if used > 1:
        raise MalformedEncoding("usage flag must be 0 or 1", at)
    chains = r.strings(params.l, params.n, "secret chain seed")
    r.finish()
    return SecretKey(params, key, masks, chains, used=bool(used))


def deserialize_signature(data: bytes) -> Signature:
    r = _Reader(data)
    params, _ = _read_header(r, KIND_SIGNATURE)
    nodes = r.strings(params.l, params.n, "signature node")
    r.finish()
    return Signature(params, nodes)
