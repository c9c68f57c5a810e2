"""Scheme constants and base-w message encoding with checksum."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidLength, InvalidParameter

MIN_N = 8


@dataclass(frozen=True)
class Params:
    n: int
    m: int
    w: int
    l1: int
    l2: int
    l: int

    @property
    def log_w(self) -> int:
        return self.w.bit_length() - 1

    @property
    def nbytes(self) -> int:
        return (self.n + 7) // 8

    @property
    def mbytes(self) -> int:
        return (self.m + 7) // 8


def _is_power_of_two(x: int) -> bool:
    return x >= 2 and x & (x - 1) == 0


@lru_cache(maxsize=None)
def derive_params(n: int, m: int, w: int) -> Params:
    """Derive l1, l2 and l for security parameter n, message length m and base w.

    w must be a power of two so that log2(w) is integral; the checksum length
    is computed with exact integer arithmetic instead of floating logs.
    """
    if not isinstance(w, int) or not _is_power_of_two(w):
        raise InvalidParameter(f"w must be a power of two >= 2, got {w!r}")
    log_w = w.bit_length() - 1
    if n < MIN_N:
        raise InvalidParameter(f"n must be at least {MIN_N}, got {n}")
    if m < log_w:
        raise InvalidParameter(f"m must be at least log2(w)={log_w}, got {m}")
    l1 = -(-m // log_w)
    # floor(log(l1*(w-1)) / log(w)) + 1 is the number of base-w digits of l1*(w-1)
    max_checksum = l1 * (w - 1)
    l2 = (max_checksum.bit_length() - 1) // log_w + 1
    return Params(n=n, m=m, w=w, l1=l1, l2=l2, l=l1 + l2)


def _to_base_w(value: int, width: int, log_w: int) -> list[int]:
    mask = (1 << log_w) - 1
    return [(value >> (log_w * (width - 1 - i))) & mask for i in range(width)]


def checksum(digits, params: Params) -> int:
    return sum(params.w - 1 - d for d in digits[: params.l1])


def encode(message: int, params: Params) -> tuple[int, ...]:
    """Map an m-bit message to the l chain lengths b_1..b_l.

    The message is read MSB-first as l1 base-w digits (zero-padded on the
    left when m is not a multiple of log2 w), followed by the l2 digits of
    the checksum, also MSB-first and left-padded with zeros.
    """
    if not isinstance(message, int) or message < 0 or message >> params.m:
        raise InvalidLength(f"message must be an {params.m}-bit integer")
    return _encode(message, params)


@lru_cache(maxsize=1 << 16)
def _encode(message: int, params: Params) -> tuple[int, ...]:
    msg_digits = _to_base_w(message, params.l1, params.log_w)
    c = sum(params.w - 1 - d for d in msg_digits)
    return tuple(msg_digits + _to_base_w(c, params.l2, params.log_w))


def message_from_bytes(data: bytes, params: Params) -> int:
    """Interpret exactly ceil(m/8) bytes as an m-bit message (top bits must be clear)."""
    if len(data) != params.mbytes:
        raise InvalidLength(f"expected {params.mbytes} message bytes, got {len(data)}")
    value = int.from_bytes(data, "big")
    if value >> params.m:
        raise InvalidLength(f"message has bits set above bit {params.m}")
    return value
