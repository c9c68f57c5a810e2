import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from wotsplus.errors import InvalidLength, InvalidParameter
from wotsplus.params import derive_params, encode, message_from_bytes


def constants_float(m, w):
    """Constants evaluated literally with floating-point logs."""
    l1 = math.ceil(m / math.log2(w))
    l2 = math.floor(math.log2(l1 * (w - 1)) / math.log2(w)) + 1
    return l1, l2, l1 + l2


def base_w_digits(value, w, width):
    """Reference base conversion by repeated division."""
    digits = []
    for _ in range(width):
        value, d = divmod(value, w)
        digits.append(d)
    assert value == 0
    return digits[::-1]


@pytest.mark.parametrize("n,m,w,expected", [
    (256, 256, 16, (64, 3, 67)),
    (8, 8, 4, (4, 2, 6)),
    (8, 2, 4, (1, 1, 2)),
])
def test_derive_params_examples(n, m, w, expected):
    p = derive_params(n, m, w)
    assert (p.l1, p.l2, p.l) == expected


@pytest.mark.parametrize("w", [2, 4, 8, 16, 32, 256])
@pytest.mark.parametrize("m", [1, 2, 3, 4, 7, 8, 31, 64, 128, 255, 256, 512])
def test_integer_constants_match_float_formula(m, w):
    if m < int(math.log2(w)):
        pytest.skip("below floor")
    p = derive_params(8, m, w)
    assert (p.l1, p.l2, p.l) == constants_float(m, w)


@pytest.mark.parametrize("n,m,w", [(256, 256, 10), (256, 256, 1), (256, 256, 0), (7, 8, 4), (8, 1, 4)])
def test_invalid_parameters(n, m, w):
    with pytest.raises(InvalidParameter):
        derive_params(n, m, w)


@pytest.mark.parametrize("message,expected", [
    (0xFF, (3, 3, 3, 3, 0, 0)),
    (0x00, (0, 0, 0, 0, 3, 0)),
    (0x1B, (0, 1, 2, 3, 1, 2)),
])
def test_encode_examples(message, expected):
    assert encode(message, derive_params(8, 8, 4)) == expected


def test_encode_rejects_wrong_length():
    p = derive_params(8, 8, 4)
    for bad in (256, -1, 1 << 20):
        with pytest.raises(InvalidLength):
            encode(bad, p)
    with pytest.raises(InvalidLength):
        message_from_bytes(b"\x00\x01", p)


@given(st.integers(min_value=0, max_value=(1 << 256) - 1))
def test_encode_matches_reference_conversion(msg):
    p = derive_params(256, 256, 16)
    digits = encode(msg, p)
    ref_msg = base_w_digits(msg, 16, p.l1)
    c = sum(15 - d for d in ref_msg)
    assert list(digits) == ref_msg + base_w_digits(c, 16, p.l2)


@given(st.integers(min_value=0, max_value=(1 << 9) - 1))
def test_message_padding_when_m_not_multiple_of_log_w(msg):
    # m=9, w=8: three octal digits exactly; m=9, w=16: three hex digits, top one < 2
    p = derive_params(8, 9, 16)
    digits = encode(msg, p)
    assert digits[: p.l1] == tuple(base_w_digits(msg, 16, p.l1))
    assert digits[0] < 2


def _has_lower_digit(b, bp):
    return any(y < x for x, y in zip(b, bp))


def test_checksum_property_exhaustive_m4_w4():
    p = derive_params(8, 4, 4)
    codes = {x: encode(x, p) for x in range(16)}
    for a, b in itertools.permutations(range(16), 2):
        assert _has_lower_digit(codes[a], codes[b])


def test_checksum_property_random_m256_w16():
    p = derive_params(256, 256, 16)
    rng = random.Random(7)
    for _ in range(10_000):
        a = rng.getrandbits(256)
        b = rng.getrandbits(256)
        if rng.random() < 0.5:
            # near neighbours are the interesting case: change a single digit upward
            pos = rng.randrange(64) * 4
            b = a | (0xF << pos)
        if a != b:
            assert _has_lower_digit(encode(a, p), encode(b, p))


@given(st.sampled_from([(8, 4), (16, 16), (64, 2), (256, 16), (255, 32), (100, 8)]), st.data())
def test_checksum_range_and_injectivity(mw, data):
    m, w = mw
    p = derive_params(8, m, w)
    a = data.draw(st.integers(0, (1 << m) - 1))
    b = data.draw(st.integers(0, (1 << m) - 1))
    da, db = encode(a, p), encode(b, p)
    c = sum(w - 1 - d for d in da[: p.l1])
    assert 0 <= c <= p.l1 * (w - 1) < w ** p.l2
    assert all(0 <= d < w for d in da)
    assert len(da) == p.l
    assert (da[: p.l1] == db[: p.l1]) == (a == b)
