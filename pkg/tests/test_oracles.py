import random

import pytest

from wotsplus.errors import DomainTooLarge
from wotsplus.hash_family import FamilyKey, FamilySpec, EvalCounter, sample_key
from wotsplus.harness.oracles import (brute_force_ow, brute_force_spr, image_table, preimage_map,
                                      ud_advantage)

TOY = FamilySpec("toy", 8)


def test_ow_finds_a_preimage():
    rng = random.Random(1)
    for _ in range(20):
        key = sample_key(TOY, rng)
        x0 = rng.getrandbits(8)
        x = brute_force_ow(key, key(x0))
        assert key(x) == key(x0)


def test_ow_none_for_non_image():
    key = sample_key(TOY, random.Random(3))
    images = set(image_table(key))
    missing = next(y for y in range(256) if y not in images)
    assert brute_force_ow(key, missing) is None


def test_spr_none_for_unique_image():
    key = sample_key(TOY, random.Random(2))
    table = image_table(key)
    inv = preimage_map(table)
    unique = next(x for x in range(256) if len(inv[table[x]]) == 1)
    assert brute_force_spr(key, unique) is None
    shared = next(x for x in range(256) if len(inv[table[x]]) > 1)
    x2 = brute_force_spr(key, shared)
    assert x2 != shared and key(x2) == key(shared)


def test_second_preimage_fraction_matches_random_function():
    # P[some other of the 255 inputs hits f(x)] = 1 - (1 - 2^-8)^255
    expected = 1 - (1 - 2 ** -8) ** 255
    rng = random.Random(99)
    fracs = []
    for _ in range(50):
        key = sample_key(TOY, rng)
        fracs.append(sum(brute_force_spr(key, x) is not None for x in range(256)) / 256)
    assert abs(sum(fracs) / len(fracs) - expected) <= 0.1


def test_domain_limits():
    key = FamilyKey(FamilySpec("production", 128), bytes(16))
    with pytest.raises(DomainTooLarge):
        brute_force_ow(key, 0)
    toy = sample_key(TOY, random.Random(1))
    with pytest.raises(DomainTooLarge):
        brute_force_spr(toy, 0, n_toy=21)


def test_image_table_charges_full_domain():
    c = EvalCounter()
    image_table(sample_key(TOY, random.Random(1)), c)
    assert c.count == 256


def test_ud_advantage_equals_missing_image_fraction():
    rng = random.Random(4)
    advs = []
    for _ in range(30):
        key = sample_key(TOY, rng)
        images = len(set(image_table(key)))
        advs.append(ud_advantage(key))
        assert ud_advantage(key) == pytest.approx((256 - images) / 256)
    assert sum(advs) / len(advs) == pytest.approx((1 - 1 / 256) ** 256, abs=0.03)
