import math

import pytest
from hypothesis import given, strategies as st

from wotsplus.errors import InvalidParameter, OutOfRange
from wotsplus.params import derive_params
from wotsplus.security_bounds import (InSecModel, comparison_table, level_closed_form, level_gap,
                                      prior_bound, render_table, security_level,
                                      security_level_numeric, theorem1_bound)

P = derive_params(256, 256, 16)


@pytest.mark.parametrize("attack,kind,floor", [
    ("classical", "new", 240), ("classical", "prior", 241),
    ("quantum", "new", 112), ("quantum", "prior", 113),
])
def test_published_levels(attack, kind, floor):
    assert math.floor(security_level(256, 16, 256, attack, kind)) == floor


def test_level_values():
    assert security_level(256, 16, 256) == pytest.approx(256 - math.log2(67 * 16 * 33), abs=1e-12)
    assert security_level(256, 16, 256, bound_kind="prior") == pytest.approx(
        256 - 4 - math.log2(67 * 16 + 1), abs=1e-12)


def test_level_is_where_bound_reaches_half():
    for attack in ("classical", "quantum"):
        for kind, fn in (("new", theorem1_bound), ("prior", prior_bound)):
            b = security_level(256, 16, 256, attack, kind)
            insec = InSecModel(attack)(2.0 ** (b - 1), 256)
            assert fn(P, insec, insec, insec) == pytest.approx(0.5, rel=1e-9)


def test_gap_value():
    assert level_gap(67, 16) == pytest.approx(1.043, abs=1e-3)
    gap = security_level(256, 16, 256, bound_kind="prior") - security_level(256, 16, 256)
    assert gap == pytest.approx(level_gap(67, 16), abs=1e-9)


def test_theorem1_example():
    e = 2.0 ** -216
    assert math.log2(theorem1_bound(P, e, e, e)) == pytest.approx(-200.8895, abs=1e-4)


def test_bounds_clamp_and_reject():
    assert theorem1_bound(P, 1.0, 1.0, 1.0) == 1.0
    assert prior_bound(P, 0.5, 0.5, 0.5) == 1.0
    assert theorem1_bound(P, 0.0, 0.0, 0.0) == 0.0
    for bad in (-0.1, 1.5, float("nan")):
        with pytest.raises(OutOfRange):
            theorem1_bound(P, bad, 0.0, 0.0)
        with pytest.raises(OutOfRange):
            prior_bound(P, 0.0, 0.0, bad)
    with pytest.raises(InvalidParameter):
        InSecModel("psychic")
    with pytest.raises(InvalidParameter):
        level_closed_form(256, 67, 16, bound_kind="other")


@given(st.sampled_from([128, 192, 256]), st.sampled_from([2, 4, 8, 16, 32, 64]),
       st.sampled_from([128, 256]), st.sampled_from(["classical", "quantum"]),
       st.sampled_from(["new", "prior"]))
def test_closed_form_matches_root_finding(n, w, m, attack, kind):
    assert security_level(n, w, m, attack, kind) == pytest.approx(
        security_level_numeric(n, w, m, attack, kind), abs=1e-6)


@given(st.integers(1, 10_000), st.sampled_from([2, 4, 8, 16, 32, 64, 256]))
def test_gap_identity_everywhere(l, w):
    g = level_closed_form(256, l, w, bound_kind="prior") - level_closed_form(256, l, w)
    assert g == pytest.approx(level_gap(l, w), abs=1e-9)


def test_monotonicity():
    ws = [2, 4, 8, 16, 32, 64]
    for kind in ("new", "prior"):
        assert all(level_closed_form(256, 67, a, bound_kind=kind) > level_closed_form(256, 67, b, bound_kind=kind)
                   for a, b in zip(ws, ws[1:]))
        assert all(level_closed_form(256, l, 16, bound_kind=kind) > level_closed_form(256, l + 1, 16, bound_kind=kind)
                   for l in range(1, 200))
        assert level_closed_form(128, 67, 16, bound_kind=kind) < level_closed_form(256, 67, 16, bound_kind=kind)


def test_comparison_table_render():
    reports = comparison_table(256, 16, 256)
    text = render_table(reports, integer=True)
    assert "b > 240" in text and "b > 241" in text and "b > 112" in text and "b > 113" in text
    assert "b > 240.89" in render_table(reports)
