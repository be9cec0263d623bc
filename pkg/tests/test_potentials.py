import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radial_sumrules import potentials as pt
from radial_sumrules.potentials import ConfigError, PotentialError, Units, make


def test_catalog_ids():
    assert set(pt.CATALOG_IDS) == {
        "coulomb", "oscillator", "linear", "power_law", "quarkonium", "exponential", "hulthen",
        "morse", "woods_saxon", "inv_square_plus_power", "valence_electron", "singular_oscillator",
    }


@pytest.mark.parametrize("pid", pt.CATALOG_IDS)
def test_derivative_matches_finite_difference(pid):
    spec = make(pid)
    L = spec.length_scale
    for r in (0.3 * L, L, 2.7 * L):
        h = 1e-5 * r
        fd = (spec.v(r + h) - spec.v(r - h)) / (2 * h)
        assert spec.v_prime(r) == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("pid", pt.CATALOG_IDS)
def test_classification_agrees_with_declared_class(pid):
    spec = make(pid)
    assert pt.classify_numerically(spec) == spec.potential_class


def test_u_form_splits_inverse_square():
    spec = make("valence_electron", V0=0.3, alpha=1.2)
    r = np.array([0.1, 1.0, 4.0])
    assert np.allclose(spec.v(r), -0.3 / r**2 - 1.2 / r, rtol=1e-15)
    assert np.allclose(spec.u(r), -1.2 / r, rtol=1e-15)


def test_hulthen_is_stable_at_small_r():
    spec = make("hulthen", V0=8.0, a=1.0)
    r = 1e-10
    # -V0/(e^{r/a} - 1) -> -V0 a / r
    assert spec.u(r) == pytest.approx(-8.0 / r, rel=1e-9)


def test_woods_saxon_tail_does_not_overflow():
    spec = make("woods_saxon")
    assert spec.u(2000.0) == pytest.approx(0.0, abs=1e-300)
    assert math.isfinite(spec.u_prime(2000.0))


@pytest.mark.parametrize("l,expected", [(0, 0.5), (1, 1.5), (3, 3.5)])
def test_regular_origin_exponent(l, expected):
    assert make("coulomb").origin_exponent(l) == expected


def test_soft_singular_origin_exponent_with_units():
    un = Units(hbar=2.0, m=3.0)
    spec = make("valence_electron", un, V0=0.4)
    assert spec.origin_exponent(1) == pytest.approx(math.sqrt(2.25 - 2 * 3.0 * 0.4 / 4.0), rel=1e-15)


def test_hard_singular_rejected():
    spec = make("valence_electron", V0=0.2)
    with pytest.raises(pt.HardSingularError):
        spec.origin_exponent(0)


@pytest.mark.parametrize("bad", [{"e2": -1.0}, {"e2": float("nan")}, {"charge": 1.0}])
def test_bad_parameters(bad):
    with pytest.raises(PotentialError):
        make("coulomb", **bad)


def test_unknown_id():
    with pytest.raises(PotentialError, match="unknown potential"):
        make("yukawa")


def test_r_nonpositive_rejected():
    with pytest.raises(PotentialError):
        make("coulomb").v(0.0)


def test_config_roundtrip():
    spec = pt.spec_from_config("# morse\npotential = morse\nD = 6\nm = 2\n")
    assert spec.id == "morse" and spec.params["D"] == 6.0 and spec.units.m == 2.0


@pytest.mark.parametrize("text,line", [
    ("potential = morse\nD = six\n", 2),
    ("potential = nope\n", 1),
    ("potential = morse\n\njunk line\n", 3),
])
def test_config_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as info:
        pt.spec_from_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.05, max_value=5.0), st.floats(min_value=0.05, max_value=5.0))
def test_units_scale_consistently(hbar, m):
    un = Units(hbar=hbar, m=m)
    assert un.k2m * un.hb2m == pytest.approx(1.0, rel=1e-14)
