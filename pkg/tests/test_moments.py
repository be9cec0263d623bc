import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radial_sumrules import moments as mo
from radial_sumrules import spectrum as sp
from radial_sumrules import wavefunctions as wv
from radial_sumrules.potentials import make


def hydrogen(n, l, method="auto"):
    return wv.build(sp.bound_state(make("coulomb"), n - l - 1, l, method))


def textbook(n, l, s):
    """Hydrogen <r^s>, a0 = 1."""
    L = l * (l + 1)
    return {
        1: (3 * n * n - L) / 2,
        2: n * n * (5 * n * n + 1 - 3 * L) / 2,
        -1: 1 / n**2,
        -2: 1 / (n**3 * (l + 0.5)),
        -3: 1 / (n**3 * l * (l + 0.5) * (l + 1)) if l else math.inf,
    }[s]


@pytest.mark.parametrize("n,l", [(1, 0), (2, 1), (3, 0), (3, 2), (4, 1)])
@pytest.mark.parametrize("s", [1, 2, -1, -2])
def test_hydrogen_moments(n, l, s):
    assert mo.moment(hydrogen(n, l), s).value == pytest.approx(textbook(n, l, s), rel=1e-10)


@pytest.mark.parametrize("n,l", [(2, 1), (3, 2)])
def test_inverse_cube(n, l):
    assert mo.moment(hydrogen(n, l), -3).value == pytest.approx(textbook(n, l, -3), rel=1e-10)


def test_numeric_states_reach_quadrature_tolerance():
    res = mo.moment(hydrogen(3, 1, "numerov"), -2)
    assert res.converged and res.abs_err_estimate <= 1e-9
    assert res.value == pytest.approx(textbook(3, 1, -2), rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=-2.5, max_value=4.0))
def test_ground_state_fractional_moments(s):
    # 4 r^2 e^{-2r}: <r^s> = Gamma(s + 3) / 2^(s + 1)
    want = math.gamma(s + 3) / 2 ** (s + 1)
    assert mo.moment(hydrogen(1, 0), s).value == pytest.approx(want, rel=1e-9)


def test_divergence_guard():
    with pytest.raises(mo.DivergentMomentError):
        mo.moment(hydrogen(1, 0), -3)
    assert not mo.MomentRequest(hydrogen(1, 0), None, -1.0).convergent


def test_normalisation_invariance():
    wf = hydrogen(2, 0)
    assert mo.moment(wf.rescaled(1e4), 1).value == pytest.approx(mo.moment(wf, 1).value, rel=1e-14)


@pytest.mark.parametrize("l,p", [(1, 1.0), (1, 2.0), (2, 0.5), (0, 0.0)])
def test_pasternak_inversion(l, p):
    spec = make("oscillator", V0=0.7)
    wf = wv.build(sp.bound_state(spec, 0, l))
    assert mo.pasternak_invert(wf, p) == pytest.approx(mo.moment(wf, -p - 2).value, rel=1e-6)


def test_pasternak_needs_convergent_moments():
    wf = wv.build(sp.bound_state(make("oscillator"), 0, 0))
    with pytest.raises(mo.DivergentMomentError):
        mo.pasternak_invert(wf, 2.0)


@pytest.mark.parametrize("V0,n_r,l", [(0.3, 0, 1), (0.3, 2, 1), (1.0, 1, 1), (0.05, 0, 0), (1.5, 1, 2)])
def test_valence_inverse_square(V0, n_r, l):
    st = sp.bound_state(make("valence_electron", V0=V0), n_r, l)
    got = mo.moment(wv.build(st), -2).value
    assert got == pytest.approx(mo.valence_r2_moment(st), rel=1e-6)


def test_general_mean():
    wf = hydrogen(1, 0)
    # <e^{-r}> = 4 int r^2 e^{-3r} = 8/27
    assert mo.mean(wf, lambda r: np.exp(-r), 0.0).value == pytest.approx(8 / 27, rel=1e-12)
