import math

import mpmath as mp
import numpy as np
import pytest
from scipy import special
from scipy.optimize import brentq

from radial_sumrules import spectrum as sp
from radial_sumrules.potentials import HardSingularError, Units, make

RICH = Units(hbar=1.3, m=0.7)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_balmer_with_units(n):
    spec = make("coulomb", RICH, e2=2.0)
    st = sp.bound_state(spec, n - 1, 0)
    assert st.energy == pytest.approx(-0.7 * 4.0 / (2 * 1.3**2 * n * n), rel=1e-15)
    assert st.method == "closed_form"


def test_linear_matches_mpmath_airy_zeros():
    # scipy.special.ai_zeros is only good to ~1e-12 beyond the third zero
    spec = make("linear", V0=2.0)
    for n_r in range(5):
        a = float(-mp.airyaizero(n_r + 1))
        st = sp.bound_state(spec, n_r, 0)
        assert st.energy == pytest.approx((4.0 / 2.0) ** (1 / 3) * a, rel=1e-12)


def test_exponential_order_is_a_bessel_zero_in_order():
    V0, a = 4.0, 1.0
    lam = math.sqrt(8 * V0) * a
    # roots of J_p(lam) in p, scanned downward from lam with scipy
    grid = [lam - 0.01 * k for k in range(int(lam / 0.01))]
    vals = [special.jv(p, lam) for p in grid]
    roots = [brentq(lambda p: special.jv(p, lam), grid[i + 1], grid[i])
             for i in range(len(grid) - 1) if vals[i] * vals[i + 1] < 0]
    spec = make("exponential", V0=V0, a=a)
    for n_r, p in enumerate(roots[:2]):
        st = sp.bound_state(spec, n_r, 0)
        assert st.params["p"] == pytest.approx(p, rel=1e-10)
        assert st.energy == pytest.approx(-p * p / 8.0, rel=1e-10)
    with pytest.raises(sp.NoBoundStateError):
        sp.bound_state(spec, len(roots), 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hulthen_textbook_levels(n):
    V0, a = 8.0, 1.0
    g = 2 * V0 * a * a
    st = sp.bound_state(make("hulthen", V0=V0, a=a), n - 1, 0)
    assert st.energy == pytest.approx(-((g - n * n) / (2 * n)) ** 2 / (2 * a * a), rel=1e-12)


def test_hulthen_level_count():
    with pytest.raises(sp.NoBoundStateError):
        sp.bound_state(make("hulthen", V0=8.0, a=1.0), 3, 0)


def test_valence_levels_shift_with_p():
    spec = make("valence_electron", V0=0.3, alpha=1.0)
    st = sp.bound_state(spec, 0, 1)
    P = math.sqrt(2.25 - 0.6)
    assert st.P == pytest.approx(P, rel=1e-15)
    assert st.energy == pytest.approx(-0.5 / (P + 0.5) ** 2, rel=1e-14)


def test_valence_v0_to_zero_is_hydrogen():
    st = sp.bound_state(make("valence_electron", V0=0.0), 1, 2)
    assert st.energy == pytest.approx(-1 / (2 * 16.0), rel=1e-14)


def test_hard_singular_state_refused():
    with pytest.raises(HardSingularError):
        sp.bound_state(make("singular_oscillator", V0=1.0), 0, 0)


@pytest.mark.parametrize("pid,l", [("morse", 0), ("woods_saxon", 0), ("oscillator", 2), ("coulomb", 1),
                                   ("singular_oscillator", 2)])
def test_numerov_agrees_with_closed_form(pid, l):
    spec = make(pid)
    for n_r in range(2):
        a = sp.closed_form_state(spec, n_r, l)
        b = sp.numerov_solve(spec, l, n_r)
        assert b.method == "numerov"
        assert abs(a.energy - b.energy) <= 1e-8


def test_numerov_orders_levels_and_counts_nodes():
    spec = make("quarkonium")
    es = [sp.numerov_solve(spec, 1, n).energy for n in range(4)]
    assert es == sorted(es)
    for n, st in enumerate(sp.numerov_solve(spec, 1, k) for k in range(2)):
        y = st.numeric.y
        assert np.count_nonzero(np.signbit(y[1:]) != np.signbit(y[:-1])) == n


def test_power_law_scaling():
    # V = V0 r^k: E scales as V0^(2/(k+2)) at fixed hbar, m
    e1 = sp.bound_state(make("power_law", V0=1.0, k=1.5), 0, 0).energy
    e2 = sp.bound_state(make("power_law", V0=3.0, k=1.5), 0, 0).energy
    assert e2 / e1 == pytest.approx(3.0 ** (2 / 3.5), rel=1e-7)


def test_auto_uses_numerov_without_closed_form():
    st = sp.bound_state(make("linear"), 0, 1)
    assert st.method == "numerov"


def test_frozen_morse_and_woods_saxon_levels():
    # frozen from an independent DOP853 shooting run (scipy solve_ivp, rtol 1e-13)
    assert sp.bound_state(make("morse"), 0, 0).energy == pytest.approx(-6.117558731593611, abs=1e-10)
    assert sp.bound_state(make("morse"), 1, 0).energy == pytest.approx(-3.1070827208002543, abs=1e-10)
    assert sp.bound_state(make("woods_saxon"), 0, 0).energy == pytest.approx(-0.8113393701951815, abs=1e-10)
    assert sp.bound_state(make("woods_saxon"), 1, 0).energy == pytest.approx(-0.3611193695673516, abs=1e-10)
