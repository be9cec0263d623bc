import math

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad

from radial_sumrules import spectrum as sp
from radial_sumrules import wavefunctions as wv
from radial_sumrules.potentials import make


def hydrogen_R(n, l, r):
    """Textbook hydrogen radial function (a0 = 1) built on scipy's Laguerre polynomials."""
    rho = 2.0 * r / n
    norm = math.sqrt((2.0 / n) ** 3 * math.factorial(n - l - 1) / (2 * n * math.factorial(n + l)))
    return norm * np.exp(-rho / 2) * rho**l * special.eval_genlaguerre(n - l - 1, 2 * l + 1, rho)


CASES = [
    ("coulomb", 0, 0, "auto"), ("coulomb", 1, 2, "auto"), ("oscillator", 1, 1, "auto"),
    ("linear", 2, 0, "auto"), ("exponential", 1, 0, "auto"), ("hulthen", 1, 0, "auto"),
    ("morse", 1, 0, "auto"), ("woods_saxon", 1, 0, "auto"), ("valence_electron", 0, 1, "auto"),
    ("singular_oscillator", 1, 2, "auto"), ("quarkonium", 1, 1, "auto"), ("morse", 0, 0, "numerov"),
]


@pytest.mark.parametrize("pid,n_r,l,method", CASES, ids=[f"{c[0]}-{c[1]}{c[2]}-{c[3]}" for c in CASES])
def test_normalised_to_one(pid, n_r, l, method):
    wf = wv.build(sp.bound_state(make(pid), n_r, l, method))
    total, _ = quad(lambda r: wf.u(r) ** 2, 0, wf.r_hi, limit=400, points=[wf.length])
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("n,l", [(1, 0), (2, 0), (2, 1), (3, 2)])
def test_closed_form_hydrogen(n, l):
    wf = wv.build(sp.closed_form_state(make("coulomb"), n - l - 1, l))
    r = np.linspace(0.05, 20, 400)
    assert np.max(np.abs(wf(r) - hydrogen_R(n, l, r))) < 1e-12


@pytest.mark.parametrize("n,l", [(1, 0), (2, 0), (3, 1)])
def test_numerov_hydrogen_pointwise(n, l):
    wf = wv.build(sp.numerov_solve(make("coulomb"), l, n - l - 1))
    assert wf.form == "numeric"
    r = np.linspace(0.1, 10, 300)
    assert np.max(np.abs(wf(r) - hydrogen_R(n, l, r))) <= 1e-5


@pytest.mark.parametrize("pid,n_r,l", [("coulomb", 1, 0), ("oscillator", 0, 1), ("linear", 1, 0),
                                       ("hulthen", 0, 0), ("morse", 1, 0), ("woods_saxon", 0, 0),
                                       ("exponential", 0, 0), ("valence_electron", 0, 1),
                                       ("singular_oscillator", 0, 1)])
def test_origin_fit_agrees_with_closed_form(pid, n_r, l):
    ob = wv.origin_coefficient(wv.build(sp.closed_form_state(make(pid), n_r, l)))
    assert ob.provenance == "closed_form"
    assert ob.agreement <= 1e-5


def test_hydrogen_origin_coefficients():
    # R_n0(0)^2 = 4 / n^3, R_21 ~ r / (2 sqrt 6)
    for n in (1, 2, 3):
        c = wv.origin_coefficient(wv.build(sp.closed_form_state(make("coulomb"), n - 1, 0))).coeff
        assert c * c == pytest.approx(4.0 / n**3, rel=1e-13)
    c = wv.origin_derivative_coefficient(wv.build(sp.closed_form_state(make("coulomb"), 0, 1)), 1)
    assert c == pytest.approx(1.0 / (2.0 * math.sqrt(6.0)), rel=1e-13)


def test_soft_singular_exponent():
    st = sp.bound_state(make("valence_electron", V0=0.3), 0, 1)
    wf = wv.build(st)
    assert wf.exponent == pytest.approx(st.P - 0.5, rel=1e-15)


def test_wrong_power_diverges():
    wf = wv.build(sp.closed_form_state(make("coulomb"), 0, 0))
    with pytest.raises(wv.FitDivergenceError):
        wv.origin_derivative_coefficient(wf, 1)


def test_rescaling_is_invisible():
    wf = wv.build(sp.closed_form_state(make("morse"), 1, 0))
    r = np.linspace(0.2, 4, 50)
    for f in (1e-6, -3.0, 2e5):
        w2 = wf.rescaled(f)
        assert np.allclose(np.sign(f) * w2(r), wf(r), rtol=1e-13, atol=1e-15)


def test_dump_table_columns():
    wf = wv.build(sp.closed_form_state(make("coulomb"), 0, 0))
    lines = wv.dump_table(wf, [0.5, 1.0]).splitlines()
    assert lines[0] == "r,R,u"
    r, R, u = map(float, lines[2].split(","))
    assert R == pytest.approx(2 * math.exp(-1.0), rel=1e-15)
    assert u == pytest.approx(r * R, rel=1e-15)
