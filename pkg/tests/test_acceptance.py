"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import json
import math
import time

from radial_sumrules import cli_report as cli
from radial_sumrules import integrals as ig
from radial_sumrules import moments as mo
from radial_sumrules import specfun as sf
from radial_sumrules import spectrum as sp
from radial_sumrules import theorems as th
from radial_sumrules import wavefunctions as wv
from radial_sumrules.potentials import CATALOG_IDS, HardSingularError, make


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def wf_of(spec, n_r, l, method="auto"):
    return wv.build(sp.bound_state(spec, n_r, l, method))


def test_modified_kramers_s_wave(criterion):
    t0 = time.perf_counter()
    spec = make("coulomb")
    worst = 0.0
    for n in range(1, 6):
        wf = wf_of(spec, n - 1, 0)
        lhs = spec.params["e2"] * mo.moment(wf, -2).value
        rhs = 0.5 * 4.0 / n**3  # hbar^2 C^2 / 2m, C^2 = 4/(n^3 a0^3)
        rep = th.kramers_check(wf, -1.0, tol=1e-8)
        assert rep.identity_id == "kramers_modified" and rep.passed
        worst = max(worst, rel(lhs, rhs), rep.residual)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 1.0
    criterion(1, ok, f"modified Kramers l=0, n=1..5: max rel residual {worst:.2e} (<= 1e-8), {dt:.3f} s (< 1 s)")
    assert ok


def test_standard_kramers(criterion):
    worst = 0.0
    count = 0
    for l in (1, 2):
        for n_r in (0, 1, 2):
            wf = wf_of(make("coulomb"), n_r, l)
            for s in (-1.0, 0.0, 1.0, 2.0):
                rep = th.kramers_check(wf, s, tol=1e-8)
                assert rep.applicable and rep.rhs == 0.0
                worst = max(worst, rep.residual)
                count += 1
    ok = worst <= 1e-8
    criterion(2, ok, f"standard Kramers l in {{1,2}}, s in {{-1..2}}: {count} checks, max residual {worst:.2e} (<= 1e-8)")
    assert ok


def test_ehrenfest_with_negative_control(criterion):
    spec = make("coulomb")
    worst = 0.0
    for n_r, l in ((0, 1), (1, 1), (0, 0), (1, 0), (2, 0)):
        rep = th.ehrenfest_balance(wf_of(spec, n_r, l), tol=1e-8)
        assert rep.passed
        assert rep.pi.case == ("finite" if l == 0 else "vanishes")
        worst = max(worst, rep.residual)
    # l = 0 with Pi forced to zero: the balance must miss by O(1)
    control = min(
        abs(r.lhs - r.rhs) / abs(r.rhs)
        for r in (th.ehrenfest_balance(wf_of(spec, n_r, 0), zero_surface_term=True) for n_r in range(3))
    )
    ok = worst <= 1e-8 and control > 0.5
    criterion(3, ok, f"Ehrenfest l=1 (Pi=0) and l=0 (Pi finite): max residual {worst:.2e}; "
                     f"Pi zeroed misses by {control:.3f} (relative)")
    assert ok


def test_oscillator_l1_and_pasternak(criterion):
    spec = make("oscillator", V0=0.5)
    wf = wf_of(spec, 0, 1)
    exact = [r for r in th.structural_relations(wf) if r.identity_id == "oscillator_l1_exact"][0]
    # Pasternak: <r^-3> from <r> (p = 1), against quadrature and against C^2/(2 alpha)
    alpha = math.sqrt(2 * 0.5)
    c2 = wv.origin_coefficient(wf).coeff ** 2
    inv = mo.pasternak_invert(wf, 1.0)
    quad = mo.moment(wf, -3).value
    worst_p = max(rel(inv, quad), rel(inv, c2 / (2 * alpha)), rel(mo.moment(wf, 1).value, c2 / alpha**3))
    ok = exact.residual <= 1e-10 and worst_p <= 1e-6
    criterion(4, ok, f"oscillator 2V0<r> = (hbar^2 l(l+1)/m)<r^-3> at l=1: residual {exact.residual:.2e} "
                     f"(<= 1e-10); Pasternak inversion {worst_p:.2e} (<= 1e-6)")
    assert ok


def test_linear_normalisation(criterion):
    spec = make("linear", V0=1.0)
    kappa = (2 * 1.0) ** (1 / 3)  # (2 m V0 / hbar^2)^(1/3)
    worst = 0.0
    for n_r in range(5):
        zero = sp.airy_zero(n_r + 1)
        aip = sf.airy_ai_deriv(-zero).value
        predicted = kappa**0.5 / aip
        for method in ("numerov", "auto"):
            wf = wf_of(spec, n_r, 0, method)
            c1 = wv.origin_coefficient(wf).origin_fit
            worst = max(worst, rel(c1 / (kappa * aip), predicted))
    ok = worst <= 1e-6
    criterion(5, ok, f"linear potential N_nr from fitted C1, n_r=0..4 (Numerov and Airy): max rel {worst:.2e} (<= 1e-6)")
    assert ok


def test_integral_identities(criterion):
    on, off = 0.0, math.inf
    for ident in ig.IDENTITY_IDS:
        for n_r in (0, 1):
            q = ig.on_shell_parameters(ident, n_r)
            rep = ig.verify_identity(ident, q)
            assert rep.passed
            on = max(on, rep.residual)
            off = min(off, ig.evaluate_identity(ident, ig.perturb(ident, q, 0.01), allow_off_shell=True).residual)
    ok = on <= 1e-6 and off > 1e-3
    criterion(6, ok, f"six integral identities, two lowest states: on-shell max {on:.2e} (<= 1e-6); "
                     f"1% off-shell min {off:.2e} (> 1e-3)")
    assert ok


def test_valence_electron(criterion):
    worst_r2 = 0.0
    for V0, n_r, l in ((0.3, 0, 1), (0.3, 2, 1), (0.7, 1, 1), (0.05, 0, 0), (1.5, 1, 2)):
        st_ = sp.bound_state(make("valence_electron", V0=V0), n_r, l)
        worst_r2 = max(worst_r2, rel(mo.moment(wv.build(st_), -2).value, mo.valence_r2_moment(st_)))
    # 2P = 1 (V0 = 1, l = 1): spectrum -m alpha^2 / (2 (n_r+1)^2 hbar^2), and alpha <r^-2> = a^2 hbar^2 / 2m
    spec = make("valence_electron", V0=1.0, alpha=1.0)
    worst_e = worst_o = 0.0
    for n_r in range(4):
        e_formula = -1.0 / (2 * (n_r + 1) ** 2)
        for method in ("auto", "numerov"):
            wf = wf_of(spec, n_r, 1, method)
            worst_e = max(worst_e, rel(wf.state.energy, e_formula))
            rep = [r for r in th.structural_relations(wf) if r.identity_id == "valence_origin"][0]
            worst_o = max(worst_o, rep.residual)
    # V0 -> 0: <r^-2> -> 2 m^2 e^4 / ((2l+1) n^3 hbar^4)
    worst_lim = 0.0
    for n_r, l in ((0, 0), (1, 0), (0, 1), (1, 2)):
        n = n_r + l + 1
        got = mo.moment(wf_of(make("valence_electron", V0=1e-9), n_r, l), -2).value
        worst_lim = max(worst_lim, rel(got, 2.0 / ((2 * l + 1) * n**3)))
    ok = max(worst_r2, worst_e, worst_o, worst_lim) <= 1e-6
    criterion(7, ok, f"valence electron: <r^-2> closed form {worst_r2:.2e}; 2P=1 spectrum {worst_e:.2e}, "
                     f"origin relation {worst_o:.2e}; V0->0 limit {worst_lim:.2e} (all <= 1e-6)")
    assert ok


def test_khare(criterion):
    worst = 0.0
    for k in (0, 1, 2):
        for n_r in (0, 1):
            rep = th.khare_check(wf_of(make("coulomb"), n_r, k), k, tol=1e-6)
            assert rep.passed
            worst = max(worst, rep.residual)
    # soft-singular 2P = 1, k = 0: |R(0)|^2 = (2m/hbar^2) <U'>, the potential-derivative form at V0 > 0
    soft = th.khare_check(wf_of(make("valence_electron", V0=1.0), 0, 1), 0, tol=1e-6)
    ok = worst <= 1e-6 and soft.passed and soft.residual <= 1e-6
    criterion(8, ok, f"Khare relation hydrogen k=l in {{0,1,2}}: max {worst:.2e}; "
                     f"soft-singular 2P=1, k=0: {soft.residual:.2e} (<= 1e-6)")
    assert ok


def test_numerov_oracle(criterion):
    worst = 0.0
    count = 0
    for pid in CATALOG_IDS:
        spec = make(pid)
        for l in range(3):
            if not spec.has_analytic(l):
                continue
            for n_r in range(4):
                try:
                    cf = sp.closed_form_state(spec, n_r, l)
                except (sp.NoBoundStateError, HardSingularError):
                    continue
                worst = max(worst, abs(cf.energy - sp.numerov_solve(spec, l, n_r).energy))
                count += 1
    q = [r for r in th.structural_relations(wf_of(make("quarkonium"), 0, 1, "numerov"))
         if r.identity_id == "quarkonium_balance"][0]
    ok = worst <= 1e-6 and q.residual <= 1e-4
    criterion(9, ok, f"Numerov reproduces {count} closed-form energies: max |dE| {worst:.2e} (<= 1e-6); "
                     f"quarkonium balance at l=1 {q.residual:.2e} (<= 1e-4)")
    assert ok


def test_constant_factor_audit(criterion, capsys):
    code = cli.main(["audit-constants", "--format", "json"])
    rows = json.loads(capsys.readouterr().out)["rows"]
    by = {(r["form"], r["case"]): r for r in rows}
    virial = by[("adopted", "hydrogen 2p, s=0")]["status"] == "holds"
    kramers = by[("adopted", "hydrogen 1s, s=-1")]["status"] == "holds"
    literal = {f: [r for r in rows if r["form"] == f] for f in
               ("regular_m_over_2hbar2", "no_boundary_2m_over_hbar2", "soft_m_over_2hbar2")}
    discrepancies = all(any(r["status"] != "holds" for r in v) for v in literal.values())
    ok = code == 0 and virial and kramers and discrepancies
    factor = by[("regular_m_over_2hbar2", "hydrogen 1s, s=-1")]["factor"]
    criterion(10, ok, f"audit-constants: adopted form holds at s=0 and at (l=0, s=-1); literal prefactor forms "
                      f"reported with discrepancies (m/2hbar^2 brace off by x{factor:g})")
    assert ok
