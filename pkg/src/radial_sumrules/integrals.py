"""Closed-form integrals over on-shell special-function wavefunctions.

Each identity comes from an origin sum rule (u'(0)^2 = (2m/hbar^2) int u^2 V' dr
for s-waves) or from the virial theorem, applied to an unnormalised u whose
parameters satisfy the eigenvalue condition.  The left side is integrated
adaptively after a change to a compact variable; the right side is built from
special functions at the boundary.

Identities (u is the unnormalised s-wave solution, N = int u^2 dr):

bessel_main       int J_p^2(lam e^(-r/2a)) e^(-r/a) dr = a J_p'(lam)^2
bessel_weighted   int J_p^2(lam e^(-r/2a)) e^(-r/a) r dr = -(2 a p^2/lam^2) N + 2 a^2 J_p'(lam)^2
hulthen           a int_0^1 t^(2 eps) F^2 / (1-t)^2 dt = -(a alpha beta / gamma^2) F(alpha+1, beta+1, gamma+1; 1)^2
morse_potential   int u^2 g dr = -(alpha r0 / 2 gamma^2) y0^(2 beta/alpha + 2) e^(-y0) (a/c)^2 M(a+1, c+1, y0)^2
morse_virial      int u^2 g r dr = (r0/alpha) int u^2 h dr + (r0 beta^2 / alpha gamma^2) N
woods_saxon       int u^2 y (1-y) dr = (a^3/gamma^2) [y0^(nu+1) (1-y0)^(mu+1) F'(y0) / a]^2

with g = e^(-2 alpha x) - e^(-alpha x), h = e^(-2 alpha x) - 2 e^(-alpha x), x = (r - r0)/r0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy import integrate

from . import specfun as sf
from .moments import QuadratureResult
from .potentials import PotentialSpec, make
from .spectrum import closed_form_state, woods_saxon_u
from .theorems import TheoremReport

__all__ = [
    "IDENTITY_IDS",
    "IntegralIdentity",
    "IntegralError",
    "OffShellError",
    "DEFAULT_POTENTIALS",
    "on_shell_parameters",
    "perturb",
    "eigen_residual",
    "evaluate_identity",
    "verify_identity",
    "verify_all",
]

IDENTITY_IDS = ("bessel_main", "bessel_weighted", "hulthen", "morse_potential", "morse_virial", "woods_saxon")

ON_SHELL_TOL = 1e-8
TOL = 1e-6

_POTENTIAL_OF = {
    "bessel_main": "exponential",
    "bessel_weighted": "exponential",
    "hulthen": "hulthen",
    "morse_potential": "morse",
    "morse_virial": "morse",
    "woods_saxon": "woods_saxon",
}

DEFAULT_POTENTIALS = {
    "exponential": make("exponential"),
    "hulthen": make("hulthen"),
    "morse": make("morse"),
    "woods_saxon": make("woods_saxon"),
}


class IntegralError(ArithmeticError):
    pass


class OffShellError(IntegralError):
    """Parameters do not satisfy the eigenvalue condition."""


@dataclass(frozen=True)
class IntegralIdentity:
    id: str
    parameters: Mapping[str, float]
    lhs_quadrature: QuadratureResult
    rhs_closed_form: float
    on_shell_residual: float

    @property
    def residual(self) -> float:
        lhs, rhs = self.lhs_quadrature.value, self.rhs_closed_form
        if not (math.isfinite(lhs) and math.isfinite(rhs)):
            return math.inf
        scale = max(abs(lhs), abs(rhs))
        return abs(lhs - rhs) / scale if scale > 0 else 0.0


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def _hulthen_from(eps: float, lam2: float, a: float) -> dict:
    root = math.sqrt(eps * eps + lam2)
    return {"eps": eps, "lam2": lam2, "alpha": eps + root, "beta": eps - root, "gamma": 2.0 * eps + 1.0, "a": a}


def _morse_from(beta: float, gamma: float, alpha: float, r0: float) -> dict:
    c = 2.0 * beta / alpha + 1.0
    return {"beta": beta, "gamma": gamma, "alpha": alpha, "r0": r0, "c": c,
            "a": 0.5 * c - gamma / alpha, "y0": 2.0 * gamma / alpha * math.exp(alpha)}


def _ws_from(beta: float, gamma2: float, a: float, R: float) -> dict:
    b2 = beta * beta
    mu = complex(0.0, math.sqrt(gamma2 - b2)) if b2 < gamma2 else complex(math.sqrt(b2 - gamma2), 0.0)
    e = math.exp(-R / a)
    return {"beta": beta, "nu": beta, "mu": mu, "gamma2": gamma2, "a": a, "R": R,
            "y0": 1.0 / (1.0 + e), "one_minus_y0": e / (1.0 + e)}


def on_shell_parameters(identity: str, n_r: int = 0, spec: PotentialSpec | None = None) -> Mapping:
    """Spectrum-consistent parameters for the n_r-th s-state of the identity's potential."""
    if identity not in _POTENTIAL_OF:
        raise ValueError(f"unknown identity {identity!r}; choose from {', '.join(IDENTITY_IDS)}")
    pid = _POTENTIAL_OF[identity]
    spec = spec or DEFAULT_POTENTIALS[pid]
    if spec.id != pid:
        raise ValueError(f"{identity} needs a {pid} potential, got {spec.id}")
    st = closed_form_state(spec, n_r, 0)
    q = dict(st.params)
    if pid == "exponential":
        q = {"p": q["p"], "lam": q["lam"], "a": q["a"]}
    elif pid == "hulthen":
        q = _hulthen_from(q["eps"], q["lam2"], q["a"])
    elif pid == "morse":
        q = _morse_from(q["beta"], q["gamma"], q["alpha"], q["r0"])
    else:
        q = _ws_from(q["beta"], q["gamma2"], q["a"], q["R"])
    return MappingProxyType(q)


def perturb(identity: str, params: Mapping, rel: float = 0.01) -> Mapping:
    """Move the Bessel argument lam, or the energy parameter, off shell by a relative amount.

    For the Bessel identities the discrepancy is quadratic in J_p(lam), and a 1%
    change of a small order p barely moves J_p(lam); shifting lam is the sharper probe.
    """
    q = dict(params)
    pid = _POTENTIAL_OF[identity]
    if pid == "exponential":
        q["lam"] *= 1.0 + rel
    elif pid == "hulthen":
        q = _hulthen_from(q["eps"] * (1.0 + rel), q["lam2"], q["a"])
    elif pid == "morse":
        q = _morse_from(q["beta"] * (1.0 + rel), q["gamma"], q["alpha"], q["r0"])
    else:
        q = _ws_from(q["beta"] * (1.0 + rel), q["gamma2"], q["a"], q["R"])
    return MappingProxyType(q)


def eigen_residual(identity: str, q: Mapping) -> float:
    """Scaled size of the eigenvalue condition at these parameters."""
    pid = _POTENTIAL_OF[identity]
    if pid == "exponential":
        return abs(sf.bessel_j(q["p"], q["lam"]).value)
    if pid == "hulthen":
        r = sf.gauss_2f1(q["alpha"], q["beta"], q["gamma"], 1.0)
        return abs(r.value) / max(1.0, r.magnitude)
    if pid == "morse":
        r = sf.kummer_1f1(q["a"], q["c"], q["y0"])
        return abs(r.value) / max(1.0, r.magnitude)
    val, mag = woods_saxon_u(q, q["y0"], q["one_minus_y0"])
    return abs(val) / mag


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------

def _quad(f, lo, hi, **kw) -> QuadratureResult:
    val, err, info = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-11, limit=400, full_output=1, **kw)[:3]
    return QuadratureResult(float(val), float(err), int(info["neval"]), True)


def _bessel_norm(q) -> QuadratureResult:
    """N = int J_p^2(lam e^(-r/2a)) dr = 2a int_0^1 J_p^2(lam t) / t dt."""
    p, lam, a = q["p"], q["lam"], q["a"]
    # J_p(lam t)^2 ~ t^(2p): pull out the power as an algebraic weight
    res = _quad(lambda t: sf.bessel_j(p, lam * t).value ** 2 / t ** (2.0 * p) if t > 0 else
                (0.5 * lam) ** (2 * p) / math.gamma(p + 1.0) ** 2, 0.0, 1.0, weight="alg", wvar=(2.0 * p - 1.0, 0.0))
    return QuadratureResult(2.0 * a * res.value, 2.0 * a * res.abs_err_estimate, res.node_count, True)


def _hulthen_quotient(q):
    """Coefficients of F(t)/(1-t) when F is a polynomial vanishing at t = 1, else None."""
    al, be, ga = q["alpha"], q["beta"], q["gamma"]
    n = round(-be)
    if n < 1 or abs(be + n) > 1e-6:
        return None
    be = -float(n)
    coef = [1.0]
    for k in range(n):
        coef.append(coef[-1] * (al + k) * (be + k) / ((ga + k) * (k + 1)))
    # synthetic division by (1 - t): F = (1 - t) Q + F(1)
    quo = []
    acc = 0.0
    for c in coef[:-1]:
        acc += c
        quo.append(acc)
    return np.array(quo)


def _hulthen_fp1(q) -> float:
    """F(alpha+1, beta+1, gamma+1; 1), finite only when the series terminates."""
    al, be, ga = q["alpha"], q["beta"], q["gamma"]
    n = round(-be)
    if n >= 1 and abs(be + n) <= 1e-6:
        be = -float(n)
        term, total = 1.0, 1.0
        for k in range(n - 1):
            term *= (al + 1 + k) * (be + 1 + k) / ((ga + 1 + k) * (k + 1))
            total += term
        return total
    try:
        return sf.gauss_2f1(al + 1.0, be + 1.0, ga + 1.0, 1.0).value
    except sf.SpecialFunctionError:
        return math.inf


def _morse_u2(q, y):
    b = q["beta"] / q["alpha"]
    m = sf.kummer_1f1(q["a"], q["c"], y).value
    return y ** (2.0 * b) * math.exp(-y) * m * m


def _morse_x(q, y):
    """x = (r - r0)/r0 from y = (2 gamma/alpha) e^(-alpha x)."""
    return -math.log(q["alpha"] * y / (2.0 * q["gamma"])) / q["alpha"]


def _morse_quad(q, weight) -> QuadratureResult:
    """int_0^inf u^2 w(x, r) dr via dr = -(r0/alpha) dy / y."""
    r0, al = q["r0"], q["alpha"]

    def f(y):
        if y <= 0.0:
            return 0.0
        x = _morse_x(q, y)
        return _morse_u2(q, y) * weight(x, r0 * (1.0 + x)) / y

    res = _quad(f, 0.0, q["y0"])
    s = r0 / al
    return QuadratureResult(s * res.value, s * res.abs_err_estimate, res.node_count, True)


def _morse_closed(q) -> float:
    al, r0, gam, be = q["alpha"], q["r0"], q["gamma"], q["beta"]
    a, c, y0 = q["a"], q["c"], q["y0"]
    m1 = sf.kummer_1f1(a + 1.0, c + 1.0, y0).value
    return -(al * r0 / (2.0 * gam * gam)) * y0 ** (2.0 * be / al + 2.0) * math.exp(-y0) * (a / c) ** 2 * m1 * m1


def _ws_u(q, y):
    return woods_saxon_u(q, y, 1.0 - y)[0]


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def _lhs_rhs(identity: str, q: Mapping) -> tuple[QuadratureResult, float]:
    if identity == "bessel_main":
        p, lam, a = q["p"], q["lam"], q["a"]
        res = _quad(lambda t: t * sf.bessel_j(p, lam * t).value ** 2, 0.0, 1.0)
        lhs = QuadratureResult(2.0 * a * res.value, 2.0 * a * res.abs_err_estimate, res.node_count, True)
        return lhs, a * sf.bessel_j_deriv(p, lam).value ** 2
    if identity == "bessel_weighted":
        p, lam, a = q["p"], q["lam"], q["a"]
        # r = -2a ln t, e^(-r/a) dr = 2a t dt
        res = _quad(lambda t: -2.0 * a * math.log(t) * t * sf.bessel_j(p, lam * t).value ** 2 if t > 0 else 0.0,
                    0.0, 1.0)
        lhs = QuadratureResult(2.0 * a * res.value, 2.0 * a * res.abs_err_estimate, res.node_count, True)
        norm = _bessel_norm(q).value
        rhs = -2.0 * a * p * p / (lam * lam) * norm + 2.0 * a * a * sf.bessel_j_deriv(p, lam).value ** 2
        return lhs, rhs
    if identity == "hulthen":
        al, be, ga, a, eps = q["alpha"], q["beta"], q["gamma"], q["a"], q["eps"]
        quo = _hulthen_quotient(q)
        fp1 = _hulthen_fp1(q)
        rhs = -a * al * be / (ga * ga) * fp1 * fp1
        if quo is None:
            # F(1) != 0: the integrand ~ (1-t)^-2 at the upper end
            return QuadratureResult(math.inf, math.inf, 0, False), rhs
        poly = np.polynomial.Polynomial(quo)
        res = _quad(lambda t: t ** (2.0 * eps) * poly(t) ** 2, 0.0, 1.0)
        return QuadratureResult(a * res.value, a * res.abs_err_estimate, res.node_count, True), rhs
    if identity == "morse_potential":
        al = q["alpha"]
        lhs = _morse_quad(q, lambda x, r: math.exp(-2.0 * al * x) - math.exp(-al * x))
        return lhs, _morse_closed(q)
    if identity == "morse_virial":
        al, r0, gam, be = q["alpha"], q["r0"], q["gamma"], q["beta"]
        lhs = _morse_quad(q, lambda x, r: (math.exp(-2.0 * al * x) - math.exp(-al * x)) * r)
        e1 = _morse_quad(q, lambda x, r: math.exp(-al * x)).value
        norm = _morse_quad(q, lambda x, r: 1.0).value
        h_int = _morse_closed(q) - e1
        return lhs, (r0 / al) * h_int + r0 * be * be / (al * gam * gam) * norm
    if identity == "woods_saxon":
        a, y0, w0, nu, mu = q["a"], q["y0"], q["one_minus_y0"], q["nu"], q["mu"]
        res = _quad(lambda y: _ws_u(q, y) ** 2, 0.0, y0)
        lhs = QuadratureResult(a * res.value, a * res.abs_err_estimate, res.node_count, True)
        A, B, C = mu + nu, mu + nu + 1.0, 2.0 * nu + 1.0
        fp = A * B / C * sf.hyp2f1_complex(A + 1.0, B + 1.0, C + 1.0, y0)
        du = (y0 ** (nu + 1.0) * np.exp((mu + 1.0) * math.log(w0)) * fp / a).real
        return lhs, a**3 / q["gamma2"] * du * du
    raise ValueError(f"unknown identity {identity!r}")


def evaluate_identity(identity: str, parameters: Mapping, allow_off_shell: bool = False) -> IntegralIdentity:
    """Both sides of one identity; off-shell parameters are rejected unless allowed."""
    if identity not in IDENTITY_IDS:
        raise ValueError(f"unknown identity {identity!r}; choose from {', '.join(IDENTITY_IDS)}")
    shell = eigen_residual(identity, parameters)
    if shell > ON_SHELL_TOL and not allow_off_shell:
        raise OffShellError(f"{identity}: eigenvalue condition residual {shell:.3g} exceeds {ON_SHELL_TOL:g}")
    lhs, rhs = _lhs_rhs(identity, parameters)
    return IntegralIdentity(identity, MappingProxyType(dict(parameters)), lhs, float(rhs), shell)


def _fmt(q: Mapping) -> str:
    def one(v):
        if isinstance(v, complex):
            return f"{v.real:.10g}{v.imag:+.10g}j"
        return f"{v:.12g}"

    return ", ".join(f"{k}={one(v)}" for k, v in q.items())


def verify_identity(identity: str, parameters: Mapping | None = None, tol: float = TOL,
                    allow_off_shell: bool = False, label: str = "") -> TheoremReport:
    """Quadrature left side against the closed-form right side, as a TheoremReport."""
    q = parameters if parameters is not None else on_shell_parameters(identity)
    ev = evaluate_identity(identity, q, allow_off_shell)
    res = ev.residual
    ing = (f"lhs quadrature error {ev.lhs_quadrature.abs_err_estimate:.3g}",
           f"eigenvalue residual {ev.on_shell_residual:.3g}", _fmt(q))
    pid = _POTENTIAL_OF[identity]
    note = "" if ev.on_shell_residual <= ON_SHELL_TOL else "off shell"
    return TheoremReport(identity, ev.lhs_quadrature.value, ev.rhs_closed_form, None,
                         res, tol, bool(res <= tol), ing, DEFAULT_POTENTIALS[pid].describe(), label, True, note)


def verify_all(n_states: int = 1, tol: float = TOL) -> list[TheoremReport]:
    """Every identity at the n_states lowest on-shell states of its default potential."""
    out = []
    for ident in IDENTITY_IDS:
        for n in range(n_states):
            out.append(verify_identity(ident, on_shell_parameters(ident, n), tol, label=f"n_r={n},l=0"))
    return out
