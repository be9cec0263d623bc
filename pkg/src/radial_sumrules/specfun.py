"""Special functions needed by the analytic wavefunctions and eigenvalue conditions.

Everything here is a pure function of its arguments.  Series are summed with
``math.fsum`` style care where cancellation matters, and every public
evaluator returns an :class:`FnEvalResult` carrying an error estimate and the
number of terms used.

Methods
-------
gamma
    ``math.gamma`` with an explicit pole check.
bessel_j
    Ascending series for ``x <= 8``, Miller backward recurrence normalised by
    the Neumann sum above that.
airy_ai
    Maclaurin series for ``|x| <= 2``, asymptotic expansions for ``|x| > 8``
    and Taylor steps of ``y'' = x y`` from a cached table of anchors between.
kummer_1f1, gauss_2f1
    Ascending series, Kummer's transformation for negative argument, Gauss
    summation and the ``1 - z`` connection formula for ``2F1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

EPS = 2.220446049250313e-16
DEFAULT_TOL = 1e-17
TERM_BUDGET = 20000

__all__ = [
    "FnEvalResult",
    "SpecialFunctionError",
    "PoleError",
    "ConvergenceError",
    "DivergenceError",
    "OverflowGuardError",
    "gamma",
    "rgamma",
    "bessel_j",
    "bessel_j_deriv",
    "airy_ai",
    "airy_ai_deriv",
    "airy_ai_pair",
    "kummer_1f1",
    "gauss_2f1",
    "hyp2f1_complex",
    "cgamma",
]


class SpecialFunctionError(ValueError):
    """Base class for evaluation failures."""


class PoleError(SpecialFunctionError):
    """Argument sits on a pole (non-positive integer)."""


class ConvergenceError(SpecialFunctionError):
    """Series or recurrence did not converge within the term budget."""


class DivergenceError(SpecialFunctionError):
    """The requested value is infinite (e.g. 2F1 at z = 1 with c - a - b <= 0)."""


class OverflowGuardError(SpecialFunctionError):
    """Argument outside the supported range."""


@dataclass(frozen=True)
class FnEvalResult:
    """Value of a special function with bookkeeping.

    ``magnitude`` is the sum of absolute values of the summed terms (or a
    comparable scale); ``magnitude * EPS`` is the rounding floor of ``value``.
    It lets callers judge whether a computed zero is a zero.
    """

    value: float
    abs_err_estimate: float
    terms_used: int
    converged: bool = True
    magnitude: float = 0.0

    def __float__(self) -> float:
        return float(self.value)


def _is_nonpos_int(x) -> bool:
    return x == math.floor(x) and x <= 0


def gamma(x: float) -> float:
    """Gamma function for real ``x``.  Raises :class:`PoleError` at 0, -1, -2, ..."""
    x = float(x)
    if _is_nonpos_int(x):
        raise PoleError(f"gamma has a pole at x = {x:g}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal gamma, zero at the poles."""
    x = float(x)
    if _is_nonpos_int(x):
        return 0.0
    if x > 171.0:
        return 0.0
    return 1.0 / math.gamma(x)


# Lanczos coefficients (g = 7, n = 9), good to ~1e-15 in the right half plane.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def cgamma(z: complex) -> complex:
    """Gamma function for complex argument (Lanczos with reflection)."""
    z = complex(z)
    if z.imag == 0.0 and _is_nonpos_int(z.real):
        raise PoleError(f"gamma has a pole at z = {z.real:g}")
    if z.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * z) * cgamma(1.0 - z))
    z -= 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * acc


def _crgamma(z: complex) -> complex:
    z = complex(z)
    if z.imag == 0.0 and _is_nonpos_int(z.real):
        return 0.0j
    return 1.0 / cgamma(z)


# ---------------------------------------------------------------------------
# Bessel J
# ---------------------------------------------------------------------------

_BESSEL_SERIES_MAX_X = 8.0


def _check_bessel_args(order: float, x: float) -> None:
    if order < 0:
        raise SpecialFunctionError("bessel_j requires order >= 0")
    if x < 0:
        raise SpecialFunctionError("bessel_j requires x >= 0")


def _bessel_series(nu: float, x: float, deriv: bool = False) -> FnEvalResult:
    """Ascending series for J_nu(x) (or its derivative)."""
    if x == 0.0:
        if deriv:
            if nu == 1.0:
                val = 0.5
            elif nu == 0.0 or nu > 1.0:
                val = 0.0
            else:
                raise DivergenceError("J'_nu(0) is infinite for 0 < nu < 1")
        else:
            val = 1.0 if nu == 0.0 else 0.0
        return FnEvalResult(val, 0.0, 1, True, abs(val))
    half = 0.5 * x
    log_t0 = nu * math.log(half) - math.lgamma(nu + 1.0)
    t = math.exp(log_t0)  # k = 0 term of J
    q = -half * half
    terms = []
    k = 0
    converged = False
    while k < TERM_BUDGET:
        term = t * ((2 * k + nu) / x) if deriv else t
        terms.append(term)
        t *= q / ((k + 1) * (nu + k + 1))
        k += 1
        if k > half and abs(t) < DEFAULT_TOL * abs(math.fsum(terms)) + 1e-300:
            converged = True
            break
    val = math.fsum(terms)
    mag = sum(abs(v) for v in terms)
    if not converged:
        raise ConvergenceError(f"Bessel series did not converge (nu={nu}, x={x})")
    return FnEvalResult(val, 4 * EPS * mag, k, True, mag)


def _bessel_miller(nu: float, x: float) -> tuple[float, float, int]:
    """J_nu(x) and J_{nu+1}(x) by backward recurrence.

    Normalised with sum_k (mu + 2k) Gamma(mu + k)/k! J_{mu+2k}(x) = (x/2)^mu,
    where mu is the fractional part of nu.
    """
    n = int(math.floor(nu))
    mu = nu - n
    top = n + int(x) + 60
    top += top % 2  # start on an even index
    f_next = 0.0
    f = 1e-280
    vals = {}
    norm = 0.0
    # weights w_k for even index 2k: w_0 = Gamma(mu + 1), w_k = (mu + 2k) Gamma(mu + k)/k!
    # precompute g_k = Gamma(mu + k)/k! iteratively
    kmax = top // 2
    g = [0.0] * (kmax + 1)
    if kmax >= 1:
        g[1] = math.gamma(mu + 1.0)
        for k in range(1, kmax):
            g[k + 1] = g[k] * (mu + k) / (k + 1)
    for j in range(top, -1, -1):
        # f holds f_j, f_next holds f_{j+1}
        if j == n or j == n + 1:
            vals[j] = f
        if j % 2 == 0:
            k = j // 2
            w = math.gamma(mu + 1.0) if k == 0 else (mu + 2 * k) * g[k]
            norm += w * f
        if j == 0:
            break
        f_prev = 2.0 * (mu + j) / x * f - f_next
        f_next, f = f, f_prev
        if abs(f) > 1e250:
            # rescale everything accumulated so far
            f *= 1e-250
            f_next *= 1e-250
            norm *= 1e-250
            vals = {kk: vv * 1e-250 for kk, vv in vals.items()}
    scale = math.exp(mu * math.log(0.5 * x))
    jn = vals[n] * scale / norm
    jn1 = vals[n + 1] * scale / norm
    return jn, jn1, top


def bessel_j(order: float, x: float) -> FnEvalResult:
    """Bessel function of the first kind J_order(x) for real order >= 0 and x >= 0."""
    order = float(order)
    x = float(x)
    _check_bessel_args(order, x)
    if x <= _BESSEL_SERIES_MAX_X:
        return _bessel_series(order, x)
    jn, _, top = _bessel_miller(order, x)
    err = 64 * EPS * max(1.0, abs(jn))
    return FnEvalResult(jn, err, top, True, 1.0)


def bessel_j_deriv(order: float, x: float) -> FnEvalResult:
    """Derivative d/dx J_order(x)."""
    order = float(order)
    x = float(x)
    _check_bessel_args(order, x)
    if x <= _BESSEL_SERIES_MAX_X:
        return _bessel_series(order, x, deriv=True)
    jn, jn1, top = _bessel_miller(order, x)
    val = order / x * jn - jn1
    return FnEvalResult(val, 64 * EPS * max(1.0, abs(val)), top, True, 1.0)


# ---------------------------------------------------------------------------
# Airy Ai
# ---------------------------------------------------------------------------

_AI0 = 0.35502805388781723926  # 3^(-2/3)/Gamma(2/3)
_AIP0 = -0.25881940379280679840  # -3^(-1/3)/Gamma(1/3)
_AIRY_SERIES_MAX = 2.0
_AIRY_ASYMP_MIN = 8.0
_AIRY_MAX_NEG = 50.0
_AIRY_STEP = 0.25


def _airy_maclaurin(x: float) -> tuple[float, float, float]:
    """Ai, Ai' from the Maclaurin series; also returns a magnitude scale."""
    x3 = x * x * x
    # f, g and their derivatives
    f_terms = [1.0]
    t = 1.0
    k = 0
    while True:
        t *= x3 / ((3 * k + 2) * (3 * k + 3))
        f_terms.append(t)
        k += 1
        if abs(t) < 1e-18:
            break
    g_terms = [x]
    t = x
    k = 0
    while True:
        t *= x3 / ((3 * k + 3) * (3 * k + 4))
        g_terms.append(t)
        k += 1
        if abs(t) < 1e-18:
            break
    fp_terms = [0.5 * x * x]
    t = 0.5 * x * x
    k = 1
    while True:
        t *= x3 / ((3 * k) * (3 * k + 2))
        fp_terms.append(t)
        k += 1
        if abs(t) < 1e-18:
            break
    gp_terms = [1.0]
    t = 1.0
    k = 0
    while True:
        t *= x3 / ((3 * k + 1) * (3 * k + 3))
        gp_terms.append(t)
        k += 1
        if abs(t) < 1e-18:
            break
    c1, c2 = _AI0, -_AIP0
    f, g = math.fsum(f_terms), math.fsum(g_terms)
    fp, gp = math.fsum(fp_terms), math.fsum(gp_terms)
    ai = c1 * f - c2 * g
    aip = c1 * fp - c2 * gp
    mag = c1 * sum(map(abs, f_terms)) + c2 * sum(map(abs, g_terms))
    return ai, aip, mag


@lru_cache(maxsize=1)
def _airy_u_coeffs() -> tuple[tuple[float, ...], tuple[float, ...]]:
    u = [1.0]
    v = [1.0]
    for k in range(1, 40):
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        u.append(uk)
        v.append(-(6 * k + 1) / (6 * k - 1) * uk)
    return tuple(u), tuple(v)


def _asym_sum(coeffs, zeta_inv: float, sign: float) -> float:
    """Sum c_k (sign*zeta_inv)^k stopping at the smallest term."""
    total = 0.0
    p = 1.0
    last = math.inf
    for c in coeffs:
        term = c * p
        if abs(term) > last:
            break
        total += term
        last = abs(term)
        if last < 1e-17 * abs(total):
            break
        p *= sign * zeta_inv
    return total


def _airy_asymp_pos(x: float) -> tuple[float, float]:
    u, v = _airy_u_coeffs()
    zeta = 2.0 / 3.0 * x ** 1.5
    e = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    su = _asym_sum(u, 1.0 / zeta, -1.0)
    sv = _asym_sum(v, 1.0 / zeta, -1.0)
    return e * x ** -0.25 * su, -e * x ** 0.25 * sv


def _airy_asymp_neg(x: float) -> tuple[float, float]:
    z = -x
    u, v = _airy_u_coeffs()
    zeta = 2.0 / 3.0 * z ** 1.5
    zi2 = -1.0 / (zeta * zeta)
    even_u = _asym_sum(u[0::2], zi2, 1.0)
    odd_u = _asym_sum(u[1::2], zi2, 1.0) / zeta
    even_v = _asym_sum(v[0::2], zi2, 1.0)
    odd_v = _asym_sum(v[1::2], zi2, 1.0) / zeta
    phase = zeta - math.pi / 4.0
    c, s = math.cos(phase), math.sin(phase)
    rp = 1.0 / math.sqrt(math.pi)
    ai = rp * z ** -0.25 * (c * even_u + s * odd_u)
    aip = rp * z ** 0.25 * (s * even_v - c * odd_v)
    return ai, aip


def _airy_taylor(x0: float, y0: float, yp0: float, h: float) -> tuple[float, float]:
    """Advance y'' = x y from x0 by h with a Taylor series about x0."""
    # a_{k+2} = (x0 a_k + a_{k-1}) / ((k+2)(k+1))
    a_km1, a_k, a_kp1 = 0.0, y0, yp0
    ys = [y0, yp0 * h]
    dys = [yp0]
    hp = h
    k = 0
    while k < 200:
        a_kp2 = (x0 * a_k + a_km1) / ((k + 2) * (k + 1))
        hp *= h
        ys.append(a_kp2 * hp)
        dys.append((k + 2) * a_kp2 * hp / h)
        a_km1, a_k, a_kp1 = a_k, a_kp1, a_kp2
        k += 1
        if k > 6 and abs(ys[-1]) + abs(ys[-2]) < 1e-19 * (abs(ys[0]) + abs(ys[1]) + 1e-300):
            break
    return math.fsum(ys), math.fsum(dys)


@lru_cache(maxsize=1)
def _airy_anchors() -> dict[int, tuple[float, float]]:
    """Ai, Ai' on the grid x = j * _AIRY_STEP for 2 < |x| <= 8 (plus the edges)."""
    table: dict[int, tuple[float, float]] = {}
    nmax = int(round(_AIRY_ASYMP_MIN / _AIRY_STEP))
    nmin = int(round(_AIRY_SERIES_MAX / _AIRY_STEP))
    # positive side: backward from the asymptotic region (recessive solution is stable)
    y, yp = _airy_asymp_pos(_AIRY_ASYMP_MIN)
    table[nmax] = (y, yp)
    for j in range(nmax, nmin - 2, -1):
        y, yp = _airy_taylor(j * _AIRY_STEP, y, yp, -_AIRY_STEP)
        table[j - 1] = (y, yp)
    # negative side: forward from the Maclaurin region
    y, yp, _ = _airy_maclaurin(-_AIRY_SERIES_MAX)
    table[-nmin] = (y, yp)
    for j in range(-nmin, -nmax - 2, -1):
        y, yp = _airy_taylor(j * _AIRY_STEP, y, yp, -_AIRY_STEP)
        table[j - 1] = (y, yp)
    return table


def airy_ai_pair(x: float) -> tuple[float, float]:
    """Return ``(Ai(x), Ai'(x))``."""
    x = float(x)
    if x < -_AIRY_MAX_NEG:
        raise OverflowGuardError("airy_ai supports x >= -50 only")
    if abs(x) <= _AIRY_SERIES_MAX:
        ai, aip, _ = _airy_maclaurin(x)
        return ai, aip
    if x > _AIRY_ASYMP_MIN:
        return _airy_asymp_pos(x)
    if x < -_AIRY_ASYMP_MIN:
        return _airy_asymp_neg(x)
    j = int(round(x / _AIRY_STEP))
    x0 = j * _AIRY_STEP
    y0, yp0 = _airy_anchors()[j]
    if x == x0:
        return y0, yp0
    return _airy_taylor(x0, y0, yp0, x - x0)


def _airy_err(x: float, value: float) -> float:
    if x < -_AIRY_ASYMP_MIN:
        # phase error grows with zeta
        return 16 * EPS * (1.0 + (-x) ** 1.5)
    return 64 * EPS * max(abs(value), 1e-300) + (1e-300 if x > 0 else 16 * EPS)


def airy_ai(x: float) -> FnEvalResult:
    """Airy function Ai(x) for x >= -50."""
    ai, _ = airy_ai_pair(x)
    return FnEvalResult(ai, _airy_err(float(x), ai), 0, True, abs(ai))


def airy_ai_deriv(x: float) -> FnEvalResult:
    """Derivative Ai'(x) for x >= -50."""
    _, aip = airy_ai_pair(x)
    return FnEvalResult(aip, _airy_err(float(x), aip), 0, True, abs(aip))


# ---------------------------------------------------------------------------
# Hypergeometric functions
# ---------------------------------------------------------------------------

def _series(coef_ratio, z, first=1.0, budget=TERM_BUDGET, max_terms=None):
    """Sum t_0 = first, t_{k+1} = t_k * coef_ratio(k) * z.  Works for complex numbers."""
    terms = [first]
    t = first
    running = first
    k = 0
    converged = False
    limit = budget if max_terms is None else max_terms
    while k < limit:
        t = t * coef_ratio(k) * z
        terms.append(t)
        running += t
        k += 1
        if t == 0:
            converged = True
            break
        if abs(t) <= DEFAULT_TOL * abs(running) and abs(coef_ratio(k) * z) < 0.9:
            converged = True
            break
    if max_terms is not None and k == max_terms:
        converged = True
    if any(isinstance(v, complex) for v in terms):
        val = complex(math.fsum(complex(v).real for v in terms),
                      math.fsum(complex(v).imag for v in terms))
    else:
        val = math.fsum(terms)
    mag = sum(abs(v) for v in terms)
    return val, mag, len(terms), converged


def kummer_1f1(a: float, c: float, x: float) -> FnEvalResult:
    """Confluent hypergeometric function 1F1(a; c; x)."""
    a, c, x = float(a), float(c), float(x)
    if _is_nonpos_int(c):
        raise PoleError(f"1F1 has a pole at c = {c:g}")
    if a == 0.0 or x == 0.0:
        return FnEvalResult(1.0, 0.0, 1, True, 1.0)
    terminating = _is_nonpos_int(a)
    if x < 0 and not terminating:
        # Kummer transformation: M(a, c, x) = e^x M(c - a, c, -x)
        inner = kummer_1f1(c - a, c, -x)
        ex = math.exp(x)
        return FnEvalResult(ex * inner.value, ex * inner.abs_err_estimate, inner.terms_used,
                            inner.converged, ex * inner.magnitude)
    max_terms = int(-a) if terminating else None
    val, mag, n, conv = _series(lambda k: (a + k) / ((c + k) * (k + 1)), x, max_terms=max_terms)
    if not conv:
        raise ConvergenceError(f"1F1({a}, {c}, {x}) did not converge in {TERM_BUDGET} terms")
    return FnEvalResult(val, 4 * EPS * mag * (1 + 0.01 * n), n, True, mag)


def _gauss_sum_at_one(a, b, c, cplx=False):
    if cplx:
        return cgamma(c) * cgamma(c - a - b) * _crgamma(c - a) * _crgamma(c - b)
    return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)


def _hyp2f1_core(a, b, c, z, cplx):
    """Shared 2F1 evaluation for real z in [0, 1]; parameters may be complex if cplx."""
    if z == 0.0:
        return 1.0, 0.0, 1, 1.0
    term_a = (not cplx) and _is_nonpos_int(a)
    term_b = (not cplx) and _is_nonpos_int(b)
    if term_a or term_b:
        m = int(-a) if term_a else int(-b)
        if term_a and term_b:
            m = min(int(-a), int(-b))
        val, mag, n, _ = _series(lambda k: (a + k) * (b + k) / ((c + k) * (k + 1)), z, max_terms=m)
        return val, 8 * EPS * mag, n, mag
    s = c - a - b
    if z == 1.0:
        if (s.real if cplx else s) <= 0:
            raise DivergenceError("2F1 diverges at z = 1 when c - a - b <= 0")
        val = _gauss_sum_at_one(a, b, c, cplx)
        return val, 32 * EPS * abs(val), 0, abs(val)
    s_is_int = (not cplx or s.imag == 0.0) and (complex(s).real == round(complex(s).real))
    if z <= 0.5 or s_is_int:
        val, mag, n, conv = _series(lambda k: (a + k) * (b + k) / ((c + k) * (k + 1)), z)
        if not conv:
            raise ConvergenceError(f"2F1 series did not converge at z = {z}")
        return val, 8 * EPS * mag * (1 + 0.01 * n), n, mag
    # connection formula to 1 - z
    w = 1.0 - z
    if cplx:
        g = cgamma
        rg = _crgamma
    else:
        g = gamma
        rg = rgamma
    f1, m1, n1, _ = _series(lambda k: (a + k) * (b + k) / ((a + b - c + 1 + k) * (k + 1)), w)
    f2, m2, n2, _ = _series(lambda k: (c - a + k) * (c - b + k) / ((s + 1 + k) * (k + 1)), w)
    c1 = g(c) * g(s) * rg(c - a) * rg(c - b)
    c2 = g(c) * g(-s) * rg(a) * rg(b)
    wpow = cmath.exp(s * math.log(w)) if cplx else w ** s
    val = c1 * f1 + c2 * wpow * f2
    mag = abs(c1) * m1 + abs(c2 * wpow) * m2
    return val, 64 * EPS * mag, n1 + n2, mag


def gauss_2f1(a: float, b: float, c: float, z: float) -> FnEvalResult:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real parameters and z in [0, 1]."""
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpos_int(c):
        raise PoleError(f"2F1 has a pole at c = {c:g}")
    if not 0.0 <= z <= 1.0:
        raise SpecialFunctionError("gauss_2f1 supports z in [0, 1]")
    val, err, n, mag = _hyp2f1_core(a, b, c, z, cplx=False)
    return FnEvalResult(val, err, n, True, mag)


def hyp2f1_complex(a: complex, b: complex, c: complex, z: float, with_magnitude: bool = False):
    """2F1 with complex parameters and real z in [0, 1).  Used for Woods-Saxon states.

    With ``with_magnitude`` the sum of absolute term sizes is returned too.
    """
    z = float(z)
    if not 0.0 <= z < 1.0:
        raise SpecialFunctionError("hyp2f1_complex supports z in [0, 1)")
    val, _, _, mag = _hyp2f1_core(complex(a), complex(b), complex(c), z, cplx=True)
    if with_magnitude:
        return complex(val), float(mag)
    return complex(val)
