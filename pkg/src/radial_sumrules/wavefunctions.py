"""Radial wavefunctions and their behaviour at the origin.

A :class:`RadialWavefunction` wraps an *unnormalised* evaluator ``R(r)``
together with its normalisation integral.  Everything downstream divides by
that integral, so rescaling the evaluator leaves every physical quantity
unchanged.

Near the origin ``R(r) ~ c r**(P - 1/2)`` (``c r**l`` for regular
potentials).  :func:`origin_coefficient` reports ``c`` from the closed form
(when the state has one) and from a Richardson-extrapolated fit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import specfun as sf
from .spectrum import BoundState, woods_saxon_u

__all__ = [
    "RadialWavefunction",
    "OriginBehavior",
    "WavefunctionError",
    "UnsupportedFormError",
    "FitDivergenceError",
    "build",
    "build_analytic",
    "build_numeric",
    "origin_coefficient",
    "origin_derivative_coefficient",
    "dump_table",
]

# composite Gauss-Legendre on x = ln r
_GL_NODES = 16
_PANEL_DX = 0.2
_R_LO_FACTOR = 1e-8
_TAIL_REL = 1e-30


class WavefunctionError(RuntimeError):
    pass


class UnsupportedFormError(WavefunctionError):
    """No closed-form wavefunction for this potential / angular momentum."""


class FitDivergenceError(WavefunctionError):
    """The origin sequence R(r)/r^k does not settle to a finite non-zero limit."""


@dataclass(frozen=True)
class OriginBehavior:
    coeff: float
    exponent: float
    deriv_order: int
    provenance: str  # closed_form | origin_fit
    closed_form: float | None = None
    origin_fit: float | None = None

    @property
    def agreement(self) -> float | None:
        """Relative difference between the closed form and the fit, when both exist."""
        if self.closed_form is None or self.origin_fit is None:
            return None
        return abs(self.closed_form - self.origin_fit) / max(abs(self.closed_form), 1e-300)


@dataclass(frozen=True)
class RadialWavefunction:
    """R(r) = evaluator(r) / sqrt(normalization).

    ``closed_origin`` is the analytic limit of ``evaluator(r) / r**exponent``
    (before normalisation), or ``None`` for numeric states.
    """

    state: BoundState
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    normalization: float
    form: str  # analytic | numeric
    exponent: float
    r_hi: float
    closed_origin: float | None = None

    @property
    def potential(self):
        return self.state.potential

    @property
    def length(self) -> float:
        return self.state.potential.length_scale

    def raw(self, r) -> np.ndarray:
        return self.evaluator(np.atleast_1d(np.asarray(r, dtype=float)))

    def __call__(self, r):
        """Normalised R(r)."""
        out = self.raw(r) / math.sqrt(self.normalization)
        return float(out[0]) if np.ndim(r) == 0 else out

    def u(self, r):
        return np.asarray(r) * self(r)

    def rescaled(self, factor: float) -> "RadialWavefunction":
        """Same state with the unnormalised evaluator multiplied by ``factor``."""
        ev = self.evaluator
        closed = None if self.closed_origin is None else self.closed_origin * factor
        return RadialWavefunction(self.state, lambda r: factor * ev(r), self.normalization * factor**2,
                                  self.form, self.exponent, self.r_hi, closed)

    # -- quadrature samples, cached per instance -------------------------------

    def quadrature_samples(self, level: int):
        """(r, weights for dr, R_raw^2 r^2) on the composite rule; level 2 halves the panels."""
        cache = self.__dict__.setdefault("_samples", {})
        if level not in cache:
            r_lo = _R_LO_FACTOR * self.length
            x_lo, x_hi = math.log(r_lo), math.log(self.r_hi)
            n_pan = max(4, int(math.ceil((x_hi - x_lo) / _PANEL_DX))) * level
            t, w = np.polynomial.legendre.leggauss(_GL_NODES)
            edges = np.linspace(x_lo, x_hi, n_pan + 1)
            half = 0.5 * np.diff(edges)
            mid = 0.5 * (edges[1:] + edges[:-1])
            x = (mid[:, None] + half[:, None] * t[None, :]).ravel()
            wx = (half[:, None] * w[None, :]).ravel()
            r = np.exp(x)
            R = self.evaluator(r)
            cache[level] = (r, wx * r, R * R * r * r, r_lo)
        return cache[level]


def _fill(fn, r):
    return np.fromiter((fn(float(t)) for t in r), dtype=float, count=r.size)


def _support(raw_scalar, L: float) -> float:
    """Radius past which u^2 stays below _TAIL_REL of its sampled peak."""
    rs = np.geomspace(1e-2 * L, 1e5 * L, 700)
    u2 = np.array([(t * raw_scalar(t)) ** 2 for t in rs])
    peak = np.max(u2)
    above = np.nonzero(u2 > _TAIL_REL * peak)[0]
    return float(rs[min(int(above[-1]) + 1, rs.size - 1)])


def _analytic_pieces(state: BoundState):
    """(scalar evaluator, closed origin coefficient, exponent) for the state."""
    spec = state.potential
    un = spec.units
    p = spec.params
    l, n_r, P = state.l, state.n_r, state.P
    pid = spec.id
    if pid == "coulomb":
        n = n_r + l + 1
        a0 = un.hbar**2 / (un.m * p["e2"])
        k = 2.0 / (n * a0)
        N = k**1.5 * math.sqrt(math.factorial(n + l) / (2.0 * n * math.factorial(n - l - 1))) / math.factorial(2 * l + 1)

        def R(r):
            return N * k**l * r**l * math.exp(-0.5 * k * r) * sf.kummer_1f1(-n_r, 2 * l + 2, k * r).value

        return R, N * k**l, float(l)
    if pid == "oscillator":
        alpha = math.sqrt(2.0 * p["V0"] * un.m) / un.hbar
        N = math.sqrt(2.0 * alpha ** (l + 1.5) * math.gamma(n_r + l + 1.5)
                      / (math.factorial(n_r) * math.gamma(l + 1.5) ** 2))

        def R(r):
            return N * r**l * math.exp(-0.5 * alpha * r * r) * sf.kummer_1f1(-n_r, l + 1.5, alpha * r * r).value

        return R, N, float(l)
    if pid == "linear":
        kap = (un.k2m * p["V0"]) ** (1.0 / 3.0)
        az = state.params["airy_zero"]
        aip = sf.airy_ai_deriv(-az).value
        s = math.copysign(1.0, aip)
        N = math.sqrt(kap) / abs(aip)

        def R(r):
            return s * N * sf.airy_ai(kap * r - az).value / r

        return R, N * kap * abs(aip), 0.0
    if pid == "exponential":
        order, lam, a = state.params["p"], state.params["lam"], state.params["a"]
        c = -lam * sf.bessel_j_deriv(order, lam).value / (2.0 * a)
        s = math.copysign(1.0, c)

        def R(r):
            return s * sf.bessel_j(order, lam * math.exp(-r / (2.0 * a))).value / r

        return R, abs(c), 0.0
    if pid == "hulthen":
        q = state.params
        al, be, ga, a = q["alpha"], q["beta"], q["gamma"], q["a"]
        eta = q["eps"] / a
        # on shell beta = -(n+1), so F is a polynomial and F'(1) is a finite sum
        nb = round(-be)
        if nb >= 1 and abs(be + nb) < 1e-6:
            be = -float(nb)
            term, fp1 = 1.0, 0.0
            for k in range(nb):
                term *= (al + k) * (be + k) / ((ga + k) * (k + 1))
                fp1 += (k + 1) * term
        else:
            fp1 = al * be / ga * sf.gauss_2f1(al + 1, be + 1, ga + 1, 1.0).value
        c = -fp1 / a
        s = math.copysign(1.0, c)

        def R(r):
            return s * math.exp(-eta * r) * sf.gauss_2f1(al, be, ga, math.exp(-r / a)).value / r

        return R, abs(c), 0.0
    if pid == "morse":
        q = state.params
        al, be, r0, a, c_, y0 = q["alpha"], q["beta"], q["r0"], q["a"], q["c"], q["y0"]
        gam = q["gamma"]
        cc = -(al / r0) * y0 ** (be / al + 1) * math.exp(-0.5 * y0) * (a / c_) * sf.kummer_1f1(a + 1, c_ + 1, y0).value
        s = math.copysign(1.0, cc)

        def R(r):
            y = 2.0 * gam / al * math.exp(-al * (r - r0) / r0)
            return s * y ** (be / al) * math.exp(-0.5 * y) * sf.kummer_1f1(a, c_, y).value / r

        return R, abs(cc), 0.0
    if pid == "woods_saxon":
        q = state.params
        nu, mu, a, Rr = q["nu"], q["mu"], q["a"], q["R"]
        y0, w0 = q["y0"], q["one_minus_y0"]
        A, B, C = mu + nu, mu + nu + 1.0, 2.0 * nu + 1.0
        Fp = A * B / C * sf.hyp2f1_complex(A + 1.0, B + 1.0, C + 1.0, y0)
        cc = -(y0**nu * np.exp(mu * math.log(w0)) * Fp * y0 * w0 / a).real
        s = math.copysign(1.0, cc)

        def R(r):
            z = (r - Rr) / a
            if z > 0:
                e = math.exp(-z)
                y, w = e / (1.0 + e), 1.0 / (1.0 + e)
            else:
                e = math.exp(z)
                y, w = 1.0 / (1.0 + e), e / (1.0 + e)
            if y < 1e-300:
                return 0.0
            return s * woods_saxon_u(q, y, w)[0] / r

        return R, abs(cc), 0.0
    if pid == "valence_electron":
        k = math.sqrt(-4.0 * un.k2m * state.energy)
        C1 = math.sqrt(k**3 * math.gamma(n_r + 2 * P + 1)
                       / (math.factorial(n_r) * math.gamma(2 * P + 1) ** 2 * (2 * n_r + 2 * P + 1)))

        def R(r):
            rho = k * r
            return C1 * rho ** (P - 0.5) * math.exp(-0.5 * rho) * sf.kummer_1f1(-n_r, 1 + 2 * P, rho).value

        return R, C1 * k ** (P - 0.5), P - 0.5
    if pid == "singular_oscillator":
        eta = math.sqrt(un.k2m * p["g"])
        C = math.sqrt(2.0 * eta ** (P + 1) * math.gamma(n_r + P + 1)
                      / (math.factorial(n_r) * math.gamma(P + 1) ** 2))

        def R(r):
            t = eta * r * r
            return C * r ** (P - 0.5) * math.exp(-0.5 * t) * sf.kummer_1f1(-n_r, 1 + P, t).value

        return R, C, P - 0.5
    raise UnsupportedFormError(f"no analytic wavefunction for {spec.describe()} at l={l}")


def _normalize(wf_partial: RadialWavefunction) -> float:
    from .moments import integrate_density  # local import: moments depends on this module

    return integrate_density(wf_partial, None, 2.0 * wf_partial.state.P + 1.0).value


def build_analytic(state: BoundState) -> RadialWavefunction:
    """Closed-form wavefunction for a catalog state, normalised by quadrature."""
    spec = state.potential
    if spec.numeric_only or not spec.has_analytic(state.l):
        raise UnsupportedFormError(f"{spec.describe()} at l={state.l} has no closed-form wavefunction")
    R, closed, expo = _analytic_pieces(state)
    r_hi = _support(R, spec.length_scale)
    wf = RadialWavefunction(state, lambda r: _fill(R, r), 1.0, "analytic", expo, r_hi, closed)
    norm = _normalize(wf)
    return RadialWavefunction(state, wf.evaluator, norm, "analytic", expo, r_hi, closed)


def build_numeric(state: BoundState) -> RadialWavefunction:
    """Cubic-spline wavefunction from a Numerov solution (``state.method == 'numerov'``)."""
    sol = state.numeric
    if sol is None:
        raise WavefunctionError("state carries no Numerov solution")
    x, y = sol.x, sol.y
    spline = CubicSpline(x, y)
    P = state.P
    x0, x1 = float(x[0]), float(x[-1])
    y0 = float(y[0])

    def R(r):
        xr = np.log(r)
        out = np.empty_like(r)
        inside = (xr >= x0) & (xr <= x1)
        out[inside] = spline(xr[inside]) / np.sqrt(r[inside])
        lo = xr < x0
        out[lo] = y0 * np.exp(P * (xr[lo] - x0)) / np.sqrt(r[lo])
        out[xr > x1] = 0.0
        return out

    wf = RadialWavefunction(state, R, 1.0, "numeric", P - 0.5, float(np.exp(x1)), None)
    norm = _normalize(wf)
    return RadialWavefunction(state, R, norm, "numeric", P - 0.5, wf.r_hi, None)


def build(state: BoundState) -> RadialWavefunction:
    return build_numeric(state) if state.method == "numerov" else build_analytic(state)


def _richardson_limit(fn, r0: float, levels: int = 4, rel_tol: float = 1e-7, max_start: int = 8) -> float:
    """Limit of fn(r) as r -> 0 assuming fn = c0 + c1 r + c2 r^2 + ...; ratio-2 grids."""
    last_err = math.inf
    for shift in range(max_start):
        start = r0 * 2.0**-shift
        q = [fn(start * 2.0**-j) for j in range(levels + 1)]
        table = [q]
        for k in range(1, levels + 1):
            prev = table[-1]
            f = 2.0**k
            table.append([(f * prev[j + 1] - prev[j]) / (f - 1.0) for j in range(len(prev) - 1)])
        best = table[levels][0]
        before = table[levels - 1][1]
        scale = max(abs(v) for v in q)
        if scale == 0.0 or not math.isfinite(best):
            break
        if abs(best) < 1e-6 * scale:
            # the sequence heads to zero: the assumed power is too small
            break
        err = abs(best - before) / abs(best)
        if err < rel_tol:
            return best
        if err > last_err * 4 and shift > 2:
            break
        last_err = min(last_err, err)
    raise FitDivergenceError("R(r)/r^k does not settle to a non-zero limit; wrong exponent?")


def _fit_origin(wf: RadialWavefunction, exponent: float) -> float:
    L = wf.length
    norm = math.sqrt(wf.normalization)
    r0 = 1e-3 * L

    def q(r):
        return float(wf.raw(r)[0]) / norm / r**exponent

    return _richardson_limit(q, r0)


def origin_coefficient(wf: RadialWavefunction) -> OriginBehavior:
    """Leading coefficient of R near the origin (C1 for regular, a_st for soft-singular)."""
    closed = None if wf.closed_origin is None else wf.closed_origin / math.sqrt(wf.normalization)
    try:
        fit = _fit_origin(wf, wf.exponent)
    except FitDivergenceError:
        # a closed form whose small-r values sit on a cancellation floor can
        # still carry an exact slope; without one there is nothing to report
        if closed is None:
            raise
        fit = None
    coeff = closed if closed is not None else fit
    return OriginBehavior(coeff, wf.exponent, int(round(wf.exponent)) if wf.exponent == int(wf.exponent) else 0,
                          "closed_form" if closed is not None else "origin_fit", closed, fit)


def origin_derivative_coefficient(wf: RadialWavefunction, k: int) -> float:
    """R^{(k)}(0)/k!, i.e. the coefficient of r^k; requires the state's exponent to be k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if abs(wf.exponent - k) > 1e-12:
        # a wrong power either vanishes or blows up; let the fit report it
        return _fit_origin(wf, float(k))
    return origin_coefficient(wf).coeff


def dump_table(wf: RadialWavefunction, r) -> str:
    """CSV text with columns r, R(r), u(r)."""
    r = np.asarray(r, dtype=float)
    R = wf(r)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "R", "u"])
    for ri, Ri in zip(r, R):
        w.writerow([f"{ri:.17g}", f"{Ri:.17g}", f"{ri * Ri:.17g}"])
    return buf.getvalue()
