"""Expectation values <g(r)> over radial wavefunctions.

The integral runs on x = ln r with a composite Gauss-Legendre rule, so the
origin and the exponential tail are both handled by the change of variable.
Below ``r_lo`` (1e-8 length units) the integrand is taken as
``A r^q (1 + c r)``, fitted at ``r_lo`` and ``2 r_lo``, and added analytically;
beyond ``r_hi`` an exponential tail bound is added.  The error estimate is
the difference against a rule with twice as many panels plus those two
corrections' uncertainties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spectrum import BoundState
from .wavefunctions import RadialWavefunction

__all__ = [
    "QuadratureResult",
    "MomentRequest",
    "MomentError",
    "DivergentMomentError",
    "ToleranceNotMetError",
    "integrate_density",
    "expectation",
    "moment",
    "mean",
    "pasternak_invert",
    "valence_r2_moment",
]

TOL = 1e-9


class MomentError(ArithmeticError):
    pass


class DivergentMomentError(MomentError):
    """The integrand behaves like r^q with q <= -1 at the origin."""


class ToleranceNotMetError(MomentError):
    pass


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_err_estimate: float
    node_count: int
    converged: bool


@dataclass(frozen=True)
class MomentRequest:
    """``origin_power`` is the leading power of R^2 g r^2 at r -> 0."""

    wf: RadialWavefunction
    integrand: Callable[[np.ndarray], np.ndarray] | None
    origin_power: float

    @property
    def convergent(self) -> bool:
        return self.origin_power > -1.0


def integrate_density(wf: RadialWavefunction, g, origin_power: float) -> QuadratureResult:
    """Unnormalised integral of R_raw(r)^2 g(r) r^2 dr over (0, inf)."""
    if not origin_power > -1.0:
        raise DivergentMomentError(
            f"integrand ~ r^{origin_power:g} at the origin; not integrable (needs > -1)"
        )
    vals = []
    for level in (1, 2):
        r, wr, dens, r_lo = wf.quadrature_samples(level)
        f = dens if g is None else dens * g(r)
        vals.append(math.fsum(wr * f))
    # analytic origin segment: f ~ A r^q (1 + c r) fitted at r_lo and 2 r_lo
    q = origin_power
    pts = np.array([r_lo, 2.0 * r_lo])
    f_pts = wf.raw(pts) ** 2 * pts**2
    if g is not None:
        f_pts = f_pts * np.asarray(g(pts))
    s0, s1 = f_pts / pts**q
    A = 2.0 * s0 - s1
    cr = (s1 - s0) / A if A != 0.0 else 0.0  # c * r_lo
    origin = A * r_lo ** (q + 1.0) * (1.0 / (q + 1.0) + cr / (q + 2.0))
    drift = cr * cr if A != 0.0 else 1.0
    # exponential tail bound from the last two nodes
    f_end = f[-2:]
    if f_end[-1] != 0.0 and f_end[-2] != 0.0 and abs(f_end[-2]) > abs(f_end[-1]):
        kappa = math.log(abs(f_end[-2] / f_end[-1])) / (r[-1] - r[-2])
        tail = float(f_end[-1]) / kappa
    else:
        tail = float(f_end[-1]) * r[-1]
    value = vals[1] + origin + tail
    err = abs(vals[1] - vals[0]) + abs(tail) + abs(origin) * drift + 1e-15 * abs(value)
    return QuadratureResult(value, err, int(r.size), True)


def expectation(req: MomentRequest) -> QuadratureResult:
    """<g> = int R^2 g r^2 dr / int R^2 r^2 dr."""
    wf = req.wf
    raw = integrate_density(wf, req.integrand, req.origin_power)
    value = raw.value / wf.normalization
    err = raw.abs_err_estimate / wf.normalization
    if not err <= TOL * max(1.0, abs(value)):
        raise ToleranceNotMetError(f"quadrature error {err:.3g} exceeds {TOL:g} * max(1, |{value:.6g}|)")
    return QuadratureResult(value, err, raw.node_count, True)


def mean(wf: RadialWavefunction, g: Callable, g_power: float) -> QuadratureResult:
    """<g(r)> where g ~ r^g_power at the origin."""
    return expectation(MomentRequest(wf, g, 2.0 * wf.state.P + 1.0 + g_power))


def moment(wf: RadialWavefunction, s: float) -> QuadratureResult:
    """<r^s>."""
    return mean(wf, lambda r: r**s, s)


def pasternak_invert(wf: RadialWavefunction, p: float) -> float:
    """Predict <r^(-p-2)> from <r^p> for an oscillator state.

    <r^(-p-2)> = alpha^(p+1) Gamma(l + 1/2 - p/2) / Gamma(l + 3/2 + p/2) <r^p>,
    alpha = m omega / hbar.
    """
    st = wf.state
    spec = st.potential
    if spec.id != "oscillator":
        raise ValueError("Pasternak inversion applies to oscillator states")
    l = st.l
    # both moments must converge at the origin
    for s in (p, -p - 2.0):
        if not 2 * l + 2 + s > -1:
            raise DivergentMomentError(f"<r^{s:g}> diverges for l={l}")
    un = spec.units
    alpha = math.sqrt(2.0 * spec.params["V0"] * un.m) / un.hbar
    ratio = math.gamma(l + 0.5 - 0.5 * p) / math.gamma(l + 1.5 + 0.5 * p)
    return alpha ** (p + 1.0) * ratio * moment(wf, p).value


def valence_r2_moment(state: BoundState) -> float:
    """Closed form <1/r^2> = k^2 / (2P (2 n_r + 2P + 1)) with k = sqrt(-8 m E)/hbar."""
    if state.potential.id != "valence_electron":
        raise ValueError("closed form applies to the valence-electron potential")
    un = state.units
    k2 = -8.0 * un.m * state.energy / un.hbar**2
    P = state.P
    return k2 / (2.0 * P * (2 * state.n_r + 2.0 * P + 1.0))
