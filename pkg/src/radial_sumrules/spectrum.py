"""Bound-state energies.

Closed forms (Coulomb, oscillator, valence electron, singular oscillator),
root finding on transcendental eigenvalue conditions (Airy zeros, Bessel
order, Hulthen / Morse / Woods-Saxon hypergeometric conditions) and a Numerov
shooting solver on a logarithmic grid that serves every catalog entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np
from numba import njit
from scipy.optimize import brentq

from . import specfun as sf
from .potentials import NATURAL, PotentialSpec, Units, origin_exponent

__all__ = [
    "BoundState",
    "NumerovSolution",
    "RadialGrid",
    "SpectrumError",
    "NoBoundStateError",
    "BracketError",
    "GridTooCoarseError",
    "NodeCountMismatchError",
    "coulomb_energy",
    "oscillator_energy",
    "airy_zero",
    "linear_energy",
    "exponential_order",
    "exponential_energy",
    "valence_electron_energy",
    "singular_oscillator_energy",
    "hulthen_parameters",
    "morse_parameters",
    "woods_saxon_parameters",
    "woods_saxon_u",
    "hypergeometric_energy",
    "closed_form_state",
    "numerov_solve",
    "bound_state",
]


class SpectrumError(RuntimeError):
    pass


class NoBoundStateError(SpectrumError):
    pass


class BracketError(SpectrumError):
    pass


class GridTooCoarseError(SpectrumError):
    pass


class NodeCountMismatchError(SpectrumError):
    pass


@dataclass(frozen=True)
class NumerovSolution:
    """Numerov eigenfunction on x = ln r, stored as y = u / sqrt(r)."""

    x: np.ndarray
    y: np.ndarray
    h: float
    matching_index: int

    @property
    def r(self) -> np.ndarray:
        return np.exp(self.x)


@dataclass(frozen=True)
class BoundState:
    potential: PotentialSpec
    n_r: int
    l: int
    P: float
    energy: float
    method: str  # closed_form | root_find | numerov
    params: Mapping[str, float] = field(default_factory=dict)
    condition_residual: float = 0.0
    numeric: NumerovSolution | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    @property
    def units(self) -> Units:
        return self.potential.units

    def label(self) -> str:
        return f"n_r={self.n_r},l={self.l}"


@dataclass(frozen=True)
class RadialGrid:
    """Log-uniform grid r_min .. r_max with step h in ln r."""

    r_min: float
    r_max: float
    h: float = 0.002

    def x(self) -> np.ndarray:
        n = int(math.ceil(math.log(self.r_max / self.r_min) / self.h)) + 1
        return math.log(self.r_min) + self.h * np.arange(n)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def coulomb_energy(n: int, e2: float = 1.0, units: Units = NATURAL) -> float:
    """Balmer formula E = -m e^4 / (2 hbar^2 n^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return -units.m * e2**2 / (2.0 * units.hbar**2 * n**2)


def oscillator_energy(n_r: int, l: int, V0: float, units: Units = NATURAL) -> float:
    """V = V0 r^2: E = hbar omega (2 n_r + l + 3/2) with omega = sqrt(2 V0/m)."""
    omega = math.sqrt(2.0 * V0 / units.m)
    return units.hbar * omega * (2 * n_r + l + 1.5)


@lru_cache(maxsize=64)
def airy_zero(j: int) -> float:
    """Magnitude of the j-th zero of Ai(-x) (j >= 1), by bracketing and bisection."""
    if j < 1:
        raise ValueError("zeros are numbered from 1")
    step = 0.05
    found = 0
    x0 = 0.0
    f0 = sf.airy_ai(-x0).value
    while x0 < 49.0:
        x1 = x0 + step
        f1 = sf.airy_ai(-x1).value
        if f0 * f1 < 0:
            found += 1
            if found == j:
                return brentq(lambda t: sf.airy_ai(-t).value, x0, x1, xtol=1e-15, rtol=1e-15)
        x0, f0 = x1, f1
    raise BracketError(f"Airy zero {j} not bracketed within |x| < 49")


def linear_energy(n_r: int, V0: float, units: Units = NATURAL) -> float:
    """S-states of V = V0 r: E = (V0^2 hbar^2 / 2m)^(1/3) alpha_{n_r+1}."""
    return (V0**2 * units.hbar**2 / (2.0 * units.m)) ** (1.0 / 3.0) * airy_zero(n_r + 1)


def _scan_roots(f, grid, want: int):
    """First ``want`` roots of f along ``grid`` (in grid order)."""
    roots = []
    vals = [f(t) for t in grid[:1]]
    t_prev, f_prev = grid[0], vals[0]
    for t in grid[1:]:
        ft = f(t)
        if f_prev == 0.0:
            roots.append(t_prev)
        elif f_prev * ft < 0:
            a, b = (t_prev, t) if t_prev < t else (t, t_prev)
            roots.append(brentq(f, a, b, xtol=1e-15, rtol=1e-15, maxiter=200))
        if len(roots) >= want:
            break
        t_prev, f_prev = t, ft
    return roots


def exponential_order(n_r: int, V0: float, a: float, units: Units = NATURAL) -> tuple[float, float]:
    """Return ``(p, lam)`` with J_p(lam) = 0, lam = sqrt(8 m V0 a^2)/hbar.

    Roots are counted downward in p from lam; the (n_r+1)-th is returned.
    """
    lam = math.sqrt(8.0 * units.m * V0 * a * a) / units.hbar
    grid = np.linspace(lam, 1e-12, max(400, int(200 * lam)))
    roots = _scan_roots(lambda p: sf.bessel_j(p, lam).value, grid, n_r + 1)
    if len(roots) <= n_r:
        raise NoBoundStateError(
            f"exponential well (V0={V0}, a={a}) has {len(roots)} s-state(s); n_r={n_r} requested"
        )
    return roots[n_r], lam


def exponential_energy(n_r: int, V0: float, a: float, units: Units = NATURAL) -> float:
    p, _ = exponential_order(n_r, V0, a, units)
    return -units.hbar**2 * p * p / (8.0 * units.m * a * a)


def valence_electron_energy(n_r: int, alpha: float, P: float, units: Units = NATURAL) -> float:
    """E = -m alpha^2 / (2 hbar^2 (n_r + P + 1/2)^2), standard branch."""
    return -units.m * alpha**2 / (2.0 * units.hbar**2 * (n_r + P + 0.5) ** 2)


def singular_oscillator_energy(n: int, g: float, P: float, units: Units = NATURAL) -> float:
    """V = -V0/r^2 + g r^2: E = hbar sqrt(g/2m) (4n + 2P + 2)."""
    return units.hbar * math.sqrt(g / (2.0 * units.m)) * (4 * n + 2 * P + 2)


# ---------------------------------------------------------------------------
# hypergeometric eigenvalue conditions
# ---------------------------------------------------------------------------

def hulthen_parameters(spec: PotentialSpec, eps: float) -> dict:
    """alpha, beta, gamma of the Hulthen solution for energy parameter eps = eta a."""
    un = spec.units
    a = spec.params["a"]
    lam2 = un.k2m * a * a * spec.params["V0"]
    root = math.sqrt(eps * eps + lam2)
    return {"eps": eps, "lam2": lam2, "alpha": eps + root, "beta": eps - root,
            "gamma": 2.0 * eps + 1.0, "a": a}


def _hulthen_condition(spec, eps):
    q = hulthen_parameters(spec, eps)
    return sf.gauss_2f1(q["alpha"], q["beta"], q["gamma"], 1.0)


def morse_parameters(spec: PotentialSpec, beta: float) -> dict:
    un = spec.units
    D, al, r0 = spec.params["D"], spec.params["alpha"], spec.params["r0"]
    gam = math.sqrt(un.k2m * D) * r0
    c = 2.0 * beta / al + 1.0
    return {"beta": beta, "gamma": gam, "alpha": al, "r0": r0, "c": c,
            "a": 0.5 * c - gam / al, "y0": 2.0 * gam / al * math.exp(al)}


def _morse_condition(spec, beta):
    q = morse_parameters(spec, beta)
    return sf.kummer_1f1(q["a"], q["c"], q["y0"])


def woods_saxon_parameters(spec: PotentialSpec, beta: float) -> dict:
    un = spec.units
    V0, R, a = spec.params["V0"], spec.params["R"], spec.params["a"]
    gam2 = un.k2m * V0 * a * a
    mu = complex(0.0, math.sqrt(max(gam2 - beta * beta, 0.0))) if beta * beta < gam2 else complex(
        math.sqrt(beta * beta - gam2), 0.0)
    # y0 = 1/(1 + exp(-R/a)); keep 1 - y0 separately to avoid cancellation
    e = math.exp(-R / a)
    return {"beta": beta, "nu": beta, "mu": mu, "gamma2": gam2, "a": a, "R": R,
            "y0": 1.0 / (1.0 + e), "one_minus_y0": e / (1.0 + e)}


def woods_saxon_u(q: dict, y: float, one_minus_y: float | None = None) -> tuple[float, float]:
    """Unnormalised u = Re[y^nu (1-y)^mu F(mu+nu, mu+nu+1; 2nu+1; y)] and a magnitude scale."""
    nu, mu = q["nu"], q["mu"]
    w = (1.0 - y) if one_minus_y is None else one_minus_y
    F, mag = sf.hyp2f1_complex(mu + nu, mu + nu + 1.0, 2.0 * nu + 1.0, y, with_magnitude=True)
    pref = y**nu * np.exp(mu * math.log(w)) if w > 0 else 0.0
    return float((pref * F).real), y**nu * mag


def _ws_condition(spec, beta):
    q = woods_saxon_parameters(spec, beta)
    val, mag = woods_saxon_u(q, q["y0"], q["one_minus_y0"])
    return val, mag


def hypergeometric_energy(spec: PotentialSpec, n_r: int) -> float:
    """Energy of the n_r-th s-state of the Hulthen, Morse or Woods-Saxon potential."""
    return _hypergeometric_state(spec, n_r).energy


def _hypergeometric_state(spec: PotentialSpec, n_r: int) -> BoundState:
    un = spec.units
    pid = spec.id
    if pid == "hulthen":
        a = spec.params["a"]
        lam2 = un.k2m * a * a * spec.params["V0"]
        top = lam2 / 2.0
        grid = np.geomspace(top, top * 1e-9, 4000)
        roots = _scan_roots(lambda e: _hulthen_condition(spec, e).value, grid, n_r + 1)
        if len(roots) <= n_r:
            raise NoBoundStateError(f"{spec.describe()} has {len(roots)} s-state(s); n_r={n_r} requested")
        eps = roots[n_r]
        cond = _hulthen_condition(spec, eps)
        q = hulthen_parameters(spec, eps)
        energy = -un.hb2m * eps * eps / (a * a)
        res = abs(cond.value) / max(cond.magnitude, 1.0)
        return BoundState(spec, n_r, 0, 0.5, energy, "root_find", q, res)
    if pid == "morse":
        q0 = morse_parameters(spec, 1.0)
        gam, r0 = q0["gamma"], q0["r0"]
        grid = np.linspace(gam, gam * 1e-9, 3000)

        def f(b):
            c = _morse_condition(spec, b)
            return c.value / c.magnitude

        roots = _scan_roots(f, grid, n_r + 1)
        if len(roots) <= n_r:
            raise NoBoundStateError(f"{spec.describe()} has {len(roots)} s-state(s); n_r={n_r} requested")
        beta = roots[n_r]
        cond = _morse_condition(spec, beta)
        energy = -un.hb2m * beta * beta / (r0 * r0)
        return BoundState(spec, n_r, 0, 0.5, energy, "root_find", morse_parameters(spec, beta),
                          abs(cond.value) / cond.magnitude)
    if pid == "woods_saxon":
        a = spec.params["a"]
        gam = math.sqrt(un.k2m * spec.params["V0"]) * a
        grid = np.linspace(gam * (1 - 1e-9), gam * 1e-9, 3000)

        def f(b):
            val, mag = _ws_condition(spec, b)
            return val / mag

        roots = _scan_roots(f, grid, n_r + 1)
        if len(roots) <= n_r:
            raise NoBoundStateError(f"{spec.describe()} has {len(roots)} s-state(s); n_r={n_r} requested")
        beta = roots[n_r]
        val, mag = _ws_condition(spec, beta)
        energy = -un.hb2m * beta * beta / (a * a)
        return BoundState(spec, n_r, 0, 0.5, energy, "root_find", woods_saxon_parameters(spec, beta),
                          abs(val) / mag)
    raise ValueError(f"no hypergeometric eigenvalue condition for {pid}")


def closed_form_state(spec: PotentialSpec, n_r: int, l: int) -> BoundState:
    """Energy from the closed form or eigenvalue condition appropriate to the potential."""
    if n_r < 0 or l < 0:
        raise ValueError("quantum numbers must be non-negative")
    if not spec.has_analytic(l):
        raise SpectrumError(f"no closed-form spectrum for {spec.describe()} at l={l}")
    un = spec.units
    p = spec.params
    P = origin_exponent(spec, l)
    pid = spec.id
    if pid == "coulomb":
        n = n_r + l + 1
        return BoundState(spec, n_r, l, P, coulomb_energy(n, p["e2"], un), "closed_form", {"n": n})
    if pid == "oscillator":
        return BoundState(spec, n_r, l, P, oscillator_energy(n_r, l, p["V0"], un), "closed_form")
    if pid == "valence_electron":
        return BoundState(spec, n_r, l, P, valence_electron_energy(n_r, p["alpha"], P, un), "closed_form")
    if pid == "singular_oscillator":
        return BoundState(spec, n_r, l, P, singular_oscillator_energy(n_r, p["g"], P, un), "closed_form")
    if pid == "linear":
        alpha = airy_zero(n_r + 1)
        res = abs(sf.airy_ai(-alpha).value)
        return BoundState(spec, n_r, l, P, linear_energy(n_r, p["V0"], un), "root_find",
                          {"airy_zero": alpha}, res)
    if pid == "exponential":
        order, lam = exponential_order(n_r, p["V0"], p["a"], un)
        res = abs(sf.bessel_j(order, lam).value)
        energy = -un.hbar**2 * order**2 / (8.0 * un.m * p["a"] ** 2)
        return BoundState(spec, n_r, l, P, energy, "root_find", {"p": order, "lam": lam, "a": p["a"]}, res)
    return _hypergeometric_state(spec, n_r)


# ---------------------------------------------------------------------------
# Numerov shooting on x = ln r, u = sqrt(r) y, y'' = g(x) y
# ---------------------------------------------------------------------------

@njit(cache=True)
def _numerov_march(f, y0, y1, fcap):
    """March the Numerov recurrence forward; f = h^2 g / 12.

    Stops where f exceeds ``fcap`` (deep in a forbidden region the recurrence
    is no longer stable); the rest of the array is zero, which amounts to a
    Dirichlet wall there.  Returns (y, nodes).
    """
    n = f.size
    y = np.zeros(n)
    y[0] = y0
    y[1] = y1
    nodes = 0
    for i in range(1, n - 1):
        if f[i + 1] > fcap:
            break
        y[i + 1] = ((2.0 + 10.0 * f[i]) * y[i] - (1.0 - f[i - 1]) * y[i - 1]) / (1.0 - f[i + 1])
        if y[i + 1] == 0.0 or (y[i + 1] < 0.0) != (y[i] < 0.0):
            nodes += 1
        if abs(y[i + 1]) > 1e150:
            for j in range(i + 2):
                y[j] *= 1e-150
    return y, nodes


_FCAP = 0.3


class _Shooter:
    def __init__(self, spec: PotentialSpec, l: int, P: float, x: np.ndarray):
        self.spec = spec
        self.P = P
        self.x = x
        self.h = float(x[1] - x[0])
        self.r = np.exp(x)
        self.r2 = self.r**2
        self.k2m = spec.units.k2m
        self.U = spec.u(self.r)
        un = spec.units
        c1 = un.m * spec.coulomb_tail / (un.hbar**2 * (P + 0.5))
        r0 = self.r[0]
        self.start = (1.0 + c1 * self.r[0], (self.r[1] / r0) ** P * (1.0 + c1 * self.r[1]))

    def g(self, E: float) -> np.ndarray:
        return self.k2m * self.r2 * (self.U - E) + self.P**2

    def f(self, E: float) -> np.ndarray:
        return self.h * self.h / 12.0 * self.g(E)

    def count(self, E: float) -> int:
        _, nodes = _numerov_march(self.f(E), *self.start, _FCAP)
        return nodes

    def outward(self, E: float) -> np.ndarray:
        return _numerov_march(self.f(E), *self.start, _FCAP)[0]

    def inward(self, E: float) -> np.ndarray:
        f = self.f(E)[::-1].copy()
        y, _ = _numerov_march(f, 0.0, 1e-30, _FCAP)
        return y[::-1]

    def matching_index(self, E: float) -> int:
        g = self.g(E)
        allowed = np.nonzero(g < 0)[0]
        n = g.size
        im = int(allowed[-1]) if allowed.size else n // 2
        return min(max(im, 10), n - 10)

    def mismatch(self, E: float, im: int) -> float:
        yo = self.outward(E)
        yi = self.inward(E)
        return (yo[im + 1] - yo[im - 1]) / yo[im] - (yi[im + 1] - yi[im - 1]) / yi[im]


def _energy_floor(sh: _Shooter) -> float:
    # with E below min(U + P^2/(k2m r^2)) the log-form g is positive everywhere: no nodes
    return float(np.min(sh.U + sh.P**2 / (sh.k2m * sh.r2)))


def _bisect_level(sh: _Shooter, n_r: int, rel: float, threshold: float) -> tuple[float, float]:
    """Bracket [E_a, E_b] with count(E_a) <= n_r < count(E_b)."""
    lo = _energy_floor(sh)
    lo -= 1e-3 * max(1.0, abs(lo))
    if math.isinf(threshold):
        step = max(1.0, abs(lo))
        hi = lo + step
        while sh.count(hi) < n_r + 1:
            step *= 2.0
            hi = lo + step
            if step > 1e12:
                raise BracketError("could not bracket a confined level")
    else:
        hi = threshold - 1e-14 * max(1.0, abs(lo))
        if sh.count(hi) < n_r + 1:
            raise NoBoundStateError(
                f"{sh.spec.describe()}: fewer than {n_r + 1} bound states at l with P={sh.P:.6g}"
            )
    for _ in range(200):
        if hi - lo <= rel * max(1e-3, abs(lo), abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if sh.count(mid) >= n_r + 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


def _wkb_r_max(spec: PotentialSpec, P: float, E: float, r_start: float, target: float = 30.0) -> float:
    """Radius beyond the outer turning point where the WKB decay exponent reaches ``target``."""
    un = spec.units
    L = spec.length_scale
    rs = np.geomspace(r_start, 1e5 * L, 20000)
    ueff = spec.u(rs) + un.hb2m * (P * P - 0.25) / rs**2
    allowed = np.nonzero(ueff < E)[0]
    if allowed.size == 0:
        return 40.0 * L
    it = int(allowed[-1])
    kappa = np.sqrt(np.maximum(un.k2m * (ueff[it:] - E), 0.0))
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (kappa[1:] + kappa[:-1]) * np.diff(rs[it:]))])
    past = np.nonzero(cum >= target)[0]
    if past.size == 0:
        raise GridTooCoarseError("state too close to threshold: WKB tail does not decay within 1e5 lengths")
    return float(rs[it + int(past[0])])


def numerov_solve(spec: PotentialSpec, l: int, n_r: int, grid: RadialGrid | None = None) -> BoundState:
    """Find the n_r-th level at angular momentum l by Numerov shooting.

    Integration runs on x = ln r with u = sqrt(r) y, starting from the origin
    power law y ~ r^P (1 + c r).  Levels are bracketed by Sturm node counting
    and refined by the outward/inward log-derivative mismatch at the outer
    turning point.
    """
    if n_r < 0 or l < 0:
        raise ValueError("quantum numbers must be non-negative")
    P = origin_exponent(spec, l)
    L = spec.length_scale
    threshold = spec.threshold
    if grid is None:
        r_min = 1e-6 * L
        r_max = 30.0 * L * (n_r + l + 1)
        for _ in range(12):
            coarse = _Shooter(spec, l, P, RadialGrid(r_min, r_max, 0.01).x())
            try:
                lo, hi = _bisect_level(coarse, n_r, 1e-5, threshold)
            except NoBoundStateError:
                # a weakly bound level may not fit in the box yet
                if math.isinf(threshold) or r_max > 2e3 * L:
                    raise
                r_max *= 4.0
                continue
            want = _wkb_r_max(spec, P, hi, r_min)
            if want <= r_max * 1.05:
                break
            r_max = want * 1.2
        grid = RadialGrid(r_min, max(want, 4.0 * L), 0.002)
    x = grid.x()
    sh = _Shooter(spec, l, P, x)
    lo, hi = _bisect_level(sh, n_r, 1e-7, threshold)
    g = sh.g(hi)
    if grid.h * math.sqrt(max(-float(np.min(g)), 0.0)) > 2.0 * math.pi / 16.0:
        raise GridTooCoarseError(f"fewer than 16 grid points per local wavelength (h={grid.h})")
    if float(np.max(sh.f(hi))) > _FCAP:
        raise GridTooCoarseError("Numerov step too large at r_max for this level")
    im = sh.matching_index(0.5 * (lo + hi))
    try:
        flo, fhi = sh.mismatch(lo, im), sh.mismatch(hi, im)
        if flo * fhi < 0:
            E = brentq(lambda e: sh.mismatch(e, im), lo, hi, xtol=1e-14, rtol=1e-15, maxiter=200)
        else:
            raise ValueError
    except (ValueError, ZeroDivisionError):
        # fall back to pure Sturm bisection
        for _ in range(200):
            if hi - lo <= 1e-14 * max(1.0, abs(hi)):
                break
            mid = 0.5 * (lo + hi)
            if sh.count(mid) >= n_r + 1:
                hi = mid
            else:
                lo = mid
        E = 0.5 * (lo + hi)
    yo = sh.outward(E)
    yi = sh.inward(E)
    y = np.concatenate([yo[: im + 1], yi[im + 1:] * (yo[im] / yi[im])])
    y /= np.max(np.abs(y))
    if y[0] < 0:
        y = -y
    big = np.abs(y) > 1e-8
    yb = y[big]
    nodes = int(np.count_nonzero(np.signbit(yb[1:]) != np.signbit(yb[:-1])))
    if nodes != n_r:
        raise NodeCountMismatchError(f"Numerov eigenfunction has {nodes} nodes, expected {n_r}")
    y.setflags(write=False)
    sol = NumerovSolution(x, y, grid.h, im)
    return BoundState(spec, n_r, l, P, float(E), "numerov", {"r_min": grid.r_min, "r_max": grid.r_max},
                      0.0, sol)


def bound_state(spec: PotentialSpec, n_r: int, l: int, method: str = "auto") -> BoundState:
    """Closed form when the catalog has one at this l, Numerov otherwise (or when asked)."""
    if method == "numerov" or (method == "auto" and not spec.has_analytic(l)):
        return numerov_solve(spec, l, n_r)
    return closed_form_state(spec, n_r, l)
