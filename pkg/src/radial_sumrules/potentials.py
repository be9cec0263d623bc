"""Catalog of central potentials.

Every potential is split as ``V(r) = -V0/r**2 + U(r)`` with ``U`` regular at
the origin (``r**2 U -> 0``).  For regular potentials ``V0 = 0`` and ``U = V``.
The sum-rule code works with ``U`` and the origin exponent

    P = sqrt((l + 1/2)**2 - 2 m V0 / hbar**2)

so that the inverse-square piece never has to be integrated on its own.

Units are carried by a :class:`Units` record; the default is hbar = m = 1.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

__all__ = [
    "Units",
    "NATURAL",
    "PotentialClass",
    "PotentialSpec",
    "PotentialError",
    "HardSingularError",
    "ConfigError",
    "CATALOG_IDS",
    "make",
    "v",
    "v_prime",
    "origin_exponent",
    "classify_numerically",
    "parse_config",
    "spec_from_config",
]


class PotentialError(ValueError):
    pass


class HardSingularError(PotentialError):
    """(l + 1/2)^2 < 2 m V0 / hbar^2: fall to the centre, out of scope."""


class ConfigError(PotentialError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Units:
    hbar: float = 1.0
    m: float = 1.0

    @property
    def k2m(self) -> float:
        """2 m / hbar^2."""
        return 2.0 * self.m / self.hbar**2

    @property
    def hb2m(self) -> float:
        """hbar^2 / (2 m)."""
        return self.hbar**2 / (2.0 * self.m)


NATURAL = Units()


class PotentialClass(str, Enum):
    REGULAR = "regular"
    SOFT_SINGULAR = "soft_singular"


@dataclass(frozen=True)
class _Entry:
    defaults: Mapping[str, float]
    u: Callable  # (p, r) -> U(r)
    du: Callable  # (p, r) -> U'(r)
    v0: Callable  # (p) -> inverse-square strength
    u_powers: Callable  # (p) -> (power of U, power of U') at r -> 0
    tail: Callable  # (p) -> coefficient c of U ~ c / r at the origin (0 if none)
    length: Callable  # (p, units) -> characteristic length
    confining: Callable  # (p) -> bool
    analytic_l: Callable  # (p, l) -> bool, closed-form wavefunction available
    numeric_only: bool = False
    validate: Callable | None = None


def _pos(*names):
    def check(p):
        for n in names:
            if not p[n] > 0:
                raise PotentialError(f"parameter {n} must be > 0, got {p[n]}")
    return check


def _validate_power_law(p):
    if not p["k"] > -2:
        raise PotentialError("power law needs k > -2")
    if p["k"] == 0:
        raise PotentialError("power law needs k != 0")


def _validate_inv_square(p):
    if not p["V0"] >= 0:
        raise PotentialError("V0 must be >= 0")
    if not p["beta"] > -2:
        raise PotentialError("inverse-square-plus-power needs beta > -2")


def _hulthen_u(p, r):
    a = p["a"]
    with np.errstate(over="ignore"):  # expm1 -> inf gives the correct 0 tail
        return -p["V0"] / np.expm1(r / a)


def _hulthen_du(p, r):
    a = p["a"]
    x = r / a
    # (e^x)/(e^x - 1)^2 = e^-x/(1 - e^-x)^2, finite for large x
    emx = np.exp(-x)
    return p["V0"] / a * emx / (-np.expm1(-x)) ** 2


def _morse_u(p, r):
    x = (r - p["r0"]) / p["r0"]
    e = np.exp(-p["alpha"] * x)
    return p["D"] * (e * e - 2.0 * e)


def _morse_du(p, r):
    x = (r - p["r0"]) / p["r0"]
    e = np.exp(-p["alpha"] * x)
    return -2.0 * p["alpha"] * p["D"] / p["r0"] * (e * e - e)


def _ws_u(p, r):
    # -V0 y with y = 1/(1 + exp((r - R)/a)), written stably
    z = (r - p["R"]) / p["a"]
    return -p["V0"] * 0.5 * (1.0 - np.tanh(0.5 * z))


def _ws_du(p, r):
    z = (r - p["R"]) / p["a"]
    e = np.exp(-np.abs(z))
    return p["V0"] / p["a"] * e / (1.0 + e) ** 2


def _pow(r, k):
    return np.power(r, k)


_INF = math.inf

_CATALOG: dict[str, _Entry] = {
    "coulomb": _Entry(
        defaults={"e2": 1.0},
        u=lambda p, r: -p["e2"] / r,
        du=lambda p, r: p["e2"] / r**2,
        v0=lambda p: 0.0,
        u_powers=lambda p: (-1.0, -2.0),
        tail=lambda p: -p["e2"],
        length=lambda p, un: un.hbar**2 / (un.m * p["e2"]),
        confining=lambda p: False,
        analytic_l=lambda p, l: True,
        validate=_pos("e2"),
    ),
    "oscillator": _Entry(
        defaults={"V0": 0.5},
        u=lambda p, r: p["V0"] * r**2,
        du=lambda p, r: 2.0 * p["V0"] * r,
        v0=lambda p: 0.0,
        u_powers=lambda p: (2.0, 1.0),
        tail=lambda p: 0.0,
        length=lambda p, un: (un.hb2m / p["V0"]) ** 0.25,
        confining=lambda p: True,
        analytic_l=lambda p, l: True,
        validate=_pos("V0"),
    ),
    "linear": _Entry(
        defaults={"V0": 1.0},
        u=lambda p, r: p["V0"] * r,
        du=lambda p, r: p["V0"] * np.ones_like(r),
        v0=lambda p: 0.0,
        u_powers=lambda p: (1.0, 0.0),
        tail=lambda p: 0.0,
        length=lambda p, un: (un.hb2m / p["V0"]) ** (1.0 / 3.0),
        confining=lambda p: True,
        analytic_l=lambda p, l: l == 0,
        validate=_pos("V0"),
    ),
    "power_law": _Entry(
        defaults={"V0": 1.0, "k": 1.5},
        u=lambda p, r: p["V0"] * _pow(r, p["k"]),
        du=lambda p, r: p["V0"] * p["k"] * _pow(r, p["k"] - 1.0),
        v0=lambda p: 0.0,
        u_powers=lambda p: (p["k"], p["k"] - 1.0),
        tail=lambda p: p["V0"] if p["k"] == -1 else 0.0,
        length=lambda p, un: (un.hb2m / abs(p["V0"])) ** (1.0 / (p["k"] + 2.0)),
        confining=lambda p: p["k"] > 0,
        analytic_l=lambda p, l: False,
        numeric_only=True,
        validate=_validate_power_law,
    ),
    "quarkonium": _Entry(
        defaults={"alpha": 0.5, "V0": 1.0},
        u=lambda p, r: -p["alpha"] / r + p["V0"] * r,
        du=lambda p, r: p["alpha"] / r**2 + p["V0"],
        v0=lambda p: 0.0,
        u_powers=lambda p: (-1.0, -2.0),
        tail=lambda p: -p["alpha"],
        length=lambda p, un: (un.hb2m / p["V0"]) ** (1.0 / 3.0),
        confining=lambda p: True,
        analytic_l=lambda p, l: False,
        numeric_only=True,
        validate=_pos("alpha", "V0"),
    ),
    "exponential": _Entry(
        defaults={"V0": 4.0, "a": 1.0},
        u=lambda p, r: -p["V0"] * np.exp(-r / p["a"]),
        du=lambda p, r: p["V0"] / p["a"] * np.exp(-r / p["a"]),
        v0=lambda p: 0.0,
        u_powers=lambda p: (0.0, 0.0),
        tail=lambda p: 0.0,
        length=lambda p, un: p["a"],
        confining=lambda p: False,
        analytic_l=lambda p, l: l == 0,
        validate=_pos("V0", "a"),
    ),
    "hulthen": _Entry(
        defaults={"V0": 8.0, "a": 1.0},
        u=_hulthen_u,
        du=_hulthen_du,
        v0=lambda p: 0.0,
        u_powers=lambda p: (-1.0, -2.0),
        tail=lambda p: -p["V0"] * p["a"],
        length=lambda p, un: p["a"],
        confining=lambda p: False,
        analytic_l=lambda p, l: l == 0,
        validate=_pos("V0", "a"),
    ),
    "morse": _Entry(
        defaults={"D": 8.0, "alpha": 1.0, "r0": 1.0},
        u=_morse_u,
        du=_morse_du,
        v0=lambda p: 0.0,
        u_powers=lambda p: (0.0, 0.0),
        tail=lambda p: 0.0,
        length=lambda p, un: p["r0"],
        confining=lambda p: False,
        analytic_l=lambda p, l: l == 0,
        validate=_pos("D", "alpha", "r0"),
    ),
    "woods_saxon": _Entry(
        defaults={"V0": 1.0, "R": 5.0, "a": 0.5},
        u=_ws_u,
        du=_ws_du,
        v0=lambda p: 0.0,
        u_powers=lambda p: (0.0, 0.0),
        tail=lambda p: 0.0,
        length=lambda p, un: p["R"],
        confining=lambda p: False,
        analytic_l=lambda p, l: l == 0,
        validate=_pos("V0", "R", "a"),
    ),
    "inv_square_plus_power": _Entry(
        defaults={"V0": 1.0, "g": 1.0, "beta": 1.0},
        u=lambda p, r: p["g"] * _pow(r, p["beta"]),
        du=lambda p, r: p["g"] * p["beta"] * _pow(r, p["beta"] - 1.0),
        v0=lambda p: p["V0"],
        u_powers=lambda p: (p["beta"], p["beta"] - 1.0) if p["g"] != 0 else (_INF, _INF),
        tail=lambda p: p["g"] if p["beta"] == -1 else 0.0,
        length=lambda p, un: (un.hb2m / abs(p["g"])) ** (1.0 / (p["beta"] + 2.0)) if p["g"] else 1.0,
        confining=lambda p: p["beta"] > 0 and p["g"] > 0,
        analytic_l=lambda p, l: False,
        numeric_only=True,
        validate=_validate_inv_square,
    ),
    "valence_electron": _Entry(
        defaults={"V0": 1.0, "alpha": 1.0},
        u=lambda p, r: -p["alpha"] / r,
        du=lambda p, r: p["alpha"] / r**2,
        v0=lambda p: p["V0"],
        u_powers=lambda p: (-1.0, -2.0),
        tail=lambda p: -p["alpha"],
        length=lambda p, un: un.hbar**2 / (un.m * p["alpha"]),
        confining=lambda p: False,
        analytic_l=lambda p, l: True,
        validate=lambda p: (_pos("alpha")(p), p["V0"] >= 0 or _raise("V0 must be >= 0")),
    ),
    "singular_oscillator": _Entry(
        defaults={"V0": 1.0, "g": 0.5},
        u=lambda p, r: p["g"] * r**2,
        du=lambda p, r: 2.0 * p["g"] * r,
        v0=lambda p: p["V0"],
        u_powers=lambda p: (2.0, 1.0),
        tail=lambda p: 0.0,
        length=lambda p, un: (un.hb2m / p["g"]) ** 0.25,
        confining=lambda p: True,
        analytic_l=lambda p, l: True,
        validate=lambda p: (_pos("g")(p), p["V0"] >= 0 or _raise("V0 must be >= 0")),
    ),
}


def _raise(msg):
    raise PotentialError(msg)


CATALOG_IDS = tuple(_CATALOG)


@dataclass(frozen=True)
class PotentialSpec:
    """A catalog potential with its parameters and unit system.

    ``v``/``v_prime`` give the full potential; ``u``/``u_prime`` the part left
    after removing ``-V0/r**2``.  All four accept scalars or numpy arrays.
    """

    id: str
    params: Mapping[str, float]
    units: Units = field(default=NATURAL)

    def __post_init__(self):
        if self.id not in _CATALOG:
            raise PotentialError(f"unknown potential id {self.id!r}; known: {', '.join(CATALOG_IDS)}")
        entry = _CATALOG[self.id]
        unknown = set(self.params) - set(entry.defaults)
        if unknown:
            raise PotentialError(f"unknown parameter(s) {sorted(unknown)} for {self.id}")
        merged = {**entry.defaults, **{k: float(v) for k, v in self.params.items()}}
        for k, val in merged.items():
            if not math.isfinite(val):
                raise PotentialError(f"parameter {k} must be finite")
        if entry.validate is not None:
            entry.validate(merged)
        if not (self.units.hbar > 0 and self.units.m > 0):
            raise PotentialError("hbar and m must be positive")
        object.__setattr__(self, "params", MappingProxyType(merged))

    @property
    def _entry(self) -> _Entry:
        return _CATALOG[self.id]

    @property
    def v0_inverse_square(self) -> float:
        return float(self._entry.v0(self.params))

    @property
    def potential_class(self) -> PotentialClass:
        return PotentialClass.SOFT_SINGULAR if self.v0_inverse_square > 0 else PotentialClass.REGULAR

    @property
    def numeric_only(self) -> bool:
        return self._entry.numeric_only

    @property
    def confining(self) -> bool:
        return bool(self._entry.confining(self.params))

    @property
    def threshold(self) -> float:
        """Continuum threshold: 0 for decaying potentials, +inf for confining ones."""
        return math.inf if self.confining else 0.0

    @property
    def length_scale(self) -> float:
        return float(self._entry.length(self.params, self.units))

    @property
    def origin_powers(self) -> tuple[float, float]:
        """Leading powers of U and U' at r -> 0 (upper bounds on the singularity)."""
        return tuple(float(x) for x in self._entry.u_powers(self.params))

    @property
    def coulomb_tail(self) -> float:
        """Coefficient c in U ~ c/r near the origin."""
        return float(self._entry.tail(self.params))

    def has_analytic(self, l: int) -> bool:
        return bool(self._entry.analytic_l(self.params, l))

    @staticmethod
    def _check_r(r):
        arr = np.asarray(r, dtype=float)
        if np.any(arr <= 0):
            raise PotentialError("potential evaluated at r <= 0")
        return arr

    def _out(self, r, val):
        return float(val) if np.ndim(r) == 0 else val

    def u(self, r):
        arr = self._check_r(r)
        return self._out(r, self._entry.u(self.params, arr))

    def u_prime(self, r):
        arr = self._check_r(r)
        return self._out(r, self._entry.du(self.params, arr))

    def v(self, r):
        arr = self._check_r(r)
        return self._out(r, self._entry.u(self.params, arr) - self.v0_inverse_square / arr**2)

    def v_prime(self, r):
        arr = self._check_r(r)
        return self._out(r, self._entry.du(self.params, arr) + 2.0 * self.v0_inverse_square / arr**3)

    def origin_exponent(self, l: int) -> float:
        return origin_exponent(self, l)

    def with_params(self, **overrides) -> "PotentialSpec":
        return PotentialSpec(self.id, {**self.params, **overrides}, self.units)

    def describe(self) -> str:
        body = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.id}({body})"


def make(id: str, units: Units = NATURAL, **params) -> PotentialSpec:
    """Build a catalog entry, e.g. ``make("morse", D=8, alpha=1, r0=1)``."""
    return PotentialSpec(id, params, units)


def v(spec: PotentialSpec, r):
    return spec.v(r)


def v_prime(spec: PotentialSpec, r):
    return spec.v_prime(r)


def origin_exponent(spec: PotentialSpec, l: int) -> float:
    """P = sqrt((l + 1/2)^2 - 2 m V0/hbar^2); exactly l + 1/2 for regular potentials."""
    if l < 0 or int(l) != l:
        raise PotentialError("l must be a non-negative integer")
    v0 = spec.v0_inverse_square
    if v0 == 0.0:
        return l + 0.5
    rad = (l + 0.5) ** 2 - spec.units.k2m * v0
    if rad < 0:
        raise HardSingularError(
            f"{spec.describe()} with l={l} is hard-singular ((l+1/2)^2 - 2mV0/hbar^2 = {rad:.6g} < 0)"
        )
    return math.sqrt(rad)


def classify_numerically(spec: PotentialSpec) -> PotentialClass:
    """Infer the class from r^2 V(r) at r = (1e-3, 1e-4, 1e-5) length units."""
    L = spec.length_scale
    rs = np.array([1e-3, 1e-4, 1e-5]) * L
    r2v = rs**2 * spec.v(rs)
    # soft-singular: r^2 V settles to a finite negative constant
    d1, d2 = abs(r2v[1] - r2v[0]), abs(r2v[2] - r2v[1])
    if r2v[2] < 0 and d2 <= d1 and d2 < 1e-2 * abs(r2v[2]):
        return PotentialClass.SOFT_SINGULAR
    if abs(r2v[2]) < abs(r2v[1]) < abs(r2v[0]) or np.all(r2v == 0):
        return PotentialClass.REGULAR
    raise PotentialError(f"{spec.describe()}: r^2 V does not settle; neither regular nor soft-singular")


_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def parse_config(text: str) -> list[tuple[int, str, str]]:
    """Parse ``key = value`` lines.  ``#`` starts a comment.  Returns (line, key, value)."""
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", i)
        out.append((i, m.group(1), m.group(2)))
    return out


def spec_from_config(text: str) -> PotentialSpec:
    """Build a spec from ``potential = <id>`` plus parameter overrides (and ``hbar``, ``m``)."""
    pid = None
    params: dict[str, float] = {}
    unit_kw: dict[str, float] = {}
    lines: dict[str, int] = {}
    for line, key, value in parse_config(text):
        if key == "potential":
            if value not in _CATALOG:
                raise ConfigError(f"unknown potential id {value!r}", line)
            pid = value
            continue
        try:
            num = float(value)
        except ValueError:
            raise ConfigError(f"value for {key} is not a number: {value!r}", line) from None
        lines[key] = line
        if key in ("hbar", "m"):
            unit_kw[key] = num
        else:
            params[key] = num
    if pid is None:
        raise ConfigError("missing 'potential = <id>'")
    allowed = _CATALOG[pid].defaults
    for key in params:
        if key not in allowed:
            raise ConfigError(f"parameter {key!r} is not defined for {pid}", lines[key])
    return PotentialSpec(pid, params, Units(**unit_kw))
