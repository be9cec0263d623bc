"""Command-line front end: run check matrices and emit residual tables.

    radial-sumrules check --potential coulomb --l 0 --n 1..3 --identity kramers_modified
    radial-sumrules verify-integrals --all
    radial-sumrules spectrum --potential morse --nr 0..3
    radial-sumrules dump-wf --potential hulthen --nr 1 > wf.csv
    radial-sumrules audit-constants

Output is deterministic: rows are ordered by (potential, l, n_r, identity)
whatever the worker count, and floats are written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import integrals, theorems
from .potentials import CATALOG_IDS, ConfigError, PotentialError, PotentialSpec, Units, make, parse_config
from .spectrum import SpectrumError, bound_state
from .wavefunctions import WavefunctionError, build, dump_table

__all__ = ["RunConfig", "COLUMNS", "parse_range", "load_config", "run", "serialize", "parse_report", "main"]

COLUMNS = ("potential", "state", "identity", "lhs", "rhs", "pi", "residual", "tol", "pass")
FORMATS = ("text", "json", "csv")
ENV_TOL = "RADIAL_SUMRULES_TOL"


@dataclass(frozen=True)
class RunConfig:
    potentials: tuple[PotentialSpec, ...] = ()
    l_values: tuple[int, ...] = (0,)
    n_values: tuple[int, ...] | None = None  # principal quantum numbers
    nr_values: tuple[int, ...] = (0,)
    identities: tuple[str, ...] = ()
    tolerances: dict = field(default_factory=dict)  # analytic / numeric / default
    output: str = "text"
    method: str = "auto"
    workers: int = 1

    def states(self) -> list[tuple[int, int]]:
        """(n_r, l) pairs in a fixed order."""
        out = []
        for l in self.l_values:
            if self.n_values is not None:
                nrs = [n - l - 1 for n in self.n_values if n - l - 1 >= 0]
            else:
                nrs = list(self.nr_values)
            out += [(nr, l) for nr in nrs]
        return out


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_RANGE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$")


def parse_range(text: str, line: int | None = None) -> tuple[int, ...]:
    """'2', '0..3' or '0,2,5' (ranges inclusive)."""
    out: list[int] = []
    for part in str(text).split(","):
        m = _RANGE.match(part)
        if not m:
            raise ConfigError(f"bad range {part.strip()!r}; use N, A..B or a comma list", line)
        lo = int(m.group(1))
        hi = int(m.group(2)) if m.group(2) is not None else lo
        if hi < lo:
            raise ConfigError(f"empty range {part.strip()!r}", line)
        out += range(lo, hi + 1)
    return tuple(dict.fromkeys(out))


def _parse_potential(text: str, units: Units, line: int | None = None) -> PotentialSpec:
    """'morse' or 'morse D=8 alpha=1.2'."""
    parts = text.replace(",", " ").split()
    if not parts:
        raise ConfigError("empty potential entry", line)
    pid, params = parts[0], {}
    if pid not in CATALOG_IDS:
        raise ConfigError(f"unknown potential id {pid!r}; known: {', '.join(CATALOG_IDS)}", line)
    for item in parts[1:]:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"expected key=value, got {item!r}", line)
        try:
            params[key] = float(val)
        except ValueError:
            raise ConfigError(f"parameter {key} is not a number: {val!r}", line) from None
    try:
        return make(pid, units, **params)
    except ConfigError:
        raise
    except PotentialError as exc:
        raise ConfigError(str(exc), line) from None


def _check_identities(names, line=None) -> tuple[str, ...]:
    out = []
    for name in names:
        name = name.strip()
        if not name:
            continue
        if name not in theorems.IDENTITIES:
            raise ConfigError(f"unknown identity {name!r}; known: {', '.join(theorems.IDENTITIES)}", line)
        out.append(name)
    return tuple(out)


def _tol_value(text, line=None) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"tolerance is not a number: {text!r}", line) from None
    if not v > 0:
        raise ConfigError("tolerance must be positive", line)
    return v


def load_config(text: str) -> RunConfig:
    """Parse a ``key = value`` run file.  ``potential`` may repeat; errors carry line numbers."""
    entries = parse_config(text)
    units_kw: dict[str, float] = {}
    for line, key, value in entries:
        if key in ("hbar", "m"):
            units_kw[key] = _tol_value(value, line)
    try:
        units = Units(**units_kw)
    except Exception as exc:  # noqa: BLE001
        raise ConfigError(str(exc)) from None
    kw: dict = {"tolerances": {}}
    pots: list[PotentialSpec] = []
    for line, key, value in entries:
        if key in ("hbar", "m"):
            continue
        if key == "potential":
            pots.append(_parse_potential(value, units, line))
        elif key == "l":
            kw["l_values"] = parse_range(value, line)
        elif key == "n":
            kw["n_values"] = parse_range(value, line)
            if 0 in kw["n_values"]:
                raise ConfigError("principal quantum number n starts at 1", line)
        elif key == "nr":
            kw["nr_values"] = parse_range(value, line)
        elif key in ("identity", "identities"):
            kw["identities"] = _check_identities(value.split(","), line)
        elif key == "tol":
            kw["tolerances"]["default"] = _tol_value(value, line)
        elif key in ("tol_analytic", "tol_numeric"):
            kw["tolerances"][key.split("_")[1]] = _tol_value(value, line)
        elif key in ("format", "output"):
            if value not in FORMATS:
                raise ConfigError(f"format must be one of {', '.join(FORMATS)}", line)
            kw["output"] = value
        elif key == "method":
            if value not in ("auto", "analytic", "numerov"):
                raise ConfigError("method must be auto, analytic or numerov", line)
            kw["method"] = value
        elif key == "workers":
            try:
                kw["workers"] = max(1, int(value))
            except ValueError:
                raise ConfigError(f"workers is not an integer: {value!r}", line) from None
        else:
            raise ConfigError(f"unknown key {key!r}", line)
    if not pots:
        raise ConfigError("no 'potential = <id>' entry")
    return RunConfig(potentials=tuple(pots), **kw)


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def _tol_for(cfg: RunConfig, form: str) -> float | None:
    t = cfg.tolerances
    if form in t:
        return t[form]
    if "default" in t:
        return t["default"]
    return None


def _pi_text(pi) -> float | str:
    if pi is None:
        return ""
    return pi.value if pi.case in ("vanishes", "finite") else pi.case


def _row(rep: theorems.TheoremReport) -> dict:
    return {
        "potential": rep.potential,
        "state": rep.state,
        "identity": rep.identity_id,
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "pi": _pi_text(rep.pi),
        "residual": rep.residual,
        "tol": rep.tol,
        "pass": "n/a" if not rep.applicable else bool(rep.passed),
        "note": rep.note,
    }


def _state_row(spec, nr, l, tol, note, fatal) -> dict:
    nan = math.nan
    return {"potential": spec.describe(), "state": f"n_r={nr},l={l}", "identity": "bound_state",
            "lhs": nan, "rhs": nan, "pi": "", "residual": nan, "tol": tol if tol is not None else nan,
            "pass": False if fatal else "n/a", "note": note}


def _job(cfg: RunConfig, spec: PotentialSpec, nr: int, l: int) -> list[dict]:
    method = "closed_form" if cfg.method == "analytic" else cfg.method
    try:
        if method == "closed_form":
            from .spectrum import closed_form_state
            st = closed_form_state(spec, nr, l)
        else:
            st = bound_state(spec, nr, l, method)
        wf = build(st)
    except PotentialError as exc:
        return [_state_row(spec, nr, l, None, f"no such state: {exc}", False)]
    except SpectrumError as exc:
        from .spectrum import NoBoundStateError
        return [_state_row(spec, nr, l, None, str(exc), not isinstance(exc, NoBoundStateError))]
    except WavefunctionError as exc:
        return [_state_row(spec, nr, l, None, str(exc), True)]
    tol = _tol_for(cfg, wf.form)
    reports = theorems.run_identities(wf, cfg.identities or None, tol)
    return [_row(r) for r in reports]


def run(cfg: RunConfig) -> tuple[int, list[dict]]:
    """Execute the check matrix; exit status is 0 iff every applicable row passes."""
    jobs = [(spec, nr, l) for spec in cfg.potentials for nr, l in cfg.states()]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(lambda j: _job(cfg, *j), jobs))
    else:
        chunks = [_job(cfg, *j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    return _status(rows), rows


def _status(rows) -> int:
    return 0 if all(r["pass"] is True or r["pass"] == "n/a" for r in rows) else 1


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _num(x) -> str:
    """JSON text for a float: 17 significant digits, non-finite values as strings."""
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return json.dumps(repr(x))
        text = format(x, ".17g")
        return text if ("e" in text or "." in text) else text + ".0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_num(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_num(v) for v in x) + "]"
    return json.dumps(str(x))


def serialize(rows: Sequence[dict], command: str = "check", exit_status: int | None = None) -> str:
    """Deterministic JSON document for a report."""
    status = _status(rows) if exit_status is None else exit_status
    counted = [r for r in rows if r.get("pass") != "n/a"]
    summary = {"rows": len(rows), "applicable": len(counted),
               "passed": sum(1 for r in counted if r.get("pass") is True), "exit_status": status}
    body = ",\n".join("  " + _num(r) for r in rows)
    return "{" + f'"command": {json.dumps(command)}, "summary": {_num(summary)}, "rows": [\n{body}\n]' + "}\n"


_NONFINITE = {"nan": math.nan, "inf": math.inf, "-inf": -math.inf}


def parse_report(text: str) -> list[dict]:
    """Inverse of :func:`serialize` for the rows (non-finite strings become floats again)."""
    doc = json.loads(text)
    out = []
    for r in doc["rows"]:
        r = dict(r)
        for k in ("lhs", "rhs", "residual", "tol", "pi"):
            if isinstance(r.get(k), str) and r[k] in _NONFINITE:
                r[k] = _NONFINITE[r[k]]
        out.append(r)
    return out


def _cell(v, fmt=".17g") -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, fmt)
    return str(v)


def to_csv(rows: Sequence[dict], columns: Sequence[str] = COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in columns])
    return buf.getvalue()


def to_text(rows: Sequence[dict], columns: Sequence[str] = COLUMNS) -> str:
    short = {"lhs": ".12g", "rhs": ".12g", "pi": ".6g", "residual": ".2e", "tol": ".0e"}
    table = [list(columns)] + [[_cell(r.get(c, ""), short.get(c, ".12g")) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(columns))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
    label = [c for c in ("potential", "state", "identity", "form", "case") if c in columns]
    notes = [f"  {' '.join(str(r[c]) for c in label)}: {r['note']}" for r in rows if r.get("note")]
    if notes:
        lines += ["", "notes:"] + notes
    return "\n".join(lines) + "\n"


def _emit(rows, fmt, command, columns=COLUMNS, out=None, status=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(serialize(rows, command, status))
    elif fmt == "csv":
        out.write(to_csv(rows, columns))
    else:
        out.write(to_text(rows, columns))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _env_tol() -> float | None:
    raw = os.environ.get(ENV_TOL)
    if raw is None or raw.strip() == "":
        return None
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"{ENV_TOL} is not a number: {raw!r}") from None
    if not v > 0:
        raise ConfigError(f"{ENV_TOL} must be positive")
    return v


def _units(args) -> Units:
    return Units(hbar=args.hbar, m=args.mass)


def _config_from_args(args) -> RunConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = load_config(fh.read())
    else:
        if not args.potential:
            raise ConfigError("give --potential (or --config)")
        units = _units(args)
        pots = tuple(_parse_potential(" ".join([p] + list(args.param or [])), units) for p in args.potential)
        cfg = RunConfig(potentials=pots)
    kw = {}
    if args.l is not None:
        kw["l_values"] = parse_range(args.l)
    if args.n is not None:
        kw["n_values"] = parse_range(args.n)
        if 0 in kw["n_values"]:
            raise ConfigError("principal quantum number n starts at 1")
    if args.nr is not None:
        kw["nr_values"] = parse_range(args.nr)
        kw["n_values"] = None
    if args.identity:
        kw["identities"] = _check_identities(args.identity)
    if args.method:
        kw["method"] = args.method
    if args.workers:
        kw["workers"] = args.workers
    tols = dict(cfg.tolerances)
    env = _env_tol()
    if env is not None and "default" not in tols:
        tols["default"] = env
    if args.tol is not None:
        tols = {"default": args.tol}
    kw["tolerances"] = tols
    return RunConfig(**{**cfg.__dict__, **kw})


def _cmd_check(args) -> int:
    cfg = _config_from_args(args)
    status, rows = run(cfg)
    fmt = args.format or cfg.output
    _emit(rows, fmt, "check", status=status)
    return status


def _cmd_verify(args) -> int:
    ids = integrals.IDENTITY_IDS if args.all or not args.identity else tuple(args.identity)
    for i in ids:
        if i not in integrals.IDENTITY_IDS:
            raise ConfigError(f"unknown integral identity {i!r}; known: {', '.join(integrals.IDENTITY_IDS)}")
    tol = args.tol if args.tol is not None else (_env_tol() or integrals.TOL)
    jobs = [(i, n) for i in ids for n in range(args.states)]

    def one(job):
        ident, n = job
        q = integrals.on_shell_parameters(ident, n)
        rows = [_row(integrals.verify_identity(ident, q, tol, label=f"n_r={n},l=0"))]
        rows[0]["pi"] = ""
        if args.controls:
            ev = integrals.evaluate_identity(ident, integrals.perturb(ident, q), allow_off_shell=True)
            rows.append({"potential": rows[0]["potential"], "state": f"n_r={n},l=0",
                         "identity": f"{ident}[off-shell 1%]", "lhs": ev.lhs_quadrature.value,
                         "rhs": ev.rhs_closed_form, "pi": "", "residual": ev.residual, "tol": 1e-3,
                         "pass": bool(ev.residual > 1e-3),
                         "note": "control: passes when the identity breaks by more than tol"})
        return rows

    if args.workers and args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            chunks = list(pool.map(one, jobs))
    else:
        chunks = [one(j) for j in jobs]
    rows = [r for c in chunks for r in c]
    status = _status(rows)
    _emit(rows, args.format or "text", "verify-integrals", status=status)
    return status


def _cmd_spectrum(args) -> int:
    units = _units(args)
    if not args.potential:
        raise ConfigError("give --potential")
    ls = parse_range(args.l or "0")
    nrs = parse_range(args.nr or "0..3")
    rows = []
    status = 0
    for p in args.potential:
        spec = _parse_potential(" ".join([p] + list(args.param or [])), units)
        for l in ls:
            for nr in nrs:
                row = {"potential": spec.describe(), "state": f"n_r={nr},l={l}", "energy": math.nan,
                       "method": "", "note": ""}
                try:
                    st = bound_state(spec, nr, l, args.method or "auto")
                    row.update(energy=st.energy, method=st.method)
                except (SpectrumError, PotentialError) as exc:
                    row["note"] = str(exc)
                    status = 1
                rows.append(row)
    _emit(rows, args.format or "text", "spectrum", ("potential", "state", "energy", "method"), status=status)
    return status


def _cmd_dump(args) -> int:
    units = _units(args)
    if not args.potential or len(args.potential) != 1:
        raise ConfigError("dump-wf takes exactly one --potential")
    spec = _parse_potential(" ".join([args.potential[0]] + list(args.param or [])), units)
    st = bound_state(spec, int(args.nr or 0), int(args.l or 0), args.method or "auto")
    wf = build(st)
    rmax = args.rmax if args.rmax else 10.0 * spec.length_scale
    r = np.linspace(rmax / args.points, rmax, args.points)
    sys.stdout.write(dump_table(wf, r))
    return 0


def _cmd_audit(args) -> int:
    rows = []
    for a in theorems.constant_factor_audit():
        rows.append({"form": a.form, "case": a.case, "lhs": a.lhs, "rhs": a.rhs, "factor": a.factor,
                     "residual": a.residual, "status": a.status, "description": a.description, "note": a.note,
                     "pass": a.status == "holds" if a.form == "adopted" else "n/a"})
    status = _status(rows)
    cols = ("form", "case", "lhs", "rhs", "factor", "residual", "status", "description")
    _emit(rows, args.format or "text", "audit-constants", cols, status=status)
    return status


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="radial-sumrules", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, states=True):
        sp.add_argument("--format", choices=FORMATS, help="output format (default text)")
        sp.add_argument("--workers", type=int, default=None, help="thread pool size")
        if states:
            sp.add_argument("--potential", action="append", help="catalog id, repeatable")
            sp.add_argument("--param", action="append", metavar="KEY=VALUE", help="parameter override")
            sp.add_argument("--l", help="angular momenta, e.g. 0..2")
            sp.add_argument("--nr", help="radial quantum numbers, e.g. 0..3")
            sp.add_argument("--method", choices=("auto", "analytic", "numerov"))
            sp.add_argument("--hbar", type=float, default=1.0)
            sp.add_argument("--mass", type=float, default=1.0)

    c = sub.add_parser("check", help="evaluate sum rules over a state matrix")
    common(c)
    c.add_argument("--config", help="key = value run file")
    c.add_argument("--n", help="principal quantum numbers (n_r = n - l - 1)")
    c.add_argument("--identity", action="append", help="identity filter, repeatable (default: all)")
    c.add_argument("--tol", type=float, help="tolerance for every check")
    c.set_defaults(func=_cmd_check)

    v = sub.add_parser("verify-integrals", help="closed-form integral identities")
    common(v, states=False)
    v.add_argument("--all", action="store_true", help="all six identities (default)")
    v.add_argument("--identity", action="append")
    v.add_argument("--states", type=int, default=1, help="number of lowest states per identity")
    v.add_argument("--controls", action="store_true", help="add 1%% off-shell falsification rows")
    v.add_argument("--tol", type=float)
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("spectrum", help="print energies")
    common(s)
    s.set_defaults(func=_cmd_spectrum)

    d = sub.add_parser("dump-wf", help="CSV table r, R(r), u(r) of one normalised state")
    common(d)
    d.add_argument("--rmax", type=float)
    d.add_argument("--points", type=int, default=201)
    d.set_defaults(func=_cmd_dump)

    a = sub.add_parser("audit-constants", help="adopted recurrence normalisation against literal prefactors")
    common(a, states=False)
    a.set_defaults(func=_cmd_audit)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"radial-sumrules: config error: {exc}", file=sys.stderr)
        return 2
    except (PotentialError, SpectrumError, WavefunctionError, integrals.IntegralError) as exc:
        print(f"radial-sumrules: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
