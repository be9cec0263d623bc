import csv
import io
import json
import math

import pytest
from hypothesis import given, strategies as st

from radial_sumrules import cli_report as cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def same(a, b):
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b


def test_kramers_modified_rows(capsys):
    code, out, _ = run(capsys, "check", "--potential", "coulomb", "--l", "0", "--n", "1..3",
                       "--identity", "kramers_modified", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert [r["state"] for r in doc["rows"]] == ["n_r=0,l=0", "n_r=1,l=0", "n_r=2,l=0"]
    assert all(r["pass"] is True and r["identity"] == "kramers_modified" for r in doc["rows"])
    # -(hbar^2/2m) C^2 with C^2 = 4/n^3
    assert [r["rhs"] for r in doc["rows"]] == pytest.approx([-2.0, -0.25, -2.0 / 27], rel=1e-14)


def test_verify_integrals_all(capsys):
    code, out, _ = run(capsys, "verify-integrals", "--all", "--format", "json")
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 6 and all(r["pass"] is True for r in rows)


def test_verify_integrals_controls(capsys):
    code, out, _ = run(capsys, "verify-integrals", "--identity", "woods_saxon", "--states", "2",
                       "--controls", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert [r["identity"] for r in rows[:2]] == ["woods_saxon", "woods_saxon[off-shell 1%]"]


def test_csv_columns_in_fixed_order(capsys):
    _, out, _ = run(capsys, "check", "--potential", "oscillator", "--l", "1", "--format", "csv")
    assert out.splitlines()[0] == "potential,state,identity,lhs,rhs,pi,residual,tol,pass"


def test_empty_filter_runs_everything(capsys):
    _, out, _ = run(capsys, "check", "--potential", "coulomb", "--l", "0", "--format", "json")
    ids = [r["identity"] for r in json.loads(out)["rows"]]
    assert {"kramers_modified", "ehrenfest", "origin_density", "khare(k=0)", "virial"} <= set(ids)


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "check", "--potential", "coulomb", "--l", "0..1", "--nr", "0", "--format", "json")
    rows = cli.parse_report(out)
    assert any(isinstance(r["lhs"], float) and math.isnan(r["lhs"]) for r in rows)  # n/a rows
    again = cli.parse_report(cli.serialize(rows))
    assert len(again) == len(rows)
    for a, b in zip(rows, again):
        assert a.keys() == b.keys() and all(same(a[k], b[k]) for k in a)
    assert cli.serialize(again) == out


@given(st.floats(allow_nan=False))
def test_float_text_round_trips(x):
    assert json.loads(cli._num(x)) == x if math.isfinite(x) else cli._num(x) in ('"inf"', '"-inf"')


def test_output_independent_of_worker_count(capsys):
    args = ["check", "--potential", "hulthen", "--potential", "morse", "--nr", "0..1", "--format", "json"]
    _, one, _ = run(capsys, *args, "--workers", "1")
    _, four, _ = run(capsys, *args, "--workers", "4")
    assert one == four


def test_tight_tolerance_gives_nonzero_exit(capsys):
    code, out, _ = run(capsys, "check", "--potential", "morse", "--tol", "1e-30", "--format", "json")
    assert code == 1
    assert json.loads(out)["summary"]["exit_status"] == 1


def test_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv(cli.ENV_TOL, "1e-30")
    code, _, _ = run(capsys, "check", "--potential", "morse")
    assert code == 1
    # an explicit --tol beats the environment
    code, _, _ = run(capsys, "check", "--potential", "morse", "--tol", "1e-4")
    assert code == 0


def test_bad_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv(cli.ENV_TOL, "tiny")
    code, _, err = run(capsys, "check", "--potential", "morse")
    assert code == 2 and cli.ENV_TOL in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# hydrogen and a valence atom\npotential = coulomb\npotential = valence_electron V0=0.3\n"
                   "l = 1\nnr = 0..1\nidentities = hypervirial, ehrenfest\nformat = csv\n")
    code, out, _ = run(capsys, "check", "--config", str(cfg))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert {r["potential"] for r in rows} == {"coulomb(e2=1)", "valence_electron(V0=0.3, alpha=1)"}
    assert len(rows) == 2 * 2 * 4


@pytest.mark.parametrize("text,line,msg", [
    ("potential = coulomb\nl = 0..x\n", 2, "bad range"),
    ("\npotential = yukawa\n", 2, "unknown potential"),
    ("potential = coulomb\nidentities = kramers, nonsense\n", 2, "unknown identity"),
    ("potential = coulomb\ncolor = red\n", 2, "unknown key"),
    ("potential = morse D=abc\n", 1, "not a number"),
    ("potential = coulomb\nl 0\n", 2, "key = value"),
])
def test_config_errors_report_line(tmp_path, capsys, text, line, msg):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, out, err = run(capsys, "check", "--config", str(cfg))
    assert code == 2 and out == ""
    assert f"line {line}" in err and msg in err


def test_unknown_potential_flag(capsys):
    code, _, err = run(capsys, "check", "--potential", "yukawa")
    assert code == 2 and "unknown potential" in err


def test_missing_state_is_not_fatal(capsys):
    # the Hulthen well has three s-states; n_r = 5 is reported, the rest still run
    code, out, _ = run(capsys, "check", "--potential", "hulthen", "--nr", "0,5", "--format", "json")
    rows = json.loads(out)["rows"]
    assert code == 0
    assert rows[-1]["identity"] == "bound_state" and rows[-1]["pass"] == "n/a"
    assert any(r["pass"] is True for r in rows)


def test_audit_constants(capsys):
    code, out, _ = run(capsys, "audit-constants", "--format", "json")
    rows = json.loads(out)["rows"]
    assert code == 0
    forms = {r["form"] for r in rows}
    assert {"adopted", "regular_m_over_2hbar2", "soft_m_over_2hbar2", "khare_no_2m_over_hbar2"} <= forms


def test_spectrum_and_dump(capsys):
    code, out, _ = run(capsys, "spectrum", "--potential", "coulomb", "--nr", "0..1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [float(r["energy"]) for r in rows] == [-0.5, -0.125]
    code, out, _ = run(capsys, "dump-wf", "--potential", "coulomb", "--points", "5", "--rmax", "5")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "r,R,u" and len(lines) == 6
    assert float(lines[1].split(",")[1]) == pytest.approx(2 * math.exp(-1.0), rel=1e-14)
