from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from enlab.cli import main
from enlab.errors import (
    NonRefiningFiltration,
    ProbabilityNotOne,
    SchemaError,
)
from enlab.model_io import dump_model, load_model, parse_model
from enlab.random_times import analyze

Q = Fraction
FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_tent_fixture_roundtrip():
    space, tau, asset = load_model(FIXTURES / "tent.json")
    analysis = analyze(space, tau)
    assert analysis.honest and analysis.class_h
    assert not analysis.is_stopping_time
    assert {o: tau[o] for o in space.outcomes} == \
        {"uu": 0, "ud": 2, "du": 2, "dd": 0}
    for o in space.outcomes:
        assert analysis.survival.at(o, 1) == Q(1, 2)

    payload = dump_model(space, tau, asset)
    space2, tau2, asset2 = parse_model(payload)
    assert space2.prob == space.prob
    assert tau2.tau == tau.tau
    assert asset2.values == asset.values


def test_stop_fixture():
    space, tau, _ = load_model(FIXTURES / "stop.json")
    analysis = analyze(space, tau)
    assert analysis.is_stopping_time and analysis.class_h
    assert analysis.jump_set == ()


def _tent_payload():
    return json.loads((FIXTURES / "tent.json").read_text())


def test_load_model_schema_errors(tmp_path):
    bad = _tent_payload()
    bad["prob"]["uu"] = "3/8"  # sums to 9/8
    with pytest.raises(ProbabilityNotOne):
        parse_model(bad)

    bad = _tent_payload()
    bad["partitions"][2] = [["uu", "du"], ["ud"], ["dd"]]
    with pytest.raises(NonRefiningFiltration):
        parse_model(bad)

    bad = _tent_payload()
    del bad["S"]
    with pytest.raises(SchemaError):
        parse_model(bad)

    bad = _tent_payload()
    bad["prob"]["uu"] = "one quarter"
    with pytest.raises(SchemaError):
        parse_model(bad)

    target = tmp_path / "broken.json"
    target.write_text("{not json")
    with pytest.raises(SchemaError):
        load_model(target)


def test_cli_usage_error():
    assert main(["no-such-command"]) == 2


def test_cli_gen_nupbr_verify(tmp_path):
    model = tmp_path / "model.json"
    assert main(["gen", "--seed", "3", "--depth", "4", "--branching", "3",
                 "--out", str(model)]) == 0
    out = tmp_path / "verdict.json"
    assert main(["nupbr", "--model", str(model), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["witnesses_verified"] is True
    assert payload["after"]["witness"]["kind"] in ("deflator", "arbitrage")

    suite = tmp_path / "suite.json"
    assert main(["verify", "--models-seed-range", "1..6", "--depth", "4",
                 "--branching", "3", "--out", str(suite)]) == 0
    report = json.loads(suite.read_text())
    assert report["violations"] == 0 and report["models"] == 6


def test_cli_nupbr_on_tent(capsys):
    assert main(["nupbr", "--model", str(FIXTURES / "tent.json")]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    base = json.loads(lines[0])
    after = json.loads(lines[1])
    assert base["satisfied"] is True      # the walk is a martingale
    assert after["satisfied"] is False    # after-part arbitrage
    assert after["witness"]["kind"] == "arbitrage"


def test_cli_crosscheck(tmp_path):
    csv = tmp_path / "rows.csv"
    assert main(["crosscheck", "--seeds", "1..8", "--depth", "4",
                 "--branching", "3", "--csv", str(csv),
                 "--fixtures-dir", str(tmp_path / "fx")]) == 0
    lines = csv.read_text().strip().splitlines()
    assert lines[0] == "seed,a,b,c,agree,jump_set_size"
    assert len(lines) == 9


def test_cli_example_runs_and_determinism(tmp_path):
    csv = tmp_path / "ex1.csv"
    args = ["example1", "--mu", "2", "--a", "1", "--paths", "6000",
            "--seed", "7", "--csv", str(csv)]
    assert main(args) == 0
    first = csv.read_text()
    assert main(args) == 0
    assert csv.read_text() == first  # byte-identical rerun
    header, row = first.splitlines()[:2]
    assert header == "path_id,terminal_wealth,min_wealth"
    assert float(row.split(",")[1]) > 0

    csv2 = tmp_path / "ex2.csv"
    assert main(["example2", "--mu", "2", "--a", "1", "--paths", "6000",
                 "--seed", "7", "--checkpoints", "1,2",
                 "--csv", str(csv2)]) == 0
    lines = csv2.read_text().strip().splitlines()
    assert lines[0] == "checkpoint,quantity,mean,se,flag"
    assert len(lines) == 5


def test_cli_psi(tmp_path, capsys):
    csv = tmp_path / "psi.csv"
    assert main(["psi", "--mu", "2", "--u", "0", "--mc-paths", "40000",
                 "--seed", "2", "--csv", str(csv)]) == 0
    out = capsys.readouterr().out
    assert "psi(0.0) = 0.5000000000" in out
    lines = csv.read_text().splitlines()
    assert lines[0] == "u,psi_pk,psi_mc,se"
    assert all(float(v) >= 0 for v in lines[1].split(","))  # plain floats


def test_reports_validate_against_shipped_schemas(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    schemas = Path(__file__).resolve().parent.parent / "schemas"

    model_schema = json.loads((schemas / "model.schema.json").read_text())
    jsonschema.validate(_tent_payload(), model_schema)
    gen = tmp_path / "gen.json"
    assert main(["gen", "--seed", "2", "--depth", "3", "--branching", "2",
                 "--out", str(gen)]) == 0
    jsonschema.validate(json.loads(gen.read_text()), model_schema)

    suite = tmp_path / "suite.json"
    assert main(["verify", "--models-seed-range", "1..3", "--depth", "3",
                 "--branching", "3", "--out", str(suite)]) == 0
    jsonschema.validate(json.loads(suite.read_text()),
                        json.loads((schemas / "verify_report.schema.json")
                                   .read_text()))

    verdict = tmp_path / "verdict.json"
    assert main(["nupbr", "--model", str(gen), "--out", str(verdict)]) == 0
    verdict_schema = json.loads(
        (schemas / "nupbr_verdict.schema.json").read_text())
    payload = json.loads(verdict.read_text())
    jsonschema.validate(payload["base"], verdict_schema)
    jsonschema.validate(payload["after"], verdict_schema)


def test_cli_brownian(tmp_path):
    out = tmp_path / "bd.json"
    assert main(["brownian", "--epsilon", "0.25", "--dt", "0.001",
                 "--paths", "120", "--seed", "5", "--time-cap", "50",
                 "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["structural_ok"] is True
