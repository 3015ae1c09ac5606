import io
import json
import subprocess
import sys

import pytest

from ggt.cli import emit_report, run_command
from ggt.fixtures import FIXTURE_NAMES, SCHEMA_VERSION


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run("--format", "json", *argv)
    return code, json.loads(text)


@pytest.fixture
def mod5(tmp_path):
    ops = [{"name": f"+{k}", "arity": 1, "table": [(x + k) % 5 for x in range(5)]}
           for k in range(5)]
    doc = {"schema_version": SCHEMA_VERSION, "carrier": list(range(5)), "operations": ops,
           "system": {"tier": "UNARY", "explicit": [o["name"] for o in ops]}}
    p = tmp_path / "mod5.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_emit_report_adds_schema_version():
    assert json.loads(emit_report({}, "json")) == {"schema_version": SCHEMA_VERSION}
    assert "schema_version" in emit_report({}, "text")


def test_end_count_on_sierpinski():
    code, doc = run_json("end", "sierpinski-powerset")
    assert code == 0
    assert doc["report"]["count"] == 36
    assert doc["schema_version"] == SCHEMA_VERSION


def test_aut_count_on_sierpinski():
    code, doc = run_json("aut", "sierpinski-powerset")
    assert code == 0 and doc["report"]["count"] == 2


def test_verify_all_small_fixture():
    code, doc = run_json("verify-all", "example-2-1-4")
    assert code == 0 and doc["verdict"] == "ok"
    assert doc["report"]["end"]["count"] == 4


def test_lattice_summary():
    code, doc = run_json("lattice", "example-2-1-4")
    assert code == 0
    assert "|Int|=4" in json.dumps(doc["report"])


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_output_is_deterministic(fmt):
    a = run("--format", fmt, "galois", "example-3-3-3")
    b = run("--format", fmt, "galois", "example-3-3-3")
    assert a == b and a[0] == 0


def test_usage_errors_exit_one():
    assert run()[0] == 1
    assert run("nonsense", "mod3")[0] == 1
    assert run("space", "no-such-fixture")[0] == 1
    assert run("structure", "no-such-action", "mod3")[0] == 1


def test_parse_schema_and_reference_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert run("space", str(bad))[0] == 4
    bad.write_text(json.dumps({"schema_version": SCHEMA_VERSION + 1}))
    assert run("space", str(bad))[0] == 5
    bad.write_text(json.dumps({"schema_version": SCHEMA_VERSION, "carrier": [0],
                               "operations": [{"name": "f", "arity": 1, "table": [0]}],
                               "system": {"tier": "UNARY", "explicit": ["g"]}}))
    assert run("space", str(bad))[0] == 6


def test_budget_gives_indeterminate_and_override(mod5, monkeypatch):
    code, doc = run_json("topology", "--which", "4.1.2", mod5)
    assert code == 2 and doc["verdict"] == "indeterminate"
    assert run("topology", "--which", "4.1.2", "--budget", "5", mod5)[0] == 0
    monkeypatch.setenv("GGT_BUDGET", "5")
    assert run("topology", "--which", "4.1.2", mod5)[0] == 0


def test_options_may_follow_operands():
    a = run("--format", "json", "topology", "--which", "4.1.2", "example-2-1-4")
    b = run("topology", "example-2-1-4", "--which", "4.1.2", "--format", "json")
    assert a == b and a[0] == 0


@pytest.mark.parametrize("action", ["duality", "transitivity", "normality", "splitting"])
def test_structure_actions_on_translations(action):
    code, doc = run_json("structure", action, "mod3")
    assert code == 0 and doc["verdict"] == "ok"


def test_fixtures_and_replay(tmp_path):
    code, _ = run("fixtures", str(tmp_path))
    assert code == 0
    assert {p.stem for p in tmp_path.glob("*.json")} == set(FIXTURE_NAMES)
    code, text = run("--format", "json", "space", str(tmp_path / "mod3.json"))
    assert code == 0
    rec = tmp_path / "rec.json"
    rec.write_text(text)
    assert run("replay", str(rec))[0] == 0
    doc = json.loads(text)
    doc["report"]["tampered"] = True
    rec.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    assert run("replay", str(rec))[0] == 3


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "ggt", "--format", "json", "end", "mod3"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["report"]["count"] == 3
