import json
from importlib import resources

import jsonschema
import pytest

from latvoa.cli import main


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("latvoa").joinpath("schemas/output.schema.json").read_text())


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_char_text(capsys):
    code, out, _ = run(capsys, ["char", "--group", "a4", "--truncate", "12", "--format", "text"])
    assert code == 0
    assert out.strip() == ("q^(-1/24)·(1 + q^2 + q^3 + 2q^4 + 2q^5 + 4q^6 + 4q^7 + 7q^8 + 9q^9 + 13q^10"
                           " + 16q^11 + 24q^12 + O(q^13))")


def test_char_json_and_csv(capsys, schema):
    code, out, _ = run(capsys, ["char", "--group", "trivial", "--truncate", "4"])
    data = json.loads(out)
    jsonschema.validate(data, schema)
    assert data["series"]["coeffs"] == [1, 3, 4, 7, 13]
    code, out, _ = run(capsys, ["char", "--group", "k4", "--truncate", "4", "--format", "csv"])
    assert out.splitlines() == ["weight,dimension", "0,1", "1,0", "2,1", "3,1", "4,4"]


def test_mode_products(capsys, schema):
    code, out, _ = run(capsys, ["mode-product", "J", "3", "J"])
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema)
    coeffs = {(tuple(t["partition"]), t["exponent"]): t["coeff"].split(" ")[0] for t in data["result"]}
    assert coeffs[((3, 1), 0)] == "192"
    code, out, _ = run(capsys, ["mode-product", "omega", "1", "J", "--format", "text"])
    assert out.splitlines() == ["(1) a(-1)a(-1)a(-1)a(-1)1", "(3) a(-2)a(-2)1", "(-4) a(-3)a(-1)1"]


def test_inline_state(capsys):
    e = json.dumps([{"partition": [], "exponent": 1, "coeff": "1"}])
    f = json.dumps([{"partition": [], "exponent": -1, "coeff": "1"}])
    code, out, _ = run(capsys, ["mode-product", e, "1", f, "--format", "text"])
    assert code == 0 and out.strip() == "(1) 1"


def test_invariants_and_primaries(capsys, schema):
    code, out, _ = run(capsys, ["invariants", "--group", "a4", "--weight", "4"])
    data = json.loads(out)
    jsonschema.validate(data, schema)
    assert data["dimension"] == 2
    code, out, _ = run(capsys, ["primaries", "--group", "a4", "--weight", "9"])
    data = json.loads(out)
    jsonschema.validate(data, schema)
    assert data["dimension"] == 1


def test_verify_command(capsys, schema):
    code, out, _ = run(capsys, ["verify", "--scenario", "j3j"])
    assert code == 0
    data = json.loads(out)
    jsonschema.validate(data, schema)
    assert {c["status"] for c in data["checks"]} == {"pass"}
    code, out, _ = run(capsys, ["verify", "--scenario", "u16", "--truncate", "10", "--format", "text"])
    assert code == 0 and "insufficient-truncation" in out


def test_usage_errors(capsys):
    assert run(capsys, ["char", "--group", "a5"])[0] == 2
    assert run(capsys, ["frobnicate"])[0] == 2
    assert run(capsys, ["mode-product", "nope", "1", "J"])[0] == 2
    assert run(capsys, ["verify", "--scenario", "nope"])[0] == 2
    assert run(capsys, ["invariants", "--weight", "-1"])[0] == 2


def test_computation_error(capsys):
    code, _, err = run(capsys, ["mode-product", "J", "-9", "J", "--truncate", "10"])
    assert code == 1 and "TruncationError" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# pinned settings\ngroup = k4\ntruncation = 4\nformat = csv\n")
    code, out, _ = run(capsys, ["char", "--config", str(cfg)])
    assert out.splitlines()[-1] == "4,4"
    code, out, _ = run(capsys, ["char", "--config", str(cfg), "--group", "a4"])
    assert out.splitlines()[-1] == "4,2"
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(capsys, ["char", "--config", str(bad)])[0] == 2


def test_deterministic_output(capsys):
    first = run(capsys, ["invariants", "--group", "a4", "--weight", "6"])[1]
    second = run(capsys, ["invariants", "--group", "a4", "--weight", "6"])[1]
    assert first == second


def test_version(capsys):
    with pytest.raises(SystemExit):
        from latvoa.cli import build_parser

        build_parser().parse_args(["--version"])
    assert "cocycle: trivial" in capsys.readouterr().out
