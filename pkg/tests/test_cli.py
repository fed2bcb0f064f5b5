import copy
import io
import json

import pytest

from dlpg.certificate import ACCEPT, DIAGRAM_LAYER, SCHEMA, SURJECTION_LAYER, WITNESS_LAYER, check_certificate
from dlpg.cli import EXIT_ERROR, EXIT_INVALID, EXIT_VALID, RunConfig, main

PLATEAU = [{"name": "x", "lo": 3, "hi": 9, "vals": [3, 3, 6, 6, 6, 9, 9]}]


def run(argv, stdin=""):
    out = io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def certificate(text):
    code, out = run(["decide", "--json", text])
    assert code == EXIT_INVALID
    return json.loads(out)["certificate"]


@pytest.mark.parametrize(
    "text, code",
    [
        ("1 <= x^l x", EXIT_INVALID),
        ("1 <= x^l \\/ x", EXIT_VALID),
        ("1 <= x x^l", EXIT_VALID),
        ("x y = y x", EXIT_INVALID),
        ("x <=", EXIT_ERROR),
    ],
)
def test_decide_exit_codes(text, code):
    assert run(["decide", text])[0] == code


def test_decide_text_report():
    code, out = run(["decide", "1 <= x^l x"])
    assert out.startswith("INVALID: 1 <= x^l x")
    assert "rank(1) =" in out and "witness x:" in out


def test_cap_exceeded_is_an_error():
    code, out = run(["decide", "--cap", "10", "(x /\\ y)^r = x^r \\/ y^r"])
    assert code == EXIT_ERROR and "ERROR" in out


def test_certificate_shape():
    cert = certificate("1 <= x^l x")
    assert set(cert) >= {"equation", "intentional", "q", "rank", "diagram", "failure_point", "witness"}
    assert len(cert["rank"]) == 6
    assert cert["witness"][0]["name"] == "x"
    assert cert["original_witness"]["point"] is not None


@pytest.mark.parametrize("text", ["1 <= x^l x", "x^l = x^r", "x y = y x", "x <= x x"])
def test_check_accepts_decide_output(text, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(certificate(text)))
    code, out = run(["check", str(path)])
    assert code == ACCEPT and out.startswith("ACCEPT")


def test_check_reads_stdin_and_full_record():
    code, out = run(["decide", "--json", "1 <= x^l x"])
    assert run(["check"], stdin=out)[0] == ACCEPT


def test_tampered_failure_point():
    cert = certificate("1 <= x^l x")
    cert["failure_point"] += 1
    assert check_certificate(cert).code == SURJECTION_LAYER


def test_deleted_marked_pair():
    cert = certificate("1 <= x^l x")
    assert cert["diagram"]["yleft"]
    cert["diagram"]["yleft"].pop()
    assert check_certificate(cert).code == DIAGRAM_LAYER


def test_tampered_rank():
    cert = certificate("1 <= x^l x")
    cert["rank"][0][1] = 1
    assert check_certificate(cert).code == SURJECTION_LAYER


def test_tampered_witness():
    cert = certificate("1 <= x^l x")
    w = cert["witness"][0]
    w.update(lo=0, hi=-1, vals=[])
    assert check_certificate(cert).code == WITNESS_LAYER


def test_tampered_original_witness():
    cert = certificate("x y = y x")
    bad = copy.deepcopy(cert)
    for f in bad["original_witness"]["valuation"]:
        f.update(lo=0, hi=-1, vals=[])
    assert check_certificate(bad).code == WITNESS_LAYER


@pytest.mark.parametrize("mutate", [lambda c: c.pop("rank"), lambda c: c.update(q="four"), lambda c: c["witness"].pop()])
def test_schema_violations(mutate):
    cert = certificate("1 <= x^l x")
    mutate(cert)
    assert check_certificate(cert).code == SCHEMA


def test_check_rejects_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["check", str(path)])[0] == SCHEMA


def test_batch_mode():
    code, out = run(["decide"], stdin="1 <= x^l \\/ x\n# comment\n\n1 <= x^l x\n")
    assert code == EXIT_INVALID
    assert out.splitlines()[0] == "VALID: 1 <= x^l \\/ x"
    code, out = run(["decide", "--json", "-"], stdin="1 <= 1\n1 <= x x^l\n")
    assert code == EXIT_VALID
    assert [json.loads(line)["verdict"] for line in out.splitlines()] == ["VALID", "VALID"]
    assert run(["decide"], stdin="1 <= 1\nx <=\n")[0] == EXIT_ERROR


def test_fuzz():
    code, out = run(["fuzz", "--json", "--budget", "500", "1 <= x^l x"])
    assert code == 1
    doc = json.loads(out)
    assert doc["found"] and doc["valuation"][0]["name"] == "x"
    code, out = run(["fuzz", "--json", "--budget", "300", "1 <= x x^l"])
    assert code == 0 and json.loads(out)["found"] is False


def test_fuzz_is_seed_deterministic():
    a = run(["fuzz", "--json", "--seed", "4", "x y = y x"])[1]
    b = run(["fuzz", "--json", "--seed", "4", "x y = y x"])[1]
    assert a == b


def test_eval():
    code, out = run(["eval", "x^l x", json.dumps(PLATEAU), "7"])
    assert code == 0 and out.strip() == "5"
    code, out = run(["eval", "x", json.dumps({"x": PLATEAU[0]}), "5"])
    assert out.strip() == "6"
    assert run(["eval", "x^l x", "[]", "7"])[0] == EXIT_ERROR


def test_eval_from_file(tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps(PLATEAU))
    assert run(["eval", "x^l x", f"@{path}", "7"])[1].strip() == "5"


def test_normalize():
    code, out = run(["normalize", "x = x"])
    doc = json.loads(out)
    assert code == 0 and set(doc["intentional"]) == {"vars", "words"}
    code, out = run(["normalize", "--trace", "x <= y"])
    assert [s["rule"] for s in json.loads(out)["trace"]][0] == "push_inverses"


def test_template():
    code, out = run(["template", "1 <= x^l x"])
    assert code == 0 and json.loads(out)["size"] == 6
    assert run(["template", "--cap", "3", "1 <= x^l x"])[0] == EXIT_ERROR


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(template_cap=0)
    assert run(["decide", "--threads", "0", "1 <= 1"])[0] == EXIT_ERROR


def test_threads_flag_gives_same_certificate():
    a = json.loads(run(["decide", "--json", "x y = y x"])[1])
    b = json.loads(run(["decide", "--json", "--threads", "2", "x y = y x"])[1])
    assert a == b
