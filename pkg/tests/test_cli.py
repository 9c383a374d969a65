import io
import json
import subprocess
import sys

import pytest

from cliffcayley.cli import dispatch


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def manifest_of(err):
    return json.loads(err.strip().splitlines()[-1])


def test_count_stabilizer_states():
    code, out, err = run("count-stabilizer-states", "2")
    assert code == 0 and out == "60\n"
    m = manifest_of(err)
    assert m["exit_code"] == 0 and m["argv"] == ["count-stabilizer-states", "2"]
    assert set(m) >= {"version", "seed", "elapsed_s", "stdout_sha256", "files"}


def test_enumerate():
    assert run("enumerate", "--gens", "H1,H2,C12,C21", "--qubits", "2")[1] == "2304\n"
    assert run("enumerate", "--gens", "H1,H2,C12,C21", "--qubits", "2", "--mod-phase")[1] == "1152\n"
    code, out, _ = run("enumerate", "--gens", "H1,P1", "--json")
    assert code == 0 and json.loads(out)["order"] == 192


@pytest.mark.parametrize(
    "argv",
    [
        ["enumerate", "--gens", "C11"],
        ["enumerate", "--gens", "X1"],
        ["frobnicate"],
        [],
        ["shortest-word", "--gens", "H1", "--target", "H1 (P1"],
        ["stabilizer", "--group", "H1", "--state", "generic x"],
    ],
)
def test_usage_errors_exit_two(argv):
    assert run(*argv)[0] == 2


def test_domain_errors_exit_one():
    assert run("enumerate", "--gens", "H1,P1", "--cap", "10")[0] == 1
    assert run("enumerate", "--gens", "H3", "--qubits", "2")[0] == 1
    assert run("isomorphic", "/nonexistent/a.json", "/nonexistent/b.json")[0] == 1


def test_verify_relations():
    code, out, _ = run("verify-relations", "--qubits", "3")
    assert code == 0
    assert out.splitlines() and all(line.endswith("PASS") for line in out.splitlines())


def test_shortest_word():
    code, out, _ = run("shortest-word", "--gens", "H1,H2,P1,P2,C12,C21", "--qubits", "2",
                       "--target", "C12 H2 C12 P2 C12 P2^3 H2", "--mod-phase")
    assert code == 0 and out == "1\tP1\n"


def test_diameter():
    assert run("diameter", "--gens", "H1,P1")[1] == "16\n"
    assert run("diameter", "--gens", "H1,P1", "--mod-phase", "--sources", "identity")[1] == "6\n"


def test_stabilizer():
    code, out, _ = run("stabilizer", "--group", "H1,P1", "--state", "|0>", "--mod-phase")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "4" and lines[1] == "1"


def test_reachability_export_and_isomorphic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code, out, err = run("reachability", "--group", "H1,H2,C12,C21", "--state", "|00>", "--output", str(a))
    assert code == 0 and out.startswith("24 vertices")
    assert str(a) in manifest_of(err)["files"]
    assert json.loads(a.read_text())["num_vertices"] == 24
    run("reachability", "--group", "H1,H2,C12,C21", "--state", "|11>", "--output", str(b))
    code, out, _ = run("isomorphic", str(a), str(b))
    assert code == 0 and out.startswith("isomorphic")


def test_components_and_overlay():
    code, out, _ = run("components", "--group", "H1,H2,P1,P2,C12,C21", "--state", "|00>",
                       "--labels", "H1,H2,C12,C21")
    assert code == 0 and sorted(map(int, out.split())) == [24, 36]
    code, out, _ = run("overlay", "--group", "H1,H2,P1,P2,C12,C21", "--state", "|00>",
                       "--core", "H1,H2,C12,C21", "--overlay", "P1,P2", "--json")
    obj = json.loads(out)
    assert code == 0 and sorted(obj["sizes"]) == [24, 36] and obj["complete"]


def test_export_dot():
    code, out, _ = run("export", "--gens", "H1", "--format", "dot")
    assert code == 0 and out.startswith("digraph G {") and out.rstrip().endswith("}")


def test_manifest_file(tmp_path):
    path = tmp_path / "m.json"
    code, _, err = run("count-stabilizer-states", "1", "--manifest", str(path))
    assert code == 0 and err == ""
    assert json.loads(path.read_text())["exit_code"] == 0


def test_survey_command():
    code, out, _ = run("table1")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 30
    assert lines[1].split() == ["{H1}", "2", "1", "-", "-"]
    assert lines[-1].split() == ["{H1,H2,P1,P2,C12,C21}", "92160", "19", "8", "11"]


def test_outputs_are_byte_identical():
    argv = ["reachability", "--group", "H1,H2,C12,C21", "--qubits", "3", "--state", "ghz 3", "--format", "dot"]
    assert run(*argv)[1] == run(*argv)[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cliffcayley", "count-stabilizer-states", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1080\n"
