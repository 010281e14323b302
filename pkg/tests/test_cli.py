import json
import subprocess
import sys

import pytest

from taylortower.cli import main, parse_window, run, UsageError

BAD = json.dumps({"degrees": [{"degree": k, "rank": 1} for k in range(3)],
                  "differentials": [{"degree": 1, "entries": [[0, 0, 1]]},
                                    {"degree": 2, "entries": [[0, 0, 1]]}]})


def result(argv):
    code, doc = run(argv)
    assert code == 0, doc
    return doc["result"]


def test_homology_of_circle():
    r = result(["homology", "--complex", "circle"])
    assert r["homology"] == [{"degree": 0, "rank": 1, "torsion": []},
                             {"degree": 1, "rank": 1, "torsion": []}]


def test_partition_four():
    r = result(["partition", "--n", "4"])
    assert (r["degree"], r["rank"]) == (1, 6)


def test_coefficient_of_square():
    r = result(["coefficient", "--functor", '{"op":"tensor_power","n":2}', "--n", "2"])
    assert r["rank"] == 2 and r["degrees"] == [0]
    assert r["character"]["per_degree"]["0"] == {"1+1": 2, "2": 0}


def test_lie_four():
    r = result(["lie", "--n", "4"])
    assert r["rank"] == 6 and set(r["action"]) == {"s", "c"}


def test_tower_example():
    r = result(["tower", "--functor", "tensor_power:2", "--n", "1", "--at", "S1"])
    assert r["verdict"] == "stabilized-to-zero"


def test_bad_differential_exit_2():
    code, doc = run(["homology", "--complex", BAD])
    assert code == 2 and doc["degree"] == 2


def test_unknown_flag_exit_2(capsys):
    assert run(["partition", "--n", "4", "--bogus"])[0] == 2


def test_nonpositive_budget_rejected():
    assert run(["partition", "--n", "3", "--budget", "0"])[0] == 2


def test_budget_exit_3():
    code, doc = run(["tower", "--functor", "trunc_tensor_alg:3", "--n", "1", "--at", "S1",
                     "--budget", "10", "--model", "generic"])
    assert code == 3 and "partial" in doc


def test_window_parsing():
    assert parse_window("-2,3") == (-2, 3)
    assert parse_window(None) is None
    with pytest.raises(UsageError):
        parse_window("3,1")


@pytest.mark.parametrize("argv", [
    ["crosseffect", "--functor", "tensor_power:2", "--n", "2", "--at", "S0", "--at", "S1"],
    ["multilinearize", "--functor", "tensor_power:2", "--n", "2"],
    ["layer", "--functor", "tensor_power:2", "--n", "2", "--at", "S0"],
    ["delta", "--rep", "trivial:2", "--at", "S0", "--ring", "Q"],
    ["roundtrip", "--rep", "trivial:2", "--at", "S0", "--at", "S1", "--ring", "Q"],
    ["compare-partition-lie", "--n", "3"],
    ["config", "--n", "2", "--based"],
    ["identity-derivative", "--n", "3"],
    ["atheory", "--n", "3", "--consistency"],
    ["character", "--rep", "regular:3"],
    ["group-homology", "--rep", "trivial:2", "--ring", "Fp:2", "--cap", "3"],
    ["agreement", "--map", "trunc_tensor_alg:2->trunc_tensor_alg:3", "--n", "2"],
], ids=lambda a: a[0])
def test_every_command_runs(argv):
    result(argv)


def test_agreement_table():
    r = result(["agreement", "--map", "trunc_tensor_alg:2->trunc_tensor_alg:3", "--n", "2"])
    assert r["connectivity"] == {"1": 2, "2": 5, "3": 8}
    assert r["c"] == 1


def test_table_format(capsys):
    assert main(["homology", "--complex", "S2", "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert "result.homology[0].degree" in out


def test_output_is_byte_identical():
    argv = [sys.executable, "-m", "taylortower", "compare-partition-lie", "--n", "4"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["result"]["ok"]
