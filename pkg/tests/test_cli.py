import json
import subprocess
import sys

import numpy as np
import pytest

from taulift import catalog, cli
from taulift.semidirect import hvec


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def nilpotent_config(**overrides):
    ex = catalog.load("nilpotent3")
    labels = ["e1", "e2", "e3", "e4"]
    doc = {
        "dim": 4,
        "labels": labels,
        "brackets": [
            {"i": "e4", "j": "e1", "coeffs": {"e2": 1}},
            {"i": "e4", "j": "e2", "coeffs": {"e3": 1}},
        ],
        "form": ex.form.gram.tolist(),
        "split": {"plus": ["e2", "e3", "e4"], "minus": ["e1"]},
        "representation": {"rep_dim": 4, "matrices": ex.rep.rho.tolist()},
        "side": "+",
        "K": {"e1.1": 0.7, "e2.2": 0.5, "e4.2": 0.9},
        "z0": {"e1.1": 0.7, "e2.1": -0.4, "e3.1": 0.3, "e4.1": 1.1, "e2.2": 0.5, "e3.2": -0.2, "e4.2": 0.9},
        "times": {"start": 0, "stop": 1, "steps": 10},
    }
    doc.update(overrides)
    return doc


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.mark.parametrize("name", catalog.NAMES)
def test_verify_examples(capsys, name):
    code, out, _ = run(capsys, "verify", "--example", name)
    assert code == 0 and out.rstrip().endswith("PASS")
    assert "base form not Ad-invariant; lifted form invariant" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--example", "sl2c", "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["gamma_rank_plus"] == rep["gamma_rank_minus"] == 6
    assert rep["base_form_invariance_witness"] > 1e-3


def test_flags_before_subcommand(capsys):
    code, out, _ = run(capsys, "--example", "a6_34", "--format", "json", "verify")
    assert code == 0 and json.loads(out)["name"] == "a6_34"


def test_verify_config_matches_example(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--config", write(tmp_path, nilpotent_config()))
    assert code == 0 and out.rstrip().endswith("PASS")


def test_config_form_not_symmetric(tmp_path, capsys):
    form = nilpotent_config()["form"]
    form[0][2] = 0.0
    code, _, err = run(capsys, "verify", "--config", write(tmp_path, nilpotent_config(form=form)))
    assert code == 1 and "$.form" in err and "form not symmetric" in err


def test_config_json_paths(tmp_path, capsys):
    doc = nilpotent_config()
    doc["brackets"][1]["coeffs"] = {"e7": 1}
    code, _, err = run(capsys, "verify", "--config", write(tmp_path, doc))
    assert code == 1 and "$.brackets[1].coeffs.e7" in err
    doc = nilpotent_config()
    del doc["split"]["minus"]
    code, _, err = run(capsys, "verify", "--config", write(tmp_path, doc))
    assert code == 1 and "$.split.minus" in err
    doc = nilpotent_config(z0={"e9.2": 1})
    code, _, err = run(capsys, "verify", "--config", write(tmp_path, doc))
    assert code == 1 and "$.z0.e9.2" in err


def test_config_bad_jacobi(tmp_path, capsys):
    doc = nilpotent_config()
    doc["brackets"].append({"i": "e1", "j": "e3", "coeffs": {"e1": 1}})
    doc.pop("representation")
    code, out, _ = run(capsys, "verify", "--config", write(tmp_path, doc))
    assert code == 1 and "jacobi" in out and out.rstrip().endswith("FAIL")


def test_config_not_a_representation(tmp_path, capsys):
    doc = nilpotent_config()
    doc["representation"]["matrices"][0][0][1] = 1.0
    code, _, err = run(capsys, "verify", "--config", write(tmp_path, doc))
    assert code == 1 and "$.representation.matrices" in err


def test_config_invalid_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{")
    code, _, err = run(capsys, "verify", "--config", str(p))
    assert code == 1 and "invalid JSON" in err


def test_solve_both(capsys):
    code, out, err = run(capsys, "solve", "--example", "nilpotent3", "--method", "both", "--t", "0:1:20", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["max_gap"] < 1e-6 and "max gap" in err
    assert len(doc["times"]) == 21 and doc["columns"][1] == "e1.1"


def test_solve_config_uses_newton(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--config", write(tmp_path, nilpotent_config()), "--format", "json")
    doc = json.loads(out)
    ex = catalog.load("nilpotent3")
    ref = np.array([ex.reference_solution(ex.z0, t) for t in doc["times"]])
    assert code == 0 and np.abs(np.array(doc["trajectories"]["aks"]) - ref).max() < 1e-9


def test_solve_a6_rotation(capsys):
    code, out, _ = run(capsys, "solve", "--example", "a6_34", "--t", "0:2:40")
    assert code == 0
    cols, t, states = cli.read_trajectory_csv(out)
    ex = catalog.load("a6_34")
    x20, x30, x60 = ex.z0[1], ex.z0[2], ex.z0[5]
    want = x20 * np.cos(t * x60) + x30 * np.sin(t * x60)
    assert np.abs(states[:, cols.index("e2.1") - 1] - want).max() < 1e-10


def test_solve_zero_initial_condition(tmp_path, capsys):
    doc = nilpotent_config(K={}, z0={})
    code, out, _ = run(capsys, "solve", "--config", write(tmp_path, doc), "--method", "both", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["max_gap"] == 0.0
    assert not np.any(np.array(d["trajectories"]["aks"]))


def test_solve_inadmissible_k(tmp_path, capsys):
    k = {"e1.1": 0.7, "e1.2": 0.3, "e2.2": 0.5}
    z0 = dict(nilpotent_config()["z0"], **{"e1.2": 0.3})
    code, _, err = run(capsys, "solve", "--config", write(tmp_path, nilpotent_config(K=k, z0=z0)))
    assert code == 2 and "failing component: e1.2" in err


def test_solve_z0_off_slice(tmp_path, capsys):
    z0 = dict(nilpotent_config()["z0"], **{"e1.1": 0.2})
    code, _, err = run(capsys, "solve", "--config", write(tmp_path, nilpotent_config(z0=z0)))
    assert code == 2


def test_solve_needs_representation(tmp_path, capsys):
    doc = nilpotent_config()
    doc.pop("representation")
    code, _, err = run(capsys, "solve", "--config", write(tmp_path, doc))
    assert code == 1 and "$.representation" in err
    code, out, _ = run(capsys, "solve", "--config", write(tmp_path, doc), "--method", "oracle")
    assert code == 0 and out.startswith("t,e1.1")


def test_bivector_identity_vanishes(capsys):
    code, out, _ = run(capsys, "bivector", "--example", "sl2c", "--side", "-")
    doc = json.loads(out)
    assert code == 0 and doc["vanishes"] and doc["antisymmetry"] < 1e-15


def test_bivector_nilpotent_entries(capsys):
    code, out, _ = run(capsys, "bivector", "--example", "nilpotent3", "--point", "e4.1=1")
    t = np.array(json.loads(out)["tensor"])
    e = np.eye(4)
    want = (0.5 * (np.outer(hvec(e[2], 0 * e[0]), hvec(0 * e[0], e[2])) - np.outer(hvec(0 * e[0], e[2]), hvec(e[2], 0 * e[0])))
            - np.outer(hvec(0 * e[0], e[2]), hvec(e[1], 0 * e[0])) + np.outer(hvec(e[1], 0 * e[0]), hvec(0 * e[0], e[2])))
    assert code == 0 and np.abs(t - want).max() < 1e-12


def test_bivector_outside_factor(capsys):
    code, _, err = run(capsys, "bivector", "--example", "nilpotent3", "--point", "e1.1=1")
    assert code == 2 and "not in H+" in err


def test_dressing(capsys):
    code, out, _ = run(capsys, "dressing", "--example", "nilpotent3", "--side", "-",
                       "--point", "e1.1=0.6,e1.2=0.4,e2.2=-0.9,e4.2=1.1", "--vector", "e2.1=0.2,e4.1=-0.5,e3.2=0.3")
    doc = json.loads(out)
    assert code == 0 and doc["gap"] < 1e-8
    assert np.allclose(doc["generator"], hvec(np.zeros(4), [0, -0.4 * -0.5, 0, 0.4 * 0.2]))


def test_dressing_vector_in_wrong_factor(capsys):
    code, _, err = run(capsys, "dressing", "--example", "nilpotent3", "--point", "e4.1=0.5", "--vector", "e4.1=1")
    assert code == 2 and "not in h-" in err


def test_example_and_config_exclusive(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--example", "sl2c", "--config", write(tmp_path, nilpotent_config())])
    assert exc.value.code == 2


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and [line.split("\t")[0] for line in out.splitlines()] == list(catalog.NAMES)
    code, out, _ = run(capsys, "catalog", "list", "--format", "json")
    assert set(json.loads(out)) == set(catalog.NAMES)


def test_output_is_deterministic(tmp_path):
    outs = []
    for i in range(2):
        p = tmp_path / f"o{i}.json"
        code = cli.main(["solve", "--example", "sl2c", "--method", "both", "--t", "0:1:10", "--format", "json", "--out", str(p)])
        assert code == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_csv_round_trip_bit_exact(capsys):
    code, out, _ = run(capsys, "solve", "--example", "a6_34", "--t", "0:1.7:13", "--format", "json")
    doc = json.loads(out)
    states = np.array(doc["trajectories"]["aks"])
    text = cli.trajectory_csv(catalog.load("a6_34").algebra.labels, np.array(doc["times"]), states)
    _, t, back = cli.read_trajectory_csv(text)
    assert np.array_equal(back, states) and np.array_equal(t, np.array(doc["times"]))


def test_parse_helpers():
    assert len(cli.parse_t("0:2:200")) == 201
    with pytest.raises(ValueError):
        cli.parse_t("0:2")
    v = cli.parse_coords('{"e2.1": 1.5}', ["e1", "e2"])
    assert np.array_equal(v, [0, 1.5, 0, 0])
    assert np.array_equal(cli.parse_coords("e1.2=2, e2.1=-1", ["e1", "e2"]), [0, -1, 2, 0])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "taulift", "catalog", "list"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("nilpotent3\t")
