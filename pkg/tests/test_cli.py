import json

import pytest

from dioph.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cf_sqrt2(capsys):
    code, out, err = run_cli(capsys, "cf", "--oracle", "const:sqrt2", "--depth", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["quotients"] == ["1", "2", "2", "2", "2", "2"]
    assert doc["terminated"] is False
    assert doc["convergents"][-1] == {"k": 5, "p": "99", "q": "70"}


def test_mu_golden(capsys):
    code, out, _ = run_cli(capsys, "mu", "--oracle", "const:golden", "--depth", "50")
    assert code == 0
    doc = json.loads(out)
    assert doc["mu_lower"].startswith("2.0411053659")
    assert doc["witness_index"] == 25


def test_lemma_case_ii(capsys):
    code, out, _ = run_cli(
        capsys,
        "lemma", "--oracle", "affine:1/-1:const:sqrt2",
        "--c", "3/2", "--c-prime", "19/10", "--eps", "1/10", "--Q", "10",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"] == "II"
    assert doc["witness"] == {"p": "4", "q": "10"}


def test_lemma_case_i(capsys):
    code, out, _ = run_cli(
        capsys,
        "lemma", "--oracle", "cf:[0;3,1000000]",
        "--c", "3/2", "--c-prime", "19/10", "--eps", "1/2", "--Q", "1000000",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"] == "I"
    assert doc["witness"]["u"] == "3"
    assert doc["witness"]["bound_u"] == "45/1"


def test_build_entries(capsys):
    code, out, _ = run_cli(
        capsys,
        "build", "--oracle", "const:sqrt2", "--mu", "21/10",
        "--alpha", "1/2", "--beta", "3", "--n", "50:60",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["shift"] == "1"
    assert len(doc["entries"]) == 11
    assert all(e["case"] == "II" for e in doc["entries"])


def test_apery_json(capsys):
    code, out, _ = run_cli(capsys, "apery", "--s", "3", "--n-max", "2")
    assert code == 0
    doc = json.loads(out)
    assert [r["a"] for r in doc["rows"]] == ["1", "5", "73"]
    assert doc["rows"][2]["u"] == "1168"


def test_apery_csv(capsys):
    code, out, _ = run_cli(capsys, "--output", "csv", "apery", "--s", "2", "--n-max", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,a,b,u,v,scale"
    assert lines[1] == "0,1,0,1,0,1"


def test_build_csv_feeds_multi_tau(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "--output", "csv",
        "build", "--oracle", "const:sqrt2", "--mu", "21/10",
        "--alpha", "1/2", "--beta", "3", "--n", "50:80",
    )
    assert code == 0
    forms = tmp_path / "forms.csv"
    forms.write_text(out)
    code, out, _ = run_cli(
        capsys,
        "multi", "tau", "--forms-csv", str(forms), "--oracle", "const:sqrt2",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["decayed"] is True
    assert 0 < float(doc["tau_hat"]) < 1


def test_output_is_deterministic(capsys):
    argv = ("multi", "omega0", "--point", "rat:1,const:zeta3", "--q-bound", "10000")
    code1, out1, _ = run_cli(capsys, *argv)
    code2, out2, _ = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    doc = json.loads(out1)
    assert doc["best_q"] == "5"
    assert doc["omega_best"].startswith("2.8439219680")


def test_bad_params_exit_code(capsys):
    code, out, err = run_cli(
        capsys,
        "lemma", "--oracle", "const:sqrt2",
        "--c", "2", "--c-prime", "3", "--eps", "1/100", "--Q", "50",
    )
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


def test_resource_limit_exit_code(capsys):
    code, _, err = run_cli(capsys, "cf", "--oracle", "cf:liouville:10", "--depth", "20")
    assert code == 3
    assert "error:" in err


def test_certificate_exit_code(capsys):
    code, _, err = run_cli(
        capsys,
        "lemma", "--oracle", "affine:1/-1:const:golden",
        "--c", "3/2", "--c-prime", "19/10",
        "--eps", "499999/1000000", "--Q", "3000",
    )
    assert code == 4
    assert "NEITHER_CASE_CERTIFIED" in err


def test_csv_rejected_where_unsupported(capsys):
    code, _, err = run_cli(
        capsys, "--output", "csv", "mu", "--oracle", "const:sqrt2", "--depth", "5"
    )
    assert code == 2
    assert "only json" in err


def test_suite_single_criterion(capsys):
    code, out, err = run_cli(capsys, "suite", "--seed", "20260823", "--criterion", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["all_passed"] is True
    assert doc["criteria"][0]["index"] == 4
    assert "ACCEPTANCE 4" in err and "PASS" in err
