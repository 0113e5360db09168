import json
import math

import numpy as np
import pytest

from solvstate import DomainError, FockState
from solvstate.cli import (
    EXIT_ASSERTION,
    EXIT_CONVERGENCE,
    EXIT_DOMAIN,
    EXIT_OK,
    main,
    parse_complex,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseComplex:
    def test_forms(self):
        assert parse_complex("0.7+0.2i") == 0.7 + 0.2j
        assert parse_complex("0.4") == 0.4 + 0.0j
        assert parse_complex("-1.5i") == -1.5j
        assert parse_complex("i") == 1.0j
        assert parse_complex("-0.3-0.2i") == -0.3 - 0.2j

    def test_rejects_garbage(self):
        with pytest.raises(DomainError):
            parse_complex("stuff")


class TestStateCommand:
    def test_point_mass_on_level_three(self, capsys):
        code, out, _ = run_cli(capsys, "state", "gk", "--z", "0", "--k", "3",
                               "--lambda", "4")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["state"]["offset"] == 3
        assert doc["state"]["coefficients"] == [[1.0, 0.0]]
        assert doc["summary"]["mean_energy"] == pytest.approx(21.0)

    def test_kp_disk_state_matches_closed_form(self, capsys):
        code, out, _ = run_cli(capsys, "state", "kp", "--xi", "0.4", "--k", "0",
                               "--lambda", "4")
        assert code == EXIT_OK
        doc = json.loads(out)
        state = FockState.from_json_dict(doc["state"])
        lam, xi = 4.0, 0.4
        n = np.arange(state.size)
        from scipy.special import gammaln
        closed = (1 - xi * xi) ** ((lam + 1) / 2) * xi ** n * np.exp(
            0.5 * (gammaln(n + lam + 1) - gammaln(n + 1) - gammaln(lam + 1)))
        assert np.max(np.abs(state.coefficients - closed)) < 1e-12

    def test_check_eigen_flags_added_state(self, capsys):
        code, out, _ = run_cli(capsys, "state", "gk", "--z", "0.7+0.2i",
                               "--k", "1", "--lambda", "4", "--check-eigen")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["summary"]["eigen_residual"] > 0.01
        assert doc["summary"]["is_lowering_eigenstate"] is False

    def test_check_eigen_passes_plain_state(self, capsys):
        code, out, _ = run_cli(capsys, "state", "gk", "--z", "0.7+0.2i",
                               "--k", "0", "--lambda", "4", "--check-eigen")
        doc = json.loads(out)
        assert doc["summary"]["is_lowering_eigenstate"] is True

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "state", "kp", "--xi", "1.2",
                               "--lambda", "4")
        assert code == EXIT_DOMAIN
        assert "domain error" in err

    def test_convergence_exit_code(self, capsys):
        # nested-sum route far outside its validity region
        code, _, err = run_cli(capsys, "state", "kp", "--Z", "2.5",
                               "--lambda", "4", "--nested")
        assert code == EXIT_CONVERGENCE
        assert "convergence" in err

    def test_deterministic_output(self, capsys):
        _, out1, _ = run_cli(capsys, "state", "gk", "--z", "0.5+0.1i",
                             "--k", "1", "--lambda", "4")
        _, out2, _ = run_cli(capsys, "state", "gk", "--z", "0.5+0.1i",
                             "--k", "1", "--lambda", "4")
        assert out1 == out2

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(capsys, "state", "gk", "--z", "0.5", "--k", "0",
                               "--lambda", "4", "--format", "csv")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "n,level,re,im,probability"
        assert len(lines) > 2

    def test_output_file(self, capsys, tmp_path):
        dest = tmp_path / "state.json"
        code, out, _ = run_cli(capsys, "state", "gk", "--z", "0.3",
                               "--lambda", "4", "--output", str(dest))
        assert code == EXIT_OK
        assert out == ""
        doc = json.loads(dest.read_text())
        assert doc["meta"]["command"] == "state"

    def test_custom_spectrum_inline_json(self, capsys):
        doc = '{"kind": "custom", "energies": [0, 1.0, 2.5, 4.5, 7.0, 10.0]}'
        code, out, _ = run_cli(capsys, "state", "gk", "--z", "0.4",
                               "--spectrum", doc)
        assert code == EXIT_OK
        state = FockState.from_json_dict(json.loads(out)["state"])
        assert state.norm() == pytest.approx(1.0)

    def test_kp_nested_route_on_generic_spectrum(self, capsys):
        code, out, _ = run_cli(capsys, "state", "kp", "--Z", "0.3",
                               "--spectrum", '{"kind": "harmonic"}')
        assert code == EXIT_OK
        state = FockState.from_json_dict(json.loads(out)["state"])
        # coherent-state coefficients exp(-|Z|^2/2) Z^n / sqrt(n!)
        from scipy.special import gammaln
        n = np.arange(state.size)
        exact = np.exp(-0.045 + n * math.log(0.3) - 0.5 * gammaln(n + 1.0))
        assert np.max(np.abs(state.coefficients - exact)) < 1e-10

    def test_paper_literal_state_differs(self, capsys):
        args = ["state", "kp", "--xi", "0.4", "--k", "1", "--lambda", "4"]
        _, out_std, _ = run_cli(capsys, *args)
        _, out_lit, _ = run_cli(capsys, *args, "--paper-literal")
        c_std = json.loads(out_std)["state"]["coefficients"]
        c_lit = json.loads(out_lit)["state"]["coefficients"]
        assert c_std != c_lit

    def test_truncation_cap_env(self, capsys, monkeypatch):
        monkeypatch.setenv("SOLVSTATE_MAX_N", "12")
        code, out, _ = run_cli(capsys, "state", "gk", "--z", "1.5",
                               "--lambda", "1", "--tail-eps", "1e-30")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert len(doc["state"]["coefficients"]) <= 12


class TestOverlapCommand:
    def test_identical_labels(self, capsys):
        code, out, _ = run_cli(capsys, "overlap", "gk", "--z1", "0.5",
                               "--z2", "0.5", "--k", "1", "--lambda", "4")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["series"]["re"] == pytest.approx(1.0, abs=1e-12)
        assert doc["difference"] < 1e-12

    def test_swapped_labels_conjugate(self, capsys):
        args = ["overlap", "gk", "--k", "0", "--lambda", "4"]
        _, out12, _ = run_cli(capsys, *args, "--z1", "0.5+0.2i", "--z2", "0.3")
        _, out21, _ = run_cli(capsys, *args, "--z1", "0.3", "--z2", "0.5+0.2i")
        d12, d21 = json.loads(out12), json.loads(out21)
        assert d12["series"]["re"] == pytest.approx(d21["series"]["re"], abs=1e-12)
        assert d12["series"]["im"] == pytest.approx(-d21["series"]["im"], abs=1e-12)

    def test_gk_closed_form_present_for_equal_alpha(self, capsys):
        _, out, _ = run_cli(capsys, "overlap", "gk", "--z1", "0.5", "--z2",
                            "0.8", "--k", "1", "--lambda", "4")
        doc = json.loads(out)
        assert doc["closed_form"] is not None
        assert doc["difference"] < 1e-10

    def test_kp_overlap(self, capsys):
        code, out, _ = run_cli(capsys, "overlap", "kp", "--xi1", "0.3",
                               "--xi2", "0.5i", "--k", "1", "--lambda", "4")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["difference"] < 1e-10
        assert abs(doc["series"]["abs"]) <= 1.0


class TestEvolveCommand:
    def test_alpha_shift_column(self, capsys):
        code, out, _ = run_cli(capsys, "evolve", "gk", "--z", "0.7+0.2i",
                               "--k", "2", "--lambda", "4",
                               "--times", "0,0.3,1.0", "--format", "csv")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "t,norm,alpha_shift_deviation,mean_energy"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 3
        assert float(rows[0][2]) == 0.0  # t = 0 rebuilds the same state
        for row in rows:
            assert float(row[1]) == pytest.approx(1.0, abs=1e-12)
            assert float(row[2]) <= 1e-14

    def test_kp_family(self, capsys):
        code, out, _ = run_cli(capsys, "evolve", "kp", "--xi", "0.4", "--k",
                               "0", "--lambda", "4", "--times", "0,0.5",
                               "--format", "csv")
        assert code == EXIT_OK
        rows = out.strip().splitlines()[1:]
        for row in rows:
            assert float(row.split(",")[2]) <= 1e-14

    def test_bad_time_grid(self, capsys):
        code, _, err = run_cli(capsys, "evolve", "gk", "--z", "0.5",
                               "--lambda", "4", "--times", "a,b")
        assert code == EXIT_DOMAIN


class TestMomentsCommand:
    def test_mellin_table(self, capsys):
        code, out, _ = run_cli(capsys, "moments", "--check", "mellin",
                               "--lambda", "4", "--k", "2", "--n-max", "8")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["reports"][0]["passed"] is True

    def test_kp_weights_report_errata(self, capsys):
        code, out, _ = run_cli(capsys, "moments", "--check", "kp-weights",
                               "--lambda", "4", "--k", "2", "--n-max", "6")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert any(r["errata"] for r in doc["reports"])

    def test_paper_literal_adds_alternate_reading(self, capsys):
        _, out_plain, _ = run_cli(capsys, "moments", "--check", "kp-weights",
                                  "--lambda", "4", "--k", "1", "--n-max", "4")
        _, out_lit, _ = run_cli(capsys, "moments", "--check", "kp-weights",
                                "--lambda", "4", "--k", "1", "--n-max", "4",
                                "--paper-literal")
        n_plain = len(json.loads(out_plain)["reports"])
        n_lit = len(json.loads(out_lit)["reports"])
        assert n_lit == n_plain + 1

    def test_text_format(self, capsys):
        code, out, _ = run_cli(capsys, "moments", "--check", "gk-diag",
                               "--lambda", "4", "--k", "1", "--n-max", "5",
                               "--format", "text")
        assert code == EXIT_OK
        assert "verdict" in out


class TestPTCommand:
    def test_eigenfunction_csv(self, capsys):
        code, out, _ = run_cli(capsys, "pt", "--eigenfunction", "1",
                               "--points", "9")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "x,value"
        assert len(lines) == 10
        assert float(lines[1].split(",")[1]) == 0.0  # boundary zero

    def test_u_block_json(self, capsys):
        code, out, _ = run_cli(capsys, "pt", "--u-block", "2", "2")
        assert code == EXIT_OK
        doc = json.loads(out)
        block = doc["u_block"]
        assert len(block) == 3
        assert block[0][0]["value"] == pytest.approx(0.9918, abs=1e-3)
        assert block[0][1]["flagged"] is True  # parity zero for kappa=kappa'

    def test_requires_an_action(self, capsys):
        code, _, err = run_cli(capsys, "pt")
        assert code == EXIT_DOMAIN


class TestVerifyCommand:
    def test_ladder_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "ladder",
                               "--lambda", "4")
        assert code == EXIT_OK
        assert "PASS" in out

    def test_measures_suite_reports_errata(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "measures",
                               "--format", "json")
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["suites"][0]["errata"]

    def test_failure_exit_code(self, capsys, monkeypatch):
        import solvstate.verify as verify_mod
        from solvstate.verify import SuiteReport, CheckResult

        def failing_suite(**kwargs):
            rep = SuiteReport("ladder")
            rep.checks.append(CheckResult("synthetic", False, 1.0, 0.0, ""))
            return rep

        monkeypatch.setitem(verify_mod.SUITES, "ladder", failing_suite)
        code, out, _ = run_cli(capsys, "verify", "--suite", "ladder",
                               "--format", "json")
        assert code == EXIT_ASSERTION
        doc = json.loads(out)
        assert doc["failures"][0]["name"] == "synthetic"

    def test_unknown_suite_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["verify", "--suite", "bogus"])


def test_json_payload_uses_15_significant_digits(capsys):
    _, out, _ = run_cli(capsys, "state", "gk", "--z", "0.123456789123456789",
                        "--lambda", "4")
    doc = json.loads(out)
    val = doc["state"]["coefficients"][1][0]
    assert len(repr(val).replace("-", "").replace(".", "").lstrip("0")) <= 16
