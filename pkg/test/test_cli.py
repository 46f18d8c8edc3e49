"""End-to-end tests of the command line through ``normctl.main.run``."""

import csv
import io
import json

import pytest

from normctl.main import run
from normctl.models.element import ComplexMatrix, TorusPolynomial
from normctl.repositories.element_repository import ElementRepository
from normctl.services.visibility_service import an_family

pytestmark = pytest.mark.integration


def _stdout_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def _stderr_json(capsys) -> dict:
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


class TestVerifyDiffnorm:
    ARGS = ["verify-diffnorm", "--samples", "40", "--seed", "3", "--max-degree", "6"]

    def test_certificate(self, capsys):
        assert run(self.ARGS) == 0
        certificate = _stdout_json(capsys)
        assert certificate["pair_kind"] == "C1_in_C"
        assert certificate["measured_C"] <= 1.0 + 1e-8

    def test_rerun_is_byte_identical(self, capsys):
        run(self.ARGS)
        first = capsys.readouterr().out
        run(self.ARGS)
        assert capsys.readouterr().out == first

    def test_malformed_pair(self, tmp_path, capsys):
        path = tmp_path / "pair.json"
        path.write_text("{not json")
        assert run(["verify-diffnorm", "--pair", str(path)]) == 2
        assert _stderr_json(capsys)["type"] == "UsageError"

    def test_invalid_grid(self, capsys):
        assert run(["verify-diffnorm", "--samples", "2", "--grid", "1"]) == 2
        assert _stderr_json(capsys)["type"] == "ValidationError"

    def test_wiener_has_no_constant(self, tmp_path, capsys):
        path = tmp_path / "pair.json"
        path.write_text(json.dumps({"kind": "Wiener_in_C"}))
        assert run(["verify-diffnorm", "--pair", str(path), "--samples", "2"]) == 1
        assert _stderr_json(capsys)["type"] == "DomainError"


class TestInvert:
    def test_identity(self, element_file, tmp_path, capsys):
        emitted = tmp_path / "inverse.json"
        path = element_file(ComplexMatrix.identity_of(3))
        assert run(["invert", path, "--emit", str(emitted)]) == 0
        report = _stdout_json(capsys)
        assert report["terms_used"] == 1
        assert report["inverse"]["type"] == "matrix"
        assert ElementRepository.load_element(emitted).n == 3

    def test_singular(self, element_file, capsys):
        path = element_file(ComplexMatrix(entries=[[1, 2], [2, 4]]))
        assert run(["invert", path]) == 1
        error = _stderr_json(capsys)
        assert error["type"] == "NotInvertibleError"
        assert "measured" in error["detail"]

    def test_budget(self, element_file, capsys):
        path = element_file(ComplexMatrix.diagonal([1.0, 0.01]))
        assert run(["invert", path, "--kmax", "5"]) == 1
        assert _stderr_json(capsys)["type"] == "TruncationError"

    def test_element_outside_the_pair(self, element_file, tmp_path, capsys):
        pair = tmp_path / "pair.json"
        pair.write_text(json.dumps({"kind": "ApproxSpace_in_Matrices"}))
        assert run(["invert", element_file(an_family(2)), "--pair", str(pair)]) == 2
        assert _stderr_json(capsys)["type"] == "UsageError"

    def test_missing_file(self, tmp_path, capsys):
        assert run(["invert", str(tmp_path / "absent.json")]) == 2


class TestBound:
    def test_identity(self, element_file, capsys):
        assert run(["bound", element_file(TorusPolynomial.constant(1.0))]) == 0
        report = _stdout_json(capsys)
        assert report["product_bound"] == pytest.approx(1.0)
        assert report["dominated"] is True

    def test_an_member(self, element_file, capsys):
        assert run(["bound", element_file(an_family(5))]) == 0
        report = _stdout_json(capsys)
        assert report["kappa"] == pytest.approx(3.0)
        assert report["structure_constant"] == 1.0

    def test_raw_parameters(self, capsys):
        assert run(["bound", "--u", "2", "--v", "0.5", "--c", "1"]) == 0
        report = _stdout_json(capsys)
        assert report["product"] == pytest.approx(1.5 * 1.5 * 1.25 * 1.03125, rel=1e-3)
        assert report["cutoff"] is None

    def test_incomplete_parameters(self, capsys):
        assert run(["bound", "--u", "2", "--v", "0.5"]) == 2

    def test_divergent_parameters(self, capsys):
        assert run(["bound", "--u", "2", "--v", "1", "--c", "1"]) == 1
        assert _stderr_json(capsys)["type"] == "DivergenceError"


class TestSweep:
    def _config(self, tmp_path, **overrides) -> str:
        path = tmp_path / "sweep.json"
        config = {"u_values": [2.0, 4.0], "xi_values": [4.0, 6.0], "c_values": [1.0, 10.0], **overrides}
        path.write_text(json.dumps(config))
        return str(path)

    def test_csv_is_reproducible(self, tmp_path, capsys):
        config = self._config(tmp_path)
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["sweep", config, "--out", str(first), "--threads", "3"]) == 0
        assert run(["sweep", config, "--out", str(second), "--threads", "1"]) == 0
        assert first.read_bytes() == second.read_bytes()
        rows = list(csv.DictReader(io.StringIO(first.read_text())))
        assert len(rows) == 8
        assert all(row["flagged"] == "false" for row in rows)

    def test_stdout(self, tmp_path, capsys):
        assert run(["sweep", self._config(tmp_path)]) == 0
        assert capsys.readouterr().out.startswith("label,u,v,c,")

    def test_unwritable_output(self, tmp_path, capsys):
        assert run(["sweep", self._config(tmp_path), "--out", str(tmp_path / "missing" / "out.csv")]) == 1

    def test_invalid_config(self, tmp_path, capsys):
        assert run(["sweep", self._config(tmp_path, u_values=[0.5])]) == 2


class TestOtherCommands:
    def test_pseudospectrum(self, element_file, capsys):
        assert run(["pseudospectrum", element_file(ComplexMatrix.diagonal([1.0, -1.0])), "--resolution", "3"]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["re", "im", "resolvent_norm", "in_pseudospectrum"]
        assert len(rows) == 10

    def test_bad_rectangle(self, element_file, capsys):
        assert run(["pseudospectrum", element_file(ComplexMatrix.identity_of(2)), "--rect", "1,0,0,1"]) == 2

    def test_visibility_on_wiener(self, tmp_path, capsys):
        pair = tmp_path / "pair.json"
        pair.write_text(json.dumps({"kind": "Wiener_in_C"}))
        assert run(["visibility", "--pair", str(pair), "--trials", "5", "--delta", "0.9"]) == 0
        summary = _stdout_json(capsys)
        assert summary["closed_form"] == [pytest.approx(1.0 / 0.62)]
        assert summary["estimates"][0]["lower_bound"] >= 1.0 / 0.9 - 1e-9

    def test_an_family_case(self, capsys):
        assert run(["cases", "an-family", "--n", "3"]) == 0
        report = _stdout_json(capsys)
        assert report["n"] == 3
        assert report["kappa"] == pytest.approx(3.0)

    def test_quotient_case(self, element_file, capsys):
        assert run(["cases", "quotient", element_file(TorusPolynomial.constant(2.0))]) == 0
        assert _stdout_json(capsys)["holds"] is True

    def test_sun_case(self, capsys):
        assert run(["cases", "sun", "--samples", "20", "--theta", "0.3"]) == 0
        report = _stdout_json(capsys)
        assert 0.3 in report["thetas"]
        assert report["certified_constant"] is not None

    def test_no_command(self, capsys):
        assert run([]) == 2

    def test_cases_without_a_case(self, capsys):
        assert run(["cases"]) == 2

    def test_unknown_command(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_unknown_log_level_is_a_usage_error(self, capsys):
        assert run(["--log-level", "LOUD", "bound", "--u", "2", "--v", "0.5", "--c", "1"]) == 2
        error = _stderr_json(capsys)
        assert error["type"] == "UsageError"
        assert error["detail"]["log_level"] == "LOUD"

    def test_log_level_is_case_insensitive(self, capsys):
        assert run(["--log-level", "debug", "bound", "--u", "2", "--v", "0.5", "--c", "1"]) == 0

    def test_help(self, capsys):
        assert run(["--help"]) == 0
        assert "verify-diffnorm" in capsys.readouterr().out
