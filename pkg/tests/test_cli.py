import csv
import json

import numpy as np
import pytest

from cohmeter.cli import main
from cohmeter.serialize import load_state, preset, state_from_json, state_to_json
from cohmeter.states import random_density


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def strip_timestamp(obj):
    obj = json.loads(obj) if isinstance(obj, str) else obj
    obj["manifest"].pop("timestamp")
    return obj


class TestEntropyCommand:
    def test_worked_state(self, capsys):
        code, out, _ = run(capsys, "entropy", "--state", "preset:appendix-partial", "--trials", "200")
        assert code == 0
        data = json.loads(out)
        assert data["von_neumann"] == pytest.approx(0.483767, abs=1e-6)
        assert data["random_search"]["min_shannon"] >= data["von_neumann"] - 1e-9
        assert data["sweep"]["refined_min_shannon"] == pytest.approx(data["von_neumann"], abs=1e-9)
        assert data["manifest"]["seed"] == 7

    def test_qutrit_has_no_sweep(self, capsys):
        code, out, _ = run(capsys, "entropy", "--state", "preset:maximally-mixed-d3", "--trials", "10")
        assert code == 0
        data = json.loads(out)
        assert "sweep" not in data
        assert data["von_neumann"] == pytest.approx(np.log2(3), abs=1e-11)


class TestCoherenceCommand:
    def test_computational(self, capsys):
        code, out, _ = run(capsys, "coherence", "--state", "preset:appendix-partial")
        assert code == 0
        rep = json.loads(out)["report"]
        assert rep["c_r"] == pytest.approx(0.469, abs=2e-3)
        assert rep["mode"] == "ideal"

    def test_named_basis(self, capsys):
        code, out, _ = run(capsys, "coherence", "--state", "preset:plus", "--basis", "plusminus")
        assert code == 0
        assert json.loads(out)["report"]["c_r"] == pytest.approx(0.0, abs=1e-9)

    def test_basis_file(self, capsys, tmp_path):
        path = tmp_path / "basis.json"
        path.write_text(json.dumps({"vectors": [[0, 1], [1, 0]]}))
        code, out, _ = run(capsys, "coherence", "--state", "preset:mixed-3-1", "--basis", str(path))
        assert code == 0
        assert json.loads(out)["report"]["c_r"] == 0.0

    def test_shots(self, capsys):
        code, out, _ = run(capsys, "--seed", "3", "coherence", "--state", "preset:appendix-partial", "--shots", "1000", "--grid", "64")
        assert code == 0
        data = json.loads(out)
        assert data["report"]["mode"] == {"shots": 1000, "seed": 3}
        assert data["manifest"]["seed"] == 3


class TestProtocolCommand:
    def test_spatial_outputs(self, capsys, tmp_path):
        code, out, _ = run(capsys, "protocol", "spatial", "--state", "preset:appendix-partial", "--out", str(tmp_path), "--grid", "128")
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report == json.loads(out)
        assert report["report"]["c_r"] == pytest.approx(0.469, abs=2e-3)
        with open(tmp_path / "sweep.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["phi_rad", "p0", "p1", "shannon_bits"]
        assert len(rows) == 129
        values = np.array(rows[1:], dtype=float)
        np.testing.assert_allclose(values[:, 1] + values[:, 2], 1.0, atol=1e-11)

    def test_polarization(self, capsys, tmp_path):
        code, out, _ = run(capsys, "protocol", "polarization", "--state", "preset:plus", "--basis", "circular", "--out", str(tmp_path))
        assert code == 0
        assert json.loads(out)["report"]["c_r"] == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_apart_from_timestamp(self, capsys, tmp_path):
        args = ["--seed", "11", "protocol", "spatial", "--state", "preset:appendix-partial", "--shots", "500", "--grid", "64"]
        run(capsys, *args, "--out", str(tmp_path / "a"))
        run(capsys, *args, "--out", str(tmp_path / "b"))
        a = strip_timestamp((tmp_path / "a" / "report.json").read_text())
        b = strip_timestamp((tmp_path / "b" / "report.json").read_text())
        assert a == b
        assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


class TestErrors:
    def test_invalid_state_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"kind": "matrix", "dim": 2, "entries": [0.6, 0.5, 0.5, 0.4]}))
        code, _, err = run(capsys, "coherence", "--state", str(path))
        assert code == 2
        assert "NotPositive" in err

    def test_unknown_preset(self, capsys):
        code, _, err = run(capsys, "entropy", "--state", "preset:nope")
        assert code == 2
        assert "unknown preset" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "entropy", "--state", str(tmp_path / "missing.json"))[0] == 2

    def test_unreachable_equalization(self, capsys, monkeypatch):
        from cohmeter import protocols
        from cohmeter.errors import EqualizationUnreachable

        def refuse(*args, **kwargs):
            raise EqualizationUnreachable(0.5, "forced")

        monkeypatch.setattr(protocols, "feedback_equalize", refuse)
        code, _, err = run(capsys, "protocol", "polarization", "--state", "preset:appendix-partial", "--out", "unused")
        assert code == 3
        assert "forced" in err


class TestStateFiles:
    def test_round_trip_bit_identical(self, rng, tmp_path):
        for _ in range(20):
            rho = random_density(3, rng)
            path = tmp_path / "state.json"
            path.write_text(json.dumps(state_to_json(rho)))
            np.testing.assert_array_equal(load_state(str(path)).matrix, rho.matrix)

    def test_ensemble_and_preset_kinds(self):
        ens = state_from_json({"kind": "ensemble", "weights": [0.75, 0.25], "states": [[0.7071067811865476, 0.7071067811865476], [1, 0]]})
        np.testing.assert_allclose(ens.matrix, preset("appendix-partial").matrix, atol=1e-15)
        np.testing.assert_array_equal(state_from_json({"kind": "preset", "name": "plus"}).matrix, preset("plus").matrix)

    def test_complex_entries(self):
        rho = state_from_json({"kind": "matrix", "dim": 2, "entries": [0.5, [0, -0.5], [0, 0.5], 0.5]})
        assert rho.matrix[0, 1] == -0.5j

    @pytest.mark.parametrize(
        "obj",
        [
            {"kind": "matrix", "dim": 2, "entries": [1, 0, 0]},
            {"kind": "vector"},
            [1, 2],
            {"kind": "matrix", "dim": 2, "entries": [1, 0, 0, [0, 1, 2]]},
        ],
    )
    def test_malformed(self, obj):
        with pytest.raises(ValueError):
            state_from_json(obj)


class TestVerifyCommand:
    def test_worked_suite_reports_each_criterion(self, capsys, tmp_path):
        out_path = tmp_path / "verify.json"
        code, out, _ = run(capsys, "verify", "--suite", "appendix", "--out", str(out_path))
        lines = [ln for ln in out.splitlines() if ln.startswith("[")]
        assert len(lines) == 3
        data = json.loads(out_path.read_text())
        assert [c["criterion"] for c in data["criteria"]] == [1, 2, 3]
        assert code == (0 if data["passed"] else 1)
