import json

import numpy as np
import pytest

from ssm_dyn.cli import main
from ssm_dyn.liouville import LiouvillianModel
from ssm_dyn.model_config import (ConfigError, load_config, load_model,
                                  parse_config_text, parse_operator_expr)
from ssm_dyn.spin_ops import PAULI, SpinRegister, collective_spin, site_pauli


class TestConfigText:
    def test_basic_parse(self):
        cfg = parse_config_text("a = 1\nb = two words\n")
        assert cfg == {"a": ["1"], "b": ["two words"]}

    def test_comments_and_blanks(self):
        cfg = parse_config_text("# header\n\na = 1  # trailing\n")
        assert cfg == {"a": ["1"]}

    def test_repeated_keys_accumulate(self):
        cfg = parse_config_text("lindblad = x\nlindblad = y\n")
        assert cfg["lindblad"] == ["x", "y"]

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config_text("not a pair\n")


class TestOperatorExpressions:
    def setup_method(self):
        self.reg = SpinRegister(2)

    def test_single_pauli(self):
        np.testing.assert_allclose(parse_operator_expr("pauli:1:z", self.reg),
                                   site_pauli(self.reg, 1, "z"))

    def test_collective(self):
        np.testing.assert_allclose(parse_operator_expr("collective:x", self.reg),
                                   collective_spin(self.reg, "x"))

    def test_product_and_sum(self):
        expr = "1.5 * pauli:1:z * pauli:2:z + 2"
        expected = (1.5 * site_pauli(self.reg, 1, "z") @ site_pauli(self.reg, 2, "z")
                    + 2 * np.eye(4))
        np.testing.assert_allclose(parse_operator_expr(expr, self.reg), expected)

    def test_negative_terms(self):
        expr = "-0.5 * pauli:1:x - pauli:2:x"
        expected = -0.5 * site_pauli(self.reg, 1, "x") - site_pauli(self.reg, 2, "x")
        np.testing.assert_allclose(parse_operator_expr(expr, self.reg), expected)

    def test_scientific_coefficients(self):
        np.testing.assert_allclose(parse_operator_expr("2.5e-2 * identity", self.reg),
                                   0.025 * np.eye(4))

    def test_whitespace_products(self):
        expr = "pauli:1:z pauli:2:z"
        expected = site_pauli(self.reg, 1, "z") @ site_pauli(self.reg, 2, "z")
        np.testing.assert_allclose(parse_operator_expr(expr, self.reg), expected)

    def test_unknown_atom(self):
        with pytest.raises(ConfigError, match="unknown operator"):
            parse_operator_expr("hadamard:1", self.reg)

    def test_trailing_operator(self):
        with pytest.raises(ConfigError, match="trailing"):
            parse_operator_expr("pauli:1:z +", self.reg)

    def test_bad_site(self):
        with pytest.raises(ValueError):
            parse_operator_expr("pauli:7:z", self.reg)


DEPHASING_MODEL = """\
# single qubit under dephasing, driven through sigma_x
n_sites = 1
lindblad = 1.0 | pauli:1:z
perturbation = pauli:1:x
theta = 1.0
"""


class TestLoadModel:
    def test_dephasing_file(self, tmp_path):
        path = tmp_path / "model.cfg"
        path.write_text(DEPHASING_MODEL)
        model = load_model(path)
        assert model.dim == 2
        assert len(model.lindblad_terms) == 1
        np.testing.assert_allclose(model.lindblad_terms[0][0], PAULI["z"])
        np.testing.assert_allclose(model.perturbation, PAULI["x"])

    def test_gate_hamiltonian_expression(self, tmp_path):
        text = ("n_sites = 4\n"
                "perturbation = 1.5*pauli:1:z*pauli:2:z + 1.5*pauli:2:z*pauli:3:z + 1\n")
        path = tmp_path / "m.cfg"
        path.write_text(text)
        model = load_model(path)
        from ssm_dyn.spin_ops import dfs_gate_hamiltonian
        np.testing.assert_allclose(model.perturbation,
                                   dfs_gate_hamiltonian(SpinRegister(4), "x"))

    def test_requires_sites(self, tmp_path):
        path = tmp_path / "m.cfg"
        path.write_text("theta = 1\n")
        with pytest.raises(ConfigError, match="n_sites"):
            load_model(path)

    def test_kraus_weights(self, tmp_path):
        path = tmp_path / "m.cfg"
        path.write_text("n_sites = 1\nkraus = 0.5 | identity\nkraus = 0.5 | pauli:1:z\n")
        model = load_model(path)
        assert len(model.kraus_map_terms) == 2


class TestCli:
    def test_validate_zeno(self, capsys):
        assert main(["validate", "zeno"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["valid"] is True
        assert out["checks"]["max_pinching_defect"] <= 1e-10

    def test_fit_command(self, tmp_path, capsys):
        from ssm_dyn.evolution import SweepRecord, write_sweep_csv
        ts = np.logspace(2, 5, 8)
        records = [SweepRecord(t, 3.0 / t, 0.3 / t, None, 0.0) for t in ts]
        csv_path = tmp_path / "sweep.csv"
        write_sweep_csv(records, csv_path)
        assert main(["fit", str(csv_path), "--points", "4"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["slope"] == pytest.approx(1.0, abs=1e-10)
        assert out["intercept"] == pytest.approx(np.log(3.0), abs=1e-10)

    def test_run_second_order_with_outputs(self, tmp_path, capsys):
        rc = main(["run", "second_order", "--t-min", "100", "--t-max", "1000",
                   "--t-points", "3", "--out", str(tmp_path / "run")])
        assert rc == 0
        out_dir = tmp_path / "run"
        assert (out_dir / "second_order.csv").exists()
        assert (out_dir / "report.json").exists()
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert "second_order.csv" in manifest["outputs"]

    def test_sweep_model_command(self, tmp_path, capsys):
        path = tmp_path / "model.cfg"
        path.write_text(DEPHASING_MODEL)
        rc = main(["sweep-model", str(path), "--t-min", "100", "--t-max", "1000",
                   "--t-points", "3", "--out", str(tmp_path / "out")])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["records"]) == 3
        assert (tmp_path / "out" / "model.csv").exists()

    def test_config_file_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("scenario = second_order\nt_min = 100\nt_max = 1000\n"
                       "t_points = 3\ntheta = 1.0\n")
        assert main(["run", "--config", str(cfg)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["scenario"] == "second_order"

    def test_unknown_scenario(self, capsys):
        with pytest.raises(SystemExit):
            main(["run", "nonsense"])

    def test_missing_file_is_clean_error(self, capsys):
        assert main(["fit", "/does/not/exist.csv"]) == 2
