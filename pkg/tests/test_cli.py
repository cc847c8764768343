"""End-to-end command line tests.

Each test drives main() in-process (fast, same exit codes as the console
script) against files in tmp_path.  One subprocess test confirms the
installed entry point resolves.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from hodgeflow.cli import main
from hodgeflow.complexes import build_incidence, complex_to_dict, load_complex
from hodgeflow.spectral import gft, hodge_basis
from hodgeflow import synth

from conftest import REF_EDGES, REF_TRIANGLES


@pytest.fixture
def ref_json(tmp_path):
    path = tmp_path / "fig.json"
    path.write_text(json.dumps({
        "num_vertices": 7,
        "edges": [list(e) for e in REF_EDGES],
        "triangles": [list(t) for t in REF_TRIANGLES],
    }))
    return str(path)


@pytest.fixture
def graph_json(tmp_path):
    path = tmp_path / "graph.json"
    path.write_text(json.dumps({
        "num_vertices": 7,
        "edges": [list(e) for e in REF_EDGES],
        "triangles": [],
    }))
    return str(path)


def _write_signals(path, values):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[0] == 1 and values.size > 1:
        values = values.T
    with open(path, "w") as fh:
        fh.write("# layer=1\n")
        for row in values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return str(path)


def _harmonic_matrix(ref_json, m, seed=0):
    ip = build_incidence(load_complex(ref_json))
    basis = hodge_basis(ip)
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal((len(basis.harm_idx), m))
    return basis.u_harm @ coeff


class TestComplexCommands:
    def test_info_prints_summary(self, ref_json, capsys):
        assert main(["complex", "info", "--complex", ref_json]) == 0
        out = capsys.readouterr().out
        assert "V=7 E=11 T=3" in out
        assert "betti=(1, 2, 0)" in out
        assert "three_cliques=5" in out

    def test_info_writes_json(self, ref_json, tmp_path, capsys):
        out = tmp_path / "info.json"
        assert main(["complex", "info", "--complex", ref_json,
                     "--out", str(out)]) == 0
        capsys.readouterr()
        d = json.loads(out.read_text())
        assert d["betti"] == [1, 2, 0]
        assert d["three_cliques"] == 5

    def test_validate_ok(self, ref_json, capsys):
        assert main(["complex", "validate", "--complex", ref_json]) == 0
        assert "ok" in capsys.readouterr().out

    def test_validate_names_offending_simplex(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"num_vertices": 4,
                                   "edges": [[0, 1], [1, 2], [0, 2]],
                                   "triangles": [[0, 1, 3]]}))
        assert main(["complex", "validate", "--complex", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "(0, 1, 3)" in err

    def test_missing_file_exit_2_with_path(self, tmp_path, capsys):
        missing = str(tmp_path / "absent.json")
        assert main(["complex", "info", "--complex", missing]) == 2
        assert missing in capsys.readouterr().err

    def test_config_line_on_stderr(self, ref_json, capsys):
        main(["complex", "info", "--complex", ref_json])
        err = capsys.readouterr().err
        assert err.startswith("config: ")

    def test_unknown_flag_is_an_error(self, ref_json):
        with pytest.raises(SystemExit) as exc:
            main(["complex", "info", "--complex", ref_json, "--bogus"])
        assert exc.value.code == 2


class TestSpectralCommands:
    def test_basis_export_roundtrip(self, ref_json, tmp_path, capsys):
        out = tmp_path / "basis.csv"
        assert main(["spectral", "basis", "--complex", ref_json,
                     "--layer", "1", "--out", str(out)]) == 0
        text = out.read_text()
        assert "# irr_idx=" in text and "# harm_idx=" in text
        data = np.loadtxt(str(out), delimiter=",", comments="#", ndmin=2)
        evals, evecs = data[0], data[1:]
        ip = build_incidence(load_complex(ref_json))
        basis = hodge_basis(ip)
        np.testing.assert_allclose(evals, basis.evals1, atol=1e-15)
        np.testing.assert_allclose(evecs, basis.evecs1, atol=1e-15)

    def test_tv_worked_partition_value(self, ref_json, tmp_path, capsys):
        x = [0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0]
        sig = _write_signals(tmp_path / "x.csv", x)
        assert main(["spectral", "tv", "--complex", ref_json,
                     "--signal", sig]) == 0
        out = capsys.readouterr().out
        assert "lovasz_tv=1" in out


class TestDecompose:
    def test_energy_conservation(self, ref_json, tmp_path, capsys):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(11)
        sig = _write_signals(tmp_path / "x.csv", x)
        out = tmp_path / "comps.json"
        assert main(["decompose", "--complex", ref_json, "--signal", sig,
                     "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        e = d["energies"]
        total = e["irr"] + e["sol"] + e["harm"]
        assert abs(total - e["input"]) <= 1e-8 * e["input"]
        recon = (np.array(d["s_irr"]) + np.array(d["s_sol"])
                 + np.array(d["s_harm"]))
        np.testing.assert_allclose(recon, x, atol=1e-10)


class TestSample:
    def _band_file(self, tmp_path, ref_json):
        ip = build_incidence(load_complex(ref_json))
        basis = hodge_basis(ip)
        path = tmp_path / "bands.json"
        path.write_text(json.dumps({"F1": [int(i) for i in basis.harm_idx]}))
        return str(path), basis

    def test_select_check_recover_roundtrip(self, ref_json, tmp_path, capsys):
        bands, basis = self._band_file(tmp_path, ref_json)
        sel = tmp_path / "s.csv"
        assert main(["sample", "select", "--complex", ref_json,
                     "--layer", "1", "--band-file", bands,
                     "--budget", "3", "--out", str(sel)]) == 0
        indices = np.loadtxt(str(sel), comments="#", dtype=int, ndmin=1)
        assert len(indices) == 3

        assert main(["sample", "check", "--complex", ref_json,
                     "--layer", "1", "--band-file", bands,
                     "--samples", str(sel)]) == 0
        out = capsys.readouterr().out
        assert "recoverable=yes" in out

        rng = np.random.default_rng(5)
        truth = basis.u_harm @ rng.standard_normal(len(basis.harm_idx))
        samp = tmp_path / "sv.csv"
        with open(samp, "w") as fh:
            for i in indices:
                fh.write(f"{i},{truth[i]:.17g}\n")
        rec = tmp_path / "rec.csv"
        assert main(["sample", "recover", "--complex", ref_json,
                     "--layer", "1", "--band-file", bands,
                     "--samples", str(samp), "--out", str(rec)]) == 0
        got = np.loadtxt(str(rec), delimiter=",", comments="#")
        assert np.linalg.norm(got - truth) <= 1e-6 * np.linalg.norm(truth)
        assert "# status=ok" in rec.read_text()

    def test_select_json_format(self, ref_json, tmp_path, capsys):
        bands, _ = self._band_file(tmp_path, ref_json)
        assert main(["sample", "select", "--complex", ref_json,
                     "--layer", "1", "--band-file", bands,
                     "--budget", "2", "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["layer"] == 1 and len(d["indices"]) == 2
        assert d["norm"] < 1.0

    def test_recover_starved_exit_3_with_status(self, ref_json, tmp_path,
                                                capsys):
        bands, _ = self._band_file(tmp_path, ref_json)
        samp = tmp_path / "one.csv"
        samp.write_text("0,1.0\n")
        rec = tmp_path / "rec.csv"
        assert main(["sample", "recover", "--complex", ref_json,
                     "--layer", "1", "--band-file", bands,
                     "--samples", str(samp), "--out", str(rec)]) == 3
        assert "# status=not_recoverable" in rec.read_text()

    def test_recover_multi_two_layer_full_sampling(self, ref_json, tmp_path,
                                                   capsys):
        ip = build_incidence(load_complex(ref_json))
        basis = hodge_basis(ip)
        rng = np.random.default_rng(7)
        f0 = list(range(4))
        s0 = basis.evecs0[:, f0] @ rng.standard_normal(4)
        s1_bar = basis.u_harm @ rng.standard_normal(len(basis.harm_idx))
        s1 = ip.b1.T @ s0 + s1_bar
        bands = tmp_path / "bands.json"
        bands.write_text(json.dumps({"F0": f0}))
        v = tmp_path / "v.csv"
        with open(v, "w") as fh:
            for i, val in enumerate(s0):
                fh.write(f"{i},{val:.17g}\n")
        e = tmp_path / "e.csv"
        with open(e, "w") as fh:
            for i, val in enumerate(s1):
                fh.write(f"{i},{val:.17g}\n")
        out = tmp_path / "rec.json"
        assert main(["sample", "recover-multi", "--complex", ref_json,
                     "--band-file", str(bands), "--samples0", str(v),
                     "--samples1", str(e), "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        assert d["status"] == "ok"
        np.testing.assert_allclose(np.array(d["s1"]), s1, atol=1e-8)
        np.testing.assert_allclose(np.array(d["s0"]), s0, atol=1e-8)

    def test_recover_multi_three_layer_full_sampling(self, ref_json,
                                                     tmp_path, capsys):
        ip = build_incidence(load_complex(ref_json))
        basis = hodge_basis(ip)
        rng = np.random.default_rng(9)
        f0, f2 = [0, 1, 2], [0, 1]
        s0 = basis.evecs0[:, f0] @ rng.standard_normal(len(f0))
        s2 = basis.evecs2[:, f2] @ rng.standard_normal(len(f2))
        s1_h = basis.u_harm @ rng.standard_normal(len(basis.harm_idx))
        s1 = ip.b1.T @ s0 + s1_h + ip.b2 @ s2
        bands = tmp_path / "bands.json"
        bands.write_text(json.dumps({"F0": f0, "F2": f2}))
        paths = {}
        for name, vec in (("v", s0), ("e", s1), ("t", s2)):
            p = tmp_path / f"{name}.csv"
            with open(p, "w") as fh:
                for i, val in enumerate(vec):
                    fh.write(f"{i},{val:.17g}\n")
            paths[name] = str(p)
        out = tmp_path / "rec.json"
        assert main(["sample", "recover-multi", "--complex", ref_json,
                     "--band-file", str(bands),
                     "--samples0", paths["v"], "--samples1", paths["e"],
                     "--samples2", paths["t"], "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        np.testing.assert_allclose(np.array(d["s1"]), s1, atol=1e-8)
        np.testing.assert_allclose(np.array(d["s2"]), s2, atol=1e-8)


class TestInfer:
    def test_mtv_recovers_reference_triangles(self, ref_json, graph_json,
                                              tmp_path, capsys):
        x = _harmonic_matrix(ref_json, 50)
        sig = _write_signals(tmp_path / "X.csv", x)
        out = tmp_path / "result.json"
        assert main(["infer", "mtv", "--complex", graph_json,
                     "--signals", sig, "--tstar", "3",
                     "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        assert d["status"] == "ok"
        assert sorted(tuple(t) for t in d["selected"]) == sorted(REF_TRIANGLES)
        assert sum(d["t"]) == 3
        assert len(d["c"]) == 5

    def test_tstar_auto_cross_validates(self, ref_json, graph_json,
                                        tmp_path, capsys):
        x = _harmonic_matrix(ref_json, 50, seed=1)
        sig = _write_signals(tmp_path / "X.csv", x)
        out = tmp_path / "result.json"
        assert main(["infer", "mtv", "--complex", graph_json,
                     "--signals", sig, "--tstar", "auto",
                     "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        assert d["tstar"] == 3
        assert sorted(tuple(t) for t in d["selected"]) == sorted(REF_TRIANGLES)

    def test_gradient_data_stops_at_energy_test(self, ref_json, graph_json,
                                                tmp_path, capsys):
        ip = build_incidence(load_complex(ref_json))
        rng = np.random.default_rng(2)
        x = ip.b1.T @ rng.standard_normal((7, 20))
        sig = _write_signals(tmp_path / "X.csv", x)
        out = tmp_path / "result.json"
        assert main(["infer", "mtv", "--complex", graph_json,
                     "--signals", sig, "--tstar", "3",
                     "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        assert d["status"] == "below_energy_threshold"
        assert d["t"] is None

    def test_pcabfmtv_matches_mtv_noiseless(self, ref_json, graph_json,
                                            tmp_path, capsys):
        x = _harmonic_matrix(ref_json, 50, seed=3)
        sig = _write_signals(tmp_path / "X.csv", x)
        out = tmp_path / "result.json"
        assert main(["infer", "pcabfmtv", "--complex", graph_json,
                     "--signals", sig, "--tstar", "3", "--pca-dim", "2",
                     "--out", str(out)]) == 0
        d = json.loads(out.read_text())
        assert d["status"] == "ok" and d["converged"]
        assert sorted(tuple(t) for t in d["selected"]) == sorted(REF_TRIANGLES)
        trace = d["objective_trace"]
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
        assert d["pca_dim"] == 2

    def test_bp_zero_slack_is_analysis(self, ref_json, tmp_path, capsys):
        ip = build_incidence(load_complex(ref_json))
        basis = hodge_basis(ip)
        rng = np.random.default_rng(4)
        x = rng.standard_normal(11)
        sig = _write_signals(tmp_path / "x.csv", x)
        assert main(["infer", "bp", "--complex", ref_json, "--signal", sig,
                     "--eps", "0"]) == 0
        d = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(np.array(d["coefficients"]),
                                   basis.evecs1.T @ x, atol=1e-12)
        assert d["residual"] <= 1e-10

    def test_bp_reads_exported_basis(self, ref_json, tmp_path, capsys):
        basis_csv = tmp_path / "basis.csv"
        main(["spectral", "basis", "--complex", ref_json, "--layer", "1",
              "--out", str(basis_csv)])
        capsys.readouterr()
        x = np.arange(1.0, 12.0)
        sig = _write_signals(tmp_path / "x.csv", x)
        assert main(["infer", "bp", "--complex", ref_json, "--signal", sig,
                     "--eps", "0", "--basis-file", str(basis_csv)]) == 0
        d = json.loads(capsys.readouterr().out)
        ip = build_incidence(load_complex(ref_json))
        expect = hodge_basis(ip).evecs1.T @ x
        np.testing.assert_allclose(np.array(d["coefficients"]), expect,
                                   atol=1e-12)

    def test_bad_tstar_exit_2(self, ref_json, graph_json, tmp_path):
        sig = _write_signals(tmp_path / "x.csv", np.ones((11, 2)))
        with pytest.raises(SystemExit) as exc:
            main(["infer", "mtv", "--complex", graph_json, "--signals", sig,
                  "--tstar", "three"])
        assert exc.value.code == 2


class TestFilter:
    def test_identity_limits(self, ref_json, tmp_path, capsys):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(11)
        sig = _write_signals(tmp_path / "x.csv", x)
        out = tmp_path / "y.csv"
        assert main(["filter", "--complex", ref_json, "--signal", sig,
                     "--lambda", "0", "--gamma", "0",
                     "--out", str(out)]) == 0
        got = np.loadtxt(str(out), delimiter=",", comments="#")
        np.testing.assert_array_equal(got, x)
        assert "# status=ok" in out.read_text()

    def test_json_result_fields(self, ref_json, tmp_path, capsys):
        sig = _write_signals(tmp_path / "x.csv", np.ones(11))
        assert main(["filter", "--complex", ref_json, "--signal", sig,
                     "--lambda", "1.0", "--gamma", "0.1",
                     "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["status"] == "ok"
        assert d["residual"] <= 1e-6 * (1 + np.sqrt(11))
        assert len(d["values"]) == 11

    def test_diagonal_metrics_accepted(self, ref_json, tmp_path, capsys):
        sig = _write_signals(tmp_path / "x.csv", np.ones(11))
        metrics = tmp_path / "m.json"
        metrics.write_text(json.dumps({"M1": [2.0] * 11}))
        assert main(["filter", "--complex", ref_json, "--signal", sig,
                     "--metrics", str(metrics), "--format", "json"]) == 0

    def test_unknown_metric_field_exit_2(self, ref_json, tmp_path, capsys):
        sig = _write_signals(tmp_path / "x.csv", np.ones(11))
        metrics = tmp_path / "m.json"
        metrics.write_text(json.dumps({"M7": [1.0]}))
        assert main(["filter", "--complex", ref_json, "--signal", sig,
                     "--metrics", str(metrics)]) == 2
        assert "M7" in capsys.readouterr().err


class TestExperiment:
    def _config(self, tmp_path, **kw):
        cfg = dict(seed=3, num_vertices=9, edge_prob=0.5, fill_fraction=0.5,
                   num_signals=10, snr_db=[0.0], trials=2)
        cfg.update(kw)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        return str(path)

    def test_pe_vs_snr_byte_identical_reruns(self, tmp_path, capsys):
        cfg = self._config(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["experiment", "pe-vs-snr", "--config", cfg,
                     "--out", str(a)]) == 0
        assert main(["experiment", "pe-vs-snr", "--config", cfg,
                     "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        text = a.read_text()
        assert text.startswith("#")
        assert "# seed=3" in text

    def test_seed_flag_overrides_config(self, tmp_path, capsys):
        cfg = self._config(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["experiment", "pe-vs-snr", "--config", cfg, "--out", str(a)])
        main(["experiment", "pe-vs-snr", "--config", cfg, "--seed", "4",
              "--out", str(b)])
        assert a.read_bytes() != b.read_bytes()
        assert "# seed=4" in b.read_text()

    def test_unknown_config_field_exit_2(self, tmp_path, capsys):
        cfg = self._config(tmp_path, bogus=1)
        assert main(["experiment", "pe-vs-snr", "--config", cfg]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_recovery_experiment_runs(self, tmp_path, capsys):
        cfg = self._config(tmp_path, band_size=2, sample_budgets=[2, 4])
        out = tmp_path / "rec.csv"
        assert main(["experiment", "recovery-vs-samples", "--config", cfg,
                     "--out", str(out)]) == 0
        header = [ln for ln in out.read_text().splitlines()
                  if not ln.startswith("#")][0]
        assert header.split(",")[0] == "num_samples"


class TestSynth:
    def test_complex_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["synth", "complex", "--vertices", "10", "--edge-prob", "0.4",
                "--fill-fraction", "0.5", "--seed", "11"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        c = load_complex(str(a))
        assert c.num_vertices == 10

    def test_signal_is_bandlimited(self, tmp_path, capsys):
        cpath = tmp_path / "c.json"
        main(["synth", "complex", "--vertices", "8", "--edge-prob", "0.5",
              "--fill-fraction", "0.5", "--seed", "2", "--out", str(cpath)])
        bands = tmp_path / "bands.json"
        bands.write_text(json.dumps({"F1": [0, 1, 2]}))
        out = tmp_path / "x.csv"
        assert main(["synth", "signal", "--complex", str(cpath),
                     "--layer", "1", "--band-file", str(bands),
                     "--seed", "2", "--out", str(out)]) == 0
        values = np.loadtxt(str(out), delimiter=",", comments="#")
        ip = build_incidence(load_complex(str(cpath)))
        basis = hodge_basis(ip)
        from hodgeflow.complexes import LayerSignal
        hat = gft(basis, LayerSignal(layer=1, values=values))
        assert np.max(np.abs(hat[3:])) <= 1e-10

    def test_noisy_signal_differs_from_clean(self, tmp_path, capsys):
        cpath = tmp_path / "c.json"
        main(["synth", "complex", "--vertices", "8", "--edge-prob", "0.5",
              "--fill-fraction", "0.5", "--seed", "2", "--out", str(cpath)])
        bands = tmp_path / "bands.json"
        bands.write_text(json.dumps({"F1": [0, 1]}))
        clean, noisy = tmp_path / "clean.csv", tmp_path / "noisy.csv"
        base = ["synth", "signal", "--complex", str(cpath), "--layer", "1",
                "--band-file", str(bands), "--seed", "3"]
        main(base + ["--out", str(clean)])
        main(base + ["--snr-db", "0", "--out", str(noisy)])
        a = np.loadtxt(str(clean), delimiter=",", comments="#")
        b = np.loadtxt(str(noisy), delimiter=",", comments="#")
        assert not np.array_equal(a, b)


def test_console_script_resolves():
    r = subprocess.run(["hodgeflow", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0
    assert "subcommands" in r.stdout or "complex" in r.stdout
