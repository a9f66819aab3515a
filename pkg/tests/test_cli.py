import csv
import json

import numpy as np
import pytest

from exco.cli import main
from exco.dataio import read_csv, read_result


@pytest.fixture(scope="module")
def fig3_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "fig3.csv"
    code = main(["simulate", "--model", "fig3", "--T", "8000", "--seed", "1",
                 "--out", str(path)])
    assert code == 0
    return str(path)


@pytest.fixture(scope="module")
def blocks_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "blocks.csv"
    code = main(["simulate", "--model", "blocks", "--blocks", "4,4,4", "--T", "6000",
                 "--seed", "2", "--out", str(path)])
    assert code == 0
    return str(path)


class TestSimulate:
    def test_fig3_columns_and_sidecar(self, fig3_csv):
        x = read_csv(fig3_csv, 100.0)
        assert x.channels == ["T3", "P4", "T6"]
        assert x.samples.shape == (8000, 3)
        sidecar = json.load(open(fig3_csv + ".config.json"))
        assert sidecar["model"] == "fig3"
        assert sidecar["seed"] == 1
        assert sidecar["n_samples"] == 8000

    def test_blocks_columns_and_labels_sidecar(self, blocks_csv):
        x = read_csv(blocks_csv, 100.0)
        assert x.samples.shape == (6000, 12)
        labels = json.load(open(blocks_csv + ".labels.json"))
        assert labels["true_labels"] == [0] * 4 + [1] * 4 + [2] * 4
        assert labels["channels"] == x.channels

    def test_ma_model_single_column(self, tmp_path):
        out = tmp_path / "ma.csv"
        assert main(["simulate", "--model", "ma", "--T", "500", "--seed", "3",
                     "--out", str(out)]) == 0
        x = read_csv(str(out), 100.0)
        assert x.samples.shape == (500, 1)

    def test_missing_out_is_usage_error(self, capsys):
        assert main(["simulate", "--model", "fig3", "--T", "100"]) == 2
        assert "--out" in capsys.readouterr().err

    def test_unknown_model_is_usage_error(self):
        assert main(["simulate", "--model", "arma", "--T", "100", "--out", "x.csv"]) == 2

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            main(["simulate", "--model", "fig3", "--T", "300", "--seed", "9",
                  "--out", str(out)])
        assert a.read_bytes() == b.read_bytes()


class TestCluster:
    def test_separates_dependent_pair(self, fig3_csv, tmp_path, capsys):
        out = tmp_path / "r.json"
        code = main(["cluster", "--input", fig3_csv, "--rate", "100", "--k", "2",
                     "--quantile", "0.99", "--restarts", "20", "--out", str(out)])
        assert code == 0
        assert capsys.readouterr().out == ""  # file commands keep stdout silent
        doc = read_result(str(out))
        window = doc.windows[0]
        labels = dict(zip(window.communities.channels, window.communities.labels))
        assert labels["P4"] == labels["T6"] != labels["T3"]
        assert doc.metadata["tool_version"]
        assert doc.metadata["config"]["quantile"] == 0.99

    def test_phase_restriction(self, fig3_csv, tmp_path):
        pre, post = tmp_path / "pre.json", tmp_path / "post.json"
        assert main(["cluster", "--input", fig3_csv, "--rate", "100", "--k", "2",
                     "--quantile", "0.95", "--restarts", "5",
                     "--to", "40", "--out", str(pre)]) == 0
        assert main(["cluster", "--input", fig3_csv, "--rate", "100", "--k", "2",
                     "--quantile", "0.95", "--restarts", "5",
                     "--from", "40", "--out", str(post)]) == 0
        doc_pre = read_result(str(pre))
        doc_post = read_result(str(post))
        assert doc_pre.windows[0].end == 4000
        assert doc_post.windows[0].end == 4000  # remaining 40 of 80 seconds
        assert doc_pre.metadata["config"]["to_s"] == 40

    def test_empty_range_degenerate(self, fig3_csv, tmp_path):
        assert main(["cluster", "--input", fig3_csv, "--rate", "100",
                     "--from", "50", "--to", "40",
                     "--out", str(tmp_path / "r.json")]) == 3

    def test_infeasible_k(self, fig3_csv, tmp_path):
        code = main(["cluster", "--input", fig3_csv, "--rate", "100", "--k", "5000",
                     "--quantile", "0.99", "--out", str(tmp_path / "r.json")])
        assert code == 3

    def test_missing_input_io_error(self, tmp_path):
        assert main(["cluster", "--input", str(tmp_path / "none.csv"), "--rate", "100",
                     "--out", str(tmp_path / "r.json")]) == 4

    def test_invalid_quantile_usage_error(self, fig3_csv, tmp_path):
        assert main(["cluster", "--input", fig3_csv, "--rate", "100",
                     "--quantile", "1.5", "--out", str(tmp_path / "r.json")]) == 2

    def test_phase_band_default_k(self, blocks_csv, tmp_path):
        out = tmp_path / "r.json"
        code = main(["cluster", "--input", blocks_csv, "--rate", "100",
                     "--band", "alpha", "--phase", "pre-ictal",
                     "--quantile", "0.9", "--restarts", "5", "--out", str(out)])
        assert code == 0
        doc = read_result(str(out))
        assert doc.metadata["config"]["k"] == 7
        assert doc.windows[0].model.centroids.shape == (7, 12)

    def test_rerun_is_byte_identical(self, fig3_csv, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["cluster", "--input", fig3_csv, "--rate", "100", "--k", "2",
                "--quantile", "0.99", "--restarts", "10", "--seed", "5"]
        assert main(args + ["--out", str(a)]) == 0
        assert main(args + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestChi:
    def test_matrix_and_heatmap(self, fig3_csv, tmp_path):
        out, svg = tmp_path / "chi.csv", tmp_path / "chi.svg"
        code = main(["chi", "--input", fig3_csv, "--rate", "100",
                     "--quantile", "0.99", "--out", str(out), "--svg", str(svg)])
        assert code == 0
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["", "T3", "P4", "T6"]
        values = {(r[0], name): float(v)
                  for r in rows[1:] for name, v in zip(rows[0][1:], r[1:])}
        assert values[("P4", "T6")] > values[("T3", "P4")]
        assert svg.exists()

    def test_degenerate_quantile_for_short_input(self, tmp_path):
        path = tmp_path / "tiny.csv"
        path.write_text("a,b\n" + "\n".join(f"{i},{i+1}" for i in range(20)) + "\n")
        assert main(["chi", "--input", str(path), "--rate", "100",
                     "--quantile", "0.999", "--out", str(tmp_path / "m.csv")]) == 3


class TestWindows:
    def test_window_count_and_ids(self, fig3_csv, tmp_path):
        out = tmp_path / "w.json"
        code = main(["windows", "--input", fig3_csv, "--rate", "100", "--k", "2",
                     "--window", "20", "--stride", "20", "--restarts", "5",
                     "--out", str(out)])
        assert code == 0
        doc = read_result(str(out))
        assert len(doc.windows) == 4  # 80 seconds in 20-second disjoint windows
        assert [w.communities.window_id for w in doc.windows] == [0, 1, 2, 3]
        assert doc.windows[1].start == 2000
        assert doc.failed_windows == []

    def test_thread_count_does_not_change_bytes(self, fig3_csv, tmp_path, monkeypatch):
        args = ["windows", "--input", fig3_csv, "--rate", "100", "--k", "2",
                "--window", "20", "--stride", "20", "--restarts", "5"]
        monkeypatch.setenv("EXCO_THREADS", "1")
        assert main(args + ["--out", str(tmp_path / "w1.json")]) == 0
        monkeypatch.setenv("EXCO_THREADS", "8")
        assert main(args + ["--out", str(tmp_path / "w8.json")]) == 0
        assert (tmp_path / "w1.json").read_bytes() == (tmp_path / "w8.json").read_bytes()

    def test_bad_threads_env(self, fig3_csv, tmp_path, monkeypatch):
        monkeypatch.setenv("EXCO_THREADS", "many")
        assert main(["windows", "--input", fig3_csv, "--rate", "100",
                     "--out", str(tmp_path / "w.json")]) == 2


class TestPersist:
    def test_pre_post_outputs(self, fig3_csv, tmp_path):
        prefix = tmp_path / "per"
        code = main(["persist", "--input", fig3_csv, "--rate", "100", "--k", "2",
                     "--window", "10", "--stride", "10", "--restarts", "5",
                     "--split", "40", "--out-prefix", str(prefix)])
        assert code == 0
        for suffix in ("_pre.csv", "_post.csv", "_pre.svg", "_post.svg"):
            assert (tmp_path / f"per{suffix}").exists()
        with open(f"{prefix}_pre.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["", "T3", "P4", "T6"]
        diag = [float(rows[i + 1][i + 1]) for i in range(3)]
        assert diag == [1.0, 1.0, 1.0]

    def test_split_outside_data_degenerate(self, fig3_csv, tmp_path):
        assert main(["persist", "--input", fig3_csv, "--rate", "100",
                     "--split", "500", "--restarts", "5",
                     "--out-prefix", str(tmp_path / "p")]) == 3


class TestKsweep:
    def test_objective_csv_monotone(self, blocks_csv, tmp_path):
        out = tmp_path / "ks.csv"
        code = main(["ksweep", "--input", blocks_csv, "--rate", "100",
                     "--kmin", "1", "--kmax", "5", "--quantile", "0.9",
                     "--restarts", "5", "--out", str(out)])
        assert code == 0
        with open(out, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["k", "objective"]
        ks = [int(r[0]) for r in rows[1:]]
        objectives = [float(r[1]) for r in rows[1:]]
        assert ks == [1, 2, 3, 4, 5]
        assert all(b <= a + 1e-12 for a, b in zip(objectives, objectives[1:]))

    def test_infeasible_k_warning(self, tmp_path, capsys):
        path = tmp_path / "tiny.csv"
        rng = np.random.default_rng(0)
        rows = "\n".join(f"{a},{b}" for a, b in rng.normal(size=(40, 2)))
        path.write_text("a,b\n" + rows + "\n")
        out = tmp_path / "ks.csv"
        code = main(["ksweep", "--input", str(path), "--rate", "100",
                     "--kmin", "1", "--kmax", "10", "--quantile", "0.9",
                     "--restarts", "3", "--out", str(out)])
        assert code == 0
        err = capsys.readouterr().err
        assert "skipped" in err

    def test_kmin_above_kmax_usage_error(self, blocks_csv, tmp_path):
        assert main(["ksweep", "--input", blocks_csv, "--rate", "100",
                     "--kmin", "5", "--kmax", "2",
                     "--out", str(tmp_path / "ks.csv")]) == 2
