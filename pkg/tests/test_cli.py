import json

import numpy as np
import pytest

from fadogate.cli import main
from fadogate.datafiles import read_cache, write_cache
from fadogate.model_io import load_model
from fadogate.svm import decision_value


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    assert run("gen-corpus", out, "--n-per-class", 2, "--seed", 3,
               "--duration", 10.5) == 0
    return out


@pytest.fixture(scope="module")
def cache_path(corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("cache") / "features.csv"
    assert run("extract", corpus_dir / "manifest.csv", "--out", out) == 0
    return out


def toy_cache(path, rng, n_per_class=10):
    """Trivially separable cache: class is the sign of feature 0.

    The other dimensions are constant, so the scaler collapses them to 0
    and separability survives any (C, gamma) choice.
    """
    rows = []
    for i in range(n_per_class):
        pos = np.zeros(32)
        pos[0] = rng.uniform(1.0, 2.0)
        rows.append((f"pos{i}.wav", 1, pos))
        neg = np.zeros(32)
        neg[0] = rng.uniform(-2.0, -1.0)
        rows.append((f"neg{i}.wav", -1, neg))
    write_cache(rows, path)
    return path


class TestGenCorpus:
    def test_writes_clips_and_manifest(self, corpus_dir):
        names = sorted(p.name for p in corpus_dir.iterdir())
        assert names == ["fado_000.wav", "fado_001.wav", "manifest.csv",
                         "other_000.wav", "other_001.wav"]


class TestExtract:
    def test_cache_shape(self, cache_path):
        lines = cache_path.read_text().splitlines()
        assert lines[0].split(",")[:2] == ["path", "label"]
        assert len(lines) == 5  # header + 4 songs
        assert all(len(line.split(",")) == 34 for line in lines)

    def test_rerun_is_byte_identical(self, corpus_dir, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert run("extract", corpus_dir / "manifest.csv",
                       "--out", out) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_file_is_tolerated(self, corpus_dir, tmp_path):
        manifest = tmp_path / "partial.csv"
        manifest.write_text(
            "path,label\n"
            f"{corpus_dir / 'fado_000.wav'},fado\n"
            f"{corpus_dir / 'other_000.wav'},other\n"
            "does-not-exist.wav,other\n")
        out = tmp_path / "partial_cache.csv"
        assert run("extract", manifest, "--out", out) == 0
        assert len(read_cache(out)) == 2

    def test_zero_successes_fail(self, tmp_path):
        manifest = tmp_path / "all_bad.csv"
        manifest.write_text("path,label\nnope.wav,fado\nnada.wav,other\n")
        assert run("extract", manifest, "--out", tmp_path / "c.csv") == 1

    def test_parallel_extraction_matches_serial(self, corpus_dir, tmp_path):
        serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
        assert run("extract", corpus_dir / "manifest.csv",
                   "--out", serial) == 0
        assert run("extract", corpus_dir / "manifest.csv",
                   "--out", parallel, "--jobs", 2) == 0
        assert serial.read_bytes() == parallel.read_bytes()


class TestTrain:
    def test_fixed_params_round_trip(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "toy.csv", rng)
        model_path = tmp_path / "toy.svm"
        assert run("train", cache, "--model-out", model_path,
                   "--c", 1.0, "--gamma", 1.0, "--no-figures") == 0
        model = load_model(model_path)
        ds = read_cache(cache)
        for vec, label in zip(ds.vectors, ds.labels):
            dv = decision_value(model, vec)
            assert (1 if dv >= 0 else -1) == label
        report = json.loads((tmp_path / "toy.svm.train.json").read_text())
        assert report["C"] == 1.0 and report["gamma"] == 1.0
        assert report["grid"] is False

    def test_grid_tie_break_reported(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "toy.csv", rng)
        model_path = tmp_path / "toy.svm"
        report_path = tmp_path / "train.json"
        assert run("train", cache, "--model-out", model_path,
                   "--grid", "--c", 0.1, "--gamma", 0.1,  # ignored: grid on
                   "--folds", 5, "--seed", 2,
                   "--report-out", report_path) == 0
        report = json.loads(report_path.read_text())
        assert report["grid"] is True
        assert report["cv_accuracy"] == 100.0
        # smallest C then smallest gamma on the all-tied default grid
        assert report["C"] == 2.0 ** -5
        assert report["gamma"] == 2.0 ** -15
        assert (tmp_path / "train.grid.png").exists()

    def test_single_class_cache_rejected(self, tmp_path, rng):
        rows = [(f"p{i}.wav", 1, rng.normal(0, 1, 32)) for i in range(6)]
        cache = tmp_path / "single.csv"
        write_cache(rows, cache)
        assert run("train", cache, "--model-out", tmp_path / "m.svm",
                   "--c", 1.0, "--gamma", 1.0) == 2

    def test_rerun_is_byte_identical(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "toy.csv", rng)
        outs = []
        for name in ("m1.svm", "m2.svm"):
            path = tmp_path / name
            assert run("train", cache, "--model-out", path,
                       "--c", 2.0, "--gamma", 0.5, "--no-figures",
                       "--seed", 5) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]


class TestPredict:
    def test_training_songs_recover_their_labels(self, corpus_dir, cache_path,
                                                 tmp_path, capsys):
        model_path = tmp_path / "m.svm"
        assert run("train", cache_path, "--model-out", model_path,
                   "--c", 4.0, "--gamma", 0.125, "--no-figures") == 0
        capsys.readouterr()
        assert run("predict", model_path,
                   corpus_dir / "fado_000.wav",
                   corpus_dir / "other_000.wav") == 0
        lines = capsys.readouterr().out.strip().splitlines()
        fields = [line.split("\t") for line in lines]
        assert fields[0][1] == "fado" and fields[1][1] == "other"
        for row in fields:
            float(row[2])  # decision value parses

    def test_cache_input(self, cache_path, tmp_path, capsys):
        model_path = tmp_path / "m.svm"
        assert run("train", cache_path, "--model-out", model_path,
                   "--c", 4.0, "--gamma", 0.125, "--no-figures") == 0
        capsys.readouterr()
        assert run("predict", model_path, "--cache", cache_path) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 4
        labels = [line.split("\t")[1] for line in lines]
        assert labels == ["fado", "fado", "other", "other"]

    def test_undecodable_file_fails_naming_it(self, cache_path, tmp_path,
                                              capsys):
        model_path = tmp_path / "m.svm"
        assert run("train", cache_path, "--model-out", model_path,
                   "--c", 4.0, "--gamma", 0.125, "--no-figures") == 0
        bad = tmp_path / "not_audio.wav"
        bad.write_bytes(b"this is not audio")
        assert run("predict", model_path, bad) == 1
        assert "not_audio.wav" in capsys.readouterr().err


class TestEvaluate:
    def test_cv_separable_scores_100(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "toy.csv", rng)
        report_path = tmp_path / "cv.json"
        assert run("evaluate", cache, "--mode", "cv", "--c", 1.0,
                   "--gamma", 1.0, "--folds", 5, "--seed", 1,
                   "--report", report_path, "--no-figures") == 0
        doc = json.loads(report_path.read_text())
        assert doc["accuracy"] == 100.0
        tp, fp, fn, tn = doc["confusion"]
        assert doc["accuracy"] == 100.0 * (tp + tn) / (tp + fp + fn + tn)

    def test_split_sizes_on_500_rows(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "big.csv", rng, n_per_class=250)
        report_path = tmp_path / "split.json"
        assert run("evaluate", cache, "--mode", "split", "--c", 1.0,
                   "--gamma", 1.0, "--seed", 4,
                   "--report", report_path, "--no-figures") == 0
        doc = json.loads(report_path.read_text())
        assert doc["params"]["n_train"] == 334
        assert doc["params"]["n_test"] == 166
        assert len(doc["items"]) == 166

    def test_figures_rendered_next_to_report(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "toy.csv", rng)
        report_path = tmp_path / "figs.json"
        assert run("evaluate", cache, "--mode", "cv", "--c", 1.0,
                   "--gamma", 1.0, "--folds", 5, "--seed", 1,
                   "--report", report_path) == 0
        assert (tmp_path / "figs.confusion.png").exists()
        assert (tmp_path / "figs.decisions.png").exists()

    def test_rerun_is_byte_identical(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "toy.csv", rng)
        docs = []
        for name in ("r1.json", "r2.json"):
            path = tmp_path / name
            assert run("evaluate", cache, "--mode", "cv", "--c", 1.0,
                       "--gamma", 1.0, "--folds", 5, "--seed", 9,
                       "--report", path, "--no-figures") == 0
            docs.append(path.read_bytes())
        assert docs[0] == docs[1]

    def test_grid_when_params_omitted(self, tmp_path, rng):
        cache = toy_cache(tmp_path / "toy.csv", rng, n_per_class=6)
        report_path = tmp_path / "auto.json"
        assert run("evaluate", cache, "--mode", "cv", "--folds", 3,
                   "--seed", 2, "--report", report_path,
                   "--no-figures") == 0
        doc = json.loads(report_path.read_text())
        assert doc["params"]["grid"] is True
        assert doc["accuracy"] == 100.0
