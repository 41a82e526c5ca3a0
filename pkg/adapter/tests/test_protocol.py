"""Protocol conformance of both scorers."""

import csv
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import pytest

from deepfake_adapter.cli import main
from deepfake_adapter.fixtures import sanity_clip, write_sanity_set
from deepfake_adapter.scoring import (
    BUNDLED_CHECKPOINT,
    AdapterConfig,
    AdapterError,
    CheckpointScorer,
    score_directory,
)
from deepfake_adapter.wavio import TARGET_RATE, prepare, read_wav, write_wav


@pytest.fixture
def wav_dir(tmp_path):
    labels = write_sanity_set(tmp_path / "wavs", n_per_class=4)
    return tmp_path / "wavs", labels


def _read_scores(path):
    with open(path, newline="") as fh:
        return {r["clip_id"]: float(r["score"]) for r in csv.DictReader(fh)}


class TestScoreDirectory:
    def test_one_row_per_wav(self, wav_dir, tmp_path):
        d, labels = wav_dir
        out = tmp_path / "scores.csv"
        n = score_directory(d, out, AdapterConfig())
        scores = _read_scores(out)
        assert n == len(labels)
        assert set(scores) == set(labels)
        assert all(np.isfinite(v) for v in scores.values())

    def test_rerun_identical(self, wav_dir, tmp_path):
        d, _ = wav_dir
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        score_directory(d, a, AdapterConfig())
        score_directory(d, b, AdapterConfig())
        assert a.read_bytes() == b.read_bytes()

    def test_unreadable_wav_names_file(self, wav_dir, tmp_path):
        d, _ = wav_dir
        (d / "junk.wav").write_bytes(b"this is not audio")
        with pytest.raises(AdapterError, match="junk.wav"):
            score_directory(d, tmp_path / "o.csv", AdapterConfig())

    def test_wrong_rate_rejected(self, tmp_path):
        d = tmp_path / "wavs"
        d.mkdir()
        write_wav(d / "slow.wav", np.zeros(8000) + 0.1, 8000)
        with pytest.raises(AdapterError, match="16000"):
            score_directory(d, tmp_path / "o.csv", AdapterConfig())

    def test_empty_dir_rejected(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(AdapterError, match="no WAV"):
            score_directory(tmp_path / "empty", tmp_path / "o.csv", AdapterConfig())

    def test_batch_size_does_not_change_scores(self, wav_dir, tmp_path):
        d, _ = wav_dir
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        score_directory(d, a, AdapterConfig(batch_size=1))
        score_directory(d, b, AdapterConfig(batch_size=64))
        assert _read_scores(a) == _read_scores(b)

    def test_parallel_disjoint_directories(self, tmp_path):
        dirs = []
        for i in range(3):
            d = tmp_path / f"d{i}"
            write_sanity_set(d, n_per_class=2)
            dirs.append(d)

        def _run(d):
            out = d / "scores.csv"
            score_directory(d, out, AdapterConfig())
            return _read_scores(out)

        with ThreadPoolExecutor(max_workers=3) as pool:
            results = list(pool.map(_run, dirs))
        assert results[0] == _run(dirs[0])  # parallel result matches serial
        assert all(len(r) == 4 for r in results)


class TestConfig:
    def test_non_cpu_device_rejected(self, wav_dir, tmp_path):
        d, _ = wav_dir
        with pytest.raises(AdapterError, match="CPU-only"):
            score_directory(d, tmp_path / "o.csv", AdapterConfig(device="cuda:0"))

    def test_missing_checkpoint(self):
        with pytest.raises(AdapterError, match="not found"):
            CheckpointScorer("/nonexistent/model.npz")

    def test_feature_version_mismatch(self, tmp_path):
        bad = tmp_path / "bad.npz"
        np.savez(bad, weights=np.zeros(17), bias=0.0, polarity=1, feature_version="other-v9")
        with pytest.raises(AdapterError, match="feature version"):
            CheckpointScorer(bad)

    def test_negative_polarity_flips_scores(self, tmp_path):
        base = np.load(BUNDLED_CHECKPOINT)
        flipped = tmp_path / "flipped.npz"
        np.savez(
            flipped,
            weights=-base["weights"],
            bias=-base["bias"],
            polarity=-1,
            feature_version=str(base["feature_version"]),
        )
        x = prepare(sanity_clip("spoof", 0), "s0")
        orig = CheckpointScorer(BUNDLED_CHECKPOINT).score_batch([x])[0]
        flip = CheckpointScorer(flipped).score_batch([x])[0]
        assert orig == pytest.approx(flip, abs=1e-12)  # still higher-is-spoof


class TestCli:
    def test_baseline_roundtrip(self, wav_dir, tmp_path, capsys):
        d, labels = wav_dir
        out = tmp_path / "scores.csv"
        assert main(["baseline", str(d), str(out)]) == 0
        assert len(_read_scores(out)) == len(labels)

    def test_model_subcommand(self, wav_dir, tmp_path):
        d, _ = wav_dir
        out = tmp_path / "scores.csv"
        assert main(["model", "--checkpoint", str(BUNDLED_CHECKPOINT), str(d), str(out)]) == 0

    def test_unreadable_input_nonzero_exit(self, tmp_path, capsys):
        d = tmp_path / "wavs"
        d.mkdir()
        (d / "bad.wav").write_bytes(b"nope")
        assert main(["baseline", str(d), str(tmp_path / "o.csv")]) == 1
        assert "bad.wav" in capsys.readouterr().err


class TestPrepare:
    def test_policy_lengths(self):
        for n in (1000, 64000, 100000):
            x, _ = np.random.default_rng(n).uniform(-1, 1, n), None
            assert prepare(x, f"c{n}").size == 64000

    def test_deterministic_crop(self):
        x = np.random.default_rng(1).uniform(-1, 1, 100000)
        np.testing.assert_array_equal(prepare(x, "same"), prepare(x, "same"))

    def test_wav_roundtrip(self, tmp_path):
        x = np.random.default_rng(2).uniform(-1, 1, 5000)
        write_wav(tmp_path / "t.wav", x, TARGET_RATE)
        back, rate = read_wav(tmp_path / "t.wav")
        assert rate == TARGET_RATE
        assert np.max(np.abs(back - x)) <= 1 / 32767
