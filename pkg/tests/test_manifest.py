"""Manifest loading, validation, and the WaveFake layout converter."""

import json

import numpy as np
import pytest

from audiobench.audio import AudioBuffer, save_audio
from audiobench.errors import ConfigError
from audiobench.manifest import (
    assign_split,
    from_wavefake,
    load_manifest,
    save_manifest,
)


def _write_csv(path, rows, header="clip_id,path,label,split,speaker"):
    path.write_text("\n".join([header] + rows) + "\n")
    return path


class TestLoadCsv:
    def test_three_rows(self, tmp_path):
        m = load_manifest(
            _write_csv(
                tmp_path / "m.csv",
                [
                    "a,/x/a.wav,bona_fide,train,spk1",
                    "b,/x/b.wav,spoof,test,spk1",
                    "c,/x/c.wav,spoof,val,spk2",
                ],
            )
        )
        assert len(m) == 3
        assert m.by_id["b"].label == "spoof"
        assert m.by_id["a"].tags == {"speaker": "spk1"}

    def test_duplicate_id_names_culprit(self, tmp_path):
        path = _write_csv(
            tmp_path / "m.csv",
            ["dup,/x/a.wav,bona_fide,train,", "dup,/x/b.wav,spoof,test,"],
        )
        with pytest.raises(ConfigError, match="dup"):
            load_manifest(path)

    def test_unknown_label(self, tmp_path):
        path = _write_csv(tmp_path / "m.csv", ["a,/x/a.wav,genuine,train,"])
        with pytest.raises(ConfigError, match="label"):
            load_manifest(path)

    def test_missing_column(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("clip_id,path,label\na,/x,spoof\n")
        with pytest.raises(ConfigError, match="split"):
            load_manifest(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_manifest(tmp_path / "nope.csv")

    def test_empty_manifest(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("clip_id,path,label,split\n")
        with pytest.raises(ConfigError, match="empty"):
            load_manifest(path)


class TestJsonl:
    def test_round_trip_with_tags(self, tmp_path):
        path = tmp_path / "m.jsonl"
        rows = [
            {"clip_id": "a", "path": "/x/a.wav", "label": "spoof", "split": "test",
             "tags": {"generator": "melgan"}},
            {"clip_id": "b", "path": "/x/b.wav", "label": "bona_fide", "split": "test"},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        m = load_manifest(path)
        assert m.by_id["a"].tags["generator"] == "melgan"

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "m.jsonl"
        path.write_text('{"clip_id": "a"\n')
        with pytest.raises(ConfigError, match="JSON"):
            load_manifest(path)


class TestSaveLoad:
    def test_csv_round_trip(self, tmp_path):
        src = load_manifest(
            _write_csv(tmp_path / "m.csv", ["a,/x/a.wav,bona_fide,train,spk9"])
        )
        out = tmp_path / "out.csv"
        save_manifest(src, out)
        back = load_manifest(out)
        assert back.by_id["a"].tags == {"speaker": "spk9"}
        assert back.by_id["a"].split == "train"


class TestWavefakeConverter:
    def test_layout_mapping(self, tmp_path):
        root = tmp_path / "wavefake"
        buf = AudioBuffer(np.zeros(100) + 0.1, 16000)
        for sub, n in [("ljspeech", 4), ("melgan", 3), ("hifiGAN", 2)]:
            d = root / sub
            d.mkdir(parents=True)
            for i in range(n):
                save_audio(buf, d / f"clip{i}.wav")
        m = from_wavefake(root, seed=3)
        assert len(m) == 9
        real = m.select(label="bona_fide")
        fake = m.select(label="spoof")
        assert len(real) == 4 and len(fake) == 5
        assert {e.tags["generator"] for e in fake} == {"melgan", "hifiGAN"}
        assert all(e.split in ("train", "val", "test") for e in m)

    def test_empty_tree_rejected(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(ConfigError):
            from_wavefake(tmp_path / "empty")


class TestAssignSplit:
    def test_deterministic(self):
        assert assign_split("clip1", 5) == assign_split("clip1", 5)

    def test_ratios_roughly_honored(self):
        splits = [assign_split(f"clip{i}", 1) for i in range(3000)]
        frac_train = splits.count("train") / 3000
        frac_val = splits.count("val") / 3000
        frac_test = splits.count("test") / 3000
        assert abs(frac_train - 0.7) < 0.05
        assert abs(frac_val - 0.1) < 0.03
        assert abs(frac_test - 0.2) < 0.04
