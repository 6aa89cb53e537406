import json

import numpy as np
import pytest
from click.testing import CliRunner

from netmodsynth import cli, dsp, graph, model, wavio


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture(scope="session")
def model_file(tmp_path_factory, small_model):
    path = tmp_path_factory.mktemp("weights") / "small.bin"
    model.save_weights(small_model, path)
    return path


def modulator_spec(tmp_path, extra_nodes=(), duration=1.0):
    data = {
        "duration_s": duration,
        "nodes": [
            {"id": "root", "mode": "modulator", "latent": [1.0] * 8},
            *extra_nodes,
        ],
    }
    path = tmp_path / "arch.json"
    path.write_text(json.dumps(data))
    return path


class TestTrainCommand:
    def test_deterministic_output(self, runner, tmp_path):
        corpus_cfg = tmp_path / "corpus.json"
        corpus_cfg.write_text(json.dumps({"timbre_profiles": 1, "seed": 3}))
        outputs = []
        for name in ("a.bin", "b.bin"):
            out = tmp_path / name
            result = runner.invoke(
                cli.main,
                ["train", "--out", str(out), "--epochs", "2", "--seed", "7",
                 "--corpus-config", str(corpus_cfg)],
            )
            assert result.exit_code == 0, result.output
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert (tmp_path / "a.bin.loss.csv").exists()

    def test_zero_epochs_validation_error(self, runner, tmp_path):
        result = runner.invoke(
            cli.main, ["train", "--out", str(tmp_path / "m.bin"), "--epochs", "0"]
        )
        assert result.exit_code == 1

    def test_unwritable_path_io_error(self, runner, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("x")
        result = runner.invoke(
            cli.main, ["train", "--out", str(blocker / "m.bin"), "--epochs", "1"]
        )
        assert result.exit_code == 2


class TestRenderCommand:
    def test_single_modulator(self, runner, tmp_path, model_file, small_model):
        spec = modulator_spec(tmp_path)
        out_dir = tmp_path / "out"
        result = runner.invoke(
            cli.main,
            ["render", "--model", str(model_file), "--spec", str(spec),
             "--out-dir", str(out_dir)],
        )
        assert result.exit_code == 0, result.output
        audio = wavio.read_wav(out_dir / "root.wav")
        assert len(audio) == 4096 + 43 * 1024  # 44 frames' worth

        arch, duration = graph.load_architecture(spec)
        expected = graph.render_architecture(small_model, arch, duration)
        np.testing.assert_array_equal(
            audio.astype(np.float32), expected.audio["root"].astype(np.float32)
        )

    def test_two_leaves(self, runner, tmp_path, model_file):
        spec = modulator_spec(
            tmp_path,
            extra_nodes=[
                {"id": "a", "mode": "carrier", "parent": "root"},
                {"id": "b", "mode": "carrier", "parent": "root", "feedback": 0.5},
            ],
            duration=0.3,
        )
        out_dir = tmp_path / "out"
        result = runner.invoke(
            cli.main,
            ["render", "--model", str(model_file), "--spec", str(spec),
             "--out-dir", str(out_dir)],
        )
        assert result.exit_code == 0, result.output
        assert sorted(p.name for p in out_dir.glob("*.wav")) == ["a.wav", "b.wav"]

    def test_cycle_names_nodes(self, runner, tmp_path, model_file):
        spec = tmp_path / "arch.json"
        spec.write_text(json.dumps({
            "duration_s": 1.0,
            "nodes": [
                {"id": "root", "mode": "modulator", "latent": [1.0] * 8},
                {"id": "a", "mode": "carrier", "parent": "b"},
                {"id": "b", "mode": "carrier", "parent": "a"},
            ],
        }))
        result = runner.invoke(
            cli.main,
            ["render", "--model", str(model_file), "--spec", str(spec),
             "--out-dir", str(tmp_path / "out")],
        )
        assert result.exit_code == 1
        assert "a" in result.output and "b" in result.output

    def test_bad_model_file(self, runner, tmp_path):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"XXXX1234")
        result = runner.invoke(
            cli.main,
            ["render", "--model", str(bad), "--spec",
             str(modulator_spec(tmp_path)), "--out-dir", str(tmp_path / "out")],
        )
        assert result.exit_code == 1


class TestSweepCommand:
    def test_degenerate_sweep(self, runner, tmp_path, model_file):
        result = runner.invoke(
            cli.main,
            ["sweep", "--model", str(model_file), "--from", "1.0", "--to", "1.0",
             "--seconds", "0.5", "--out-csv", str(tmp_path / "sweep")],
        )
        assert result.exit_code == 0, result.output
        assert "moving_dims: 0" in result.output
        assert (tmp_path / "sweep_modulator.csv").exists()
        assert (tmp_path / "sweep_carrier.csv").exists()

    def test_bad_param_index(self, runner, tmp_path, model_file):
        result = runner.invoke(
            cli.main,
            ["sweep", "--model", str(model_file), "--param-index", "9",
             "--out-csv", str(tmp_path / "sweep")],
        )
        assert result.exit_code == 1


class TestSpectrogramCommand:
    def test_silence(self, runner, tmp_path):
        wav = tmp_path / "silence.wav"
        wavio.write_wav(wav, np.zeros(2 * dsp.SAMPLE_RATE))
        out_csv = tmp_path / "spec.csv"
        result = runner.invoke(
            cli.main, ["spectrogram", "--in", str(wav), "--out-csv", str(out_csv)]
        )
        assert result.exit_code == 0, result.output
        lines = out_csv.read_text().strip().splitlines()
        n_frames = (2 * dsp.SAMPLE_RATE - 4096) // 1024 + 1
        assert len(lines) == n_frames + 1
        values = {v for line in lines[1:] for v in line.split(",")[1:]}
        assert values == {"-100.0"}

    def test_non_wav_input(self, runner, tmp_path):
        bad = tmp_path / "not.wav"
        bad.write_text("hello")
        result = runner.invoke(
            cli.main,
            ["spectrogram", "--in", str(bad), "--out-csv", str(tmp_path / "o.csv")],
        )
        assert result.exit_code == 1
