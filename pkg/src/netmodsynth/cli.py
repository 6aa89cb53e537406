"""Command-line interface: train, render architecture specs to WAV, run
analyses, and serve the HTTP API.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import analysis, corpus, dsp, graph, model, training, wavio
from .errors import (
    ArchitectureError,
    ConfigurationError,
    TrainingError,
    WeightFormatError,
)

EXIT_VALIDATION = 1
EXIT_IO = 2


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except (
            ArchitectureError,
            ConfigurationError,
            TrainingError,
            WeightFormatError,
            ValueError,
        ) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except OSError as exc:
            click.echo(f"I/O error: {exc}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


@click.group()
def main():
    """Network-modulation synthesis engine."""


@main.command("train")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--epochs", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option(
    "--corpus-config",
    "corpus_config_path",
    type=click.Path(exists=False, path_type=Path),
    default=None,
    help="JSON file with corpus settings (timbre_profiles, note_duration, seed).",
)
@_exit_codes
def cmd_train(out_path: Path, epochs: int, seed: int, corpus_config_path: Path | None):
    """Generate the synthetic corpus, train, and write weights + loss CSV."""
    if corpus_config_path is not None:
        with open(corpus_config_path) as fh:
            corpus_cfg = corpus.CorpusConfig(**json.load(fh))
    else:
        corpus_cfg = corpus.CorpusConfig(seed=seed)
    train_cfg = training.TrainConfig(epochs=epochs, seed=seed)

    # Fail fast on unwritable output before spending time training.
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "ab"):
        pass

    click.echo("generating corpus...")
    frames = corpus.generate_corpus(corpus_cfg)
    click.echo(f"corpus: {len(frames)} frames; training {epochs} epochs...")
    result = training.train(frames, train_cfg)
    model.save_weights(result.model, out_path)
    result.save_history_csv(f"{out_path}.loss.csv")
    last = result.history[-1]
    click.echo(f"done: epoch {last[0]} train_mse={last[1]:.6f} val_mse={last[2]:.6f}")


@main.command("render")
@click.option("--model", "model_path", required=True, type=click.Path(path_type=Path))
@click.option("--spec", "spec_path", required=True, type=click.Path(path_type=Path))
@click.option("--out-dir", required=True, type=click.Path(path_type=Path))
@_exit_codes
def cmd_render(model_path: Path, spec_path: Path, out_dir: Path):
    """Render an architecture spec to one WAV per leaf."""
    net = model.load_weights(model_path)
    arch, duration = graph.load_architecture(spec_path)
    result = graph.render_architecture(net, arch, duration)
    out_dir.mkdir(parents=True, exist_ok=True)
    for leaf_id, audio in result.audio.items():
        wavio.write_wav(out_dir / f"{leaf_id}.wav", audio)
        click.echo(f"{leaf_id}: {len(audio) / dsp.SAMPLE_RATE:.3f} s")


@main.command("sweep")
@click.option("--model", "model_path", required=True, type=click.Path(path_type=Path))
@click.option("--param-index", default=3, show_default=True)
@click.option("--from", "start", default=0.0, show_default=True)
@click.option("--to", "stop", default=3.0, show_default=True)
@click.option("--seconds", default=10.0, show_default=True)
@click.option("--others", default=1.0, show_default=True)
@click.option("--out-csv", "out_prefix", required=True, type=click.Path(path_type=Path))
@_exit_codes
def cmd_sweep(model_path, param_index, start, stop, seconds, others, out_prefix):
    """Run the single-parameter sweep and export both encoding series."""
    net = model.load_weights(model_path)
    report = analysis.run_param_sweep(
        net, param_index=param_index, start=start, stop=stop,
        seconds=seconds, others=others,
    )
    report.modulator_series.to_csv(f"{out_prefix}_modulator.csv")
    report.carrier_series.to_csv(f"{out_prefix}_carrier.csv")
    click.echo(f"moving_dims: {report.moving_dims}")


@main.command("spectrogram")
@click.option("--in", "in_path", required=True, type=click.Path(path_type=Path))
@click.option("--out-csv", required=True, type=click.Path(path_type=Path))
@_exit_codes
def cmd_spectrogram(in_path: Path, out_csv: Path):
    """Export a dB spectrogram of a WAV file as CSV."""
    audio = wavio.read_wav(in_path)
    analysis.spectrogram(audio).to_csv(out_csv)
    click.echo(f"wrote {out_csv}")


@main.command("serve")
@click.option("--model", "model_path", type=click.Path(path_type=Path), default=None)
@click.option("--random-model", is_flag=True, help="Serve an untrained seeded model.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--max-duration-s", default=30.0, show_default=True)
@click.option("--static-dir", type=click.Path(path_type=Path), default=None)
@_exit_codes
def cmd_serve(model_path, random_model, host, port, max_duration_s, static_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    net = None
    if random_model:
        net = model.AutoencoderModel.initialize(seed=0)
    app = create_app(
        model_path=model_path,
        model=net,
        max_duration_s=max_duration_s,
        static_dir=static_dir,
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
