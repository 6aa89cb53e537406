import numpy as np
import pytest

from netmodsynth import corpus, dsp, model, training


@pytest.fixture(scope="session")
def stft_cfg():
    return dsp.StftConfig()


@pytest.fixture(scope="session")
def small_spec():
    return model.LayerSpec((64, 32, 16, 8, 16, 64, 2049))


@pytest.fixture(scope="session")
def small_model(small_spec):
    """Untrained seeded model; enough for shape/determinism/collapse tests."""
    return model.AutoencoderModel.initialize(small_spec, seed=7)


@pytest.fixture(scope="session")
def small_corpus():
    cfg = corpus.CorpusConfig(timbre_profiles=2, seed=11)
    return corpus.generate_corpus(cfg)


@pytest.fixture(scope="session")
def trained_small_model(small_spec, small_corpus):
    """Quickly trained desk model for tests needing non-degenerate encodings."""
    cfg = training.TrainConfig(epochs=8, seed=11)
    return training.train(small_corpus, cfg, layer_spec=small_spec).model


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
