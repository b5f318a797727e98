import time

import pytest

from framecmd.corpus import label_vocab
from framecmd.embeddings import random_embeddings
from framecmd.model import ModelConfig, build_model
from framecmd.pipeline import TrainConfig, train
from framecmd.synth import demo_map, generate_synthetic


@pytest.fixture(scope="session")
def synth50():
    return generate_synthetic(seed=7, n=50)


@pytest.fixture(scope="session")
def demo_maps():
    return {"house1": demo_map()}


@pytest.fixture(scope="session")
def overfit_bundle(synth50):
    """3L-ATT model trained to convergence on the 50-sentence corpus.

    Shared across tests that need a model that actually parses; the
    training run itself is what the overfit acceptance criterion checks.
    """
    corpus = synth50
    vocab = label_vocab(corpus)
    table = random_embeddings([t for s in corpus for t in s.tokens],
                              dim=50, seed=7)
    model_cfg = ModelConfig(variant="3L", attention=True, embedding_dim=50,
                            hidden_size=16, decoder_hidden=16,
                            attention_size=8, label_embedding_dim=8,
                            dropout=0.0, seed=7)
    train_cfg = TrainConfig(epochs=100, batch_size=8, lr=2e-3, patience=0,
                            seed=7)
    model = build_model(model_cfg, vocab)
    start = time.monotonic()
    history = train(model, table, corpus, train_cfg)
    elapsed = time.monotonic() - start
    return {"model": model, "table": table, "corpus": corpus,
            "vocab": vocab, "history": history,
            "train_seconds": elapsed, "epochs": train_cfg.epochs}
