import numpy as np
import pytest

from mvnet import TrainConfig, keyword_corpus


@pytest.fixture(scope="session")
def tiny_corpus():
    """Small four-class keyword corpus shared by integration tests."""
    return keyword_corpus(train_size=200, dev_size=60, test_size=60, seed=7)


@pytest.fixture()
def tiny_config():
    return TrainConfig(views=3, view_dim=8, embed_dim=12, batch_size=20,
                       max_epochs=3, patience=5, dropout=0.0, lr_scale=1.0,
                       conv_features=False, seed=11)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
