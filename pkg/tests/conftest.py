import os

import pytest

import shlrkit
from shlrkit import config
from shlrkit.dsl import build_model, parse_model

MODELS_DIR = os.path.join(os.path.dirname(shlrkit.__file__), "models")


@pytest.fixture
def model_path():
    def _path(name):
        return os.path.join(MODELS_DIR, f"{name}.shlr")

    return _path


@pytest.fixture
def load_model(model_path):
    """Parse and build a bundled model; keyword arguments act as command-line flags."""

    def _load(name, **flags):
        with open(model_path(name), "r", encoding="utf-8") as fh:
            model = parse_model(fh.read())
        settings = config.resolve_settings(flags, model.config, environ={})
        return model, build_model(model, settings)

    return _load
