"""Python access to the ctrscode core: sequence inference, features, evaluation."""

import json

from . import _ctrscode
from ._ctrscode import (
    MissingArtifactError,
    NumericalError,
    ValidationError,
    __version__,
    class_weights,
    featurize,
    forward_backward,
    pooled_f1,
    viterbi,
)

__all__ = [
    "MissingArtifactError",
    "NumericalError",
    "ValidationError",
    "__version__",
    "class_weights",
    "evaluate",
    "featurize",
    "five_by_two_f",
    "forward_backward",
    "pooled_f1",
    "synth",
    "viterbi",
]


def synth(out, config=None):
    """Write a synthetic corpus to directory `out`. `config` overrides defaults."""
    _ctrscode.synth(str(out), json.dumps(config or {}))


def evaluate(corpus, config=None):
    """Cross-validate every code on a tagged corpus; returns the report dict."""
    return json.loads(_ctrscode.evaluate(str(corpus), json.dumps(config or {})))


def five_by_two_f(p):
    """Combined 5x2cv F test from a 5x2 matrix of error-rate differences."""
    return json.loads(_ctrscode.five_by_two_f([list(row) for row in p]))
