import itertools
import math

import numpy as np
import pytest

import ctrscode


def test_forward_backward_matches_enumeration():
    rng = np.random.default_rng(0)
    e = rng.normal(size=(4, 3))
    t = rng.normal(size=(3, 3))
    log_z, marginals, pairwise = ctrscode.forward_backward(e, t)
    scores = {}
    for path in itertools.product(range(3), repeat=4):
        s = sum(e[i, p] for i, p in enumerate(path))
        s += sum(t[a, b] for a, b in zip(path, path[1:]))
        scores[path] = s
    ref = math.log(sum(math.exp(s) for s in scores.values()))
    assert log_z == pytest.approx(ref, abs=1e-9)
    assert np.allclose(marginals.sum(axis=1), 1.0)
    assert len(pairwise) == 3
    assert tuple(ctrscode.viterbi(e, t)) == max(scores, key=scores.get)


def test_pooled_f1_and_weights():
    assert ctrscode.pooled_f1([(1, 0, 9, 0), (9, 1, 1, 0)]) == pytest.approx(20 / 31)
    low, high = ctrscode.class_weights([0] * 134 + [1] * 91)
    assert round(low, 4) == 0.8396
    assert round(high, 4) == 1.2363


def test_five_by_two():
    p = [[0.1, 0.2], [0.0, 0.1], [0.1, 0.1], [0.2, 0.0], [0.1, 0.0]]
    assert ctrscode.five_by_two_f(p)["f_statistic"] == pytest.approx(0.13 / 0.07, abs=1e-9)


def test_synth_featurize_evaluate(tmp_path):
    ctrscode.synth(tmp_path, {"n_sessions": 30, "seed": 3})
    gold = tmp_path / "gold.jsonl"
    ids, names, x = ctrscode.featurize(gold, "mc-tfidf")
    assert x.shape == (30, len(names))
    assert ids[0] == "s0000"
    assert any("|" in n for n in names)
    report = ctrscode.evaluate(gold, {"feature_set": "mc", "seed": 1})
    assert report["kind"] == "eval_report"
    assert 0.0 <= report["report"]["total"]["f1_high"] <= 1.0


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(ValueError):
        ctrscode.synth(tmp_path, {"n_sessions": 0})
    with pytest.raises(ctrscode.ValidationError):
        ctrscode.evaluate(tmp_path / "x.jsonl", {"folds": 1})
    with pytest.raises(FileNotFoundError):
        ctrscode.featurize(tmp_path / "missing.jsonl", "tfidf")
    with pytest.raises(ArithmeticError):
        ctrscode.forward_backward(np.full((2, 2), np.nan), np.zeros((2, 2)))
