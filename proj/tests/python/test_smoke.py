"""Smoke tests for the stylediv python module."""

import math

import pytest

import stylediv


def test_tokenize():
    assert stylediv.tokenize("The cat sat.") == ["the", "cat", "sat", "."]
    assert stylediv.tokenize("") == []
    assert stylediv.tokenize("don't stop") == ["don't", "stop"]
    assert stylediv.tokenize("The Cat", lowercase=False) == ["The", "Cat"]


def test_ngram_features():
    assert stylediv.ngram_set(["a", "b", "a", "b"], 1) == [["a"], ["b"]]
    assert stylediv.ngram_overlap(list("abcd"), list("abce"), 1, 3) == pytest.approx(3.0)
    assert stylediv.ngram_overlap(list("abc"), list("abc"), 1, 2) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        stylediv.ngram_overlap(list("abc"), list("abc"), 2, 2)


def test_edit_distance_and_similarity():
    assert stylediv.edit_distance(["the", "cat", "sat"], ["the", "dog", "sat"]) == 1
    assert stylediv.edit_distance([], ["a", "b"]) == 2
    assert stylediv.edit_similarity(["the", "cat", "sat"], ["the", "dog", "sat"]) == (
        pytest.approx(1 - 1 / 3)
    )
    assert stylediv.edit_similarity([], []) == 1.0


def test_embedding_and_cosine():
    a = stylediv.embed("a a b", dim=8)
    b = stylediv.embed("a a b", dim=8)
    assert a == b
    assert math.isclose(sum(v * v for v in a), 1.0, abs_tol=1e-12)
    value, degenerate = stylediv.cosine_stability(a, b)
    assert math.isclose(value, 1.0, abs_tol=1e-12)
    assert not degenerate

    zero, flag = stylediv.cosine_stability(stylediv.embed("", dim=8), a)
    assert zero == 0.0
    assert flag


def test_deterministic_rewrite():
    tokens = ["quick", "big", "orbit", "small", "begin"]
    assert stylediv.deterministic_rewrite(tokens, "identity") == tokens
    swapped = stylediv.deterministic_rewrite(tokens, "synonym-swap", rate=1.0, seed=3)
    assert len(swapped) == len(tokens)
    assert swapped != tokens
    assert stylediv.deterministic_rewrite(tokens, "synonym-swap", rate=1.0, seed=3) == swapped
    kept = stylediv.deterministic_rewrite(tokens, "drop-rate", rate=1.0, seed=3)
    assert len(kept) == 1
    with pytest.raises(Exception):
        stylediv.deterministic_rewrite(tokens, "no-such-rule")


def test_style_features_identity_rewrite():
    features = stylediv.style_features("alpha beta gamma", ["alpha beta gamma"],
                                       n1=1, n2=2)
    assert len(features) == 3
    assert features[0] == pytest.approx(5.0)
    assert features[1] == 1.0
    assert features[2] == pytest.approx(1.0, abs=1e-12)

    two = stylediv.style_features("alpha beta gamma", ["alpha beta gamma"] * 2,
                                  n1=1, n2=2)
    assert len(two) == 6


def test_gradient_primitives():
    g, h = stylediv.grad_hess(1, 0.0)
    assert g == pytest.approx(-0.5)
    assert h == pytest.approx(0.25)
    assert stylediv.leaf_weight(-0.5, 0.25, 1.0) == pytest.approx(0.4)
    assert stylediv.split_gain(-0.5, 0.25, 0.5, 0.25, 1.0, 0.0) == pytest.approx(0.2)


def test_train_micro_example(tmp_path):
    model = stylediv.train_detector(
        [[0.0], [1.0]], [1, 0],
        rounds=1, learning_rate=0.3, max_depth=1, lambda_=1.0, gamma=0.0,
        min_samples_leaf=1)
    assert model.num_trees == 1
    assert model.predict_logit([0.0]) == 0.12
    assert model.predict_logit([1.0]) == -0.12
    assert model.predict_proba([0.0]) == pytest.approx(0.5300, abs=1e-4)
    assert model.predict([0.0], tau=0.5) == 1
    assert model.predict([1.0], tau=0.5) == 0

    path = str(tmp_path / "model.json")
    model.save(path)
    loaded = stylediv.load_detector(path)
    assert loaded.predict_logit([0.25]) == model.predict_logit([0.25])

    with pytest.raises(ValueError):
        stylediv.train_detector([[0.0], [1.0]], [1, 1])


def test_metrics():
    assert stylediv.auroc([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0]) == 1.0
    assert stylediv.auroc([0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0]) == 0.75
    f1, threshold = stylediv.best_f1([0.9, 0.8, 0.2], [1, 1, 0])
    assert f1 == 1.0
    assert 0.2 < threshold < 0.8
    kl, hellinger = stylediv.histogram_divergences([0.9] * 20, [0.1] * 20)
    assert kl > 0.0
    assert 0.0 < hellinger <= 1.0


def test_end_to_end_separation():
    # Stable documents (machine-like) barely change under rewriting; volatile
    # ones churn. The detector must separate them.
    rows, labels = [], []
    for i in range(40):
        label = i % 2
        base = ["orbit", "lattice", "tensor", "kernel", "module"] * 4
        if label == 0:
            base = ["quick", "big", "small", "begin", "end"] * 4
        text = " ".join(base)
        rewritten = " ".join(
            stylediv.deterministic_rewrite(
                base, "synonym-swap", rate=0.5, seed=1000 + i))
        rows.append(stylediv.style_features(text, [rewritten], normalize_overlap=True))
        labels.append(label)
    model = stylediv.train_detector(rows, labels, rounds=30)
    scores = [model.predict_proba(row) for row in rows]
    assert stylediv.auroc(scores, labels) >= 0.99
