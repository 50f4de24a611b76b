from __future__ import annotations

import random

import numpy as np
import pytest

from memeflow.partisanship import (
    DegenerateLabels,
    EmptyCorpus,
    EmptyTestSet,
    HashtagVocabulary,
    OutOfRange,
    SvmModel,
    UserFeatureVector,
    VocabularyMismatch,
    build_features,
    combined_accuracy,
    derive_vocabulary,
    evaluate,
    hinge_objective,
    hinge_subgradient,
    load_labels,
    load_model,
    predict,
    save_model,
    train,
)

from .conftest import make_tweet


def fv(user_id: int, values, positions=None) -> UserFeatureVector:
    vec = np.asarray(values, dtype=float)
    counts = {}
    for i, v in enumerate(vec):
        if v:
            counts[i] = int(v) if positions is None else positions[i]
    norm = np.linalg.norm(vec)
    return UserFeatureVector(user_id, counts, vec / norm if norm else vec)


class TestBuildFeatures:
    def test_counts_and_norm(self):
        users = {7: [make_tweet(1, 7, "#a #b x"), make_tweet(2, 7, "#a y")]}
        vocab = HashtagVocabulary(("a", "b"))
        _, feats = build_features(users, vocab)
        assert feats[0].counts == {0: 2, 1: 1}
        assert np.allclose(feats[0].norm, np.array([2.0, 1.0]) / np.sqrt(5.0))

    def test_no_hashtags_zero_vector(self):
        users = {7: [make_tweet(1, 7, "plain words")]}
        vocab = HashtagVocabulary(("a",))
        _, feats = build_features(users, vocab)
        assert feats[0].is_zero
        assert np.all(feats[0].norm == 0)

    def test_derive_vocabulary_frequency_and_ties(self):
        users = {
            1: [make_tweet(1, 1, "#a x"), make_tweet(2, 1, "#a y"), make_tweet(3, 1, "#b z")],
            2: [make_tweet(4, 2, "#b w"), make_tweet(5, 2, "#c v")],
        }
        vocab = derive_vocabulary(users)
        # a and b both occur twice (tie -> lexicographic); c is dropped at 1
        assert vocab.tags == ("a", "b")

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            build_features({})


def two_cluster_corpus(rng: random.Random, n_per_side=200, n_tags=20):
    """Synthetic polarized users: disjoint tag pools with 10% shared noise.
    Returns users_tweets plus the ground-truth labels."""
    users = {}
    labels = {}
    pools = {
        1: [f"l{i}" for i in range(n_tags)],
        -1: [f"r{i}" for i in range(n_tags)],
    }
    shared = [f"s{i}" for i in range(n_tags)]
    tid = 0
    for side in (1, -1):
        for j in range(n_per_side):
            uid = (1000 if side > 0 else 5000) + j
            tweets = []
            for _ in range(rng.randint(3, 8)):
                pool = pools[side] if rng.random() < 0.9 else shared
                tags = " ".join("#" + rng.choice(pool) for _ in range(rng.randint(1, 3)))
                tid += 1
                tweets.append(make_tweet(tid, uid, f"{tags} t{tid}"))
            users[uid] = tweets
            labels[uid] = side
    return users, labels


def perceptron_separates(X, y, epochs=50) -> bool:
    """Independent baseline: the classic mistake-driven update finds a
    separator iff the data is (near) linearly separable."""
    w = np.zeros(X.shape[1])
    b = 0.0
    for _ in range(epochs):
        mistakes = 0
        for i in range(len(y)):
            if y[i] * (X[i] @ w + b) <= 0:
                w += y[i] * X[i]
                b += y[i]
                mistakes += 1
        if mistakes == 0:
            return True
    return False


class TestTrain:
    def test_separable_pair(self):
        vocab = HashtagVocabulary(("a", "b"))
        feats = [fv(1, [1, 0]), fv(2, [0, 1])]
        model = train(feats, [1, -1], vocab, lam=0.01, epochs=100, seed=0)
        for f, label in zip(feats, (1, -1)):
            pred = predict(model, f)
            assert pred.label == model.label_map[label]
            assert abs(pred.distance) > 0

    def test_two_cluster_protocol(self):
        rng = random.Random(77)
        users, labels_map = two_cluster_corpus(rng)
        vocab, feats = build_features(users)
        labels = [labels_map[f.user_id] for f in feats]
        train_f, train_y = feats[0::2], labels[0::2]
        test_f, test_y = feats[1::2], labels[1::2]
        # the independent baseline confirms the corpus is separable at all
        X = np.stack([f.norm for f in train_f])
        assert perceptron_separates(X, np.asarray(train_y, dtype=float))
        model = train(train_f, train_y, vocab, lam=0.01, epochs=50, seed=1)
        report = evaluate(model, test_f, test_y)
        assert report.accuracy is not None and report.accuracy >= 0.95

    def test_identical_features_mixed_labels_no_crash(self):
        vocab = HashtagVocabulary(("a",))
        feats = [fv(i, [1.0]) for i in range(10)]
        labels = [1] * 7 + [-1] * 3
        model = train(feats, labels, vocab, lam=0.1, epochs=20, seed=0)
        report = evaluate(model, feats, labels)
        assert report.accuracy == pytest.approx(0.7)

    def test_degenerate_labels(self):
        vocab = HashtagVocabulary(("a",))
        with pytest.raises(DegenerateLabels):
            train([fv(1, [1.0])], [1], vocab)

    def test_deterministic_model_bytes(self, tmp_path):
        rng = random.Random(5)
        users, labels_map = two_cluster_corpus(rng, n_per_side=40)
        vocab, feats = build_features(users)
        labels = [labels_map[f.user_id] for f in feats]
        paths = []
        for run in range(2):
            model = train(feats, labels, vocab, lam=0.02, epochs=30, seed=9)
            path = tmp_path / f"run{run}.model"
            save_model(model, path)
            paths.append(path.read_bytes())
        assert paths[0] == paths[1]


class TestHingeGradient:
    def test_matches_central_differences(self):
        rng = np.random.default_rng(3)
        n, dim = 12, 5
        X = rng.normal(size=(n, dim))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        lam = 0.05
        h = 1e-6
        checked = 0
        for _ in range(50):
            w = rng.normal(size=dim)
            b = float(rng.normal())
            margins = 1.0 - y * (X @ w + b)
            if np.any(np.abs(margins) < 1e-3):
                continue  # stay away from the hinge kink
            gw, gb = hinge_subgradient(w, b, X, y, lam)
            for j in range(dim):
                step = np.zeros(dim)
                step[j] = h
                fd = (
                    hinge_objective(w + step, b, X, y, lam)
                    - hinge_objective(w - step, b, X, y, lam)
                ) / (2 * h)
                assert fd == pytest.approx(gw[j], rel=1e-4, abs=1e-7)
            fd_b = (
                hinge_objective(w, b + h, X, y, lam)
                - hinge_objective(w, b - h, X, y, lam)
            ) / (2 * h)
            assert fd_b == pytest.approx(gb, rel=1e-4, abs=1e-7)
            checked += 1
        assert checked >= 20


class TestPredict:
    def model(self, weights=(2.0, 0.0), bias=-1.0, epsilon=0.0):
        return SvmModel(
            HashtagVocabulary(("a", "b")),
            np.asarray(weights, dtype=float),
            bias,
            epsilon,
        )

    def test_hand_computed_distance(self):
        # raw score w.x + b = 2*1 - 1 = 1; ||w|| = 2 -> distance 0.5
        pred = predict(self.model(epsilon=0.4), fv(1, [1, 0]))
        assert pred.distance == pytest.approx(0.5)
        assert pred.label == "left"
        pred = predict(self.model(epsilon=0.6), fv(1, [1, 0]))
        assert pred.label == "abstain"

    def test_zero_vector_abstains(self):
        pred = predict(self.model(), fv(1, [0, 0]))
        assert pred.label == "abstain"
        assert pred.distance == 0.0

    def test_rescaling_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            w = rng.normal(size=4)
            b = float(rng.normal())
            x = rng.random(4) + 0.01
            vocab = HashtagVocabulary(tuple("abcd"))
            base = predict(SvmModel(vocab, w, b), fv(1, x))
            scaled = predict(SvmModel(vocab, 3.0 * w, 3.0 * b), fv(1, x))
            assert abs(base.distance - scaled.distance) < 1e-9
            assert base.label == scaled.label

    def test_vocabulary_mismatch(self):
        with pytest.raises(VocabularyMismatch):
            predict(self.model(), fv(1, [1, 0, 0]))

    def test_abstention_monotone_in_epsilon(self):
        rng = np.random.default_rng(11)
        vocab = HashtagVocabulary(tuple("abcd"))
        w = rng.normal(size=4)
        feats = [fv(i, rng.random(4) + 0.01) for i in range(40)]
        previous: set[int] = set()
        for eps in (0.0, 0.1, 0.2, 0.4, 0.8):
            model = SvmModel(vocab, w, 0.1, eps)
            abstained = {f.user_id for f in feats if predict(model, f).label == "abstain"}
            assert previous <= abstained
            previous = abstained


class TestEvaluate:
    def test_perfect_separable(self):
        vocab = HashtagVocabulary(("a", "b"))
        model = SvmModel(vocab, np.array([1.0, -1.0]), 0.0, 0.0)
        feats = [fv(1, [1, 0]), fv(2, [0, 1])]
        report = evaluate(model, feats, [1, -1])
        assert report.accuracy == 1.0 and report.coverage == 1.0

    def test_epsilon_above_max_distance(self):
        vocab = HashtagVocabulary(("a", "b"))
        model = SvmModel(vocab, np.array([1.0, -1.0]), 0.0, 99.0)
        report = evaluate(model, [fv(1, [1, 0])], [1])
        assert report.coverage == 0.0
        assert report.accuracy is None

    def test_grid_coverage_non_increasing_matches_recount(self):
        rng = random.Random(13)
        users, labels_map = two_cluster_corpus(rng, n_per_side=50)
        vocab, feats = build_features(users)
        labels = [labels_map[f.user_id] for f in feats]
        model = train(feats, labels, vocab, lam=0.02, epochs=30, seed=2)
        grid = [i / 10 for i in range(11)]
        report = evaluate(model, feats, labels, epsilon_grid=grid)
        coverages = [report.by_epsilon[e][1] for e in grid]
        assert all(a >= b for a, b in zip(coverages, coverages[1:]))
        # brute-force recount at each epsilon
        norm_w = float(np.linalg.norm(model.weights))
        distances = [float(f.norm @ model.weights + model.bias) / norm_w for f in feats]
        for eps in grid:
            decided = [
                (d, t) for d, t, f in zip(distances, labels, feats)
                if not f.is_zero and abs(d) >= eps
            ]
            assert report.by_epsilon[eps][1] == pytest.approx(len(decided) / len(feats))
            if decided:
                acc = sum(1 for d, t in decided if (1 if d >= 0 else -1) == t) / len(decided)
                assert report.by_epsilon[eps][0] == pytest.approx(acc)

    def test_empty(self):
        vocab = HashtagVocabulary(("a",))
        model = SvmModel(vocab, np.array([1.0]), 0.0)
        with pytest.raises(EmptyTestSet):
            evaluate(model, [], [])


class TestCombinedAccuracy:
    def test_reference_product(self):
        assert combined_accuracy(0.850, 0.873) == pytest.approx(0.74205, abs=1e-9)
        assert f"{combined_accuracy(0.850, 0.873):.1%}" == "74.2%"

    def test_identity_and_annihilator(self):
        assert combined_accuracy(1.0, 0.62) == pytest.approx(0.62)
        assert combined_accuracy(0.0, 0.62) == 0.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            combined_accuracy(1.2, 0.5)
        with pytest.raises(OutOfRange):
            combined_accuracy(0.5, -0.1)


class TestPersistence:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(21)
        vocab = HashtagVocabulary(("alpha", "beta", "gamma"))
        model = SvmModel(vocab, rng.normal(size=3), float(rng.normal()), 0.125)
        path = tmp_path / "m.model"
        save_model(model, path)
        loaded = load_model(path)
        assert np.array_equal(loaded.weights, model.weights)
        assert loaded.bias == model.bias
        assert loaded.epsilon == model.epsilon
        assert loaded.vocabulary.tags == vocab.tags
        assert loaded.label_map == model.label_map

    def test_label_file(self, tmp_path):
        path = tmp_path / "labels.tsv"
        path.write_text("10\t+1\n20\t-1\n# comment\n30\t+1\n")
        assert load_labels(path) == {10: 1, 20: -1, 30: 1}
        bad = tmp_path / "bad.tsv"
        bad.write_text("10\t2\n")
        with pytest.raises(ValueError):
            load_labels(bad)
