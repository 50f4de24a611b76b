"""Political-alignment inference from hashtag usage.

Users become L2-normalized hashtag count vectors; a linear max-margin
separator is trained by primal stochastic subgradient descent with the
classic 1/(lambda*t) step schedule. Predictions report the signed distance
to the hyperplane and abstain when |distance| falls below the epsilon
threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .ingest import Tweet

LABEL_LEFT = "left"
LABEL_RIGHT = "right"
LABEL_ABSTAIN = "abstain"
LABEL_NA = "n/a"

MODEL_MAGIC = "svm-model v1"


class EmptyCorpus(ValueError):
    """No users to build features from."""


class DegenerateLabels(ValueError):
    """Training set contains only one class."""


class NonFiniteLoss(ArithmeticError):
    """Training produced non-finite weights."""


class VocabularyMismatch(ValueError):
    """Feature vector dimension differs from the model vocabulary."""


class EmptyTestSet(ValueError):
    """evaluate called with no test examples."""


class OutOfRange(ValueError):
    """Accuracy argument outside [0, 1]."""


@dataclass(frozen=True)
class HashtagVocabulary:
    tags: tuple[str, ...]
    index: dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tags)})

    def __len__(self) -> int:
        return len(self.tags)


@dataclass
class UserFeatureVector:
    user_id: int
    counts: dict[int, int]  # vocabulary position -> occurrence count
    norm: np.ndarray  # unit L2 vector; all zeros when the user has no tags

    @property
    def is_zero(self) -> bool:
        return not self.counts


@dataclass
class SvmModel:
    vocabulary: HashtagVocabulary
    weights: np.ndarray
    bias: float
    epsilon: float = 0.0
    label_map: dict[int, str] = field(
        default_factory=lambda: {1: LABEL_LEFT, -1: LABEL_RIGHT}
    )
    train_accuracy: float | None = None  # informational, not serialized


@dataclass
class PartisanshipPrediction:
    user_id: int
    label: str
    distance: float

    @property
    def confidence(self) -> float:
        return abs(self.distance)


@dataclass
class EvaluationReport:
    accuracy: float | None  # None when everything abstained
    coverage: float
    by_epsilon: dict[float, tuple[float | None, float]]


def derive_vocabulary(
    users_tweets: Mapping[int, Sequence[Tweet]], min_frequency: int = 2
) -> HashtagVocabulary:
    """All hashtags with corpus frequency >= min_frequency, ordered by
    descending frequency then lexicographically."""
    freq: dict[str, int] = {}
    for tweets in users_tweets.values():
        for tweet in tweets:
            for tag in tweet.entities.hashtags:
                freq[tag] = freq.get(tag, 0) + 1
    kept = sorted(
        (tag for tag, n in freq.items() if n >= min_frequency),
        key=lambda tag: (-freq[tag], tag),
    )
    return HashtagVocabulary(tuple(kept))


def build_features(
    users_tweets: Mapping[int, Sequence[Tweet]],
    vocab: HashtagVocabulary | None = None,
) -> tuple[HashtagVocabulary, list[UserFeatureVector]]:
    """Per-user hashtag count vectors over ``vocab`` (derived from the
    corpus when not supplied), L2-normalized. Users without any in-vocabulary
    hashtag keep a zero vector and are flagged unclassifiable downstream."""
    if not users_tweets:
        raise EmptyCorpus("no users")
    if vocab is None:
        vocab = derive_vocabulary(users_tweets)
    dim = len(vocab)
    features = []
    for user_id, tweets in users_tweets.items():
        counts: dict[int, int] = {}
        for tweet in tweets:
            for tag in tweet.entities.hashtags:
                pos = vocab.index.get(tag)
                if pos is not None:
                    counts[pos] = counts.get(pos, 0) + 1
        vec = np.zeros(dim)
        for pos, n in counts.items():
            vec[pos] = n
        length = np.linalg.norm(vec)
        if length > 0:
            vec /= length
        features.append(UserFeatureVector(user_id, counts, vec))
    return vocab, features


def train(
    features: Sequence[UserFeatureVector],
    labels: Sequence[int],
    vocab: HashtagVocabulary,
    lam: float = 0.01,
    epochs: int = 100,
    seed: int = 0,
    epsilon: float = 0.0,
    label_names: tuple[str, str] = (LABEL_LEFT, LABEL_RIGHT),
) -> SvmModel:
    """L2-regularized hinge loss minimized by stochastic subgradient steps
    of size 1/(lam*t) over ``epochs`` shuffled passes. Deterministic for a
    fixed seed. The bias term is updated on margin violations only and is
    not regularized."""
    if len(features) != len(labels):
        raise ValueError("features and labels differ in length")
    label_set = set(labels)
    if not label_set <= {-1, 1} or len(label_set) < 2:
        raise DegenerateLabels(f"need both +1 and -1 labels, got {sorted(label_set)}")
    X = np.stack([fv.norm for fv in features])
    y = np.asarray(labels, dtype=float)
    n, dim = X.shape
    if dim != len(vocab):
        raise VocabularyMismatch(f"features have {dim} dims, vocabulary {len(vocab)}")

    rng = np.random.default_rng(seed)
    w = np.zeros(dim)
    b = 0.0
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            margin = y[i] * (X[i] @ w + b)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * y[i] * X[i]
                b += eta * y[i]
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        raise NonFiniteLoss("training diverged to non-finite weights")

    model = SvmModel(
        vocabulary=vocab,
        weights=w,
        bias=b,
        epsilon=epsilon,
        label_map={1: label_names[0], -1: label_names[1]},
    )
    scores = X @ w + b
    model.train_accuracy = float(np.mean(np.sign(scores) == y)) if n else None
    return model


def hinge_objective(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float
) -> float:
    margins = 1.0 - y * (X @ w + b)
    return 0.5 * lam * float(w @ w) + float(np.mean(np.maximum(0.0, margins)))


def hinge_subgradient(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float
) -> tuple[np.ndarray, float]:
    """Subgradient of hinge_objective in (w, b); at kinks the active-side
    convention (margin violations strictly below 1) is used."""
    margins = 1.0 - y * (X @ w + b)
    active = margins > 0.0
    gw = lam * w - (y[active, None] * X[active]).sum(axis=0) / len(y)
    gb = -float(y[active].sum()) / len(y)
    return gw, gb


def predict(model: SvmModel, fv: UserFeatureVector) -> PartisanshipPrediction:
    """Signed hyperplane distance (w.x + b)/||w||; invariant under positive
    rescaling of (w, b). Zero feature vectors always abstain."""
    if fv.norm.shape != model.weights.shape:
        raise VocabularyMismatch(
            f"vector has {fv.norm.shape[0]} dims, model {model.weights.shape[0]}"
        )
    if fv.is_zero:
        return PartisanshipPrediction(fv.user_id, LABEL_ABSTAIN, 0.0)
    norm_w = float(np.linalg.norm(model.weights))
    raw = float(fv.norm @ model.weights + model.bias)
    distance = raw / norm_w if norm_w > 0 else 0.0
    if abs(distance) < model.epsilon:
        label = LABEL_ABSTAIN
    else:
        label = model.label_map[1] if distance >= 0 else model.label_map[-1]
    return PartisanshipPrediction(fv.user_id, label, distance)


def evaluate(
    model: SvmModel,
    features: Sequence[UserFeatureVector],
    labels: Sequence[int],
    epsilon_grid: Sequence[float] = (),
) -> EvaluationReport:
    """Accuracy over non-abstaining predictions plus coverage, at the
    model's epsilon and across the supplied grid."""
    if not features:
        raise EmptyTestSet("no test examples")
    norm_w = float(np.linalg.norm(model.weights))
    distances = []
    for fv in features:
        if fv.norm.shape != model.weights.shape:
            raise VocabularyMismatch("test vector dimension differs from model")
        raw = float(fv.norm @ model.weights + model.bias)
        distance = raw / norm_w if norm_w > 0 else 0.0
        distances.append((distance, fv.is_zero))
    y = np.asarray(labels, dtype=float)

    def at_epsilon(eps: float) -> tuple[float | None, float]:
        decided = correct = 0
        for (d, zero), truth in zip(distances, y):
            if zero or abs(d) < eps:
                continue
            decided += 1
            predicted = 1.0 if d >= 0 else -1.0
            if predicted == truth:
                correct += 1
        coverage = decided / len(distances)
        accuracy = (correct / decided) if decided else None
        return accuracy, coverage

    accuracy, coverage = at_epsilon(model.epsilon)
    return EvaluationReport(
        accuracy=accuracy,
        coverage=coverage,
        by_epsilon={eps: at_epsilon(eps) for eps in epsilon_grid},
    )


def combined_accuracy(svm_accuracy: float, cluster_accuracy: float) -> float:
    """Product of the classifier accuracy and the cluster-label accuracy
    under an independence assumption.

    combined_accuracy(0.850, 0.873) == 0.74205, i.e. 74.2%. A circulated
    figure of 74.5% for that same pair does not match the product; this
    implementation keeps the exact arithmetic.
    """
    for name, value in (("svm_accuracy", svm_accuracy), ("cluster_accuracy", cluster_accuracy)):
        if not 0.0 <= value <= 1.0:
            raise OutOfRange(f"{name} must lie in [0, 1], got {value}")
    return svm_accuracy * cluster_accuracy


# -- persistence -------------------------------------------------------------
# Plain-text, line-oriented; floats carry 17 significant digits so that a
# save/load round trip reproduces the exact same values.


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_model(model: SvmModel, path: str | Path) -> None:
    lines = [
        MODEL_MAGIC,
        f"labels\t+1={model.label_map[1]}\t-1={model.label_map[-1]}",
        f"epsilon\t{_fmt(model.epsilon)}",
        f"bias\t{_fmt(model.bias)}",
        f"vocab\t{len(model.vocabulary)}",
    ]
    for tag, weight in zip(model.vocabulary.tags, model.weights):
        lines.append(f"{tag}\t{_fmt(weight)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> SvmModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MODEL_MAGIC:
        raise ValueError(f"{path}: not a {MODEL_MAGIC} file")
    fields = {}
    for line in lines[1:5]:
        key, _, rest = line.partition("\t")
        fields[key] = rest
    plus, _, minus = fields["labels"].partition("\t")
    label_map = {1: plus.split("=", 1)[1], -1: minus.split("=", 1)[1]}
    n = int(fields["vocab"])
    tags = []
    weights = []
    for line in lines[5 : 5 + n]:
        tag, _, weight = line.rpartition("\t")
        tags.append(tag)
        weights.append(float(weight))
    if len(tags) != n:
        raise ValueError(f"{path}: expected {n} vocabulary rows, found {len(tags)}")
    return SvmModel(
        vocabulary=HashtagVocabulary(tuple(tags)),
        weights=np.asarray(weights),
        bias=float(fields["bias"]),
        epsilon=float(fields["epsilon"]),
        label_map=label_map,
    )


def load_labels(path: str | Path) -> dict[int, int]:
    """Label file: `user_id<TAB>{+1|-1}` per line."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        user, _, label = line.partition("\t")
        if label not in ("+1", "-1", "1"):
            raise ValueError(f"{path}:{lineno}: label must be +1 or -1")
        out[int(user)] = 1 if label in ("+1", "1") else -1
    return out
