"""Lexicon sentiment scoring and rank-order character n-gram language
identification.

The lexicon file format is one `pos<TAB>phrase` or `neg<TAB>phrase` entry
per line (UTF-8, lowercase phrases, '#' comments). Profile files start with
a `code<TAB>n_min-n_max<TAB>R` header followed by one n-gram per line in
rank order.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

NGRAM_MAX = 4
PROFILE_SIZE = 300
MIN_CORPUS_CHARS = 1000
MIN_DETECT_CHARS = 20
# Detection abstains when the best rank-order distance exceeds this fraction
# of the worst possible score (every text n-gram out of profile).
DISTANCE_CUTOFF = 0.9


class CorpusTooSmall(ValueError):
    """Training corpus shorter than MIN_CORPUS_CHARS characters."""


class NoProfilesLoaded(ValueError):
    """detect_language called without any stored profiles."""


class InvalidLexicon(ValueError):
    """Lexicon violates its invariants (overlap, empty phrase, bad line)."""


@dataclass(frozen=True)
class SentimentLexicon:
    positive: frozenset[str]
    negative: frozenset[str]

    def __post_init__(self):
        overlap = self.positive & self.negative
        if overlap:
            raise InvalidLexicon(f"phrases in both polarities: {sorted(overlap)[:5]}")
        if "" in self.positive or "" in self.negative:
            raise InvalidLexicon("empty phrase")

    def swapped(self) -> "SentimentLexicon":
        return SentimentLexicon(self.negative, self.positive)


class SentimentScore(NamedTuple):
    pos_hits: int
    neg_hits: int
    polarity: float


@dataclass(frozen=True)
class LanguageProfile:
    language_code: str
    ranked_ngrams: tuple[str, ...]
    top_r: int = PROFILE_SIZE
    rank: dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "rank", {g: i for i, g in enumerate(self.ranked_ngrams)}
        )


class Detection(NamedTuple):
    language: str
    distance: int


# -- sentiment -------------------------------------------------------------


def sentiment(text: str, lexicon: SentimentLexicon) -> SentimentScore:
    """Count case-insensitive substring hits of every lexicon phrase.

    Occurrences of one phrase never overlap each other (greedy left to
    right); different phrases may overlap freely. Polarity is
    (pos - neg) / (pos + neg), or 0 with no hits at all.
    """
    lowered = text.lower()
    pos_hits = sum(lowered.count(phrase) for phrase in lexicon.positive)
    neg_hits = sum(lowered.count(phrase) for phrase in lexicon.negative)
    total = pos_hits + neg_hits
    polarity = (pos_hits - neg_hits) / total if total else 0.0
    return SentimentScore(pos_hits, neg_hits, polarity)


def load_lexicon(path: str | Path) -> SentimentLexicon:
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


def parse_lexicon(text: str) -> SentimentLexicon:
    positive, negative = set(), set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        polarity, sep, phrase = line.partition("\t")
        if not sep or polarity not in ("pos", "neg") or not phrase:
            raise InvalidLexicon(f"line {lineno}: expected 'pos<TAB>phrase' or 'neg<TAB>phrase'")
        (positive if polarity == "pos" else negative).add(phrase.lower())
    return SentimentLexicon(frozenset(positive), frozenset(negative))


# -- language identification -------------------------------------------------


def normalize_for_ngrams(text: str) -> str:
    """Lowercase and collapse every whitespace run to a single '_'."""
    return "_".join(text.lower().split())


def rank_ngrams(text: str, n_max: int = NGRAM_MAX, top_r: int = PROFILE_SIZE) -> list[str]:
    """Top character n-grams (n = 1..n_max) of the normalized text, ranked
    by descending frequency with lexicographic tie-break."""
    normalized = normalize_for_ngrams(text)
    counts: Counter[str] = Counter()
    for n in range(1, n_max + 1):
        for i in range(len(normalized) - n + 1):
            counts[normalized[i : i + n]] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [gram for gram, _ in ranked[:top_r]]


def train_profile(
    corpus: str | Iterable[str],
    language_code: str,
    top_r: int = PROFILE_SIZE,
) -> LanguageProfile:
    text = corpus if isinstance(corpus, str) else "\n".join(corpus)
    if len(text) < MIN_CORPUS_CHARS:
        raise CorpusTooSmall(
            f"{language_code}: {len(text)} chars, need >= {MIN_CORPUS_CHARS}"
        )
    return LanguageProfile(language_code, tuple(rank_ngrams(text, top_r=top_r)), top_r)


def rank_order_distance(text_ngrams: list[str], profile: LanguageProfile) -> int:
    """Sum of rank displacements; n-grams absent from the profile pay the
    full out-of-profile penalty R."""
    rank = profile.rank
    penalty = profile.top_r
    total = 0
    for i, gram in enumerate(text_ngrams):
        j = rank.get(gram)
        total += penalty if j is None else abs(i - j)
    return total


def detect_language(text: str, profiles: Iterable[LanguageProfile]) -> Detection | None:
    """Closest profile by rank-order distance, or None (undetermined) for
    texts under MIN_DETECT_CHARS or too far from every profile."""
    candidates = list(profiles)
    if not candidates:
        raise NoProfilesLoaded("no language profiles loaded")
    if len(text.strip()) < MIN_DETECT_CHARS:
        return None
    text_ngrams = rank_ngrams(text, top_r=max(p.top_r for p in candidates))
    if not text_ngrams:
        return None
    best: Detection | None = None
    for profile in sorted(candidates, key=lambda p: p.language_code):
        d = rank_order_distance(text_ngrams, profile)
        if best is None or d < best.distance:
            best = Detection(profile.language_code, d)
    cutoff = DISTANCE_CUTOFF * max(p.top_r for p in candidates) * len(text_ngrams)
    if best.distance > cutoff:
        return None
    return best


# -- profile persistence ----------------------------------------------------


def save_profile(profile: LanguageProfile, path: str | Path) -> None:
    lines = [f"{profile.language_code}\t1-{NGRAM_MAX}\t{profile.top_r}"]
    lines.extend(profile.ranked_ngrams)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_profile(path: str | Path) -> LanguageProfile:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty profile file")
    header = lines[0].split("\t")
    if len(header) != 3:
        raise ValueError(f"{path}: bad profile header {lines[0]!r}")
    code, _n_range, top_r = header
    return LanguageProfile(code, tuple(lines[1:]), int(top_r))


def load_profiles_dir(directory: str | Path) -> list[LanguageProfile]:
    return [
        load_profile(p) for p in sorted(Path(directory).glob("*.profile"))
    ]


# -- bundled resources --------------------------------------------------------

DATA_DIR = Path(__file__).parent / "data"


def bundled_lexicon() -> SentimentLexicon:
    return load_lexicon(DATA_DIR / "lexicon_demo.tsv")


def bundled_language_sentences(code: str) -> list[str]:
    path = DATA_DIR / "lang" / f"{code}.txt"
    return [
        line.strip()
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


def bundled_language_codes() -> list[str]:
    return sorted(p.stem for p in (DATA_DIR / "lang").glob("*.txt"))


def bundled_profiles() -> list[LanguageProfile]:
    """Profiles trained on the bundled mini-corpora; the default when no
    profiles directory is configured."""
    return [
        train_profile(bundled_language_sentences(code), code)
        for code in bundled_language_codes()
    ]
