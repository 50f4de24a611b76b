"""Seeded synthetic corpus generator for desk-scale testing.

Users split into two partisan communities with disjoint hashtag pools plus
a shared pool; each user posts in one language drawn from the configured
mix, retweets only earlier tweets, and the whole corpus is byte-identical
for a fixed seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .text_analytics import bundled_language_sentences

# 2011-01-01T00:00:00Z; corpus time advances a few seconds per tweet.
BASE_TS = 1293840000
TWEET_SPACING = 7
# Partisan users pick from their own pool this often, otherwise shared.
OWN_POOL_P = 0.9
URL_P = 0.05


class InvalidSpec(ValueError):
    """Synthetic corpus parameters out of range."""


@dataclass
class SyntheticCorpusSpec:
    n_users: int = 100
    n_tweets: int = 1000
    n_hashtags: int = 30
    retweet_probability: float = 0.3
    mention_probability: float = 0.2
    partisan_split: float = 0.5  # share of users in the pool-A community
    languages: list[tuple[str, float]] = field(default_factory=lambda: [("en", 1.0)])
    seed: int = 0

    def validate(self) -> None:
        if self.n_users < 1 or self.n_tweets < 1 or self.n_hashtags < 3:
            raise InvalidSpec("need n_users >= 1, n_tweets >= 1, n_hashtags >= 3")
        for name in ("retweet_probability", "mention_probability", "partisan_split"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidSpec(f"{name} must be in [0, 1], got {value}")
        if not self.languages:
            raise InvalidSpec("need at least one language")
        total = sum(w for _, w in self.languages)
        if abs(total - 1.0) > 1e-9:
            raise InvalidSpec(f"language weights must sum to 1, got {total}")


def _iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _hashtag_pools(n_hashtags: int) -> tuple[list[str], list[str], list[str]]:
    per_side = max(1, (2 * n_hashtags) // 5)
    shared = n_hashtags - 2 * per_side
    pool_a = [f"blue{i}" for i in range(per_side)]
    pool_b = [f"red{i}" for i in range(per_side)]
    pool_shared = [f"topic{i}" for i in range(max(1, shared))]
    return pool_a, pool_b, pool_shared


def gen_corpus(
    spec: SyntheticCorpusSpec,
    out_path: str | Path,
    labels_path: str | Path | None = None,
) -> int:
    """Write a JSONL corpus (and optionally a user_id<TAB>{+1|-1} label file
    with the partisan ground truth). Returns the number of records written."""
    spec.validate()
    rng = random.Random(spec.seed)
    pool_a, pool_b, pool_shared = _hashtag_pools(spec.n_hashtags)

    n_side_a = round(spec.n_users * spec.partisan_split)
    users = []
    lang_codes = [code for code, _ in spec.languages]
    lang_weights = [w for _, w in spec.languages]
    sentences = {code: bundled_language_sentences(code) for code in lang_codes}
    for i in range(spec.n_users):
        users.append(
            {
                "user_id": 1001 + i,
                "screen_name": f"user_{i:04d}",
                "side": 1 if i < n_side_a else -1,
                "language": rng.choices(lang_codes, weights=lang_weights, k=1)[0],
                "account_created_at": BASE_TS - rng.randrange(86400, 200 * 86400),
            }
        )

    originals: list[dict] = []  # earlier non-retweet records, retweet candidates
    lines = []
    for t in range(spec.n_tweets):
        author = users[rng.randrange(spec.n_users)]
        created_at = BASE_TS + t * TWEET_SPACING
        tweet_id = 10_000 + t
        record = {
            "id": tweet_id,
            "user_id": author["user_id"],
            "screen_name": author["screen_name"],
            "created_at": _iso(created_at),
            "account_created_at": _iso(author["account_created_at"]),
        }

        candidates = None
        if originals and rng.random() < spec.retweet_probability:
            candidates = [o for o in originals if o["user_id"] != author["user_id"]]
        if candidates:
            source = candidates[rng.randrange(len(candidates))]
            record["text"] = f"RT @{source['screen_name']}: {source['text']}"
            record["retweeted_status"] = {
                "id": source["id"],
                "user_id": source["user_id"],
                "screen_name": source["screen_name"],
            }
        else:
            sentence = rng.choice(sentences[author["language"]])
            parts = [sentence]
            for _ in range(1 + rng.randrange(3)):
                if rng.random() < OWN_POOL_P:
                    pool = pool_a if author["side"] > 0 else pool_b
                else:
                    pool = pool_shared
                parts.append("#" + rng.choice(pool))
            if rng.random() < spec.mention_probability and spec.n_users > 1:
                other = users[rng.randrange(spec.n_users)]
                if other["user_id"] != author["user_id"]:
                    parts.append("@" + other["screen_name"])
            if rng.random() < URL_P:
                parts.append(f"http://example.com/p/{rng.randrange(10_000)}")
            record["text"] = " ".join(parts)
            originals.append(
                {
                    "id": tweet_id,
                    "user_id": author["user_id"],
                    "screen_name": author["screen_name"],
                    "text": record["text"],
                }
            )
        lines.append(json.dumps(record, separators=(",", ":"), ensure_ascii=True))

    Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if labels_path is not None:
        rows = [f"{u['user_id']}\t{'+1' if u['side'] > 0 else '-1'}" for u in users]
        Path(labels_path).write_text("\n".join(rows) + "\n", encoding="utf-8")
    return len(lines)
