#!/usr/bin/env python3
"""Record API fixtures for the dashboard tests.

Builds a seeded corpus plus a trained partisanship model, spins the real
service app, replays exactly the URLs the frontend constructs (same query
order, same percent-encoding), and saves each response under fixtures/
with a manifest.json mapping URL -> file. Run from the repository root
with the Python package installed:

    python3 frontend/scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import math
import sys
import tempfile
import urllib.parse
from pathlib import Path

from fastapi.testclient import TestClient

from memeflow import partisanship
from memeflow.service import AnalyticsState, ServiceConfig, build_state, create_app
from memeflow.synthetic import SyntheticCorpusSpec, gen_corpus

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"

# mirrors src/timeseries.ts
WIDTH_LADDER = [1, 5, 15, 60, 300, 900, 3600, 21600, 86400]
TARGET_BARS = 120

# mirrors encodeURIComponent: everything except unreserved marks is escaped
JS_SAFE = "-_.!~*'()"


def enc(value: str) -> str:
    return urllib.parse.quote(value, safe=JS_SAFE)


def pick_width(span_seconds: int) -> int:
    for width in WIDTH_LADDER:
        if span_seconds / width <= TARGET_BARS:
            return width
    return WIDTH_LADDER[-1]


def iso_seconds(value: str) -> int:
    from memeflow.ingest import parse_timestamp

    return parse_timestamp(value)


class Recorder:
    def __init__(self, client: TestClient):
        self.client = client
        self.manifest: dict[str, str] = {}
        self.counter = 0

    def save(self, url: str, suffix: str = ".json") -> dict | str:
        response = self.client.get(url)
        if response.status_code != 200:
            raise SystemExit(f"fixture request failed: {url} -> {response.status_code}")
        self.counter += 1
        name = f"f{self.counter:03d}{suffix}"
        path = FIXTURES_DIR / name
        if suffix == ".json":
            body = response.json()
            path.write_text(json.dumps(body, indent=1, sort_keys=False) + "\n")
        else:
            body = response.text
            path.write_text(body)
        self.manifest[url] = name
        return body


def users_url(kind: str, pv: str, filters: list[str], sort: str, offset: int,
              limit: int, epsilon: str | None) -> str:
    parts = [f"filter={enc(f)}" for f in filters]
    parts.append(f"sort={enc(sort)}")
    parts.append(f"offset={offset}")
    parts.append(f"limit={limit}")
    if epsilon is not None:
        parts.append(f"epsilon={epsilon}")
    return f"/memes/{enc(kind)}/{enc(pv)}/users?" + "&".join(parts)


def main() -> None:
    FIXTURES_DIR.mkdir(exist_ok=True)
    for stale in FIXTURES_DIR.glob("f*.json"):
        stale.unlink()
    for stale in FIXTURES_DIR.glob("f*.csv"):
        stale.unlink()

    with tempfile.TemporaryDirectory() as tmp:
        corpus = Path(tmp) / "c.jsonl"
        labels_path = Path(tmp) / "labels.tsv"
        rules = Path(tmp) / "themes.txt"
        rules.write_text("blueside: hashtag:prefix:blue\nredside: hashtag:prefix:red\n")
        gen_corpus(
            SyntheticCorpusSpec(n_users=60, n_tweets=900, seed=31337),
            corpus,
            labels_path,
        )
        state = build_state(
            ServiceConfig(corpus=str(corpus), theme_rules=str(rules))
        )
        index = state.index
        labels_map = partisanship.load_labels(labels_path)
        users_tweets = {
            uid: [index.tweets[t] for t in index.user_tweet_ids(uid)]
            for uid in index.all_user_ids()
        }
        vocab, feats = partisanship.build_features(users_tweets)
        state.model = partisanship.train(
            feats, [labels_map[f.user_id] for f in feats], vocab,
            lam=0.01, epochs=40, seed=5,
        )
        rec = Recorder(TestClient(create_app(state)))

        rec.save("/themes")
        memes = rec.save("/memes?q=&sort=tweet_count&limit=50")
        top = memes[0]
        kind, pv = top["kind"], top["path_value"]
        base = f"/memes/{enc(kind)}/{enc(pv)}"

        rec.save(base)

        # network at default epsilon and across the slider grid
        rec.save(f"{base}/network?k=20")
        grid = [f"{i / 10:g}" for i in range(11)]
        for eps in grid:
            rec.save(f"{base}/network?k=20&epsilon={eps}")

        # users table: defaults, sort toggles, filters, slider grid
        sort_default = "user_id:asc"
        rec.save(users_url(kind, pv, [], sort_default, 0, 25, None))
        rec.save(users_url(kind, pv, [], "retweets_received:desc", 0, 25, None))
        rec.save(users_url(kind, pv, [], "retweets_received:asc", 0, 25, None))
        rec.save(users_url(kind, pv, ["screen_name:contains:user_001"], sort_default, 0, 25, None))
        rec.save(users_url(kind, pv, ["total_tweets:gt:1"], sort_default, 0, 25, None))
        for eps in grid:
            rec.save(users_url(kind, pv, [], sort_default, 0, 25, eps))

        # csv exports for the default and the filtered query
        meme_param = enc(f"{kind}:{pv}")
        rec.save(
            f"/export/users.csv?meme={meme_param}&sort={enc(sort_default)}", ".csv"
        )
        rec.save(
            f"/export/users.csv?meme={meme_param}"
            f"&filter={enc('total_tweets:gt:1')}&sort={enc(sort_default)}",
            ".csv",
        )

        # timeseries at the app's derived width, plus the zoom the test makes
        span = iso_seconds(top["last_seen"]) - iso_seconds(top["first_seen"]) + 1
        width = pick_width(span)
        doc = rec.save(f"{base}/timeseries?w={width}")
        t0 = doc["origin"] + 2 * doc["bucket_width"]
        t1 = min(doc["origin"] + 6 * doc["bucket_width"], doc["t1"])
        zoom_w = pick_width(t1 - t0)
        rec.save(f"{base}/timeseries?w={zoom_w}&t0={t0}&t1={t1}")

        # detail panel payloads for every subgraph node and every first-page row
        network = json.loads((FIXTURES_DIR / rec.manifest[f"{base}/network?k=20"]).read_text())
        table = json.loads(
            (FIXTURES_DIR / rec.manifest[users_url(kind, pv, [], sort_default, 0, 25, None)]).read_text()
        )
        detail_ids = sorted(
            {n["user_id"] for n in network["nodes"]}
            | {r["user_id"] for r in table["rows"]}
        )
        for uid in detail_ids:
            if not state.index.user_tweet_ids(uid):
                continue  # mention-only nodes have no recent feed
            rec.save(f"/users/{uid}/recent")
            rec.save(users_url(kind, pv, [f"user_id:eq:{uid}"], sort_default, 0, 1, None))

        (FIXTURES_DIR / "manifest.json").write_text(
            json.dumps(rec.manifest, indent=1) + "\n"
        )
        print(f"wrote {rec.counter} fixtures for meme {kind}:{pv} -> {FIXTURES_DIR}")


if __name__ == "__main__":
    sys.exit(main())
