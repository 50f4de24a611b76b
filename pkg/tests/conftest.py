from __future__ import annotations

import random

import pytest

from memeflow.ingest import Entities, RetweetRef, Tweet, extract_entities
from memeflow.memes import MemeIndex, MemeKey

BASE_TS = 1293840000  # 2011-01-01T00:00:00Z
ACCOUNT_TS = BASE_TS - 90 * 86400


def make_tweet(
    tweet_id: int,
    user_id: int,
    text: str = "hello",
    created_at: int = BASE_TS,
    screen_name: str | None = None,
    retweet_of: tuple[int, int, str] | None = None,
    account_created_at: int = ACCOUNT_TS,
) -> Tweet:
    return Tweet(
        tweet_id=tweet_id,
        user_id=user_id,
        screen_name=screen_name or f"u{user_id}",
        created_at=created_at,
        text=text,
        account_created_at=account_created_at,
        entities=extract_entities(text),
        retweet_of=RetweetRef(*retweet_of) if retweet_of else None,
    )


def random_meme_tweets(rng: random.Random, max_users: int = 200, max_tweets: int = 2000) -> list[Tweet]:
    """Random single-meme corpus: every tweet carries #topic; retweets point
    at earlier originals by other authors; mentions hit arbitrary users."""
    n_users = rng.randint(2, max_users)
    n_tweets = rng.randint(2, max_tweets)
    tweets: list[Tweet] = []
    originals: list[tuple[int, int, str]] = []
    for i in range(n_tweets):
        uid = rng.randint(1, n_users)
        tweet_id = 1000 + i
        retweet_of = None
        if originals and rng.random() < 0.4:
            oid, ouid, oname = originals[rng.randrange(len(originals))]
            if ouid != uid:
                retweet_of = (oid, ouid, oname)
        if retweet_of is not None:
            text = f"RT @{retweet_of[2]}: #topic w{rng.randint(0, 30)}"
        else:
            parts = ["#topic"]
            for _ in range(rng.randint(0, 2)):
                parts.append(f"@u{rng.randint(1, n_users)}")
            parts.append(f"w{rng.randint(0, 30)}")
            text = " ".join(parts)
            originals.append((tweet_id, uid, f"u{uid}"))
        tweets.append(
            make_tweet(tweet_id, uid, text, created_at=BASE_TS + i, retweet_of=retweet_of)
        )
    return tweets


def indexed(tweets: list[Tweet]) -> MemeIndex:
    index = MemeIndex()
    for tweet in tweets:
        index.add(tweet)
    return index


TOPIC = MemeKey("hashtag", "topic")


@pytest.fixture
def topic_key() -> MemeKey:
    return TOPIC
