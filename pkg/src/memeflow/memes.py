"""Meme index: assign tweets to memes, keep per-meme statistics, group
memes into themes, and answer timeseries/co-occurrence/search queries.

A meme is the set of tweets sharing one signifier: a hashtag, a mentioned
screen name, a hyperlink, or the normalized phrase text.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .ingest import Tweet

HASHTAG = "hashtag"
MENTION = "mention"
URL = "url"
PHRASE = "phrase"
MEME_KINDS = (HASHTAG, MENTION, URL, PHRASE)

SORT_KEYS = ("tweet_count", "user_count", "last_seen")

# Memes with a single tweet and no activity for this long (stream time) are
# eligible for eviction once the index exceeds its cap.
EVICTION_AGE = 24 * 3600
DEFAULT_MAX_MEMES = 1_000_000


class DuplicateTweet(ValueError):
    """tweet_id was already indexed."""


class UnknownMeme(KeyError):
    """No meme with the given key."""


class InvalidPattern(ValueError):
    """Theme rule line could not be parsed."""


class MemeKey(NamedTuple):
    kind: str
    value: str


def url_digest(url: str) -> str:
    """Stable path-safe handle for url-kind memes (URLs nest badly in URLs)."""
    return hashlib.sha1(url.encode("utf-8")).hexdigest()[:16]


def assign_memes(tweet: Tweet) -> set[MemeKey]:
    """One key per hashtag, mention, and URL, plus the phrase key when the
    normalized phrase is non-empty."""
    ent = tweet.entities
    keys = {MemeKey(HASHTAG, tag) for tag in ent.hashtags}
    keys.update(MemeKey(MENTION, name) for name in ent.mentions)
    keys.update(MemeKey(URL, url) for url in ent.urls)
    if ent.phrase:
        keys.add(MemeKey(PHRASE, ent.phrase))
    return keys


@dataclass
class Meme:
    key: MemeKey
    tweet_ids: dict[int, None] = field(default_factory=dict)  # insertion-ordered set
    first_seen: int = 0
    last_seen: int = 0
    user_ids: set[int] = field(default_factory=set)

    @property
    def tweet_count(self) -> int:
        return len(self.tweet_ids)

    @property
    def user_count(self) -> int:
        return len(self.user_ids)

    def _add(self, tweet: Tweet) -> None:
        if not self.tweet_ids:
            self.first_seen = self.last_seen = tweet.created_at
        else:
            self.first_seen = min(self.first_seen, tweet.created_at)
            self.last_seen = max(self.last_seen, tweet.created_at)
        self.tweet_ids[tweet.tweet_id] = None
        self.user_ids.add(tweet.user_id)


@dataclass
class ActivitySeries:
    bucket_width: int
    origin: int  # aligned down to a bucket_width multiple of the window start
    counts: list[int]


def _pseudo_user_id(screen_name: str) -> int:
    """Deterministic negative id for users only ever seen as mention targets."""
    digest = hashlib.blake2b(screen_name.encode("utf-8"), digest_size=8).digest()
    return -(int.from_bytes(digest, "big") % (1 << 62)) - 1


class MemeIndex:
    """Single-writer meme/tweet store.

    All mutation happens in add(); reads take the same lock so queries see
    a consistent point-in-time view (no torn counts). Stored Tweet values
    are immutable and safe to share once indexed.
    """

    def __init__(self, max_memes: int = DEFAULT_MAX_MEMES):
        self.memes: dict[MemeKey, Meme] = {}
        self.tweets: dict[int, Tweet] = {}
        self.max_memes = max_memes
        self.version = 0
        self.stream_time = 0
        self._lock = threading.RLock()
        self._user_tweets: dict[int, list[int]] = {}
        # lowercase screen name -> smallest user_id seen with that name;
        # min keeps resolution independent of ingest order.
        self._name_to_id: dict[str, int] = {}
        # user_id -> (created_at, tweet_id, display name); newest wins.
        self._id_to_name: dict[int, tuple[int, int, str]] = {}
        self._account_created: dict[int, int] = {}
        self._url_digests: dict[str, str] = {}

    # -- writer ----------------------------------------------------------

    def add(self, tweet: Tweet) -> list[MemeKey]:
        """Index one tweet; returns the meme keys it was filed under."""
        with self._lock:
            if tweet.tweet_id in self.tweets:
                raise DuplicateTweet(f"tweet {tweet.tweet_id} already indexed")
            self.tweets[tweet.tweet_id] = tweet
            self.stream_time = max(self.stream_time, tweet.created_at)
            self._register_user(
                tweet.user_id, tweet.screen_name, (tweet.created_at, tweet.tweet_id)
            )
            self._account_created[tweet.user_id] = tweet.account_created_at
            if tweet.retweet_of is not None:
                # Original author is known even when their tweet is not in
                # the corpus; rank below any authored record.
                self._register_user(
                    tweet.retweet_of.user_id, tweet.retweet_of.screen_name, (-1, -1)
                )
            self._user_tweets.setdefault(tweet.user_id, []).append(tweet.tweet_id)

            keys = assign_memes(tweet)
            for key in keys:
                meme = self.memes.get(key)
                if meme is None:
                    meme = Meme(key)
                    self.memes[key] = meme
                    if key.kind == URL:
                        self._url_digests[url_digest(key.value)] = key.value
                meme._add(tweet)
            self.version += 1
            if len(self.memes) > self.max_memes:
                self._evict()
            return sorted(keys)

    def _register_user(self, user_id: int, name: str, rank: tuple[int, int]) -> None:
        lowered = name.lower()
        known = self._name_to_id.get(lowered)
        if known is None or user_id < known:
            self._name_to_id[lowered] = user_id
        current = self._id_to_name.get(user_id)
        if current is None or rank > current[:2]:
            self._id_to_name[user_id] = (rank[0], rank[1], name)

    def _evict(self) -> None:
        # Only singleton memes idle for more than EVICTION_AGE of stream
        # time may go; hostile corpora can still outgrow the cap.
        cutoff = self.stream_time - EVICTION_AGE
        doomed = [
            key
            for key, meme in self.memes.items()
            if meme.tweet_count == 1 and meme.last_seen < cutoff
        ]
        for key in doomed:
            del self.memes[key]
            if key.kind == URL:
                self._url_digests.pop(url_digest(key.value), None)

    # -- lookups ---------------------------------------------------------

    def meme(self, key: MemeKey) -> Meme:
        try:
            return self.memes[key]
        except KeyError:
            raise UnknownMeme(f"{key.kind}:{key.value}") from None

    def resolve_key(self, kind: str, value: str) -> MemeKey:
        """Resolve an API path segment to a key; url kinds accept either the
        digest handle or the verbatim URL."""
        if kind not in MEME_KINDS:
            raise UnknownMeme(f"unknown meme kind {kind!r}")
        if kind == URL and value in self._url_digests:
            return MemeKey(URL, self._url_digests[value])
        key = MemeKey(kind, value)
        if key not in self.memes:
            raise UnknownMeme(f"{kind}:{value}")
        return key

    def tweets_of(self, key: MemeKey) -> list[Tweet]:
        meme = self.meme(key)
        return [self.tweets[tid] for tid in meme.tweet_ids]

    def resolve_user(self, screen_name: str) -> int:
        """Map a mentioned screen name to a user id; unknown names get a
        stable negative pseudo-id."""
        lowered = screen_name.lower()
        known = self._name_to_id.get(lowered)
        return known if known is not None else _pseudo_user_id(lowered)

    def display_name(self, user_id: int, default: str | None = None) -> str:
        entry = self._id_to_name.get(user_id)
        if entry:
            return entry[2]
        return default if default is not None else f"user:{user_id}"

    def account_created_at(self, user_id: int) -> int | None:
        return self._account_created.get(user_id)

    def user_tweet_ids(self, user_id: int) -> list[int]:
        return list(self._user_tweets.get(user_id, ()))

    def recent_tweets(self, user_id: int, n: int = 20) -> list[Tweet]:
        ids = self._user_tweets.get(user_id, ())
        tweets = [self.tweets[tid] for tid in ids]
        tweets.sort(key=lambda t: (t.created_at, t.tweet_id), reverse=True)
        return tweets[:n]

    def all_user_ids(self) -> list[int]:
        return sorted(self._user_tweets)

    # -- queries ---------------------------------------------------------

    def timeseries(self, key: MemeKey, bucket_width: int, t0: int, t1: int) -> ActivitySeries:
        """Bucketed activity counts over [t0, t1); buckets align to
        bucket_width multiples at or below t0 and only window tweets count."""
        if bucket_width <= 0:
            raise ValueError("bucket_width must be positive")
        if t0 >= t1:
            raise ValueError("window must satisfy t0 < t1")
        meme = self.meme(key)
        with self._lock:
            origin = t0 - (t0 % bucket_width)
            n_buckets = (t1 - origin + bucket_width - 1) // bucket_width
            counts = [0] * n_buckets
            for tid in meme.tweet_ids:
                ts = self.tweets[tid].created_at
                if t0 <= ts < t1:
                    counts[(ts - origin) // bucket_width] += 1
            return ActivitySeries(bucket_width, origin, counts)

    def cooccurrence(self, a: MemeKey, b: MemeKey) -> int:
        """Number of tweets belonging to both memes."""
        if a == b:
            raise ValueError("co-occurrence requires two distinct memes")
        with self._lock:
            ma, mb = self.meme(a), self.meme(b)
            if len(ma.tweet_ids) > len(mb.tweet_ids):
                ma, mb = mb, ma
            return len(ma.tweet_ids.keys() & mb.tweet_ids.keys())

    def search(self, query: str, sort: str = "tweet_count", limit: int = 50) -> list[Meme]:
        """Case-insensitive substring match on meme values, sorted descending
        on the chosen statistic with ties broken by value ascending."""
        if limit < 1:
            raise ValueError("limit must be >= 1")
        if sort not in SORT_KEYS:
            raise ValueError(f"sort must be one of {SORT_KEYS}")
        needle = query.lower()
        with self._lock:
            matches = [
                meme for meme in self.memes.values() if needle in meme.key.value.lower()
            ]
            matches.sort(key=lambda m: (-getattr(m, sort), m.key.value))
            return matches[:limit]


# -- themes ---------------------------------------------------------------


@dataclass(frozen=True)
class ThemeRule:
    theme: str
    kind: str
    mode: str  # literal | prefix | substr
    pattern: str

    def matches(self, key: MemeKey) -> bool:
        if key.kind != self.kind:
            return False
        if self.mode == "literal":
            return key.value == self.pattern
        if self.mode == "prefix":
            return key.value.startswith(self.pattern)
        return self.pattern in key.value


@dataclass
class Theme:
    name: str
    rules: list[ThemeRule]
    members: set[MemeKey] = field(default_factory=set)


def parse_theme_rules(text: str) -> list[ThemeRule]:
    """Rule file: one `<theme-name>: <kind>:<pattern>` per line, where the
    pattern is a literal or `prefix:<p>` / `substr:<s>`. '#' lines are
    comments."""
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, rest = line.partition(":")
        name = name.strip()
        if not sep or not name:
            raise InvalidPattern(f"line {lineno}: expected '<theme-name>: <kind>:<pattern>'")
        kind, sep, pattern = rest.strip().partition(":")
        kind = kind.strip()
        if not sep or kind not in MEME_KINDS:
            raise InvalidPattern(f"line {lineno}: unknown meme kind {kind!r}")
        mode = "literal"
        for prefix, mode_name in (("prefix:", "prefix"), ("substr:", "substr")):
            if pattern.startswith(prefix):
                mode = mode_name
                pattern = pattern[len(prefix):]
                break
        if not pattern:
            raise InvalidPattern(f"line {lineno}: empty pattern")
        rules.append(ThemeRule(name, kind, mode, pattern))
    return rules


def group_themes(
    index: MemeIndex,
    rules: Iterable[ThemeRule],
    expand_min_cooccurrence: int | None = None,
) -> list[Theme]:
    """Group memes into themes by rule; memes may land in several themes and
    unmatched memes fall into the implicit "uncategorized" theme.

    With ``expand_min_cooccurrence=N``, each theme also absorbs memes that
    co-occur with one of its rule-matched members in at least N tweets
    (off by default).
    """
    themes: dict[str, Theme] = {}
    for rule in rules:
        themes.setdefault(rule.theme, Theme(rule.theme, [])).rules.append(rule)
    keys = list(index.memes)
    for key in keys:
        for theme in themes.values():
            if any(rule.matches(key) for rule in theme.rules):
                theme.members.add(key)
    if expand_min_cooccurrence is not None:
        for theme in themes.values():
            seeds = list(theme.members)
            for key in keys:
                if key in theme.members:
                    continue
                for seed in seeds:
                    if index.cooccurrence(seed, key) >= expand_min_cooccurrence:
                        theme.members.add(key)
                        break
    categorized = set()
    for theme in themes.values():
        categorized |= theme.members
    leftovers = Theme("uncategorized", [], {k for k in keys if k not in categorized})
    return sorted(themes.values(), key=lambda t: t.name) + [leftovers]
