"""Parse raw tweet records into validated, immutable Tweet values.

Sources are replayable JSONL files or line-delimited TCP sockets. Each line
is one JSON document with the required keys ``id``, ``user_id``,
``screen_name``, ``created_at``, ``text``, ``account_created_at`` and the
optional retweet envelope ``retweeted_status`` ({id, user_id, screen_name}).
Timestamps are ISO-8601 UTC.
"""

from __future__ import annotations

import json
import re
import socket
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable, Iterable, Iterator, NamedTuple

# Records longer than this are truncated (not rejected) so modern corpora
# with long messages still replay.
TEXT_CAP = 4096

# Token alphabet for hashtags/mentions is \w = letters, digits, underscore.
HASHTAG_RE = re.compile(r"#(\w+)")
MENTION_RE = re.compile(r"@(\w+)")
# Maximal run of RFC-3986 URL characters starting with an http(s) scheme.
URL_RE = re.compile(r"https?://[A-Za-z0-9\-._~:/?#\[\]@!$&'()*+,;=%]+")
# One pass removes whole hashtag and mention tokens from the phrase text.
TAG_RE = re.compile(r"[#@]\w+")


class MalformedRecord(ValueError):
    """Record is missing a field, ill-typed, a self-retweet, or otherwise
    violates a Tweet invariant."""


class SourceUnavailable(OSError):
    """Ingest source could not be opened or connected."""


class RetweetRef(NamedTuple):
    tweet_id: int
    user_id: int
    screen_name: str


@dataclass(frozen=True, slots=True)
class Entities:
    hashtags: frozenset[str]
    mentions: frozenset[str]
    urls: frozenset[str]
    phrase: str


@dataclass(frozen=True, slots=True)
class Tweet:
    tweet_id: int
    user_id: int
    screen_name: str
    created_at: int  # epoch seconds, UTC
    text: str
    account_created_at: int  # epoch seconds, UTC
    entities: Entities
    retweet_of: RetweetRef | None = None

    @property
    def is_retweet(self) -> bool:
        return self.retweet_of is not None


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: int = 0
    duplicates: int = 0

    @property
    def total(self) -> int:
        return self.accepted + self.rejected + self.duplicates


# Punctuation = Unicode categories P* and S*. ASCII gets a precomputed
# translate table; everything else goes through a per-character cache.
_ASCII_PUNCT_TABLE = {
    cp: None
    for cp in range(128)
    if unicodedata.category(chr(cp))[0] in ("P", "S")
}
_PUNCT_CACHE: dict[str, str] = {}


def _strip_punctuation(text: str) -> str:
    if text.isascii():
        return text.translate(_ASCII_PUNCT_TABLE)
    out = []
    for ch in text:
        repl = _PUNCT_CACHE.get(ch)
        if repl is None:
            repl = "" if unicodedata.category(ch)[0] in ("P", "S") else ch
            _PUNCT_CACHE[ch] = repl
        out.append(repl)
    return "".join(out)


def extract_entities(text: str) -> Entities:
    """Pull hashtags, mentions, and URLs out of ``text`` and normalize the
    remainder into the phrase key.

    URLs are removed before tag/mention scanning so that fragments like
    ``http://x.y/a#b`` never produce a hashtag. The phrase is what is left
    after URL, hashtag-token, and mention-token removal, then punctuation
    removal, lowercasing, and whitespace collapsing.
    """
    urls = URL_RE.findall(text)
    work = URL_RE.sub(" ", text) if urls else text
    hashtags = {m.lower() for m in HASHTAG_RE.findall(work)}
    mentions = {m.lower() for m in MENTION_RE.findall(work)}
    if hashtags or mentions:
        work = TAG_RE.sub(" ", work)
    phrase = " ".join(_strip_punctuation(work).lower().split())
    return Entities(frozenset(hashtags), frozenset(mentions), frozenset(urls), phrase)


def parse_timestamp(value: str) -> int:
    """ISO-8601 string to epoch seconds. Naive timestamps are taken as UTC."""
    if not isinstance(value, str):
        raise MalformedRecord(f"timestamp must be a string, got {type(value).__name__}")
    try:
        # Python 3.10 fromisoformat does not accept a trailing 'Z'.
        if value.endswith("Z"):
            value = value[:-1] + "+00:00"
        dt = datetime.fromisoformat(value)
    except ValueError as exc:
        raise MalformedRecord(f"bad timestamp {value!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _require_int(record: dict, key: str) -> int:
    value = record.get(key)
    # bool is an int subclass; a boolean id is still a malformed id.
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedRecord(f"missing or non-integer field {key!r}")
    return value


def _require_str(record: dict, key: str) -> str:
    value = record.get(key)
    if not isinstance(value, str):
        raise MalformedRecord(f"missing or non-string field {key!r}")
    return value


def parse_tweet(record: dict) -> Tweet:
    """Validate one raw JSON document and build a Tweet.

    Raises MalformedRecord for missing/ill-typed fields, empty screen
    names, self-retweets, and activity predating account creation.
    """
    if not isinstance(record, dict):
        raise MalformedRecord("record is not an object")
    tweet_id = _require_int(record, "id")
    user_id = _require_int(record, "user_id")
    screen_name = _require_str(record, "screen_name")
    if not screen_name:
        raise MalformedRecord("empty screen_name")
    text = _require_str(record, "text")
    if len(text) > TEXT_CAP:
        text = text[:TEXT_CAP]
    created_at = parse_timestamp(record.get("created_at"))
    account_created_at = parse_timestamp(record.get("account_created_at"))
    if created_at < account_created_at:
        raise MalformedRecord("created_at precedes account_created_at")

    retweet_of = None
    envelope = record.get("retweeted_status")
    if envelope is not None:
        if not isinstance(envelope, dict):
            raise MalformedRecord("retweeted_status is not an object")
        rt_id = _require_int(envelope, "id")
        rt_user = _require_int(envelope, "user_id")
        rt_name = _require_str(envelope, "screen_name")
        if not rt_name:
            raise MalformedRecord("empty retweeted_status.screen_name")
        if rt_user == user_id:
            raise MalformedRecord("self-retweet")
        retweet_of = RetweetRef(rt_id, rt_user, rt_name)

    return Tweet(
        tweet_id=tweet_id,
        user_id=user_id,
        screen_name=screen_name,
        created_at=created_at,
        text=text,
        account_created_at=account_created_at,
        entities=extract_entities(text),
        retweet_of=retweet_of,
    )


def _looks_like_address(source: str) -> bool:
    host, sep, port = source.rpartition(":")
    return bool(sep) and bool(host) and port.isdigit() and "/" not in source


def _iter_lines(source: str) -> Iterator[str]:
    if _looks_like_address(source):
        host, _, port = source.rpartition(":")
        try:
            conn = socket.create_connection((host, int(port)))
        except OSError as exc:
            raise SourceUnavailable(f"cannot connect to {source}: {exc}") from exc
        with conn, conn.makefile("r", encoding="utf-8", errors="replace") as stream:
            yield from stream
        return
    try:
        stream = open(source, "r", encoding="utf-8", errors="replace")
    except OSError as exc:
        raise SourceUnavailable(f"cannot open {source}: {exc}") from exc
    with stream:
        yield from stream


def stream_ingest(
    source: str | Iterable[str],
    sink: Callable[[Tweet], None],
    seen_ids: set[int] | None = None,
) -> IngestReport:
    """Replay every line of ``source`` through ``sink`` in order.

    ``source`` may be a file path, a ``host:port`` address, or any iterable
    of JSON lines. Malformed lines count as rejected and never abort the
    stream; repeated tweet_ids count as duplicates and are delivered once.
    accepted + rejected + duplicates always equals the number of lines read.
    """
    report = IngestReport()
    seen = seen_ids if seen_ids is not None else set()
    lines = _iter_lines(source) if isinstance(source, str) else iter(source)
    for line in lines:
        try:
            record = json.loads(line)
            tweet = parse_tweet(record)
        except (json.JSONDecodeError, MalformedRecord):
            report.rejected += 1
            continue
        if tweet.tweet_id in seen:
            report.duplicates += 1
            continue
        seen.add(tweet.tweet_id)
        sink(tweet)
        report.accepted += 1
    return report
