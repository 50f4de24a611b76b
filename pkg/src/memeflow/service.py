"""Per-user metric aggregation and the read-only HTTP/JSON API.

Every endpoint is a pure view over the meme index: many readers, one
ingest writer, snapshot-consistent responses (derived caches are dropped
whenever the index version moves). The dashboard and the exporters consume
only this surface.
"""

from __future__ import annotations

import socket as socket_module
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import diffusion, exporter, partisanship, text_analytics
from .ingest import Tweet, parse_timestamp, stream_ingest
from .memes import (
    MemeIndex,
    MemeKey,
    Theme,
    ThemeRule,
    UnknownMeme,
    group_themes,
    parse_theme_rules,
    url_digest,
)
from .partisanship import (
    LABEL_ABSTAIN,
    LABEL_NA,
    PartisanshipPrediction,
    SvmModel,
    UserFeatureVector,
)
from .text_analytics import SentimentLexicon, SentimentScore, sentiment

MAX_PAGE_SIZE = 500
RECENT_TWEETS = 20


class UnknownUser(KeyError):
    """User did not participate in the meme (or corpus)."""


class BadFilterField(ValueError):
    """Filter/sort references a field that is not part of the table."""


class BadOperator(ValueError):
    """Filter operator invalid for the field type."""


class CorpusMissing(FileNotFoundError):
    """Configured corpus path does not exist."""


class PortInUse(OSError):
    """Configured port is already bound."""


def iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class UserMetrics:
    user_id: int
    screen_name: str
    total_tweets: int
    retweets_made: int
    retweets_received: int
    mentions_made: int
    mentions_received: int
    language: str
    sentiment: SentimentScore
    partisanship: PartisanshipPrediction | None  # None = no hashtags / no model
    last_active: int
    account_created_at: int


# Flat field -> type, shared by filters, sorting, and the CSV columns.
TABLE_FIELDS: dict[str, type] = {
    "user_id": int,
    "screen_name": str,
    "total_tweets": int,
    "retweets_made": int,
    "retweets_received": int,
    "mentions_made": int,
    "mentions_received": int,
    "language": str,
    "polarity": float,
    "partisanship_label": str,
    "partisanship_confidence": float,
    "last_active": int,
    "account_created_at": int,
}
TIMESTAMP_FIELDS = ("last_active", "account_created_at")
FILTER_OPS = ("eq", "lt", "gt", "contains")


@dataclass(frozen=True)
class Filter:
    field: str
    op: str
    value: str  # raw; coerced against the field type when applied


@dataclass
class TableQuery:
    meme: MemeKey
    filters: list[Filter] = field(default_factory=list)
    sort: tuple[str, str] = ("user_id", "asc")
    offset: int = 0
    limit: int = 50  # clamped to MAX_PAGE_SIZE


@dataclass
class TableResult:
    rows: list[dict]
    total_matching: int


def parse_filter_param(raw: str) -> Filter:
    """``field:op:value``; the value part may itself contain ':'."""
    parts = raw.split(":", 2)
    if len(parts) != 3:
        raise BadOperator(f"filter {raw!r} is not field:op:value")
    return Filter(parts[0], parts[1], parts[2])


def parse_sort_param(raw: str) -> tuple[str, str]:
    fld, _, direction = raw.partition(":")
    direction = direction or "asc"
    if direction not in ("asc", "desc"):
        raise BadOperator(f"sort direction must be asc or desc, got {direction!r}")
    return fld, direction


class AnalyticsState:
    """Owns the index plus the loaded analysis resources and memoizes
    derived artifacts (networks, user tables, languages, predictions)
    for the current index version."""

    def __init__(
        self,
        index: MemeIndex,
        theme_rules: list[ThemeRule] | None = None,
        lexicon: SentimentLexicon | None = None,
        profiles: list[text_analytics.LanguageProfile] | None = None,
        model: SvmModel | None = None,
        epsilon: float | None = None,
        ui_dir: str | None = None,
    ):
        self.index = index
        self.theme_rules = theme_rules or []
        self.lexicon = lexicon if lexicon is not None else text_analytics.bundled_lexicon()
        self.profiles = profiles if profiles is not None else text_analytics.bundled_profiles()
        self.model = model
        self.epsilon = epsilon if epsilon is not None else (model.epsilon if model else 0.0)
        self.ui_dir = ui_dir
        self._cache_version = -1
        self._network_cache: dict[MemeKey, diffusion.DiffusionNetwork] = {}
        self._rows_cache: dict[MemeKey, list[UserMetrics]] = {}
        self._language_cache: dict[int, str] = {}
        self._prediction_cache: dict[int, PartisanshipPrediction | None] = {}

    def _sync_caches(self) -> None:
        if self._cache_version != self.index.version:
            self._cache_version = self.index.version
            self._network_cache.clear()
            self._rows_cache.clear()
            self._language_cache.clear()
            self._prediction_cache.clear()

    # -- derived views -----------------------------------------------------

    def themes(self) -> list[Theme]:
        return group_themes(self.index, self.theme_rules)

    def network(self, key: MemeKey) -> diffusion.DiffusionNetwork:
        self._sync_caches()
        net = self._network_cache.get(key)
        if net is None:
            net = diffusion.build_network(key, self.index)
            self._network_cache[key] = net
        return net

    def stats(self, key: MemeKey) -> diffusion.NetworkStats:
        return diffusion.network_stats(self.network(key), self.index.tweets_of(key))

    def user_language(self, user_id: int) -> str:
        self._sync_caches()
        code = self._language_cache.get(user_id)
        if code is None:
            recent = self.index.recent_tweets(user_id, RECENT_TWEETS)
            text = " ".join(t.text for t in recent)
            hit = text_analytics.detect_language(text, self.profiles) if text else None
            code = hit.language if hit else "und"
            self._language_cache[user_id] = code
        return code

    def user_prediction(self, user_id: int) -> PartisanshipPrediction | None:
        """Hyperplane prediction at epsilon 0 (labels are re-thresholded per
        request); None when the user has no in-vocabulary hashtags or no
        model is loaded."""
        if self.model is None:
            return None
        self._sync_caches()
        if user_id in self._prediction_cache:
            return self._prediction_cache[user_id]
        vocab = self.model.vocabulary
        counts: dict[int, int] = {}
        for tid in self.index.user_tweet_ids(user_id):
            for tag in self.index.tweets[tid].entities.hashtags:
                pos = vocab.index.get(tag)
                if pos is not None:
                    counts[pos] = counts.get(pos, 0) + 1
        if not counts:
            self._prediction_cache[user_id] = None
            return None
        vec = np.zeros(len(vocab))
        for pos, n in counts.items():
            vec[pos] = n
        vec /= np.linalg.norm(vec)
        fv = UserFeatureVector(user_id, counts, vec)
        probe = SvmModel(
            vocab, self.model.weights, self.model.bias, 0.0, self.model.label_map
        )
        pred = partisanship.predict(probe, fv)
        self._prediction_cache[user_id] = pred
        return pred

    def partisan_label(self, user_id: int, epsilon: float | None = None) -> str:
        pred = self.user_prediction(user_id)
        if pred is None:
            return LABEL_NA
        eps = self.epsilon if epsilon is None else epsilon
        if abs(pred.distance) < eps:
            return LABEL_ABSTAIN
        label_map = self.model.label_map
        return label_map[1] if pred.distance >= 0 else label_map[-1]

    # -- user metrics ------------------------------------------------------

    def meme_user_metrics(self, key: MemeKey) -> list[UserMetrics]:
        self._sync_caches()
        rows = self._rows_cache.get(key)
        if rows is None:
            rows = self._build_user_metrics(key)
            self._rows_cache[key] = rows
        return rows

    def _build_user_metrics(self, key: MemeKey) -> list[UserMetrics]:
        index = self.index
        net = self.network(key)
        tweets = index.tweets_of(key)
        by_user: dict[int, list[Tweet]] = {}
        for tweet in tweets:
            by_user.setdefault(tweet.user_id, []).append(tweet)

        received_rt: dict[int, int] = {}
        received_mention: dict[int, int] = {}
        for (src, dst, cls), weight in net.edges.items():
            if cls == diffusion.RETWEET:
                received_rt[src] = received_rt.get(src, 0) + weight
            else:
                received_mention[dst] = received_mention.get(dst, 0) + weight

        rows = []
        for user_id in sorted(by_user):
            mine = by_user[user_id]
            text = "\n".join(t.text for t in mine)
            rows.append(
                UserMetrics(
                    user_id=user_id,
                    screen_name=index.display_name(user_id),
                    total_tweets=len(mine),
                    retweets_made=sum(1 for t in mine if t.is_retweet),
                    retweets_received=received_rt.get(user_id, 0),
                    mentions_made=sum(len(t.entities.mentions) for t in mine),
                    mentions_received=received_mention.get(user_id, 0),
                    language=self.user_language(user_id),
                    sentiment=sentiment(text, self.lexicon),
                    partisanship=self.user_prediction(user_id),
                    last_active=max(t.created_at for t in mine),
                    account_created_at=index.account_created_at(user_id) or 0,
                )
            )
        return rows

    def user_metrics(self, key: MemeKey, user_id: int) -> UserMetrics:
        for row in self.meme_user_metrics(key):
            if row.user_id == user_id:
                return row
        raise UnknownUser(f"user {user_id} did not participate in {key}")

    def mean_polarity(self, key: MemeKey) -> float:
        """Meme-level sentiment: the mean of member users' polarity."""
        rows = self.meme_user_metrics(key)
        if not rows:
            return 0.0
        return sum(r.sentiment.polarity for r in rows) / len(rows)


def row_as_dict(row: UserMetrics, state: AnalyticsState, epsilon: float | None) -> dict:
    if row.partisanship is None:
        label, confidence, distance = LABEL_NA, None, None
    else:
        eps = state.epsilon if epsilon is None else epsilon
        distance = row.partisanship.distance
        confidence = abs(distance)
        if confidence < eps:
            label = LABEL_ABSTAIN
        else:
            label_map = state.model.label_map
            label = label_map[1] if distance >= 0 else label_map[-1]
    return {
        "user_id": row.user_id,
        "screen_name": row.screen_name,
        "total_tweets": row.total_tweets,
        "retweets_made": row.retweets_made,
        "retweets_received": row.retweets_received,
        "mentions_made": row.mentions_made,
        "mentions_received": row.mentions_received,
        "language": row.language,
        "polarity": row.sentiment.polarity,
        "pos_hits": row.sentiment.pos_hits,
        "neg_hits": row.sentiment.neg_hits,
        "partisanship_label": label,
        "partisanship_distance": distance,
        "partisanship_confidence": confidence,
        "last_active": iso(row.last_active),
        "account_created_at": iso(row.account_created_at),
    }


def _coerce(field_name: str, raw: str):
    if field_name in TIMESTAMP_FIELDS:
        try:
            return int(raw)
        except ValueError:
            return parse_timestamp(raw)
    kind = TABLE_FIELDS[field_name]
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw


def query_table(state: AnalyticsState, q: TableQuery, epsilon: float | None = None) -> TableResult:
    """Conjunctive filters, stable sort over a user_id-ascending base order,
    pagination applied only after total_matching is counted."""
    rows = [row_as_dict(r, state, epsilon) for r in state.meme_user_metrics(q.meme)]
    for flt in q.filters:
        if flt.field not in TABLE_FIELDS:
            raise BadFilterField(f"unknown filter field {flt.field!r}")
        if flt.op not in FILTER_OPS:
            raise BadOperator(f"unknown operator {flt.op!r}")
        kind = TABLE_FIELDS[flt.field]
        if flt.op == "contains":
            if kind is not str:
                raise BadOperator(f"contains only applies to string fields, not {flt.field}")
            needle = flt.value.lower()
            rows = [r for r in rows if needle in str(r[flt.field]).lower()]
            continue
        want = _coerce(flt.field, flt.value)
        if flt.field in TIMESTAMP_FIELDS:
            values = {id(r): parse_timestamp(r[flt.field]) for r in rows}
            if flt.op == "eq":
                rows = [r for r in rows if values[id(r)] == want]
            elif flt.op == "lt":
                rows = [r for r in rows if values[id(r)] < want]
            else:
                rows = [r for r in rows if values[id(r)] > want]
            continue
        if flt.op == "eq":
            rows = [r for r in rows if r[flt.field] == want]
        elif kind is str:
            raise BadOperator(f"{flt.op} does not apply to string field {flt.field}")
        elif flt.op == "lt":
            rows = [r for r in rows if r[flt.field] is not None and r[flt.field] < want]
        else:
            rows = [r for r in rows if r[flt.field] is not None and r[flt.field] > want]

    sort_field, direction = q.sort
    if sort_field not in TABLE_FIELDS:
        raise BadFilterField(f"unknown sort field {sort_field!r}")
    if direction not in ("asc", "desc"):
        raise BadOperator(f"sort direction must be asc or desc, got {direction!r}")
    present = [r for r in rows if r[sort_field] is not None]
    absent = [r for r in rows if r[sort_field] is None]
    present.sort(key=lambda r: r[sort_field], reverse=direction == "desc")
    rows = present + absent

    total = len(rows)
    offset = max(0, q.offset)
    limit = min(max(1, q.limit), MAX_PAGE_SIZE)
    return TableResult(rows=rows[offset : offset + limit], total_matching=total)


def full_table(state: AnalyticsState, q: TableQuery, epsilon: float | None = None) -> list[dict]:
    """Same filters and sort, pagination removed (export surface)."""
    rows: list[dict] = []
    while True:
        page = TableQuery(q.meme, q.filters, q.sort, len(rows), MAX_PAGE_SIZE)
        result = query_table(state, page, epsilon)
        rows.extend(result.rows)
        if len(rows) >= result.total_matching:
            return rows


# -- state construction --------------------------------------------------------


@dataclass
class ServiceConfig:
    corpus: str | None = None
    port: int = 8040
    host: str = "127.0.0.1"
    theme_rules: str | None = None
    lexicon: str | None = None
    profiles_dir: str | None = None
    model: str | None = None
    epsilon: float | None = None
    ui_dir: str | None = None


def build_state(config: ServiceConfig) -> AnalyticsState:
    index = MemeIndex()
    if config.corpus:
        if not Path(config.corpus).exists():
            raise CorpusMissing(config.corpus)
        stream_ingest(config.corpus, index.add)
    rules: list[ThemeRule] = []
    if config.theme_rules:
        rules = parse_theme_rules(Path(config.theme_rules).read_text(encoding="utf-8"))
    lexicon = text_analytics.load_lexicon(config.lexicon) if config.lexicon else None
    profiles = (
        text_analytics.load_profiles_dir(config.profiles_dir)
        if config.profiles_dir
        else None
    )
    model = partisanship.load_model(config.model) if config.model else None
    return AnalyticsState(
        index,
        theme_rules=rules,
        lexicon=lexicon,
        profiles=profiles,
        model=model,
        epsilon=config.epsilon,
        ui_dir=config.ui_dir,
    )


# -- HTTP layer ------------------------------------------------------------------


def meme_summary(state: AnalyticsState, key: MemeKey) -> dict:
    meme = state.index.meme(key)
    path_value = url_digest(key.value) if key.kind == "url" else key.value
    return {
        "kind": key.kind,
        "value": key.value,
        "path_value": path_value,
        "tweet_count": meme.tweet_count,
        "user_count": meme.user_count,
        "first_seen": iso(meme.first_seen),
        "last_seen": iso(meme.last_seen),
    }


def create_app(state: AnalyticsState):
    from fastapi import FastAPI, HTTPException, Query, Response

    app = FastAPI(title="memeflow", version="0.1.0")
    app.state.analytics = state

    def resolve(kind: str, value: str) -> MemeKey:
        try:
            return state.index.resolve_key(kind, value)
        except UnknownMeme as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "tweets": len(state.index.tweets),
            "memes": len(state.index.memes),
        }

    @app.get("/themes")
    def themes() -> list[dict]:
        return [
            {
                "name": theme.name,
                "n_memes": len(theme.members),
                "rules": [f"{r.kind}:{r.mode}:{r.pattern}" for r in theme.rules],
            }
            for theme in state.themes()
        ]

    @app.get("/memes")
    def memes(
        q: str = "",
        theme: str | None = None,
        sort: str = "tweet_count",
        limit: int = 50,
    ) -> list[dict]:
        try:
            results = state.index.search(q, sort=sort, limit=max(1, limit))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if theme is not None:
            member_sets = {t.name: t.members for t in state.themes()}
            members = member_sets.get(theme)
            if members is None:
                raise HTTPException(status_code=404, detail=f"unknown theme {theme!r}")
            results = [m for m in results if m.key in members]
        return [meme_summary(state, m.key) for m in results]

    @app.get("/memes/{kind}/{value}/network")
    def network(
        kind: str,
        value: str,
        k: int = 20,
        epsilon: float | None = None,
        area_min: float = diffusion.AREA_MIN,
        area_scale: float = diffusion.AREA_SCALE,
    ) -> dict:
        key = resolve(kind, value)
        if k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        sub = diffusion.influential_subgraph(state.network(key), k)
        rendered = diffusion.render_attributes(
            sub,
            lambda uid: state.partisan_label(uid, epsilon),
            area_min=area_min,
            area_scale=area_scale,
        )
        return {
            "meme": {"kind": key.kind, "value": key.value},
            "k": k,
            "nodes": rendered.nodes,
            "edges": rendered.edges,
        }

    @app.get("/memes/{kind}/{value}/timeseries")
    def timeseries(
        kind: str, value: str, w: int = 3600, t0: int | None = None, t1: int | None = None
    ) -> dict:
        key = resolve(kind, value)
        meme = state.index.meme(key)
        start = t0 if t0 is not None else meme.first_seen
        end = t1 if t1 is not None else meme.last_seen + 1
        try:
            series = state.index.timeseries(key, w, start, end)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "meme": {"kind": key.kind, "value": key.value},
            "bucket_width": series.bucket_width,
            "origin": series.origin,
            "t0": start,
            "t1": end,
            "counts": series.counts,
        }

    @app.get("/memes/{kind}/{value}/cooccurrence")
    def cooccurrence(kind: str, value: str, with_: str = Query(..., alias="with")) -> dict:
        key = resolve(kind, value)
        other_kind, _, other_value = with_.partition(":")
        other = resolve(other_kind, other_value)
        try:
            count = state.index.cooccurrence(key, other)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "a": {"kind": key.kind, "value": key.value},
            "b": {"kind": other.kind, "value": other.value},
            "count": count,
        }

    @app.get("/memes/{kind}/{value}/users")
    def users(
        kind: str,
        value: str,
        filter: list[str] = Query(default=[]),
        sort: str = "user_id:asc",
        offset: int = 0,
        limit: int = 50,
        epsilon: float | None = None,
    ) -> dict:
        key = resolve(kind, value)
        try:
            query = TableQuery(
                meme=key,
                filters=[parse_filter_param(f) for f in filter],
                sort=parse_sort_param(sort),
                offset=offset,
                limit=limit,
            )
            result = query_table(state, query, epsilon)
        except (BadFilterField, BadOperator) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "meme": {"kind": key.kind, "value": key.value},
            "rows": result.rows,
            "total_matching": result.total_matching,
            "offset": max(0, query.offset),
            "limit": min(max(1, query.limit), MAX_PAGE_SIZE),
        }

    @app.get("/memes/{kind}/{value}")
    def meme_stats(kind: str, value: str) -> dict:
        key = resolve(kind, value)
        stats = state.stats(key)
        most = stats.most_retweeted_user
        return {
            **meme_summary(state, key),
            "stats": {
                "n_users": stats.n_users,
                "n_tweets": stats.n_tweets,
                "mean_degree": stats.mean_degree,
                "lcc_size": stats.lcc_size,
                "most_retweeted_user": (
                    None
                    if most is None
                    else {
                        "user_id": most[0],
                        "screen_name": state.index.display_name(most[0]),
                        "retweet_count": most[1],
                    }
                ),
                "n_injection_points": stats.n_injection_points,
                "retweet_events": stats.retweet_events,
                "mention_events": stats.mention_events,
                "mean_polarity": state.mean_polarity(key),
            },
        }

    @app.get("/users/{user_id}/recent")
    def recent(user_id: int, n: int = RECENT_TWEETS) -> dict:
        tweets = state.index.recent_tweets(user_id, max(1, min(n, 200)))
        if not tweets:
            raise HTTPException(status_code=404, detail=f"unknown user {user_id}")
        return {
            "user_id": user_id,
            "screen_name": state.index.display_name(user_id),
            "tweets": [
                {
                    "tweet_id": t.tweet_id,
                    "created_at": iso(t.created_at),
                    "text": t.text,
                    "is_retweet": t.is_retweet,
                }
                for t in tweets
            ],
        }

    @app.get("/export/users.csv")
    def export_users(
        meme: str,
        filter: list[str] = Query(default=[]),
        sort: str = "user_id:asc",
        epsilon: float | None = None,
    ) -> Response:
        kind, _, value = meme.partition(":")
        key = resolve(kind, value)
        try:
            query = TableQuery(
                meme=key,
                filters=[parse_filter_param(f) for f in filter],
                sort=parse_sort_param(sort),
            )
            text = exporter.export_csv(state, query, epsilon)
        except (BadFilterField, BadOperator) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Response(content=text, media_type="text/csv; charset=utf-8")

    @app.get("/export/network.gexf")
    def export_network(meme: str, k: int | None = None) -> Response:
        kind, _, value = meme.partition(":")
        key = resolve(kind, value)
        document = exporter.export_graph(state, key, k)
        return Response(content=document, media_type="application/xml; charset=utf-8")

    @app.get("/export/hydration.zip")
    def export_hydration(meme: str | None = None, users: str | None = None) -> Response:
        try:
            if meme:
                kind, _, value = meme.partition(":")
                key = resolve(kind, value)
                bundle = exporter.make_hydration_bundle(
                    tweet_ids=list(state.index.meme(key).tweet_ids)
                )
            elif users:
                ids = [int(u) for u in users.split(",") if u]
                bundle = exporter.make_hydration_bundle(user_ids=ids)
            else:
                raise HTTPException(status_code=400, detail="need meme= or users=")
        except exporter.EmptySelection as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Response(
            content=exporter.bundle_zip_bytes(bundle), media_type="application/zip"
        )

    if state.ui_dir and Path(state.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=state.ui_dir, html=True), name="ui")

    return app


def check_port_free(host: str, port: int) -> None:
    probe = socket_module.socket()
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise PortInUse(f"{host}:{port} is already in use") from exc
    finally:
        probe.close()


def serve(config: ServiceConfig):
    """Build the state, verify the port, and return a ready uvicorn server;
    call .run() to block. SIGINT drains in-flight requests."""
    import uvicorn

    state = build_state(config)
    check_port_free(config.host, config.port)
    app = create_app(state)
    server_config = uvicorn.Config(
        app, host=config.host, port=config.port, log_level="info"
    )
    return uvicorn.Server(server_config)
