"""Operator entry points.

    memeflow gen-corpus --seed 7 --users 100 --tweets 1000 --out c.jsonl
    memeflow ingest --from c.jsonl --corpus normalized.jsonl
    memeflow analyze --corpus c.jsonl --meme hashtag:blue0
    memeflow serve --corpus c.jsonl --port 8040
    memeflow export --corpus c.jsonl --meme hashtag:blue0 --format gexf --out g.gexf

Exit codes: 0 success, 1 usage error, 2 runtime error. Diagnostics go to
stderr; data goes to stdout or --out. Nothing ever prompts.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import exporter, partisanship, service, synthetic
from .ingest import SourceUnavailable, stream_ingest
from .memes import InvalidPattern, MemeIndex, MemeKey, UnknownMeme
from .service import AnalyticsState, ServiceConfig, TableQuery
from .synthetic import InvalidSpec, SyntheticCorpusSpec


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the CLI contract wants 1.
    def error(self, message):  # noqa: A003 - argparse API
        raise UsageError(message)


def _parse_meme(value: str) -> MemeKey:
    kind, sep, rest = value.partition(":")
    if not sep or not rest:
        raise UsageError(f"--meme must be kind:value, got {value!r}")
    return MemeKey(kind, rest)


def _parse_languages(value: str) -> list[tuple[str, float]]:
    out = []
    for part in value.split(","):
        code, sep, weight = part.partition(":")
        if not sep:
            raise UsageError(f"--languages entries must be code:weight, got {part!r}")
        out.append((code.strip(), float(weight)))
    return out


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config line without '=': {line!r}")
        values[key.strip()] = value.strip()
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="memeflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="write a seeded synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--users", type=int, default=100)
    p.add_argument("--tweets", type=int, default=1000)
    p.add_argument("--hashtags", type=int, default=30)
    p.add_argument("--retweet-prob", type=float, default=0.3)
    p.add_argument("--mention-prob", type=float, default=0.2)
    p.add_argument("--partisan-split", type=float, default=0.5)
    p.add_argument("--languages", default="en:1.0", help="code:weight[,code:weight...]")
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out", help="also write user_id<TAB>{+1|-1} ground truth")

    p = sub.add_parser("ingest", help="replay a source and write a normalized corpus")
    p.add_argument("--from", dest="source", required=True, help="JSONL path or host:port")
    p.add_argument("--corpus", required=True, help="output path for accepted records")

    p = sub.add_parser("analyze", help="print stats for one meme")
    p.add_argument("--corpus", required=True)
    p.add_argument("--meme", required=True, help="kind:value")
    p.add_argument("--k", type=int, default=None, help="also include top-k subgraph sizes")
    p.add_argument("--out")

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--corpus")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--theme-rules")
    p.add_argument("--lexicon")
    p.add_argument("--profiles-dir")
    p.add_argument("--model")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--ui-dir")

    p = sub.add_parser("export", help="write csv/gexf/hydration artifacts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--meme", required=True, help="kind:value")
    p.add_argument("--format", required=True, choices=("csv", "gexf", "hydration"))
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--filter", action="append", default=[], help="field:op:value")
    p.add_argument("--sort", default="user_id:asc")
    p.add_argument("--lexicon")
    p.add_argument("--model")
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("train", help="train a partisanship model from a corpus + labels")
    p.add_argument("--corpus", required=True)
    p.add_argument("--labels", required=True, help="user_id<TAB>{+1|-1} file")
    p.add_argument("--out", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.01)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.0)

    return parser


def _load_index(corpus: str) -> MemeIndex:
    if not Path(corpus).exists():
        raise service.CorpusMissing(corpus)
    index = MemeIndex()
    stream_ingest(corpus, index.add)
    return index


def _cmd_gen_corpus(args) -> int:
    spec = SyntheticCorpusSpec(
        n_users=args.users,
        n_tweets=args.tweets,
        n_hashtags=args.hashtags,
        retweet_probability=args.retweet_prob,
        mention_probability=args.mention_prob,
        partisan_split=args.partisan_split,
        languages=_parse_languages(args.languages),
        seed=args.seed,
    )
    written = synthetic.gen_corpus(spec, args.out, args.labels_out)
    print(f"wrote {written} records to {args.out}", file=sys.stderr)
    return 0


def _cmd_ingest(args) -> int:
    accepted: list[str] = []

    def keep(tweet):
        accepted.append(tweet.tweet_id)

    index = MemeIndex()

    def sink(tweet):
        index.add(tweet)
        keep(tweet)

    report = stream_ingest(args.source, sink)
    with open(args.corpus, "w", encoding="utf-8") as out:
        for tid in accepted:
            tweet = index.tweets[tid]
            record = {
                "id": tweet.tweet_id,
                "user_id": tweet.user_id,
                "screen_name": tweet.screen_name,
                "created_at": service.iso(tweet.created_at),
                "account_created_at": service.iso(tweet.account_created_at),
                "text": tweet.text,
            }
            if tweet.retweet_of is not None:
                record["retweeted_status"] = {
                    "id": tweet.retweet_of.tweet_id,
                    "user_id": tweet.retweet_of.user_id,
                    "screen_name": tweet.retweet_of.screen_name,
                }
            out.write(json.dumps(record, separators=(",", ":")) + "\n")
    print(json.dumps(asdict(report)))
    return 0


def _cmd_analyze(args) -> int:
    index = _load_index(args.corpus)
    state = AnalyticsState(index)
    key = index.resolve_key(*_parse_meme(args.meme))
    stats = state.stats(key)
    doc = {
        "meme": service.meme_summary(state, key),
        "stats": {
            "n_users": stats.n_users,
            "n_tweets": stats.n_tweets,
            "mean_degree": stats.mean_degree,
            "lcc_size": stats.lcc_size,
            "most_retweeted_user": stats.most_retweeted_user,
            "n_injection_points": stats.n_injection_points,
            "retweet_events": stats.retweet_events,
            "mention_events": stats.mention_events,
        },
    }
    if args.k is not None:
        from . import diffusion

        sub = diffusion.influential_subgraph(state.network(key), args.k)
        doc["subgraph"] = {"k": args.k, "n_nodes": len(sub.nodes), "n_edges": len(sub.edges)}
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def _cmd_serve(args) -> int:
    values = _read_config_file(args.config) if args.config else {}
    config = ServiceConfig(
        corpus=args.corpus or values.get("corpus"),
        port=args.port if args.port is not None else int(values.get("port", 8040)),
        host=args.host or values.get("host", "127.0.0.1"),
        theme_rules=args.theme_rules or values.get("theme_rules"),
        lexicon=args.lexicon or values.get("lexicon"),
        profiles_dir=args.profiles_dir or values.get("profiles_dir"),
        model=args.model or values.get("model"),
        epsilon=args.epsilon
        if args.epsilon is not None
        else (float(values["epsilon"]) if "epsilon" in values else None),
        ui_dir=args.ui_dir or values.get("ui_dir"),
    )
    server = service.serve(config)
    print(f"serving on http://{config.host}:{config.port}", file=sys.stderr)
    server.run()
    return 0


def _cmd_export(args) -> int:
    index = _load_index(args.corpus)
    lexicon = None
    if args.lexicon:
        from .text_analytics import load_lexicon

        lexicon = load_lexicon(args.lexicon)
    model = partisanship.load_model(args.model) if args.model else None
    state = AnalyticsState(index, lexicon=lexicon, model=model, epsilon=args.epsilon)
    key = index.resolve_key(*_parse_meme(args.meme))
    out = Path(args.out)
    if args.format == "csv":
        query = TableQuery(
            meme=key,
            filters=[service.parse_filter_param(f) for f in args.filter],
            sort=service.parse_sort_param(args.sort),
        )
        out.write_text(exporter.export_csv(state, query), encoding="utf-8")
    elif args.format == "gexf":
        out.write_text(exporter.export_graph(state, key, args.k), encoding="utf-8")
    else:
        bundle = exporter.make_hydration_bundle(
            tweet_ids=list(index.meme(key).tweet_ids)
        )
        out.write_bytes(exporter.bundle_zip_bytes(bundle))
    print(f"wrote {args.format} export to {out}", file=sys.stderr)
    return 0


def _cmd_train(args) -> int:
    index = _load_index(args.corpus)
    labels_by_user = partisanship.load_labels(args.labels)
    users_tweets = {}
    for user_id in index.all_user_ids():
        if user_id in labels_by_user:
            users_tweets[user_id] = [index.tweets[t] for t in index.user_tweet_ids(user_id)]
    if not users_tweets:
        raise partisanship.EmptyCorpus("no labeled users found in corpus")
    vocab, features = partisanship.build_features(users_tweets)
    labels = [labels_by_user[fv.user_id] for fv in features]
    model = partisanship.train(
        features,
        labels,
        vocab,
        lam=args.lam,
        epochs=args.epochs,
        seed=args.seed,
        epsilon=args.epsilon,
    )
    partisanship.save_model(model, args.out)
    print(
        f"trained on {len(features)} users, vocab {len(vocab)}, "
        f"train accuracy {model.train_accuracy:.3f}",
        file=sys.stderr,
    )
    return 0


_COMMANDS = {
    "gen-corpus": _cmd_gen_corpus,
    "ingest": _cmd_ingest,
    "analyze": _cmd_analyze,
    "serve": _cmd_serve,
    "export": _cmd_export,
    "train": _cmd_train,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        SourceUnavailable,
        UnknownMeme,
        InvalidPattern,
        InvalidSpec,
        service.CorpusMissing,
        service.PortInUse,
        service.BadFilterField,
        service.BadOperator,
        partisanship.EmptyCorpus,
        partisanship.DegenerateLabels,
        exporter.EmptySelection,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
