"""Independent brute-force reference implementations used to check the
production code paths. These recompute everything from raw events with
plain loops, BFS, and quadratic scans; only the screen-name resolution
convention is shared, since it is an input contract rather than a
quantity under test."""

from __future__ import annotations

from collections import deque

from memeflow.ingest import Tweet

RETWEET = "retweet"
MENTION = "mention"


def oracle_edges(tweets: list[Tweet], resolve) -> tuple[set[int], dict[tuple[int, int, str], int]]:
    nodes: set[int] = set()
    edges: dict[tuple[int, int, str], int] = {}
    for tweet in tweets:
        nodes.add(tweet.user_id)
        if tweet.retweet_of is not None:
            nodes.add(tweet.retweet_of.user_id)
            e = (tweet.retweet_of.user_id, tweet.user_id, RETWEET)
            edges[e] = edges.get(e, 0) + 1
        for name in tweet.entities.mentions:
            target = resolve(name)
            if target == tweet.user_id:
                continue
            nodes.add(target)
            e = (tweet.user_id, target, MENTION)
            edges[e] = edges.get(e, 0) + 1
    return nodes, edges


def bfs_components(nodes: set[int], edges) -> list[set[int]]:
    adjacency: dict[int, set[int]] = {u: set() for u in nodes}
    for (src, dst, _cls) in edges:
        adjacency[src].add(dst)
        adjacency[dst].add(src)
    seen: set[int] = set()
    components = []
    for start in nodes:
        if start in seen:
            continue
        component = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    component.add(v)
                    queue.append(v)
        components.append(component)
    return components


def oracle_stats(tweets: list[Tweet], resolve) -> dict:
    nodes, edges = oracle_edges(tweets, resolve)
    pairs = {(min(s, d), max(s, d)) for (s, d, _c) in edges}
    components = bfs_components(nodes, edges)
    out_rt: dict[int, int] = {}
    for (src, _dst, cls), w in edges.items():
        if cls == RETWEET:
            out_rt[src] = out_rt.get(src, 0) + w
    most = None
    if out_rt:
        best = sorted(out_rt.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        most = (best[0], best[1])
    return {
        "nodes": nodes,
        "edges": edges,
        "n_users": len(nodes),
        "n_tweets": len(tweets),
        "mean_degree": (2.0 * len(pairs) / len(nodes)) if nodes else 0.0,
        "lcc_size": max((len(c) for c in components), default=0),
        "most_retweeted_user": most,
        "n_injection_points": len({t.user_id for t in tweets if t.retweet_of is None}),
        "retweet_events": sum(w for (s, d, c), w in edges.items() if c == RETWEET),
        "mention_events": sum(w for (s, d, c), w in edges.items() if c == MENTION),
    }


def oracle_top_k_nodes(nodes: set[int], edges, k: int) -> set[int]:
    out_rt = {u: 0 for u in nodes}
    for (src, _dst, cls), w in edges.items():
        if cls == RETWEET:
            out_rt[src] = out_rt.get(src, 0) + w
    core = set(sorted(nodes, key=lambda u: (-out_rt.get(u, 0), u))[:k])
    keep = set(core)
    for (src, dst, _cls) in edges:
        if src in core:
            keep.add(dst)
        if dst in core:
            keep.add(src)
    return keep


def quadratic_substring_count(haystack: str, needle: str) -> int:
    """Greedy left-to-right non-overlapping occurrence count, one character
    at a time."""
    count = 0
    i = 0
    n, m = len(haystack), len(needle)
    while i + m <= n:
        if haystack[i : i + m] == needle:
            count += 1
            i += m
        else:
            i += 1
    return count


def bucket_counts(timestamps: list[int], width: int, t0: int, t1: int) -> tuple[int, list[int]]:
    origin = t0 - (t0 % width)
    n = (t1 - origin + width - 1) // width
    counts = [0] * n
    for ts in timestamps:
        if t0 <= ts < t1:
            counts[(ts - origin) // width] += 1
    return origin, counts


def reference_rank_order_distance(text_ranking: list[str], profile_ranking: list[str], penalty: int) -> int:
    """Straightforward positional re-derivation of the rank-order metric."""
    total = 0
    for i, gram in enumerate(text_ranking):
        try:
            j = profile_ranking.index(gram)
            total += abs(i - j)
        except ValueError:
            total += penalty
    return total
