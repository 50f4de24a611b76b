"""Per-meme diffusion networks over users.

Edges come in two classes: retweet edges point from the original author to
the retweeter (information flow), mention edges from the tweet author to
the mentioned user. Weight counts tweet events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .ingest import Tweet
from .memes import MemeIndex, MemeKey

RETWEET = "retweet"
MENTION = "mention"

AREA_MIN = 16.0
AREA_SCALE = 24.0


@dataclass
class DiffusionNetwork:
    meme: MemeKey
    nodes: dict[int, str] = field(default_factory=dict)  # user_id -> screen name
    edges: dict[tuple[int, int, str], int] = field(default_factory=dict)

    def out_retweet_weight(self, user_id: int) -> int:
        return sum(
            w for (src, _dst, cls), w in self.edges.items()
            if cls == RETWEET and src == user_id
        )


@dataclass
class NetworkStats:
    n_users: int
    n_tweets: int
    mean_degree: float
    lcc_size: int
    most_retweeted_user: tuple[int, int] | None
    n_injection_points: int
    # per-class event totals, alongside the class-union statistics above
    retweet_events: int
    mention_events: int


@dataclass
class RenderedSubgraph:
    meme: MemeKey
    nodes: list[dict]
    edges: list[dict]


class UnionFind:
    """Disjoint sets over arbitrary hashable items (path halving,
    union by size)."""

    def __init__(self, items: Iterable = ()):  # noqa: ANN001 - generic ids
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in self.parent}

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def largest(self) -> int:
        return max(
            (self.size[r] for r in self.parent if self.parent[r] == r), default=0
        )


def build_network(key: MemeKey, index: MemeIndex) -> DiffusionNetwork:
    """Build the meme's multiplex network from its tweets.

    Order-independent: any permutation of the meme's tweets produces an
    identical network. Mentioned screen names resolve through the corpus
    user directory; self-loops are dropped.
    """
    net = DiffusionNetwork(meme=key)
    nodes = net.nodes
    edges = net.edges
    for tweet in index.tweets_of(key):
        author = tweet.user_id
        nodes.setdefault(author, index.display_name(author))
        rt = tweet.retweet_of
        if rt is not None:
            nodes.setdefault(rt.user_id, index.display_name(rt.user_id))
            edge = (rt.user_id, author, RETWEET)
            edges[edge] = edges.get(edge, 0) + 1
        for name in sorted(tweet.entities.mentions):
            target = index.resolve_user(name)
            if target == author:
                continue
            nodes.setdefault(target, index.display_name(target, default=name))
            edge = (author, target, MENTION)
            edges[edge] = edges.get(edge, 0) + 1
    return net


def network_stats(net: DiffusionNetwork, tweets: list[Tweet]) -> NetworkStats:
    """Statistics over the class union: 2E/N mean degree on distinct
    undirected pairs, largest weakly connected component, most retweeted
    user (max outgoing retweet weight, ties to the smallest id), and
    injection points (authors of at least one non-retweet tweet)."""
    n_users = len(net.nodes)
    pairs = set()
    uf = UnionFind(net.nodes)
    out_retweets: dict[int, int] = {}
    retweet_events = 0
    mention_events = 0
    for (src, dst, cls), weight in net.edges.items():
        pairs.add((src, dst) if src < dst else (dst, src))
        uf.union(src, dst)
        if cls == RETWEET:
            out_retweets[src] = out_retweets.get(src, 0) + weight
            retweet_events += weight
        else:
            mention_events += weight
    mean_degree = (2.0 * len(pairs) / n_users) if n_users else 0.0
    most_retweeted = None
    if out_retweets:
        best = min(out_retweets, key=lambda u: (-out_retweets[u], u))
        most_retweeted = (best, out_retweets[best])
    injectors = {t.user_id for t in tweets if t.retweet_of is None}
    return NetworkStats(
        n_users=n_users,
        n_tweets=len(tweets),
        mean_degree=mean_degree,
        lcc_size=uf.largest(),
        most_retweeted_user=most_retweeted,
        n_injection_points=len(injectors),
        retweet_events=retweet_events,
        mention_events=mention_events,
    )


def influential_subgraph(net: DiffusionNetwork, k: int = 20) -> DiffusionNetwork:
    """Subgraph induced by the k most retweeted users plus their one-hop
    neighbors (any class, either direction)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    weights = {u: 0 for u in net.nodes}
    for (src, _dst, cls), w in net.edges.items():
        if cls == RETWEET:
            weights[src] = weights.get(src, 0) + w
    core = set(sorted(net.nodes, key=lambda u: (-weights.get(u, 0), u))[:k])
    keep = set(core)
    for (src, dst, _cls) in net.edges:
        if src in core:
            keep.add(dst)
        if dst in core:
            keep.add(src)
    sub = DiffusionNetwork(meme=net.meme)
    sub.nodes = {u: name for u, name in net.nodes.items() if u in keep}
    sub.edges = {
        edge: w
        for edge, w in net.edges.items()
        if edge[0] in keep and edge[1] in keep
    }
    return sub


def render_attributes(
    net: DiffusionNetwork,
    partisan_lookup: Callable[[int], str],
    area_min: float = AREA_MIN,
    area_scale: float = AREA_SCALE,
) -> RenderedSubgraph:
    """Attach presentation attributes: node area grows logarithmically with
    out-degree (total outgoing event weight), edge width with retweet count.
    Layout itself is a client concern."""
    out_degree: dict[int, int] = {u: 0 for u in net.nodes}
    for (src, _dst, _cls), w in net.edges.items():
        out_degree[src] += w
    nodes = [
        {
            "user_id": user_id,
            "screen_name": net.nodes[user_id],
            "out_degree": out_degree[user_id],
            "node_area": area_min + area_scale * math.log1p(out_degree[user_id]),
            "partisan_color_class": partisan_lookup(user_id),
        }
        for user_id in sorted(net.nodes)
    ]
    edges = []
    for (src, dst, cls) in sorted(net.edges):
        weight = net.edges[(src, dst, cls)]
        retweet_weight = weight if cls == RETWEET else 0
        edges.append(
            {
                "src": src,
                "dst": dst,
                "edge_class": cls,
                "weight": weight,
                "retweet_weight": retweet_weight,
                "line_width": 1.0 + math.log1p(retweet_weight),
            }
        )
    return RenderedSubgraph(meme=net.meme, nodes=nodes, edges=edges)
