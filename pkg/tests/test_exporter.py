from __future__ import annotations

import csv
import io
import zipfile
from xml.etree import ElementTree as ET

import networkx as nx
import pytest

from memeflow.diffusion import influential_subgraph
from memeflow.exporter import (
    CSV_COLUMNS,
    GEXF_NAMESPACE,
    HYDRATION_CHUNK_SIZE,
    EmptySelection,
    bundle_zip_bytes,
    export_csv,
    export_graph,
    gexf_document,
    make_hydration_bundle,
    rows_to_csv,
)
from memeflow.memes import MemeKey
from memeflow.service import AnalyticsState, TableQuery, full_table

from .conftest import indexed, make_tweet
from .test_service import USA, crafted_state


class TestCsv:
    def test_header_plus_rows(self):
        state = crafted_state()
        text = export_csv(state, TableQuery(USA))
        lines = text.strip().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + 4

    def test_comma_in_screen_name_quoted(self):
        rows = [
            {c: "" for c in CSV_COLUMNS}
            | {"user_id": 1, "screen_name": 'we, "them"', "total_tweets": 2}
        ]
        text = rows_to_csv(rows)
        parsed = list(csv.reader(io.StringIO(text)))
        assert parsed[1][1] == 'we, "them"'
        assert '"we, ""them"""' in text.splitlines()[1]

    def test_round_trip_matches_table_rows(self):
        state = crafted_state()
        q = TableQuery(USA, sort=("retweets_received", "desc"))
        text = export_csv(state, q)
        parsed = list(csv.DictReader(io.StringIO(text)))
        rows = full_table(state, q)
        assert len(parsed) == len(rows)
        for got, want in zip(parsed, rows):
            assert int(got["user_id"]) == want["user_id"]
            assert got["screen_name"] == want["screen_name"]
            assert int(got["total_tweets"]) == want["total_tweets"]
            assert float(got["polarity"]) == pytest.approx(want["polarity"])
            assert got["last_active"] == want["last_active"]
            assert got["partisanship_label"] == want["partisanship_label"]
            assert got["partisanship_confidence"] == ""  # n/a rows leave it blank

    def test_crlf_line_endings(self):
        state = crafted_state()
        assert "\r\n" in export_csv(state, TableQuery(USA))


class TestGexf:
    def test_two_node_document(self):
        index = indexed(
            [
                make_tweet(1, 9, "#usa w", screen_name="src"),
                make_tweet(2, 7, "RT: #usa w", screen_name="dst", retweet_of=(1, 9, "src")),
            ]
        )
        state = AnalyticsState(index)
        doc = export_graph(state, USA)
        root = ET.fromstring(doc)
        assert root.tag == f"{{{GEXF_NAMESPACE}}}gexf"
        assert root.get("version") == "1.2"
        nodes = root.findall(f".//{{{GEXF_NAMESPACE}}}node")
        edges = root.findall(f".//{{{GEXF_NAMESPACE}}}edge")
        assert len(nodes) == 2
        assert len(edges) == 1
        assert edges[0].get("weight") == "1.0"

    def test_readable_by_independent_parser(self, tmp_path):
        state = crafted_state()
        doc = export_graph(state, USA)
        path = tmp_path / "n.gexf"
        path.write_text(doc)
        graph = nx.read_gexf(path)
        net = state.network(USA)
        assert {int(n) for n in graph.nodes} == set(net.nodes)
        parsed_edges = {
            (int(u), int(v), data["class"]): int(data["weight"])
            for u, v, data in graph.edges(data=True)
        }
        assert parsed_edges == net.edges
        for node_id, data in graph.nodes(data=True):
            assert data["screen_name"] == net.nodes[int(node_id)]
            assert data["partisanship"] == "n/a"

    def test_k_delegates_to_influential_subgraph(self, tmp_path):
        state = crafted_state()
        doc = export_graph(state, USA, k=2)
        expected = influential_subgraph(state.network(USA), 2)
        graph = nx.read_gexf(io.StringIO(doc))
        assert {int(n) for n in graph.nodes} == set(expected.nodes)


class TestHydration:
    def test_manifest_and_script_ids(self):
        bundle = make_hydration_bundle(tweet_ids=[3, 1, 2, 2, 1])
        assert bundle.manifest_ids == [1, 2, 3]
        assert "[1, 2, 3]" in bundle.script
        assert f"= {HYDRATION_CHUNK_SIZE}" in bundle.script
        assert bundle.mode == "tweets"

    def test_user_mode(self):
        bundle = make_hydration_bundle(user_ids=[10, 11])
        assert bundle.mode == "users"

    def test_empty_selection(self):
        with pytest.raises(EmptySelection):
            make_hydration_bundle(tweet_ids=[])

    def test_zip_layout(self):
        bundle = make_hydration_bundle(tweet_ids=list(range(5)))
        archive = zipfile.ZipFile(io.BytesIO(bundle_zip_bytes(bundle)))
        assert sorted(archive.namelist()) == ["README.txt", "fetch.js", "manifest.txt"]
        manifest = archive.read("manifest.txt").decode()
        assert manifest.splitlines()[0] == "mode=tweets"

    def test_no_corpus_text_in_bundle(self):
        state = crafted_state()
        meme = state.index.meme(USA)
        bundle = make_hydration_bundle(tweet_ids=list(meme.tweet_ids))
        blob = bundle_zip_bytes(bundle)
        archive = zipfile.ZipFile(io.BytesIO(blob))
        members = [archive.read(name) for name in archive.namelist()]
        for tweet in state.index.tweets_of(USA):
            needle = tweet.text.encode("utf-8")
            assert all(needle not in member for member in members)
            assert needle not in blob

    def test_large_selection_chunked(self):
        bundle = make_hydration_bundle(tweet_ids=list(range(10_000)))
        assert len(bundle.manifest_ids) == 10_000
        assert "CHUNK_SIZE = 100" in bundle.script
        assert "IDS.slice(i, i + CHUNK_SIZE)" in bundle.script
