"""Data exports: CSV user tables, Gephi-compatible GEXF networks, and
hydration bundles (identifier manifests plus a browser-runnable fetch
script, so message content always comes from the platform's official API
rather than from this service)."""

from __future__ import annotations

import csv
import io
import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from xml.etree import ElementTree as ET

from . import diffusion
from .memes import MemeKey

GEXF_NAMESPACE = "http://www.gexf.net/1.2draft"
GEXF_VERSION = "1.2"

HYDRATION_CHUNK_SIZE = 100

CSV_COLUMNS = (
    "user_id",
    "screen_name",
    "total_tweets",
    "retweets_made",
    "retweets_received",
    "mentions_made",
    "mentions_received",
    "language",
    "polarity",
    "partisanship_label",
    "partisanship_confidence",
    "last_active",
    "account_created_at",
)

DEFAULT_HYDRATION_FIELDS = list(CSV_COLUMNS)


class EmptySelection(ValueError):
    """Hydration bundle requested for an empty id set."""


@dataclass
class HydrationBundle:
    mode: str  # "tweets" | "users"
    manifest_ids: list[int]
    fields: list[str]
    script: str
    readme: str


# -- CSV ------------------------------------------------------------------


def export_csv(state, q, epsilon: float | None = None) -> str:
    """RFC-4180 CSV of the full (unpaginated) table for the query. '.'
    decimals and ISO-8601 timestamps regardless of locale."""
    from .service import full_table  # local import; service imports this module

    rows = full_table(state, q, epsilon)
    return rows_to_csv(rows)


def rows_to_csv(rows: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        record = []
        for col in CSV_COLUMNS:
            value = row.get(col)
            record.append("" if value is None else value)
        writer.writerow(record)
    return buffer.getvalue()


# -- GEXF -----------------------------------------------------------------


def export_graph(state, key: MemeKey, k: int | None = None) -> str:
    """GEXF document for the meme's network: full when k is None, the
    influential subgraph otherwise."""
    net = state.network(key)
    if k is not None:
        net = diffusion.influential_subgraph(net, k)
    return gexf_document(net, lambda uid: state.partisan_label(uid))


def gexf_document(net: diffusion.DiffusionNetwork, partisan_lookup) -> str:
    """Directed GEXF 1.2 with screen_name/out_degree/partisanship node
    attributes and a class attribute plus weight on every edge."""
    out_degree: dict[int, int] = {u: 0 for u in net.nodes}
    for (src, _dst, _cls), w in net.edges.items():
        out_degree[src] += w

    ET.register_namespace("", GEXF_NAMESPACE)
    root = ET.Element(f"{{{GEXF_NAMESPACE}}}gexf", {"version": GEXF_VERSION})
    meta = ET.SubElement(root, f"{{{GEXF_NAMESPACE}}}meta")
    creator = ET.SubElement(meta, f"{{{GEXF_NAMESPACE}}}creator")
    creator.text = "memeflow"
    description = ET.SubElement(meta, f"{{{GEXF_NAMESPACE}}}description")
    description.text = f"{net.meme.kind}:{net.meme.value}"

    graph = ET.SubElement(
        root, f"{{{GEXF_NAMESPACE}}}graph", {"defaultedgetype": "directed"}
    )
    node_attrs = ET.SubElement(
        graph, f"{{{GEXF_NAMESPACE}}}attributes", {"class": "node"}
    )
    for attr_id, title, attr_type in (
        ("0", "screen_name", "string"),
        ("1", "out_degree", "integer"),
        ("2", "partisanship", "string"),
    ):
        ET.SubElement(
            node_attrs,
            f"{{{GEXF_NAMESPACE}}}attribute",
            {"id": attr_id, "title": title, "type": attr_type},
        )
    edge_attrs = ET.SubElement(
        graph, f"{{{GEXF_NAMESPACE}}}attributes", {"class": "edge"}
    )
    ET.SubElement(
        edge_attrs,
        f"{{{GEXF_NAMESPACE}}}attribute",
        {"id": "10", "title": "class", "type": "string"},
    )

    nodes_el = ET.SubElement(graph, f"{{{GEXF_NAMESPACE}}}nodes")
    for user_id in sorted(net.nodes):
        node_el = ET.SubElement(
            nodes_el,
            f"{{{GEXF_NAMESPACE}}}node",
            {"id": str(user_id), "label": net.nodes[user_id]},
        )
        values = ET.SubElement(node_el, f"{{{GEXF_NAMESPACE}}}attvalues")
        for attr_id, value in (
            ("0", net.nodes[user_id]),
            ("1", str(out_degree[user_id])),
            ("2", partisan_lookup(user_id)),
        ):
            ET.SubElement(
                values,
                f"{{{GEXF_NAMESPACE}}}attvalue",
                {"for": attr_id, "value": value},
            )

    edges_el = ET.SubElement(graph, f"{{{GEXF_NAMESPACE}}}edges")
    for i, (src, dst, cls) in enumerate(sorted(net.edges)):
        edge_el = ET.SubElement(
            edges_el,
            f"{{{GEXF_NAMESPACE}}}edge",
            {
                "id": str(i),
                "source": str(src),
                "target": str(dst),
                "weight": str(float(net.edges[(src, dst, cls)])),
            },
        )
        values = ET.SubElement(edge_el, f"{{{GEXF_NAMESPACE}}}attvalues")
        ET.SubElement(
            values, f"{{{GEXF_NAMESPACE}}}attvalue", {"for": "10", "value": cls}
        )

    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


# -- hydration bundles -----------------------------------------------------


def make_hydration_bundle(
    tweet_ids: list[int] | None = None,
    user_ids: list[int] | None = None,
    fields: list[str] | None = None,
) -> HydrationBundle:
    """Identifier-only bundle: a manifest, a fetch script templated with the
    (deduplicated, sorted) ids in pages of HYDRATION_CHUNK_SIZE, and a
    README. No message content is ever included."""
    if tweet_ids:
        mode, ids = "tweets", tweet_ids
    elif user_ids:
        mode, ids = "users", user_ids
    else:
        raise EmptySelection("selection resolved to no ids")
    unique = sorted(set(ids))
    requested = fields if fields is not None else list(DEFAULT_HYDRATION_FIELDS)
    template = (Path(__file__).parent / "data" / "hydrate_template.js").read_text(
        encoding="utf-8"
    )
    script = (
        template.replace("__MODE__", mode)
        .replace("__IDS_JSON__", json.dumps(unique))
        .replace("__FIELDS_JSON__", json.dumps(requested))
        .replace("__CHUNK_SIZE__", str(HYDRATION_CHUNK_SIZE))
    )
    readme = "\n".join(
        [
            "Hydration bundle",
            "================",
            "",
            f"manifest.txt lists {len(unique)} {mode} identifiers. No message",
            "content is included; fetch.js downloads the items from the",
            "platform's official API in your own browser or node session:",
            "",
            "  1. obtain an API bearer token under your own account,",
            "  2. open fetch.js in a browser console (or `node fetch.js`),",
            f"  3. call run(\"<token>\") and wait; requests go out in pages of {HYDRATION_CHUNK_SIZE}.",
            "",
            "The result is saved as a JSON file next to the script.",
            "",
        ]
    )
    return HydrationBundle(
        mode=mode, manifest_ids=unique, fields=requested, script=script, readme=readme
    )


def bundle_zip_bytes(bundle: HydrationBundle) -> bytes:
    manifest_lines = [f"mode={bundle.mode}", "fields=" + ",".join(bundle.fields)]
    manifest_lines.extend(str(i) for i in bundle.manifest_ids)
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        archive.writestr("manifest.txt", "\n".join(manifest_lines) + "\n")
        archive.writestr("fetch.js", bundle.script)
        archive.writestr("README.txt", bundle.readme)
    return buffer.getvalue()
