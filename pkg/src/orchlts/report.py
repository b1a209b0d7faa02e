"""Delimited and graphical reports for an explored transition system."""

from __future__ import annotations

import csv
from typing import IO

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .explorer import LoadedLts, Lts, _json_obj

_FLAG_COLORS = {
    "terminal-success": "#7fbf7f",
    "deadlock": "#e07a7a",
    "timelock": "#b05ab0",
    "frontier-cut": "#cccccc",
}


def _obj(lts) -> dict:
    return lts.obj if isinstance(lts, LoadedLts) else _json_obj(lts)


def write_edges_csv(lts, out: IO[str]) -> None:
    """One row per transition: source, label, target."""
    obj = _obj(lts)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["from", "label", "to"])
    for e in obj["edges"]:
        writer.writerow([e["from"], e["label"], e["to"]])


def render_figure(lts, path: str, max_edge_labels: int = 60) -> None:
    """Draw the state graph to an image file; colors mark classifications."""
    obj = _obj(lts)
    graph = nx.MultiDiGraph()
    colors = []
    for st in obj["states"]:
        graph.add_node(st["id"])
        color = "#9ecae1"
        for flag in st["flags"]:
            color = _FLAG_COLORS.get(flag, color)
        colors.append(color)
    for e in obj["edges"]:
        graph.add_edge(e["from"], e["to"], label=e["label"])
    pos = nx.spring_layout(graph, seed=0)
    n = graph.number_of_nodes()
    size = max(6.0, min(16.0, 2.0 * n ** 0.5))
    fig, ax = plt.subplots(figsize=(size, size))
    nx.draw_networkx_nodes(graph, pos, node_color=colors,
                           node_size=320, ax=ax)
    nx.draw_networkx_labels(graph, pos,
                            labels={i: f"s{i}" for i in graph.nodes},
                            font_size=7, ax=ax)
    nx.draw_networkx_edges(graph, pos, ax=ax, arrowsize=9,
                           connectionstyle="arc3,rad=0.08")
    if graph.number_of_edges() <= max_edge_labels:
        labels = {(u, v): d["label"]
                  for u, v, d in graph.edges(data=True)}
        nx.draw_networkx_edge_labels(graph, pos, edge_labels=labels,
                                     font_size=6, ax=ax)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
