"""Order diagrams in Graphviz DOT."""

from __future__ import annotations

import numpy as np


def hasse_edges(leq: np.ndarray) -> tuple[list[int], list[tuple[int, int]]]:
    """Cover edges of a quasi-order, after merging mutually related elements.

    Returns the representative of each class (its least index) and the
    edges (lower, upper) between representatives.
    """
    leq = np.asarray(leq, dtype=bool)
    n = leq.shape[0]
    same = leq & leq.T
    rep = same.argmax(axis=1)
    keep = np.flatnonzero(rep == np.arange(n))
    sub = leq[np.ix_(keep, keep)]
    strict = sub & ~sub.T
    s = strict.astype(np.float32)
    through = (s @ s) > 0
    cover = strict & ~through
    edges = [(int(keep[i]), int(keep[j])) for i, j in zip(*np.nonzero(cover))]
    return [int(k) for k in keep], edges


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(leq: np.ndarray, labels, name: str = "order") -> str:
    nodes, edges = hasse_edges(leq)
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=box, fontsize=10];"]
    for k in nodes:
        lines.append(f"  n{k} [label={_quote(labels[k])}];")
    for lo, hi in edges:
        lines.append(f"  n{lo} -> n{hi};")
    lines.append("}")
    return "\n".join(lines) + "\n"
