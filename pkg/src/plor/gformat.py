"""Text graph format and DIMACS import.

Native format:
    p planar <n> <m> <mode>          mode is "int" or "float"
    e <tail> <head> <len> <rev|inf>  one line per undirected embedded edge
    c <node> <x> <y>                 coordinates, or
    r <node> <d0> <d1> ...           explicit rotation (dart ids, ccw)
Exactly one of the c/r forms must be present.  Dart ids follow the edge
order: edge i owns darts 2i (tail->head) and 2i+1 (head->tail).

DIMACS import reads a .gr file ("a u v w" arcs, 1-indexed) with coordinates
from a companion .co file ("v id x y"); opposite arcs merge into one
embedded edge.
"""

from __future__ import annotations

import math

from .errors import NotPlanarEmbedding
from .graph import INF, EmbeddedGraph, build_embedding, is_unreachable


def write_graph(g: EmbeddedGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"p planar {g.n} {g.m_edges} {g.mode}\n")
        for e in range(g.m_edges):
            w = g.length[2 * e]
            wr = g.length[2 * e + 1]
            ws = "inf" if is_unreachable(w) else str(int(w) if g.mode == "int" else float(w))
            wrs = "inf" if is_unreachable(wr) else str(int(wr) if g.mode == "int" else float(wr))
            fh.write(f"e {int(g.tail[2 * e])} {int(g.head[2 * e])} {ws} {wrs}\n")
        coords = getattr(g, "coordinates", None)
        if coords is not None:
            for v in range(g.n):
                fh.write(f"c {v} {coords[v][0]!r} {coords[v][1]!r}\n")
        else:
            for v in range(g.n):
                lo, hi = g.node_dart_start[v], g.node_dart_start[v + 1]
                darts = " ".join(str(int(d)) for d in g.node_darts[lo:hi])
                fh.write(f"r {v} {darts}\n")


def _parse_len(tok: str, mode: str):
    if tok == "inf":
        return None
    return int(tok) if mode == "int" else float(tok)


def read_graph(path: str) -> EmbeddedGraph:
    n = m = None
    mode = "int"
    edges = []
    coords = {}
    rots = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0] in ("#", "%"):
                continue
            tag = parts[0]
            if tag == "p":
                if parts[1] != "planar":
                    raise NotPlanarEmbedding(f"unknown problem line {line!r}")
                n, m, mode = int(parts[2]), int(parts[3]), parts[4]
            elif tag == "e":
                u, v = int(parts[1]), int(parts[2])
                edges.append((u, v, _parse_len(parts[3], mode), _parse_len(parts[4], mode)))
            elif tag == "c":
                coords[int(parts[1])] = (float(parts[2]), float(parts[3]))
            elif tag == "r":
                rots[int(parts[1])] = [int(x) for x in parts[2:]]
    if n is None:
        raise NotPlanarEmbedding("missing 'p planar' header")
    if len(edges) != m:
        raise NotPlanarEmbedding(f"header says {m} edges, file has {len(edges)}")
    if coords and rots:
        raise NotPlanarEmbedding("both coordinate and rotation lines present")
    if coords:
        cc = [coords[v] for v in range(n)]
        return build_embedding(edges, coordinates=cc, mode=mode)
    if rots:
        rr = [rots.get(v, []) for v in range(n)]
        return build_embedding(edges, rotations=rr, mode=mode)
    raise NotPlanarEmbedding("need coordinate or rotation lines")


def read_dimacs(gr_path: str, co_path: str) -> EmbeddedGraph:
    """DIMACS shortest-path .gr + .co pair -> EmbeddedGraph (must embed planar)."""
    arcs = {}
    n = None
    with open(gr_path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "p":
                n = int(parts[2])
            elif parts[0] == "a":
                u, v, w = int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3])
                key = (u, v)
                if key in arcs:
                    arcs[key] = min(arcs[key], w)
                else:
                    arcs[key] = w
    if n is None:
        raise NotPlanarEmbedding("missing DIMACS problem line")
    coords = [None] * n
    with open(co_path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if parts and parts[0] == "v":
                coords[int(parts[1]) - 1] = (float(parts[2]), float(parts[3]))
    if any(c is None for c in coords):
        raise NotPlanarEmbedding("coordinates missing for some nodes")
    edges = []
    for (u, v), w in sorted(arcs.items()):
        if u > v:
            continue
        wr = arcs.get((v, u))
        edges.append((u, v, w, wr))
    for (u, v), w in sorted(arcs.items()):
        if u < v or (v, u) in arcs:
            continue
        edges.append((v, u, None, w))
    return build_embedding(edges, coordinates=coords, mode="int")
