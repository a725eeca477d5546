"""Embedded planar graphs: rotation systems, faces, duals, generators, Dijkstra.

A graph is stored as an array of darts.  Each undirected embedded edge e owns
two darts 2e (tail->head) and 2e+1 (head->tail); the two directions may carry
different lengths, and a missing direction carries the INF sentinel.  The
rotation system lists, for every node, its outgoing darts in counterclockwise
order; faces are the orbits of d -> rot_next(reverse(d)), which traces every
face with its interior on the left.  Euler's formula per connected component
is the embedding validity check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappush, heappop

import numpy as np

from .errors import (
    DisconnectedInput,
    DuplicateEdge,
    NegativeLength,
    NotPlanarEmbedding,
)

INF = 1 << 62  # length / distance sentinel in integer mode


def is_unreachable(value) -> bool:
    return value >= INF or value == math.inf


def safe_add(a, b):
    """Elementwise a+b where either side may hold the INF sentinel."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype.kind == "f" or b.dtype.kind == "f":
        return a + b
    return np.where((a >= INF) | (b >= INF), INF, a + b)


@dataclass(frozen=True)
class DistanceLabel:
    """A length-sum with an explicit reachability flag."""

    value: int | float
    reachable: bool

    @classmethod
    def of(cls, value) -> "DistanceLabel":
        if is_unreachable(value):
            return cls(INF, False)
        v = int(value) if float(value).is_integer() else value
        return cls(v, True)

    def __int__(self) -> int:
        return int(self.value)


class EmbeddedGraph:
    """Immutable directed planar graph with an explicit combinatorial embedding."""

    def __init__(self, n, tail, head, length, node_darts, node_dart_start,
                 mode="int", outer_face=None, orig_nodes=None, orig_edges=None,
                 check=True, allow_disconnected=False):
        self.n = int(n)
        self.tail = np.asarray(tail, dtype=np.int64)
        self.head = np.asarray(head, dtype=np.int64)
        dtype = np.int64 if mode == "int" else np.float64
        self.length = np.asarray(length, dtype=dtype)
        self.mode = mode
        # rotation: node_darts holds all darts grouped by tail node in ccw
        # cyclic order; node_dart_start[v]:node_dart_start[v+1] is v's group
        self.node_darts = np.asarray(node_darts, dtype=np.int64)
        self.node_dart_start = np.asarray(node_dart_start, dtype=np.int64)
        self.orig_nodes = (np.arange(self.n, dtype=np.int64)
                           if orig_nodes is None else np.asarray(orig_nodes, dtype=np.int64))
        self.orig_edges = (np.arange(len(self.tail) // 2, dtype=np.int64)
                           if orig_edges is None else np.asarray(orig_edges, dtype=np.int64))
        self._csr = {}
        self._scipy_csr = {}
        self._build_rotation_tables()
        self._build_faces()
        self.outer_face = self._pick_outer_face() if outer_face is None else int(outer_face)
        if check:
            self._validate(allow_disconnected)

    # -- construction helpers -------------------------------------------------

    @property
    def m_darts(self) -> int:
        return len(self.tail)

    @property
    def m_edges(self) -> int:
        return len(self.tail) // 2

    def rev(self, d):
        return d ^ 1

    def _build_rotation_tables(self):
        nd = self.node_darts
        m = self.m_darts
        if len(nd) != m:
            raise NotPlanarEmbedding("rotation does not list every dart exactly once")
        start = self.node_dart_start
        self.rot_next = np.empty(m, dtype=np.int64)
        self.rot_pos = np.empty(m, dtype=np.int64)
        for v in range(self.n):
            lo, hi = start[v], start[v + 1]
            group = nd[lo:hi]
            if len(group) == 0:
                continue
            if not np.all(self.tail[group] == v):
                raise NotPlanarEmbedding(f"rotation of node {v} lists foreign darts")
            self.rot_next[group] = np.roll(group, -1)
            self.rot_pos[group] = np.arange(len(group))

    def _build_faces(self):
        m = self.m_darts
        nxt = self.rot_next[np.arange(m) ^ 1]  # next dart on the same face
        face_id = np.full(m, -1, dtype=np.int64)
        face_sizes = []
        fid = 0
        for d0 in range(m):
            if face_id[d0] >= 0:
                continue
            d = d0
            size = 0
            while face_id[d] < 0:
                face_id[d] = fid
                size += 1
                d = nxt[d]
            if d != d0:
                raise NotPlanarEmbedding("face traversal does not close")
            face_sizes.append(size)
            fid += 1
        self.face_id = face_id
        self.n_faces = fid
        self.face_sizes = np.asarray(face_sizes, dtype=np.int64)
        self.next_on_face = nxt
        # one representative dart per face
        rep = np.full(fid, -1, dtype=np.int64)
        for d in range(m - 1, -1, -1):
            rep[face_id[d]] = d
        self.face_dart = rep

    def face_walk(self, f: int) -> np.ndarray:
        """Darts of face f in traversal order."""
        d0 = int(self.face_dart[f])
        out = [d0]
        d = int(self.next_on_face[d0])
        while d != d0:
            out.append(d)
            d = int(self.next_on_face[d])
        return np.asarray(out, dtype=np.int64)

    def face_nodes(self, f: int) -> np.ndarray:
        """Tail nodes along the walk of face f (may repeat on non-simple faces)."""
        return self.tail[self.face_walk(f)]

    def _pick_outer_face(self) -> int:
        if self.n_faces == 0:
            return 0
        return int(np.argmax(self.face_sizes))

    def _validate(self, allow_disconnected):
        if self.mode == "int":
            if np.any((self.length < 0) & (self.length < INF)):
                raise NegativeLength("negative length dart")
        else:
            finite = np.isfinite(self.length)
            if np.any(self.length[finite] < 0):
                raise NegativeLength("negative length dart")
        if np.any(self.tail == self.head):
            raise NotPlanarEmbedding("self-loops are rejected")
        comp = self.components()
        ncomp = comp.max() + 1 if self.n else 0
        if ncomp > 1 and not allow_disconnected:
            raise DisconnectedInput(f"{ncomp} connected components; split before building")
        # Euler per component: n_c - m_c + f_c = 2
        if self.n:
            n_c = np.bincount(comp, minlength=ncomp)
            m_c = np.bincount(comp[self.tail[::2]], minlength=ncomp) if self.m_edges else np.zeros(ncomp, dtype=np.int64)
            f_comp = np.full(self.n_faces, -1, dtype=np.int64)
            f_comp[self.face_id] = comp[self.tail]
            f_c = np.bincount(f_comp, minlength=ncomp) if self.n_faces else np.zeros(ncomp, dtype=np.int64)
            bad = np.nonzero(n_c - m_c + f_c != 2)[0]
            # isolated nodes form components with n=1, m=0, f=0
            bad = [c for c in bad if not (n_c[c] == 1 and m_c[c] == 0)]
            if bad:
                raise NotPlanarEmbedding(
                    f"Euler check failed on component(s) {bad}: not a planar embedding")

    def components(self) -> np.ndarray:
        comp = np.full(self.n, -1, dtype=np.int64)
        c = 0
        for s in range(self.n):
            if comp[s] >= 0:
                continue
            stack = [s]
            comp[s] = c
            while stack:
                v = stack.pop()
                lo, hi = self.node_dart_start[v], self.node_dart_start[v + 1]
                for d in self.node_darts[lo:hi]:
                    w = int(self.head[d])
                    if comp[w] < 0:
                        comp[w] = c
                        stack.append(w)
            c += 1
        return comp

    # -- adjacency / shortest paths -------------------------------------------

    def csr(self, reverse=False):
        """(indptr, heads, weights, darts) over finite-length darts."""
        key = bool(reverse)
        if key not in self._csr:
            if self.mode == "int":
                finite = self.length < INF
            else:
                finite = np.isfinite(self.length)
            darts = np.nonzero(finite)[0]
            t = self.head[darts] if reverse else self.tail[darts]
            h = self.tail[darts] if reverse else self.head[darts]
            order = np.argsort(t, kind="stable")
            darts, t, h = darts[order], t[order], h[order]
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, t + 1, 1)
            np.cumsum(indptr, out=indptr)
            self._csr[key] = (indptr, h, self.length[darts], darts)
        return self._csr[key]

    def scipy_csr(self, reverse=False):
        from scipy.sparse import csr_matrix
        key = bool(reverse)
        if key not in self._scipy_csr:
            indptr, heads, weights, _ = self.csr(reverse)
            self._scipy_csr[key] = csr_matrix(
                (weights.astype(np.float64), heads.astype(np.int32), indptr),
                shape=(self.n, self.n))
        return self._scipy_csr[key]

    def multi_source_rows(self, sources, reverse=False) -> np.ndarray:
        """Distance rows from each source, via scipy's Dijkstra (C speed).

        Integer mode returns exact int64 (sums stay far below 2^53).
        """
        from scipy.sparse.csgraph import dijkstra as sp_dijkstra
        sources = np.asarray(sources, dtype=np.int64)
        if len(sources) == 0:
            return np.zeros((0, self.n), dtype=np.int64 if self.mode == "int" else np.float64)
        mat = self.scipy_csr(reverse)
        out = np.empty((len(sources), self.n),
                       dtype=np.int64 if self.mode == "int" else np.float64)
        chunk = max(1, min(len(sources), int(64e6 // max(self.n, 1))))
        for lo in range(0, len(sources), chunk):
            rows = sp_dijkstra(mat, indices=sources[lo:lo + chunk], directed=True)
            if self.mode == "int":
                rows = np.where(np.isinf(rows), INF, rows).astype(np.int64)
            out[lo:lo + chunk] = rows
        return out

    def subgraph_by_edges(self, edge_ids, check=False):
        """Edge-induced subgraph with the inherited rotation (embedding preserved).

        Node/edge ids are re-densified; `orig_nodes`/`orig_edges` compose with
        this graph's own maps so every subgraph speaks global ids.
        """
        edge_ids = np.asarray(sorted(set(int(e) for e in edge_ids)), dtype=np.int64)
        darts = np.empty(2 * len(edge_ids), dtype=np.int64)
        darts[0::2] = 2 * edge_ids
        darts[1::2] = 2 * edge_ids + 1
        keep = np.zeros(self.m_darts, dtype=bool)
        keep[darts] = True
        nodes = np.unique(self.tail[darts])
        node_map = np.full(self.n, -1, dtype=np.int64)
        node_map[nodes] = np.arange(len(nodes))
        dart_new = np.full(self.m_darts, -1, dtype=np.int64)
        dart_new[darts] = np.argsort(np.argsort(darts))  # dense ids, order kept
        new_m = len(darts)
        tail = node_map[self.tail[darts]]
        head = node_map[self.head[darts]]
        length = self.length[darts]
        # rotation: kept darts of each node in the original cyclic order
        order = np.lexsort((self.rot_pos[darts], tail))
        nd = np.arange(new_m, dtype=np.int64)[order]
        start = np.zeros(len(nodes) + 1, dtype=np.int64)
        np.add.at(start, tail + 1, 1)
        np.cumsum(start, out=start)
        sub = EmbeddedGraph(
            len(nodes), tail, head, length, nd, start, mode=self.mode,
            orig_nodes=self.orig_nodes[nodes],
            orig_edges=self.orig_edges[edge_ids],
            check=check, allow_disconnected=True)
        sub._parent_nodes = nodes          # ids in self
        sub._parent_edges = edge_ids
        return sub

    def subgraph_by_nodes(self, node_set, check=False):
        mask = np.zeros(self.n, dtype=bool)
        mask[np.asarray(list(node_set), dtype=np.int64)] = True
        e_tail = self.tail[0::2]
        e_head = self.head[0::2]
        keep = mask[e_tail] & mask[e_head]
        return self.subgraph_by_edges(np.nonzero(keep)[0], check=check)

    def reversed_view(self):
        """Same embedding with per-edge direction lengths swapped."""
        swapped = self.length[np.arange(self.m_darts) ^ 1]
        g = EmbeddedGraph(self.n, self.tail, self.head, swapped,
                          self.node_darts, self.node_dart_start, mode=self.mode,
                          outer_face=self.outer_face,
                          orig_nodes=self.orig_nodes, orig_edges=self.orig_edges,
                          check=False, allow_disconnected=True)
        return g

    def size_words(self) -> int:
        return int(3 * self.m_darts + self.node_darts.size + self.n + 2)

    def __repr__(self):
        return f"EmbeddedGraph(n={self.n}, m={self.m_edges}, f={self.n_faces}, mode={self.mode})"


# -- builders -----------------------------------------------------------------

def build_embedding(edges, layout=None, coordinates=None, rotations=None,
                    mode="int", allow_disconnected=False, check=True):
    """Build a validated EmbeddedGraph.

    edges: iterable of (tail, head, length, rev_length); rev_length None means
    the reverse direction is absent (INF sentinel).  Exactly one of
    `coordinates` (straight-line drawing; rotation derived by angular sort) or
    `rotations` (explicit per-node dart order) must be given.
    """
    edges = list(edges)
    m = len(edges)
    tail = np.empty(2 * m, dtype=np.int64)
    head = np.empty(2 * m, dtype=np.int64)
    if mode == "int":
        length = np.empty(2 * m, dtype=np.int64)
    else:
        length = np.empty(2 * m, dtype=np.float64)
    inf_val = INF if mode == "int" else math.inf
    nmax = -1
    for e, (u, v, w, wr) in enumerate(edges):
        if u == v:
            raise NotPlanarEmbedding("self-loops are rejected")
        for x in (w, wr):
            if x is not None and not is_unreachable(x) and x < 0:
                raise NegativeLength(f"edge ({u},{v}) has negative length {x}")
        tail[2 * e], head[2 * e] = u, v
        tail[2 * e + 1], head[2 * e + 1] = v, u
        length[2 * e] = inf_val if w is None else (w if not is_unreachable(w) else inf_val)
        length[2 * e + 1] = inf_val if wr is None else (wr if not is_unreachable(wr) else inf_val)
        nmax = max(nmax, u, v)
    n = nmax + 1
    if coordinates is not None:
        coordinates = np.asarray(coordinates, dtype=np.float64)
        if len(coordinates) != n:
            raise NotPlanarEmbedding("coordinates must cover all node ids densely")
        nd, start = _rotation_from_coordinates(n, tail, head, coordinates)
        outer = None
    elif rotations is not None:
        nd = np.concatenate([np.asarray(r, dtype=np.int64) for r in rotations]) \
            if any(len(r) for r in rotations) else np.zeros(0, dtype=np.int64)
        start = np.zeros(n + 1, dtype=np.int64)
        start[1:] = np.cumsum([len(r) for r in rotations])
        outer = None
    else:
        raise NotPlanarEmbedding("either coordinates or rotations required")
    g = EmbeddedGraph(n, tail, head, length, nd, start, mode=mode,
                      check=check, allow_disconnected=allow_disconnected)
    if coordinates is not None:
        g.coordinates = coordinates
        g.outer_face = _outer_face_from_coordinates(g, coordinates)
    return g


def _rotation_from_coordinates(n, tail, head, coords):
    m = len(tail)
    dx = coords[head, 0] - coords[tail, 0]
    dy = coords[head, 1] - coords[tail, 1]
    ang = np.arctan2(dy, dx)
    order = np.lexsort((ang, tail))
    t_sorted = tail[order]
    a_sorted = ang[order]
    same = (t_sorted[1:] == t_sorted[:-1]) & (np.abs(a_sorted[1:] - a_sorted[:-1]) < 1e-12)
    if np.any(same):
        i = int(np.nonzero(same)[0][0])
        raise DuplicateEdge(
            f"coincident dart angles at node {int(t_sorted[i])} (parallel edges need explicit rotations)")
    nd = np.arange(m, dtype=np.int64)[order]
    start = np.zeros(n + 1, dtype=np.int64)
    np.add.at(start, tail + 1, 1)
    np.cumsum(start, out=start)
    return nd, start


def _outer_face_from_coordinates(g, coords):
    # faces are traced with their region on the right, so the outer face is
    # the counterclockwise boundary walk: most positive signed area
    area = np.zeros(g.n_faces)
    x0 = coords[g.tail, 0]
    y0 = coords[g.tail, 1]
    x1 = coords[g.head, 0]
    y1 = coords[g.head, 1]
    np.add.at(area, g.face_id, x0 * y1 - x1 * y0)
    return int(np.argmax(area))


# -- generators ---------------------------------------------------------------

def _lengths(rng, count, length_dist):
    if length_dist in (None, "unit"):
        return np.ones(count, dtype=np.int64), np.ones(count, dtype=np.int64)
    parts = str(length_dist).split(":")
    kind = parts[0]
    if kind in ("uniform", "sym"):
        lo, hi = int(parts[1]), int(parts[2])
        a = rng.integers(lo, hi + 1, size=count)
        b = a if kind == "sym" else rng.integers(lo, hi + 1, size=count)
        return a.astype(np.int64), b.astype(np.int64)
    raise ValueError(f"unknown length_dist {length_dist!r}")


def generate(kind, *, w=None, h=None, n=None, length_dist="unit", seed=0, mode="int"):
    """Deterministic graph generators: grid(w,h), cylinder(w,h), random_triangulation(n)."""
    rng = np.random.default_rng(seed)
    if kind == "grid":
        return _gen_grid(rng, int(w), int(h), length_dist, mode)
    if kind == "cylinder":
        return _gen_cylinder(rng, int(w), int(h), length_dist, mode)
    if kind in ("random_triangulation", "tri"):
        return _gen_triangulation(rng, int(n), length_dist, mode)
    raise ValueError(f"unknown generator kind {kind!r}")


def _edges_with_lengths(rng, pairs, length_dist):
    a, b = _lengths(rng, len(pairs), length_dist)
    return [(u, v, int(a[i]), int(b[i])) for i, (u, v) in enumerate(pairs)]


def _gen_grid(rng, w, h, length_dist, mode):
    if w < 1 or h < 1:
        raise ValueError("grid sizes must be >= 1")
    pairs = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            if x + 1 < w:
                pairs.append((v, v + 1))
            if y + 1 < h:
                pairs.append((v, v + w))
    coords = [(x, y) for y in range(h) for x in range(w)]
    return build_embedding(_edges_with_lengths(rng, pairs, length_dist),
                           coordinates=coords, mode=mode)


def _gen_cylinder(rng, w, h, length_dist, mode):
    if w < 3 or h < 1:
        raise ValueError("cylinder needs w >= 3, h >= 1")
    pairs = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            pairs.append((v, y * w + (x + 1) % w))
            if y + 1 < h:
                pairs.append((v, v + w))
    coords = []
    for y in range(h):
        r = 1.0 + y
        for x in range(w):
            t = 2.0 * math.pi * x / w
            coords.append((r * math.cos(t), r * math.sin(t)))
    return build_embedding(_edges_with_lengths(rng, pairs, length_dist),
                           coordinates=coords, mode=mode)


def _gen_triangulation(rng, n, length_dist, mode):
    """Maximal planar graph: Delaunay over n-3 random points inside a big
    anchor triangle, so every face including the outer one is a triangle."""
    from scipy.spatial import Delaunay
    if n < 4:
        raise ValueError("random_triangulation needs n >= 4")
    anchors = np.array([[-3.0, -2.0], [3.0, -2.0], [0.0, 4.0]])
    pts = rng.random((n - 3, 2)) * 2.0 - 1.0
    pts *= 0.9
    coords = np.vstack([anchors, pts])
    tri = Delaunay(coords)
    pairs = set()
    for simplex in tri.simplices:
        a, b, c = (int(x) for x in simplex)
        for u, v in ((a, b), (b, c), (a, c)):
            pairs.add((min(u, v), max(u, v)))
    pairs = sorted(pairs)
    return build_embedding(_edges_with_lengths(rng, pairs, length_dist),
                           coordinates=coords, mode=mode)


# -- shortest paths -----------------------------------------------------------

def sssp_baseline(g: EmbeddedGraph, s: int, reverse=False) -> np.ndarray:
    """Heap Dijkstra from s; the ground-truth oracle for all differential tests.

    Returns exact distances as an array with the INF sentinel (int mode) or
    np.inf (float mode) on unreachable nodes.
    """
    dist, _ = _dijkstra(g, s, reverse)
    return dist


def sssp_baseline_ops(g: EmbeddedGraph, s: int, reverse=False):
    """Like sssp_baseline but also returns (extractions + relaxations)."""
    return _dijkstra(g, s, reverse)


def _dijkstra(g, s, reverse=False):
    if not (0 <= s < g.n):
        raise ValueError(f"node {s} out of range")
    indptr, heads, weights, _ = g.csr(reverse)
    inf_val = INF if g.mode == "int" else math.inf
    dist = [inf_val] * g.n
    dist[s] = 0
    done = bytearray(g.n)
    heap = [(0, s)]
    indptr_l = indptr.tolist()
    heads_l = heads.tolist()
    weights_l = weights.tolist() if g.mode != "int" else [int(x) for x in weights]
    ops = 0
    while heap:
        d, v = heappop(heap)
        if done[v]:
            continue
        done[v] = 1
        ops += 1
        for i in range(indptr_l[v], indptr_l[v + 1]):
            ops += 1
            w = heads_l[i]
            nd = d + weights_l[i]
            if nd < dist[w]:
                dist[w] = nd
                heappush(heap, (nd, w))
    arr = np.asarray(dist, dtype=np.int64 if g.mode == "int" else np.float64)
    return arr, ops


def dijkstra_labels(g: EmbeddedGraph, s: int, reverse=False) -> np.ndarray:
    """Alias used by modules that want in-subgraph SSSP without ceremony."""
    return sssp_baseline(g, s, reverse)


# -- dual ---------------------------------------------------------------------

class DualDepths:
    """BFS depths of faces in the dual, from a root face."""

    def __init__(self, g: EmbeddedGraph, root_face: int | None = None):
        self.graph = g
        self.root = g.outer_face if root_face is None else int(root_face)
        depth = np.full(g.n_faces, -1, dtype=np.int64)
        depth[self.root] = 0
        queue = [self.root]
        qi = 0
        fid = g.face_id
        while qi < len(queue):
            f = queue[qi]
            qi += 1
            d0 = int(g.face_dart[f])
            d = d0
            while True:
                nf = int(fid[d ^ 1])
                if depth[nf] < 0:
                    depth[nf] = depth[f] + 1
                    queue.append(nf)
                d = int(g.next_on_face[d])
                if d == d0:
                    break
        self.depth = depth

    def max_depth(self) -> int:
        return int(self.depth.max()) if len(self.depth) else 0


def dual(g: EmbeddedGraph, root_face: int | None = None) -> DualDepths:
    return DualDepths(g, root_face)
