"""Dense distance graphs over piece boundaries, blocked by hole pair.

Internal DDGs hold exact boundary-to-boundary distances within a piece (one
MSSP run per hole).  External DDGs hold distances in the graph with the
piece's interior deleted, computed top-down over the division's binary split
tree: the external DDG of a child is obtained by FR-Dijkstra runs over its
siblings' internal DDGs, its parent's external DDG, and the child's own
boundary-to-boundary edges (which node deletion keeps alive).

Matrix indices are hole-walk occurrences, so non-simple hole walks simply
repeat a node; FR-Dijkstra deduplicates by global id.  Same-hole blocks of
internal DDGs are split into two triangular staircase halves, which are
Monge by planarity (non-crossing shortest paths to a common face).  Every
other block is certified Monge by an exact quadrangle check or else routed
to the engine's dense-exact path: distances between nodes of two distinct
faces can wind around a hole and genuinely violate the Monge condition.
"""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULTS
from .division import Division, Piece, RecursiveDivision, make_piece
from .frd import INF_CUT, FrdBlock, FrdEngine, verify_monge
from .graph import INF, EmbeddedGraph
from .mssp import mssp_build


class DenseDistanceGraph:
    def __init__(self, owner, groups, full, internal, mode="int"):
        self.owner = owner
        self.groups = [np.asarray(g, dtype=np.int64) for g in groups]
        self.full = full
        self.internal = internal
        self.mode = mode
        self.starts = np.concatenate([[0], np.cumsum([len(g) for g in self.groups])]) \
            if self.groups else np.zeros(1, dtype=np.int64)
        self.occ = np.concatenate(self.groups) if self.groups else np.zeros(0, dtype=np.int64)
        self._blocks = None
        self._blocks_t = None

    @property
    def n_occ(self) -> int:
        return len(self.occ)

    def entry(self, a: int, b: int):
        """Distance between global nodes a and b (min over occurrences)."""
        ia = np.nonzero(self.occ == a)[0]
        ib = np.nonzero(self.occ == b)[0]
        if len(ia) == 0 or len(ib) == 0:
            return INF if self.mode == "int" else math.inf
        return self.full[np.ix_(ia, ib)].min()

    def blocks(self, transposed=False):
        """FR-Dijkstra consumable blocks; `transposed` serves the reversed
        graph (the reversed DDG is exactly the transpose)."""
        if not transposed and self._blocks is not None:
            return self._blocks
        if transposed and self._blocks_t is not None:
            return self._blocks_t
        full = self.full.T if transposed else self.full
        out = []
        inf = INF if self.mode == "int" else math.inf
        ng = len(self.groups)
        for i in range(ng):
            si, ei = int(self.starts[i]), int(self.starts[i + 1])
            for j in range(ng):
                sj, ej = int(self.starts[j]), int(self.starts[j + 1])
                if ei == si or ej == sj:
                    continue
                sub = full[si:ei, sj:ej]
                if i == j and self.internal:
                    # staircase halves in cyclic walk order: inverse-Monge by
                    # the non-crossing argument.  The lower half is the upper
                    # half of the orientation-reversed walk, so it is fed to
                    # the engine flipped.
                    upper = sub.copy()
                    upper[np.tril_indices_from(upper, k=-1)] = inf
                    lower = np.ascontiguousarray(sub[::-1, ::-1].copy())
                    lower[np.tril_indices_from(lower, k=-1)] = inf
                    rev_ids = self.groups[i][::-1]
                    out.append(FrdBlock(upper, self.groups[i], self.groups[j],
                                        "stair", f"p{self.owner}h{i}u"))
                    out.append(FrdBlock(lower, rev_ids, rev_ids,
                                        "stair", f"p{self.owner}h{i}l"))
                else:
                    kind = classify_block(sub)
                    out.append(FrdBlock(np.ascontiguousarray(sub),
                                        self.groups[i], self.groups[j],
                                        kind, f"p{self.owner}h{i}x{j}"))
        if transposed:
            self._blocks_t = out
        else:
            self._blocks = out
        return out

    def size_words(self) -> int:
        w = self.full.size + self.occ.size
        for b in (self._blocks or []):
            w += b.size_words()
        for b in (self._blocks_t or []):
            w += b.size_words()
        return int(w)


def _empty_ddg(owner, mode):
    return DenseDistanceGraph(owner, [], np.zeros((0, 0),
                              dtype=np.int64 if mode == "int" else np.float64),
                              True, mode)


def ddg_internal(piece: Piece, backend=None, constants=DEFAULTS) -> DenseDistanceGraph:
    """Exact boundary-to-boundary distances within the piece, one MSSP per hole."""
    g = piece.graph
    groups_local = [h.walk_local[h.boundary_pos] for h in piece.holes]
    groups_global = [h.boundary_occurrences() for h in piece.holes]
    n_occ = int(sum(len(x) for x in groups_local))
    if n_occ == 0:
        return _empty_ddg(piece.pid, g.mode)
    occ_local = np.concatenate(groups_local)
    distinct = {}
    for hi, h in enumerate(piece.holes):
        for v in groups_local[hi].tolist():
            distinct.setdefault(int(v), hi)
    rows = {}
    handle_cache = {}
    for v, hi in distinct.items():
        if hi not in handle_cache:
            handle_cache[hi] = mssp_build(g, piece.holes[hi].face,
                                          backend=backend, constants=constants)
        rows[v] = handle_cache[hi].row(v)
    full = np.empty((n_occ, n_occ), dtype=np.int64 if g.mode == "int" else np.float64)
    for i, v in enumerate(occ_local.tolist()):
        full[i, :] = rows[int(v)][occ_local]
    return DenseDistanceGraph(piece.pid, groups_global, full, True, g.mode)


def monge_verify(ddg: DenseDistanceGraph, exhaustive=None) -> dict:
    """Quadrangle-inequality report for the same-hole staircase halves.

    Violations on internal DDGs indicate an MSSP or embedding bug; cross-hole
    blocks are intentionally not asserted (they may wind around holes).
    """
    violations = []
    checked = 0
    for gi in range(len(ddg.groups)):
        s, e = int(ddg.starts[gi]), int(ddg.starts[gi + 1])
        k = e - s
        if k < 2:
            continue
        sub = ddg.full[s:e, s:e]
        do_exhaustive = exhaustive if exhaustive is not None else k <= 40
        if do_exhaustive:
            f = np.where(sub >= INF_CUT, np.inf, sub.astype(np.float64)) \
                if sub.dtype.kind != "f" else sub
            for i in range(k):
                for ip in range(i + 1, k):
                    for j in range(ip, k):
                        for jp in range(j + 1, k):
                            checked += 1
                            lhs = f[i, j] + f[ip, jp]
                            rhs = f[i, jp] + f[ip, j]
                            if lhs > rhs and not (math.isinf(lhs) and math.isinf(rhs)):
                                violations.append((gi, "upper", i, ip, j, jp))
                            # lower half: reverse linearization
                            lhs2 = f[jp, ip] + f[j, i]
                            rhs2 = f[jp, i] + f[j, ip]
                            checked += 1
                            if lhs2 > rhs2 and not (math.isinf(lhs2) and math.isinf(rhs2)):
                                violations.append((gi, "lower", jp, j, ip, i))
        else:
            inf = INF if ddg.mode == "int" else math.inf
            up = sub.copy()
            up[np.tril_indices_from(up, k=-1)] = inf
            lo = sub.copy()
            lo[np.triu_indices_from(lo, k=1)] = inf
            checked += 2 * (k - 1) ** 2
            if not verify_monge(up):
                violations.append((gi, "upper", -1, -1, -1, -1))
            if not verify_monge(lo):
                violations.append((gi, "lower", -1, -1, -1, -1))
    return {"violations": violations, "checked": checked}


# -- external DDGs ------------------------------------------------------------

def _boundary_edge_arcs(piece: Piece):
    """Arcs of the piece joining two boundary nodes (kept by node deletion)."""
    g = piece.graph
    bset = set(piece.boundary.tolist())
    og = g.orig_nodes
    tails, heads, lens = [], [], []
    for e in range(g.m_edges):
        u, v = int(og[g.tail[2 * e]]), int(og[g.head[2 * e]])
        if u in bset and v in bset:
            for d in (2 * e, 2 * e + 1):
                w = g.length[d]
                if w < INF_CUT if g.mode == "int" else not math.isinf(w):
                    tails.append(int(og[g.tail[d]]))
                    heads.append(int(og[g.head[d]]))
                    lens.append(int(w) if g.mode == "int" else float(w))
    return tails, heads, lens


def external_from_context(target: Piece, sibling_ddgs, parent_ext, extra_group=None,
                          constants=DEFAULTS) -> DenseDistanceGraph:
    """DDG of the target piece's exterior, from sibling internals + parent
    exterior + the target's boundary-boundary edges.  `extra_group` appends a
    fixed occurrence group (global ids, cyclic order) to the universe, used
    when a distinguished cycle counts as boundary of every piece."""
    g = target.graph
    mode = g.mode
    groups = [h.boundary_occurrences() for h in target.holes]
    if extra_group is not None and len(extra_group):
        groups = groups + [np.asarray(extra_group, dtype=np.int64)]
    n_occ = int(sum(len(x) for x in groups))
    if n_occ == 0:
        return DenseDistanceGraph(target.pid, [], np.zeros(
            (0, 0), dtype=np.int64 if mode == "int" else np.float64), False, mode)
    occ = np.concatenate(groups)
    blocks = []
    for dd in sibling_ddgs:
        blocks += dd.blocks()
    if parent_ext is not None:
        blocks += parent_ext.blocks()
    j_arcs = _boundary_edge_arcs(target)
    inf = INF if mode == "int" else math.inf
    full = np.full((n_occ, n_occ), inf,
                   dtype=np.int64 if mode == "int" else np.float64)
    if blocks or len(j_arcs[0]):
        eng = FrdEngine(blocks, j_arcs=j_arcs if len(j_arcs[0]) else None,
                        constants=constants, mode=mode)
        idx_of = {int(v): i for i, v in enumerate(eng.universe)}
        distinct = sorted(set(occ.tolist()))
        rows = {}
        for v in distinct:
            if int(v) not in idx_of:
                row = np.full(len(occ), inf, dtype=full.dtype)
                row[occ == v] = 0
                rows[v] = row
                continue
            labels, _ = eng.run(source=int(v))
            row = np.empty(len(occ), dtype=full.dtype)
            for k, w in enumerate(occ.tolist()):
                wi = idx_of.get(int(w))
                row[k] = labels[wi] if wi is not None else inf
            row[occ == v] = 0
            rows[v] = row
        for i, v in enumerate(occ.tolist()):
            full[i, :] = rows[int(v)]
    else:
        np.fill_diagonal(full, 0)
    for i, v in enumerate(occ.tolist()):
        full[i, occ == v] = 0
    return DenseDistanceGraph(target.pid, groups, full, False, mode)


def division_externals(div: Division, root_ext=None, extra_group=None,
                       constants=DEFAULTS, backend=None,
                       internal_cache=None) -> dict:
    """External DDGs for every final piece of one division (tree required)."""
    if div.tree is None:
        raise ValueError("division built without keep_tree")
    mode = div.root.mode
    preset = getattr(div, "preset_boundary", ())
    hole_faces = getattr(div, "root_hole_faces", ())

    def node_piece(i):
        tn = div.tree[i]
        if tn.piece_index is not None:
            return div.pieces[tn.piece_index]
        return make_piece(div.root, tn.edges, preset_boundary=preset,
                          root_hole_faces=hole_faces, pid=-1)

    pieces = {}
    internals = {}

    def internal_of(i):
        if i not in internals:
            p = pieces.setdefault(i, node_piece(i))
            tn = div.tree[i]
            if tn.piece_index is not None and internal_cache is not None \
                    and tn.piece_index in internal_cache:
                internals[i] = internal_cache[tn.piece_index]
            else:
                internals[i] = ddg_internal(p, backend=backend, constants=constants)
        return internals[i]

    ext = {}
    out = {}
    roots = [i for i, tn in enumerate(div.tree) if tn.parent is None]
    stack = list(roots)
    for i in roots:
        ext[i] = root_ext
    order = []
    while stack:
        i = stack.pop()
        order.append(i)
        tn = div.tree[i]
        if tn.children:
            stack.extend(tn.children)
    for i in order:
        tn = div.tree[i]
        if tn.parent is not None:
            parent = div.tree[tn.parent]
            sibs = [c for c in parent.children if c != i]
            sib_ddgs = [internal_of(c) for c in sibs]
            p = pieces.setdefault(i, node_piece(i))
            ext[i] = external_from_context(p, sib_ddgs, ext[tn.parent],
                                           extra_group=extra_group,
                                           constants=constants)
        if tn.piece_index is not None:
            if ext[i] is None:
                ext[i] = external_from_context(
                    pieces.setdefault(i, node_piece(i)), [], None,
                    extra_group=extra_group, constants=constants)
            out[tn.piece_index] = ext[i]
    return out


def ddg_external_all(rdiv: RecursiveDivision, constants=DEFAULTS, backend=None) -> dict:
    """External DDGs for every piece at every level of a recursive division.

    Returns {piece pid: DenseDistanceGraph}.  Requires keep_trees divisions.
    """
    out = {}
    top = rdiv.levels[rdiv.k][0]
    out[top.pid] = DenseDistanceGraph(top.pid, [], np.zeros(
        (0, 0), dtype=np.int64 if rdiv.root.mode == "int" else np.float64),
        False, rdiv.root.mode)
    for lvl, parent, div in rdiv.divisions:
        per_piece = division_externals(div, root_ext=out[parent.pid],
                                       constants=constants, backend=backend)
        for pi, ddg in per_piece.items():
            out[div.pieces[pi].pid] = ddg
    return out
