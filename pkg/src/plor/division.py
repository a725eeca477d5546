"""r-divisions with holes, recursive r-divisions, and their checker.

Pieces are edge-induced subgraphs of a divided root graph.  A node is a
boundary node when it is incident to an edge outside the piece (a strict
superset of "incident to an outside node", needed so shortest-path
decompositions stay sound when an edge of another piece joins two piece
nodes) or when boundary status is inherited from an ancestor.  A face of a
piece is a hole when it is not a face of the root (or is a root face the
caller declared hole-like, which is how inherited holes and a distinguished
infinite face propagate through recursion).

Splitting uses balanced fundamental-cycle separators, re-splitting by
boundary weight, hole count, and hole-walk length until each piece meets the
configured bounds.  All bounds are hard-checked; `verify_division` re-checks
everything and is exposed on the CLI.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, Constants
from .errors import ConstantsExceeded
from .graph import EmbeddedGraph
from .separator import cycle_separator


@dataclass
class Hole:
    face: int                 # face id within the piece graph
    walk: np.ndarray          # global node ids along the walk, canonical start
    walk_local: np.ndarray    # same positions, piece-local node ids
    boundary_pos: np.ndarray  # walk positions holding boundary nodes

    def boundary_occurrences(self) -> np.ndarray:
        """Ordered boundary node occurrences (global ids, repeats possible)."""
        return self.walk[self.boundary_pos]


@dataclass
class Piece:
    pid: int
    graph: EmbeddedGraph      # orig_nodes / orig_edges map to global ids
    boundary: np.ndarray      # global node ids, sorted
    holes: list
    level: int = 0
    parent: int | None = None

    @property
    def nodes(self) -> np.ndarray:
        return self.graph.orig_nodes

    @property
    def edges(self) -> np.ndarray:
        return self.graph.orig_edges

    def boundary_local(self) -> np.ndarray:
        lut = {int(gn): i for i, gn in enumerate(self.graph.orig_nodes)}
        return np.asarray([lut[int(b)] for b in self.boundary], dtype=np.int64)

    def size_words(self) -> int:
        return int(self.graph.size_words() + len(self.boundary)
                   + sum(2 * len(h.walk) + len(h.boundary_pos) for h in self.holes))


@dataclass
class TreeNode:
    """Binary split tree entry; leaves carry final piece indices."""

    edges: np.ndarray              # root-local edge ids
    parent: int | None
    children: tuple | None = None
    piece_index: int | None = None


@dataclass
class Division:
    r: int
    root: EmbeddedGraph
    pieces: list
    split_log: list
    tree: list | None = None
    constants: Constants = DEFAULTS
    preset_boundary: tuple = ()      # global node ids forced to boundary
    root_hole_faces: tuple = ()      # root face ids treated as holes

    def node_pieces(self):
        """global node id -> list of piece indices"""
        out = {}
        for i, p in enumerate(self.pieces):
            for gn in p.nodes:
                out.setdefault(int(gn), []).append(i)
        return out

    def max_stats(self):
        return {
            "pieces": len(self.pieces),
            "max_nodes": max((p.graph.n for p in self.pieces), default=0),
            "max_boundary": max((len(p.boundary) for p in self.pieces), default=0),
            "max_holes": max((len(p.holes) for p in self.pieces), default=0),
        }

    def size_words(self) -> int:
        return int(sum(p.size_words() for p in self.pieces))


# -- construction -------------------------------------------------------------

def _piece_from_edges(root, edges, preset_local, root_hole_faces, root_deg):
    """Build piece info (root-local ids) for an edge subset of `root`."""
    sub = root.subgraph_by_edges(edges)
    pn = sub._parent_nodes
    deg_in = np.zeros(len(pn), dtype=np.int64)
    loc_tail = sub.tail[::2]
    loc_head = sub.head[::2]
    np.add.at(deg_in, loc_tail, 1)
    np.add.at(deg_in, loc_head, 1)
    bnd_mask = deg_in < root_deg[pn]
    if preset_local is not None and len(preset_local):
        bnd_mask |= np.isin(pn, preset_local)
    holes = _find_holes(root, sub, root_hole_faces)
    return sub, pn, bnd_mask, holes


def _find_holes(root, sub, root_hole_faces):
    """Faces of `sub` that are not (plain) faces of `root`: list of
    (face id, walk positions as local node ids)."""
    holes = []
    pe = sub._parent_edges
    for f in range(sub.n_faces):
        walk = sub.face_walk(f)
        gd = 2 * pe[walk >> 1] + (walk & 1)
        rf = root.face_id[gd]
        f0 = int(rf[0])
        is_real = bool(np.all(rf == f0)) and int(root.face_sizes[f0]) == len(walk) \
            and f0 not in root_hole_faces
        if not is_real:
            holes.append((f, sub.tail[walk]))
    return holes


def _componentize(root, edges):
    """Split a root-local edge id set into connected components' edge sets."""
    if len(edges) == 0:
        return []
    t = root.tail[2 * edges]
    h = root.head[2 * edges]
    parent = {}

    def find(x):
        r = x
        while parent.get(r, r) != r:
            r = parent[r]
        while parent.get(x, x) != x:
            parent[x], x = r, parent[x]
        return r

    for a, b in zip(t.tolist(), h.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for e, a in zip(edges.tolist(), t.tolist()):
        groups.setdefault(find(a), []).append(e)
    return [np.asarray(g, dtype=np.int64) for g in groups.values()]


def make_piece(g: EmbeddedGraph, edge_ids, *, preset_boundary=(),
               root_hole_faces=(), pid=0) -> Piece:
    """Stand-alone piece over an explicit edge subset of g (ids local to g)."""
    glob2loc = {int(gn): i for i, gn in enumerate(g.orig_nodes)}
    preset_local = np.asarray(sorted(glob2loc[int(x)] for x in preset_boundary
                                     if int(x) in glob2loc), dtype=np.int64)
    root_deg = np.zeros(g.n, dtype=np.int64)
    np.add.at(root_deg, g.tail[::2], 1)
    np.add.at(root_deg, g.head[::2], 1)
    sub, pn, bnd_mask, holes = _piece_from_edges(
        g, np.asarray(sorted(set(map(int, edge_ids))), dtype=np.int64),
        preset_local, set(int(f) for f in root_hole_faces), root_deg)
    return _finalize_piece(g, sub, pn, bnd_mask, holes, pid)


def r_division(g: EmbeddedGraph, r: int, *, preset_boundary=(),
               root_hole_faces=(), constants: Constants = DEFAULTS,
               keep_tree=False, enforce_walk=True) -> Division:
    """Divide g into edge-disjoint pieces of <= r nodes, O(sqrt r) boundary
    nodes on <= h_max holes.  `preset_boundary` (global ids) marks nodes that
    count as boundary wherever they appear; `root_hole_faces` (face ids of g)
    are treated as holes wherever a piece face coincides with them.
    """
    r = max(1, min(int(r), max(g.n, 1)))
    glob2loc = {int(gn): i for i, gn in enumerate(g.orig_nodes)}
    preset_local = np.asarray(sorted(glob2loc[int(x)] for x in preset_boundary
                                     if int(x) in glob2loc), dtype=np.int64)
    root_hole_faces = set(int(f) for f in root_hole_faces)
    root_deg = np.zeros(g.n, dtype=np.int64)
    np.add.at(root_deg, g.tail[::2], 1)
    np.add.at(root_deg, g.head[::2], 1)

    b_target = constants.c_boundary * math.sqrt(r)
    hw_target = constants.c_holewalk * math.sqrt(r)
    split_log = []
    tree = [] if keep_tree else None
    pieces_final = []

    all_edges = np.arange(g.m_edges, dtype=np.int64)
    work = []
    for comp_edges in _componentize(g, all_edges):
        node = TreeNode(comp_edges, None) if keep_tree else None
        if keep_tree:
            tree.append(node)
            work.append((comp_edges, len(tree) - 1))
        else:
            work.append((comp_edges, None))

    budget = 16 * g.m_edges + 64
    while work:
        budget -= 1
        if budget < 0:
            raise ConstantsExceeded("division did not converge")
        edges, tidx = work.pop()
        sub, pn, bnd_mask, holes = _piece_from_edges(
            g, edges, preset_local, root_hole_faces, root_deg)
        n_p = sub.n
        n_b = int(bnd_mask.sum())
        max_walk = max((len(w) for _, w in holes), default=0)
        reason = None
        if n_p > r:
            reason = "size"
        elif n_b > b_target:
            reason = "boundary"
        elif len(holes) > constants.h_max:
            reason = "holes"
        elif enforce_walk and max_walk > hw_target:
            reason = "walk"
        if reason is None:
            pieces_final.append(_finalize_piece(g, sub, pn, bnd_mask, holes,
                                                len(pieces_final)))
            if keep_tree:
                tree[tidx].piece_index = len(pieces_final) - 1
            continue

        floor = min(constants.sep_floor, max(3, r))
        weights = _split_weights(reason, sub, pn, bnd_mask, holes, hw_target)
        cut = cycle_separator(sub, weights, constants=constants, floor=floor)
        sides = _cut_edge_sets(sub, cut, edges)
        if cut.trivial or any(len(s) == len(edges) for s in sides) or \
                any(len(s) == 0 for s in sides):
            if reason != "size":
                cut = cycle_separator(sub, None, constants=constants, floor=floor)
                sides = _cut_edge_sets(sub, cut, edges)
            if cut.trivial or any(len(s) == len(edges) for s in sides) or \
                    any(len(s) == 0 for s in sides):
                # unsplittable at this size; accept only if within hard caps
                if n_p <= constants.c_size * r and n_b <= constants.c_boundary * math.sqrt(r) \
                        and len(holes) <= constants.h_max:
                    pieces_final.append(_finalize_piece(g, sub, pn, bnd_mask, holes,
                                                        len(pieces_final)))
                    if keep_tree:
                        tree[tidx].piece_index = len(pieces_final) - 1
                    continue
                raise ConstantsExceeded(
                    f"cannot split piece n={n_p} b={n_b} holes={len(holes)} ({reason})")
        split_log.append(dict(cut.stats, reason=reason))
        kids = []
        for s in sides:
            for comp in _componentize(g, s):
                kids.append(comp)
        if keep_tree:
            # binary tree: record the two sides, then components chain below
            side_nodes = []
            for s in sides:
                tree.append(TreeNode(s, tidx))
                side_nodes.append(len(tree) - 1)
            tree[tidx].children = tuple(side_nodes)
            for s, sn in zip(sides, side_nodes):
                comps = _componentize(g, s)
                if len(comps) == 1:
                    work.append((comps[0], sn))
                else:
                    ch = []
                    for comp in comps:
                        tree.append(TreeNode(comp, sn))
                        ch.append(len(tree) - 1)
                        work.append((comp, len(tree) - 1))
                    tree[sn].children = tuple(ch)
        else:
            for comp in kids:
                work.append((comp, None))

    div = Division(r=r, root=g, pieces=pieces_final, split_log=split_log,
                   tree=tree, constants=constants,
                   preset_boundary=tuple(int(x) for x in preset_boundary),
                   root_hole_faces=tuple(sorted(root_hole_faces)))
    _check_division_bounds(div, constants)
    return div


def _split_weights(reason, sub, pn, bnd_mask, holes, hw_target):
    n = sub.n
    w = np.zeros(n)
    if reason == "size":
        w[:] = 1.0
    elif reason == "boundary":
        w[bnd_mask] = 1.0
    elif reason == "holes":
        for f, walk in holes:
            w[int(walk.min())] += 1.0
    else:  # walk
        for f, walk in holes:
            if len(walk) > hw_target:
                for v in walk:
                    w[v] += 1.0
    if w.sum() <= 0:
        w[:] = 1.0
    return w


def _cut_edge_sets(sub, cut, edges):
    if cut.trivial:
        return [edges]
    inside = edges[np.asarray(cut.edge_side) == 0]
    outside = edges[np.asarray(cut.edge_side) == 1]
    return [inside, outside]


def _finalize_piece(g, sub, pn, bnd_mask, holes, pid):
    bnd_local = np.nonzero(bnd_mask)[0]
    bnd_global = np.sort(g.orig_nodes[pn[bnd_local]])
    hole_objs = []
    bset = set(bnd_local.tolist())
    for f, walk_local in holes:
        walk_local = np.asarray(walk_local, dtype=np.int64)
        walk_global = g.orig_nodes[pn[walk_local]]
        # canonical start: first occurrence of the smallest global node id
        start = int(np.argmin(walk_global))
        walk_global = np.roll(walk_global, -start)
        walk_local = np.roll(walk_local, -start)
        bpos = np.asarray([i for i, v in enumerate(walk_local.tolist()) if v in bset],
                          dtype=np.int64)
        hole_objs.append(Hole(face=f, walk=walk_global, walk_local=walk_local,
                              boundary_pos=bpos))
    return Piece(pid=pid, graph=sub, boundary=bnd_global, holes=hole_objs)


def _check_division_bounds(div, constants):
    r = div.r
    for p in div.pieces:
        if p.graph.n > constants.c_size * r:
            raise ConstantsExceeded(f"piece size {p.graph.n} > {constants.c_size}*{r}")
        if len(p.boundary) > constants.c_boundary * math.sqrt(r):
            raise ConstantsExceeded(
                f"boundary {len(p.boundary)} > {constants.c_boundary}*sqrt({r})")
        if len(p.holes) > constants.h_max:
            raise ConstantsExceeded(f"{len(p.holes)} holes > h_max")
    n = div.root.n
    if len(div.pieces) > constants.c_pieces * max(1.0, n / r) + 1:
        raise ConstantsExceeded(
            f"{len(div.pieces)} pieces > {constants.c_pieces}*{n}/{r}")


# -- recursive division -------------------------------------------------------

def level_schedule(n: int, k: int) -> list:
    """r_0 = sqrt(n); r_i = sqrt(n)*sqrt(r_{i-1}); r_k = n."""
    if k < 1:
        raise ValueError("k >= 1 required")
    sq = math.sqrt(n)
    rs = [max(1, math.ceil(sq))]
    for _ in range(1, k):
        rs.append(min(n, math.ceil(sq * math.sqrt(rs[-1]))))
    rs.append(n)
    return rs


@dataclass
class RecursiveDivision:
    root: EmbeddedGraph
    schedule: list                  # r_0 .. r_k (= n)
    levels: dict                    # level -> list[Piece]
    divisions: list                 # (level, parent piece, Division) triples
    constants: Constants = DEFAULTS
    _node_pieces: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.schedule) - 1

    def pieces_at(self, level: int):
        return self.levels[level]

    def subpieces(self, piece: Piece):
        return [q for q in self.levels.get(piece.level - 1, []) if q.parent == piece.pid]

    def node_pieces(self, level: int):
        """global node id -> list of pieces at `level` containing it"""
        if level not in self._node_pieces:
            out = {}
            for p in self.levels[level]:
                for gn in p.nodes:
                    out.setdefault(int(gn), []).append(p)
            self._node_pieces[level] = out
        return self._node_pieces[level]

    def size_words(self) -> int:
        return int(sum(p.size_words() for ps in self.levels.values() for p in ps))


def recursive_division(g: EmbeddedGraph, schedule, *, preset_boundary=(),
                       root_hole_faces=(), constants: Constants = DEFAULTS,
                       keep_trees=False) -> RecursiveDivision:
    """Build the leveled piece tree: level k is g, level i pieces divide each
    level-(i+1) piece with r_i.  Boundary status is global: a piece's boundary
    is inherited by every descendant piece containing it.
    """
    k = len(schedule) - 1
    top_holes = _find_holes(g, _as_own_subgraph(g), set(int(f) for f in root_hole_faces))
    root_deg = np.zeros(g.n, dtype=np.int64)
    np.add.at(root_deg, g.tail[::2], 1)
    np.add.at(root_deg, g.head[::2], 1)
    sub = _as_own_subgraph(g)
    pn = sub._parent_nodes
    bnd_mask = np.isin(pn, np.asarray(sorted(
        {int(x) for x in preset_boundary}), dtype=np.int64)) if len(list(preset_boundary)) \
        else np.zeros(g.n, dtype=bool)
    top = _finalize_piece(g, sub, pn, bnd_mask, top_holes, 0)
    top.level = k
    levels = {k: [top]}
    divisions = []
    pid = 1
    for lvl in range(k - 1, -1, -1):
        r_i = schedule[lvl]
        levels[lvl] = []
        for parent in levels[lvl + 1]:
            par_hole_faces = [h.face for h in parent.holes]
            d = r_division(parent.graph, min(r_i, parent.graph.n),
                           preset_boundary=parent.boundary,
                           root_hole_faces=par_hole_faces,
                           constants=constants, keep_tree=keep_trees)
            divisions.append((lvl, parent, d))
            for q in d.pieces:
                q.pid = pid
                pid += 1
                q.level = lvl
                q.parent = parent.pid
                levels[lvl].append(q)
    return RecursiveDivision(root=g, schedule=list(schedule), levels=levels,
                             divisions=divisions, constants=constants)


def _as_own_subgraph(g):
    sub = g.subgraph_by_edges(np.arange(g.m_edges, dtype=np.int64))
    return sub


# -- checker ------------------------------------------------------------------

def verify_division(obj, constants: Constants = DEFAULTS):
    """Re-check every division invariant; returns (ok, list of violations)."""
    viol = []
    if isinstance(obj, RecursiveDivision):
        for lvl, parent, d in obj.divisions:
            viol += _verify_one(d, constants, prefix=f"level {lvl}: ")
            for q in d.pieces:
                inh = set(parent.boundary.tolist()) & set(q.nodes.tolist())
                if not inh <= set(q.boundary.tolist()):
                    viol.append(f"level {lvl}: piece {q.pid} misses inherited boundary")
        return (not viol), viol
    viol += _verify_one(obj, constants)
    return (not viol), viol


def _verify_one(d: Division, constants, prefix=""):
    viol = []
    g = d.root
    r = d.r
    covered = np.zeros(g.m_edges, dtype=np.int64)
    for p in d.pieces:
        covered[p.graph._parent_edges] += 1
    if np.any(covered != 1):
        viol.append(prefix + "edges not partitioned exactly once")
    if len(d.pieces) > constants.c_pieces * max(1.0, g.n / r) + 1:
        viol.append(prefix + f"piece count {len(d.pieces)} exceeds bound")
    total_boundary = 0
    root_deg = np.zeros(g.n, dtype=np.int64)
    np.add.at(root_deg, g.tail[::2], 1)
    np.add.at(root_deg, g.head[::2], 1)
    for p in d.pieces:
        total_boundary += len(p.boundary)
        if p.graph.n > constants.c_size * r:
            viol.append(prefix + f"piece {p.pid}: {p.graph.n} nodes > {constants.c_size}*r")
        if len(p.boundary) > constants.c_boundary * math.sqrt(r):
            viol.append(prefix + f"piece {p.pid}: boundary {len(p.boundary)} too big")
        if len(p.holes) > constants.h_max:
            viol.append(prefix + f"piece {p.pid}: {len(p.holes)} holes > h_max")
        on_holes = set()
        for h in p.holes:
            on_holes.update(h.boundary_occurrences().tolist())
            if not np.array_equal(h.boundary_occurrences(),
                                  h.walk[h.boundary_pos]):
                viol.append(prefix + f"piece {p.pid}: hole occurrence order broken")
        missing = set(p.boundary.tolist()) - on_holes
        if missing:
            viol.append(prefix + f"piece {p.pid}: boundary nodes {sorted(missing)[:4]} on no hole")
        # spec-definition boundary (incident to outside node) must be a subset
        pnodes = set(p.nodes.tolist())
        # sampled check that outward incidence implies boundary membership
        bset = set(p.boundary.tolist())
        deg_in = np.zeros(p.graph.n, dtype=np.int64)
        np.add.at(deg_in, p.graph.tail[::2], 1)
        np.add.at(deg_in, p.graph.head[::2], 1)
        pn_root = p.graph._parent_nodes if hasattr(p.graph, "_parent_nodes") else None
        if pn_root is not None and len(pn_root) == p.graph.n:
            short = deg_in < root_deg[pn_root]
            for i in np.nonzero(short)[0]:
                if int(p.graph.orig_nodes[i]) not in bset:
                    viol.append(prefix + f"piece {p.pid}: node {int(p.graph.orig_nodes[i])} "
                                         "incident to missing edge but not boundary")
                    break
    if total_boundary > constants.c_pieces * constants.c_boundary * max(1.0, g.n / math.sqrt(r)):
        viol.append(prefix + f"total boundary multiplicity {total_boundary} exceeds bound")
    for rec in d.split_log:
        if rec["balance"] > 0.75 + 1e-9:
            viol.append(prefix + f"separator balance {rec['balance']:.3f} > 3/4")
        if rec["cycle_len"] > rec["size_bound"] + 1e-9:
            viol.append(prefix + f"separator size {rec['cycle_len']} > bound")
    return viol
