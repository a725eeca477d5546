import numpy as np
import pytest

from plor import INF, generate, sssp_baseline


def all_pairs_floyd_warshall(g):
    """Independent all-pairs oracle (dense min-plus), float inf internally."""
    n = g.n
    fw = np.full((n, n), np.inf)
    np.fill_diagonal(fw, 0.0)
    for e in range(g.m_edges):
        u, v = int(g.tail[2 * e]), int(g.head[2 * e])
        w, wr = float(g.length[2 * e]), float(g.length[2 * e + 1])
        if w < INF:
            fw[u, v] = min(fw[u, v], w)
        if wr < INF:
            fw[v, u] = min(fw[v, u], wr)
    for k in range(n):
        np.minimum(fw, fw[:, k, None] + fw[None, k, :], out=fw)
    if g.mode == "int":
        return np.where(np.isinf(fw), INF, fw).astype(np.int64)
    return fw


def all_pairs_baseline(g):
    """All-pairs via the heapq Dijkstra baseline."""
    return np.vstack([sssp_baseline(g, s) for s in range(g.n)])


@pytest.fixture(scope="session")
def grid8():
    return generate("grid", w=8, h=8, length_dist="uniform:1:50", seed=8)


@pytest.fixture(scope="session")
def grid16():
    return generate("grid", w=16, h=16, length_dist="uniform:1:50", seed=16)


@pytest.fixture(scope="session")
def tri200():
    return generate("tri", n=200, length_dist="uniform:1:100", seed=7)
