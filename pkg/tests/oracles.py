"""Independent reference computations used only by the tests.

``vertex_minimum`` enumerates every basis of the transportation polytope:
each spanning tree of the complete bipartite graph K(n, m) determines a
unique flow, and the feasible ones (all flows nonnegative) are exactly the
vertices.  The per-shape linear maps from marginals to tree flows are
cached, so a batch of instances of one shape costs one matrix product.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def _is_spanning_tree(cells, n, m):
    parent = list(range(n + m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in cells:
        ra, rb = find(i), find(n + j)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


@lru_cache(maxsize=None)
def _bases(n, m):
    all_cells = [(i, j) for i in range(n) for j in range(m)]
    trees = []
    maps = []
    for cells in itertools.combinations(all_cells, n + m - 1):
        if not _is_spanning_tree(cells, n, m):
            continue
        A = np.zeros((n + m, n + m - 1))
        for k, (i, j) in enumerate(cells):
            A[i, k] = 1.0
            A[n + j, k] = 1.0
        trees.append(cells)
        maps.append(np.linalg.pinv(A))
    return trees, np.array(maps)


def vertex_minimum(a, b, C, feas_tol=1e-12):
    """Minimum of <C, P> over all vertices of the transportation polytope."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    C = np.asarray(C, dtype=float)
    n, m = C.shape
    trees, maps = _bases(n, m)
    flows = maps @ np.concatenate([a, b])
    feasible = np.all(flows >= -feas_tol, axis=1)
    costs = np.array([[C[i, j] for i, j in cells] for cells in trees])
    values = np.sum(costs * flows, axis=1)
    return float(values[feasible].min())


def vertex_count(a, b):
    n, m = len(a), len(b)
    trees, maps = _bases(n, m)
    flows = maps @ np.concatenate([np.asarray(a, float), np.asarray(b, float)])
    return int(np.sum(np.all(flows >= -1e-12, axis=1)))


def dense_sample(space, n):
    """Quasi-uniform sample used to brute-force diameters."""
    return space.as_array(space.mesh_points(n))
