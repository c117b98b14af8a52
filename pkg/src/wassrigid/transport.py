"""Exact discrete optimal transport with p-power costs.

The solver is a primal network simplex on the bipartite transportation
graph.  Bases are spanning trees with ``n + m - 1`` cells, started from the
north-west corner rule; the entering cell is the first cell in row-major
order with negative reduced cost and the leaving cell is the lowest-index
blocking cell (Bland's rule), which rules out cycling on degenerate
problems.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import BadExponent, SolverStall, SpaceMismatch
from .measures import AtomicMeasure

UNIQUE = "unique"
DEGENERATE = "degenerate"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class TransportPlan:
    source: AtomicMeasure
    target: AtomicMeasure
    entries: tuple  # (i, j, mass) with mass > 0

    @classmethod
    def from_dense(cls, source, target, P, drop: float = 0.0) -> "TransportPlan":
        P = np.asarray(P, dtype=float)
        idx = np.argwhere(P > drop)
        return cls(source, target, tuple((int(i), int(j), float(P[i, j])) for i, j in idx))

    def dense(self) -> np.ndarray:
        P = np.zeros((len(self.source), len(self.target)))
        for i, j, m in self.entries:
            P[i, j] += m
        return P

    def row_sums(self) -> np.ndarray:
        return self.dense().sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.dense().sum(axis=0)

    def support(self, tol: float = 0.0) -> frozenset:
        return frozenset((i, j) for i, j, m in self.entries if m > tol)

    def cost(self, p: float) -> float:
        C = cost_matrix(self.source, self.target, p)
        return float(sum(m * C[i, j] for i, j, m in self.entries))


@dataclass(frozen=True)
class OptResult:
    plan: TransportPlan
    total_cost: float
    wp: float
    p: float
    unique: str = UNKNOWN
    pivots: int = field(default=0, compare=False)


def _check_p(p):
    if not (1.0 < p < math.inf):
        raise BadExponent(f"p={p} must lie in (1, inf)")


def cost_matrix(mu: AtomicMeasure, nu: AtomicMeasure, p: float) -> np.ndarray:
    _check_p(p)
    if mu.space != nu.space:
        raise SpaceMismatch("measures live on different spaces")
    return mu.space.pairwise(mu.coords, nu.coords) ** p


def product_plan(mu: AtomicMeasure, nu: AtomicMeasure) -> TransportPlan:
    return TransportPlan.from_dense(mu, nu, np.outer(mu.w, nu.w))


# ---------------------------------------------------------------------------
# network simplex


class _Tree:
    """Spanning-tree basis; rows are nodes ``0..n-1``, columns ``n..n+m-1``."""

    def __init__(self, n, m):
        self.n, self.m = n, m
        self.adj = [set() for _ in range(n + m)]
        self.flow = {}

    def add(self, i, j, x):
        self.flow[i, j] = x
        self.adj[i].add(self.n + j)
        self.adj[self.n + j].add(i)

    def remove(self, i, j):
        del self.flow[i, j]
        self.adj[i].discard(self.n + j)
        self.adj[self.n + j].discard(i)

    def potentials(self, C):
        n = self.n
        u = np.zeros(n)
        v = np.zeros(self.m)
        seen = [False] * (n + self.m)
        seen[0] = True
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for b in self.adj[a]:
                if seen[b]:
                    continue
                seen[b] = True
                if a < n:
                    v[b - n] = C[a, b - n] - u[a]
                else:
                    u[b] = C[b, a - n] - v[a - n]
                queue.append(b)
        return u, v

    def path(self, src, dst):
        """Node path from ``src`` to ``dst`` inside the tree."""
        parent = {src: None}
        queue = deque([src])
        while queue:
            a = queue.popleft()
            if a == dst:
                break
            for b in self.adj[a]:
                if b not in parent:
                    parent[b] = a
                    queue.append(b)
        out = [dst]
        while parent[out[-1]] is not None:
            out.append(parent[out[-1]])
        return out[::-1]

    def cycle(self, i, j):
        """Cells of the pivot cycle for entering ``(i, j)``: (plus cells, minus cells)."""
        n = self.n
        nodes = self.path(n + j, i)
        plus, minus = [(i, j)], []
        for k in range(len(nodes) - 1):
            a, b = nodes[k], nodes[k + 1]
            cell = (a, b - n) if a < n else (b, a - n)
            (minus if k % 2 == 0 else plus).append(cell)
        return plus, minus


def _northwest(a, b):
    n, m = len(a), len(b)
    tree = _Tree(n, m)
    ra, rb = a.astype(float).copy(), b.astype(float).copy()
    i = j = 0
    while True:
        x = min(ra[i], rb[j])
        tree.add(i, j, max(x, 0.0))
        ra[i] -= x
        rb[j] -= x
        if i == n - 1 and j == m - 1:
            break
        if i == n - 1:
            j += 1
        elif j == m - 1:
            i += 1
        elif ra[i] <= rb[j]:
            i += 1
        else:
            j += 1
    return tree


def network_simplex(a, b, C, tol: float = 1e-9, max_pivots: int | None = None):
    """Minimize ``<C, P>`` over couplings of ``a`` and ``b``.

    Returns ``(P, tree, pivots)`` where ``tree`` is the optimal basis.  The
    reduced-cost threshold is ``tol`` times the largest cost entry.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    C = np.asarray(C, dtype=float)
    n, m = C.shape
    tree = _northwest(a, b)
    thr = tol * max(float(np.max(np.abs(C))) if C.size else 0.0, 1e-300)
    if max_pivots is None:
        max_pivots = 50 * n * m + 1000
    pivots = 0
    basic = np.zeros((n, m), dtype=bool)
    for i, j in tree.flow:
        basic[i, j] = True
    while True:
        u, v = tree.potentials(C)
        red = C - u[:, None] - v[None, :]
        red[basic] = 0.0
        cand = np.flatnonzero(red.ravel() < -thr)
        if len(cand) == 0:
            break
        if pivots >= max_pivots:
            raise SolverStall(f"no convergence after {pivots} pivots")
        i, j = divmod(int(cand[0]), m)
        plus, minus = tree.cycle(i, j)
        theta = min(tree.flow[c] for c in minus)
        leave = min(c for c in minus if tree.flow[c] <= theta)
        tree.add(i, j, 0.0)
        basic[i, j] = True
        for c in plus:
            tree.flow[c] += theta
        for c in minus:
            tree.flow[c] = max(tree.flow[c] - theta, 0.0)
        tree.remove(*leave)
        basic[leave] = False
        pivots += 1
    P = np.zeros((n, m))
    for (i, j), x in tree.flow.items():
        P[i, j] = x
    return P, tree, pivots


def _alternative_optimum(tree, C, thr, mass_tol):
    """True when a zero-reduced-cost pivot moves positive mass."""
    u, v = tree.potentials(C)
    red = C - u[:, None] - v[None, :]
    n, m = C.shape
    for i, j in zip(*np.nonzero(np.abs(red) <= thr)):
        if (i, j) in tree.flow:
            continue
        _, minus = tree.cycle(int(i), int(j))
        if min(tree.flow[c] for c in minus) > mass_tol:
            return True
    return False


def solve_kantorovich(
    mu: AtomicMeasure,
    nu: AtomicMeasure,
    p: float,
    check_unique: bool = True,
    tol: Tolerances = DEFAULT,
    seed: int = 0,
    trials: int = 3,
) -> OptResult:
    """Optimal plan, cost and ``W_p`` between two atomic measures.

    With ``check_unique`` the problem is re-solved ``trials`` times with
    costs jittered by ``eps * U(-1, 1)``, ``eps = 1e-7 * max cost``; a change
    in the support, or an optimal pivot that moves mass, flags the plan as
    degenerate.
    """
    C = cost_matrix(mu, nu, p)
    P, tree, pivots = network_simplex(mu.w, nu.w, C, tol.lp)
    plan = TransportPlan.from_dense(mu, nu, P)
    total = float(np.sum(P * C))
    wp = total ** (1.0 / p)
    unique = UNKNOWN
    if check_unique:
        unique = _uniqueness(mu.w, nu.w, C, P, tree, tol, seed, trials)
    return OptResult(plan, total, wp, float(p), unique, pivots)


def _uniqueness(a, b, C, P, tree, tol, seed, trials):
    if C.size == 0 or min(C.shape) == 1:
        return UNIQUE
    cmax = float(np.max(C))
    if cmax == 0.0:
        return UNIQUE
    support = P > tol.mass
    if _alternative_optimum(tree, C, tol.lp * cmax, tol.mass):
        return DEGENERATE
    rng = np.random.Generator(np.random.PCG64(seed))
    eps = 1e-7 * cmax
    for _ in range(trials):
        Cp = C + eps * rng.uniform(-1.0, 1.0, size=C.shape)
        Pp, _, _ = network_simplex(a, b, Cp, tol.lp)
        if not np.array_equal(Pp > tol.mass, support):
            return DEGENERATE
    return UNIQUE


def wasserstein_distance(mu: AtomicMeasure, nu: AtomicMeasure, p: float, tol: Tolerances = DEFAULT) -> float:
    return solve_kantorovich(mu, nu, p, check_unique=False, tol=tol).wp


def wasserstein_pp(mu: AtomicMeasure, nu: AtomicMeasure, p: float, tol: Tolerances = DEFAULT) -> float:
    """``W_p^p``, i.e. the optimal total cost."""
    return solve_kantorovich(mu, nu, p, check_unique=False, tol=tol).total_cost


# ---------------------------------------------------------------------------
# certificates and diagnostics


def check_admissible(plan: TransportPlan, mu: AtomicMeasure, nu: AtomicMeasure, tol: float = 1e-10) -> bool:
    P = np.zeros((len(mu), len(nu)))
    for i, j, m in plan.entries:
        if not (0 <= i < len(mu) and 0 <= j < len(nu)) or m < 0:
            return False
        P[i, j] += m
    return bool(
        np.all(np.abs(P.sum(axis=1) - mu.w) <= tol) and np.all(np.abs(P.sum(axis=0) - nu.w) <= tol)
    )


@dataclass(frozen=True)
class CycleViolation:
    cells: tuple  # support cells (i, j) in cycle order
    cost: float  # sum of d^p over the original pairs
    permuted_cost: float  # sum after shifting targets one step along the cycle


@dataclass(frozen=True)
class MonotonicityReport:
    certified_up_to: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def check_cyclical_monotonicity(
    plan: TransportPlan,
    p: float,
    max_cycle: int = 3,
    random_trials: int = 0,
    seed: int = 0,
    tol: float = 1e-9,
    mass_tol: float = 1e-10,
) -> MonotonicityReport:
    """Look for a cyclic reassignment of support pairs that lowers the p-cost.

    Every subset of at most ``max_cycle`` support cells is tried against all
    of its cyclic permutations, then ``random_trials`` random longer cycles.
    The first violation found is returned with its witnessing cells.
    """
    cells = sorted((i, j) for i, j, m in plan.entries if m > mass_tol)
    C = cost_matrix(plan.source, plan.target, p)
    rows = np.array([c[0] for c in cells], dtype=int)
    cols = np.array([c[1] for c in cells], dtype=int)
    # K[a, b] = cost of sending the source of cell a to the target of cell b
    K = C[np.ix_(rows, cols)]
    diag = np.diag(K).copy()
    s = len(cells)
    thr = tol * max(1.0, float(np.max(C)) if C.size else 1.0)

    def violation(order):
        base = float(sum(diag[k] for k in order))
        shifted = float(sum(K[order[k], order[(k + 1) % len(order)]] for k in range(len(order))))
        return CycleViolation(tuple(cells[k] for k in order), base, shifted)

    certified = 1
    for k in range(2, max_cycle + 1):
        if k > s:
            certified = max_cycle
            break
        found = None
        if k == 2:
            gain = diag[:, None] + diag[None, :] - K - K.T
            hit = np.argwhere(np.triu(gain > thr, 1))
            if len(hit):
                found = [int(hit[0][0]), int(hit[0][1])]
        elif k == 3:
            for a in range(s):
                bs = np.arange(a + 1, s)
                if len(bs) < 2:
                    break
                B, Cc = np.meshgrid(bs, bs, indexing="ij")
                mask = B < Cc
                here = diag[a] + diag[B] + diag[Cc]
                fwd = K[a, B] + K[B, Cc] + K[Cc, a]
                bwd = K[a, Cc] + K[Cc, B] + K[B, a]
                for shifted, order in ((fwd, (B, Cc)), (bwd, (Cc, B))):
                    hit = np.argwhere(mask & (here - shifted > thr))
                    if len(hit):
                        r, q = hit[0]
                        found = [a, int(order[0][r, q]), int(order[1][r, q])]
                        break
                if found:
                    break
        else:
            for subset in itertools.combinations(range(s), k):
                first, rest = subset[0], subset[1:]
                for perm in itertools.permutations(rest):
                    order = (first,) + perm
                    v = violation(list(order))
                    if v.cost - v.permuted_cost > thr:
                        found = list(order)
                        break
                if found:
                    break
        if found is not None:
            return MonotonicityReport(k - 1, (violation(found),))
        certified = k

    violations = []
    if random_trials and s > max_cycle:
        rng = np.random.Generator(np.random.PCG64(seed))
        for _ in range(random_trials):
            k = int(rng.integers(max_cycle + 1, s + 1))
            order = [int(x) for x in rng.choice(s, size=k, replace=False)]
            v = violation(order)
            if v.cost - v.permuted_cost > thr:
                violations.append(v)
                break
    return MonotonicityReport(certified, tuple(violations))


@dataclass(frozen=True)
class MapCheck:
    is_map: bool
    split_mass: float


def is_induced_by_map(
    plan: TransportPlan,
    direction: Literal["from_source", "from_target"] = "from_source",
    tol: float = 1e-10,
) -> MapCheck:
    """Whether each atom on one side sends its mass to a single partner.

    ``split_mass`` is the mass leaving an atom through anything other than
    its primary entry (largest mass, then lowest partner index).
    """
    if direction not in ("from_source", "from_target"):
        raise ValueError(f"unknown direction {direction!r}")
    groups: dict[int, list] = {}
    for i, j, m in plan.entries:
        key, other = (i, j) if direction == "from_source" else (j, i)
        groups.setdefault(key, []).append((other, m))
    is_map = True
    split = 0.0
    for outgoing in groups.values():
        outgoing.sort(key=lambda e: (-e[1], e[0]))
        split += sum(m for _, m in outgoing[1:])
        if sum(1 for _, m in outgoing if m > tol) != 1:
            is_map = False
    return MapCheck(is_map, float(split))
