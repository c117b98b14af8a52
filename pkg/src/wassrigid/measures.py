"""Finitely supported probability measures on a base space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import SpaceMismatch
from .spaces import Isometry, Point, Space


class AtomicMeasure:
    """Probability measure with finitely many atoms.

    Construction canonicalizes: zero weights are dropped, atoms closer than
    the distance tolerance are merged (weights added) and atoms are sorted by
    coordinates.  Canonicalization is idempotent, so two measures are equal
    exactly when their canonical atom and weight lists coincide.
    """

    __slots__ = ("space", "atoms", "weights", "__dict__")

    def __init__(self, space: Space, atoms: Sequence[Point], weights: Sequence[float], tol: Tolerances = DEFAULT):
        if len(atoms) != len(weights):
            raise ValueError("atoms and weights differ in length")
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and nonnegative")
        total = float(w.sum())
        if abs(total - 1.0) > tol.mass:
            raise ValueError(f"weights sum to {total!r}, not 1")
        keep = [i for i in range(len(w)) if w[i] > 0]
        if not keep:
            raise ValueError("measure has no atoms")
        pts = [space.check(atoms[i]) for i in keep]
        w = w[keep]

        order = sorted(range(len(pts)), key=lambda i: pts[i].coords)
        pts = [pts[i] for i in order]
        w = w[order]
        if len(pts) > 1:
            pts, w = _merge(space, pts, w, tol.distance)
        if len(pts) == 1:
            # a lone atom carries all the mass, whatever rounding the merge left
            w = np.ones(1)

        self.space = space
        self.atoms = tuple(pts)
        self.weights = tuple(float(v) for v in w)

    @classmethod
    def from_pairs(cls, space, pairs, tol: Tolerances = DEFAULT):
        pairs = list(pairs)
        return cls(space, [p for p, _ in pairs], [w for _, w in pairs], tol)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(zip(self.atoms, self.weights))

    def __eq__(self, other):
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return self.space == other.space and self.atoms == other.atoms and self.weights == other.weights

    def __hash__(self):
        return hash((self.space, self.atoms, self.weights))

    def __repr__(self):
        body = ", ".join(f"{w:.6g}@{tuple(round(c, 6) for c in a.coords)}" for a, w in self)
        return f"AtomicMeasure({self.space!r}, [{body}])"

    @cached_property
    def coords(self) -> np.ndarray:
        return self.space.as_array(self.atoms)

    @cached_property
    def w(self) -> np.ndarray:
        return np.array(self.weights)

    def is_dirac(self) -> bool:
        return len(self.atoms) == 1

    def close_to(self, other: "AtomicMeasure", atol: float = 1e-9) -> bool:
        """Same atom count, atoms within ``atol`` and weights within ``atol``."""
        if len(self) != len(other) or self.space != other.space:
            return False
        D = self.space.pairwise(self.coords, other.coords)
        used = set()
        for i, wi in enumerate(self.weights):
            j = int(np.argmin(D[i]))
            if D[i, j] > atol or j in used or abs(wi - other.weights[j]) > atol:
                return False
            used.add(j)
        return True


def _merge(space, pts, w, eps):
    D = space.pairwise(space.as_array(pts), space.as_array(pts))
    n = len(pts)
    close = D <= eps
    np.fill_diagonal(close, False)
    if not close.any():
        return pts, w
    owner = np.full(n, -1)
    reps, mass = [], []
    for i in range(n):
        if owner[i] >= 0:
            continue
        group = np.flatnonzero(close[i] & (owner < 0))
        owner[i] = i
        owner[group] = i
        reps.append(pts[i])
        mass.append(math.fsum([w[i], *w[group]]))
    return reps, np.array(mass)


@dataclass(frozen=True)
class ShellDecomposition:
    center: Point
    radii: tuple
    masses: tuple


def dirac(space: Space, x: Point) -> AtomicMeasure:
    return AtomicMeasure(space, [x], [1.0])


def mixture(coefficients: Sequence[float], measures: Sequence[AtomicMeasure]) -> AtomicMeasure:
    if len(coefficients) != len(measures) or not measures:
        raise ValueError("need one coefficient per measure")
    space = measures[0].space
    atoms, weights = [], []
    for c, m in zip(coefficients, measures):
        if m.space != space:
            raise SpaceMismatch("mixture of measures on different spaces")
        if c < 0:
            raise ValueError("mixture coefficients must be nonnegative")
        atoms.extend(m.atoms)
        weights.extend(c * w for w in m.weights)
    return AtomicMeasure(space, atoms, weights)


def pushforward(g: Isometry, mu: AtomicMeasure, verify: bool = True) -> AtomicMeasure:
    """Image measure ``g#mu``; ``g`` is spot-checked first unless ``verify`` is off."""
    if verify:
        g.verify(mu.space)
    return AtomicMeasure(mu.space, [g.apply(mu.space, x) for x in mu.atoms], mu.weights)


def uniform_mesh_measure(space: Space, n: int | None = None) -> AtomicMeasure:
    pts = space.mesh_points(n)
    return AtomicMeasure(space, pts, [1.0 / len(pts)] * len(pts))


def random_measure(space: Space, rng: np.random.Generator, n_atoms: int, support: Sequence[Point] | None = None) -> AtomicMeasure:
    """Atoms uniform on ``support`` (or the whole space), flat-Dirichlet weights."""
    if support is None:
        atoms = [space.random_point(rng) for _ in range(n_atoms)]
    else:
        atoms = [support[int(i)] for i in rng.integers(len(support), size=n_atoms)]
    w = rng.dirichlet(np.ones(n_atoms))
    w = w / w.sum()
    return AtomicMeasure(space, atoms, w)


def shell_decomposition(mu: AtomicMeasure, x: Point, tol: float = 1e-9) -> ShellDecomposition:
    d = mu.space.pairwise(mu.space.as_array([x]), mu.coords)[0]
    order = np.argsort(d, kind="stable")
    radii, masses = [], []
    last = None
    for i in order:
        if last is not None and d[i] - last <= tol:
            masses[-1] += mu.weights[i]
        else:
            radii.append(float(d[i]))
            masses.append(mu.weights[i])
        last = d[i]
    return ShellDecomposition(x, tuple(radii), tuple(masses))


def support_in_union_of_spheres(mu: AtomicMeasure, x: Point, radii: Sequence[float], tol: float = 1e-9) -> bool:
    if len(radii) == 0:
        return False
    d = mu.space.pairwise(mu.space.as_array([x]), mu.coords)[0]
    r = np.asarray(radii, dtype=float)
    return bool(np.all(np.min(np.abs(d[:, None] - r[None, :]), axis=1) <= tol))
