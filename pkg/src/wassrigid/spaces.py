"""Compact geodesic base spaces with closed-form geodesics.

Five kinds are supported: a closed interval, a circle, the round 2-sphere,
the real projective plane (sphere modulo antipodes) and an arbitrary finite
metric table.  Points are small immutable records tagged with their space
kind so that mixing spaces is detected instead of silently producing
nonsense distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    AmbiguousGeodesic,
    DomainMismatch,
    FormatError,
    NotAnIsometry,
    NotExtendable,
    NotMinimizing,
    Unsupported,
)

TWO_PI = 2.0 * math.pi

# golden angle for Fibonacci lattices
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class Point:
    kind: str
    coords: tuple

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


@dataclass(frozen=True)
class GeodesicSegment:
    """A minimizing geodesic ``start -> end``.

    ``direction`` is the resolved branch: a unit tangent at ``start`` for the
    sphere and projective plane, ``+1``/``-1`` orientation on the circle, an
    index for finite metrics.  It is ``None`` when the geodesic is ambiguous
    and no branch was supplied; interpolation then raises.
    """

    start: Point
    end: Point
    length: float
    direction: object = None
    ambiguous: bool = False
    space: "Space" = field(default=None, repr=False, compare=False)

    def __call__(self, t: float) -> Point:
        return self.space.interpolate(self, t)


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("zero vector has no direction")
    return v / n


class Space:
    """Common interface; subclasses implement the closed forms."""

    kind: str = ""
    dim: int = 1

    tol: Tolerances = DEFAULT

    # -- points ---------------------------------------------------------
    def point(self, *coords) -> Point:
        raise NotImplementedError

    def check(self, x: Point) -> Point:
        if not isinstance(x, Point) or x.kind != self.kind:
            got = getattr(x, "kind", type(x).__name__)
            raise DomainMismatch(f"point of kind {got!r} used in {self.kind!r} space")
        return x

    def as_array(self, points: Sequence[Point]) -> np.ndarray:
        for x in points:
            self.check(x)
        arr = np.array([x.coords for x in points], dtype=float)
        return arr.reshape(len(points), self.dim)

    def from_array(self, arr) -> list[Point]:
        arr = np.asarray(arr, dtype=float).reshape(-1, self.dim)
        return [self.point(*row) for row in arr]

    def random_point(self, rng: np.random.Generator) -> Point:
        raise NotImplementedError

    def mesh_points(self, n: int) -> list[Point]:
        raise NotImplementedError

    # -- metric ---------------------------------------------------------
    def pairwise(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Distance matrix between two coordinate arrays."""
        raise NotImplementedError

    def distance(self, x: Point, y: Point) -> float:
        self.check(x)
        self.check(y)
        X = np.array([x.coords], dtype=float)
        Y = np.array([y.coords], dtype=float)
        return float(self.pairwise(X, Y)[0, 0])

    def diameter(self) -> float:
        raise NotImplementedError

    # -- geodesics ------------------------------------------------------
    def geodesic(self, x: Point, y: Point, branch=None) -> GeodesicSegment:
        raise NotImplementedError

    def interpolate(self, seg: GeodesicSegment, t: float) -> Point:
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t={t} outside [0, 1]")
        if t == 0.0:
            return seg.start
        if t == 1.0:
            return seg.end
        if seg.length == 0.0:
            return seg.start
        if seg.ambiguous and seg.direction is None:
            raise AmbiguousGeodesic(
                f"{seg.start} and {seg.end} are a cut pair; supply a branch"
            )
        return self._interp(seg, t)

    def _interp(self, seg, t):
        raise NotImplementedError

    def extend(self, x: Point, y: Point, s: float) -> Point:
        raise NotImplementedError

    def cut_set(self, x: Point, n_samples: int) -> list[Point]:
        raise Unsupported(f"cut locus not available for {self.kind}")

    # -- serialization ----------------------------------------------------
    def describe(self) -> str:
        raise NotImplementedError


class Interval(Space):
    kind = "interval"
    dim = 1

    def __init__(self, length: float = 1.0):
        if not length > 0:
            raise ValueError("interval length must be positive")
        self.length = float(length)

    def __repr__(self):
        return f"Interval({self.length!r})"

    def __eq__(self, other):
        return isinstance(other, Interval) and other.length == self.length

    def __hash__(self):
        return hash((self.kind, self.length))

    def point(self, t) -> Point:
        t = float(t)
        eps = self.tol.distance
        if not -eps <= t <= self.length + eps:
            raise DomainMismatch(f"{t} outside [0, {self.length}]")
        return Point(self.kind, (min(max(t, 0.0), self.length),))

    def random_point(self, rng):
        return self.point(rng.uniform(0.0, self.length))

    def mesh_points(self, n):
        return [self.point((k + 0.5) * self.length / n) for k in range(n)]

    def pairwise(self, X, Y):
        return np.abs(X[:, 0][:, None] - Y[:, 0][None, :])

    def diameter(self):
        return self.length

    def geodesic(self, x, y, branch=None):
        self.check(x)
        self.check(y)
        return GeodesicSegment(x, y, abs(y[0] - x[0]), None, False, self)

    def _interp(self, seg, t):
        a, b = seg.start[0], seg.end[0]
        return self.point(a + t * (b - a))

    def extend(self, x, y, s):
        _check_extension_args(self, x, y, s)
        z = x[0] + s * (y[0] - x[0])
        eps = self.tol.distance
        if z < -eps or z > self.length + eps:
            raise NotExtendable(f"extension to {z} leaves [0, {self.length}]")
        return self.point(z)

    def cut_set(self, x, n_samples=1):
        self.check(x)
        d0, d1 = x[0], self.length - x[0]
        if abs(d0 - d1) <= self.tol.distance:
            return [self.point(0.0), self.point(self.length)]
        return [self.point(0.0 if d0 > d1 else self.length)]

    def describe(self):
        return f"interval {self.length!r}"


class Circle(Space):
    kind = "circle"
    dim = 1

    def __init__(self, circumference: float = TWO_PI):
        if not circumference > 0:
            raise ValueError("circumference must be positive")
        self.circumference = float(circumference)

    def __repr__(self):
        return f"Circle({self.circumference!r})"

    def __eq__(self, other):
        return isinstance(other, Circle) and other.circumference == self.circumference

    def __hash__(self):
        return hash((self.kind, self.circumference))

    def point(self, a) -> Point:
        a = math.fmod(float(a), self.circumference)
        if a < 0:
            a += self.circumference
        if a >= self.circumference:
            a = 0.0
        return Point(self.kind, (a,))

    def random_point(self, rng):
        return self.point(rng.uniform(0.0, self.circumference))

    def mesh_points(self, n):
        return [self.point(k * self.circumference / n) for k in range(n)]

    def pairwise(self, X, Y):
        d = np.mod(np.abs(X[:, 0][:, None] - Y[:, 0][None, :]), self.circumference)
        return np.minimum(d, self.circumference - d)

    def diameter(self):
        return self.circumference / 2.0

    def geodesic(self, x, y, branch=None):
        self.check(x)
        self.check(y)
        C = self.circumference
        ccw = math.fmod(y[0] - x[0], C)
        if ccw < 0:
            ccw += C
        cw = C - ccw if ccw > 0 else 0.0
        length = min(ccw, cw)
        if length == 0.0:
            return GeodesicSegment(x, y, 0.0, branch or 1, False, self)
        ambiguous = abs(ccw - cw) <= self.tol.distance
        natural = None if ambiguous else (1 if ccw < cw else -1)
        if branch is not None:
            branch = _orientation(branch)
            if natural is not None and branch != natural:
                raise NotMinimizing(f"orientation {branch} is the longer arc")
            natural = branch
        return GeodesicSegment(x, y, length, natural, ambiguous, self)

    def _interp(self, seg, t):
        return self.point(seg.start[0] + seg.direction * t * seg.length)

    def extend(self, x, y, s):
        _check_extension_args(self, x, y, s)
        seg = self.geodesic(x, y)
        if s == 1.0:
            return y
        if s * seg.length > self.diameter() + self.tol.distance:
            raise NotExtendable("extension passes the cut point")
        if seg.direction is None:
            raise AmbiguousGeodesic("cannot extend from a cut pair")
        return self.point(x[0] + seg.direction * s * seg.length)

    def cut_set(self, x, n_samples=1):
        self.check(x)
        return [self.point(x[0] + self.circumference / 2.0)]

    def describe(self):
        return f"circle {self.circumference!r}"


def _orientation(branch) -> int:
    if isinstance(branch, str):
        b = branch.lower()
        if b in ("ccw", "counterclockwise", "+", "+1"):
            return 1
        if b in ("cw", "clockwise", "-", "-1"):
            return -1
        raise ValueError(f"unknown circle orientation {branch!r}")
    b = int(branch)
    if b not in (1, -1):
        raise ValueError("circle orientation must be +1 or -1")
    return b


class _RoundSpace(Space):
    """Shared machinery for the sphere and its antipodal quotient."""

    dim = 3

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)

    def __repr__(self):
        return f"{type(self).__name__}({self.radius!r})"

    def __eq__(self, other):
        return type(other) is type(self) and other.radius == self.radius

    def __hash__(self):
        return hash((self.kind, self.radius))

    def _canon(self, u: np.ndarray) -> np.ndarray:
        return u

    def point(self, *coords) -> Point:
        if len(coords) == 1:
            coords = tuple(coords[0])
        u = np.asarray(coords, dtype=float)
        if u.shape != (3,):
            raise DomainMismatch(f"{self.kind} points are 3-vectors")
        u = self._canon(_unit(u))
        return Point(self.kind, tuple(float(c) for c in self.radius * u))

    def unit(self, x: Point) -> np.ndarray:
        return np.asarray(self.check(x).coords, dtype=float) / self.radius

    def random_point(self, rng):
        return self.point(rng.normal(size=3))

    def _angles(self, U, V):
        raise NotImplementedError

    def pairwise(self, X, Y):
        return self.radius * self._angles(X / self.radius, Y / self.radius)

    def _sphere_geodesic(self, x, u, v, y, branch, cut_angle):
        """Geodesic along the great circle from unit ``u`` toward unit ``v``."""
        theta = float(math.atan2(np.linalg.norm(np.cross(u, v)), float(u @ v)))
        length = self.radius * theta
        if length == 0.0:
            return GeodesicSegment(x, y, 0.0, None, False, self)
        ambiguous = (cut_angle - theta) * self.radius <= self.tol.distance
        w = None
        if not ambiguous:
            w = _unit(v - (u @ v) * u)
        if branch is not None:
            b = np.asarray(branch, dtype=float)
            b = _unit(b - (b @ u) * u)
            if w is not None and b @ w < 1.0 - 1e-9:
                raise NotMinimizing("branch tangent does not point toward the endpoint")
            if w is None:
                w = b
        return GeodesicSegment(x, y, length, None if w is None else tuple(w), ambiguous, self)

    def _along(self, x: Point, w, angle: float) -> Point:
        u = self.unit(x)
        w = np.asarray(w, dtype=float)
        return self.point(math.cos(angle) * u + math.sin(angle) * w)

    def _interp(self, seg, t):
        return self._along(seg.start, seg.direction, t * seg.length / self.radius)

    def extend(self, x, y, s):
        _check_extension_args(self, x, y, s)
        seg = self.geodesic(x, y)
        if s == 1.0:
            return y
        if s * seg.length > self.diameter() + self.tol.distance:
            raise NotExtendable("extension passes the cut locus")
        if seg.direction is None:
            raise AmbiguousGeodesic("cannot extend from a cut pair")
        return self._along(x, seg.direction, s * seg.length / self.radius)

    def fibonacci(self, n: int) -> np.ndarray:
        k = np.arange(n, dtype=float)
        z = 1.0 - (2.0 * k + 1.0) / n
        r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
        phi = k * _GOLDEN_ANGLE
        return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


class Sphere2(_RoundSpace):
    kind = "sphere2"

    def _angles(self, U, V):
        cross = np.cross(U[:, None, :], V[None, :, :])
        dots = np.einsum("ik,jk->ij", U, V)
        return np.arctan2(np.linalg.norm(cross, axis=-1), dots)

    def diameter(self):
        return math.pi * self.radius

    def mesh_points(self, n):
        return self.from_array(self.fibonacci(n))

    def geodesic(self, x, y, branch=None):
        u, v = self.unit(x), self.unit(y)
        return self._sphere_geodesic(x, u, v, y, branch, math.pi)

    def cut_set(self, x, n_samples=1):
        return [self.point(-self.unit(x))]

    def describe(self):
        return f"sphere2 {self.radius!r}"


class ProjectivePlane(_RoundSpace):
    """Round sphere with antipodal points identified.

    Representatives are unit vectors (times the radius) whose first
    coordinate exceeding 1e-12 in magnitude is positive, so that equal
    classes compare equal.
    """

    kind = "projective_plane"

    def _canon(self, u):
        for c in u:
            if abs(c) > 1e-12:
                return u if c > 0 else -u
        return u

    def _angles(self, U, V):
        cross = np.cross(U[:, None, :], V[None, :, :])
        dots = np.abs(np.einsum("ik,jk->ij", U, V))
        return np.arctan2(np.linalg.norm(cross, axis=-1), dots)

    def diameter(self):
        return 0.5 * math.pi * self.radius

    def mesh_points(self, n):
        # upper half of a 2n-point sphere lattice: exactly n classes
        return self.from_array(self.fibonacci(2 * n)[:n])

    def geodesic(self, x, y, branch=None):
        u, v = self.unit(x), self.unit(y)
        if u @ v < 0:
            v = -v
        return self._sphere_geodesic(x, u, v, y, branch, 0.5 * math.pi)

    def cut_set(self, x, n_samples=16):
        u = self.unit(x)
        e1 = _unit(np.cross(u, [1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.cross(u, [0.0, 1.0, 0.0]))
        e2 = np.cross(u, e1)
        phis = np.pi * np.arange(n_samples) / n_samples
        return [self.point(math.cos(p) * e1 + math.sin(p) * e2) for p in phis]

    def describe(self):
        return f"projective_plane {self.radius!r}"


class FiniteMetric(Space):
    """Finite metric space given by a distance table.

    Finite metrics are not geodesic in general: interpolation only succeeds
    when the table contains a point at exactly the requested position.
    """

    kind = "finite_metric"
    dim = 1

    def __init__(self, table, tol: float = 1e-9):
        D = np.array(table, dtype=float)
        if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
            raise ValueError("distance table must be a nonempty square matrix")
        if np.any(D < -tol):
            raise ValueError("distances must be nonnegative")
        if np.max(np.abs(D - D.T)) > tol:
            raise ValueError("distance table is not symmetric")
        if np.max(np.abs(np.diag(D))) > tol:
            raise ValueError("distance table has a nonzero diagonal")
        off = D + np.eye(len(D))
        if np.any(off[~np.eye(len(D), dtype=bool)] <= 0):
            raise ValueError("distinct indices must have positive distance")
        # D[i,k] <= D[i,j] + D[j,k] for all i, j, k
        if np.any(D[:, None, :] > D[:, :, None] + D[None, :, :] + tol):
            raise ValueError("distance table violates the triangle inequality")
        self.table = D
        self.table.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.table)

    def __repr__(self):
        return f"FiniteMetric(n={self.n})"

    def __eq__(self, other):
        return isinstance(other, FiniteMetric) and np.array_equal(other.table, self.table)

    def __hash__(self):
        return hash((self.kind, self.table.tobytes()))

    def point(self, i) -> Point:
        if float(i) != int(i):
            raise DomainMismatch(f"index {i} is not an integer")
        i = int(i)
        if not 0 <= i < self.n:
            raise DomainMismatch(f"index {i} outside 0..{self.n - 1}")
        return Point(self.kind, (i,))

    def random_point(self, rng):
        return self.point(int(rng.integers(self.n)))

    def mesh_points(self, n=None):
        return [self.point(i) for i in range(self.n)]

    def pairwise(self, X, Y):
        return self.table[np.ix_(X[:, 0].astype(int), Y[:, 0].astype(int))]

    def diameter(self):
        return float(self.table.max())

    def geodesic(self, x, y, branch=None):
        self.check(x)
        self.check(y)
        return GeodesicSegment(x, y, float(self.table[x[0], y[0]]), branch, False, self)

    def _find(self, x, y, dx, dy, branch):
        D, eps = self.table, self.tol.distance
        hits = np.flatnonzero((np.abs(D[x[0]] - dx) <= eps) & (np.abs(D[y[0]] - dy) <= eps))
        if len(hits) == 0:
            raise Unsupported("no table point at the requested geodesic position")
        if branch is not None:
            if int(branch) not in hits:
                raise NotMinimizing(f"index {branch} is not on a geodesic")
            return self.point(int(branch))
        if len(hits) > 1:
            raise AmbiguousGeodesic(f"several table points qualify: {hits.tolist()}")
        return self.point(int(hits[0]))

    def _interp(self, seg, t):
        L = seg.length
        return self._find(seg.start, seg.end, t * L, (1 - t) * L, seg.direction)

    def interpolate(self, seg, t):
        if 0.0 < t < 1.0 and seg.length > 0:
            return self._interp(seg, t)
        return super().interpolate(seg, t)

    def extend(self, x, y, s):
        _check_extension_args(self, x, y, s)
        L = float(self.table[x[0], y[0]])
        if s * L > self.diameter() + self.tol.distance:
            raise NotExtendable("extension exceeds the table diameter")
        hits = np.flatnonzero(
            (np.abs(self.table[x[0]] - s * L) <= self.tol.distance)
            & (np.abs(self.table[y[0]] - (s - 1) * L) <= self.tol.distance)
        )
        if len(hits) == 0:
            raise NotExtendable("no table point continues the geodesic")
        if len(hits) > 1:
            raise AmbiguousGeodesic(f"several extensions qualify: {hits.tolist()}")
        return self.point(int(hits[0]))

    def describe(self):
        entries = " ".join(repr(float(v)) for v in self.table.ravel())
        return f"finite_metric {self.n} {entries}"


def _check_extension_args(space, x, y, s):
    space.check(x)
    space.check(y)
    if s < 1.0:
        raise ValueError("extension factor must be >= 1")
    if x == y or space.distance(x, y) == 0.0:
        raise ValueError("extension needs distinct points")


# ---------------------------------------------------------------------------
# functional surface


def distance(space: Space, x: Point, y: Point) -> float:
    return space.distance(x, y)


def geodesic(space: Space, x: Point, y: Point, branch=None) -> GeodesicSegment:
    return space.geodesic(x, y, branch)


def interpolate(space: Space, gamma: GeodesicSegment, t: float) -> Point:
    return space.interpolate(gamma, t)


def extend_geodesic(space: Space, x: Point, y: Point, s: float) -> Point:
    """Point ``z`` with ``d(x, z) = s d(x, y)`` and ``y`` at parameter ``1/s`` on ``x -> z``."""
    return space.extend(x, y, s)


def diameter(space: Space) -> float:
    return space.diameter()


def cut_set(space: Space, x: Point, n_samples: int = 16) -> list[Point]:
    return space.cut_set(x, n_samples)


def antipodal_set(space: Space, E: Sequence[Point], mesh: Sequence[Point], tol: float = 1e-9) -> list[Point]:
    """Mesh points maximizing the distance to the set ``E``."""
    if not E or not mesh:
        raise ValueError("E and mesh must be nonempty")
    d = space.pairwise(space.as_array(mesh), space.as_array(E)).min(axis=1)
    top = d.max()
    return [m for m, dm in zip(mesh, d) if dm >= top - tol]


# ---------------------------------------------------------------------------
# isometries


class Isometry:
    """A registered isometry descriptor; ``verify`` spot-checks it."""

    kinds: tuple = ()

    def apply(self, space: Space, x: Point) -> Point:
        raise NotImplementedError

    def verify(self, space: Space, trials: int = 1000, seed: int = 0, tol: float = 1e-9) -> None:
        if self.kinds and space.kind not in self.kinds:
            raise NotAnIsometry(f"{type(self).__name__} does not act on {space.kind}")
        rng = np.random.Generator(np.random.PCG64(seed))
        if isinstance(space, FiniteMetric):
            pts = space.mesh_points()
            img = [self.apply(space, x) for x in pts]
            D0 = space.pairwise(space.as_array(pts), space.as_array(pts))
            D1 = space.pairwise(space.as_array(img), space.as_array(img))
            if np.max(np.abs(D0 - D1)) > tol:
                raise NotAnIsometry("permutation does not preserve the table")
            return
        xs = [space.random_point(rng) for _ in range(trials)]
        ys = [space.random_point(rng) for _ in range(trials)]
        d0 = _paired(space, xs, ys)
        d1 = _paired(space, [self.apply(space, x) for x in xs], [self.apply(space, y) for y in ys])
        bad = np.abs(d0 - d1) > tol
        if bad.any():
            raise NotAnIsometry(f"distance changed on {int(bad.sum())} of {trials} pairs")


def _paired(space, xs, ys):
    X, Y = space.as_array(xs), space.as_array(ys)
    out = np.empty(len(xs))
    for lo in range(0, len(xs), 256):
        sl = slice(lo, lo + 256)
        out[sl] = np.diag(space.pairwise(X[sl], Y[sl]))
    return out


class Identity(Isometry):
    def apply(self, space, x):
        return space.check(x)

    def __repr__(self):
        return "Identity()"


class IntervalReflection(Isometry):
    kinds = ("interval",)

    def apply(self, space, x):
        return space.point(space.length - space.check(x)[0])

    def __repr__(self):
        return "IntervalReflection()"


@dataclass(frozen=True)
class CircleRotation(Isometry):
    angle: float
    kinds = ("circle",)

    def apply(self, space, x):
        return space.point(space.check(x)[0] + self.angle)


@dataclass(frozen=True)
class CircleReflection(Isometry):
    axis: float = 0.0
    kinds = ("circle",)

    def apply(self, space, x):
        return space.point(2.0 * self.axis - space.check(x)[0])


class Rotation(Isometry):
    """Orthogonal 3x3 matrix acting on the sphere or the projective plane."""

    kinds = ("sphere2", "projective_plane")

    def __init__(self, matrix):
        self.matrix = np.array(matrix, dtype=float).reshape(3, 3)
        self.matrix.setflags(write=False)

    @classmethod
    def about_axis(cls, axis, angle: float) -> "Rotation":
        k = _unit(axis)
        K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
        return cls(np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K)

    def apply(self, space, x):
        u = np.asarray(space.check(x).coords, dtype=float)
        return space.point(self.matrix @ u)

    def __repr__(self):
        return f"Rotation({self.matrix.tolist()})"


class Permutation(Isometry):
    kinds = ("finite_metric",)

    def __init__(self, perm):
        self.perm = tuple(int(i) for i in perm)

    def apply(self, space, x):
        return space.point(self.perm[space.check(x)[0]])

    def __repr__(self):
        return f"Permutation({list(self.perm)})"


# ---------------------------------------------------------------------------
# text descriptors

_KINDS = {
    "interval": Interval,
    "circle": Circle,
    "sphere2": Sphere2,
    "projective_plane": ProjectivePlane,
}


def parse_space(text: str, line: int | None = None) -> Space:
    """Inverse of ``Space.describe``: ``"<kind> <scale>"`` or an inline table."""
    parts = text.split()
    if not parts:
        raise FormatError("empty space descriptor", line)
    kind = parts[0].lower()
    try:
        if kind in _KINDS:
            if len(parts) > 2:
                raise FormatError(f"{kind} takes one scale parameter", line)
            return _KINDS[kind](*(float(v) for v in parts[1:]))
        if kind == "finite_metric":
            n = int(parts[1])
            vals = [float(v) for v in parts[2:]]
            if len(vals) != n * n:
                raise FormatError(f"expected {n * n} table entries, got {len(vals)}", line)
            return FiniteMetric(np.array(vals).reshape(n, n))
    except FormatError:
        raise
    except (ValueError, IndexError) as exc:
        raise FormatError(f"bad space descriptor: {exc}", line) from exc
    raise FormatError(f"unknown space kind {kind!r}", line)
