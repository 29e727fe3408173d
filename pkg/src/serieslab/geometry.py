"""Model spaces, compact sets as sample clouds, and measures as quadrature rules.

The models are the Riemann sphere, finite disjoint unions of spheres, and the
product of two spheres.  Points live in the affine chart z of each component;
the point at infinity is carried explicitly so that sup-norms over the whole
sphere can include the frame-limit value there.

Measures are finite quadrature rules (nodes + nonnegative weights).  The two
workhorses are the uniform circle rule (trapezoid in angle, spectrally exact
for trigonometric polynomials) and the normalized-Lebesgue disk rule
(Gauss-Legendre in radius x trapezoid in angle).  Weak convergence of measures
is tested through a finite table of chart moments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import InvalidArgumentError, UnsupportedSpaceError

MERGE_TOL = 1e-12

SINGLE = "single-sphere"
UNION = "disjoint-union"
PRODUCT = "product-of-two-spheres"

COLLAPSE = "collapse"
FIRST_FACTOR = "first-factor"


@dataclass(frozen=True)
class SpaceModel:
    """A computable model space X, optionally with a base map rho: X -> Z."""

    structure: str = SINGLE
    components: int = 1
    base_map: str | None = None

    def __post_init__(self):
        if self.structure not in (SINGLE, UNION, PRODUCT):
            raise InvalidArgumentError("unknown structure %r" % (self.structure,))
        if self.components < 1:
            raise InvalidArgumentError("components must be >= 1")
        if self.structure == SINGLE and self.components != 1:
            raise InvalidArgumentError("single sphere has one component")
        if self.structure == PRODUCT and self.components != 1:
            # one logical component carrying two coordinates
            raise InvalidArgumentError("product space has one logical component")
        if self.base_map is not None:
            if self.structure == UNION and self.base_map != COLLAPSE:
                raise InvalidArgumentError("disjoint union supports 'collapse' only")
            if self.structure == PRODUCT and self.base_map != FIRST_FACTOR:
                raise InvalidArgumentError("product supports 'first-factor' only")
            if self.structure == SINGLE:
                raise InvalidArgumentError("single sphere has no base map")

    @staticmethod
    def sphere() -> "SpaceModel":
        return SpaceModel(SINGLE, 1, None)

    @staticmethod
    def union(n: int = 2, base_map: str | None = COLLAPSE) -> "SpaceModel":
        return SpaceModel(UNION, n, base_map)

    @staticmethod
    def product(base_map: str | None = FIRST_FACTOR) -> "SpaceModel":
        return SpaceModel(PRODUCT, 1, base_map)

    @property
    def is_product(self) -> bool:
        return self.structure == PRODUCT

    def base_space(self) -> "SpaceModel":
        if self.base_map is None:
            raise UnsupportedSpaceError("no base map declared")
        return SpaceModel.sphere()


@dataclass(frozen=True)
class Point:
    """A point of a model space in affine chart coordinates.

    For product spaces the second coordinate is (z2, at_infinity2); otherwise
    those fields are unused.
    """

    z: complex = 0j
    component: int = 0
    at_infinity: bool = False
    z2: complex | None = None
    at_infinity2: bool = False

    def coords(self):
        if self.z2 is None and not self.at_infinity2:
            return ((self.z, self.at_infinity),)
        return ((self.z, self.at_infinity), (self.z2 if self.z2 is not None else 0j, self.at_infinity2))


@dataclass(frozen=True)
class SampleSet:
    """A compact set K represented by a finite point cloud."""

    points: tuple
    descriptor: str
    refinement_level: int = 0
    space: SpaceModel = field(default_factory=SpaceModel.sphere)

    def __post_init__(self):
        if not self.points:
            raise InvalidArgumentError("empty sample set")

    def refine(self) -> "SampleSet":
        """One refinement doubling; dispatches on the descriptor."""
        kind, args = _parse_descriptor(self.descriptor)
        lvl = self.refinement_level + 1
        if kind == "circle":
            r, n = args
            return circle_samples(r, 2 * int(n), level=lvl)
        if kind == "disk":
            r, nr, nt = args
            return disk_samples(r, 2 * int(nr), 2 * int(nt), level=lvl)
        if kind == "annulus":
            a, b, nr, nt = args
            return annulus_samples(a, b, 2 * int(nr), 2 * int(nt), level=lvl)
        if kind == "sphere":
            (n,) = args
            return sphere_samples(2 * int(n), level=lvl)
        raise InvalidArgumentError("cannot refine descriptor %r" % (self.descriptor,))


def _parse_descriptor(desc: str):
    kind, _, rest = desc.partition("(")
    if not rest.endswith(")"):
        return kind, ()
    args = tuple(float(x) for x in rest[:-1].split(",") if x.strip())
    return kind, args


def circle_samples(radius: float, n: int, component: int = 0, level: int = 0) -> SampleSet:
    if radius <= 0 or n < 4:
        raise InvalidArgumentError("need radius > 0 and n >= 4")
    th = 2.0 * np.pi * np.arange(n) / n
    pts = tuple(Point(z=radius * complex(math.cos(t), math.sin(t)), component=component) for t in th)
    return SampleSet(pts, "circle(%g,%d)" % (radius, n), level)


def _disk_nodes(radius: float, n_r: int, n_t: int):
    """Gauss-Legendre in radius (density 2r/R^2) x trapezoid in angle."""
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * wx * (2.0 * r / radius**2)  # radial density of normalized Lebesgue
    th = 2.0 * np.pi * np.arange(n_t) / n_t
    return r, wr, th


def disk_samples(radius: float, n_r: int, n_t: int, component: int = 0, level: int = 0) -> SampleSet:
    if radius <= 0 or n_r < 2 or n_t < 4:
        raise InvalidArgumentError("bad disk grid")
    r, _, th = _disk_nodes(radius, n_r, n_t)
    pts = []
    # the boundary circle carries the sup of holomorphic sections; the closed
    # disk cloud must include it exactly, not just the interior Gauss rings
    for ri in list(r) + [radius]:
        for t in th:
            pts.append(Point(z=ri * complex(math.cos(t), math.sin(t)), component=component))
    return SampleSet(tuple(pts), "disk(%g,%d,%d)" % (radius, n_r, n_t), level)


def annulus_samples(a: float, b: float, n_r: int, n_t: int, component: int = 0, level: int = 0) -> SampleSet:
    if not (0 < a < b) or n_r < 2 or n_t < 4:
        raise InvalidArgumentError("bad annulus grid")
    x, _ = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (b - a) * (x + 1.0) + a
    th = 2.0 * np.pi * np.arange(n_t) / n_t
    pts = []
    for ri in r:
        for t in th:
            pts.append(Point(z=ri * complex(math.cos(t), math.sin(t)), component=component))
    return SampleSet(tuple(pts), "annulus(%g,%g,%d,%d)" % (a, b, n_r, n_t), level)


def sphere_samples(n: int, component: int = 0, level: int = 0) -> SampleSet:
    """Cover the whole sphere: FS-uniform radii in both chart scales plus infinity."""
    if n < 8:
        raise InvalidArgumentError("need n >= 8")
    # radii where the FS radial coordinate u = r^2/(1+r^2) is equispaced
    u = (np.arange(n) + 0.5) / n
    r = np.sqrt(u / (1.0 - u))
    th = 2.0 * np.pi * np.arange(n) / n
    pts = [Point(z=0j, component=component)]
    for ri in r:
        for t in th:
            pts.append(Point(z=ri * complex(math.cos(t), math.sin(t)), component=component))
    pts.append(Point(component=component, at_infinity=True))
    return SampleSet(tuple(pts), "sphere(%d)" % n, level)


def union_samples(parts: list[SampleSet]) -> SampleSet:
    pts = tuple(p for s in parts for p in s.points)
    return SampleSet(pts, "union", max(s.refinement_level for s in parts),
                     SpaceModel.union(len(parts)))


class QuadratureMeasure:
    """A positive measure as a quadrature rule: nodes + nonnegative weights."""

    def __init__(self, nodes, weights, space: SpaceModel | None = None, descriptor: str = "custom"):
        self.nodes = tuple(nodes)
        self.weights = np.asarray(weights, dtype=float)
        if self.weights.shape != (len(self.nodes),):
            raise InvalidArgumentError("weights/nodes length mismatch")
        if np.any(self.weights < -1e-15):
            raise InvalidArgumentError("negative quadrature weight")
        self.space = space if space is not None else SpaceModel.sphere()
        self.descriptor = descriptor

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))

    def scaled(self, c: float) -> "QuadratureMeasure":
        return QuadratureMeasure(self.nodes, c * self.weights, self.space, self.descriptor)

    def components(self):
        return sorted({p.component for p in self.nodes})

    def chart_points(self) -> np.ndarray:
        if any(p.at_infinity for p in self.nodes):
            raise InvalidArgumentError("measure has nodes at infinity")
        return np.array([p.z for p in self.nodes], dtype=complex)

    def moment(self, a: int, b: int, component: int | None = None) -> complex:
        """Raw chart moment  integral of z^a zbar^b  (optionally on one component)."""
        z = self.chart_points()
        vals = z**a * np.conj(z) ** b
        if component is None:
            return complex(np.sum(self.weights * vals))
        mask = np.array([p.component == component for p in self.nodes])
        return complex(np.sum(self.weights[mask] * vals[mask]))

    def to_json(self) -> str:
        return json.dumps({
            "descriptor": self.descriptor,
            "nodes": [[p.component, p.z.real, p.z.imag, int(p.at_infinity)] for p in self.nodes],
            "weights": [float(w) for w in self.weights],
        })

    @staticmethod
    def from_json(text: str) -> "QuadratureMeasure":
        d = json.loads(text)
        nodes = [Point(z=complex(re, im), component=int(c), at_infinity=bool(inf))
                 for c, re, im, inf in d["nodes"]]
        ncomp = max((p.component for p in nodes), default=0) + 1
        space = SpaceModel.sphere() if ncomp == 1 else SpaceModel.union(ncomp)
        return QuadratureMeasure(nodes, d["weights"], space, d.get("descriptor", "custom"))


@dataclass(frozen=True)
class FiberDegree:
    """Sheet count of a covering base map, or normalized fiber area for products."""

    value: float = 1.0

    def __post_init__(self):
        if self.value <= 0:
            raise InvalidArgumentError("fiber degree must be positive")


def circle_quadrature(radius: float, n: int, component: int = 0,
                      space: SpaceModel | None = None) -> QuadratureMeasure:
    """Uniform probability measure on the circle |z| = radius.

    Exact for z^m zbar^l whenever |m - l| < n.
    """
    if n < 4:
        raise InvalidArgumentError("n must be >= 4")
    if radius <= 0:
        raise InvalidArgumentError("radius must be > 0")
    th = 2.0 * np.pi * np.arange(n) / n
    nodes = [Point(z=radius * complex(math.cos(t), math.sin(t)), component=component) for t in th]
    w = np.full(n, 1.0 / n)
    return QuadratureMeasure(nodes, w, space, "circle(%g,%d)" % (radius, n))


def disk_quadrature(radius: float, n_r: int, n_t: int, component: int = 0,
                    space: SpaceModel | None = None) -> QuadratureMeasure:
    """Normalized Lebesgue measure of the disk |z| <= radius.

    Gauss-Legendre in radius against the density 2r/R^2, trapezoid in angle.
    Moments z^a zbar^b are exact for a+b <= 2*n_r - 2 and |a-b| < n_t.
    """
    if radius <= 0 or n_r < 2 or n_t < 4:
        raise InvalidArgumentError("bad disk quadrature sizes")
    r, wr, th = _disk_nodes(radius, n_r, n_t)
    nodes = []
    w = []
    for ri, wi in zip(r, wr):
        for t in th:
            nodes.append(Point(z=ri * complex(math.cos(t), math.sin(t)), component=component))
            w.append(wi / n_t)
    return QuadratureMeasure(nodes, np.array(w), space, "disk(%g,%d,%d)" % (radius, n_r, n_t))


def fs_area_quadrature(n_r: int, n_t: int, component: int = 0,
                       space: SpaceModel | None = None) -> QuadratureMeasure:
    """Normalized Fubini-Study area measure of the sphere.

    Uses the substitution u = r^2/(1+r^2), which maps the FS radial density to
    the uniform density on [0,1); Gauss-Legendre in u x trapezoid in angle.
    """
    if n_r < 2 or n_t < 4:
        raise InvalidArgumentError("bad quadrature sizes")
    x, wx = np.polynomial.legendre.leggauss(n_r)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * wx
    r = np.sqrt(u / (1.0 - u))
    th = 2.0 * np.pi * np.arange(n_t) / n_t
    nodes = []
    w = []
    for ri, wi in zip(r, wu):
        for t in th:
            nodes.append(Point(z=ri * complex(math.cos(t), math.sin(t)), component=component))
            w.append(wi / n_t)
    return QuadratureMeasure(nodes, np.array(w), space, "fs-area(%d,%d)" % (n_r, n_t))


def product_measure(mu1: QuadratureMeasure, mu2: QuadratureMeasure) -> QuadratureMeasure:
    """Product quadrature on the product of two spheres."""
    nodes = []
    w = []
    for p1, w1 in zip(mu1.nodes, mu1.weights):
        for p2, w2 in zip(mu2.nodes, mu2.weights):
            nodes.append(Point(z=p1.z, at_infinity=p1.at_infinity,
                               z2=p2.z, at_infinity2=p2.at_infinity))
            w.append(w1 * w2)
    return QuadratureMeasure(nodes, np.array(w), SpaceModel.product(), "product")


def pushforward_measure(mu: QuadratureMeasure, space: SpaceModel) -> QuadratureMeasure:
    """Push mu forward through the declared base map rho: X -> Z.

    Node weights are preserved; on disjoint unions, images that coincide in
    chart coordinates (within 1e-12) have their weights merged.
    """
    if space.base_map is None:
        raise UnsupportedSpaceError("space has no base map")
    base = SpaceModel.sphere()
    if space.base_map == FIRST_FACTOR:
        nodes = [Point(z=p.z, component=0, at_infinity=p.at_infinity) for p in mu.nodes]
        return QuadratureMeasure(nodes, mu.weights.copy(), base, "pushforward:" + mu.descriptor)
    # collapse of a disjoint union: merge coincident images
    merged: dict = {}
    order: list = []
    for p, w in zip(mu.nodes, mu.weights):
        if p.at_infinity:
            key = ("inf",)
        else:
            key = (round(p.z.real / MERGE_TOL), round(p.z.imag / MERGE_TOL))
        if key not in merged:
            merged[key] = [Point(z=p.z, component=0, at_infinity=p.at_infinity), 0.0]
            order.append(key)
        merged[key][1] += w
    nodes = [merged[k][0] for k in order]
    w = np.array([merged[k][1] for k in order])
    return QuadratureMeasure(nodes, w, base, "pushforward:" + mu.descriptor)


def weak_discrepancy(mu_a: QuadratureMeasure, mu_b: QuadratureMeasure, M: int) -> float:
    """Max deviation of chart moments z^a zbar^b, 0 <= a,b <= M, per component.

    This is the artifact's weak-convergence test metric.  Moments are taken in
    the raw affine chart; each deviation is divided by max(1, |m_a|, |m_b|),
    so order-one moments are compared absolutely while large chart moments
    (measures reaching far into the chart) are compared relatively.
    Symmetric, and zero iff all tested moments agree.
    """
    if M < 1:
        raise InvalidArgumentError("M must be >= 1")
    ca, cb = mu_a.components(), mu_b.components()
    if ca != cb:
        raise InvalidArgumentError("component sets differ: %r vs %r" % (ca, cb))
    worst = 0.0
    for comp in ca:
        for a in range(M + 1):
            for b in range(M + 1):
                ma = mu_a.moment(a, b, comp)
                mb = mu_b.moment(a, b, comp)
                d = abs(ma - mb) / max(1.0, abs(ma), abs(mb))
                if d > worst:
                    worst = d
    return worst
