"""Continuous metric weights on O(d) over the sphere models.

Conventions (fixed once, used everywhere):

* a metric is h = e^{-2 phi} in the z-frame of the affine chart; phi is the
  "weight";
* admissibility means phi - (d/2) log(1+|z|^2) is bounded, so the metric
  extends continuously across infinity;
* the frame value at infinity of a weight is  phi_inf = lim (phi - d log|z|),
  the number entering the leading-coefficient rule for section norms;
* the radial profile of a rotation-invariant weight is phi~(t) = phi(e^t).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .errors import InvalidArgumentError, NotRadialError, UnsupportedSpaceError
from .geometry import Point, SpaceModel

RADIAL_TOL = 1e-10


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radial profile phi~(t), t = log|z|, with growth degree d."""

    t_grid: tuple
    values: tuple
    degree: int

    def __call__(self, t):
        return np.interp(t, self.t_grid, self.values)


class Weight:
    """Base class; subclasses define phi per component in the affine chart."""

    degree: int = 1

    def phi(self, z: complex, component: int = 0) -> float:
        raise NotImplementedError

    def phi_infinity(self, component: int = 0) -> float:
        """lim_{z->inf} phi(z) - d*log|z| (the frame limit at infinity)."""
        r = 1e8
        return self.phi(complex(r, 0.0), component) - self.degree * math.log(r)

    def phi_at(self, p: Point) -> float:
        if p.at_infinity:
            raise InvalidArgumentError("phi_at is chart-only; use phi_infinity")
        return self.phi(p.z, p.component)

    def is_radial(self, probe_radii=None, tol: float = RADIAL_TOL) -> bool:
        """Probe rotation invariance on 8 circles."""
        if probe_radii is None:
            probe_radii = (0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.5, 4.0)
        th = 2.0 * np.pi * np.arange(16) / 16
        for r in probe_radii:
            vals = [self.phi(r * complex(math.cos(t), math.sin(t))) for t in th]
            if max(vals) - min(vals) > tol:
                return False
        return True

    def to_json(self) -> str:
        return json.dumps(self._payload())

    def _payload(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FSWeight(Weight):
    """The Fubini-Study weight (d/2) log(1+|z|^2) on every component."""

    degree: int = 1

    def phi(self, z: complex, component: int = 0) -> float:
        return 0.5 * self.degree * math.log1p(abs(z) ** 2)

    def phi_infinity(self, component: int = 0) -> float:
        return 0.0

    def _payload(self):
        return {"variant": "fs", "degree": self.degree}


@dataclass(frozen=True)
class PaperDiskWeight(Weight):
    """The disk weight: |sigma(z)| = (|z|+1)/2 on the closed unit disk.

    In the z-frame this is phi(z) = -log((|z|+1)/2) for |z| <= 1.  Outside the
    disk the weight is only pinned up to continuity; here it is matched to the
    FS weight with a C^0 blend on 1 <= |z| <= 2 and equals the FS weight for
    |z| >= 2.  Degree is 1.
    """

    degree: int = 1

    def phi(self, z: complex, component: int = 0) -> float:
        r = abs(z)
        if r <= 1.0:
            return -math.log(0.5 * (r + 1.0))
        fs = 0.5 * math.log1p(r * r)
        fs1 = 0.5 * math.log(2.0)
        if r <= 2.0:
            return fs - (2.0 - r) * fs1
        return fs

    def phi_infinity(self, component: int = 0) -> float:
        return 0.0

    def _payload(self):
        return {"variant": "paper-disk"}


@dataclass(frozen=True)
class RadialProfileWeight(Weight):
    """A weight given by an interpolated radial profile (extended by slopes)."""

    profile: RadialProfile
    degree: int = 1

    def __post_init__(self):
        if self.degree != self.profile.degree:
            raise InvalidArgumentError("profile degree mismatch")

    def phi(self, z: complex, component: int = 0) -> float:
        r = abs(z)
        t0, t1 = self.profile.t_grid[0], self.profile.t_grid[-1]
        if r <= 0.0:
            t = t0
        else:
            t = math.log(r)
        if t <= t0:
            # extend flat-left using the first chord slope clamped to >= 0
            s = max(0.0, (self.profile.values[1] - self.profile.values[0])
                    / (self.profile.t_grid[1] - self.profile.t_grid[0]))
            return float(self.profile.values[0] + s * (t - t0))
        if t >= t1:
            # extend right with slope d: admissibility requires phi - d*t to
            # stay bounded, and convex profiles have chord slopes <= d anyway
            return float(self.profile.values[-1] + self.degree * (t - t1))
        return float(self.profile(t))

    def phi_infinity(self, component: int = 0) -> float:
        return float(self.profile.values[-1]
                     - self.degree * self.profile.t_grid[-1])

    def _payload(self):
        return {"variant": "radial-profile", "degree": self.degree,
                "t_grid": list(self.profile.t_grid), "values": list(self.profile.values)}


@dataclass(frozen=True)
class GridWeight(Weight):
    """A weight sampled on a planar grid with bilinear interpolation.

    Outside the grid box the weight falls back to the FS weight plus the
    boundary offset (kept continuous along rays only approximately; intended
    for weights whose interesting behavior lies inside the box).
    """

    x_grid: tuple
    y_grid: tuple
    values: tuple   # row-major, len(x_grid) * len(y_grid)
    degree: int = 1

    def phi(self, z: complex, component: int = 0) -> float:
        xs, ys = np.asarray(self.x_grid), np.asarray(self.y_grid)
        v = np.asarray(self.values).reshape(len(xs), len(ys))
        x, y = z.real, z.imag
        if xs[0] <= x <= xs[-1] and ys[0] <= y <= ys[-1]:
            i = min(np.searchsorted(xs, x, "right") - 1, len(xs) - 2)
            j = min(np.searchsorted(ys, y, "right") - 1, len(ys) - 2)
            tx = (x - xs[i]) / (xs[i + 1] - xs[i])
            ty = (y - ys[j]) / (ys[j + 1] - ys[j])
            return float((1 - tx) * (1 - ty) * v[i, j] + tx * (1 - ty) * v[i + 1, j]
                         + (1 - tx) * ty * v[i, j + 1] + tx * ty * v[i + 1, j + 1])
        return 0.5 * self.degree * math.log1p(abs(z) ** 2)

    def _payload(self):
        return {"variant": "grid", "degree": self.degree, "x_grid": list(self.x_grid),
                "y_grid": list(self.y_grid), "values": list(self.values)}


# ------------------------------------------------------------------ families

@dataclass(frozen=True)
class Direction:
    """A bounded continuous direction function for weight families.

    fn maps (z, component) -> real on the base or total space.  For product
    spaces fn receives the fiber coordinate through `fiber_fn` instead.
    """

    fn: object                    # callable (z, component) -> float
    bound: float = 1.0
    label: str = "direction"

    def __call__(self, z: complex, component: int = 0) -> float:
        return float(self.fn(z, component))


def constant_direction(c: float = 1.0) -> Direction:
    return Direction(lambda z, comp=0: c, abs(c), "constant(%g)" % c)


@dataclass(frozen=True)
class ShiftedWeight(Weight):
    """phi_t = phi + t * f for a bounded direction f."""

    base: Weight
    direction: Direction
    t: float

    @property
    def degree(self):
        return self.base.degree

    def phi(self, z: complex, component: int = 0) -> float:
        return self.base.phi(z, component) + self.t * self.direction(z, component)

    def phi_infinity(self, component: int = 0) -> float:
        # bounded directions are assumed to stabilize along |z| -> inf
        r = 1e8
        return (self.base.phi_infinity(component)
                + self.t * self.direction(complex(r, 0.0), component))

    def _payload(self):
        return {"variant": "shifted", "t": self.t,
                "base": self.base._payload(), "direction": self.direction.label}


@dataclass(frozen=True)
class WeightFamily:
    """t -> base + t * direction; member(t) admissible for |t| <= 1."""

    base: Weight
    direction: Direction

    def member(self, t: float) -> Weight:
        return shift_weight(self, t)


def shift_weight(fam: WeightFamily, t: float) -> Weight:
    if abs(t) > 1.0:
        raise InvalidArgumentError("|t| must be <= 1")
    if not np.isfinite(fam.direction.bound):
        raise InvalidArgumentError("direction must be bounded")
    if t == 0.0:
        return fam.base
    return ShiftedWeight(fam.base, fam.direction, t)


# ------------------------------------------------------------ product weights

@dataclass(frozen=True)
class ProductDirection:
    """A direction g(z, s) on the product of two spheres.

    The fiber-odd oscillating direction is g(z, s) = f(z) * (1-|s|^2)/(1+|s|^2):
    it restricts to +f on the zero section, to -f on the infinity section, and
    satisfies |g| <= |f| everywhere.
    """

    base_fn: object              # f as callable z -> float
    label: str = "fiber-odd"

    def __call__(self, z: complex, s: complex, s_at_infinity: bool = False) -> float:
        f = float(self.base_fn(z))
        if s_at_infinity:
            return -f
        a = abs(s) ** 2
        return f * (1.0 - a) / (1.0 + a)


@dataclass(frozen=True)
class ProductWeight(Weight):
    """Weight on P1 x P1 pulled back from the first factor, shifted fiberwise:

        phi(z, s) = phi_base(z) + t * g(z, s).
    """

    base: Weight
    g: ProductDirection | None = None
    t: float = 0.0
    space: SpaceModel = field(default_factory=SpaceModel.product)

    @property
    def degree(self):
        return self.base.degree

    def phi2(self, z: complex, s: complex, s_at_infinity: bool = False) -> float:
        v = self.base.phi(z)
        if self.g is not None and self.t != 0.0:
            v += self.t * self.g(z, s, s_at_infinity)
        return v

    def phi(self, z: complex, component: int = 0) -> float:
        # restriction to the zero section, for chart probes
        return self.phi2(z, 0j)

    def _payload(self):
        return {"variant": "product", "t": self.t, "base": self.base._payload()}


@dataclass(frozen=True)
class TensorWeight(Weight):
    """phi(z, s) = phi_1(z) + phi_2(s) on the product of two spheres."""

    first: Weight
    second: Weight
    space: SpaceModel = field(default_factory=SpaceModel.product)

    @property
    def degree(self):
        return self.first.degree

    @property
    def degree2(self):
        return self.second.degree

    def phi2(self, z: complex, s: complex, s_at_infinity: bool = False) -> float:
        v2 = (self.second.phi_infinity() if s_at_infinity
              else self.second.phi(s))
        return self.first.phi(z) + v2

    def phi(self, z: complex, component: int = 0) -> float:
        return self.phi2(z, 0j)

    def _payload(self):
        return {"variant": "tensor", "first": self.first._payload(),
                "second": self.second._payload()}


@dataclass(frozen=True)
class FiberInfWeight(Weight):
    """The weight of the fiberwise-sup metric pi_* h for a product weight.

    As a metric the fiber sup is the pointwise infimum of the fiber weights;
    evaluated on a fixed fiber grid (including the zero and infinity sections).
    """

    source: ProductWeight
    fiber_grid: tuple

    @property
    def degree(self):
        return self.source.degree

    def phi(self, z: complex, component: int = 0) -> float:
        vals = [self.source.phi2(z, s) for s in self.fiber_grid]
        vals.append(self.source.phi2(z, 0j, s_at_infinity=True))
        return min(vals)

    def _payload(self):
        return {"variant": "fiber-inf", "source": self.source._payload(),
                "grid_size": len(self.fiber_grid) + 1}


def fiber_sup_weight(w: Weight, grid_size: int = 64) -> Weight:
    """pi_* h as a weight on the base sphere: inf over a fiber sample grid."""
    if not isinstance(w, ProductWeight):
        raise UnsupportedSpaceError("fiber_sup_weight needs a product weight")
    # fiber samples: FS-uniform radii (including 0) plus the infinity section
    n = max(2, grid_size - 1)
    u = np.arange(n) / n
    radii = np.sqrt(u / np.maximum(1.0 - u, 1e-16))
    grid = tuple(complex(r, 0.0) for r in radii)
    return FiberInfWeight(w, grid)


# ----------------------------------------------------------------- section norms

def eval_section_norm(w: Weight, coeffs, x: Point, k: int) -> float:
    """Frame-weighted length |s(x)|_{h^k} of the section with given coefficients.

    `coeffs` are raw monomial coefficients of a polynomial of degree <= k*d.
    At infinity the value is |leading coefficient| * e^{-k*phi_inf}.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = k * w.degree
    if coeffs.shape != (deg + 1,):
        raise InvalidArgumentError("expected %d coefficients" % (deg + 1))
    if x.at_infinity:
        return float(abs(coeffs[-1]) * math.exp(-k * w.phi_infinity(x.component)))
    z = x.z
    p = complex(coeffs[-1])
    for c in coeffs[-2::-1]:
        p = p * z + c
    return float(abs(p) * math.exp(-k * w.phi(z, x.component)))


def radial_profile(w: Weight, t_grid) -> RadialProfile:
    """Sample the radial profile phi~(t); errors if the weight is not radial."""
    if not w.is_radial():
        raise NotRadialError("weight fails the 8-circle radiality probe")
    t_grid = tuple(float(t) for t in t_grid)
    vals = tuple(w.phi(complex(math.exp(t), 0.0)) for t in t_grid)
    return RadialProfile(t_grid, vals, w.degree)


def weight_from_json(text: str) -> Weight:
    d = json.loads(text)
    v = d["variant"]
    if v == "fs":
        return FSWeight(int(d["degree"]))
    if v == "paper-disk":
        return PaperDiskWeight()
    if v == "radial-profile":
        return RadialProfileWeight(RadialProfile(tuple(d["t_grid"]), tuple(d["values"]),
                                                 int(d["degree"])), int(d["degree"]))
    if v == "grid":
        return GridWeight(tuple(d["x_grid"]), tuple(d["y_grid"]), tuple(d["values"]),
                          int(d["degree"]))
    raise InvalidArgumentError("cannot deserialize weight variant %r" % v)
