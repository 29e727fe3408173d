"""Radial Monge-Ampere measures, kappa-energy differences, volume ratios.

Sign conventions, fixed once for the whole module: metrics are h = e^{-2 phi}
times the chart frame, potentials psi denote (envelope) weights in the chart
frame, and

    kappa_energy_diff(env0, env1).value
        = (1/(2(kappa+1) fd)) * sum_i components_i,
    components_i = 2 * fd * integral (psi0 - psi1) dMA_i,

so that for kappa = 1 the value is (1/2) * int (psi0 - psi1) d(MA0 + MA1).
With this orientation the value is the limit of

    (1/k^{kappa+1}) * (1/2) * (logdet G1 - logdet G0),

i.e. of the normalized per-complex-dimension log volume ratio
log v(Ball(Hilb0)) / v(Ball(Hilb1)).  A constant shift psi1 = psi0 + c gives
value = -c * d exactly (d = bundle degree).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .envelopes import (EnvelopeGrid, _default_bm_measure, _region_t_mask,
                        radial_envelope_oracle)
from .errors import DegenerateGramError, InvalidArgumentError, InvalidEnvelopeError
from .geometry import QuadratureMeasure, SampleSet
from .norms import GramMatrix, gram_matrix
from .series import SeriesSpec
from .weights import Direction, Weight, WeightFamily, radial_profile, shift_weight


@dataclass
class MAMeasure1D:
    """Radial Monge-Ampere measure: atoms at t-positions with masses >= 0.

    Masses are the increments of the left derivative of the convex potential;
    the slope deficits at the ends of the grid are assigned to the boundary
    nodes (interior side).
    """

    positions: np.ndarray
    masses: np.ndarray
    degree: int

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def integral(self, values_on_grid: np.ndarray, t_grid: np.ndarray) -> float:
        v = np.interp(self.positions, t_grid, values_on_grid)
        return float(np.dot(self.masses, v))

    def integrate_fn(self, f) -> float:
        return float(sum(m * f(math.exp(t))
                         for t, m in zip(self.positions, self.masses)))

    def interior_masses(self) -> np.ndarray:
        return self.masses[1:-1]


@dataclass
class EnergyDiff:
    """Relative Monge-Ampere kappa-energy difference between two envelopes."""

    value: float
    kappa: int
    fiber_degree: int
    components: tuple


@dataclass
class VolumeRatioSeries:
    """Per-k log volume ratios with their k^{kappa+1} normalizations."""

    rows: tuple                  # (k, log_ratio, normalized)
    oracle: EnergyDiff
    error: float                 # |normalized at max k - oracle value|
    budget_note: str

    def csv(self) -> str:
        lines = ["k,log_ratio,normalized"]
        for k, lr, nr in self.rows:
            lines.append("%d,%.12g,%.12g" % (k, lr, nr))
        return "\n".join(lines) + "\n"


def ma_measure_radial(env: EnvelopeGrid, tol: float = 1e-8) -> MAMeasure1D:
    """Slope-increment measure of a convex radial potential; total mass = d."""
    t = np.asarray(env.t_grid, dtype=float)
    v = np.asarray(env.values, dtype=float)
    d = float(env.degree)
    s = np.diff(v) / np.diff(t)
    if np.min(s) < -tol or np.max(s) > d + tol:
        raise InvalidEnvelopeError("slopes leave [0, d] beyond tolerance")
    if np.min(np.diff(s)) < -tol:
        raise InvalidEnvelopeError("potential is not convex beyond tolerance")
    s = np.maximum.accumulate(np.clip(s, 0.0, d))
    masses = np.empty(len(t))
    masses[0] = s[0]
    masses[1:-1] = np.diff(s)
    masses[-1] = d - s[-1]
    return MAMeasure1D(t.copy(), masses, env.degree)


def kappa_energy_diff(env0: EnvelopeGrid, env1: EnvelopeGrid, kappa: int = 1,
                      fd: int = 1, tol: float = 1e-8) -> EnergyDiff:
    """Relative kappa-energy; see the module docstring for the conventions.

    Only kappa = 1 mixtures are formed directly; product-reduced settings
    enter through fd, the fiber degree of the reduction.
    """
    fd = int(getattr(fd, "value", fd))
    if kappa != 1:
        raise InvalidArgumentError("direct energy mixtures implemented for kappa=1")
    t0 = np.asarray(env0.t_grid, dtype=float)
    t1 = np.asarray(env1.t_grid, dtype=float)
    if t0.shape != t1.shape or np.max(np.abs(t0 - t1)) > 1e-12:
        raise InvalidArgumentError("envelope grids do not match")
    diff = np.asarray(env0.values, float) - np.asarray(env1.values, float)
    comps = []
    for env in (env0, env1):
        ma = ma_measure_radial(env, tol)
        comps.append(2.0 * fd * float(np.dot(ma.masses, diff)))
    value = sum(comps) / (2.0 * (kappa + 1) * fd)
    return EnergyDiff(value, kappa, fd, tuple(comps))


def volume_log_ratio(G0: GramMatrix, G1: GramMatrix) -> float:
    """log v(Ball(G0)) / v(Ball(G1)) = logdet G1 - logdet G0 (common basis)."""
    if G0.entries.shape != G1.entries.shape:
        raise InvalidArgumentError("Grams must share a basis")
    out = 0.0
    for G, sgn in ((G1, 1.0), (G0, -1.0)):
        s, ld = np.linalg.slogdet(G.entries)
        if s <= 0:
            raise DegenerateGramError("non-positive determinant")
        out += sgn * ld
    return float(out)


def volume_ratio_limit_check(spec: SeriesSpec, w0: Weight, w1: Weight,
                             K: SampleSet, k_list, kappa: int = 1, fd: int = 1,
                             mu: QuadratureMeasure | None = None,
                             t_grid=None) -> VolumeRatioSeries:
    """Normalized log volume ratios of Hilbert unit balls vs the energy oracle.

    Hilbert balls of a Bernstein-Markov measure on K stand in for the sup
    balls; the substitution shifts each log volume by O(k^kappa log k), which
    is subleading against the k^{kappa+1} normalization (the per-k distortion
    budget is reported in budget_note).  The oracle is the kappa-energy
    difference of the two radial-envelope oracles.
    """
    fd = int(getattr(fd, "value", fd))
    if mu is None:
        mu = _default_bm_measure(K, max(k_list))
    rows = []
    for k in k_list:
        G0 = gram_matrix(spec, k, w0, mu)
        G1 = gram_matrix(spec, k, w1, mu)
        # per-complex-dimension volume: half the basis-space log ratio
        lr = 0.5 * volume_log_ratio(G0, G1)
        rows.append((int(k), lr, lr / float(k) ** (kappa + 1)))
    if t_grid is None:
        t_grid = np.linspace(-6.0, 2.5, 341)
    region = K.descriptor
    env0 = radial_envelope_oracle(radial_profile(w0, t_grid), region)
    env1 = radial_envelope_oracle(radial_profile(w1, t_grid), region)
    oracle = kappa_energy_diff(env0, env1, kappa, fd)
    err = abs(rows[-1][2] - oracle.value)
    kmax = max(k_list)
    note = ("Hilb-for-sup substitution: log-volume shift O(k^%d log k); "
            "at k=%d the normalization k^%d leaves a budget O(log k / k) "
            "= %.3g" % (kappa, kmax, kappa + 1, math.log(kmax) / kmax))
    return VolumeRatioSeries(tuple(rows), oracle, float(err), note)


# ------------------------------------------------------------ derivative scans

@dataclass(frozen=True)
class PushedKinkFamily:
    """First-factor pushforward of a fiber-odd product family.

    A product direction g(z, s) restricting to +f/-f on the zero/infinity
    sections pushes (through the fiberwise envelope) to the base family
    phi + |t| * f, which is the source of one-sided differentiability.
    Requires f >= 0 on the base.
    """

    base: Weight
    direction: Direction

    def member(self, t: float) -> Weight:
        return shift_weight(WeightFamily(self.base, self.direction), abs(t))


@dataclass
class DerivativeScan:
    samples: tuple               # (t, E(t)) rows
    slope_plus: float
    slope_minus: float
    mu_integral: float           # int f d mu_eq at t = 0

    @property
    def kink_gap(self) -> float:
        return abs(self.slope_plus - self.slope_minus)

    def csv(self) -> str:
        lines = ["t,energy"]
        for t, e in self.samples:
            lines.append("%.12g,%.12g" % (t, e))
        return "\n".join(lines) + "\n"


def energy_derivative_scan(spec: SeriesSpec, fam, K: SampleSet,
                           t_grid, kappa: int = 1, fd: int = 1,
                           h: float = 0.02) -> DerivativeScan:
    """One-sided derivatives of t -> E(envelope(fam(t)), envelope(fam(0))).

    Envelopes come from the radial convexification oracle over K; one-sided
    slopes at 0 use Richardson extrapolation from |t| in {h, 2h}.  The
    equilibrium reference int f d mu_eq is evaluated against the MA measure
    of the t = 0 envelope.
    """
    region = K.descriptor
    t_grid = np.asarray(t_grid, dtype=float)

    def env_at(t):
        w = fam.member(t)
        return radial_envelope_oracle(radial_profile(w, t_grid), region)

    env0 = env_at(0.0)
    ts = (-2 * h, -h, 0.0, h, 2 * h)
    samples = []
    evals = {}
    for t in ts:
        e = 0.0 if t == 0.0 else kappa_energy_diff(env_at(t), env0, kappa, fd).value
        evals[t] = e
        samples.append((t, e))
    slope_plus = (4.0 * evals[h] - evals[2 * h]) / (2.0 * h)
    slope_minus = -(4.0 * evals[-h] - evals[-2 * h]) / (2.0 * h)
    ma0 = ma_measure_radial(env0)
    f = fam.direction
    mu_int = ma0.integrate_fn(lambda r: f(complex(r, 0.0)))
    return DerivativeScan(tuple(samples), float(slope_plus),
                          float(slope_minus), float(mu_int))


# ------------------------------------------------------- dimension-type bounds

def kappa_dimension_bound(env: EnvelopeGrid):
    """Slope-range count of the envelope vs its MA numeric dimension.

    Returns (kappa_w, nd, kappa_w <= nd): kappa_w = 1 iff the envelope's
    slope range is nontrivial (the induced graded series has linear dimension
    growth), nd = 1 iff the MA measure carries interior atoms.
    """
    ma = ma_measure_radial(env, tol=1e-6)
    v = np.asarray(env.values, float)
    t = np.asarray(env.t_grid, float)
    s = np.diff(v) / np.diff(t)
    kappa_w = 1 if (np.max(s) - np.min(s)) > 1e-10 else 0
    nd = 1 if np.any(ma.interior_masses() > 1e-10) else 0
    return kappa_w, nd, kappa_w <= nd
