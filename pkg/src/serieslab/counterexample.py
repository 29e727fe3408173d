"""Two-component divergence construction and its pushforward rescue.

On the disjoint union of two spheres, sections of the pullback series take
equal values on both components, so the Bergman diagonal of any split measure
whose component sum is a fixed base measure depends only on the base point.
Splitting the mass asymmetrically on an interleaved family of annuli makes
the component masses of the normalized density oscillate with k (the kernel
concentrates on different annuli at different degrees), while the pushed-
forward density still converges to the equilibrium measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .geometry import (Point, QuadratureMeasure, SpaceModel, circle_quadrature,
                       disk_quadrature, disk_samples)
from .norms import gram_matrix, kernel_values, orthonormalize
from .series import SeriesSpec
from .weights import PaperDiskWeight, Weight


@dataclass
class AnnuliPlan:
    """Interleaved annuli (a_i, b_i) with the degree pairs (alpha_i, beta_i).

    At degree alpha_i the normalized kernel mass of A_i = {a_i <= |z| <= b_i}
    should be >= 2/3; at degree beta_i the region between b_i and the next
    annulus should capture >= 2/3.
    """

    rows: tuple                  # (a_i, b_i, alpha_i, beta_i)
    masses_a: tuple
    masses_c: tuple

    @property
    def achieved(self) -> bool:
        return all(m >= 2.0 / 3.0 for m in self.masses_a + self.masses_c)

    @property
    def alphas(self):
        return tuple(r[2] for r in self.rows)

    @property
    def betas(self):
        return tuple(r[3] for r in self.rows)

    def indicator(self, r: float) -> float:
        return 1.0 if any(a <= r <= b for a, b, _, _ in self.rows) else 0.0


def _radial_cumulative(w: Weight, lam: QuadratureMeasure, k: int):
    """Radii and cumulative normalized kernel mass of degree k on the disk."""
    spec = SeriesSpec.full(w.degree)
    ob = orthonormalize(gram_matrix(spec, k, w, lam))
    B = kernel_values(ob, w, lam.nodes)
    dens = lam.weights * B
    dens = dens / np.sum(dens)
    radii = np.array([abs(p.z) for p in lam.nodes])
    uniq = np.unique(np.round(radii, 12))
    cum = np.array([np.sum(dens[radii <= r + 1e-12]) for r in uniq])
    return uniq, cum


def find_annuli(w: PaperDiskWeight, count: int = 2, k_budget: int = 96,
                n_r: int = 128) -> AnnuliPlan:
    """Greedy interleaved annuli from the radial kernel cumulatives.

    Degrees are chosen geometrically spread within the budget and assigned
    alternately to A-annuli (alpha) and separating regions (beta); each
    boundary radius maximizes the cumulative-mass separation between the two
    adjacent degrees, which is where the captured masses are jointly largest.
    """
    if count < 1 or k_budget > 256:
        raise InvalidArgumentError("need count >= 1 and k_budget <= 256")
    pool = [k for k in (8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256)
            if k <= k_budget]
    if len(pool) < 2 * count:
        raise InvalidArgumentError("budget too small for the requested count")
    exps = [pool[0]]
    for k in pool[1:]:
        if k >= 2 * exps[-1] and len(exps) < 2 * count:
            exps.append(k)
    exps[-1] = pool[-1]
    if len(exps) < 2 * count:
        raise InvalidArgumentError("budget too small for the requested count")
    lam = disk_quadrature(1.0, n_r, 2 * max(exps) + 8)
    cums = {k: _radial_cumulative(w, lam, k) for k in exps}

    radii = cums[exps[0]][0]

    def separator(k1, k2):
        _, c1 = cums[k1]
        _, c2 = cums[k2]
        return float(radii[int(np.argmax(c1 - c2))])

    # Annuli tile [0, sep(alpha_1, beta_count)] with one-cell separating
    # gaps: the outer edge maximizes the slow-degree vs fast-degree mass
    # separation (the oscillation amplitude); interior boundaries separate
    # adjacent degree pairs.  Thin gaps mean the interior beta masses can
    # fall short of 2/3 at desk scale; the achieved masses are reported.
    rows, ma, mc = [], [], []
    a = float(radii[0]) * 0.5
    for i in range(count):
        alpha, beta = exps[2 * i], exps[2 * i + 1]
        if i + 1 < count:
            b = separator(alpha, beta)
            c_end = float(radii[np.searchsorted(radii, b + 1e-12)])
        else:
            b = separator(exps[0], beta)
            c_end = 1.0
        r, c = cums[alpha]
        mass_a = float(np.interp(b, r, c) - np.interp(a, r, c))
        r, c = cums[beta]
        mass_c = float(np.interp(c_end, r, c) - np.interp(b, r, c))
        rows.append((a, b, alpha, beta))
        ma.append(mass_a)
        mc.append(mass_c)
        a = c_end
    return AnnuliPlan(tuple(rows), tuple(ma), tuple(mc))


@dataclass
class BuiltCounterexample:
    spec: SeriesSpec
    weight: Weight
    measure: QuadratureMeasure
    plan: AnnuliPlan
    base_measure: QuadratureMeasure


def build_counterexample(plan: AnnuliPlan, n_r: int = 96,
                         n_theta: int = 200) -> BuiltCounterexample:
    """Split measures (2 +- g)/4 * lambda on the two components.

    g is the indicator sum of the plan's annuli; the two component measures
    add up to the base measure lambda (normalized disk area), so the built
    measure pushes forward to lambda and is bounded below by lambda/4.
    """
    space = SpaceModel.union(2, "collapse")
    spec = SeriesSpec.pullback(SeriesSpec.full(1), space)
    w = PaperDiskWeight()
    lam = disk_quadrature(1.0, n_r, n_theta)
    g = np.array([plan.indicator(abs(p.z)) for p in lam.nodes])
    nodes, weights = [], []
    for comp, sign in ((0, 1.0), (1, -1.0)):
        for p, lw, gv in zip(lam.nodes, lam.weights, g):
            nodes.append(Point(z=p.z, component=comp))
            weights.append(lw * (2.0 + sign * gv) / 4.0)
    mu = QuadratureMeasure(nodes, np.array(weights), space, "split-annuli")
    return BuiltCounterexample(spec, w, mu, plan, lam)


@dataclass
class OscillationReport:
    rows: tuple                  # (k, F)
    max_over_alpha: float
    min_over_beta: float

    @property
    def amplitude(self) -> float:
        return self.max_over_alpha - self.min_over_beta

    def csv(self) -> str:
        lines = ["k,component_mass"]
        for k, F in self.rows:
            lines.append("%d,%.12g" % (k, F))
        return "\n".join(lines) + "\n"


def divergence_scan(built: BuiltCounterexample, k_list=None,
                    f=None) -> OscillationReport:
    """F(k) = first-component mass of the normalized degree-k density.

    With the default f (indicator of the first component) the report carries
    the oscillation amplitude max_alpha F - min_beta F of the plan's degrees.
    """
    plan = built.plan
    if k_list is None:
        k_list = sorted(set(plan.alphas) | set(plan.betas))
    if not k_list:
        raise InvalidArgumentError("an empty plan needs an explicit k_list")
    if not (set(plan.alphas) | set(plan.betas)) <= set(k_list):
        raise InvalidArgumentError("k_list must cover the plan's degrees")
    if f is None:
        f = lambda p: 1.0 if p.component == 0 else 0.0
    mu = built.measure
    fvals = np.array([f(p) for p in mu.nodes])
    rows = []
    for k in sorted(k_list):
        ob = orthonormalize(gram_matrix(built.spec, k, built.weight, mu))
        B = kernel_values(ob, built.weight, mu.nodes)
        dens = mu.weights * B
        rows.append((int(k), float(np.dot(fvals, dens) / np.sum(dens))))
    fk = dict(rows)
    if not plan.rows:
        return OscillationReport(tuple(rows), rows[-1][1], rows[-1][1])
    return OscillationReport(tuple(rows),
                             max(fk[k] for k in plan.alphas),
                             min(fk[k] for k in plan.betas))


def pushforward_rescue(built: BuiltCounterexample, k_list=None):
    """Pushed normalized densities converge to the uniform circle measure."""
    from .bergman import convergence_scan
    if k_list is None:
        k_list = sorted(set(built.plan.alphas) | set(built.plan.betas))
    target = circle_quadrature(1.0, 256)
    K = disk_samples(1.0, 24, 48)
    return convergence_scan(built.spec, built.weight, K, built.measure,
                            sorted(k_list), target,
                            rho_space=built.measure.space)
