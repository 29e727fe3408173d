"""Partial Bergman kernel diagonals and density-measure convergence scans."""

from __future__ import annotations

from dataclasses import dataclass
import time

import numpy as np

from .errors import InvalidArgumentError
from .geometry import (QuadratureMeasure, SampleSet, SpaceModel,
                       pushforward_measure, weak_discrepancy)
from .norms import OrthoBasis, gram_matrix, kernel_values, orthonormalize
from .series import SeriesSpec, dims_and_basis
from .weights import Weight


@dataclass
class KernelEval:
    """Frame-weighted Bergman diagonal values B_k(x, x) at chosen points."""

    k: int
    points: tuple
    values: np.ndarray
    ortho_source: OrthoBasis

    def __post_init__(self):
        if np.any(self.values < -1e-12):
            raise InvalidArgumentError("negative kernel value")


@dataclass
class DensityMeasure:
    """The density  (1/k^kappa) B_k(x,x) dmu  as a quadrature measure."""

    measure: QuadratureMeasure
    kappa: int

    @property
    def mass(self) -> float:
        return self.measure.total_mass

    def normalized(self) -> QuadratureMeasure:
        return self.measure.scaled(1.0 / self.measure.total_mass)


def kernel_diagonal(ob: OrthoBasis, w: Weight, pts) -> KernelEval:
    """B(x,x) = sum_i |s_i(x)|^2 over an orthonormal basis, frame-weighted."""
    vals = kernel_values(ob, w, pts)
    return KernelEval(ob.gram.k, tuple(pts), vals, ob)


def density_measure(ke: KernelEval, mu: QuadratureMeasure, kappa: int) -> DensityMeasure:
    if ke.points != mu.nodes:
        raise InvalidArgumentError("kernel points must be the measure nodes")
    w = mu.weights * ke.values / float(ke.k) ** kappa
    return DensityMeasure(QuadratureMeasure(mu.nodes, w, mu.space,
                                            "density(k=%d)" % ke.k), kappa)


@dataclass
class ScanRow:
    k: int
    mass: float
    discrepancy: float
    runtime_ms: float


def convergence_scan(spec: SeriesSpec, w: Weight, K: SampleSet,
                     mu: QuadratureMeasure, k_list, target: QuadratureMeasure,
                     rho_space: SpaceModel | None = None, kappa: int = 1,
                     moment_order: int = 4):
    """Bergman densities against a weak-limit target, per k.

    For each k: Gram -> orthonormal basis -> kernel on the mu nodes ->
    probability-normalized density (optionally pushed through the base map of
    rho_space) -> moment discrepancy against the target.
    """
    rows = []
    for k in k_list:
        t0 = time.perf_counter()
        ob = orthonormalize(gram_matrix(spec, k, w, mu))
        ke = kernel_diagonal(ob, w, mu.nodes)
        dm = density_measure(ke, mu, kappa)
        prob = dm.normalized()
        if rho_space is not None:
            prob = pushforward_measure(prob, rho_space)
        disc = weak_discrepancy(prob, target, moment_order)
        rows.append(ScanRow(int(k), dm.mass, float(disc),
                            1e3 * (time.perf_counter() - t0)))
    return rows


def scan_csv(rows) -> str:
    lines = ["k,mass,discrepancy,runtime_ms"]
    for r in rows:
        lines.append("%d,%.12g,%.12g,%.3f" % (r.k, r.mass, r.discrepancy, r.runtime_ms))
    return "\n".join(lines) + "\n"
