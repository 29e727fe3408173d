"""Norms on graded pieces W_k: Hilbert (Gram) norms and sampled sup-norms.

The monomial basis is pre-scaled by the Fubini-Study diagonal normalization

    e_a = z^a * sqrt((N+1) * binom(N, a)),        N = k*d (per factor),

so that the Gram of the full series against (FS weight, normalized FS area)
is the identity; all Grams here are formed in this scaled basis, which keeps
condition numbers moderate far beyond k = 100.  Kernel diagonals and FS
values are basis-independent, so the scaling is invisible downstream; sup
norms accept raw monomial coefficients and do their own bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import math

import numpy as np
from scipy.special import gammaln

from .errors import (DegenerateGramError, EmptySeriesError,
                     InvalidArgumentError)
from .geometry import Point, QuadratureMeasure, SampleSet
from .series import BasisList, SeriesSpec, dims_and_basis
from .weights import ProductWeight, TensorWeight, Weight


def _log_binom(n: int, a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return gammaln(n + 1) - gammaln(a + 1) - gammaln(n - a + 1)


def basis_scales(spec: SeriesSpec, basis: BasisList, k: int) -> np.ndarray:
    """FS-diagonal scaling factors per basis exponent (log-safe)."""
    exps = np.array(basis.exponents, dtype=float)
    if exps.size == 0:
        raise EmptySeriesError("empty basis at k=%d" % k)
    rank = exps.shape[1]
    logs = np.zeros(len(exps))
    # twisted variants (symmetric powers) carry exponents up to the full
    # line-bundle degree of the graded piece, not just k * base degree
    d = spec.line_bundle_degree
    for i in range(rank):
        n = k * d
        logs += 0.5 * (math.log(n + 1) + _log_binom(n, exps[:, i]))
    return logs  # log of the scale factors


def evaluation_matrix(spec: SeriesSpec, basis: BasisList, w: Weight, k: int,
                      points) -> np.ndarray:
    """Frame-weighted scaled-monomial values: V[a, j] = e_a(x_j) * e^{-k phi(x_j)}.

    Handles points at infinity through the leading-coefficient frame rule and
    divisor-shift series through their fixed section factor.
    """
    exps = np.array(basis.exponents, dtype=np.int64)
    m = len(exps)
    rank = exps.shape[1]
    log_scale = basis_scales(spec, basis, k)
    V = np.zeros((m, len(points)), dtype=complex)
    d = spec.line_bundle_degree
    shift_root = getattr(spec, "shift_root", 0j)
    mult = spec.shift_mult * k if spec.variant == "divisor-shift" else 0
    # top chart exponent of the basis: divisor shifts keep the base box (the
    # fixed section factor lives outside the exponent list)
    top = k * (spec.degree if spec.variant == "divisor-shift"
               else spec.line_bundle_degree)
    for j, p in enumerate(points):
        if p.at_infinity:
            # only the top chart exponent survives in the infinity frame
            phi_inf = w.phi_infinity(p.component)
            sel = exps[:, 0] == top
            V[sel, j] = np.exp(log_scale[sel] - k * phi_inf)
            continue
        if rank == 2:
            z1, z2 = p.z, (p.z2 if p.z2 is not None else 0j)
            if isinstance(w, (TensorWeight, ProductWeight)):
                phi = w.phi2(z1, z2, p.at_infinity2)
            else:
                phi = w.phi(z1, p.component)
            logmag = np.where(exps[:, 0] > 0,
                              exps[:, 0] * _safe_log_abs(z1), 0.0) \
                + np.where(exps[:, 1] > 0, exps[:, 1] * _safe_log_abs(z2), 0.0)
            phase = exps[:, 0] * np.angle(z1) + exps[:, 1] * np.angle(z2)
            dead = ((exps[:, 0] > 0) & (z1 == 0)) | ((exps[:, 1] > 0) & (z2 == 0))
        else:
            z = p.z
            if isinstance(w, (TensorWeight, ProductWeight)):
                phi = w.phi2(z, p.z2 if p.z2 is not None else 0j, p.at_infinity2)
            else:
                phi = w.phi(z, p.component)
            logmag = np.where(exps[:, 0] > 0, exps[:, 0] * _safe_log_abs(z), 0.0)
            phase = exps[:, 0] * np.angle(z)
            dead = (exps[:, 0] > 0) & (z == 0)
        vals = np.exp(logmag + log_scale - k * phi + 1j * phase)
        vals[dead] = 0.0
        if mult:
            vals *= (p.z - shift_root) ** mult
        V[:, j] = vals
    return V


def _safe_log_abs(z: complex) -> float:
    a = abs(z)
    return math.log(a) if a > 0 else -745.0


@dataclass
class GramMatrix:
    """Hermitian Gram of the scaled monomial basis under (weight, quadrature)."""

    k: int
    basis: BasisList
    entries: np.ndarray
    spec: SeriesSpec
    weight: Weight
    measure: QuadratureMeasure

    @property
    def dim(self) -> int:
        return self.basis.dim

    def to_json(self) -> str:
        e = self.entries
        return json.dumps({
            "k": self.k,
            "exponents": [list(x) for x in self.basis.exponents],
            "entries": [[[e[i, j].real, e[i, j].imag] for j in range(e.shape[1])]
                        for i in range(e.shape[0])],
        })


@dataclass
class OrthoBasis:
    """Columns of C express a Hilb-orthonormal basis in the scaled monomials."""

    C: np.ndarray
    gram: GramMatrix
    min_pivot: float
    max_pivot: float

    @property
    def condition(self) -> float:
        return self.max_pivot / self.min_pivot


@dataclass
class SupSampled:
    """A sampled sup-norm handle Ban_k^inf(K, h) on W_k."""

    sample_set: SampleSet
    weight: Weight
    k: int
    spec: SeriesSpec

    @property
    def basis(self) -> BasisList:
        return dims_and_basis(self.spec, self.k)


def gram_matrix(spec: SeriesSpec, k: int, w: Weight,
                mu: QuadratureMeasure) -> GramMatrix:
    """Hilb_k Gram:  G_ab = sum_j mu_j e_a(x_j) conj(e_b(x_j)) e^{-2k phi(x_j)}."""
    basis = dims_and_basis(spec, k)
    if basis.dim == 0:
        raise EmptySeriesError("W_%d = 0" % k)
    V = evaluation_matrix(spec, basis, w, k, mu.nodes)
    G = (V * mu.weights) @ V.conj().T
    G = 0.5 * (G + G.conj().T)
    return GramMatrix(k, basis, G, spec, w, mu)


def orthonormalize(G: GramMatrix) -> OrthoBasis:
    """Symmetric factorization with the one-shot jitter policy.

    Eigen-decomposition of the Hermitian Gram; if the smallest pivot falls
    below 1e-14 of the largest even after a single jitter of 1e-12 * trace,
    the Gram is declared degenerate (pluripolar-like support).
    """
    A = G.entries
    dg = np.real(np.diag(A)).copy()
    if np.any(dg <= 0.0):
        raise DegenerateGramError("nonpositive diagonal entry")
    # diagonal equilibration (an exact basis change, invisible to any
    # basis-independent quantity) removes the weight-dependent dynamic range
    D = dg**-0.5
    A = A * np.outer(D, D)
    A = 0.5 * (A + A.conj().T)
    lam, U = np.linalg.eigh(A)
    if lam[0] < 1e-14 * lam[-1]:
        jit = 1e-12 * np.trace(A).real
        A = A + jit * np.eye(A.shape[0])
        lam, U = np.linalg.eigh(A)
        if lam[0] < 1e-14 * lam[-1] or lam[0] < 2.0 * jit:
            # the smallest pivot is dominated by the jitter: truly singular
            raise DegenerateGramError(
                "pivot ratio %.3e below threshold" % (lam[0] / lam[-1]))
    C = (U * (lam**-0.5)) * D[:, None]
    return OrthoBasis(C, G, float(lam[0]), float(lam[-1]))


def hilb_norm(G: GramMatrix, coeffs_scaled) -> float:
    c = np.asarray(coeffs_scaled, dtype=complex)
    return float(np.sqrt(np.real(np.vdot(c, G.entries @ c))))


def raw_to_scaled(spec: SeriesSpec, basis: BasisList, k: int, raw) -> np.ndarray:
    """Convert raw monomial coefficients (basis order) to scaled-basis ones."""
    raw = np.asarray(raw, dtype=complex)
    return raw * np.exp(-basis_scales(spec, basis, k))


def sup_norm_eval(h: SupSampled, coeffs) -> float:
    """Max frame-weighted value over the sample cloud (infinity included).

    `coeffs` are raw monomial coefficients in the order of the handle's basis.
    """
    basis = h.basis
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (basis.dim,):
        raise InvalidArgumentError("expected %d coefficients" % basis.dim)
    V = evaluation_matrix(h.spec, basis, h.weight, h.k, h.sample_set.points)
    scaled = raw_to_scaled(h.spec, basis, h.k, coeffs)
    vals = np.abs(scaled @ V)
    return float(np.max(vals))


def kernel_values(ob: OrthoBasis, w: Weight, pts) -> np.ndarray:
    """Frame-weighted Bergman diagonal B(x, x) at the given points."""
    g = ob.gram
    V = evaluation_matrix(g.spec, g.basis, w, g.k, pts)
    S = ob.C.conj().T @ V
    return np.sum(np.abs(S) ** 2, axis=0)


def distortion_profile(spec: SeriesSpec, k_list, w: Weight, K: SampleSet,
                       mu: QuadratureMeasure):
    """Bernstein-Markov distortions eps_k = (1/k) log sup_K sqrt(B_k)."""
    out = []
    for k in k_list:
        ob = orthonormalize(gram_matrix(spec, k, w, mu))
        B = kernel_values(ob, w, K.points)
        out.append((int(k), float(np.log(np.max(B)) / (2.0 * k))))
    return out
