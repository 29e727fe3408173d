"""Fubini-Study operators, iterated envelope quantization, radial oracles.

The potential convention: an EnvelopeGrid stores samples of the chart
potential psi_k = phi - (1/k) log fs_k, where fs_k is the frame-weighted FS
metric value of the degree-k norm (for Hilbert norms fs_k = B_k(x,x)^{-1/2},
so psi_k = phi + (1/2k) log B_k).  The iterates decrease towards the envelope
potential; the limiting grid stores the envelope itself.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import linprog

from .errors import (BaseLocusError, DiscretizationError,
                     InvalidArgumentError, NotRadialError)
from .geometry import Point, QuadratureMeasure, SampleSet, disk_quadrature, circle_quadrature
from .norms import (GramMatrix, SupSampled, evaluation_matrix, gram_matrix,
                    kernel_values, orthonormalize)
from .series import SeriesSpec, dims_and_basis
from .weights import RadialProfile, RadialProfileWeight, Weight, radial_profile


@dataclass
class EnvelopeGrid:
    """Radial potential samples psi on a t-grid (t = log|z|)."""

    t_grid: np.ndarray
    values: np.ndarray           # potential psi at the grid points
    degree: int
    k_source: object             # degree of the iterate, or "limit"
    gap: float = 0.0             # last decrement magnitude across a doubling
    mode: str = "oracle"
    distortion: tuple = ()       # (k, eps_k) rows when mode = "hilb"

    def weight(self) -> RadialProfileWeight:
        prof = RadialProfile(tuple(float(t) for t in self.t_grid),
                             tuple(float(v) for v in self.values), self.degree)
        return RadialProfileWeight(prof, self.degree)

    def csv(self) -> str:
        lines = ["t,value"]
        for t, v in zip(self.t_grid, self.values):
            lines.append("%.12g,%.12g" % (t, v))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        import json
        return json.dumps({
            "k_source": self.k_source,
            "gap": self.gap,
            "mode": self.mode,
            "degree": self.degree,
            "distortion": [list(row) for row in self.distortion],
            "t_grid": [float(t) for t in self.t_grid],
            "values": [float(v) for v in self.values],
        })


# ----------------------------------------------------------------- FS values

def fs_hermitian(G: GramMatrix, w: Weight, x: Point) -> float:
    """Frame-weighted FS value of the Hilbert norm at x: 1/sqrt(B(x,x)).

    This is the minimal Hilb-norm among sections with frame value 1 at x;
    infinite (base locus) when every section vanishes at x.
    """
    ob = orthonormalize(G)
    B = float(kernel_values(ob, w, [x])[0])
    if B <= 1e-280:
        return math.inf
    return 1.0 / math.sqrt(B)


def fs_hermitian_batch(ob, w: Weight, pts) -> np.ndarray:
    B = kernel_values(ob, w, pts)
    out = np.full(len(B), np.inf)
    mask = B > 1e-280
    out[mask] = 1.0 / np.sqrt(B[mask])
    return out


def fs_sup_chebyshev(h: SupSampled, x: Point, facets: int = 16):
    """FS value of the sampled sup-norm by linear programming.

    Minimizes the max frame-weighted node value subject to frame value 1 at
    x.  Each modulus constraint is relaxed to `facets` half-planes (a regular
    polygon), giving the bracket [opt * cos(pi/facets), opt] around the true
    optimum; the returned value is the upper end.
    """
    if facets < 8:
        raise InvalidArgumentError("facets must be >= 8")
    basis = h.basis
    V = evaluation_matrix(h.spec, basis, h.weight, h.k, h.sample_set.points)
    v = evaluation_matrix(h.spec, basis, h.weight, h.k, [x])[:, 0]
    if np.max(np.abs(v)) <= 1e-280:
        raise BaseLocusError("all sections vanish at the evaluation point")
    m, nn = V.shape
    A, B = V.real, V.imag
    thetas = 2.0 * np.pi * np.arange(facets) / facets
    rows = []
    for th in thetas:
        ct, st = math.cos(th), math.sin(th)
        # Re(e^{-i th} w_j) <= u  for every node j
        block = np.concatenate([ct * A + st * B, -ct * B + st * A,
                                -np.ones((1, nn))], axis=0)
        rows.append(block.T)
    A_ub = np.concatenate(rows, axis=0)
    b_ub = np.zeros(A_ub.shape[0])
    A_eq = np.array([np.concatenate([v.real, -v.imag, [0.0]]),
                     np.concatenate([v.imag, v.real, [0.0]])])
    b_eq = np.array([1.0, 0.0])
    cost = np.zeros(2 * m + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * (2 * m) + [(0.0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if not res.success:
        if res.status == 2:
            raise BaseLocusError("FS linear program infeasible")
        raise RuntimeError("FS linear program failed: %s" % res.message)
    lo = float(res.fun)
    opt = lo / math.cos(math.pi / facets)
    return opt, (lo, opt)


# --------------------------------------------------------------- radial oracle

def _region_t_mask(region: str, t_grid: np.ndarray):
    """Indices of the grid belonging to the radial compact set K."""
    kind = region.partition("(")[0]
    args = region.partition("(")[2].rstrip(")")
    vals = [float(a) for a in args.split(",") if a.strip()] if args else []
    if kind == "disk":
        r = vals[0] if vals else 1.0
        return t_grid <= math.log(r) + 1e-12
    if kind == "circle":
        r = vals[0] if vals else 1.0
        tc = math.log(r)
        # nearest grid point represents the circle
        i = int(np.argmin(np.abs(t_grid - tc)))
        mask = np.zeros(len(t_grid), dtype=bool)
        mask[i] = True
        return mask
    if kind == "annulus":
        a, b = vals[0], vals[1]
        return (t_grid >= math.log(a) - 1e-12) & (t_grid <= math.log(b) + 1e-12)
    if kind in ("sphere", "all"):
        return np.ones(len(t_grid), dtype=bool)
    raise InvalidArgumentError("unknown radial region %r" % region)


def _lower_hull(ts, vs):
    """Monotone-chain lower convex hull; returns vertex indices."""
    idx = []
    for i in range(len(ts)):
        while len(idx) >= 2:
            i0, i1 = idx[-2], idx[-1]
            cross = (ts[i1] - ts[i0]) * (vs[i] - vs[i0]) \
                - (vs[i1] - vs[i0]) * (ts[i] - ts[i0])
            if cross <= 0:
                idx.pop()
            else:
                break
        idx.append(i)
    return idx


def radial_envelope_oracle(profile: RadialProfile, region: str = "disk(1)") -> EnvelopeGrid:
    """Largest convex function <= profile on K with slopes in [0, degree].

    Works on the sampled profile: builds the lower convex hull of the
    constraint points and takes the maximum over all supporting lines with
    slopes clamped to [0, d] (including the flat line at the minimum and the
    slope-d line).  Exact for piecewise-linear data.
    """
    t = np.asarray(profile.t_grid, dtype=float)
    v = np.asarray(profile.values, dtype=float)
    d = float(profile.degree)
    mask = _region_t_mask(region, t)
    if not np.any(mask):
        raise InvalidArgumentError("region misses the profile grid")
    ts, vs = t[mask], v[mask]
    hull = _lower_hull(ts, vs)
    slopes = [0.0, d]
    for a, b in zip(hull[:-1], hull[1:]):
        s = (vs[b] - vs[a]) / (ts[b] - ts[a])
        if 0.0 < s < d:
            slopes.append(s)
    env = np.full(len(t), -np.inf)
    for s in slopes:
        c = np.min(vs - s * ts)
        env = np.maximum(env, s * t + c)
    return EnvelopeGrid(t, env, profile.degree, "limit", 0.0, "oracle")


# ------------------------------------------------------------- iterated envelope

def _default_bm_measure(K: SampleSet, k_max: int) -> QuadratureMeasure:
    kind, args = K.descriptor.partition("(")[0], K.descriptor
    vals = [float(a) for a in args.partition("(")[2].rstrip(")").split(",")
            if a.strip()]
    n_t = 2 * k_max + 4
    if kind == "disk":
        return disk_quadrature(vals[0], max(48, k_max // 2), n_t)
    if kind == "circle":
        return circle_quadrature(vals[0], n_t)
    if kind == "annulus":
        raise InvalidArgumentError("provide a measure explicitly for annuli")
    return disk_quadrature(1.0, max(48, k_max // 2), n_t)


def envelope_iterate(spec: SeriesSpec, w: Weight, K: SampleSet, t_grid,
                     k_max: int, mode: str = "hilb",
                     mu: QuadratureMeasure | None = None,
                     tol: float = 1e-3, facets: int = 16) -> EnvelopeGrid:
    """Envelope quantization psi_k along k = 8, 16, ..., k_max.

    mode "sup" uses the Chebyshev LP against the sample cloud K (the direct
    transcription of the sup-norm FS operator); mode "hilb" replaces the sup
    norm by the Hilbert norm of a Bernstein-Markov measure on K and uses
    psi_k = phi + (1/2k) log B_k — the distortion profile of the substitution
    is attached to the result.  Iterates must decrease up to `tol` across
    doublings, otherwise the grids are too coarse and an error is raised.
    """
    if k_max < 8 or (k_max & (k_max - 1)) != 0:
        raise InvalidArgumentError("k_max must be a power of two >= 8")
    t_grid = np.asarray(t_grid, dtype=float)
    pts = [Point(z=complex(math.exp(t), 0.0)) for t in t_grid]
    phi = np.array([w.phi(p.z) for p in pts])
    if mode == "hilb" and mu is None:
        mu = _default_bm_measure(K, k_max)
    ks = []
    k = 8
    while k <= k_max:
        ks.append(k)
        k *= 2
    prev = None
    gap = 0.0
    distortion = []
    for k in ks:
        if mode == "hilb":
            ob = orthonormalize(gram_matrix(spec, k, w, mu))
            B = kernel_values(ob, w, pts)
            psi = phi + np.log(np.maximum(B, 1e-280)) / (2.0 * k)
            BK = kernel_values(ob, w, K.points)
            distortion.append((k, float(np.log(np.max(BK)) / (2.0 * k))))
        elif mode == "sup":
            handle = SupSampled(K, w, k, spec)
            fsv = np.empty(len(pts))
            for i, p in enumerate(pts):
                # geometric midpoint of the polygon bracket: the one-sided
                # sec(pi/facets) bias would otherwise shrink with k and read
                # as a spurious increase of the iterates
                _, (lo, hi) = fs_sup_chebyshev(handle, p, facets)
                fsv[i] = math.sqrt(lo * hi)
            psi = phi - np.log(fsv) / k
        else:
            raise InvalidArgumentError("mode must be 'sup' or 'hilb'")
        if prev is not None:
            inc = float(np.max(psi - prev))
            if inc > tol:
                raise DiscretizationError(
                    "iterate increased by %.3g > tol at k=%d" % (inc, k))
            gap = float(np.max(prev - psi))
        prev = psi
    return EnvelopeGrid(t_grid, prev, w.degree, ks[-1], gap, mode,
                        tuple(distortion))


# ----------------------------------------------------------- maximum principle

def tautological_check(w: Weight, K: SampleSet, k_list, spec: SeriesSpec | None = None,
                       n_sections: int = 24, seed: int = 11):
    """Sup-norms over K agree for the weight and its envelope (max principle).

    Compares Ban_k(K, h) with Ban_k(K, P[K, h]) on random sections; returns
    the max relative gap per k.
    """
    if spec is None:
        spec = SeriesSpec.full(w.degree)
    # step 0.05 with t = 0 on the grid: boundary radii of unit-scale regions
    # must be sampled exactly, or the envelope misses them at O(step) and the
    # error is amplified by k in the sup norms
    t_grid = np.linspace(-8.0, 6.0, 281)
    prof = radial_profile(w, t_grid)
    kind = K.descriptor.partition("(")[0]
    env = radial_envelope_oracle(prof, K.descriptor if kind in
                                 ("disk", "circle", "annulus") else "all")
    w_env = env.weight()
    rng = np.random.default_rng(seed)
    out = []
    for k in k_list:
        dim = dims_and_basis(spec, k).dim
        h0 = SupSampled(K, w, k, spec)
        h1 = SupSampled(K, w_env, k, spec)
        worst = 0.0
        from .norms import sup_norm_eval
        for _ in range(n_sections):
            c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            a = sup_norm_eval(h0, c)
            b = sup_norm_eval(h1, c)
            worst = max(worst, abs(a - b) / max(a, b))
        out.append((int(k), worst))
    return out
