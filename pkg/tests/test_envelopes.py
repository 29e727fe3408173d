import math

import numpy as np
import pytest

from serieslab.envelopes import (EnvelopeGrid, envelope_iterate, fs_hermitian,
                                 fs_sup_chebyshev, radial_envelope_oracle,
                                 tautological_check)
from serieslab.errors import (BaseLocusError, DiscretizationError,
                              InvalidArgumentError)
from serieslab.geometry import (Point, circle_samples, disk_quadrature,
                                disk_samples, fs_area_quadrature,
                                sphere_samples)
from serieslab.norms import SupSampled, gram_matrix
from serieslab.series import SeriesSpec
from serieslab.weights import (FSWeight, PaperDiskWeight, RadialProfile,
                               radial_profile)


FS_MU = fs_area_quadrature(48, 64)


# ----------------------------------------------------------- Hermitian FS

def test_fs_hermitian_fs_case():
    k = 8
    G = gram_matrix(SeriesSpec.full(1), k, FSWeight(), FS_MU)
    for x in (Point(z=0j), Point(z=1.0 + 0.5j), Point(z=0j, at_infinity=True)):
        assert fs_hermitian(G, FSWeight(), x) == pytest.approx(
            (k + 1) ** -0.5, rel=1e-10)


def test_fs_hermitian_base_locus_is_infinite():
    # every section vanishes at the shifted divisor's root
    spec = SeriesSpec.divisor_shift(SeriesSpec.full(1), 0j, 1)
    G = gram_matrix(spec, 6, FSWeight(), FS_MU)
    assert fs_hermitian(G, FSWeight(), Point(z=0j)) == math.inf
    assert np.isfinite(fs_hermitian(G, FSWeight(), Point(z=0.5 + 0j)))


def test_fs_hermitian_one_dimensional_exact():
    # a single section (the constant): FS value = Hilb norm / frame value
    spec = SeriesSpec.monomial([(1, (0,))], 1)
    k, w = 5, PaperDiskWeight()
    mu = disk_quadrature(1.0, 24, 48)
    G = gram_matrix(spec, k, w, mu)
    assert G.dim == 1
    x = Point(z=0.7 + 0.1j)
    z = mu.chart_points()
    norm = math.sqrt(float(np.sum(
        mu.weights * np.exp(-2 * k * np.array([w.phi(zz) for zz in z])))))
    frame = math.exp(-k * w.phi(x.z))
    assert fs_hermitian(G, w, x) == pytest.approx(norm / frame, rel=1e-10)


# ----------------------------------------------------------- Chebyshev FS

def test_fs_sup_chebyshev_one_dimensional_exact():
    # single section (the constant): optimum = sup_K frame / frame at x
    spec = SeriesSpec.monomial([(1, (0,))], 1)
    k, w = 4, FSWeight()
    K = circle_samples(1.0, 32)
    h = SupSampled(K, w, k, spec)
    x = Point(z=0.5 + 0j)
    sup_frame = max(math.exp(-k * w.phi(p.z)) for p in K.points)
    frame_x = math.exp(-k * w.phi(x.z))
    opt, (lo, hi) = fs_sup_chebyshev(h, x, facets=32)
    true = sup_frame / frame_x
    assert lo <= true * (1 + 1e-9)
    assert hi >= true * (1 - 1e-9)
    assert hi / lo == pytest.approx(1.0 / math.cos(math.pi / 32), rel=1e-12)


def test_fs_sup_chebyshev_constant_is_optimal():
    # minimal sup over the unit circle with value 1 at 0 is the constant 1;
    # with the FS frame factor 2^{-k/2} on |z| = 1
    k = 2
    h = SupSampled(circle_samples(1.0, 64), FSWeight(), k, SeriesSpec.full(1))
    opt, (lo, hi) = fs_sup_chebyshev(h, Point(z=0j), facets=16)
    true = 2.0 ** (-k / 2.0)
    assert lo <= true * (1 + 1e-7) <= hi * (1 + 1e-7)
    assert abs(opt - true) / true < 0.05


def test_fs_sup_chebyshev_base_locus():
    spec = SeriesSpec.divisor_shift(SeriesSpec.full(1), 0j, 1)
    h = SupSampled(circle_samples(1.0, 16), FSWeight(), 4, spec)
    with pytest.raises(BaseLocusError):
        fs_sup_chebyshev(h, Point(z=0j))


def test_fs_sup_chebyshev_rejects_few_facets():
    h = SupSampled(circle_samples(1.0, 16), FSWeight(), 2, SeriesSpec.full(1))
    with pytest.raises(InvalidArgumentError):
        fs_sup_chebyshev(h, Point(z=0.5 + 0j), facets=4)


# ---------------------------------------------------------- radial oracle

def _grid(lo, hi, n):
    return np.linspace(lo, hi, n)


def test_oracle_disk_weight_vanishes_on_disk():
    t = _grid(-4.0, 1.0, 51)  # contains t = 0
    prof = radial_profile(PaperDiskWeight(), t)
    env = radial_envelope_oracle(prof, "disk(1)")
    assert np.max(np.abs(env.values - np.maximum(0.0, t))) < 1e-12
    # the unit section has envelope-frame value exactly 1 on the disk
    w_env = env.weight()
    for r in (0.1, 0.5, 1.0):
        assert math.exp(-w_env.phi(r + 0j)) == pytest.approx(1.0, abs=1e-12)


def test_oracle_circle_matches_disk_for_monotone_weight():
    t = _grid(-4.0, 1.0, 51)
    prof = radial_profile(PaperDiskWeight(), t)
    e1 = radial_envelope_oracle(prof, "disk(1)")
    e2 = radial_envelope_oracle(prof, "circle(1)")
    assert np.max(np.abs(e1.values - e2.values)) < 1e-12


def test_oracle_fixes_convex_profile():
    t = _grid(-5.0, 3.0, 101)
    prof = radial_profile(FSWeight(), t)
    env = radial_envelope_oracle(prof, "all")
    assert np.max(np.abs(env.values - np.array(prof.values))) < 1e-10


def test_oracle_shift_equivariance():
    t = _grid(-4.0, 1.0, 51)
    prof = radial_profile(PaperDiskWeight(), t)
    shifted = RadialProfile(prof.t_grid,
                            tuple(v + 0.7 for v in prof.values), 1)
    e0 = radial_envelope_oracle(prof, "disk(1)")
    e1 = radial_envelope_oracle(shifted, "disk(1)")
    assert np.max(np.abs(e1.values - (e0.values + 0.7))) < 1e-12


def test_oracle_rejects_empty_region():
    prof = radial_profile(FSWeight(), _grid(0.5, 1.0, 6))
    with pytest.raises(InvalidArgumentError):
        radial_envelope_oracle(prof, "disk(0.001)")


# ------------------------------------------------------- iterated envelope

def test_envelope_iterate_hilb_converges_to_oracle():
    t = _grid(-3.0, 1.0, 41)
    K = disk_samples(1.0, 16, 32)
    env = envelope_iterate(SeriesSpec.full(1), PaperDiskWeight(), K, t, 32,
                           mode="hilb")
    oracle = radial_envelope_oracle(radial_profile(PaperDiskWeight(), t),
                                    "disk(1)")
    assert env.k_source == 32
    assert env.mode == "hilb"
    assert len(env.distortion) == 3  # k = 8, 16, 32
    # iterates decrease towards the envelope from above
    assert np.min(env.values - oracle.values) > -5e-3
    assert np.max(np.abs(env.values - oracle.values)) < 0.15
    assert env.gap >= 0.0


def test_envelope_iterate_sup_fixes_fs():
    # the FS potential is its own envelope: sup-mode iterates stall at phi
    t = _grid(-2.0, 1.0, 9)
    env = envelope_iterate(SeriesSpec.full(1), FSWeight(), sphere_samples(16),
                           t, 16, mode="sup")
    phi = np.array([FSWeight().phi(complex(math.exp(tt), 0.0)) for tt in t])
    assert np.max(np.abs(env.values - phi)) < 0.02
    assert abs(env.gap) < 1e-3


def test_envelope_iterate_rejects_bad_arguments():
    t = _grid(-2.0, 0.5, 11)
    K = disk_samples(1.0, 8, 16)
    with pytest.raises(InvalidArgumentError):
        envelope_iterate(SeriesSpec.full(1), FSWeight(), K, t, 24)
    with pytest.raises(InvalidArgumentError):
        envelope_iterate(SeriesSpec.full(1), FSWeight(), K, t, 16,
                         mode="nonsense")


def test_envelope_iterate_flags_nonmonotone():
    # an impossible tolerance turns any fluctuation into a reported failure
    t = _grid(-2.0, 0.5, 11)
    K = disk_samples(1.0, 8, 16)
    with pytest.raises(DiscretizationError):
        envelope_iterate(SeriesSpec.full(1), PaperDiskWeight(), K, t, 16,
                         mode="hilb", tol=-1.0)


def test_envelope_grid_weight_and_csv():
    t = _grid(-1.0, 1.0, 21)
    env = EnvelopeGrid(t, np.maximum(0.0, t), 1, "limit")
    w = env.weight()
    assert w.phi(math.exp(0.5) + 0j) == pytest.approx(0.5, abs=1e-12)
    lines = env.csv().splitlines()
    assert lines[0] == "t,value"
    assert len(lines) == 22
    import json
    meta = json.loads(env.to_json())
    assert meta["k_source"] == "limit"
    assert meta["mode"] == "oracle" and meta["gap"] == 0.0
    assert len(meta["values"]) == 21


# ------------------------------------------------------- maximum principle

def test_tautological_sup_norms_disk():
    gaps = tautological_check(PaperDiskWeight(), disk_samples(1.0, 12, 64),
                              [8, 16])
    for _, g in gaps:
        assert g < 1e-2


def test_tautological_sup_norms_sphere():
    gaps = tautological_check(FSWeight(), sphere_samples(10), [8, 16])
    for _, g in gaps:
        assert g < 5e-3
