import numpy as np
import pytest

from serieslab.errors import DegenerateGramError, InvalidArgumentError
from serieslab.geometry import (Point, QuadratureMeasure, circle_quadrature,
                                circle_samples, disk_quadrature,
                                fs_area_quadrature)
from serieslab.norms import (SupSampled, evaluation_matrix, gram_matrix,
                             hilb_norm, kernel_values, orthonormalize,
                             raw_to_scaled, sup_norm_eval)
from serieslab.series import SeriesSpec, dims_and_basis
from serieslab.weights import FSWeight, PaperDiskWeight


FS_MU = fs_area_quadrature(48, 64)


def test_fs_gram_is_identity():
    G = gram_matrix(SeriesSpec.full(1), 12, FSWeight(), FS_MU)
    assert np.max(np.abs(G.entries - np.eye(13))) < 1e-12


def test_orthonormalize_whitens():
    G = gram_matrix(SeriesSpec.full(1), 16, PaperDiskWeight(),
                    disk_quadrature(1.0, 32, 64))
    ob = orthonormalize(G)
    W = ob.C.conj().T @ G.entries @ ob.C
    assert np.max(np.abs(W - np.eye(G.dim))) < 1e-10


def test_orthonormalize_large_degree_stable():
    G = gram_matrix(SeriesSpec.full(1), 128, PaperDiskWeight(),
                    disk_quadrature(1.0, 48, 260))
    ob = orthonormalize(G)
    W = ob.C.conj().T @ G.entries @ ob.C
    assert np.max(np.abs(W - np.eye(G.dim))) < 1e-8


def test_degenerate_gram_raises():
    # one evaluation node cannot support a 4-dimensional space
    mu = QuadratureMeasure([Point(z=0.5 + 0j)], [1.0])
    G = gram_matrix(SeriesSpec.full(1), 3, FSWeight(), mu)
    with pytest.raises(DegenerateGramError):
        orthonormalize(G)


def test_kernel_constant_for_fs():
    k = 24
    ob = orthonormalize(gram_matrix(SeriesSpec.full(1), k, FSWeight(), FS_MU))
    pts = [Point(z=0j), Point(z=1.0 + 0.5j), Point(z=0j, at_infinity=True)]
    B = kernel_values(ob, FSWeight(), pts)
    assert np.max(np.abs(B - (k + 1))) < 1e-8 * (k + 1)


def test_kernel_basis_independent():
    rng = np.random.default_rng(3)
    ob = orthonormalize(gram_matrix(SeriesSpec.full(1), 10, PaperDiskWeight(),
                                    disk_quadrature(1.0, 24, 48)))
    pts = [Point(z=0.3 + 0.2j), Point(z=0.9 + 0j)]
    B0 = kernel_values(ob, PaperDiskWeight(), pts)
    A = rng.standard_normal((ob.C.shape[1],) * 2) \
        + 1j * rng.standard_normal((ob.C.shape[1],) * 2)
    Q, _ = np.linalg.qr(A)
    ob2 = type(ob)(ob.C @ Q, ob.gram, ob.min_pivot, ob.max_pivot)
    B1 = kernel_values(ob2, PaperDiskWeight(), pts)
    assert np.max(np.abs(B1 - B0) / B0) < 1e-10


def test_kernel_scales_inversely_with_measure():
    mu = disk_quadrature(1.0, 24, 48)
    mu2 = mu.scaled(3.0)
    pts = [Point(z=0.4 + 0.1j)]
    w = PaperDiskWeight()
    B1 = kernel_values(orthonormalize(gram_matrix(SeriesSpec.full(1), 8, w, mu)), w, pts)
    B2 = kernel_values(orthonormalize(gram_matrix(SeriesSpec.full(1), 8, w, mu2)), w, pts)
    assert B2[0] == pytest.approx(B1[0] / 3.0, rel=1e-12)


def test_subspace_kernel_dominated():
    mu = disk_quadrature(1.0, 24, 48)
    w = PaperDiskWeight()
    pts = [Point(z=r + 0j) for r in (0.2, 0.5, 0.8, 1.2)]
    B_full = kernel_values(orthonormalize(gram_matrix(SeriesSpec.full(1), 12, w, mu)), w, pts)
    B_even = kernel_values(orthonormalize(gram_matrix(SeriesSpec.even(1), 12, w, mu)), w, pts)
    assert np.all(B_even <= B_full + 1e-10)


def test_hilb_norm_matches_quadrature():
    k = 6
    spec = SeriesSpec.full(1)
    G = gram_matrix(spec, k, FSWeight(), FS_MU)
    basis = dims_and_basis(spec, k)
    raw = np.zeros(basis.dim, dtype=complex)
    raw[1] = 1.0  # the section z
    c = raw_to_scaled(spec, basis, k, raw)
    n = hilb_norm(G, c)
    # integral of |z|^2 (1+|z|^2)^{-k} against FS area, for k = 6
    z = FS_MU.chart_points()
    ref = np.sqrt(np.sum(FS_MU.weights * np.abs(z) ** 2 / (1 + np.abs(z) ** 2) ** k))
    assert n == pytest.approx(ref, rel=1e-12)


def test_sup_norm_on_circle():
    k = 5
    spec = SeriesSpec.full(1)
    h = SupSampled(circle_samples(0.5, 64), FSWeight(), k, spec)
    basis = dims_and_basis(spec, k)
    raw = np.zeros(basis.dim, dtype=complex)
    raw[2] = 1.0  # the section z^2
    val = sup_norm_eval(h, raw)
    ref = 0.25 / (1 + 0.25) ** (k / 2.0)  # |z^2| e^{-k phi_FS} at |z| = 1/2
    assert val == pytest.approx(ref, rel=1e-12)
    with pytest.raises(InvalidArgumentError):
        sup_norm_eval(h, raw[:-1])


def test_evaluation_at_infinity_uses_top_exponent():
    spec = SeriesSpec.full(1)
    k = 4
    basis = dims_and_basis(spec, k)
    V = evaluation_matrix(spec, basis, FSWeight(), k,
                          [Point(z=0j, at_infinity=True)])
    col = V[:, 0]
    assert np.count_nonzero(np.abs(col) > 0) == 1
    assert abs(col[-1]) > 0
