import numpy as np
import pytest

from serieslab.bergman import (convergence_scan, density_measure,
                               kernel_diagonal, scan_csv)
from serieslab.errors import InvalidArgumentError
from serieslab.geometry import (SpaceModel, circle_quadrature,
                                disk_quadrature, disk_samples,
                                fs_area_quadrature, sphere_samples)
from serieslab.norms import gram_matrix, orthonormalize
from serieslab.series import SeriesSpec, dims_and_basis
from serieslab.weights import FSWeight, PaperDiskWeight


def _density(spec, k, w, mu, kappa=1):
    ob = orthonormalize(gram_matrix(spec, k, w, mu))
    return density_measure(kernel_diagonal(ob, w, mu.nodes), mu, kappa)


def test_full_series_mass():
    mu = disk_quadrature(1.0, 32, 64)
    for k in (8, 16):
        dm = _density(SeriesSpec.full(1), k, PaperDiskWeight(), mu)
        assert dm.mass == pytest.approx((k + 1) / k, rel=1e-10)


def test_even_series_mass_halves():
    mu = fs_area_quadrature(48, 96)
    k = 32
    dm = _density(SeriesSpec.even(1), k, FSWeight(), mu)
    assert dm.mass == pytest.approx((k // 2 + 1) / k, rel=1e-10)


def test_trace_identity_exact():
    mu = disk_quadrature(1.0, 32, 80)
    for spec in (SeriesSpec.full(1), SeriesSpec.even(1)):
        for k in (8, 24):
            dm = _density(spec, k, PaperDiskWeight(), mu, kappa=0)
            dim = dims_and_basis(spec, k).dim
            assert dm.mass == pytest.approx(dim, rel=1e-12)


def test_density_node_mismatch():
    mu = disk_quadrature(1.0, 16, 32)
    other = disk_quadrature(1.0, 16, 34)
    ob = orthonormalize(gram_matrix(SeriesSpec.full(1), 6, FSWeight(), mu))
    ke = kernel_diagonal(ob, FSWeight(), mu.nodes)
    with pytest.raises(InvalidArgumentError):
        density_measure(ke, other, 1)


def test_fs_density_matches_fs_measure():
    mu = fs_area_quadrature(48, 96)
    K = sphere_samples(16)
    rows = convergence_scan(SeriesSpec.full(1), FSWeight(), K, mu,
                            [8, 16], mu, moment_order=4)
    for r in rows:
        assert r.discrepancy < 1e-6


def test_equilibrium_trend_small_degrees():
    mu = disk_quadrature(1.0, 32, 72)
    K = disk_samples(1.0, 16, 32)
    target = circle_quadrature(1.0, 128)
    rows = convergence_scan(SeriesSpec.full(1), PaperDiskWeight(), K, mu,
                            [8, 16, 32], target)
    d = [r.discrepancy for r in rows]
    assert d[2] < d[1] < d[0]


def test_scan_csv_format():
    mu = disk_quadrature(1.0, 16, 32)
    K = disk_samples(1.0, 8, 16)
    rows = convergence_scan(SeriesSpec.full(1), PaperDiskWeight(), K, mu,
                            [8], circle_quadrature(1.0, 64))
    text = scan_csv(rows)
    assert text.splitlines()[0] == "k,mass,discrepancy,runtime_ms"
    assert len(text.splitlines()) == 2
