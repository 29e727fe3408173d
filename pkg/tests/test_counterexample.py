import numpy as np
import pytest

from serieslab.counterexample import (AnnuliPlan, build_counterexample,
                                      divergence_scan, find_annuli,
                                      pushforward_rescue)
from serieslab.errors import InvalidArgumentError
from serieslab.geometry import Point, disk_quadrature
from serieslab.norms import gram_matrix, kernel_values, orthonormalize
from serieslab.series import SeriesSpec
from serieslab.weights import PaperDiskWeight


def _small_plan():
    return find_annuli(PaperDiskWeight(), count=1, k_budget=32, n_r=64)


def test_symmetric_control_has_no_oscillation():
    # without annuli the split is (1/2, 1/2): component masses stay at 1/2
    plan = AnnuliPlan((), (), ())
    built = build_counterexample(plan, n_r=32, n_theta=64)
    rep = divergence_scan(built, k_list=[8, 16])
    for _, F in rep.rows:
        assert F == pytest.approx(0.5, abs=1e-10)
    assert rep.amplitude == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(InvalidArgumentError):
        divergence_scan(built)  # empty plan needs an explicit k_list


def test_plan_invariants():
    plan = _small_plan()
    assert len(plan.rows) == 1
    (a, b, alpha, beta) = plan.rows[0]
    assert 0.0 <= a < b <= 1.0
    assert b > 0.5  # kernel mass concentrates near the boundary
    assert alpha < beta
    assert plan.indicator(0.5 * (a + b)) == 1.0
    assert plan.indicator(b + 1e-6) == 0.0
    for m in plan.masses_a + plan.masses_c:
        assert 0.0 < m <= 1.0


def test_plan_achieved_at_larger_budget():
    plan = find_annuli(PaperDiskWeight(), count=1, k_budget=96, n_r=96)
    assert plan.achieved
    assert all(m >= 2.0 / 3.0 for m in plan.masses_a + plan.masses_c)


def test_find_annuli_rejects_bad_arguments():
    w = PaperDiskWeight()
    with pytest.raises(InvalidArgumentError):
        find_annuli(w, count=0)
    with pytest.raises(InvalidArgumentError):
        find_annuli(w, count=3, k_budget=16)


def test_measure_sandwich_and_pushforward():
    built = build_counterexample(_small_plan(), n_r=32, n_theta=64)
    lam = built.base_measure
    n = len(lam.nodes)
    w0 = built.measure.weights[:n]
    w1 = built.measure.weights[n:]
    # each split component lies between lambda/4 and 3 lambda/4 ...
    assert np.all(w0 >= 0.25 * lam.weights - 1e-14)
    assert np.all(w0 <= 0.75 * lam.weights + 1e-14)
    assert np.all(w1 >= 0.25 * lam.weights - 1e-14)
    # ... and the two components add back up to lambda exactly
    assert np.max(np.abs(w0 + w1 - lam.weights)) < 1e-14
    for i in range(0, n, 97):
        assert built.measure.nodes[i].z == lam.nodes[i].z
        assert built.measure.nodes[i].component == 0
        assert built.measure.nodes[n + i].component == 1


def test_upstairs_kernel_equals_base_kernel():
    # pullback sections take equal values on the two components, so the
    # kernel of the split measure equals the base kernel of lambda
    built = build_counterexample(_small_plan(), n_r=24, n_theta=48)
    k = 12
    ob_up = orthonormalize(gram_matrix(built.spec, k, built.weight,
                                       built.measure))
    lam = built.base_measure
    ob_dn = orthonormalize(gram_matrix(SeriesSpec.full(1), k, built.weight,
                                       lam))
    pts0 = [Point(z=z, component=0) for z in (0.3 + 0j, 0.8 + 0.1j)]
    pts1 = [Point(z=p.z, component=1) for p in pts0]
    pts_dn = [Point(z=p.z) for p in pts0]
    B0 = kernel_values(ob_up, built.weight, pts0)
    B1 = kernel_values(ob_up, built.weight, pts1)
    Bd = kernel_values(ob_dn, built.weight, pts_dn)
    assert np.max(np.abs(B0 - B1) / Bd) < 1e-10
    assert np.max(np.abs(B0 - Bd) / Bd) < 1e-10


def test_divergence_scan_oscillates():
    built = build_counterexample(_small_plan(), n_r=48, n_theta=96)
    rep = divergence_scan(built)
    ks = [k for k, _ in rep.rows]
    assert ks == sorted(set(built.plan.alphas) | set(built.plan.betas))
    for _, F in rep.rows:
        assert 0.0 <= F <= 1.0
    assert rep.max_over_alpha > 0.5  # extra mass drawn onto the annulus
    assert rep.amplitude > 0.05
    assert rep.csv().splitlines()[0] == "k,component_mass"
    with pytest.raises(InvalidArgumentError):
        divergence_scan(built, k_list=[8])  # must cover the plan's degrees


def test_pushforward_rescue_improves_with_k():
    built = build_counterexample(_small_plan(), n_r=48, n_theta=96)
    rows = pushforward_rescue(built)
    d = {r.k: r.discrepancy for r in rows}
    assert d[32] < d[8]
    assert d[32] < 0.15
