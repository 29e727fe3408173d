import numpy as np
import pytest

from serieslab.errors import InvalidArgumentError
from serieslab.geometry import SpaceModel
from serieslab.series import (SeriesSpec, UnsupportedSeriesError,
                              closure_spec, dim_sequence, dims_and_basis,
                              fiber_degree, fit_growth,
                              monomial_closure_and_degree, okounkov_body)


def test_full_dimensions():
    dims = dim_sequence(SeriesSpec.full(1), 12)
    assert list(dims[1:]) == [k + 1 for k in range(1, 13)]


def test_even_dimensions():
    dims = dim_sequence(SeriesSpec.even(1), 12)
    assert list(dims[1:]) == [k // 2 + 1 for k in range(1, 13)]


def test_simplex_dimensions():
    dims = dim_sequence(SeriesSpec.simplex(1), 10)
    assert list(dims[1:]) == [(k + 1) * (k + 2) // 2 for k in range(1, 11)]


def test_sym_power_matches_rescaled_base_dims():
    base = SeriesSpec.even(1)
    sym = SeriesSpec.sym_power(base, 2)
    sym_dims = dim_sequence(sym, 16)
    base_dims = dim_sequence(base, 32)
    assert all(sym_dims[k] == base_dims[2 * k] for k in range(1, 17))


def test_fit_growth_even_exact():
    fit = fit_growth(SeriesSpec.even(1), 200)
    assert fit.kappa == 1
    assert fit.vol == pytest.approx(0.5, abs=0.0)


def test_fit_growth_full():
    fit = fit_growth(SeriesSpec.full(1), 120)
    assert fit.kappa == 1
    assert fit.vol == pytest.approx(1.0, abs=1e-12)


def test_fit_growth_simplex_quadratic():
    fit = fit_growth(SeriesSpec.simplex(1), 200)
    assert fit.kappa == 2
    assert fit.vol == pytest.approx(1.0, rel=1e-12)


def test_okounkov_even():
    body = okounkov_body(SeriesSpec.even(1), 48)
    assert body.hull_dimension == 1
    assert body.generic_degree == 2
    assert body.lattice_normalized_volume() == pytest.approx(0.5, abs=1e-12)


def test_okounkov_simplex():
    body = okounkov_body(SeriesSpec.simplex(1), 24)
    assert body.hull_dimension == 2
    assert body.lattice_normalized_volume() == pytest.approx(1.0, abs=1e-12)


def test_okounkov_rejects_pullback():
    spec = SeriesSpec.pullback(SeriesSpec.full(1), SpaceModel.union(2))
    with pytest.raises(UnsupportedSeriesError):
        okounkov_body(spec, 24)
    with pytest.raises(InvalidArgumentError):
        okounkov_body(SeriesSpec.even(1), 8)


def test_closure_of_even_is_full():
    assert closure_spec(SeriesSpec.even(1)).variant == "full"


def test_closure_volume_doubles():
    spec = SeriesSpec.even(1)
    analysis = monomial_closure_and_degree(spec)
    body = okounkov_body(spec, 48)
    closed = okounkov_body(closure_spec(spec), 48)
    assert analysis.generic_degree == 2
    assert closed.lattice_normalized_volume() == pytest.approx(
        analysis.generic_degree * body.lattice_normalized_volume(), abs=1e-12)


def test_coprime_generators_have_degree_one():
    spec = SeriesSpec.monomial([(1, (0,)), (1, (3,)), (1, (5,))], 5)
    analysis = monomial_closure_and_degree(spec)
    assert analysis.generic_degree == 1


def test_fiber_degrees():
    union = SpaceModel.union(2, "collapse")
    prod = SpaceModel.product()
    assert fiber_degree(SeriesSpec.full(1)).value == 1.0
    assert fiber_degree(SeriesSpec.pullback(SeriesSpec.full(1), union)).value == 2.0
    assert fiber_degree(SeriesSpec.pullback(SeriesSpec.full(1), prod)).value == 1.0


def test_spec_json_roundtrip():
    spec = SeriesSpec.monomial([(1, (0,)), (2, (3,))], 2)
    back = SeriesSpec.from_json(spec.to_json())
    assert back == spec


def test_basis_matches_dims():
    spec = SeriesSpec.even(1)
    b = dims_and_basis(spec, 10)
    assert b.dim == 6
    assert all(e[0] % 2 == 0 for e in b.exponents)
