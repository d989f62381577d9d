import numpy as np
import pytest
from pydantic import ValidationError

from slpca.models.spline_basis import BSplineBasis
from slpca.services.spline_service import (
    basis_matrix,
    bases_for,
    design_matrix,
    eval_basis,
    make_basis,
)
from slpca.utils.errors import ParameterRangeError


class TestMakeBasis:
    def test_piecewise_constant(self):
        basis = make_basis(0, 2, 0.0, 1.0)
        np.testing.assert_allclose(basis.knots, [0.0, 0.5, 1.0])
        np.testing.assert_allclose(eval_basis(basis, 0.25), [1, 0])
        np.testing.assert_allclose(eval_basis(basis, 0.75), [0, 1])

    def test_bernstein_limit(self):
        basis = make_basis(3, 4, 0.0, 1.0)
        np.testing.assert_allclose(basis.knots, [0, 0, 0, 0, 1, 1, 1, 1])

    def test_uniform_interior_knots(self):
        basis = make_basis(3, 7, -1.0, 1.0)
        np.testing.assert_allclose(basis.knots[4:7], [-0.5, 0.0, 0.5])
        assert basis.knots.size == 7 + 3 + 1

    @pytest.mark.parametrize("degree,m,lo,hi", [(3, 3, 0.0, 1.0), (-1, 2, 0.0, 1.0), (1, 3, 1.0, 1.0)])
    def test_invalid_arguments(self, degree, m, lo, hi):
        with pytest.raises(ParameterRangeError):
            make_basis(degree, m, lo, hi)

    def test_unclamped_knots_rejected(self):
        with pytest.raises(ValidationError):
            BSplineBasis(degree=1, num_basis=2, knots=[0.0, 0.1, 1.0, 1.0], lo=0.0, hi=1.0)


class TestEvalBasis:
    def test_bernstein_endpoint(self):
        np.testing.assert_allclose(eval_basis(make_basis(3, 4, 0.0, 1.0), 0.0), [1, 0, 0, 0])

    def test_bernstein_midpoint(self):
        values = eval_basis(make_basis(3, 4, 0.0, 1.0), 0.5)
        np.testing.assert_allclose(values, [0.125, 0.375, 0.375, 0.125], atol=1e-14)

    @pytest.mark.parametrize("degree,m", [(0, 3), (1, 4), (2, 5), (3, 9)])
    def test_upper_endpoint(self, degree, m):
        values = eval_basis(make_basis(degree, m, -2.0, 3.0), 3.0)
        expected = np.zeros(m)
        expected[-1] = 1.0
        np.testing.assert_allclose(values, expected, atol=1e-14)

    def test_partition_of_unity_and_nonnegativity(self):
        basis = make_basis(3, 8, -3.0, 2.0)
        B = basis_matrix(basis, np.linspace(-3.0, 2.0, 57))
        assert np.all(B >= -1e-15)
        np.testing.assert_allclose(B.sum(axis=1), 1.0, atol=1e-12)

    @pytest.mark.parametrize("degree,m", [(0, 4), (1, 5), (2, 6), (3, 4), (3, 12)])
    def test_local_support_and_unity_at_random_points(self, rng, degree, m):
        basis = make_basis(degree, m, -1.5, 4.0)
        B = basis_matrix(basis, rng.uniform(-1.5, 4.0, 1000))
        assert np.all(np.count_nonzero(B, axis=1) <= degree + 1)
        assert np.max(np.abs(B.sum(axis=1) - 1.0)) < 1e-10

    def test_outside_domain_is_clamped(self):
        basis = make_basis(3, 6, 0.0, 1.0)
        np.testing.assert_allclose(eval_basis(basis, -5.0), eval_basis(basis, 0.0))
        np.testing.assert_allclose(eval_basis(basis, 7.0), eval_basis(basis, 1.0))


class TestDesignMatrix:
    def test_indicator_rows(self):
        basis = make_basis(0, 2, 0.0, 1.0)
        S = design_matrix([basis], np.array([[0.25], [0.75]]))
        np.testing.assert_allclose(S, [[1, 1, 0], [1, 0, 1]])

    def test_width_and_row_sums(self, rng):
        X = rng.standard_normal((30, 2))
        bases = bases_for(X, 4, 3)
        S = design_matrix(bases, X)
        assert S.shape == (30, 9)
        np.testing.assert_allclose(S.sum(axis=1), 3.0, atol=1e-12)

    def test_bases_span_the_data(self, rng):
        X = rng.standard_normal((25, 3))
        for j, basis in enumerate(bases_for(X, 5, 3)):
            assert basis.lo == X[:, j].min()
            assert basis.hi == X[:, j].max()

    def test_constant_coordinate(self):
        with pytest.raises(ParameterRangeError):
            bases_for(np.ones((5, 1)), 4, 3)
