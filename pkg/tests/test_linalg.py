"""Tests for the SVD / pseudo-inverse / minimum-norm layer."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from descentlab.errors import InvalidInput
from descentlab.linalg import (
    LinearPredictor,
    fit_min_norm,
    kernel_projector,
    min_norm_solve,
    penrose_residuals,
    pseudo_inverse,
    solution_set_member,
    svd,
)
from descentlab.seeding import substream


def _random_matrix(seed, rank_deficient=False):
    rng = substream(seed, "linalg-test-matrix")
    m = int(rng.integers(1, 9))
    n = int(rng.integers(1, 9))
    if rank_deficient and min(m, n) > 1:
        r = int(rng.integers(1, min(m, n)))
        return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
    return rng.standard_normal((m, n))


def test_pinv_of_wide_ones_row():
    # pinv([[1, 1]]) = [[0.5], [0.5]]: the min-norm preimage splits evenly.
    g = pseudo_inverse([[1.0, 1.0]])
    np.testing.assert_allclose(g, [[0.5], [0.5]])


def test_pinv_matches_row_space_shortcut():
    rng = substream(5, "shortcut-wide")
    a = rng.standard_normal((4, 9))
    expected = a.T @ np.linalg.inv(a @ a.T)
    np.testing.assert_allclose(pseudo_inverse(a), expected, atol=1e-10)


def test_pinv_matches_column_space_shortcut():
    rng = substream(6, "shortcut-tall")
    a = rng.standard_normal((9, 4))
    expected = np.linalg.inv(a.T @ a) @ a.T
    np.testing.assert_allclose(pseudo_inverse(a), expected, atol=1e-10)


def test_pinv_of_zero_matrix():
    g = pseudo_inverse(np.zeros((3, 5)))
    assert g.shape == (5, 3)
    assert np.all(g == 0.0)
    assert all(r == 0.0 for r in penrose_residuals(np.zeros((3, 5)), g))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), deficient=st.booleans())
def test_penrose_identities_hold(seed, deficient):
    a = _random_matrix(seed, rank_deficient=deficient)
    residuals = penrose_residuals(a, pseudo_inverse(a))
    assert max(residuals) <= 1e-8


def test_numerical_rank_of_outer_product():
    rng = substream(7, "rank-one")
    a = np.outer(rng.standard_normal(6), rng.standard_normal(4))
    assert svd(a).rank == 1


def test_svd_extreme_singular_values():
    a = np.diag([3.0, 2.0, 1e-3])
    f = svd(a)
    assert f.s_max == pytest.approx(3.0)
    assert f.s_min_positive == pytest.approx(1e-3)
    assert svd(np.zeros((2, 2))).s_min_positive == 0.0


def test_svd_rejects_bad_input():
    with pytest.raises(InvalidInput):
        svd(np.array([1.0, 2.0]))
    with pytest.raises(InvalidInput):
        svd(np.array([[1.0, np.nan]]))


def test_min_norm_solve_agrees_with_lstsq():
    rng = substream(8, "lstsq-oracle")
    for m, n in ((3, 7), (7, 3), (5, 5)):
        x = rng.standard_normal((m, n))
        y = rng.standard_normal(m)
        expected = np.linalg.lstsq(x, y, rcond=None)[0]
        np.testing.assert_allclose(min_norm_solve(x, y), expected, atol=1e-10)


def test_min_norm_is_the_smallest_minimizer():
    rng = substream(9, "min-norm-min")
    x = rng.standard_normal((4, 10))
    y = rng.standard_normal(4)
    w_star = min_norm_solve(x, y)
    for k in range(5):
        other = solution_set_member(x, y, rng.standard_normal(10))
        # Same residual, never smaller norm.
        np.testing.assert_allclose(x @ other, x @ w_star, atol=1e-9)
        assert np.linalg.norm(other) >= np.linalg.norm(w_star) - 1e-9


def test_solution_set_member_hand_case():
    # X = [[1, 0]], y = [2]: solutions are (2, t).  The min-norm one is
    # (2, 0), and offsetting by u = (5, 7) keeps only the kernel part.
    x = [[1.0, 0.0]]
    np.testing.assert_allclose(min_norm_solve(x, [2.0]), [2.0, 0.0])
    member = solution_set_member(x, [2.0], [5.0, 7.0])
    np.testing.assert_allclose(member, [2.0, 7.0])


def test_kernel_projector_properties():
    rng = substream(10, "projector")
    x = rng.standard_normal((3, 8))
    p = kernel_projector(x)
    np.testing.assert_allclose(p, p.T, atol=1e-12)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(x @ p, np.zeros((3, 8)), atol=1e-12)
    # Rank of the projector is the kernel dimension.
    assert int(round(np.trace(p))) == 8 - svd(x).rank


def test_shape_validation_messages():
    with pytest.raises(InvalidInput):
        min_norm_solve(np.eye(3), np.ones(4))
    with pytest.raises(InvalidInput):
        solution_set_member(np.eye(3), np.ones(3), np.ones(5))


def test_fit_min_norm_predictor():
    rng = substream(11, "predictor")
    x = rng.standard_normal((6, 4))
    w = rng.standard_normal(4)
    y = x @ w
    predictor = fit_min_norm(x, y)
    assert predictor.mse(x, y) <= 1e-16
    np.testing.assert_allclose(predictor.predict(x), y, atol=1e-9)
    assert predictor.active is None


def test_linear_predictor_active_marker():
    predictor = LinearPredictor(coef=np.array([0.0, 2.0, 0.0]), active=np.array([1]))
    np.testing.assert_allclose(predictor.predict([[1.0, 3.0, 5.0]]), [6.0])
