import numpy as np
import pytest

from apwave.errors import ConfigurationError
from apwave.grid import (ModelParams, PeriodicGrid, State, central_derivative, delta, dump_csv,
                         dump_matrix, inner, mu, norm)


@pytest.fixture
def grid4():
    return PeriodicGrid((4,), ((0.0, 4.0),))


def test_grid_basics():
    grid = PeriodicGrid((8, 4), ((0.0, 2.0), (-1.0, 1.0)))
    assert grid.dim == 2
    assert grid.dx == (0.25, 0.5)
    assert grid.cell_volume == 0.125
    np.testing.assert_allclose(grid.axis_centers(1), [-0.75, -0.25, 0.25, 0.75])


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        PeriodicGrid((3,), ((0.0, 1.0),))
    with pytest.raises(ConfigurationError):
        PeriodicGrid((8,), ((1.0, 1.0),))
    with pytest.raises(ConfigurationError):
        PeriodicGrid((8, 8, 8), ((0, 1), (0, 1), (0, 1)))


def test_model_params_validation():
    with pytest.raises(ConfigurationError):
        ModelParams(epsilon=0.0)
    with pytest.raises(ConfigurationError):
        ModelParams(epsilon=1.0, a_bar=-1.0)
    params = ModelParams(epsilon=0.5, a_bar=2.0, u_bar=(1.0, 0.0))
    assert params.stiffness == 4.0


def test_state_shape_validation():
    grid = PeriodicGrid((4, 4), ((0, 1), (0, 1)))
    with pytest.raises(ConfigurationError):
        State(grid, np.zeros(4), np.zeros((2, 4, 4)))
    with pytest.raises(ConfigurationError):
        State(grid, np.zeros((4, 4)), np.zeros((1, 4, 4)))


def test_delta_hand_example(grid4):
    # Faces in left-face convention: cell i gets face[i+1] - face[i].
    faces = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(delta(faces, 0, grid4), [1.0, 1.0, 1.0, -3.0])


def test_delta_constant_and_linear(grid4):
    np.testing.assert_array_equal(delta(np.full(4, 7.5), 0, grid4), np.zeros(4))
    # Faces valued at their own coordinate telescope to dx except at the wrap,
    # so use face coordinates measured periodically via increments.
    rng = np.random.default_rng(11)
    f = rng.standard_normal(4)
    assert abs(np.sum(delta(f, 0, grid4))) < 1e-12


def test_mu_hand_example(grid4):
    faces = np.array([1.0, 2.0, 3.0, 4.0])
    np.testing.assert_array_equal(mu(faces, 0, grid4), [1.5, 2.5, 3.5, 2.5])
    np.testing.assert_array_equal(mu(np.full(4, 3.0), 0, grid4), np.full(4, 3.0))


def test_mu_linearity(grid4):
    rng = np.random.default_rng(3)
    f, g = rng.standard_normal(4), rng.standard_normal(4)
    a, b = 2.5, -1.25
    np.testing.assert_allclose(mu(a * f + b * g, 0, grid4),
                               a * mu(f, 0, grid4) + b * mu(g, 0, grid4), atol=1e-14)


def test_axis_out_of_range(grid4):
    with pytest.raises(ConfigurationError):
        delta(np.zeros(4), 1, grid4)
    with pytest.raises(ConfigurationError):
        mu(np.zeros(4), -1, grid4)
    with pytest.raises(ConfigurationError):
        central_derivative(np.zeros(4), 1, grid4)


def test_central_derivative_constant_and_sine():
    grid = PeriodicGrid((64,), ((0.0, 1.0),))
    x = grid.axis_centers(0)
    np.testing.assert_array_equal(central_derivative(np.ones(64), 0, grid), np.zeros(64))
    approx = central_derivative(np.sin(2 * np.pi * x), 0, grid)
    # Taylor remainder of the wide stencil: |error| <= (2 pi)^3 dx^2 / 6.
    bound = (2 * np.pi) ** 3 * grid.dx[0] ** 2 / 6.0
    assert np.max(np.abs(approx - 2 * np.pi * np.cos(2 * np.pi * x))) <= bound


def test_central_derivative_annihilates_checkerboard():
    grid = PeriodicGrid((16,), ((0.0, 1.0),))
    checker = (-1.0) ** np.arange(16)
    np.testing.assert_array_equal(central_derivative(checker, 0, grid), np.zeros(16))


def test_norm_examples():
    grid = PeriodicGrid((10,), ((0.0, 1.0),))
    assert norm(np.zeros(10), "L1", grid) == 0.0
    assert norm(np.ones(10), "L1", grid) == pytest.approx(1.0, abs=1e-15)
    assert norm(np.ones(10), "L2", grid) == pytest.approx(1.0, abs=1e-15)
    grid2 = PeriodicGrid((8, 4), ((0.0, 4.0), (0.0, 1.0)))
    f = np.full((8, 4), 2.0)
    assert norm(f, "L1", grid2) == pytest.approx(8.0, abs=1e-13)
    assert norm(f, "L2", grid2) == pytest.approx(4.0, abs=1e-13)
    assert norm(f, "Linf", grid2) == 2.0
    with pytest.raises(ConfigurationError):
        norm(f, "L3", grid2)


def test_norm_homogeneity():
    grid = PeriodicGrid((32,), ((0.0, 2.0),))
    rng = np.random.default_rng(7)
    f = rng.standard_normal(32)
    for which in ("L1", "L2", "Linf"):
        assert norm(-3.5 * f, which, grid) == pytest.approx(3.5 * norm(f, which, grid),
                                                            rel=1e-14)


def test_periodic_telescoping_2d():
    grid = PeriodicGrid((8, 6), ((0, 1), (0, 2)))
    rng = np.random.default_rng(5)
    f = rng.standard_normal((8, 6))
    for axis in (0, 1):
        assert abs(np.sum(delta(f, axis, grid))) < 1e-12


def test_delta_mu_commute():
    grid = PeriodicGrid((16,), ((0.0, 1.0),))
    rng = np.random.default_rng(9)
    f = rng.standard_normal(16)
    np.testing.assert_allclose(delta(mu(f, 0, grid), 0, grid),
                               mu(delta(f, 0, grid), 0, grid), atol=1e-14)


def test_central_derivative_skew_symmetric():
    grid = PeriodicGrid((24, 12), ((0, 1), (0, 3)))
    rng = np.random.default_rng(13)
    f = rng.standard_normal((24, 12))
    g = rng.standard_normal((24, 12))
    for axis in (0, 1):
        lhs = inner(central_derivative(f, axis, grid), g, grid)
        rhs = -inner(f, central_derivative(g, axis, grid), grid)
        assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(lhs))


def test_dump_matrix_layout(tmp_path):
    grid = PeriodicGrid((4, 5), ((0, 1), (0, 1)))
    field = np.arange(20.0).reshape(4, 5)
    path = tmp_path / "field.txt"
    dump_matrix(field, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 5  # one row per x2 index
    first = [float(v) for v in lines[0].split()]
    np.testing.assert_array_equal(first, field[:, 0])
    back = np.array([[float(v) for v in line.split()] for line in lines])
    np.testing.assert_array_equal(back.T, field)  # full precision round trip


def test_dump_csv_columns(tmp_path):
    grid = PeriodicGrid((4,), ((0.0, 1.0),))
    path = tmp_path / "field.csv"
    dump_csv(np.array([1.0, 2.0, 3.0, 4.0]), grid, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x1,x2,value"
    assert len(lines) == 5
    x1, x2, v = lines[1].split(",")
    assert float(x1) == pytest.approx(0.125)
    assert float(x2) == 0.0
    assert float(v) == 1.0
