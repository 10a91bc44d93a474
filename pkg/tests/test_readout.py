"""Input generation, harvesting, least-squares readout training."""

import numpy as np
import pytest

from molrc import (
    ChemState,
    DesignMatrix,
    InfluxProfile,
    ReactorParams,
    ReadoutWeights,
    generate_input,
    harvest,
    integrate,
    predict,
    readout_from_json,
    readout_to_json,
    train_readout,
)

BASE = 5.45e-6


def make_design(rng, n, c):
    X = np.hstack([rng.normal(0, 1, (n, c)), np.ones((n, 1))])
    names = tuple(f"x{i}" for i in range(c))
    return DesignMatrix(times=np.arange(float(n)), X=X, channel_names=names)


def normal_equations_oracle(X, y, ridge=0.0, ridge_bias=False):
    # literal pseudoinverse form, valid while X^T X (+ penalty) is invertible
    A = X.X
    pen = np.eye(A.shape[1]) * ridge
    if not ridge_bias:
        pen[-1, -1] = 0.0
    return np.linalg.solve(A.T @ A + pen, A.T @ y)


class TestGenerateInput:
    def test_deterministic(self):
        a = generate_input(123, BASE, 100.0, 500.0, 2500.0)
        b = generate_input(123, BASE, 100.0, 500.0, 2500.0)
        assert a == b

    def test_window_count(self):
        prof = generate_input(0, BASE, 100.0, 500.0, 2500.0)
        assert len(prof.values) == 20
        prof = generate_input(0, BASE, 100.0, 500.0, 2501.0)
        assert len(prof.values) == 21  # partial window still gets a value

    def test_multipliers_uniform(self):
        prof = generate_input(99, BASE, 1.0, 0.0, 1e4)
        values = np.asarray(prof.values)
        assert len(values) == 10000
        assert np.all((values >= 0.0) & (values < 1.0))
        assert 0.48 <= values.mean() <= 0.52

    def test_validation(self):
        with pytest.raises(ValueError, match="end"):
            generate_input(0, BASE, 100.0, 500.0, 500.0)
        with pytest.raises(ValueError, match="tau"):
            generate_input(0, BASE, 0.0, 0.0, 100.0)


@pytest.fixture(scope="module")
def trace():
    prof = generate_input(3, BASE, 100.0, 500.0, 4500.0)
    return integrate(ChemState.initial(), ReactorParams(), prof, t_end=4500.0)


class TestHarvest:

    def test_product_only_shape(self, trace):
        dm = harvest(trace, "product_only", 500.0, 2500.0, 1.0)
        assert dm.X.shape == (2000, 4)
        assert np.all(dm.X[:, -1] == 1.0)
        assert dm.times[0] == 500.0 and dm.times[-1] == 2499.0

    def test_product_and_substrate_shape(self, trace):
        dm = harvest(trace, "product_and_substrate", 500.0, 2500.0, 1.0)
        assert dm.X.shape == (2000, 7)
        assert dm.channel_names == ("P1", "P2", "P3", "S1", "S2", "S3")

    def test_single_row(self, trace):
        dm = harvest(trace, "product_only", 1000.0, 1001.0, 1.0)
        assert dm.X.shape == (1, 4)
        assert dm.X[0, -1] == 1.0

    def test_stride(self, trace):
        dm = harvest(trace, "product_only", 500.0, 2500.0, 200.0)
        assert dm.X.shape == (10, 4)
        assert np.all(np.diff(dm.times) == 200.0)

    def test_rejects_bad_windows(self, trace):
        with pytest.raises(ValueError, match="stride"):
            harvest(trace, "product_only", 500.0, 2500.0, 0.3)
        with pytest.raises(ValueError, match="empty|outside"):
            harvest(trace, "product_only", 2500.0, 2500.0, 1.0)
        with pytest.raises(ValueError, match="empty|outside"):
            harvest(trace, "product_only", 4000.0, 6000.0, 1.0)
        with pytest.raises(ValueError, match="mode"):
            harvest(trace, "products", 500.0, 600.0, 1.0)


class TestTrainReadout:
    def test_recovers_single_column(self):
        rng = np.random.default_rng(1)
        dm = make_design(rng, 50, 4)
        y = dm.X[:, 2].copy()
        w = train_readout(dm, y)
        expected = np.zeros(4)
        expected[2] = 1.0
        assert np.allclose(w.w, expected, atol=1e-10)
        assert abs(w.w_b) < 1e-10
        assert np.linalg.norm(dm.X @ w.as_extended() - y) < 1e-10

    def test_constant_target_lands_on_bias(self):
        rng = np.random.default_rng(2)
        dm = make_design(rng, 40, 3)
        y = np.full(40, 3.25)
        w = train_readout(dm, y)
        assert np.linalg.norm(predict(w, dm) - y) < 1e-10

    def test_recovers_planted_weights_and_matches_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            dm = make_design(rng, 50, 3)
            w_true = rng.normal(0, 1, 4)
            y = dm.X @ w_true
            w = train_readout(dm, y)
            assert np.allclose(w.as_extended(), w_true, atol=1e-8)
            assert np.allclose(w.as_extended(), normal_equations_oracle(dm, y), atol=1e-6)

    def test_ridge_matches_oracle(self):
        rng = np.random.default_rng(4)
        for ridge_bias in (False, True):
            dm = make_design(rng, 60, 5)
            y = rng.normal(0, 1, 60)
            w = train_readout(dm, y, ridge=0.7, ridge_bias=ridge_bias)
            oracle = normal_equations_oracle(dm, y, ridge=0.7, ridge_bias=ridge_bias)
            assert np.allclose(w.as_extended(), oracle, atol=1e-8)
            assert not w.rank_deficient

    def test_rank_deficient_flagged_min_norm(self):
        rng = np.random.default_rng(5)
        base = rng.normal(0, 1, (30, 2))
        X = np.hstack([base, base[:, :1] + base[:, 1:], np.ones((30, 1))])
        dm = DesignMatrix(times=np.arange(30.0), X=X, channel_names=("a", "b", "c"))
        y = rng.normal(0, 1, 30)
        w = train_readout(dm, y)
        assert w.rank_deficient
        # lstsq returns the minimum-norm minimizer; any other exact minimizer
        # of the residual is at least as long
        other = w.as_extended() + np.array([1.0, 1.0, -1.0, 0.0])  # null direction
        assert np.linalg.norm(dm.X @ other - y) == pytest.approx(
            np.linalg.norm(dm.X @ w.as_extended() - y), abs=1e-9)
        assert np.linalg.norm(w.as_extended()) <= np.linalg.norm(other) + 1e-12

    def test_first_order_optimality(self):
        rng = np.random.default_rng(6)
        dm = make_design(rng, 80, 4)
        y = rng.normal(0, 1, 80)
        w = train_readout(dm, y)
        best = np.sum((dm.X @ w.as_extended() - y) ** 2)
        for _ in range(100):
            delta = rng.normal(0, 1, 5)
            delta *= 1e-6 / np.linalg.norm(delta)
            perturbed = np.sum((dm.X @ (w.as_extended() + delta) - y) ** 2)
            assert perturbed >= best - 1e-12 * best

    def test_shape_mismatch_rejected(self):
        rng = np.random.default_rng(7)
        dm = make_design(rng, 10, 2)
        with pytest.raises(ValueError, match="length"):
            train_readout(dm, np.zeros(11))
        with pytest.raises(ValueError, match="ridge"):
            train_readout(dm, np.zeros(10), ridge=-1.0)


class TestPredict:
    def test_zero_weights_constant_bias(self):
        rng = np.random.default_rng(8)
        dm = make_design(rng, 25, 3)
        w = ReadoutWeights(w=np.zeros(3), w_b=3.0)
        assert np.all(predict(w, dm) == 3.0)

    def test_projection_residual(self):
        rng = np.random.default_rng(9)
        dm = make_design(rng, 30, 3)
        y = rng.normal(0, 1, 30)
        w = train_readout(dm, y)
        res1 = np.linalg.norm(predict(w, dm) - y)
        res2 = np.linalg.norm(dm.X @ normal_equations_oracle(dm, y) - y)
        assert res1 == pytest.approx(res2, rel=1e-9)

    def test_bilinearity(self):
        rng = np.random.default_rng(10)
        dm = make_design(rng, 20, 3)
        w = ReadoutWeights(w=rng.normal(0, 1, 3), w_b=0.7)
        doubled = DesignMatrix(
            times=dm.times,
            X=np.hstack([2.0 * dm.X[:, :-1], np.ones((20, 1))]),
            channel_names=dm.channel_names,
        )
        halved = ReadoutWeights(w=w.w / 2.0, w_b=w.w_b)
        assert np.allclose(predict(halved, doubled), predict(w, dm))

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(11)
        dm = make_design(rng, 10, 3)
        with pytest.raises(ValueError, match="channel count"):
            predict(ReadoutWeights(w=np.zeros(5), w_b=0.0), dm)


class TestSerialization:
    def test_round_trip(self):
        w = ReadoutWeights(w=np.array([1.5, -2.25, 0.0]), w_b=0.125)
        text = readout_to_json(w, "product_only", 0.5)
        w2, mode, ridge = readout_from_json(text)
        assert np.array_equal(w2.w, w.w)
        assert w2.w_b == w.w_b
        assert mode == "product_only" and ridge == 0.5

    def test_non_finite_weights_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            ReadoutWeights(w=np.array([np.nan]), w_b=0.0)


class TestDesignMatrixInvariants:
    def test_bias_column_enforced(self):
        with pytest.raises(ValueError, match="bias|constant 1"):
            DesignMatrix(times=np.arange(3.0), X=np.ones((3, 2)) * 2.0,
                         channel_names=("a",))

    def test_row_count_enforced(self):
        with pytest.raises(ValueError, match="row"):
            DesignMatrix(times=np.arange(3.0), X=np.ones((4, 2)), channel_names=("a",))
