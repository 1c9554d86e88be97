import numpy as np
import pytest

from clonescope.evalnet import EvalNet, numerical_gradient, train_eval_net


def test_output_finite_on_unit_cube():
    net = EvalNet.create(seed=0)
    rng = np.random.default_rng(0)
    X = rng.uniform(0, 1, size=(100, 7))
    out = net.predict(X)
    assert out.shape == (100,)
    assert np.all(np.isfinite(out))


def test_deterministic_initialisation():
    a = EvalNet.create(seed=5)
    b = EvalNet.create(seed=5)
    assert np.array_equal(a.w1, b.w1)
    assert np.array_equal(a.w3, b.w3)


def test_constant_target_fits_to_tiny_mse():
    rng = np.random.default_rng(1)
    samples = [(rng.uniform(0, 1, size=7), 0.42) for _ in range(30)]
    net = train_eval_net(EvalNet.create(seed=0), samples, epochs=2000, seed=0)
    X = np.asarray([point for point, _ in samples])
    y = np.asarray([target for _, target in samples])
    mse = float(np.mean((net.predict(X) - y) ** 2))
    assert mse < 1e-6


def test_needs_two_samples():
    with pytest.raises(ValueError):
        train_eval_net(EvalNet.create(seed=0), [(np.zeros(7), 0.0)], epochs=1)


def test_gradients_match_finite_differences():
    # Central differences at 10 random weights over 3 random inputs.
    net = EvalNet.create(seed=3)
    rng = np.random.default_rng(11)
    X = rng.uniform(0, 1, size=(3, 7))
    y = rng.uniform(0, 1, size=3)
    _, grads = net.loss_and_grads(X, y)
    params = ("w1", "b1", "w2", "b2", "w3", "b3")
    for trial in range(10):
        name = params[trial % len(params)]
        tensor = getattr(net, name)
        index = tuple(int(rng.integers(0, s)) for s in tensor.shape)
        numeric = numerical_gradient(net, X, y, name, index, step=1e-5)
        analytic = float(grads[name][index])
        rel = abs(numeric - analytic) / max(abs(numeric), abs(analytic), 1e-12)
        assert rel < 1e-4, (name, index, numeric, analytic)


def test_smooth_quadratic_surrogate_quality():
    # Train on 200 samples of a smooth function; held-out MSE on fresh
    # points must stay under 5% of the target variance.
    rng = np.random.default_rng(4)
    coeffs = rng.uniform(0.5, 2.0, size=7)

    def target(x):
        return float(np.dot(coeffs, (x - 0.5) ** 2))

    points = rng.uniform(0, 1, size=(200, 7))
    values = np.asarray([target(x) for x in points])
    net = train_eval_net(EvalNet.create(seed=0), list(zip(points, values)),
                         epochs=2000, seed=0)
    held_points = rng.uniform(0, 1, size=(300, 7))
    held_values = np.asarray([target(x) for x in held_points])
    held_mse = float(np.mean((net.predict(held_points) - held_values) ** 2))
    assert held_mse < 0.05 * float(np.var(values))


def test_training_is_deterministic():
    rng = np.random.default_rng(2)
    samples = [(rng.uniform(0, 1, size=7), float(rng.uniform())) for _ in range(20)]
    a = train_eval_net(EvalNet.create(seed=1), samples, epochs=200, seed=0)
    b = train_eval_net(EvalNet.create(seed=1), samples, epochs=200, seed=0)
    assert np.array_equal(a.w2, b.w2)
    assert a.steps == b.steps == 200
