"""Policy network: init, sampling, batch evaluation, gradients, checkpoints."""

import numpy as np
import pytest

from macrogame.policy import (
    CheckpointError,
    PolicyParams,
    PolicySpec,
    act,
    evaluate_batch,
    evaluate_batch_grad,
    init_policy,
    load_policy,
    save_policy,
)

TINY = PolicySpec(
    agent_type="firm", obs_dim=3, hetero_dim=0, action_dims=(3, 2), hidden=(4,)
)


def finite_difference_grad(params, inputs, actions, objective, h=1e-6):
    """Central finite differences of a scalar objective over the flat vector."""
    flat = params.flat
    grad = np.zeros_like(flat)
    for k in range(len(flat)):
        bumped = flat.copy()
        bumped[k] += h
        up = objective(PolicyParams(params.spec, bumped), inputs, actions)
        bumped[k] -= 2 * h
        down = objective(PolicyParams(params.spec, bumped), inputs, actions)
        grad[k] = (up - down) / (2 * h)
    return grad


def assert_grad_close(analytic, numeric, rtol=1e-4, atol=1e-8):
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    np.testing.assert_array_less(np.abs(analytic - numeric), rtol * scale + atol)


class TestInit:
    def test_deterministic(self):
        spec = PolicySpec("household", obs_dim=8, hetero_dim=5, action_dims=(5,) * 4)
        a = init_policy(spec, 3)
        b = init_policy(spec, 3)
        assert np.array_equal(a.flat, b.flat)
        c = init_policy(spec, 4)
        assert not np.array_equal(a.flat, c.flat)

    def test_param_count_closed_form(self):
        spec = PolicySpec("household", obs_dim=8, hetero_dim=0, action_dims=(5,) * 4)
        params = init_policy(spec, 0)
        expected = (8 * 64 + 64) + (64 * 64 + 64) + 4 * (64 * 5 + 5) + (64 * 1 + 1)
        assert spec.param_count() == expected
        assert len(params.flat) == expected

    def test_near_uniform_entropy_at_init(self):
        spec = PolicySpec("household", obs_dim=8, hetero_dim=0, action_dims=(5,) * 4)
        params = init_policy(spec, 7)
        rng = np.random.default_rng(0)
        inputs = rng.normal(0, 1, (32, 8))
        actions = np.zeros((32, 4), dtype=int)
        _, entropies, _ = evaluate_batch(params, inputs, actions)
        per_head = entropies / 4
        assert np.all(np.abs(per_head - np.log(5)) <= 0.05 * np.log(5))


class TestAct:
    def test_deterministic_mode_argmax_lowest_tie(self):
        params = PolicyParams(TINY, np.zeros(TINY.param_count()))
        sample = act(params, np.zeros(3), deterministic=True)
        # all-zero weights give exactly uniform heads; ties break to index 0
        np.testing.assert_array_equal(sample.indices, [0, 0])

    def test_fixed_rng_reproducible(self):
        params = init_policy(TINY, 1)
        x = np.array([0.3, -0.2, 0.9])
        a = act(params, x, np.random.default_rng(5))
        b = act(params, x, np.random.default_rng(5))
        np.testing.assert_array_equal(a.indices, b.indices)
        assert a.log_prob == b.log_prob and a.value == b.value

    def test_one_hot_logit_head(self):
        params = PolicyParams(TINY, np.zeros(TINY.param_count()))
        views = params.views()
        views["head0_b"][1] = 50.0  # overwhelming logit gap
        rng = np.random.default_rng(11)
        picks = [act(params, np.zeros(3), rng).indices[0] for _ in range(2000)]
        assert np.mean(np.asarray(picks) == 1) >= 0.999

    def test_non_finite_input_rejected(self):
        params = init_policy(TINY, 1)
        with pytest.raises(ValueError):
            act(params, np.array([np.nan, 0.0, 0.0]), np.random.default_rng(0))


class TestEvaluateBatch:
    def test_consistent_with_act(self):
        params = init_policy(TINY, 2)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.normal(0, 1, 3)
            sample = act(params, x, rng)
            lp, _, value = evaluate_batch(params, x[None, :], sample.indices[None, :])
            assert abs(lp[0] - sample.log_prob) <= 1e-10
            assert abs(value[0] - sample.value) <= 1e-10

    def test_uniform_entropy_exact(self):
        spec = PolicySpec("central_bank", obs_dim=6, hetero_dim=0, action_dims=(5,))
        params = PolicyParams(spec, np.zeros(spec.param_count()))
        _, entropies, _ = evaluate_batch(
            params, np.zeros((4, 6)), np.zeros((4, 1), dtype=int)
        )
        np.testing.assert_allclose(entropies, np.log(5), rtol=1e-12)

    def test_batch_of_one_equals_single_row(self):
        params = init_policy(TINY, 9)
        rng = np.random.default_rng(4)
        xs = rng.normal(0, 1, (6, 3))
        acts_ = rng.integers(0, [3, 2], size=(6, 2))
        for i in range(6):
            single = evaluate_batch(params, xs[i], acts_[i])
            batched = evaluate_batch(params, xs[i][None, :], acts_[i][None, :])
            for a, b in zip(single, batched):
                assert a[0] == b[0]
        # larger batches agree with row-wise evaluation up to BLAS rounding
        lp_all, ent_all, val_all = evaluate_batch(params, xs, acts_)
        for i in range(6):
            lp, ent, val = evaluate_batch(params, xs[i], acts_[i])
            np.testing.assert_allclose(
                [lp[0], ent[0], val[0]], [lp_all[i], ent_all[i], val_all[i]], rtol=1e-12
            )

    def test_probability_normalization(self):
        params = init_policy(TINY, 13)
        from macrogame.policy import _forward

        rng = np.random.default_rng(6)
        fwd = _forward(params, rng.normal(0, 2, (16, 3)))
        for p in fwd.probs:
            np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)

    def test_heterogeneity_conditioning(self):
        # one shared parameter set, two hetero vectors: distributions differ
        spec = PolicySpec("firm", obs_dim=3, hetero_dim=2, action_dims=(4,), hidden=(8,))
        params = init_policy(spec, 21)
        params = PolicyParams(spec, params.flat + 0.3)  # perturb away from tiny heads
        obs = np.array([0.5, -0.1, 0.2])
        a = np.concatenate([obs, [1.0, 0.0]])
        b = np.concatenate([obs, [0.0, 1.0]])
        lp_a, _, _ = evaluate_batch(params, a, np.array([[0]]))
        lp_b, _, _ = evaluate_batch(params, b, np.array([[0]]))
        assert lp_a[0] != lp_b[0]


class TestGradients:
    def _setup(self, seed):
        params = init_policy(TINY, seed)
        rng = np.random.default_rng(seed + 100)
        inputs = rng.normal(0, 1, (5, 3))
        actions = rng.integers(0, [3, 2], size=(5, 2))
        coef = rng.normal(0, 1, (3, 5))
        return params, inputs, actions, coef

    def test_log_prob_gradient(self):
        params, inputs, actions, coef = self._setup(31)
        analytic, _ = evaluate_batch_grad(
            params, inputs, actions, coef[0], np.zeros(5), np.zeros(5)
        )
        numeric = finite_difference_grad(
            params, inputs, actions,
            lambda p, x, a: float(np.dot(coef[0], evaluate_batch(p, x, a)[0])),
        )
        assert_grad_close(analytic, numeric)

    def test_entropy_gradient(self):
        params, inputs, actions, coef = self._setup(37)
        analytic, _ = evaluate_batch_grad(
            params, inputs, actions, np.zeros(5), coef[1], np.zeros(5)
        )
        numeric = finite_difference_grad(
            params, inputs, actions,
            lambda p, x, a: float(np.dot(coef[1], evaluate_batch(p, x, a)[1])),
        )
        assert_grad_close(analytic, numeric)

    def test_value_gradient(self):
        params, inputs, actions, coef = self._setup(41)
        analytic, _ = evaluate_batch_grad(
            params, inputs, actions, np.zeros(5), np.zeros(5), coef[2]
        )
        numeric = finite_difference_grad(
            params, inputs, actions,
            lambda p, x, a: float(np.dot(coef[2], evaluate_batch(p, x, a)[2])),
        )
        assert_grad_close(analytic, numeric)

    def test_combined_gradient(self):
        params, inputs, actions, coef = self._setup(43)
        analytic, _ = evaluate_batch_grad(
            params, inputs, actions, coef[0], coef[1], coef[2]
        )

        def objective(p, x, a):
            lp, ent, val = evaluate_batch(p, x, a)
            return float(coef[0] @ lp + coef[1] @ ent + coef[2] @ val)

        numeric = finite_difference_grad(params, inputs, actions, objective)
        assert_grad_close(analytic, numeric)


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path):
        params = init_policy(TINY, 55)
        path = tmp_path / "p.policy"
        save_policy(params, path)
        loaded = load_policy(path)
        assert np.array_equal(loaded.flat, params.flat)
        assert loaded.spec == params.spec

    def test_truncated_file_checksum_error(self, tmp_path):
        params = init_policy(TINY, 56)
        path = tmp_path / "p.policy"
        save_policy(params, path)
        data = path.read_bytes()
        path.write_bytes(data[:-16])
        with pytest.raises(CheckpointError):
            load_policy(path)

    def test_corrupt_payload_checksum_error(self, tmp_path):
        params = init_policy(TINY, 57)
        path = tmp_path / "p.policy"
        save_policy(params, path)
        data = bytearray(path.read_bytes())
        data[-5] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(CheckpointError):
            load_policy(path)

    def test_spec_mismatch_names_layer(self, tmp_path):
        params = init_policy(TINY, 58)
        path = tmp_path / "p.policy"
        save_policy(params, path)
        other = PolicySpec(
            agent_type="firm", obs_dim=4, hetero_dim=0, action_dims=(3, 2), hidden=(4,)
        )
        with pytest.raises(ValueError, match="torso_w0"):
            load_policy(path, spec=other)
