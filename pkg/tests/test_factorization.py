"""Basis recovery, oblique projection, and the determinant-ratio statistic."""

import numpy as np
import pytest

from cpcapp import (
    CovariancePair,
    DataMatrix,
    RankError,
    SyntheticSpec,
    build_covariance_pair,
    center,
    denoise,
    fit_cpcapp,
    gen_haystack,
    glrt_statistic,
    recover_w,
    sample_haystack,
)

from conftest import random_spd


def pair_from(rng, m, n=200, bg_scale=1.0):
    fg = DataMatrix(values=rng.standard_normal((m, n)))
    bg = DataMatrix(values=bg_scale * rng.standard_normal((m, n)))
    return build_covariance_pair(bg, fg)


def identity_pair(r_f, m):
    return CovariancePair(r_b=np.eye(m), r_f=r_f, loading=0.0, n_b=100, n_f=100,
                          mean_b=np.zeros(m), mean_f=np.zeros(m))


class TestRecoverW:
    def test_identity_background_collapses_to_f(self, rng):
        z = rng.standard_normal((5, 5))
        pair = identity_pair(z @ z.T, 5)
        bank = fit_cpcapp(pair, 3)
        model = recover_w(pair, bank)
        np.testing.assert_allclose(model.w, bank.f, atol=1e-9)

    def test_planted_direction_spans_basis(self):
        # the basis recovery multiplies the filter by the background
        # covariance, whose 1000x anisotropy amplifies sampling error in the
        # filter, so this needs a generous sample count
        spec = SyntheticSpec(kind="haystack", seed=3, n_fg=60_000, n_bg=60_000)
        fg, bg = sample_haystack(spec)
        _, _, c, _ = gen_haystack(spec)
        pair = build_covariance_pair(bg, fg)
        bank = fit_cpcapp(pair, 1)
        model = recover_w(pair, bank)
        w1 = model.w[:, 0] / np.linalg.norm(model.w[:, 0])
        assert abs(w1 @ c) >= 0.99

    def test_biorthogonality(self, rng):
        pair = pair_from(rng, 8)
        bank = fit_cpcapp(pair, 3)
        model = recover_w(pair, bank)
        np.testing.assert_allclose(model.f.T @ model.w, np.eye(3), atol=1e-8)

    def test_scaling_matrix_is_diagonal(self, rng):
        pair = pair_from(rng, 10)
        bank = fit_cpcapp(pair, 4)
        r_b = pair.r_b + pair.loading * np.eye(10)
        lam = bank.f.T @ r_b @ bank.f
        off = lam - np.diag(np.diag(lam))
        assert np.linalg.norm(off) < 1e-6 * np.linalg.norm(np.diag(lam))
        model = recover_w(pair, bank)
        np.testing.assert_allclose(model.lambda_diag, np.diag(lam))

    def test_projector_idempotent(self, rng):
        pair = pair_from(rng, 9)
        bank = fit_cpcapp(pair, 3)
        model = recover_w(pair, bank)
        p = model.w @ model.f.T
        assert np.linalg.norm(p @ p - p, "fro") <= 1e-6 * np.linalg.norm(p, "fro")


class TestDenoise:
    def test_fixed_point_on_basis_range(self, rng):
        pair = pair_from(rng, 7)
        bank = fit_cpcapp(pair, 2)
        model = recover_w(pair, bank)
        z = model.w @ rng.standard_normal(2)
        np.testing.assert_allclose(denoise(model, z), z, atol=1e-6 * (1 + np.abs(z).max()))

    def test_null_input_maps_to_zero(self, rng):
        pair = pair_from(rng, 6)
        bank = fit_cpcapp(pair, 2)
        model = recover_w(pair, bank)
        # build a vector in the null space of F^T
        q, _ = np.linalg.qr(model.f)
        z = rng.standard_normal(6)
        z -= q @ (q.T @ z)
        np.testing.assert_allclose(denoise(model, z), np.zeros(6), atol=1e-8)

    def test_rejects_wrong_length(self, rng):
        pair = pair_from(rng, 6)
        model = recover_w(pair, fit_cpcapp(pair, 2))
        from cpcapp import ShapeError

        with pytest.raises(ShapeError):
            denoise(model, np.zeros(5))


class TestGlrt:
    def test_identical_partitions_give_power_of_two(self, rng):
        z = center(DataMatrix(values=rng.standard_normal((5, 60))))
        w = rng.standard_normal((5, 3))
        stat = glrt_statistic(z, z, w)
        assert stat == pytest.approx(2.0**3, rel=1e-6)

    def test_zero_foreground_gives_one(self, rng):
        z_b = center(DataMatrix(values=rng.standard_normal((4, 50))))
        z_f = DataMatrix(values=np.zeros((4, 30)), centered=True, mean=np.zeros(4))
        stat = glrt_statistic(z_f, z_b, rng.standard_normal((4, 2)))
        assert stat == pytest.approx(1.0, rel=1e-9)

    def test_optimal_basis_attains_maximum(self):
        spec = SyntheticSpec(kind="haystack", seed=17, n_fg=2000, n_bg=2000)
        fg, bg = sample_haystack(spec)
        pair = build_covariance_pair(bg, fg)
        model = recover_w(pair, fit_cpcapp(pair, 1))
        z_f, z_b = center(fg), center(bg)
        best = glrt_statistic(z_f, z_b, model.w)
        gen = np.random.default_rng(99)
        randoms = [glrt_statistic(z_f, z_b, gen.standard_normal((4, 1))) for _ in range(100)]
        assert best >= max(randoms)

    def test_invariant_to_right_multiplication(self, rng):
        z_f = center(DataMatrix(values=rng.standard_normal((6, 70))))
        z_b = center(DataMatrix(values=rng.standard_normal((6, 80))))
        w = rng.standard_normal((6, 3))
        t = random_spd(rng, 3, jitter=0.1)  # invertible
        s1 = glrt_statistic(z_f, z_b, w)
        s2 = glrt_statistic(z_f, z_b, w @ t)
        assert s2 == pytest.approx(s1, rel=1e-7)

    def test_at_least_one(self, rng):
        for seed in range(5):
            gen = np.random.default_rng(seed)
            z_f = center(DataMatrix(values=gen.standard_normal((5, 40))))
            z_b = center(DataMatrix(values=gen.standard_normal((5, 45))))
            stat = glrt_statistic(z_f, z_b, gen.standard_normal((5, 2)))
            assert stat >= 1.0 - 1e-9

    def test_rejects_rank_deficient_basis(self, rng):
        z = center(DataMatrix(values=rng.standard_normal((4, 30))))
        w = np.zeros((4, 2))
        w[:, 0] = w[:, 1] = 1.0
        with pytest.raises(RankError):
            glrt_statistic(z, z, w)
