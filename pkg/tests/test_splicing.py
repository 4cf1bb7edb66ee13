"""Patch pipeline: edges, extraction, labeling, scoring, maps, and metrics."""

import math

import numpy as np
import pytest

from cpcapp import (
    ArgumentError,
    ConfusionCounts,
    DataMatrix,
    FilterBank,
    ProbabilityMap,
    ShapeError,
    SyntheticSpec,
    binarize_and_score,
    edge_mask,
    extract_patches,
    f1_score,
    gen_spliced_image,
    label_patches,
    mcc_score,
    random_scorer_expected_f1,
    reconstruct_map,
    score_patches,
)


def axis_bank(m, k=1):
    f = np.zeros((m, k))
    for i in range(k):
        f[i, i] = 1.0
    return FilterBank(method="pca", f=f, train_mean_bg=np.zeros(m),
                      train_mean_fg=np.zeros(m), eigenvalues=np.zeros(k), loading=0.0)


class TestEdgeMask:
    def test_constant_image_gives_empty_mask(self):
        assert edge_mask(np.full((10, 12), 77, dtype=np.uint8)).sum() == 0

    def test_vertical_step(self):
        img = np.zeros((16, 16), dtype=np.uint8)
        img[:, 8:] = 200
        mask = edge_mask(img)
        assert mask[:, 7:9].all()
        assert mask[:, :6].sum() == 0 and mask[:, 10:].sum() == 0

    def test_recall_of_spliced_boundary(self):
        spec = SyntheticSpec(kind="spliced-image", seed=3, n_fg=1, n_bg=1)
        probe, _, edge_truth = gen_spliced_image(spec)
        mask = edge_mask(probe)
        truth = edge_truth > 0
        recall = (mask[truth] > 0).mean()
        assert recall >= 0.7

    def test_rejects_empty(self):
        with pytest.raises(ArgumentError):
            edge_mask(np.zeros((0, 0)))


class TestExtractPatches:
    def test_single_patch(self):
        grid = extract_patches(np.arange(64.0).reshape(8, 8), 8, 4)
        assert grid.patches.samples == 1
        np.testing.assert_array_equal(grid.origins, [[0, 0]])

    def test_two_patches_wide_image(self):
        grid = extract_patches(np.zeros((8, 12)), 8, 4)
        assert grid.patches.samples == 2
        np.testing.assert_array_equal(grid.origins, [[0, 0], [0, 4]])

    def test_flattening_round_trip(self, rng):
        img = rng.integers(0, 255, size=(20, 24, 3)).astype(np.uint8)
        grid = extract_patches(img, 8, 4)
        i = 7
        r, c = grid.origins[i]
        col = grid.patches.values[:, i].reshape(3, 8, 8)  # channel-major
        window = np.moveaxis(img[r:r + 8, c:c + 8, :].astype(float), 2, 0)
        np.testing.assert_array_equal(col, window)

    def test_rejects_oversize_patch(self):
        with pytest.raises(ArgumentError):
            extract_patches(np.zeros((6, 6)), 8, 4)


class TestLabelPatches:
    def _grid_and_masks(self):
        img = np.zeros((8, 16))
        grid = extract_patches(img, 8, 4)  # origins at columns 0, 4, 8
        surface = np.zeros((8, 16), dtype=np.uint8)
        edge = np.zeros((8, 16), dtype=np.uint8)
        return grid, surface, edge

    def test_fully_spliced_patch_unlabeled(self):
        grid, surface, edge = self._grid_and_masks()
        surface[:, :] = 255
        fg, bg = label_patches(grid, surface, edge)
        assert fg.size == 0 and bg.size == 0

    def test_half_spliced_patch_is_foreground(self):
        grid, surface, edge = self._grid_and_masks()
        surface[:, :4] = 255  # patch 0 is half spliced; patches 1 and 2 untouched
        fg, bg = label_patches(grid, surface, edge)
        assert 0 in fg

    def test_background_requires_edge_floor(self):
        grid, surface, edge = self._grid_and_masks()
        fg, bg = label_patches(grid, surface, edge, bg_edge_min=0.05)
        assert bg.size == 0
        edge[:, 8:] = 255
        fg, bg = label_patches(grid, surface, edge, bg_edge_min=0.05)
        assert 2 in bg

    def test_rejects_inverted_range(self):
        grid, surface, edge = self._grid_and_masks()
        with pytest.raises(ArgumentError):
            label_patches(grid, surface, edge, fg_range=(0.7, 0.3))


class TestScorePatches:
    def test_single_patch_self_normalizes(self):
        bank = axis_bank(4)
        data = DataMatrix(values=np.array([[3.0], [0.0], [0.0], [0.0]]))
        scores = score_patches(bank, data, use_train_mean=True)
        np.testing.assert_array_equal(scores, [1.0])

    def test_direct_formula(self):
        bank = axis_bank(2)
        data = DataMatrix(values=np.array([[2.0, 1.0, 0.0], [0.0, 0.0, 5.0]]))
        scores = score_patches(bank, data, use_train_mean=True)
        np.testing.assert_allclose(scores, [1.0, 0.25, 0.0])

    def test_zero_projection_gives_zeros(self):
        bank = axis_bank(3)
        data = DataMatrix(values=np.zeros((3, 4)))
        np.testing.assert_array_equal(score_patches(bank, data, use_train_mean=True),
                                      np.zeros(4))

    def test_permutation_equivariance(self, rng):
        bank = axis_bank(5, k=2)
        values = rng.standard_normal((5, 9))
        perm = rng.permutation(9)
        s1 = score_patches(bank, DataMatrix(values=values))
        s2 = score_patches(bank, DataMatrix(values=values[:, perm]))
        np.testing.assert_allclose(s2, s1[perm], atol=1e-12)

    def test_separates_boundary_from_background_patches(self):
        from cpcapp import SplitMix64, build_covariance_pair, fit_cpcapp

        seeds = SplitMix64(7).spawn_seeds(4)
        fg_cols, bg_cols = [], []
        for s in seeds[:3]:
            spec = SyntheticSpec(kind="spliced-image", seed=s, n_fg=1, n_bg=1)
            probe, surface, _ = gen_spliced_image(spec)
            edge = edge_mask(probe)
            grid = extract_patches(probe, 8, 4)
            fg_idx, bg_idx = label_patches(grid, surface, edge)
            fg_cols.append(grid.patches.values[:, fg_idx])
            bg_cols.append(grid.patches.values[:, bg_idx])
        bank = fit_cpcapp(
            build_covariance_pair(
                DataMatrix(values=np.concatenate(bg_cols, axis=1)),
                DataMatrix(values=np.concatenate(fg_cols, axis=1)),
            ),
            6,
        )
        spec = SyntheticSpec(kind="spliced-image", seed=seeds[3], n_fg=1, n_bg=1)
        probe, surface, _ = gen_spliced_image(spec)
        edge = edge_mask(probe)
        grid = extract_patches(probe, 8, 4)
        fg_idx, bg_idx = label_patches(grid, surface, edge)
        scores = score_patches(bank, grid.patches)
        assert scores[fg_idx].mean() > scores[bg_idx].mean()


class TestReconstructMap:
    def test_full_cover_full_mask(self):
        grid = extract_patches(np.zeros((8, 8)), 8, 4)
        pmap = reconstruct_map([1.0], grid, np.full((8, 8), 255, dtype=np.uint8))
        np.testing.assert_array_equal(pmap.values, np.ones((8, 8)))

    def test_zero_mask_zeroes_map(self):
        grid = extract_patches(np.zeros((8, 8)), 8, 4)
        pmap = reconstruct_map([1.0], grid, np.zeros((8, 8), dtype=np.uint8))
        np.testing.assert_array_equal(pmap.values, np.zeros((8, 8)))

    def test_overlap_averages(self):
        grid = extract_patches(np.zeros((8, 12)), 8, 4)
        full = np.full((8, 12), 255, dtype=np.uint8)
        pmap = reconstruct_map([0.2, 0.8], grid, full)
        np.testing.assert_allclose(pmap.values[:, :4], 0.2)
        np.testing.assert_allclose(pmap.values[:, 4:8], 0.5)
        np.testing.assert_allclose(pmap.values[:, 8:], 0.8)

    def test_bounded_by_edge_mask(self, rng):
        img = rng.integers(0, 255, (16, 16)).astype(np.uint8)
        grid = extract_patches(img, 8, 4)
        edge = (rng.random((16, 16)) < 0.5).astype(np.uint8) * 255
        scores = rng.random(grid.patches.samples)
        pmap = reconstruct_map(scores, grid, edge)
        assert np.all(pmap.values[edge == 0] == 0)
        assert np.all(pmap.values <= (edge > 0).astype(float) + 1e-12)

    def test_rejects_count_mismatch(self):
        grid = extract_patches(np.zeros((8, 8)), 8, 4)
        with pytest.raises(ArgumentError):
            reconstruct_map([0.5, 0.5], grid, np.zeros((8, 8), dtype=np.uint8))

    def test_uncovered_pixels_stay_zero(self):
        grid = extract_patches(np.zeros((8, 12)), 8, 8)  # columns 8-11 uncovered
        full = np.full((8, 12), 255, dtype=np.uint8)
        pmap = reconstruct_map([0.9], grid, full)
        np.testing.assert_allclose(pmap.values[:, :8], 0.9)
        np.testing.assert_array_equal(pmap.values[:, 8:], 0.0)


class TestMetrics:
    def test_f1_perfect(self):
        assert f1_score(ConfusionCounts(tp=5, tn=0, fp=0, fn=0)) == 1.0

    def test_f1_hand_value(self):
        assert f1_score(ConfusionCounts(tp=2, tn=0, fp=1, fn=1)) == pytest.approx(2 / 3)

    def test_f1_degenerate(self):
        assert f1_score(ConfusionCounts(tp=0, tn=9, fp=0, fn=0)) == 0.0

    def test_mcc_perfect(self):
        assert mcc_score(ConfusionCounts(tp=3, tn=3, fp=0, fn=0)) == 1.0

    def test_mcc_total_inversion(self):
        assert mcc_score(ConfusionCounts(tp=0, tn=0, fp=3, fn=3)) == -1.0

    def test_mcc_hand_value(self):
        got = mcc_score(ConfusionCounts(tp=6, tn=3, fp=1, fn=2))
        assert got == pytest.approx(16.0 / math.sqrt(1120.0))

    def test_mcc_degenerate(self):
        assert mcc_score(ConfusionCounts(tp=0, tn=5, fp=0, fn=0)) == 0.0

    def test_exact_match_against_formula_oracle(self, rng):
        for _ in range(1000):
            tp, tn, fp, fn = (int(x) for x in rng.integers(0, 500, 4))
            c = ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)
            denom = 2 * tp + fn + fp
            assert f1_score(c) == (2 * tp / denom if denom else 0.0)
            prod = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
            want = ((tp * tn - fp * fn) / math.sqrt(prod)) if prod else 0.0
            assert mcc_score(c) == want

    def test_mcc_swap_identity(self, rng):
        for _ in range(200):
            tp, tn, fp, fn = (int(x) for x in rng.integers(0, 100, 4))
            a = mcc_score(ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn))
            b = mcc_score(ConfusionCounts(tp=fn, tn=fp, fp=tn, fn=tp))
            assert a == pytest.approx(-b, abs=1e-15)


class TestBinarize:
    def test_perfect_prediction(self):
        truth = (np.arange(64).reshape(8, 8) % 3 == 0).astype(np.uint8) * 255
        pmap = ProbabilityMap(width=8, height=8, values=(truth > 0).astype(float))
        c = binarize_and_score(pmap, truth, 0.5)
        assert c.fp == 0 and c.fn == 0

    def test_inverted_prediction(self):
        truth = (np.arange(64).reshape(8, 8) % 3 == 0).astype(np.uint8) * 255
        pmap = ProbabilityMap(width=8, height=8, values=1.0 - (truth > 0).astype(float))
        c = binarize_and_score(pmap, truth, 0.5)
        assert c.tp == 0 and c.tn == 0

    def test_matches_pixel_loop_oracle(self, rng):
        values = rng.random((16, 16))
        truth = (rng.random((16, 16)) < 0.3).astype(np.uint8) * 255
        pmap = ProbabilityMap(width=16, height=16, values=values)
        c = binarize_and_score(pmap, truth, 0.4)
        tp = tn = fp = fn = 0
        for i in range(16):
            for j in range(16):
                pred = values[i, j] >= 0.4
                pos = truth[i, j] > 0
                tp += pred and pos
                tn += (not pred) and (not pos)
                fp += pred and not pos
                fn += (not pred) and pos
        assert (c.tp, c.tn, c.fp, c.fn) == (tp, tn, fp, fn)

    def test_rejects_dim_mismatch(self):
        pmap = ProbabilityMap(width=4, height=4, values=np.zeros((4, 4)))
        with pytest.raises(ShapeError):
            binarize_and_score(pmap, np.zeros((5, 5)), 0.5)


class TestRandomBaseline:
    def test_empty_masks(self):
        assert random_scorer_expected_f1(np.zeros((4, 4)), np.zeros((4, 4))) == 0.0

    def test_hand_value(self):
        edge = np.zeros((2, 4))
        edge[0] = 1
        truth = np.zeros((2, 4))
        truth[0, :2] = 1
        # tp=1, fp=1, fn=1 -> F1 = 2/(2+1+1)
        assert random_scorer_expected_f1(edge, truth) == pytest.approx(0.5)
