"""TV scoring against brute-force oracles and IQR flagging semantics."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from resurface import (
    BlockSet,
    ConfigError,
    DegenerateBlockError,
    DetectorConfig,
    ImageTensor,
    ShapeError,
    StatisticsError,
    TvGrid,
    flag_blocks,
    image_to_block,
    iqr_threshold,
    score_grid,
    tv_score,
)


def tv_oracle(block: np.ndarray) -> float:
    """Loop every horizontally/vertically adjacent in-block pair."""
    k = block.shape[0]
    total = 0.0
    for i in range(k):
        for j in range(k):
            if j + 1 < k:
                total += abs(block[i, j] - block[i, j + 1])
            if i + 1 < k:
                total += abs(block[i, j] - block[i + 1, j])
    return total


def quantile_oracle(values, q: float) -> float:
    """Sort-and-interpolate at position q * (len - 1)."""
    s = sorted(values)
    pos = q * (len(s) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    return s[lo] + (pos - lo) * (s[hi] - s[lo])


def threshold_oracle(values, factor=1.5) -> float:
    q1 = quantile_oracle(values, 0.25)
    q3 = quantile_oracle(values, 0.75)
    return q3 + factor * (q3 - q1)


unit_floats = st.floats(0.0, 1.0, allow_nan=False, width=64)


class TestTvScore:
    def test_constant_block_scores_zero(self):
        assert tv_score(np.full((4, 4), 0.7)) == 0.0

    def test_two_by_two_checker(self):
        assert tv_score([[0.0, 1.0], [1.0, 0.0]]) == 4.0

    def test_matches_oracle_random(self, rng):
        block = rng.random((8, 8))
        assert tv_score(block) == pytest.approx(tv_oracle(block), abs=1e-9)

    def test_pair_count(self):
        # a block of distinct values contributes one term per adjacent pair
        k = 5
        block = np.arange(k * k).reshape(k, k) / (k * k)
        # all horizontal steps are 1/(k*k), vertical steps are k/(k*k)
        expected = k * (k - 1) * (1 / (k * k)) + k * (k - 1) * (k / (k * k))
        assert tv_score(block) == pytest.approx(expected, abs=1e-12)

    def test_degenerate_block(self):
        with pytest.raises(DegenerateBlockError):
            tv_score(np.array([[0.5]]))

    def test_non_square_block(self):
        with pytest.raises(ShapeError):
            tv_score(np.zeros((2, 3)))

    @given(arrays(np.float64, (6, 6), elements=unit_floats))
    def test_nonnegative_and_zero_iff_constant(self, block):
        s = tv_score(block)
        assert s >= 0.0
        if np.all(block == block[0, 0]):
            assert s == 0.0
        elif s == 0.0:
            assert np.all(block == block[0, 0])

    @given(
        arrays(np.float64, (5, 5), elements=st.floats(0.0, 0.5, allow_nan=False)),
        st.floats(0.0, 0.5, allow_nan=False),
    )
    def test_offset_invariance(self, block, c):
        assert tv_score(block + c) == pytest.approx(tv_score(block), abs=1e-9)

    @given(
        arrays(np.float64, (5, 5), elements=unit_floats),
        st.floats(0.0, 1.0, allow_nan=False),
    )
    def test_homogeneity(self, block, alpha):
        assert tv_score(alpha * block) == pytest.approx(
            alpha * tv_score(block), abs=1e-9
        )


class TestThresholds:
    def test_spec_example(self):
        assert iqr_threshold(np.array([1.0, 2.0, 3.0, 4.0, 100.0])) == 7.0

    def test_quartile_positions(self):
        v = np.array([1.0, 2.0, 3.0, 4.0, 100.0])
        assert np.percentile(v, 25) == 2.0
        assert np.percentile(v, 75) == 4.0

    @given(st.lists(st.floats(0, 1e6, allow_nan=False), min_size=4, max_size=200))
    def test_matches_sort_and_interpolate_oracle(self, values):
        got = iqr_threshold(np.array(values))
        assert got == pytest.approx(threshold_oracle(values), abs=1e-9)

    def test_too_few_samples(self):
        with pytest.raises(StatisticsError):
            iqr_threshold(np.array([1.0, 2.0, 3.0]))

    @given(
        st.lists(st.floats(0, 1e3, allow_nan=False), min_size=4, max_size=100),
        st.floats(0.5, 3.0, allow_nan=False),
    )
    def test_custom_factor(self, values, factor):
        got = iqr_threshold(np.array(values), factor)
        assert got == pytest.approx(threshold_oracle(values, factor), abs=1e-9)


def grid_from_scores(scores_row, threshold):
    """A 1-channel-meaningful TvGrid with the same scores in all channels."""
    nk = len(scores_row)
    nrow = int(round(nk**0.5))
    assert nrow * nrow == nk
    scores = np.tile(np.asarray(scores_row, dtype=float), (3, 1))
    return TvGrid(
        block_side=2, nrow=nrow, scores=scores, thresholds=np.full(3, threshold)
    )


class TestFlagging:
    def test_high_outlier_flagged(self):
        # scores [1,2,3,4,100] -> O = 7, only the 100 exceeds it
        row = [1.0, 2.0, 3.0, 4.0, 100.0, 1.0, 2.0, 3.0, 4.0]
        grid = grid_from_scores(row, iqr_threshold(np.array([1, 2, 3, 4, 100.0])))
        flags = flag_blocks(grid)
        assert {b for _, b in flags} == {4}

    def test_zero_iqr_flags_nothing(self):
        grid = grid_from_scores([5.0] * 4, 5.0)
        assert flag_blocks(grid) == set()

    def test_absolute_floor_suppresses(self):
        grid = grid_from_scores([0.0, 0.0, 0.0, 0.01], 0.0)
        assert len(flag_blocks(grid)) == 3  # one block per channel
        assert flag_blocks(grid, absolute_floor=0.5) == set()

    def test_strict_inequality(self):
        grid = grid_from_scores([1.0, 1.0, 1.0, 2.0], 2.0)
        assert flag_blocks(grid) == set()

    @given(
        st.lists(st.floats(0, 1e4, allow_nan=False), min_size=4, max_size=144).filter(
            lambda v: int(round(len(v) ** 0.5)) ** 2 == len(v)
        )
    )
    def test_flag_fraction_bounded(self, values):
        nk = len(values)
        grid = grid_from_scores(values, iqr_threshold(np.array(values)))
        flags = flag_blocks(grid)
        for c in range(3):
            assert sum(1 for cc, _ in flags if cc == c) <= 0.25 * nk


class TestScoreGrid:
    def test_scores_match_per_block_tv(self, rng):
        x = ImageTensor(rng.random((3, 8, 8)))
        bs = image_to_block(x, 2)
        grid = score_grid(bs, DetectorConfig(block_side=2))
        for c in range(3):
            for b in range(bs.block_count):
                assert grid.scores[c, b] == pytest.approx(
                    tv_score(bs.blocks[c, b]), abs=1e-12
                )

    def test_thresholds_match_oracle(self, rng):
        x = ImageTensor(rng.random((3, 12, 12)))
        grid = score_grid(image_to_block(x, 3), DetectorConfig(block_side=3))
        for c in range(3):
            assert grid.thresholds[c] == pytest.approx(
                threshold_oracle(grid.scores[c]), abs=1e-9
            )

    def test_noise_block_is_unique_outlier_every_channel(self, rng):
        data = np.full((3, 16, 16), 0.5)
        data[:, 4:8, 8:12] = rng.random((3, 4, 4))
        grid = score_grid(
            image_to_block(ImageTensor(data), 4), DetectorConfig(block_side=4)
        )
        flags = flag_blocks(grid)
        noisy = 1 * 4 + 2  # grid row 1, col 2
        assert flags == {(c, noisy) for c in range(3)}

    def test_block_side_mismatch(self, rng):
        bs = image_to_block(ImageTensor(rng.random((3, 8, 8))), 2)
        with pytest.raises(ShapeError):
            score_grid(bs, DetectorConfig(block_side=4))

    def test_too_few_blocks(self, rng):
        bs = image_to_block(ImageTensor(rng.random((3, 8, 8))), 8)
        with pytest.raises(StatisticsError):
            score_grid(bs, DetectorConfig(block_side=8))

    def test_channel_permutation_permutes_everything(self, rng):
        x = rng.random((3, 12, 12))
        perm = [2, 0, 1]
        cfg = DetectorConfig(block_side=3)
        g0 = score_grid(image_to_block(ImageTensor(x), 3), cfg)
        g1 = score_grid(image_to_block(ImageTensor(x[perm]), 3), cfg)
        assert np.array_equal(g1.scores, g0.scores[perm])
        assert np.array_equal(g1.thresholds, g0.thresholds[perm])
        f0 = flag_blocks(g0)
        f1 = flag_blocks(g1)
        inv = {old: new for new, old in enumerate(perm)}
        assert f1 == {(inv[c], b) for c, b in f0}


class TestDetectorConfig:
    def test_defaults(self):
        cfg = DetectorConfig()
        assert cfg.block_side == 28
        assert cfg.iqr_factor == 1.5
        assert cfg.absolute_floor is None

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"block_side": 1},
            {"iqr_factor": 0.0},
            {"iqr_factor": -1.0},
            {"quantile_method": "nearest"},
            {"norm_p": 1},
            {"norm_power": 2},
            {"absolute_floor": -0.5},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ConfigError):
            DetectorConfig(**kwargs)
