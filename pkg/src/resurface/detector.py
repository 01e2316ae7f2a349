"""Per-block total-variation scoring and channel-wise IQR outlier flagging.

The score of a block is the total variation over its interior 4-neighbor
pairs:

    tv(block) = sum over horizontally and vertically adjacent pixels
                of |a - b|

(for scalar per-channel intensities the l2 norm of the difference,
raised to the first power, is the absolute difference).  A k x k block
has exactly 2k(k-1) such pairs.  Pairs never cross block borders.

Per channel, a block is suspect when its score strictly exceeds

    O[c] = Q3[c] + iqr_factor * (Q3[c] - Q1[c])

where Q1/Q3 are the 25th/75th percentiles of that channel's nk scores,
computed by linear interpolation over the sorted values (positions
0.25*(nk-1) and 0.75*(nk-1)).  Only the high end is thresholded; low
scores are never suspect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import CHANNELS, BlockSet
from .errors import ConfigError, DegenerateBlockError, ShapeError, StatisticsError

__all__ = ["DetectorConfig", "TvGrid", "tv_score", "iqr_threshold", "score_grid", "flag_blocks"]

MIN_BLOCKS_FOR_QUARTILES = 4


@dataclass(frozen=True)
class DetectorConfig:
    """Detector knobs.

    absolute_floor is an extra guard for near-flat images: when set, a
    block is flagged only if its score also exceeds the floor.  Disabled
    by default.  norm_p / norm_power and the quantile method are fixed
    to the supported scheme; other values are rejected rather than
    silently approximated.
    """

    block_side: int = 28
    iqr_factor: float = 1.5
    quantile_method: str = "linear"
    norm_p: int = 2
    norm_power: int = 1
    absolute_floor: float | None = None

    def __post_init__(self):
        if self.block_side < 2:
            raise ConfigError(f"block_side must be >= 2, got {self.block_side}")
        if not self.iqr_factor > 0:
            raise ConfigError(f"iqr_factor must be > 0, got {self.iqr_factor}")
        if self.quantile_method != "linear":
            raise ConfigError(f"unsupported quantile method {self.quantile_method!r}")
        if (self.norm_p, self.norm_power) != (2, 1):
            raise ConfigError(
                f"only the l2 norm to the first power is supported, "
                f"got p={self.norm_p}, q={self.norm_power}"
            )
        if self.absolute_floor is not None and self.absolute_floor < 0:
            raise ConfigError("absolute_floor must be nonnegative")


@dataclass(frozen=True, eq=False)
class TvGrid:
    """Per-(channel, block) TV scores plus per-channel outlier thresholds."""

    block_side: int
    nrow: int
    scores: np.ndarray      # (3, nk), nonnegative
    thresholds: np.ndarray  # (3,)

    def __post_init__(self):
        scores = np.array(self.scores, dtype=np.float64, copy=True)
        thresholds = np.array(self.thresholds, dtype=np.float64, copy=True)
        nk = self.nrow * self.nrow
        if scores.shape != (CHANNELS, nk):
            raise ShapeError(f"scores must have shape (3, {nk}), got {scores.shape}")
        if thresholds.shape != (CHANNELS,):
            raise ShapeError(f"thresholds must have shape (3,), got {thresholds.shape}")
        if scores.size and scores.min() < 0:
            raise ShapeError("TV scores must be nonnegative")
        scores.setflags(write=False)
        thresholds.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "thresholds", thresholds)

    @property
    def block_count(self) -> int:
        return self.nrow * self.nrow


def tv_score(block) -> float:
    """Total variation of one single-channel block.

    Raises:
        DegenerateBlockError: for blocks smaller than 2x2 (no pairs).
    """
    arr = np.asarray(block, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"block must be square 2-D, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DegenerateBlockError(
            f"TV of a {arr.shape[0]}x{arr.shape[1]} block is degenerate; need side >= 2"
        )
    horiz = np.abs(np.diff(arr, axis=1)).sum()
    vert = np.abs(np.diff(arr, axis=0)).sum()
    return float(horiz + vert)


def iqr_threshold(scores: np.ndarray, iqr_factor: float = 1.5) -> float:
    """Q3 + iqr_factor * (Q3 - Q1) of a 1-D score vector."""
    v = np.asarray(scores, dtype=np.float64)
    if v.ndim != 1 or v.size < MIN_BLOCKS_FOR_QUARTILES:
        raise StatisticsError(
            f"need at least {MIN_BLOCKS_FOR_QUARTILES} scores for quartiles, got {v.size}"
        )
    q1, q3 = np.percentile(v, [25.0, 75.0])  # linear interpolation
    return float(q3 + iqr_factor * (q3 - q1))


def score_grid(bs: BlockSet, cfg: DetectorConfig) -> TvGrid:
    """Score every block of every channel and derive channel thresholds.

    Raises:
        ShapeError: if the block set's block side disagrees with cfg.
        StatisticsError: if fewer than 4 blocks per channel.
    """
    if bs.block_side != cfg.block_side:
        raise ShapeError(
            f"block set has side {bs.block_side}, config expects {cfg.block_side}"
        )
    nk = bs.block_count
    if nk < MIN_BLOCKS_FOR_QUARTILES:
        raise StatisticsError(
            f"quartiles need at least {MIN_BLOCKS_FOR_QUARTILES} blocks, got {nk}"
        )
    b = bs.blocks
    scores = (
        np.abs(np.diff(b, axis=3)).sum(axis=(2, 3))
        + np.abs(np.diff(b, axis=2)).sum(axis=(2, 3))
    )  # (3, nk)
    thresholds = np.array(
        [iqr_threshold(scores[c], cfg.iqr_factor) for c in range(CHANNELS)]
    )
    return TvGrid(block_side=bs.block_side, nrow=bs.nrow, scores=scores, thresholds=thresholds)


def flag_blocks(grid: TvGrid, absolute_floor: float | None = None) -> set[tuple[int, int]]:
    """Suspect (channel, block) pairs: score strictly above the channel
    threshold (and above the floor, when one is configured)."""
    above = grid.scores > grid.thresholds[:, None]
    if absolute_floor is not None:
        above &= grid.scores > absolute_floor
    cs, bs_ = np.nonzero(above)
    return {(int(c), int(b)) for c, b in zip(cs, bs_)}
