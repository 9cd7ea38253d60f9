"""Kernel-weighted one-step-ahead prediction of segment scaling coefficients.

The predicted coefficients for segment n+1 are a kernel-weighted
average of the observed next-segments: each past segment m < n is
compared to the current segment n through the multiscale distance
between their wavelet pyramids, and the kernel turns that distance into
a weight on segment m+1.  A 1/n term in the denominator keeps the
estimator well defined when every kernel value underflows (in that
regime the raw-form prediction tends to zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InsufficientHistoryError, ShapeError
from .similarity import ScaleRange
from .wavelet import (
    DEFAULT_FILTER,
    Segment,
    forward_array,
    inverse_array,
    pad_to_pow2,
)

__all__ = [
    "KernelSpec",
    "PipelineConfig",
    "PredictionResult",
    "kernel_eval",
    "normalized_weights",
    "predict_coefficients",
    "predict_one_ahead",
    "cv_bandwidth",
    "default_bandwidth_grid",
    "scaling_coefficients",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

_KERNELS = {
    "gaussian": lambda u: np.exp(-0.5 * u * u) / _SQRT_2PI,
    "laplace": lambda u: 0.5 * np.exp(-np.abs(u)),
}


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and bandwidth for the similarity weighting."""

    family: str = "gaussian"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.family not in _KERNELS:
            raise ConfigError(
                f"unknown kernel family {self.family!r}; "
                f"choose from {sorted(_KERNELS)}"
            )
        if not (self.bandwidth > 0 and np.isfinite(self.bandwidth)):
            raise ConfigError(f"bandwidth must be positive, got {self.bandwidth}")


def kernel_eval(spec: KernelSpec, u) -> np.ndarray:
    """Evaluate the kernel density at |u| (bandwidth is applied by callers)."""
    return _KERNELS[spec.family](np.asarray(u, dtype=float))


@dataclass(frozen=True)
class PipelineConfig:
    """Wavelet and similarity settings shared across the pipeline."""

    filter_id: str = DEFAULT_FILTER
    j0: int = 0
    scale_range: ScaleRange | None = None
    include_coarse: bool = False


@dataclass(frozen=True)
class PredictionResult:
    """Predicted scaling coefficients plus the reconstructed curve."""

    xi_pred: np.ndarray
    curve: np.ndarray
    weights: np.ndarray
    h_used: float
    effective_sample: float


def normalized_weights(kernel_values: np.ndarray, n: int) -> np.ndarray:
    """Resampling weights over the n-1 past segments; sums to 1 exactly.

    First term is each kernel value over the damped denominator of the
    prediction formula; the second term redistributes the 1/n damping
    mass equally so the total is exactly one, even when every kernel
    value underflows to zero (then all weights equal 1/(n-1)).
    """
    k = np.asarray(kernel_values, dtype=float)
    if k.size != n - 1:
        raise ShapeError(f"expected {n - 1} kernel values, got {k.size}")
    total = float(k.sum())
    w = k / (1.0 / n + total) + 1.0 / ((n - 1) * (1.0 + n * total))
    # rounding can land a hair outside [0, 1] (e.g. the single n=2 weight)
    return np.clip(w, 0.0, 1.0)


def scaling_coefficients(segments) -> tuple[np.ndarray, int]:
    """Stack segments into a matrix of padded finest-level coefficients.

    Accepts Segment objects or plain vectors, all of one length P.
    Returns ``(X, P)`` with X of shape (n, 2**J); under the
    interpolating convention the rows are the padded sample values.
    """
    rows = []
    orig_len = None
    for i, seg in enumerate(segments):
        if not isinstance(seg, Segment):
            seg = Segment(np.asarray(seg, dtype=float), segment_index=i + 1)
        if orig_len is None:
            orig_len = len(seg)
        elif len(seg) != orig_len:
            raise ShapeError(
                f"segment {i + 1} has length {len(seg)}, expected {orig_len}"
            )
        rows.append(pad_to_pow2(seg).values)
    if not rows:
        raise InsufficientHistoryError("no segments given")
    return np.stack(rows), orig_len


def _scale_blocks(X: np.ndarray, config: PipelineConfig):
    """Decompose rows of X and list (scale, block) pairs entering D."""
    coarse, details = forward_array(X, j0=config.j0, filter_id=config.filter_id)
    J = X.shape[-1].bit_length() - 1
    rng = config.scale_range or ScaleRange(config.j0, J - 1)
    if rng.j_lo < config.j0 or rng.j_hi > J - 1:
        raise ShapeError(
            f"scale range [{rng.j_lo}, {rng.j_hi}] outside pyramid "
            f"scales [{config.j0}, {J - 1}]"
        )
    blocks = []
    if config.include_coarse:
        blocks.append((config.j0, coarse))
    for j in range(rng.j_lo, rng.j_hi + 1):
        blocks.append((j, details[j]))
    return blocks


def _distances_to_query(blocks, query_row: int, n_cand: int) -> np.ndarray:
    """Combined distances from rows 0..n_cand-1 to a query row."""
    total = np.zeros(n_cand)
    for j, block in blocks:
        diff = block[:n_cand] - block[query_row]
        total += math.ldexp(1.0, -j) * np.sqrt(np.sum(diff * diff, axis=-1))
    return total


def _pairwise_distances(blocks, n: int) -> np.ndarray:
    """Full matrix of combined distances among the first n rows."""
    total = np.zeros((n, n))
    for j, block in blocks:
        b = block[:n]
        sq = np.sum(b * b, axis=-1)
        gram = b @ b.T
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * gram, 0.0)
        total += math.ldexp(1.0, -j) * np.sqrt(d2)
    np.fill_diagonal(total, 0.0)
    return total


def predict_coefficients(history, kernel: KernelSpec,
                         config: PipelineConfig = PipelineConfig(),
                         orig_len: int | None = None,
                         weight_mode: str = "raw") -> PredictionResult:
    """Predict the next scaling-coefficient vector from history rows 1..n.

    ``history`` is a sequence (or matrix) of n >= 2 equal-length
    power-of-two coefficient vectors; row n is the current segment.

    ``weight_mode`` selects the weighting of the observed next-segments:
    "raw" divides the kernel-weighted sum by the 1/n-damped kernel total
    (when every kernel value underflows the prediction tends to zero,
    but the denominator never drops below 1/n), while "normalized" uses
    the exactly-normalized resampling weights, making the prediction a
    convex combination of the next-segments.
    """
    X = np.asarray(history, dtype=float)
    if X.ndim != 2:
        X = np.stack([np.asarray(r, dtype=float) for r in history])
    n = X.shape[0]
    if n < 2:
        raise InsufficientHistoryError(f"need at least 2 segments, got {n}")
    blocks = _scale_blocks(X, config)
    dists = _distances_to_query(blocks, query_row=n - 1, n_cand=n - 1)
    k = kernel_eval(kernel, dists / kernel.bandwidth)
    if weight_mode == "raw":
        xi = (k @ X[1:]) / (1.0 / n + float(k.sum()))
    elif weight_mode == "normalized":
        xi = normalized_weights(k, n) @ X[1:]
    else:
        raise ConfigError(f"unknown weight_mode {weight_mode!r}")
    # reconstruct through the transform round trip (an identity for the
    # interpolating convention, kept as a structural check)
    coarse, details = forward_array(xi, j0=config.j0, filter_id=config.filter_id)
    curve = inverse_array(coarse, details, filter_id=config.filter_id)
    if orig_len is not None:
        curve = curve[:orig_len]
    return PredictionResult(
        xi_pred=xi,
        curve=curve,
        weights=normalized_weights(k, n),
        h_used=kernel.bandwidth,
        effective_sample=float(k.sum()),
    )


def predict_one_ahead(segments, kernel: KernelSpec,
                      config: PipelineConfig = PipelineConfig(),
                      weight_mode: str = "normalized") -> PredictionResult:
    """Full pipeline from raw equal-length segments to the predicted curve.

    Defaults to the normalized weighting so the forecast is a convex
    combination of observed next-segments (an exactly periodic history
    is reproduced exactly); pass ``weight_mode="raw"`` for the damped
    form.
    """
    X, P = scaling_coefficients(segments)
    if X.shape[0] < 2:
        raise InsufficientHistoryError(
            f"need at least 2 segments, got {X.shape[0]}"
        )
    return predict_coefficients(X, kernel, config=config, orig_len=P,
                                weight_mode=weight_mode)


def cv_bandwidth(segments, grid, kernel_family: str = "gaussian",
                 config: PipelineConfig = PipelineConfig(),
                 weight_mode: str = "normalized") -> tuple[float, np.ndarray]:
    """Bandwidth selection by leave-one-out cross-validation for time series.

    For each candidate h, segment i+1 is predicted from the causal
    history (segments 1..i only); the pair (segment i -> segment i+1)
    never appears in that candidate set, which is the leave-one-out
    scheme appropriate for dependent data.  The score averages the
    discrete mean-square prediction error over all cut points with at
    least one candidate pair, and the smallest h attaining the minimum
    is returned.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ConfigError("bandwidth grid is empty")
    if np.any(grid <= 0):
        raise ConfigError("bandwidth grid must be positive")
    X, P = scaling_coefficients(segments)
    n = X.shape[0]
    if n < 3:
        raise InsufficientHistoryError(f"cross-validation needs n >= 3, got {n}")
    blocks = _scale_blocks(X, config)
    D = _pairwise_distances(blocks, n)
    if kernel_family not in _KERNELS:
        raise ConfigError(f"unknown kernel family {kernel_family!r}")
    kern = _KERNELS[kernel_family]
    if weight_mode not in ("raw", "normalized"):
        raise ConfigError(f"unknown weight_mode {weight_mode!r}")
    cv_values = np.empty(grid.size)
    for gi, h in enumerate(grid):
        errs = []
        # query index q predicts segment q+1 from history rows 0..q
        for q in range(1, n - 1):
            k = kern(D[q, :q] / h)
            if weight_mode == "raw":
                xi = (k @ X[1:q + 1]) / (1.0 / (q + 1) + float(k.sum()))
            else:
                xi = normalized_weights(k, q + 1) @ X[1:q + 1]
            diff = xi[:P] - X[q + 1, :P]
            errs.append(float(np.mean(diff * diff)))
        cv_values[gi] = float(np.mean(errs))
    best = int(np.argmin(cv_values))  # argmin takes the first, i.e. smallest h
    return float(grid[best]), cv_values


def default_bandwidth_grid(segments, config: PipelineConfig = PipelineConfig(),
                           count: int = 32) -> np.ndarray:
    """Log-spaced grid spanning the 1%..99% quantiles of pairwise distances."""
    X, _ = scaling_coefficients(segments)
    n = X.shape[0]
    blocks = _scale_blocks(X, config)
    D = _pairwise_distances(blocks, n)
    vals = D[np.triu_indices(n, k=1)]
    vals = vals[vals > 0]
    if vals.size == 0:
        # degenerate history (all segments identical): any h works
        return np.logspace(-3, 0, count)
    lo = max(float(np.quantile(vals, 0.01)), 1e-12)
    hi = max(float(np.quantile(vals, 0.99)), lo * 10)
    return np.logspace(math.log10(lo), math.log10(hi), count)
