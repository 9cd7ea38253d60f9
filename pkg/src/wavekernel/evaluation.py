"""Scoring, rolling evaluation, baselines and synthetic test processes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InsufficientHistoryError, InvalidInputError
from .predictor import KernelSpec, PipelineConfig, predict_one_ahead

__all__ = [
    "EvalReport",
    "rmae",
    "rolling_eval",
    "naive_seasonal",
    "wk_method",
    "gen_synthetic",
    "split_segments",
    "summarize",
]


@dataclass(frozen=True)
class EvalReport:
    """Relative mean-absolute error of one predicted segment."""

    rmae: float
    per_point_abs_rel_err: np.ndarray
    n0: int
    method_id: str


def rmae(pred, truth, n0: int = 0, method_id: str = "",
         zero_floor: float | None = None) -> EvalReport:
    """Mean over time points of |pred - truth| / |truth|.

    Truth values of exactly zero make the ratio undefined; by default
    that is an error naming the offending index, or pass ``zero_floor``
    to clamp |truth| from below.
    """
    p = np.asarray(pred, dtype=float)
    t = np.asarray(truth, dtype=float)
    if p.shape != t.shape:
        raise ConfigError(f"shape mismatch: pred {p.shape} vs truth {t.shape}")
    denom = np.abs(t)
    if zero_floor is not None:
        denom = np.maximum(denom, zero_floor)
    elif np.any(denom == 0):
        idx = int(np.flatnonzero(denom == 0)[0])
        raise InvalidInputError(
            f"truth value is zero at index {idx}; relative error undefined "
            "(pass zero_floor to clamp)"
        )
    per_point = np.abs(p - t) / denom
    return EvalReport(rmae=float(per_point.mean()),
                      per_point_abs_rel_err=per_point, n0=n0,
                      method_id=method_id)


def split_segments(series, P: int, drop_remainder: bool = False) -> np.ndarray:
    """Cut a 1-d series into consecutive length-P segments."""
    x = np.asarray(series, dtype=float)
    if P < 2:
        raise ConfigError(f"segment length must be >= 2, got {P}")
    rem = x.size % P
    if rem:
        if not drop_remainder:
            raise ConfigError(
                f"series length {x.size} is not a multiple of P={P} "
                f"({rem} trailing values); pass drop_remainder to discard them"
            )
        x = x[: x.size - rem]
    if x.size == 0:
        raise ConfigError("series has no complete segments")
    return x.reshape(-1, P)


def naive_seasonal(segments) -> np.ndarray:
    """Forecast the next segment by repeating the last observed one."""
    segs = list(segments)
    if not segs:
        raise InsufficientHistoryError("empty history")
    return np.asarray(segs[-1], dtype=float)


def wk_method(kernel: KernelSpec, config: PipelineConfig = PipelineConfig()):
    """Wrap the wavelet-kernel predictor as a rolling-eval method."""

    def method(history):
        return predict_one_ahead(history, kernel, config=config).curve

    method.method_id = "wk"
    return method


def rolling_eval(series, P: int, method, min_history: int = 2,
                 method_id: str | None = None,
                 drop_remainder: bool = False) -> list[EvalReport]:
    """Rolling-origin evaluation: fit on each prefix, score the next segment.

    ``method`` is a callable mapping a list of past segments to a
    length-P forecast; it only ever sees segments strictly before the
    one being scored.
    """
    segs = split_segments(series, P, drop_remainder=drop_remainder)
    n = segs.shape[0]
    if n < min_history + 1:
        raise ConfigError(
            f"need at least {min_history + 1} segments, got {n}"
        )
    if method_id is None:
        method_id = getattr(method, "method_id", getattr(method, "__name__", "method"))
    reports = []
    for i in range(min_history, n):
        pred = method([segs[m] for m in range(i)])
        reports.append(rmae(pred, segs[i], n0=i + 1, method_id=method_id))
    return reports


def summarize(reports) -> dict:
    """Median/mean aggregate of rolling-eval scores."""
    vals = np.array([r.rmae for r in reports], dtype=float)
    return {
        "count": int(vals.size),
        "mean_rmae": float(vals.mean()),
        "median_rmae": float(np.median(vals)),
    }


def _seasonal_profile(P: int) -> np.ndarray:
    t = np.arange(P)
    return 10.0 + 2.0 * np.sin(2 * np.pi * t / P) + 0.7 * np.sin(4 * np.pi * t / P + 1.0)


def gen_synthetic(kind: str, n: int, P: int, noise: float, seed: int,
                  ar_coef: float = 0.6, contraction: float = 0.5) -> np.ndarray:
    """Generate a stationary segmented test series of n length-P blocks.

    ``seasonal_ar``: fixed seasonal profile plus AR(1) noise running
    across the whole series (stationary initial state).

    ``markov_functional``: blocks follow Z_{i+1} = base + g(Z_i - base)
    + noise, where g contracts deviations by ``contraction`` and
    smooths them with a mean-preserving circular average, so segment
    means follow an AR(1) with that coefficient.
    """
    if n < 1 or P < 2 or noise < 0:
        raise ConfigError("need n >= 1, P >= 2, noise >= 0")
    rng = np.random.Generator(np.random.Philox(key=seed))
    if kind == "seasonal_ar":
        profile = np.tile(_seasonal_profile(P), n)
        e = np.empty(n * P)
        if noise == 0:
            return profile
        e0 = rng.normal(0.0, noise / np.sqrt(1 - ar_coef**2))
        innov = rng.normal(0.0, noise, size=n * P)
        prev = e0
        for t in range(n * P):
            prev = ar_coef * prev + innov[t]
            e[t] = prev
        return profile + e
    if kind == "markov_functional":
        base = _seasonal_profile(P)
        t = np.arange(P)
        # innovations live in a low-dimensional smooth subspace so the
        # block-to-block dependence is actually learnable from finite n
        modes = np.stack([
            np.ones(P),
            np.sin(2 * np.pi * t / P),
            np.cos(2 * np.pi * t / P),
        ])
        smooth_kernel = np.array([0.25, 0.5, 0.25])

        def innovate():
            return rng.normal(0.0, noise, size=3) @ modes if noise > 0 else 0.0

        segs = np.empty((n, P))
        dev = np.zeros(P) + innovate()
        segs[0] = base + dev
        for i in range(1, n):
            smoothed = sum(
                w * np.roll(dev, s) for w, s in zip(smooth_kernel, (-1, 0, 1))
            )
            dev = contraction * smoothed + innovate()
            segs[i] = base + dev
        return segs.reshape(-1)
    raise ConfigError(f"unknown generator kind {kind!r}")
