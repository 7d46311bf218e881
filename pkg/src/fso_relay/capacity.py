"""Monte-Carlo ergodic capacity, relay-placement sweeps, and mode comparisons.

Capacity is the expectation of log(1 + SNR) over the three independent
log-normal hop gains, estimated by plain Monte-Carlo. All estimators share a
deterministic draw schedule keyed only by (seed, chunk index), so every grid
point, variance mode, and background level sees identical underlying normals:
surfaces computed at the same seed are directly comparable (common random
numbers) and results are bit-identical regardless of worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .channel import build_hop, hop_gains
from .params import ParameterError, SystemParams
from .relay import VarianceMode, electrical_snr

_LN2 = math.log(2.0)
_CHUNK = 1 << 16


class GeometryError(ValueError):
    """Relay distances or grid settings violate the link geometry."""


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte-Carlo estimate of ergodic capacity per channel use.

    mean_bits is in bits unless the estimator was asked for natural-log
    units, in which case both mean_bits and std_error are in nats.
    """

    mean_bits: float
    std_error: float
    n_samples: int
    seed: int
    mode: VarianceMode


@dataclass(frozen=True)
class PlacementPoint:
    """One relay geometry (d_sr + d_rr + d_rd = d_sd) and its capacity estimate."""

    d_sr: float
    d_rr: float
    d_rd: float
    estimate: CapacityEstimate


@dataclass(frozen=True)
class SweepResult:
    """All evaluated placements plus the argmax point."""

    grid_step: float
    points: tuple[PlacementPoint, ...]
    optimum: PlacementPoint


def instantaneous_capacity(snr):
    """Spectral efficiency log2(1 + snr) in bits per channel use."""
    arr = np.asarray(snr, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("snr must be finite and non-negative")
    out = np.log1p(arr) / _LN2
    return float(out) if out.ndim == 0 else out


def _validate_seed(seed) -> int:
    if not (isinstance(seed, int) and not isinstance(seed, bool) and seed >= 0):
        raise ParameterError(f"seed must be a non-negative integer, got {seed!r}")
    return seed


def _validate_samples(n_samples) -> int:
    if not (isinstance(n_samples, int) and not isinstance(n_samples, bool) and n_samples >= 100):
        raise ParameterError(f"n_samples must be an integer >= 100, got {n_samples!r}")
    return n_samples


def _standard_normals(seed: int, n_samples: int) -> np.ndarray:
    """Draw schedule: chunk c comes from the stream keyed by (seed, c)."""
    out = np.empty((n_samples, 3))
    start = 0
    chunk_index = 0
    while start < n_samples:
        count = min(_CHUNK, n_samples - start)
        rng = np.random.default_rng(np.random.SeedSequence((seed, chunk_index)))
        out[start:start + count] = rng.standard_normal((count, 3))
        start += count
        chunk_index += 1
    return out


def _resolve_threads(threads) -> int:
    if threads is None:
        return os.cpu_count() or 1
    if not (isinstance(threads, int) and not isinstance(threads, bool) and threads >= 1):
        raise ParameterError(f"threads must be a positive integer, got {threads!r}")
    return threads


def _run_indexed(task: Callable[[int], None], count: int, threads) -> None:
    """Run task(0..count-1); results must be written into per-index slots."""
    workers = min(_resolve_threads(threads), count) if count else 0
    if workers <= 1:
        for index in range(count):
            task(index)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(task, range(count)))


def _estimate(gains: Sequence[np.ndarray], params: SystemParams, mode: VarianceMode,
              n_samples: int, seed: int, nats: bool) -> CapacityEstimate:
    snr = electrical_snr(gains[0], gains[1], gains[2], params, mode)
    samples = np.log1p(snr)
    if not nats:
        samples = samples / _LN2
    mean = float(np.mean(samples))
    std_error = float(np.std(samples, ddof=1) / math.sqrt(n_samples))
    return CapacityEstimate(mean_bits=mean, std_error=std_error,
                            n_samples=n_samples, seed=seed, mode=mode)


def _validate_geometry(d_sr: float, d_rr: float, d_rd: float, d_sd: float) -> None:
    for name, value in (("d_sr", d_sr), ("d_rr", d_rr), ("d_rd", d_rd)):
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise GeometryError(f"{name} must be a positive finite length, got {value!r}")
    total = d_sr + d_rr + d_rd
    if abs(total - d_sd) > 1e-9:
        raise GeometryError(f"hop lengths sum to {total} m, expected d_sd = {d_sd} m")


def ergodic_capacity(d_sr: float, d_rr: float, d_rd: float, params: SystemParams,
                     mode: VarianceMode = VarianceMode.MOMENT_COMPOSITION,
                     n_samples: int = 200_000, seed: int = 42,
                     nats: bool = False) -> CapacityEstimate:
    """Estimate mean capacity and its standard error for one relay geometry."""
    _validate_geometry(d_sr, d_rr, d_rd, params.d_sd)
    _validate_samples(n_samples)
    _validate_seed(seed)
    z = _standard_normals(seed, n_samples)
    hops = [build_hop(d, params) for d in (d_sr, d_rr, d_rd)]
    gains = [hop_gains(hop, z[:, column]) for column, hop in enumerate(hops)]
    return _estimate(gains, params, mode, n_samples, seed, nats)


def sweep(params: SystemParams, grid_step: float,
          mode: VarianceMode = VarianceMode.MOMENT_COMPOSITION,
          n_samples: int = 20_000, seed: int = 42,
          threads: int | None = None, nats: bool = False) -> SweepResult:
    """Evaluate capacity on the full (d_sr, d_rr) grid and locate the optimum.

    The grid is d_sr = i * grid_step, d_rr = j * grid_step for i, j >= 1 with
    d_rd = d_sd - d_sr - d_rr >= grid_step. Ties at the optimum resolve to the
    smallest d_sr, then the smallest d_rr.
    """
    if not (isinstance(grid_step, (int, float)) and math.isfinite(grid_step) and grid_step > 0):
        raise GeometryError(f"grid_step must be positive, got {grid_step!r}")
    _validate_samples(n_samples)
    _validate_seed(seed)
    n_units = int(math.floor(params.d_sd / grid_step + 1e-9))
    pairs = [(i, j) for i in range(1, n_units - 1) for j in range(1, n_units - i)]
    if not pairs:
        raise GeometryError(
            f"grid_step {grid_step} m leaves no valid relay placement inside d_sd = {params.d_sd} m")

    z = _standard_normals(seed, n_samples)
    geometries = []
    gain_cache: dict[tuple[int, float], np.ndarray] = {}
    for i, j in pairs:
        d_sr = i * grid_step
        d_rr = j * grid_step
        d_rd = params.d_sd - d_sr - d_rr
        geometries.append((d_sr, d_rr, d_rd))
        for column, distance in enumerate((d_sr, d_rr, d_rd)):
            key = (column, distance)
            if key not in gain_cache:
                gain_cache[key] = hop_gains(build_hop(distance, params), z[:, column])

    points: list[PlacementPoint | None] = [None] * len(pairs)

    def evaluate(index: int) -> None:
        d_sr, d_rr, d_rd = geometries[index]
        gains = (gain_cache[(0, d_sr)], gain_cache[(1, d_rr)], gain_cache[(2, d_rd)])
        points[index] = PlacementPoint(
            d_sr, d_rr, d_rd, _estimate(gains, params, mode, n_samples, seed, nats))

    _run_indexed(evaluate, len(pairs), threads)

    optimum = points[0]
    for point in points[1:]:
        if point.estimate.mean_bits > optimum.estimate.mean_bits:
            optimum = point
    return SweepResult(grid_step=float(grid_step), points=tuple(points), optimum=optimum)


def compare_modes(params: SystemParams, d_rd_grid: Iterable[float],
                  mode_list: Sequence[VarianceMode], n_samples: int = 20_000,
                  seed: int = 42, threads: int | None = None,
                  nats: bool = False) -> list[tuple[float, VarianceMode, CapacityEstimate]]:
    """Capacity per (d_rd, mode) with d_sr = d_rr = (d_sd - d_rd) / 2.

    All modes and grid points share identical fading draws, so differences
    between rows reflect the variance approximation, not sampling noise.
    """
    d_rd_list = [float(d) for d in d_rd_grid]
    if not d_rd_list:
        raise GeometryError("d_rd grid is empty")
    modes = tuple(mode_list)
    if not modes:
        raise ParameterError("mode_list must not be empty")
    for d_rd in d_rd_list:
        if not (math.isfinite(d_rd) and 0.0 < d_rd < params.d_sd):
            raise GeometryError(f"d_rd must lie strictly inside (0, {params.d_sd}) m, got {d_rd!r}")
    _validate_samples(n_samples)
    _validate_seed(seed)

    z = _standard_normals(seed, n_samples)
    groups: list[list[tuple[float, VarianceMode, CapacityEstimate]] | None] = [None] * len(d_rd_list)

    def evaluate(index: int) -> None:
        d_rd = d_rd_list[index]
        d_half = (params.d_sd - d_rd) / 2.0
        hops = [build_hop(d, params) for d in (d_half, d_half, d_rd)]
        gains = [hop_gains(hop, z[:, column]) for column, hop in enumerate(hops)]
        groups[index] = [
            (d_rd, mode, _estimate(gains, params, mode, n_samples, seed, nats))
            for mode in modes
        ]

    _run_indexed(evaluate, len(d_rd_list), threads)
    return [row for group in groups for row in group]
