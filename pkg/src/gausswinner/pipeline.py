"""Empirical bootstrap pipeline for monthly temperature innovations.

Flow: load a station-month temperature CSV -> per-station month-of-year anomaly
-> linear detrend -> AR(1) one-step innovations -> exact 1D two-cluster
split on innovation variances -> pooled low/high variance innovation
groups -> bootstrap winner probabilities against the theoretical limit.

Stations may have gaps; innovations are only formed across pairs of
consecutive calendar months, never across a gap.  Pools concatenate all
innovations within a variance cluster and are standardized by the
low-variance pool's standard deviation so the theory's sigma_1 = 1
normalization holds exactly (winner events are invariant under common
rescaling, so this is observationally neutral).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .limits import two_group_limit
from .montecarlo import McEstimate, RngStream, StudyRow, _sum_chunks
from .scaling import critical_n1

__all__ = [
    "StationSeries",
    "Ar1Fit",
    "InnovationPool",
    "PipelineResult",
    "load_stations",
    "deseasonalize",
    "detrend_linear",
    "ar1_innovations",
    "kmeans1d_split",
    "build_pools",
    "bootstrap_winner",
    "empirical_study",
    "process_station",
    "run_pipeline",
]

CSV_HEADER = ["station_id", "latitude", "longitude", "year", "month", "tavg_c"]

DEFAULT_LAT_RANGE = (30.0, 40.0)
DEFAULT_LON_RANGE = (-95.0, -75.0)
DEFAULT_YEAR_RANGE = (1980, 2025)
DEFAULT_MIN_MONTHS = 240


@dataclass
class StationSeries:
    """Monthly series of one station; absent values carry present=False."""

    station_id: str
    latitude: float
    longitude: float
    year: np.ndarray
    month: np.ndarray
    value: np.ndarray
    present: np.ndarray

    def month_index(self) -> np.ndarray:
        """Months since year 0, for gap detection and trend fitting."""
        return self.year * 12 + (self.month - 1)

    def n_present(self) -> int:
        return int(np.count_nonzero(self.present))


@dataclass(frozen=True)
class Ar1Fit:
    """AR(1) fit by conditional least squares plus its innovations."""

    phi: float
    innovations: np.ndarray
    n_used: int


@dataclass(frozen=True)
class InnovationPool:
    """Pooled standardized innovations of one variance cluster.

    ``sd`` is the pooled standard deviation before standardization.
    """

    label: str  # 'low_variance' or 'high_variance'
    values: np.ndarray
    sd: float


@dataclass(frozen=True)
class PipelineResult:
    """Everything produced by the per-station stage plus the pooled split."""

    station_ids: list[str]
    fits: list[Ar1Fit]
    variances: np.ndarray
    low_indices: tuple[int, ...]
    high_indices: tuple[int, ...]
    centers: tuple[float, float]
    pool_low: InnovationPool
    pool_high: InnovationPool
    sigma_ratio: float


def _parse_row(fields, line_no):
    if len(fields) != 6:
        raise ValueError(f"line {line_no}: expected 6 fields, got {len(fields)}")
    sid = fields[0].strip()
    if not sid:
        raise ValueError(f"line {line_no}: empty station_id")
    try:
        lat = float(fields[1])
        lon = float(fields[2])
        year = int(fields[3])
        month = int(fields[4])
    except ValueError as exc:
        raise ValueError(f"line {line_no}: {exc}") from None
    if not 1 <= month <= 12:
        raise ValueError(f"line {line_no}: month {month} outside 1..12")
    raw = fields[5].strip()
    if raw == "":
        value, present = math.nan, False
    else:
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"line {line_no}: bad tavg_c value {raw!r}") from None
        present = True
    return sid, lat, lon, year, month, value, present


def load_stations(
    path,
    *,
    lat_range: tuple[float, float] = DEFAULT_LAT_RANGE,
    lon_range: tuple[float, float] = DEFAULT_LON_RANGE,
    year_range: tuple[int, int] = DEFAULT_YEAR_RANGE,
    min_months: int = DEFAULT_MIN_MONTHS,
) -> list[StationSeries]:
    """Parse and filter a monthly-observation CSV.

    The file must carry the header ``station_id,latitude,longitude,year,
    month,tavg_c``; missing temperatures are empty fields.  Stations are
    kept when their coordinates fall in the half-open lat/lon boxes and
    they have at least ``min_months`` present observations inside the
    inclusive year range.  Malformed rows raise ValueError naming the
    line; an empty selection returns an empty list.
    """
    order: list[str] = []
    rows: dict[str, list] = {}
    coords: dict[str, tuple[float, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("line 1: empty file, header required") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise ValueError(f"line 1: header must be {','.join(CSV_HEADER)}")
        for line_no, fields in enumerate(reader, start=2):
            if not fields:
                continue
            sid, lat, lon, year, month, value, present = _parse_row(fields, line_no)
            if sid not in rows:
                order.append(sid)
                rows[sid] = []
                coords[sid] = (lat, lon)
            elif coords[sid] != (lat, lon):
                raise ValueError(f"line {line_no}: station {sid} changes coordinates")
            prev = rows[sid][-1] if rows[sid] else None
            if prev is not None and (year, month) <= (prev[0], prev[1]):
                raise ValueError(
                    f"line {line_no}: station {sid} has non-increasing (year, month)"
                )
            rows[sid].append((year, month, value, present))

    out = []
    for sid in order:
        lat, lon = coords[sid]
        if not (lat_range[0] <= lat < lat_range[1] and lon_range[0] <= lon < lon_range[1]):
            continue
        kept = [r for r in rows[sid] if year_range[0] <= r[0] <= year_range[1]]
        if not kept:
            continue
        series = StationSeries(
            station_id=sid,
            latitude=lat,
            longitude=lon,
            year=np.array([r[0] for r in kept], dtype=np.int64),
            month=np.array([r[1] for r in kept], dtype=np.int64),
            value=np.array([r[2] for r in kept], dtype=float),
            present=np.array([r[3] for r in kept], dtype=bool),
        )
        if series.n_present() >= min_months:
            out.append(series)
    return out


def deseasonalize(series: StationSeries) -> np.ndarray:
    """Anomalies of the present observations: value minus its month-of-year mean.

    Every month-of-year that occurs among present observations needs at
    least 2 of them, otherwise the mean is not a meaningful seasonal
    estimate and a ValueError lists the offending months.
    """
    months = series.month[series.present]
    values = series.value[series.present]
    anomalies = np.empty_like(values)
    thin = []
    for m in np.unique(months):
        sel = months == m
        if np.count_nonzero(sel) < 2:
            thin.append(int(m))
            continue
        anomalies[sel] = values[sel] - values[sel].mean()
    if thin:
        raise ValueError(
            f"station {series.station_id}: months {thin} have fewer than 2 observations"
        )
    return anomalies


def detrend_linear(x, t=None) -> np.ndarray:
    """Residuals of an ordinary least-squares line in the time index."""
    x = np.asarray(x, dtype=float)
    if x.size < 3:
        raise ValueError(f"detrend needs at least 3 points, got {x.size}")
    t = np.arange(x.size, dtype=float) if t is None else np.asarray(t, dtype=float)
    tc = t - t.mean()
    denom = float(tc @ tc)
    if denom == 0.0:
        raise ValueError("time index is constant")
    slope = float(tc @ (x - x.mean())) / denom
    return x - x.mean() - slope * tc


def ar1_innovations(x, t=None) -> Ar1Fit:
    """AR(1) conditional least squares and one-step innovations.

    phi_hat = sum x_t x_{t-1} / sum x_{t-1}^2 over lag pairs, with no
    intercept (the input is already centered by construction).  When a
    time index is supplied, only pairs of consecutive indices count, so
    gaps in a station record never fabricate a lag relation.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 10:
        raise ValueError(f"AR(1) fit needs at least 10 points, got {x.size}")
    if t is None:
        lag, cur = x[:-1], x[1:]
    else:
        t = np.asarray(t)
        consecutive = np.diff(t) == 1
        lag, cur = x[:-1][consecutive], x[1:][consecutive]
    if lag.size < 2:
        raise ValueError("fewer than 2 consecutive lag pairs")
    denom = float(lag @ lag)
    if denom == 0.0:
        raise ValueError("degenerate series: zero lag variance")
    phi = float(lag @ cur) / denom
    innovations = cur - phi * lag
    return Ar1Fit(phi=phi, innovations=innovations, n_used=int(lag.size))


def kmeans1d_split(values) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], tuple[float, float]]:
    """Exact optimal 2-cluster split of scalars by threshold scan.

    In one dimension the optimal 2-means partition is an interval split
    of the sorted values, so scanning all n-1 thresholds and minimizing
    the total within-cluster sum of squares is exact.  Returns the index
    sets (original positions; lower-mean cluster first) and the two
    cluster means.  Deterministic: ties pick the leftmost threshold.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 values to split")
    if np.unique(arr).size < 2:
        raise ValueError("all values identical: no meaningful split")
    order = np.argsort(arr, kind="stable")
    s = arr[order]
    csum = np.cumsum(s)
    csq = np.cumsum(s * s)
    total_sum, total_sq, n = csum[-1], csq[-1], arr.size

    def sse(sum_, sq_, m):
        return sq_ - sum_ * sum_ / m

    counts = np.arange(1, n)
    left_sse = sse(csum[:-1], csq[:-1], counts)
    right_sse = sse(total_sum - csum[:-1], total_sq - csq[:-1], n - counts)
    split = int(np.argmin(left_sse + right_sse))
    low = tuple(sorted(int(i) for i in order[: split + 1]))
    high = tuple(sorted(int(i) for i in order[split + 1:]))
    center_low = float(csum[split] / (split + 1))
    center_high = float((total_sum - csum[split]) / (n - split - 1))
    return (low, high), (center_low, center_high)


def build_pools(fits: Sequence[Ar1Fit], partition) -> tuple[InnovationPool, InnovationPool, float]:
    """Concatenate innovations per cluster and standardize to sigma_1 = 1.

    Clusters are labeled low/high by pooled standard deviation (not by
    input order), both pools are divided by the low pool's sd, and the
    ratio sd_high/sd_low > 1 is returned as the empirical sigma.
    """
    idx_a, idx_b = partition
    if len(idx_a) == 0 or len(idx_b) == 0:
        raise ValueError("both clusters must be nonempty")
    pool_a = np.concatenate([fits[i].innovations for i in idx_a])
    pool_b = np.concatenate([fits[i].innovations for i in idx_b])
    sd_a = float(pool_a.std(ddof=1))
    sd_b = float(pool_b.std(ddof=1))
    if sd_b < sd_a:
        pool_a, pool_b = pool_b, pool_a
        sd_a, sd_b = sd_b, sd_a
    ratio = sd_b / sd_a
    if ratio <= 1.0 + 1e-9:
        raise ValueError(f"degenerate variance split: sigma ratio {ratio:.6f} <= 1")
    low = InnovationPool(label="low_variance", values=pool_a / sd_a, sd=sd_a)
    high = InnovationPool(label="high_variance", values=pool_b / sd_a, sd=sd_b)
    return low, high, ratio


def bootstrap_winner(
    pool1: InnovationPool,
    pool2: InnovationPool,
    n1: int,
    n2: int,
    b: int,
    rng: RngStream,
    *,
    cap: int = 10_000_000,
    workers: int = 1,
) -> McEstimate:
    """Bootstrap frequency of {max of n1 pool-1 draws > max of n2 pool-2 draws}.

    Draws are per-variable with replacement (pools are finite empirical
    distributions, so the max-transform shortcut does not apply).
    Iteration t owns stream positions [t*(n1+n2), (t+1)*(n1+n2)): n1
    group-1 draws first, then n2 group-2 draws.
    """
    if len(pool1.values) == 0 or len(pool2.values) == 0:
        raise ValueError("pools must be nonempty")
    if n1 < 1 or n2 < 1:
        raise ValueError("n1 and n2 must be >= 1")
    if n1 > cap:
        raise ValueError(
            f"n1 = {n1} exceeds the per-variable bootstrap cap {cap}; "
            "use the theoretical limit (two_group_limit) at this scale"
        )
    v1, v2 = pool1.values, pool2.values
    size1, size2 = len(v1), len(v2)

    def count_wins(u):
        i1 = np.minimum((u[:, :n1] * size1).astype(np.int64), size1 - 1)
        i2 = np.minimum((u[:, n1:] * size2).astype(np.int64), size2 - 1)
        m1 = v1[i1].max(axis=1)
        m2 = v2[i2].max(axis=1)
        return [np.count_nonzero(m1 > m2)]

    wins = _sum_chunks(rng, b, n1 + n2, count_wins, workers=workers)
    return McEstimate.from_counts(int(wins[0]), b)


def empirical_study(
    pool1: InnovationPool,
    pool2: InnovationPool,
    sigma_ratio: float,
    c_values: Sequence[float],
    n2_grid: Sequence[int],
    b: int,
    rng: RngStream,
    *,
    cap: int = 10_000_000,
    workers: int = 1,
) -> list[StudyRow]:
    """Bootstrap winner probabilities along the critical law vs their limits.

    For each (C, n2): n1 is the floored critical size at the empirical
    sigma ratio, p_hat comes from :func:`bootstrap_winner` on a per-row
    substream, and p_limit from the two-group limit law.  Rows are
    emitted in deterministic (C outer, n2 inner) order.
    """
    c_values = list(c_values)
    n2_grid = [int(n) for n in n2_grid]
    if not c_values or not n2_grid:
        raise ValueError("c_values and n2_grid must be nonempty")
    rows = []
    row_index = 0
    for c in c_values:
        p_limit = two_group_limit(c, sigma_ratio).value
        for n2 in n2_grid:
            size = critical_n1(n2, sigma_ratio, c)
            if size.floor_value is None:
                raise ValueError(f"critical n1 at n2={n2} overflows the bootstrap range")
            n1 = size.floor_value
            est = bootstrap_winner(
                pool1, pool2, n1, n2, b, rng.substream(row_index), cap=cap, workers=workers
            )
            rows.append(
                StudyRow(
                    n2=float(n2),
                    n1=float(n1),
                    sigma=float(sigma_ratio),
                    c=float(c),
                    p_hat=est.p_hat,
                    std_err=est.std_err,
                    p_limit=p_limit,
                )
            )
            row_index += 1
    return rows


def process_station(series: StationSeries) -> Ar1Fit:
    """Anomaly -> detrend -> AR(1) innovations for one station."""
    t = series.month_index()[series.present]
    anomalies = deseasonalize(series)
    residuals = detrend_linear(anomalies, t)
    return ar1_innovations(residuals, t)


def run_pipeline(stations: Sequence[StationSeries]) -> PipelineResult:
    """Per-station innovations, variance split, and standardized pools."""
    stations = list(stations)
    if len(stations) < 2:
        raise ValueError("pipeline needs at least 2 stations")
    fits = [process_station(s) for s in stations]
    variances = np.array([float(f.innovations.var(ddof=1)) for f in fits])
    (low_idx, high_idx), centers = kmeans1d_split(variances)
    # order the clusters by pooled sd so the stored index sets match the labels
    sd_a = np.concatenate([fits[i].innovations for i in low_idx]).std(ddof=1)
    sd_b = np.concatenate([fits[i].innovations for i in high_idx]).std(ddof=1)
    if sd_a > sd_b:
        low_idx, high_idx = high_idx, low_idx
        centers = (centers[1], centers[0])
    pool_low, pool_high, ratio = build_pools(fits, (low_idx, high_idx))
    return PipelineResult(
        station_ids=[s.station_id for s in stations],
        fits=fits,
        variances=variances,
        low_indices=low_idx,
        high_indices=high_idx,
        centers=centers,
        pool_low=pool_low,
        pool_high=pool_high,
        sigma_ratio=ratio,
    )
