"""Hourly temperature corpus ingestion and synthetic spatiotemporal data.

The on-disk schema is a CSV with header ``day,hour,station_id,temp_c``
(day 1-based, hour 0-based) next to a station table ``id,lat,lon``.  Rows
that are absent, or whose temperature field is empty/NaN, count as missing
and are imputed by hour-wise linear interpolation within each (day,
station) series; imputed entries stay flagged in the cube's mask.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .graph import StationTable
from .transform import GraphSignal
from .validation import check_finite


@dataclass(frozen=True)
class WeatherCube:
    """Day x hour x station temperature tensor with its station table.

    ``missing`` marks entries that were absent from the source and have
    been filled by interpolation; ``values`` itself is always finite.
    """

    values: np.ndarray
    stations: StationTable
    missing: np.ndarray

    def __post_init__(self):
        vals = check_finite(np.asarray(self.values, dtype=float), "values")
        if vals.ndim != 3:
            raise ValueError(f"values must be (days, hours, stations), got shape {vals.shape}")
        if vals.shape[2] != self.stations.n:
            raise ValueError(
                f"station axis has {vals.shape[2]} entries for {self.stations.n} stations"
            )
        miss = np.asarray(self.missing, dtype=bool)
        if miss.shape != vals.shape:
            raise ValueError("missing mask must match the value tensor shape")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "missing", miss)

    @property
    def days(self) -> int:
        return self.values.shape[0]

    @property
    def hours(self) -> int:
        return self.values.shape[1]

    @property
    def imputed_count(self) -> int:
        return int(self.missing.sum())

    def station_series(self) -> np.ndarray:
        """Per-station flat series (stations, days*hours), day-major."""
        return self.values.transpose(2, 0, 1).reshape(self.stations.n, -1)


def load_weather(path, stations: StationTable, hours: int = 24) -> WeatherCube:
    """Parse a temperature CSV against a station table.

    Duplicated (day, hour, station) rows and malformed fields raise with
    the offending line number; stations absent from the table raise a
    reference error.  Every (day, station) series needs at least one
    observation so the hour-wise interpolation is defined.
    """
    seen = set()
    records = []
    max_day = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["day", "hour", "station_id", "temp_c"]:
            raise ValueError(f"{path}: expected header 'day,hour,station_id,temp_c', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"{path}: line {lineno}: expected 4 fields, got {len(row)}")
            try:
                day = int(row[0])
                hour = int(row[1])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: malformed day/hour {row[:2]}") from None
            sid = row[2]
            try:
                s = stations.index_of(sid)
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: station {sid!r} not in the station table"
                ) from None
            if day < 1 or not 0 <= hour < hours:
                raise ValueError(f"{path}: line {lineno}: day/hour out of range ({day}, {hour})")
            key = (day, hour, s)
            if key in seen:
                raise ValueError(
                    f"{path}: line {lineno}: duplicate entry for day {day}, hour {hour}, "
                    f"station {sid!r}"
                )
            seen.add(key)
            raw = row[3].strip()
            if raw in ("", "nan", "NaN", "NA"):
                temp = None
            else:
                try:
                    temp = float(row[3])
                except ValueError:
                    raise ValueError(
                        f"{path}: line {lineno}: malformed temperature {row[3]!r}"
                    ) from None
                if not np.isfinite(temp):
                    temp = None
            records.append((day, hour, s, temp))
            max_day = max(max_day, day)
    if not records:
        raise ValueError(f"{path}: no data rows")

    values = np.full((max_day, hours, stations.n), np.nan)
    for day, hour, s, temp in records:
        if temp is not None:
            values[day - 1, hour, s] = temp
    missing = np.isnan(values)

    hour_axis = np.arange(hours)
    for d in range(max_day):
        for s in range(stations.n):
            series = values[d, :, s]
            present = ~np.isnan(series)
            if not present.any():
                raise ValueError(
                    f"{path}: no observations for day {d + 1}, "
                    f"station {stations.ids[s]!r}; cannot interpolate"
                )
            if not present.all():
                values[d, :, s] = np.interp(hour_axis, hour_axis[present], series[present])
    return WeatherCube(values=values, stations=stations, missing=missing)


def save_weather(cube: WeatherCube, path) -> None:
    """Write every entry; round-trips bit-exactly for complete cubes."""
    with open(path, "w", newline="") as fh:
        fh.write("day,hour,station_id,temp_c\n")
        for d in range(cube.days):
            for h in range(cube.hours):
                for s in range(cube.stations.n):
                    fh.write(f"{d + 1},{h},{cube.stations.ids[s]},{cube.values[d, h, s]:.17g}\n")


def day_matrix(cube: WeatherCube, day: int) -> GraphSignal:
    """Stations x hours signal of one day (1-based) on the product of the
    hourly time line (first factor) and the station graph (second)."""
    if not 1 <= day <= cube.days:
        raise ValueError(f"day must lie in [1, {cube.days}], got {day}")
    return GraphSignal(matrix=cube.values[day - 1].T.copy())


def synth_cube(
    stations: int = 32,
    hours: int = 24,
    days: int = 31,
    seed: int = 0,
    amplitude: float = 1.0,
) -> WeatherCube:
    """Seeded synthetic temperature field with strong spatiotemporal
    correlation.

    The field is a base level plus a slow day-scale drift, a diurnal
    oscillation and a smooth spatial gradient over randomly placed
    stations, with small observation noise; ``amplitude=0`` collapses it
    to a constant.  Station coordinates sit in a ~0.8 degree box.
    """
    if stations < 1 or hours < 1 or days < 1:
        raise ValueError("stations, hours and days must be positive")
    rng = np.random.default_rng(seed)

    lat = rng.uniform(48.0, 48.8, size=stations)
    lon = rng.uniform(-5.0, -4.2, size=stations)
    table = StationTable(
        ids=tuple(f"S{i:02d}" for i in range(stations)),
        coords=np.column_stack([lat, lon]),
    )

    day_idx = np.arange(days)
    hour_idx = np.arange(hours)
    drift = 2.0 * np.sin(2.0 * np.pi * day_idx / max(days, 2) + rng.uniform(0, 2 * np.pi))
    diurnal = 2.5 * np.sin(2.0 * np.pi * (hour_idx - 14.0) / hours)
    lat0, lon0 = lat.mean(), lon.mean()
    spatial = 1.5 * np.sin(4.0 * (lat - lat0)) + 1.0 * np.cos(4.0 * (lon - lon0))
    gain = 1.0 + 0.1 * rng.standard_normal(stations)

    field = (
        8.0
        + amplitude * drift[:, None, None]
        + amplitude * diurnal[None, :, None] * gain[None, None, :]
        + amplitude * spatial[None, None, :]
        + amplitude * 0.1 * rng.standard_normal((days, hours, stations))
    )
    return WeatherCube(
        values=field,
        stations=table,
        missing=np.zeros((days, hours, stations), dtype=bool),
    )
