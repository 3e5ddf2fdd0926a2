"""Hourly green-energy profiles.

A site is described either by a weather CSV (hourly dry-bulb temperature
and global horizontal irradiance, 8760 rows) that we push through a small
PV panel model, or by a precomputed profile CSV holding hourly Wh
directly.  Synthetic shapes cover tests and demos.
"""

import csv
import math

import numpy as np

from .errors import ParseError, ValidationError
from .model import PanelConfig

HOURS_PER_YEAR = 8760

SYNTH_SHAPES = ("zero", "constant", "sinusoid")


class SolarRecord:
    """One weather hour: index into the year, irradiance, air temperature."""

    __slots__ = ("hour", "ghi_whm2", "dry_bulb_c")

    def __init__(self, hour, ghi_whm2, dry_bulb_c):
        self.hour = hour
        self.ghi_whm2 = ghi_whm2
        self.dry_bulb_c = dry_bulb_c

    def __repr__(self):
        return f"SolarRecord({self.hour}, ghi={self.ghi_whm2}, temp={self.dry_bulb_c})"


class EnergyProfile:
    """Hourly producible green energy for one site, Wh, one full year."""

    def __init__(self, site, wh):
        wh = np.asarray(wh, dtype=np.float64)
        if wh.shape != (HOURS_PER_YEAR,):
            raise ValidationError("wh", f"profile must have {HOURS_PER_YEAR} hours, got {wh.shape}")
        if np.any(wh < 0) or not np.all(np.isfinite(wh)):
            raise ValidationError("wh", "profile values must be finite and non-negative")
        self.site = site
        self.wh = wh

    def __repr__(self):
        return f"EnergyProfile({self.site!r}, peak={self.wh.max():.1f} Wh)"


def pv_output(ghi_whm2, dry_bulb_c, panel=None):
    """Energy (Wh) one panel produces in an hour of the given weather.

    Cell temperature is air temperature plus irradiance heating; output is
    linearly derated per degree above the reference temperature and never
    goes negative.
    """
    if panel is None:
        panel = PanelConfig()
    cell_temp = dry_bulb_c + panel.irradiance_heating * ghi_whm2
    derate = 1.0 - panel.temp_coeff_per_c * (cell_temp - panel.reference_temp_c)
    return max(0.0, ghi_whm2 * panel.area_m2 * panel.efficiency * derate)


def parse_nsrdb_csv(path, temp_column="dry_bulb_c", ghi_column="ghi_whm2"):
    """Read one year of hourly weather rows from a CSV with named columns."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in (temp_column, ghi_column):
            if column not in header:
                raise ParseError(f"{path}: missing column {column!r} (header has {header})")
        for i, row in enumerate(reader):
            line = i + 2  # header is line 1
            try:
                ghi = float(row[ghi_column])
                temp = float(row[temp_column])
            except (TypeError, ValueError):
                raise ParseError(f"{path}:{line}: non-numeric weather value") from None
            if not (math.isfinite(ghi) and math.isfinite(temp)):
                raise ParseError(f"{path}:{line}: non-finite weather value")
            if ghi < 0:
                raise ParseError(f"{path}:{line}: negative GHI {ghi}")
            records.append(SolarRecord(hour=i, ghi_whm2=ghi, dry_bulb_c=temp))
    if len(records) != HOURS_PER_YEAR:
        raise ParseError(f"{path}: expected {HOURS_PER_YEAR} data rows, got {len(records)}")
    return records


def build_profile(records, panel=None, site=""):
    """Convert parsed weather records into an hourly energy profile."""
    if len(records) != HOURS_PER_YEAR:
        raise ValidationError("records", f"expected {HOURS_PER_YEAR} records, got {len(records)}")
    wh = np.empty(HOURS_PER_YEAR, dtype=np.float64)
    for rec in records:
        wh[rec.hour] = pv_output(rec.ghi_whm2, rec.dry_bulb_c, panel)
    return EnergyProfile(site=site, wh=wh)


def synth_profile(seed, shape, peak_wh):
    """Synthetic year profile.

    Shapes: `zero` (always 0), `constant` (always peak_wh), `sinusoid`
    (half-rectified daily sine, zero at 06:00/18:00, peak_wh at noon).
    The bundled shapes are deterministic; `seed` is accepted so callers
    can treat every generator as seeded.
    """
    if shape not in SYNTH_SHAPES:
        raise ValidationError("shape", f"must be one of {SYNTH_SHAPES}")
    if peak_wh < 0:
        raise ValidationError("peak_wh", "must be >= 0")
    hours = np.arange(HOURS_PER_YEAR)
    if shape == "zero":
        wh = np.zeros(HOURS_PER_YEAR)
    elif shape == "constant":
        wh = np.full(HOURS_PER_YEAR, float(peak_wh))
    else:
        hour_of_day = hours % 24
        wh = peak_wh * np.maximum(0.0, np.sin(np.pi * (hour_of_day - 6) / 12.0))
    return EnergyProfile(site=f"synth_{shape}", wh=wh)


def load_profile_csv(path, site=""):
    """Read a precomputed profile: header `wh`, 8760 numeric rows."""
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["wh"]:
            raise ParseError(f"{path}: expected single-column header 'wh', got {header}")
        for i, row in enumerate(reader):
            line = i + 2
            if len(row) != 1:
                raise ParseError(f"{path}:{line}: expected one value per row")
            try:
                values.append(float(row[0]))
            except ValueError:
                raise ParseError(f"{path}:{line}: non-numeric value {row[0]!r}") from None
    if len(values) != HOURS_PER_YEAR:
        raise ParseError(f"{path}: expected {HOURS_PER_YEAR} data rows, got {len(values)}")
    try:
        return EnergyProfile(site=site, wh=values)
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def profile_csv_text(profile):
    """Serialize a profile in the `wh` CSV format with stable formatting."""
    lines = ["wh"]
    lines += ["%.6f" % v for v in profile.wh]
    return "\n".join(lines) + "\n"


def profile_csv_header_kind(path):
    """Peek at a CSV header: 'profile' for wh files, 'weather' otherwise."""
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise ParseError(f"{path}: empty file")
    return "profile" if [h.strip() for h in header] == ["wh"] else "weather"
