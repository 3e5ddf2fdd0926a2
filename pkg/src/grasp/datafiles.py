"""Bundled data files and energy-directory loading."""

import glob
import os

from .energy import build_profile, load_profile_csv, parse_nsrdb_csv, profile_csv_header_kind
from .errors import ValidationError
from .model import ControllerConfig


def data_path(*parts):
    """Absolute path of a bundled data file."""
    return os.path.join(os.path.dirname(__file__), "data", *parts)


def load_profiles_dir(path, config=None):
    """Load every site CSV in a directory, sorted by file name.

    Each file is either a direct profile (single `wh` column) or a
    weather file run through the configured panel model; the two kinds
    can be mixed.  The sorted file order defines the data-center order.
    """
    if config is None:
        config = ControllerConfig()
    if not os.path.isdir(path):
        raise FileNotFoundError(f"energy directory not found: {path!r}")
    files = sorted(glob.glob(os.path.join(path, "*.csv")))
    if not files:
        raise ValidationError("energy_dir", f"no *.csv files in {path!r}")
    profiles = []
    for f in files:
        site = os.path.splitext(os.path.basename(f))[0]
        if profile_csv_header_kind(f) == "profile":
            profiles.append(load_profile_csv(f, site=site))
        else:
            records = parse_nsrdb_csv(
                f, temp_column=config.nsrdb_temp_column, ghi_column=config.nsrdb_ghi_column
            )
            profiles.append(build_profile(records, panel=config.panel, site=site))
    return profiles
