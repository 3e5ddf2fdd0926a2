"""Generate the bundled synthetic site weather files.

The nine sites mirror solar stations near three New York, three Florida
and three California airfields, but every value here is synthetic: a
clear-sky bell per day, seasonal day length and amplitude from latitude,
a persistent cloud process, and a seasonal plus diurnal temperature
curve.  Real measurement data is deliberately not shipped; this script
keeps the bundled CSVs reproducible (seeded, one seed per site).

Solar noon is expressed on one shared clock so the three regions peak at
different hours, which is what makes geographic scheduling interesting.

Usage: python scripts/gen_site_weather.py [outdir]
"""

import csv
import math
import os
import sys

import numpy as np

HOURS = 8760

# name, latitude deg, noon hour on the shared clock, winter/summer mean temp C,
# diurnal swing C, cloudiness (0 clear .. 1 murky), storm probability per day,
# summer afternoon thunderstorms (Gulf climate)
SITES = [
    ("01_elmira_corning_regional", 42.2, 12.0, -4.0, 21.0, 8.0, 0.58, 0.22, False),
    ("02_watertown", 44.0, 12.0, -7.0, 20.0, 8.0, 0.62, 0.26, False),
    ("03_westhampton_gabreski", 40.8, 11.8, 0.0, 22.0, 7.0, 0.50, 0.18, False),
    ("04_homestead", 25.5, 12.6, 20.0, 28.0, 6.0, 0.38, 0.10, True),
    ("05_orlando", 28.5, 12.7, 16.0, 27.5, 7.5, 0.40, 0.12, True),
    ("06_tyndall", 30.1, 12.9, 12.0, 27.0, 7.0, 0.42, 0.14, True),
    ("07_lompoc", 34.6, 15.1, 11.0, 17.0, 6.0, 0.30, 0.06, False),
    ("08_march", 33.9, 15.0, 12.0, 25.0, 10.0, 0.18, 0.04, False),
    ("09_travis_field", 38.3, 15.2, 9.0, 22.0, 9.0, 0.24, 0.08, False),
]

SOLAR_CONSTANT = 1050.0  # rough clear-sky GHI ceiling, W/m^2


def site_year(seed, lat_deg, noon_hour, t_winter, t_summer, t_swing, cloudiness,
              storm_prob, gulf_afternoons):
    rng = np.random.default_rng(seed)
    lat = math.radians(lat_deg)

    day = np.arange(HOURS) // 24
    hour_of_day = np.arange(HOURS) % 24

    # solar declination, radians; day 172 is the June solstice
    decl = np.radians(23.44) * np.cos(2 * np.pi * (day - 172) / 365.0)
    # noon solar elevation and a day-length driven bell width
    noon_elev = np.pi / 2 - np.abs(lat - decl)
    clear_peak = SOLAR_CONSTANT * np.clip(np.sin(noon_elev), 0.05, 1.0)
    half_day = 6.0 + 2.6 * np.sin(decl) * math.tan(lat) * 12 / np.pi

    # clear-sky bell around local noon, clamped to daylight
    rel = (hour_of_day - noon_hour) / np.maximum(half_day, 1.0)
    bell = np.cos(np.clip(rel, -1.0, 1.0) * np.pi / 2)
    bell[np.abs(rel) >= 1.0] = 0.0
    clear = clear_peak * bell**1.5

    # persistent cloud multiplier: AR(1) per day, plus storm days that
    # knock irradiance down hard, plus hourly flicker
    daily = np.empty(365)
    level = rng.uniform(0.3, 0.9)
    for d in range(365):
        level = 0.68 * level + 0.32 * rng.uniform(0.0, 1.0)
        daily[d] = level
    cloud_day = 1.0 - cloudiness * daily
    storm = rng.random(365) < storm_prob
    cloud_day[storm] *= rng.uniform(0.12, 0.35, 365)[storm]
    flicker = rng.uniform(0.85, 1.0, HOURS)
    ghi = np.maximum(0.0, clear * cloud_day[day] * flicker)

    if gulf_afternoons:
        # summer convection: afternoons frequently collapse after local noon
        summer = (day >= 150) & (day <= 270)
        convective = rng.random(365) < 0.55
        hit = summer & convective[day] & (hour_of_day > noon_hour + 1)
        ghi[hit] *= rng.uniform(0.2, 0.5, HOURS)[hit]

    # temperature: seasonal mean, diurnal swing lagging noon, small noise
    t_season = (t_winter + t_summer) / 2 - (t_summer - t_winter) / 2 * np.cos(
        2 * np.pi * (day - 197) / 365.0
    )
    t_diurnal = t_swing / 2 * np.cos(2 * np.pi * (hour_of_day - noon_hour - 2.5) / 24.0)
    temp = t_season + t_diurnal + rng.normal(0.0, 1.2, HOURS)

    return ghi, temp


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "src", "grasp", "data", "sites"
    )
    os.makedirs(outdir, exist_ok=True)
    for i, (name, lat, noon, tw, ts, swing, cloud, storm, gulf) in enumerate(SITES):
        ghi, temp = site_year(1000 + i, lat, noon, tw, ts, swing, cloud, storm, gulf)
        path = os.path.join(outdir, name + ".csv")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["hour", "dry_bulb_c", "ghi_whm2"])
            for h in range(HOURS):
                writer.writerow([h, "%.2f" % temp[h], "%.2f" % ghi[h]])
        print("wrote", path)


if __name__ == "__main__":
    main()
