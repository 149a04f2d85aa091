"""Regenerates the bundled sample tables. Output is deterministic."""

import math
import random
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

HERE = Path(__file__).parent
STATION = "GME00121042"
rng = random.Random(2016)


def tmax_tenths(d):
    season = math.cos((d.timetuple().tm_yday / 366.0) * 2 * math.pi)
    return round(120 - 110 * season + rng.uniform(-40, 40))


def prcp_tenths():
    return 0 if rng.random() < 0.5 else rng.randint(1, 250)


def climate():
    weather = {}
    lines = ["station,date,datatype,value,unit"]
    d = date(2016, 1, 1)
    for _ in range(365):
        t, p = tmax_tenths(d), prcp_tenths()
        weather[d] = (t, p)
        lines.append(f"{STATION},{d},TMAX,{t},tenths")
        lines.append(f"{STATION},{d},PRCP,{p},tenths")
        d += timedelta(days=1)
    (HERE / "climate_2016.csv").write_text("\n".join(lines) + "\n")
    return weather


def local(t):
    return (t + timedelta(hours=2)).strftime("%Y-%m-%dT%H:%M:%S+0200")


def small_table():
    headings = ["DE_KN_residential1_grid_import", "DE_KN_residential1_pv", "DE_KN_industrial1_pv_1"]
    blanks = set(rng.sample(range(24 * 3), 10))
    counters = [812.25, 1520.5, 40210.0]
    lines = ["utc_timestamp,cet_cest_timestamp," + ",".join(headings) + ",interpolated"]
    t = datetime(2016, 6, 1, tzinfo=timezone.utc)
    for row in range(24):
        cells = []
        for i in range(3):
            counters[i] = round(counters[i] + rng.uniform(0.0, 2.0), 3)
            cells.append("" if row * 3 + i in blanks else f"{counters[i]}")
        stamp = t.strftime("%Y-%m-%dT%H:%M:%SZ")
        lines.append(f"{stamp},{local(t)}," + ",".join(cells) + ",")
        t += timedelta(hours=1)
    (HERE / "energy_24x3.csv").write_text("\n".join(lines) + "\n")


def month_table(weather):
    pv = ["DE_KN_residential1_pv", "DE_KN_residential2_pv", "DE_KN_industrial1_pv_1", "DE_KN_industrial2_pv"]
    other = ["DE_KN_residential1_grid_import", "DE_KN_residential2_heat_pump", "DE_KN_industrial1_grid_export"]
    headings = pv + other
    capacity = [rng.uniform(0.5, 3.0) for _ in headings]
    counters = [rng.uniform(1000, 5000) for _ in headings]
    lines = ["utc_timestamp,cet_cest_timestamp," + ",".join(headings) + ",interpolated"]
    t = datetime(2016, 6, 1, tzinfo=timezone.utc)
    for _ in range(30 * 24 + 1):
        tmax, prcp = weather[t.date()] if t.date() in weather else (200, 0)
        cells = []
        for i, h in enumerate(headings):
            if h in pv:
                if 4 <= t.hour < 20:
                    daily = max(0.0, 0.2 + 0.15 * tmax / 10 - 0.05 * prcp / 10 + rng.uniform(-0.6, 0.6))
                    counters[i] += daily * capacity[i] / 16
            else:
                counters[i] += rng.uniform(0.0, 0.4) * capacity[i]
            cells.append("" if rng.random() < 0.02 else f"{counters[i]:.4f}")
        stamp = t.strftime("%Y-%m-%dT%H:%M:%SZ")
        lines.append(f"{stamp},{local(t)}," + ",".join(cells) + ",")
        t += timedelta(hours=1)
    (HERE / "energy_2016_06.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    w = climate()
    small_table()
    month_table(w)
