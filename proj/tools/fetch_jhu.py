#!/usr/bin/env python3
"""Download the three JHU CSSE global time-series CSVs into data/.

The USA acceptance suite and configs/usa.json expect these files; rerun the
script any time to refresh them.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

BASE = ("https://raw.githubusercontent.com/CSSEGISandData/COVID-19/master/"
        "csse_covid_19_data/csse_covid_19_time_series/")
FILES = [
    "time_series_covid19_confirmed_global.csv",
    "time_series_covid19_recovered_global.csv",
    "time_series_covid19_deaths_global.csv",
]


def fetch(url: str, dest: Path, retries: int = 3) -> None:
    last = None
    for attempt in range(1, retries + 1):
        try:
            with urllib.request.urlopen(url, timeout=60) as resp:
                dest.write_bytes(resp.read())
            return
        except Exception as exc:  # noqa: BLE001 - report and retry
            last = exc
            print(f"  attempt {attempt}/{retries} failed: {exc}", file=sys.stderr)
    raise SystemExit(f"could not download {url}: {last}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data", help="target directory (default: data)")
    args = parser.parse_args()

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    for name in FILES:
        print(f"fetching {name} ...")
        fetch(BASE + name, dest / name)
        print(f"  wrote {dest / name}")


if __name__ == "__main__":
    main()
