#!/usr/bin/env python3
"""Download the original Wisconsin breast cancer data into data/."""

import argparse
import pathlib
import urllib.request

URL = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/"
    "breast-cancer-wisconsin/breast-cancer-wisconsin.data"
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/breast-cancer-wisconsin.data")
    ap.add_argument("--url", default=URL)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with urllib.request.urlopen(args.url, timeout=60) as r:
        text = r.read().decode("ascii")
    rows = [line for line in text.splitlines() if line.strip()]
    bad = [r for r in rows if len(r.split(",")) != 11]
    if bad:
        raise SystemExit(f"unexpected row format: {bad[0]!r}")
    out.write_text("\n".join(rows) + "\n")
    print(f"{len(rows)} rows -> {out}")


if __name__ == "__main__":
    main()
