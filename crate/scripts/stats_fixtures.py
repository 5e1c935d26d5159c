"""Regenerates crates/core/tests/fixtures/stats.json from scipy."""
import json
import sys

import numpy as np
import scipy
from scipy import stats

rng = np.random.default_rng(20240601)


def r4(a):
    return [round(float(v), 4) for v in a]


out = {"scipy": scipy.__version__, "shapiro": [], "ttest": [], "wilcoxon": []}

sw_sets = [
    ("weights_11", [148, 154, 158, 160, 161, 162, 166, 170, 182, 195, 236]),
    ("n3", [1.0, 2.0, 4.5]),
    ("n4", [0.3, 1.1, 1.2, 5.0]),
    ("normal_5", r4(rng.normal(0, 1, 5))),
    ("normal_8", r4(rng.normal(10, 2, 8))),
    ("exp_12", r4(rng.exponential(1, 12))),
    ("normal_20", r4(rng.normal(950, 10, 20))),
    ("uniform_30", r4(rng.uniform(0, 1, 30))),
    ("normal_30", r4(rng.normal(0, 1, 30))),
    ("bimodal_30", r4(np.concatenate([rng.normal(0, 1, 15), rng.normal(8, 1, 15)]))),
    ("normal_50", r4(rng.normal(5, 3, 50))),
]
for name, x in sw_sets:
    x = [float(v) for v in x]
    w, p = stats.shapiro(x)
    out["shapiro"].append({"name": name, "x": x, "w": float(w), "p": float(p)})

for name, n, shift in [("shift_30", 30, 0.5), ("tiny_10", 10, 0.1), ("neg_15", 15, -0.8)]:
    y = r4(rng.normal(100, 5, n))
    x = r4(np.array(y) + shift + rng.normal(0, 1, n))
    for alt in ["greater", "less"]:
        t, p = stats.ttest_rel(x, y, alternative=alt)
        out["ttest"].append({"name": name, "x": x, "y": y, "alternative": alt, "t": float(t), "p": float(p)})

wx = [
    ("exact_5", [1.83, 0.50, 1.62, 2.48, 1.68], [0.878, 0.647, 0.598, 2.05, 1.06]),
    ("exact_8", r4(rng.normal(1, 1, 8)), r4(rng.normal(0, 1, 8))),
    ("exact_12", r4(rng.normal(0.5, 1, 12)), r4(rng.normal(0, 1, 12))),
    ("approx_20", r4(rng.normal(0.4, 1, 20)), r4(rng.normal(0, 1, 20))),
    ("approx_30_ties", [float(v) for v in rng.integers(0, 6, 30)], [float(v) for v in rng.integers(0, 5, 30)]),
    ("approx_30", r4(rng.normal(0.3, 1, 30)), r4(rng.normal(0, 1, 30))),
]
for name, x, y in wx:
    d = np.array(x) - np.array(y)
    nz = int(np.sum(d != 0))
    method = "exact" if nz <= 12 else "approx"
    res = stats.wilcoxon(x, y, method=method, correction=(method == "approx"))
    out["wilcoxon"].append(
        {"name": name, "x": x, "y": y, "method": method, "statistic": float(res.statistic), "p": float(res.pvalue)}
    )

json.dump(out, open(sys.argv[1], "w"), indent=1)
