#!/usr/bin/env python3
"""Regenerate tests/data/agreement_cases.json.

Random paired series with deliberate ties, plus reference values from
scipy/numpy. The output is committed; tests read the frozen file and do
not need scipy at run time.
"""
import json
import pathlib
import random

import numpy as np
from scipy import stats


def make_cases(rng: random.Random):
    cases = []
    for i in range(24):
        n = rng.randint(3, 12)
        if i % 3 == 0:
            # coarse grid forces ties
            x = [rng.randint(0, 4) * 0.5 for _ in range(n)]
            y = [rng.randint(0, 4) * 0.5 for _ in range(n)]
        else:
            x = [round(rng.uniform(-10, 10), 3) for _ in range(n)]
            y = [round(rng.uniform(-10, 10), 3) for _ in range(n)]
        xa, ya = np.array(x), np.array(y)
        if np.all(xa == xa[0]) or np.all(ya == ya[0]):
            continue
        rho = stats.spearmanr(xa, ya).statistic
        tau = stats.kendalltau(xa, ya, variant="b").statistic
        if not (np.isfinite(rho) and np.isfinite(tau)):
            continue
        cases.append(
            {
                "x": x,
                "y": y,
                "pearson": float(stats.pearsonr(xa, ya).statistic),
                "spearman": float(rho),
                "kendall_b": float(tau),
                "mae": float(np.mean(np.abs(xa - ya))),
            }
        )
    return cases


def make_std_cases(rng: random.Random):
    cases = []
    for _ in range(8):
        n = rng.randint(2, 9)
        xs = [round(rng.uniform(0, 5), 2) for _ in range(n)]
        cases.append({"xs": xs, "std": float(np.std(xs, ddof=1))})
    return cases


def main():
    rng = random.Random(20260824)
    out = {
        "paired": make_cases(rng),
        "std": make_std_cases(rng),
    }
    path = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "agreement_cases.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {path} ({len(out['paired'])} paired, {len(out['std'])} std cases)")


if __name__ == "__main__":
    main()
