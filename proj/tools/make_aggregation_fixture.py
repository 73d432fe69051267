# Copyright 2026 The benchkit Authors.
# SPDX-License-Identifier: Apache-2.0
"""Searches integer score tuples whose column means hit a target row exactly
and whose mean per-sample geometric mean hits a target overall.

Writes a run-length encoded fixture: [[count, identity, fidelity, background,
physics], ...]."""

import argparse
import json
import math
import random


def gm(t):
    return math.prod(t) ** 0.25


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--means", default="9.889,8.833,9.863,9.241")
    ap.add_argument("--overall", type=float, default=9.372)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    n = args.n
    sums = [round(float(m) * n) for m in args.means.split(",")]
    rows = [[0] * 4 for _ in range(n)]
    for c, s in enumerate(sums):
        base, extra = divmod(s, n)
        for i in range(n):
            rows[i][c] = base + (1 if i < extra else 0)
    target = args.overall * n
    total = sum(gm(r) for r in rows)
    # Moves keep every column sum fixed: +1 on one sample, -1 on another.
    while abs(total - target) > 0.05:
        c = rng.randrange(4)
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j or rows[i][c] >= 10 or rows[j][c] <= 1:
            continue
        before = gm(rows[i]) + gm(rows[j])
        rows[i][c] += 1
        rows[j][c] -= 1
        after = gm(rows[i]) + gm(rows[j])
        new_total = total - before + after
        if abs(new_total - target) < abs(total - target):
            total = new_total
        else:
            rows[i][c] -= 1
            rows[j][c] += 1
    counts = {}
    for r in rows:
        counts[tuple(r)] = counts.get(tuple(r), 0) + 1
    out = [[k] + list(t) for t, k in sorted(counts.items(), reverse=True)]
    with open(args.out, "w") as f:
        json.dump(out, f)
        f.write("\n")
    print(f"samples={n} mean_gm={total / n:.6f} distinct={len(out)}")


if __name__ == "__main__":
    main()
