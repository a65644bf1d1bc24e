#!/usr/bin/env python3
"""Straight-line reference for the per-point momentum series.

Reads fixtures/momentum_scripted_20.csv (point, victor) and writes
fixtures/momentum_oracle_20.csv with both players' momentum, using repr() so
every float round-trips exactly. Written independently of the Rust code: no
shared helpers, plain loops, defaults inlined.
"""

import csv
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SCRIPT = ROOT / "fixtures" / "momentum_scripted_20.csv"
ORACLE = ROOT / "fixtures" / "momentum_oracle_20.csv"

W1, W2 = 0.7, 0.3
ALPHA, BETA = 0.0012, 0.0025
K_CAP, STREAK_MIN, LOOKBACK = 7, 2, 3

# 20 points with runs of 1..5 and a few alternations
VICTORS = [1, 1, 2, 1, 1, 1, 2, 2, 1, 2, 2, 2, 2, 2, 1, 1, 2, 1, 1, 1]


def run_at(v, n):
    """Holder and length of the run ending at 1-based point n."""
    holder = v[n - 1]
    k = 1
    while k <= LOOKBACK and n - 1 - k >= 0 and v[n - 1 - k] == holder:
        k += 1
    return holder, min(k, K_CAP)


def score(v, n, player, half, factor, power):
    lo = max(1, n - half)
    hi = min(len(v), n + half)
    total = 0.0
    for s in range(lo, hi + 1):
        total = total + (0.5 if v[s - 1] == player else -0.5)
    holder, k = run_at(v, n)
    bonus = 0.0
    if k >= STREAK_MIN:
        bonus = factor * math.exp(float(power * k))
        if holder != player:
            bonus = -bonus
    return (total + bonus) / float(hi - lo + 1) + 0.5


def momentum(v, n, player):
    m = score(v, n, player, 1, ALPHA, 2)
    l = score(v, n, player, 3, BETA, 1)
    return min(max(W1 * m + W2 * l, 0.0), 1.0)


def main():
    with open(SCRIPT, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["point", "victor"])
        for i, x in enumerate(VICTORS, 1):
            w.writerow([i, x])
    with open(ORACLE, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["point", "p1_momentum", "p2_momentum"])
        for n in range(1, len(VICTORS) + 1):
            w.writerow([n, repr(momentum(VICTORS, n, 1)), repr(momentum(VICTORS, n, 2))])


if __name__ == "__main__":
    main()
