"""Writes the synthetic index fixtures used by the backtest tests.

Both series are piecewise log-linear between anchor levels with Brownian-bridge
noise, on a Monday-Friday calendar. Output is deterministic.
"""
import datetime as dt
import pathlib
import sys

import numpy as np


def business_days(start, end):
    day = start
    out = []
    while day <= end:
        if day.weekday() < 5:
            out.append(day)
        day += dt.timedelta(days=1)
    return out


def build(anchors, gaps, daily_vol, seed):
    """anchors: list of (date, level); gaps: {date: multiplicative jump}."""
    rng = np.random.default_rng(seed)
    days = business_days(anchors[0][0], anchors[-1][0])
    index = {d: i for i, d in enumerate(days)}
    log_level = np.empty(len(days))
    for (d0, l0), (d1, l1) in zip(anchors[:-1], anchors[1:]):
        i0, i1 = index[d0], index[d1]
        n = i1 - i0
        steps = rng.normal(0.0, daily_vol, n)
        walk = np.concatenate([[0.0], np.cumsum(steps)])
        bridge = walk - np.linspace(0.0, 1.0, n + 1) * walk[-1]
        log_level[i0 : i1 + 1] = np.linspace(np.log(l0), np.log(l1), n + 1) + bridge
    for day, jump in gaps.items():
        i = index[day]
        log_level[i:] += np.log(jump)
    return days, np.exp(log_level)


def write(path, days, levels):
    with open(path, "w") as f:
        f.write("date,price\n")
        for d, x in zip(days, levels):
            f.write(f"{d.isoformat()},{x:.4f}\n")


def main(out_dir):
    out = pathlib.Path(out_dir)
    d = dt.date
    # Deep drawdown with an overnight gap, then a long recovery (+~20% over ten years).
    anchors_a = [
        (d(2007, 12, 31), 100.0), (d(2008, 10, 3), 80.0), (d(2009, 3, 9), 50.0 / 0.62),
        (d(2011, 6, 30), 78.0 / 0.62), (d(2011, 9, 30), 60.0 / 0.62), (d(2012, 12, 31), 72.0 / 0.62),
        (d(2015, 4, 15), 108.0 / 0.62), (d(2016, 2, 11), 88.0 / 0.62), (d(2017, 12, 29), 121.0 / 0.62),
    ]
    days, levels = build(anchors_a, {d(2008, 10, 6): 0.62}, 0.008, 20071231)
    write(out / "crash_recovery_2007.csv", days, levels)

    # Rally, halving, recovery, second crash and a rally into the last date.
    anchors_b = [
        (d(1999, 12, 31), 100.0), (d(2000, 12, 29), 118.0), (d(2003, 3, 12), 52.0),
        (d(2007, 6, 29), 96.0), (d(2009, 3, 9), 48.0), (d(2009, 12, 31), 85.0),
    ]
    days, levels = build(anchors_b, {}, 0.010, 19991231)
    write(out / "dotcom_gfc_2000.csv", days, levels)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "tests" / "data")
