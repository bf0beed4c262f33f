"""Ford circles are the classical packing seen from a cusp.

Enumerating tangencies with curvature at most 2Q^2 on [0, 1) gives exactly the
Farey fractions of order Q.  The script checks that and then draws the
packing.  The normalized Farey gaps also avoid a window near zero.
"""
import math
from fractions import Fraction
from math import gcd
from pathlib import Path

import numpy as np

from gapdist import build_config, enumerate_tangencies, min_normalized_gap
from gapdist.output import render_svg

OUT = Path(__file__).with_name("output")


def farey(Q):
    return sorted({Fraction(p, q) for q in range(1, Q + 1) for p in range(q) if gcd(p, q) == 1})


def main():
    OUT.mkdir(exist_ok=True)
    cfg = build_config("classical")
    for Q in (5, 40, 300):
        tg = enumerate_tangencies(cfg, 2 * Q * Q, (0, 1))
        ref = np.array([float(f) for f in farey(Q)])
        same = len(ref) == len(tg) and np.allclose(tg.alpha, ref, rtol=0, atol=1e-12)
        print(f"Q={Q:4d}: {len(tg):6d} tangencies, Farey match: {same}")

    tg = enumerate_tangencies(cfg, 2 * 300**2, (0, 1))
    print(f"smallest normalized gap {min_normalized_gap(tg):.5f}  vs  3/pi^2 = {3 / math.pi**2:.5f}")

    render_svg(cfg, 200, OUT / "ford_T200.svg")
    render_svg(build_config("ap3"), 400, OUT / "ap3_T400.svg")
    render_svg(build_config("ap9"), 400, OUT / "ap9_T400.svg")
    print(f"pictures written to {OUT}")


if __name__ == "__main__":
    main()
