"""Symmetries behind the short formulas for F.

Each built-in group is normalized by a Hecke triangle group, and that is why
all tangent pairs (and all disjoint pairs) contribute identical components.
Besides the identity checks, the script prints how far the pair components
drift apart and ends with a small lattice-point census.
"""
import numpy as np

from gapdist import build_config, good_census, normality_check, pair_component_F
from gapdist.theory import pairs

GRID = np.linspace(0, 6, 200)


def main():
    for kind in ("classical", "ap3", "ap9"):
        print(normality_check(kind))
        cfg = build_config(kind)
        for cls in ("tangent", "disjoint"):
            comps = [pair_component_F(cfg, p.i, p.j, GRID).values for p in pairs(cfg) if p.kind == cls]
            if comps:
                spread = max(np.max(np.abs(c - comps[0])) for c in comps)
                print(f"  {len(comps)} {cls} pairs, component spread {spread:.1e}")
    for T in (12.5, 25, 50):
        n, pred = good_census("classical", T)
        print(f"census Gamma(2), T={T:5.1f}: {n:3d} elements, leading term {pred:.2f}")


if __name__ == "__main__":
    main()
