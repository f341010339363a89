"""Sweep the Lagrange multiplier on a weight grid and compare with the capacity.

For each multiplier the Lagrangian maximizer is located on the grid, then the
capacity is evaluated at that maximizer's cost. Prints one row per multiplier.

    python3 scripts/lambda_sweep.py --dynamics collapse --grid 21
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from quantum_ifs import catalog
from quantum_ifs.thermo import WeightGrid, capacity_from_rows, evaluate_grid, lagrangian_from_rows

DYNAMICS = {
    "identity": lambda: tuple(np.eye(2, dtype=complex) for _ in range(3)),
    "collapse": lambda: tuple(b.v for b in catalog.three_branch((1 / 3,) * 3).branches),
}


@dataclass(frozen=True)
class SweepConfig:
    dynamics: str = "collapse"
    points_per_edge: int = 21
    lambdas: tuple[float, ...] = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0)
    cost_diagonal: tuple[float, float] = (0.0, 1.0)


def sweep(cfg: SweepConfig) -> list[dict]:
    rows = evaluate_grid(WeightGrid(DYNAMICS[cfg.dynamics](), cfg.points_per_edge), np.diag(cfg.cost_diagonal))
    out = []
    for lam in cfg.lambdas:
        value, best = lagrangian_from_rows(rows, lam)
        cap = capacity_from_rows(rows, best.cost)
        out.append({"lambda": lam, "F": value, "t": best.t, "entropy": best.entropy, "cost": best.cost,
                    "capacity": cap.entropy, "same_point": cap.index == best.index})
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dynamics", choices=sorted(DYNAMICS), default=SweepConfig.dynamics)
    ap.add_argument("--grid", type=int, default=SweepConfig.points_per_edge)
    ap.add_argument("--lambdas", type=float, nargs="+", default=list(SweepConfig.lambdas))
    args = ap.parse_args()
    cfg = SweepConfig(args.dynamics, args.grid, tuple(args.lambdas))
    print(f"{'lambda':>7} {'F':>9} {'entropy':>9} {'cost':>9} {'C(cost)':>9}  same  t")
    for r in sweep(cfg):
        t = ", ".join(f"{x:.2f}" for x in r["t"])
        print(f"{r['lambda']:7.2f} {r['F']:9.5f} {r['entropy']:9.5f} {r['cost']:9.5f} {r['capacity']:9.5f}"
              f"  {'yes' if r['same_point'] else 'no ':4s} ({t})")


if __name__ == "__main__":
    main()
