"""Distribution of the basic-inequality gap over random systems, per dynamics family.

    python3 scripts/inequality_survey.py --samples 1000 --dim 2
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from quantum_ifs.sampling import FAMILIES, pressure_case
from quantum_ifs.thermo import basic_inequality


@dataclass(frozen=True)
class SurveyConfig:
    samples: int = 500
    dim: int = 2
    max_branches: int = 4
    seed: int = 1


def survey(cfg: SurveyConfig) -> dict[str, dict]:
    rng = np.random.default_rng(cfg.seed)
    out = {}
    for family in FAMILIES:
        gaps, rejected = [], 0
        while len(gaps) < cfg.samples:
            k = int(rng.integers(1, cfg.max_branches + 1))
            case = pressure_case(rng, cfg.dim, k, family)
            if case is None:
                rejected += 1
                continue
            gaps.append(basic_inequality(case.system, case.rho_w, case.eigen).gap)
        g = np.array(gaps)
        out[family] = {"min": g.min(), "median": float(np.median(g)), "max": g.max(),
                       "violations": int((g < -1e-9).sum()), "rejected": rejected}
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=SurveyConfig.samples)
    ap.add_argument("--dim", type=int, default=SurveyConfig.dim)
    ap.add_argument("--max-branches", type=int, default=SurveyConfig.max_branches)
    ap.add_argument("--seed", type=int, default=SurveyConfig.seed)
    args = ap.parse_args()
    cfg = SurveyConfig(args.samples, args.dim, args.max_branches, args.seed)
    print(f"{'family':12s} {'min gap':>10} {'median':>10} {'max':>10} {'violations':>10} {'rejected':>9}")
    for family, s in survey(cfg).items():
        print(f"{family:12s} {s['min']:10.2e} {s['median']:10.4f} {s['max']:10.4f} "
              f"{s['violations']:10d} {s['rejected']:9d}")


if __name__ == "__main__":
    main()
