"""Jump of the extended angles across the degenerate boundary as a function of offset.

Angles behave like the square root of the distance to the boundary, so the
jump at offset ``delta`` scales like ``sqrt(delta)``; the last column shows
``jump / sqrt(delta)`` settling to a constant.

    python3 scripts/run_extension_continuity.py --samples 200
"""

import argparse
import math
from dataclasses import dataclass, field

from polyrigid import diagnostics
from polyrigid.geom import Geometry


@dataclass
class ContinuityConfig:
    deltas: list[float] = field(default_factory=lambda: [1e-3, 1e-5, 1e-7, 1e-9, 1e-11])
    samples: int = 200
    seed: int = 0


def run(cfg: ContinuityConfig):
    print(f"{'geometry':8s} {'delta':>8s} {'max jump':>10s} {'jump/sqrt':>10s}  strata exact")
    for g in Geometry:
        for d in cfg.deltas:
            r = diagnostics.extension_crossings(g, cfg.samples, cfg.seed, d)
            print(f"{g.name:8s} {d:8.0e} {r.max_jump:10.3e} {r.max_jump / math.sqrt(d):10.3f}  {r.strata_exact}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--deltas", nargs="+", type=float, default=ContinuityConfig().deltas)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    run(ContinuityConfig(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
