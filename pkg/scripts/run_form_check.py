"""Closedness and monotonicity diagnostics for packings and Schlaefli functionals.

    python3 scripts/run_form_check.py --samples 1000 --pairs 500
"""

import argparse
import time
from dataclasses import dataclass, field

from polyrigid import diagnostics, mesh, schlaefli
from polyrigid.schlaefli import parse_spec

DEFAULT_SPECS = [f"phi:{g}:{h}" for g in ("e2", "s2", "h2") for h in (-2, 0, 1)] + ["psi:h2:-2", "psi:h2:0"]


@dataclass
class FormConfig:
    specs: list[str] = field(default_factory=lambda: list(DEFAULT_SPECS))
    packings: list[str] = field(default_factory=lambda: ["e2", "h2"])
    mesh: str = "tetrahedron"
    samples: int = 1000
    pairs: int = 500
    seed: int = 0


def fmt(x):
    return "none" if x is None else f"{x:.3e}"


def run(cfg: FormConfig):
    m = mesh.PLATONIC[cfg.mesh]()
    print(f"{'form':22s} {'interior':>10s} {'degenerate':>10s} {'monotone':>10s} {'time':>7s}")
    for g in cfg.packings:
        t = time.perf_counter()
        c = diagnostics.packing_closedness(g, cfg.samples, cfg.seed)
        mono = diagnostics.packing_monotone(m, g, cfg.pairs, cfg.seed)
        print(f"{c.spec:22s} {fmt(c.interior_max):>10s} {fmt(c.degenerate_max):>10s} "
              f"{fmt(mono.min_inner):>10s} {time.perf_counter() - t:6.2f}s")
    for s in cfg.specs:
        which, g, h = s.split(":")
        spec = parse_spec(which, g, float(h))
        t = time.perf_counter()
        c = schlaefli.closedness_diagnostic(spec, cfg.samples, cfg.seed)
        mono = diagnostics.schlaefli_monotone(m, spec, cfg.pairs, cfg.seed)
        print(f"{str(spec):22s} {fmt(c.interior_max):>10s} {fmt(c.degenerate_max):>10s} "
              f"{fmt(mono.min_inner):>10s} {time.perf_counter() - t:6.2f}s")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--specs", nargs="*", default=DEFAULT_SPECS, help="which:geometry:h triples")
    p.add_argument("--packings", nargs="*", default=["e2", "h2"], choices=["e2", "h2"])
    p.add_argument("--mesh", default="tetrahedron", choices=sorted(mesh.PLATONIC))
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--pairs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    run(FormConfig(**vars(p.parse_args())))


if __name__ == "__main__":
    main()
