"""Trace the standard set of vortex and multipole branches and draw them in one diagram.

    python3 scripts/trace_branches.py --out-dir out/branches --omega-max 20
"""
import argparse
import logging
import time
from pathlib import Path

from gpe_bifurcation.cli_io import branch_stem, branch_svg, write_branch
from gpe_bifurcation.continuation import ContinuationConfig, trace_branch
from gpe_bifurcation.symmetry import SubspaceSpec

CASES = [
    ("vortex", 0, 0),
    ("vortex", 1, 0),
    ("vortex", 2, 0),
    ("vortex", 1, 1),
    ("multipole", 1, 0),
    ("multipole", 2, 0),
    ("multipole", 3, 1),
]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", default="out/branches")
    p.add_argument("--n-radial", type=int, default=12)
    p.add_argument("--m-harmonics", type=int, default=4)
    p.add_argument("--omega-max", type=float, default=40.0)
    p.add_argument("--norm-max", type=float, default=10.0)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = ContinuationConfig(omega_max=args.omega_max, norm_max=args.norm_max)
    traced = []
    for kind, m0, n0 in CASES:
        t0 = time.perf_counter()
        spec = SubspaceSpec(kind, m0, n_radial=args.n_radial, m_harmonics=args.m_harmonics)
        branch = trace_branch(spec, n0, cfg)
        write_branch(out / f"{branch_stem(kind, m0, n0)}.csv", branch)
        traced.append(branch)
        last = branch.points[-1]
        print(
            f"{kind:9s} ({m0},{n0})  w*={branch.omega_star:5.1f}  points={len(branch.points):4d}  "
            f"end w={last.omega:8.4f} |c|={last.norm:7.3f}  {branch.termination.value:16s} "
            f"{time.perf_counter() - t0:6.2f}s"
        )
    (out / "diagram.svg").write_text(branch_svg(traced))
    print(f"wrote {len(traced)} branch files and {out / 'diagram.svg'}")


if __name__ == "__main__":
    main()
