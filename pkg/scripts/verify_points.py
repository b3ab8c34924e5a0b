"""Independent checks of a mid-branch state: strong-form residual under grid
refinement, and full time evolution of the trapped GPE.

    python3 scripts/verify_points.py --kind multipole --amplitude 0.5 --T 5
"""
import argparse
from pathlib import Path

import numpy as np

from gpe_bifurcation.continuation import ContinuationConfig, trace_branch
from gpe_bifurcation.symmetry import Kind, SubspaceSpec
from gpe_bifurcation.verifier import evolve, nodal_lines, periodicity_error, strong_residual, to_cartesian


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--kind", choices=[k.value for k in Kind], default="vortex")
    p.add_argument("--m0", type=int, default=1)
    p.add_argument("--n-radial", type=int, default=24)
    p.add_argument("--amplitude", type=float, default=0.5)
    p.add_argument("--T", type=float, default=5.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--dt-study", action="store_true", help="also rerun with dt/2 and report the error ratio")
    p.add_argument("--csv", help="write the evolution report here")
    args = p.parse_args()

    spec = SubspaceSpec(args.kind, args.m0, n_radial=args.n_radial)
    branch = trace_branch(spec, 0, ContinuationConfig(omega_max=2 * (args.m0 + 1) + 2))
    point = branch.points[int(np.argmin(np.abs(branch.amplitudes - args.amplitude)))]
    print(f"{args.kind}({args.m0},0) N_radial={spec.n_radial}: a={point.amplitude:.4f} omega={point.omega:.6f}")

    prev = None
    for factor in (4, 8, 16, 32, 64, 128, 256):
        r = strong_residual(point, factor)
        order = np.log2(prev / r) if prev else float("nan")
        print(f"  strong residual  factor {factor:4d}: {r:.3e}  observed order {order:.2f}")
        prev = r
    if spec.kind is Kind.MULTIPOLE:
        print("  nodal angles / pi:", np.round(np.array(nodal_lines(point)) / np.pi, 6).tolist())

    err, report = periodicity_error(point, args.T, args.dt, args.grid_n)
    print(f"  periodicity error at T={args.T}: {err:.3e}  mass drift {report.mass_drift:.2e}  energy drift {report.energy_drift:.2e}")
    if args.csv:
        report.to_csv(Path(args.csv))
    if args.dt_study:
        err2, _ = periodicity_error(point, args.T, args.dt / 2, args.grid_n)
        print(f"  dt/2: {err2:.3e}  ratio {err / err2:.2f}")
        f0 = to_cartesian(point, args.grid_n)
        u = [evolve(f0, args.T, dt)[1].values for dt in (args.dt, args.dt / 2, args.dt / 4)]
        print(f"  Richardson ratio of successive dt halvings: {np.linalg.norm(u[0] - u[1]) / np.linalg.norm(u[1] - u[2]):.3f}")


if __name__ == "__main__":
    main()
