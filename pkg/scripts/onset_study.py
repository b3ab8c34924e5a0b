"""Quadratic onset of omega(a) and power-law decay of the secondary modes."""
import argparse

import numpy as np
from scipy.integrate import quad

from gpe_bifurcation.continuation import bifurcation_point, fit_local_expansion, seed_branch, trace_branch
from gpe_bifurcation.galerkin import GalerkinSystem
from gpe_bifurcation.oscillator_basis import build_eigenfunction
from gpe_bifurcation.symmetry import SubspaceSpec


def oracle(m0, n0):
    v = build_eigenfunction((m0, n0))
    num = quad(lambda r: v(r) ** 4 * r, 0, np.inf, epsabs=1e-15, limit=200)[0]
    return num / quad(lambda r: v(r) ** 2 * r, 0, np.inf, epsabs=1e-15, limit=200)[0]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--halvings", type=int, default=4)
    args = p.parse_args()

    print("kind       (m0,n0)  a0          omega-omega*     ratio    (omega-omega*)/a0^2 / oracle")
    for kind, m0, n0 in [("vortex", 0, 0), ("vortex", 1, 0), ("vortex", 2, 0), ("vortex", 1, 1), ("multipole", 1, 0), ("multipole", 2, 0)]:
        spec = SubspaceSpec(kind, m0)
        system = GalerkinSystem(spec)
        star = bifurcation_point(m0, n0, kind)
        ref = oracle(m0, n0) if kind == "vortex" else np.nan
        prev = None
        for j in range(args.halvings + 1):
            a0 = 1e-2 / 2**j
            d = seed_branch(system, n0, a0=a0).omega - star
            ratio = d / prev if prev else np.nan
            print(f"{kind:10s} ({m0},{n0})    {a0:.3e}   {d:.6e}   {ratio:7.4f}  {d / a0**2 / ref:.6f}")
            prev = d

    print("\nfitted exponents |c_mn| ~ a^p over the first decade of a")
    for kind, m0 in [("vortex", 1), ("multipole", 1)]:
        branch = trace_branch(SubspaceSpec(kind, m0), 0)
        for f in fit_local_expansion(branch)[:8]:
            print(f"{kind:10s} mode {tuple(f.mode)}  p = {f.slope:.4f}  rms = {f.rms:.2e}")


if __name__ == "__main__":
    main()
