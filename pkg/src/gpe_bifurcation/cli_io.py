"""Command-line driver and text formats (spectrum CSV, branch files, SVG).

Exit codes: 0 ok, 2 resonant (m0, n0), 3 numerical failure, 4 malformed input.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .continuation import (
    Branch,
    BranchPoint,
    ContinuationConfig,
    ResonantCase,
    Termination,
    bifurcation_point,
    trace_branch,
)
from .galerkin import GalerkinSystem, NonConvergence, SingularJacobian
from .oscillator_basis import spectrum_rows
from .symmetry import CoefficientVector, Kind, SubspaceSpec, mode_set
from .verifier import BoundaryMassTooLarge, InstabilityDetected, nodal_lines, periodicity_error, strong_residual

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
EXIT_OK, EXIT_RESONANT, EXIT_NUMERICAL, EXIT_FORMAT = 0, 2, 3, 4

# verifier contracts
STRONG_RESIDUAL_TOL = 1e-5
PERIODICITY_TOL = 1e-4
MASS_DRIFT_TOL = 1e-8


class BranchFormatError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# --- spectrum ---------------------------------------------------------------

def write_spectrum(path, m_max: int, n_max: int) -> Path:
    if m_max > 20 or n_max > 20:
        raise ValueError("spectrum table limited to m_max, n_max <= 20")
    path = Path(path)
    lines = ["# m,n,lambda,nodes,norm_error"]
    for m, n, lam, nodes, err in spectrum_rows(m_max, n_max):
        lines.append(f"{m},{n},{lam},{nodes},{fmt(err)}")
    path.write_text("\n".join(lines) + "\n")
    return path


# --- branch files -----------------------------------------------------------

def write_branch(path, branch: Branch) -> Path:
    spec = branch.spec
    modes = [f"c_{i.m}_{i.n}" for i in mode_set(spec)]
    header = {
        "format": FORMAT_VERSION,
        "m0": branch.m0,
        "n0": branch.n0,
        "kind": spec.kind.value,
        "n_radial": spec.n_radial,
        "m_harmonics": spec.m_harmonics,
        "omega_star": fmt(branch.omega_star),
        "termination": branch.termination.value if branch.termination else "None",
    }
    lines = [f"# {k}={v}" for k, v in header.items()]
    lines.append("# " + ",".join(["s", "omega", "a", "norm", "residual"] + modes))
    for p in branch.points:
        row = [p.arclength, p.omega, p.amplitude, p.norm, p.residual_norm, *p.coeffs.values]
        lines.append(",".join(fmt(v) for v in row))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_branch(path) -> Branch:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BranchFormatError(str(exc)) from exc
    header, rows = {}, []
    for ln, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                header[k.strip()] = v.strip()
            continue
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError as exc:
            raise BranchFormatError(f"line {ln}: {exc}") from exc
    try:
        if int(header["format"]) != FORMAT_VERSION:
            raise BranchFormatError(f"unsupported format version {header['format']}")
        spec = SubspaceSpec(
            Kind(header["kind"]), int(header["m0"]), int(header["n_radial"]), int(header["m_harmonics"])
        )
        n0 = int(header["n0"])
        term = header["termination"]
        termination = None if term == "None" else Termination(term)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, BranchFormatError):
            raise
        raise BranchFormatError(f"bad header: {exc}") from exc
    branch = Branch(spec.m0, n0, spec, [], termination)
    for i, row in enumerate(rows):
        if len(row) != 5 + spec.dim:
            raise BranchFormatError(f"record {i}: expected {5 + spec.dim} fields, got {len(row)}")
        s, omega, a, _norm, resid = row[:5]
        branch.points.append(BranchPoint(omega, CoefficientVector(spec, np.array(row[5:])), a, resid, s))
    if any(b.arclength <= a.arclength for a, b in zip(branch.points, branch.points[1:])):
        raise BranchFormatError("records are not ordered by arclength")
    return branch


# --- SVG --------------------------------------------------------------------

def branch_svg(branches: list[Branch], width: int = 640, height: int = 480) -> str:
    """Bifurcation diagram: ||c||_2 against omega, one polyline per branch,
    with each bifurcation value marked on the omega axis."""
    pad = 50
    om = np.concatenate([b.omegas for b in branches] + [[b.omega_star for b in branches]])
    nm = np.concatenate([b.norms() for b in branches] + [[0.0]])
    x0, x1 = float(om.min()), float(om.max())
    y1 = float(nm.max()) or 1.0
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - v / y1 * (height - 2 * pad)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle">omega</text>',
        f'<text x="15" y="{height / 2:.1f}" transform="rotate(-90 15 {height / 2:.1f})" text-anchor="middle">||c||_2</text>',
        f'<text x="{pad}" y="{height - pad + 18}" text-anchor="middle">{x0:.4g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 18}" text-anchor="middle">{x1:.4g}</text>',
        f'<text x="{pad - 5}" y="{pad}" text-anchor="end">{y1:.4g}</text>',
    ]
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    for i, b in enumerate(branches):
        pts = " ".join(f"{sx(o):.3f},{sy(n):.3f}" for o, n in zip(b.omegas, b.norms()))
        label = escape(f"{b.kind.value}({b.m0},{b.n0})")
        color = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"><title>{label}</title></polyline>')
        xs = sx(b.omega_star)
        out.append(f'<circle cx="{xs:.3f}" cy="{height - pad}" r="4" fill="{color}"><title>omega*={b.omega_star:g}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- configuration ----------------------------------------------------------

@dataclass
class RunConfig:
    mode: str = "trace"
    kind: str = "vortex"
    m0: int = 1
    n0: int = 0
    n_radial: int = 12
    m_harmonics: int = 4
    a0: float = 1e-2
    step: float = 5e-3
    omega_max: float = 40.0
    norm_max: float = 10.0
    max_points: int = 2000
    out_dir: str = "out"
    branch_file: str = ""
    verify_point: str = "mid"
    dt: float = 1e-3
    T: float = 5.0
    grid_n: int = 256
    fine_factor: int = 64
    m_max: int = 6
    n_max: int = 6
    # no randomness anywhere; kept for format stability
    seed: int = 0

    def validate(self):
        if self.mode not in ("spectrum", "trace", "verify"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self.subspace()
        self.continuation()
        if self.dt <= 0 or self.dt > 1e-3 or self.T <= 0 or self.T > 50:
            raise ValueError("need 0 < dt <= 1e-3 and 0 < T <= 50")
        if self.grid_n < 8 or self.grid_n & (self.grid_n - 1):
            raise ValueError("grid_n must be a power of two >= 8")
        if self.fine_factor < 2:
            raise ValueError("fine_factor must be >= 2")
        if self.seed != 0:
            raise ValueError("seed is fixed at 0")
        return self

    def subspace(self) -> SubspaceSpec:
        return SubspaceSpec(Kind(self.kind), self.m0, self.n_radial, self.m_harmonics)

    def continuation(self) -> ContinuationConfig:
        return ContinuationConfig(
            a0=self.a0,
            step=self.step,
            omega_max=self.omega_max,
            norm_max=self.norm_max,
            max_points=self.max_points,
        )


def read_config_file(path) -> dict[str, str]:
    """Flat ``key=value`` lines; keys may use dashes or underscores."""
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {line!r}")
        k, v = line.split("=", 1)
        out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gpe-bif", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--mode", choices=["spectrum", "trace", "verify"])
    p.add_argument("--kind", choices=[k.value for k in Kind])
    p.add_argument("--m0", type=int)
    p.add_argument("--n0", type=int)
    p.add_argument("--n-radial", type=int)
    p.add_argument("--m-harmonics", type=int)
    p.add_argument("--a0", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--norm-max", type=float)
    p.add_argument("--max-points", type=int)
    p.add_argument("--out-dir")
    p.add_argument("--branch-file", help="branch file to verify")
    p.add_argument("--verify-point", help="record index, 'mid', or 'a=<amplitude>'")
    p.add_argument("--dt", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--fine-factor", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    values.update({k: v for k, v in vars(args).items() if v is not None and k not in ("config", "verbose")})
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    for k, v in values.items():
        if k not in known:
            raise ValueError(f"unknown config key {k!r}")
        default = getattr(cfg, k)
        setattr(cfg, k, type(default)(v))
    return cfg.validate()


# --- commands ---------------------------------------------------------------

def branch_stem(kind: str, m0: int, n0: int) -> str:
    return f"branch_{kind}_{m0}_{n0}"


def cmd_spectrum(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = write_spectrum(out / "spectrum.csv", cfg.m_max, cfg.n_max)
    print(path)
    return EXIT_OK


def cmd_trace(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        bifurcation_point(cfg.m0, cfg.n0, cfg.kind)
    except ResonantCase as exc:
        print(f"resonant: {exc}", file=sys.stderr)
        return EXIT_RESONANT
    try:
        branch = trace_branch(cfg.subspace(), cfg.n0, cfg.continuation())
    except (NonConvergence, SingularJacobian) as exc:
        print(f"numerical failure while seeding: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    stem = branch_stem(cfg.kind, cfg.m0, cfg.n0)
    write_branch(out / f"{stem}.csv", branch)
    (out / f"{stem}.svg").write_text(branch_svg([branch]))
    print(f"{out / stem}.csv: {len(branch.points)} points, {branch.termination.value}")
    if branch.termination is Termination.STEP_FAILURE:
        return EXIT_NUMERICAL
    return EXIT_OK


def select_point(branch: Branch, selector: str) -> tuple[int, BranchPoint]:
    """``mid`` (middle record), ``a=<value>`` (amplitude closest to value) or a record index."""
    if not branch.points:
        raise ValueError("branch file has no records")
    if selector == "mid":
        i = len(branch.points) // 2
    elif selector.startswith("a="):
        i = int(np.argmin(np.abs(branch.amplitudes - float(selector[2:]))))
    else:
        i = int(selector)
    return i % len(branch.points), branch.points[i]


def verify_point(point: BranchPoint, n0: int, cfg: RunConfig) -> dict:
    system = GalerkinSystem(point.spec)
    trivial = not np.any(point.coeffs.values)
    galerkin_res = float(np.linalg.norm(system.residual(point.coeffs, point.omega)))
    report = {
        "omega": point.omega,
        "amplitude": point.amplitude,
        "galerkin_residual": galerkin_res,
        "strong_residual": 0.0 if trivial else strong_residual(point, cfg.fine_factor),
        "tail_ratio": system.tail_ratio(point.coeffs),
    }
    if point.spec.kind is Kind.MULTIPOLE and n0 == 0 and not trivial:
        report["nodal_angles"] = nodal_lines(point)
        m0 = point.spec.m0
        expected = [(k + 0.5) * np.pi / m0 for k in range(2 * m0)]
        cell = 2 * np.pi / (720 * m0)
        got = report["nodal_angles"]
        report["nodal_ok"] = len(got) == len(expected) and all(abs(a - b) <= cell for a, b in zip(got, expected))
    per, evo = periodicity_error(point, cfg.T, cfg.dt, cfg.grid_n)
    report["periodicity_error"] = per
    report["mass_drift"] = evo.mass_drift
    report["energy_drift"] = evo.energy_drift
    report["passed"] = bool(
        galerkin_res <= 1e-10 * max(1.0, point.norm)
        and report["strong_residual"] <= STRONG_RESIDUAL_TOL
        and per <= PERIODICITY_TOL
        and evo.mass_drift <= MASS_DRIFT_TOL
        and report.get("nodal_ok", True)
    )
    report["residual_flag"] = bool(report["strong_residual"] > STRONG_RESIDUAL_TOL or galerkin_res > 1e-10 * max(1.0, point.norm))
    return report


def cmd_verify(cfg: RunConfig) -> int:
    try:
        branch = read_branch(cfg.branch_file)
        index, point = select_point(branch, cfg.verify_point)
    except (BranchFormatError, ValueError, IndexError) as exc:
        print(f"malformed branch file: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    try:
        report = verify_point(point, branch.n0, cfg)
    except (BoundaryMassTooLarge, InstabilityDetected) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report = {"branch_file": str(cfg.branch_file), "record": index, **report}
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{Path(cfg.branch_file).stem}_verify_{index}.json"
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(path)
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    return {"spectrum": cmd_spectrum, "trace": cmd_trace, "verify": cmd_verify}[cfg.mode](cfg)


if __name__ == "__main__":
    sys.exit(main())
