"""Command-line front end.

Subcommands: eigen, solve, sweep, limit-s, verify.  Outputs are
deterministic CSV files (UTF-8, 17 significant digits, '\\n' line ends)
plus JSON sidecars echoing the full configuration; files are written
atomically (temp + rename).

Exit codes: 0 ok, 1 verification failure, 2 bad configuration,
3 numerical failure, 4 lambda within tau_mult of the spectrum.
"""

from __future__ import annotations

import os

# honor the thread cap before numpy loads its BLAS
_threads = os.environ.get("NONLOCAL_EIGEN_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse
import json
import sys
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np

from . import solver as solver_mod
from .boundary import martin_apply
from .discretize import assemble_green_matrix
from .geometry import build_grid, make_domain
from .kernels import make_operator
from .limits import large_solution_limit_s, make_family, resolvent_convergence_s
from .spectral import eigendecompose, lambda_context
from .verify import run_verification

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SINGULAR = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    op: str = "rfl"
    s: float = 0.75
    domain: str = "interval"
    n: int = 1
    r: float = 1.0
    N: int = 256
    grade: float = 2.0
    M: int = 4096
    lam: float | None = None
    lam_list: list = field(default_factory=list)
    g: str = "zero"
    h: list = field(default_factory=lambda: [1.0])
    K_frac: float = 0.25
    out: str = "."
    seed: int = 0
    group: int = 1
    j_max: int = 10
    s_list: list = field(default_factory=lambda: [0.7, 0.8, 0.9, 0.95, 0.99])

    def to_dict(self) -> dict:
        return asdict(self)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows, footer: list[str] = ()):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float, np.floating))
                              else str(v) for v in row))
    lines.extend(footer)
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n")


def write_sidecar(csv_path: str, cfg: RunConfig):
    write_json(os.path.splitext(csv_path)[0] + ".json", {"config": cfg.to_dict()})


def resolve_g(spec: str, grid, sd, op):
    """Named data profiles: zero, one, delta_pow(alpha), eigmode(j), table:file."""
    spec = spec.strip()
    name, _, arg = spec.partition(":")
    if "(" in name and spec.endswith(")"):
        name, _, arg = spec[:-1].partition("(")
    name = name.strip().lower()
    if name == "zero":
        return np.zeros(grid.N)
    if name == "one":
        return np.ones(grid.N)
    if name == "delta_pow":
        alpha = float(arg)
        if alpha <= -1.0 - op.gamma:
            raise ConfigError(f"delta_pow exponent {alpha} outside the admissible range")
        return grid.delta**alpha
    if name == "eigmode":
        j = int(arg)
        if not 1 <= j <= sd.m:
            raise ConfigError(f"eigmode index {j} out of range 1..{sd.m}")
        return sd.phi[:, j - 1].copy()
    if name == "table":
        data = np.loadtxt(arg, delimiter=",", ndmin=2)
        if data.shape[1] != 2:
            raise ConfigError("custom table must have two columns: x, value")
        return np.interp(grid.x, data[:, 0], data[:, 1])
    raise ConfigError(f"unknown g profile {spec!r}")


def _setup(cfg: RunConfig):
    domain = make_domain(cfg.domain, cfg.n, cfg.r)
    op = make_operator(cfg.op, cfg.s, domain, cfg.M)
    grid = build_grid(domain, cfg.N, cfg.grade)
    return domain, op, grid


def _context_or_exit(sd, lam: float):
    try:
        return lambda_context(sd, lam)
    except ValueError:
        j = int(np.argmin(np.abs(sd.lam - lam)))
        print(f"lambda = {lam} is within tau_mult of the spectrum; nearest "
              f"eigenvalue lambda_{j + 1} = {_fmt(sd.lam[j])}", file=sys.stderr)
        raise SystemExit(EXIT_SINGULAR)


def cmd_eigen(cfg: RunConfig) -> int:
    _, op, grid = _setup(cfg)
    sd = eigendecompose(assemble_green_matrix(op, grid))
    j_max = min(cfg.j_max, sd.m)
    rows = [[j + 1, sd.lam[j], *sd.phi[:, j]] for j in range(j_max)]
    header = ["j", "lambda"] + [f"phi_x{i}" for i in range(grid.N)]
    path = os.path.join(cfg.out, "eigen.csv")
    write_csv(path, header, rows)
    write_sidecar(path, cfg)
    q = sd.phi[:, 0] / grid.delta**op.gamma
    write_json(os.path.join(cfg.out, "eigen.json"), {
        "config": cfg.to_dict(),
        "lambda_1": sd.lam[0],
        "gaps": list(np.diff(sd.lam[:j_max])),
        "phi1_delta_bracket": [float(np.min(q)), float(np.max(q))],
        "n_discarded": sd.n_discarded,
    })
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    _, op, grid = _setup(cfg)
    sd = eigendecompose(assemble_green_matrix(op, grid))
    lam = cfg.lam if cfg.lam is not None else 0.0
    ctx = _context_or_exit(sd, lam)
    g = resolve_g(cfg.g, grid, sd, op)
    rep = solver_mod.solve_large(op, sd, ctx, g, tuple(cfg.h) if len(cfg.h) > 1
                                 else cfg.h[0], cfg.K_frac)
    path = os.path.join(cfg.out, "profile.csv")
    write_csv(path, ["x", "delta", "v_h", "explicit", "u_perp", "v_lambda"],
              zip(grid.x, grid.delta, rep.v_h.values, rep.explicit.values,
                  rep.u_perp.values, rep.v_total.values))
    write_sidecar(path, cfg)
    write_json(os.path.join(cfg.out, "solution.json"),
               {"config": cfg.to_dict(), **rep.to_dict()})
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    _, op, grid = _setup(cfg)
    sd = eigendecompose(assemble_green_matrix(op, grid))
    if cfg.lam_list:
        lams = np.asarray(cfg.lam_list, dtype=float)
    else:
        grp = sd.groups[cfg.group - 1]
        lams = sd.lam[grp[0]] * (1.0 - np.array([1e-2, 1e-3, 1e-4, 1e-5, 2e-6]))
    g = resolve_g(cfg.g, grid, sd, op)
    try:
        sw = solver_mod.sweep_lambda(op, sd, g, tuple(cfg.h) if len(cfg.h) > 1
                                     else cfg.h[0], cfg.group, lams, cfg.K_frac)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SINGULAR
    path = os.path.join(cfg.out, "sweep.csv")
    write_csv(path,
              ["lambda", "sup_K", "sup_K_Aplus", "inf_Omega",
               "uperp_L1_dgamma", "proj_i"],
              zip(sw.lam_list, sw.sup_K, sw.sup_K_Aplus, sw.inf_Omega,
                  sw.uperp_L1_dgamma, sw.proj_i),
              footer=[f"# lambda_i={_fmt(sw.lam_i)}",
                      f"# fitted_constant={_fmt(sw.fitted_constant)}",
                      f"# fitted_spread={_fmt(sw.fitted_spread)}"])
    write_sidecar(path, cfg)
    return EXIT_OK


def cmd_limit_s(cfg: RunConfig) -> int:
    domain = make_domain(cfg.domain, cfg.n, cfg.r)
    grid = build_grid(domain, cfg.N, cfg.grade)
    fam = make_family(cfg.op, domain, cfg.M)
    lam = cfg.lam if cfg.lam is not None else 0.0
    if cfg.g == "zero":
        rep = large_solution_limit_s(fam, cfg.s_list, lam, None,
                                     tuple(cfg.h) if len(cfg.h) > 1 else cfg.h[0],
                                     grid, cfg.K_frac)
    else:
        opc = fam.classical()
        g = resolve_g(cfg.g, grid, None, opc)
        rep = resolvent_convergence_s(fam, cfg.s_list, lam, g, grid)
    rows = rep.rows()
    header = list(rows[0].keys())
    path = os.path.join(cfg.out, "ladder.csv")
    write_csv(path, header, ([row[k] for k in header] for row in rows))
    write_sidecar(path, cfg)
    write_json(os.path.join(cfg.out, "ladder_summary.json"),
               {"config": cfg.to_dict(), "monotone": rep.monotone})
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = run_verification(N=cfg.N, seed=cfg.seed)
    write_json(os.path.join(cfg.out, "verify.json"),
               {"config": cfg.to_dict(),
                "checks": [r.to_dict() for r in results],
                "all_passed": all(r.passed for r in results)})
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: measured={r.measured:.6g} "
              f"tolerance={r.tolerance:.6g}  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _parse_args(argv) -> tuple[str, RunConfig]:
    p = argparse.ArgumentParser(
        prog="nonlocal-eigen",
        description="Nonlocal eigenvalue laboratory: Green's operators, "
                    "Nystrom spectra, large boundary-blow-up solutions.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("eigen", "solve", "sweep", "limit-s", "verify"):
        q = sub.add_parser(name)
        q.add_argument("--op", choices=["rfl", "sfl", "classical"], default="rfl")
        q.add_argument("--s", type=float, default=0.75)
        q.add_argument("--domain", choices=["interval", "ball"], default="interval")
        q.add_argument("--n", type=int, default=1)
        q.add_argument("--r", type=float, default=1.0)
        q.add_argument("--N", type=int, default=256)
        q.add_argument("--grade", type=float, default=2.0)
        q.add_argument("--M", type=int, default=4096)
        q.add_argument("--lambda", dest="lam", type=float, default=None)
        q.add_argument("--lambda-list", dest="lam_list", type=str, default="")
        q.add_argument("--g", type=str, default="zero")
        q.add_argument("--h", type=str, default="1")
        q.add_argument("--K-frac", dest="K_frac", type=float, default=0.25)
        q.add_argument("--out", type=str, default=".")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--group", type=int, default=1)
        q.add_argument("--j-max", dest="j_max", type=int, default=10)
        q.add_argument("--s-list", dest="s_list", type=str, default="")
    a = p.parse_args(argv)
    try:
        cfg = RunConfig(
            op=a.op, s=a.s, domain=a.domain, n=a.n, r=a.r, N=a.N,
            grade=a.grade, M=a.M, lam=a.lam,
            lam_list=[float(v) for v in a.lam_list.split(",") if v.strip()],
            g=a.g, h=[float(v) for v in a.h.split(",") if v.strip()],
            K_frac=a.K_frac, out=a.out, seed=a.seed, group=a.group,
            j_max=a.j_max,
            s_list=[float(v) for v in a.s_list.split(",") if v.strip()]
            or [0.7, 0.8, 0.9, 0.95, 0.99],
        )
    except ValueError as exc:
        p.error(str(exc))
    return a.command, cfg


_COMMANDS = {"eigen": cmd_eigen, "solve": cmd_solve, "sweep": cmd_sweep,
             "limit-s": cmd_limit_s, "verify": cmd_verify}


def main(argv=None) -> int:
    try:
        command, cfg = _parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad flags, which matches the contract
        return int(exc.code or 0)
    np.random.seed(cfg.seed)
    try:
        return _COMMANDS[command](cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, AssertionError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
