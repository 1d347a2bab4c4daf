"""The s -> 1 classical-limit program: spectral convergence, resolvent
convergence and convergence of large solutions to the classical
Dirichlet problem.

The classical endpoint is always computed from the exact classical
kernels (closed-form Green's function and Poisson kernel) on the same
grid, never by extrapolating s close to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discretize import as_values, assemble_green_matrix, weighted_norm
from .geometry import DomainSpec, QuadGrid
from .kernels import OperatorKind, OperatorSpec, make_operator
from .solver import SolveReport, solve_large
from .spectral import SpectralData, eigendecompose, lambda_context, apply_Glambda


@dataclass(frozen=True)
class OperatorFamily:
    """An operator kind on a fixed domain, parameterized by the order s."""

    kind: OperatorKind
    domain: DomainSpec
    sfl_truncation: int = 4096

    def at(self, s: float) -> OperatorSpec:
        return make_operator(self.kind, s, self.domain, self.sfl_truncation)

    def classical(self) -> OperatorSpec:
        return make_operator(OperatorKind.CLASSICAL, 1.0, self.domain)


def make_family(kind, domain: DomainSpec, sfl_truncation: int = 4096) -> OperatorFamily:
    if isinstance(kind, str):
        kind = OperatorKind(kind.lower())
    return OperatorFamily(kind=kind, domain=domain, sfl_truncation=sfl_truncation)


@dataclass(frozen=True)
class SLimitReport:
    """Ladder diagnostics of the s -> 1 limit against the classical endpoint."""

    s_list: np.ndarray
    lam1: np.ndarray             # lambda_1(s)
    lam1_err: np.ndarray         # |lambda_1(s) - lambda_1(classical)|
    b: np.ndarray                # blow-up exponent 1-2s+gamma per s
    kernel_dist: np.ndarray = None     # sup distance of G_0 on the compact set
    sol_dist: np.ndarray = None        # solution distance to the classical one
    omega: np.ndarray = None           # sup_j |mu_j(s) - mu_j(1)|
    alignment: np.ndarray = None       # (n_s, j_max) |<phi_j(s), phi_j(1)>|
    boundary_fit: np.ndarray = None    # log|v| vs log delta slope per s
    sup_K: np.ndarray = None           # interior sup of the large solution
    near_boundary_amp: np.ndarray = None  # sup v * delta^{b(s)} near the boundary
    monotone: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []
        for i, s in enumerate(self.s_list):
            row = {"s": float(s), "lam1": float(self.lam1[i]),
                   "lam1_err": float(self.lam1_err[i]), "b": float(self.b[i])}
            for name in ("kernel_dist", "sol_dist", "omega", "boundary_fit",
                         "sup_K", "near_boundary_amp"):
                v = getattr(self, name)
                if v is not None:
                    row[name] = float(v[i])
            out.append(row)
        return out


def _monotone_decreasing(a: np.ndarray, slack: float = 0.10) -> bool:
    """Nonincreasing along the ladder, allowing a relative slack."""
    a = np.asarray(a, dtype=float)
    return bool(np.all(a[1:] <= (1.0 + slack) * a[:-1]))


def boundary_exponent_fit(v, grid: QuadGrid, n_nodes: int = 5) -> float:
    """Least-squares slope of log|v| against log delta near the boundary."""
    vals = np.abs(as_values(v, grid))
    order = np.argsort(grid.delta)[:n_nodes]
    ld, lv = np.log(grid.delta[order]), np.log(vals[order])
    slope, _ = np.polyfit(ld, lv, 1)
    return float(slope)


def _check_ladder(s_list) -> np.ndarray:
    s_list = np.asarray(s_list, dtype=float)
    if s_list.size == 0:
        raise ValueError("empty s ladder")
    if np.any(np.diff(s_list) <= 0):
        raise ValueError("s ladder must be strictly increasing")
    if np.any((s_list <= 0.5) | (s_list >= 1.0)):
        raise ValueError("s ladder must lie in (1/2, 1)")
    return s_list


def spectral_convergence_s(family: OperatorFamily, s_list, j_max: int,
                           grid: QuadGrid, tau_mult: float = 1e-6) -> SLimitReport:
    """Eigenvalue/eigenfunction convergence toward the classical spectrum."""
    s_list = _check_ladder(s_list)
    sd1 = eigendecompose(assemble_green_matrix(family.classical(), grid), tau_mult)
    lam1c, mu1 = sd1.lam[0], 1.0 / sd1.lam[:j_max]
    phi1 = sd1.phi[:, :j_max]

    lam1, omega, align, bvals = [], [], [], []
    for s in s_list:
        op = family.at(s)
        sd = eigendecompose(assemble_green_matrix(op, grid), tau_mult)
        lam1.append(sd.lam[0])
        omega.append(np.max(np.abs(1.0 / sd.lam[:j_max] - mu1)))
        align.append(np.abs(phi1.T @ (grid.w[:, None] * sd.phi[:, :j_max])).diagonal())
        bvals.append(op.b)
    lam1 = np.array(lam1)
    omega = np.array(omega)
    return SLimitReport(
        s_list=s_list, lam1=lam1, lam1_err=np.abs(lam1 - lam1c),
        b=np.array(bvals), omega=omega, alignment=np.array(align),
        monotone={"omega_decreasing": _monotone_decreasing(omega),
                  "lam1_err_decreasing": _monotone_decreasing(np.abs(lam1 - lam1c))},
    )


def resolvent_convergence_s(family: OperatorFamily, s_list, lam: float, f,
                            grid: QuadGrid, tau_mult: float = 1e-6) -> SLimitReport:
    """L2 convergence of the shifted solution operator to the classical one."""
    s_list = _check_ladder(s_list)
    sd1 = eigendecompose(assemble_green_matrix(family.classical(), grid), tau_mult)
    ctx1 = lambda_context(sd1, lam)
    u1 = apply_Glambda(sd1, ctx1, f).values

    lam1, dists, bvals = [], [], []
    for s in s_list:
        op = family.at(s)
        sd = eigendecompose(assemble_green_matrix(op, grid), tau_mult)
        ctx = lambda_context(sd, lam)
        u = apply_Glambda(sd, ctx, f).values
        lam1.append(sd.lam[0])
        dists.append(np.sqrt(np.sum(grid.w * (u - u1) ** 2)))
        bvals.append(op.b)
    lam1 = np.array(lam1)
    dists = np.array(dists)
    return SLimitReport(
        s_list=s_list, lam1=lam1, lam1_err=np.abs(lam1 - sd1.lam[0]),
        b=np.array(bvals), sol_dist=dists,
        monotone={"sol_dist_decreasing": _monotone_decreasing(dists)},
    )


def large_solution_limit_s(family: OperatorFamily, s_list, lam: float, g, h,
                           grid: QuadGrid, K_frac: float = 0.25,
                           tau_mult: float = 1e-6) -> SLimitReport:
    """Convergence of large solutions to the classical Dirichlet solution.

    The classical endpoint v_1 = M_1(h) + G_{lambda}(g + lambda M_1(h))
    uses the exact classical kernels; per s the L1 distance on the compact
    set K, the boundary-exponent fit of log|v| vs log delta and the
    near-boundary amplification v * delta^{b(s)} are recorded.
    """
    s_list = _check_ladder(s_list)
    op1 = family.classical()
    sd1 = eigendecompose(assemble_green_matrix(op1, grid), tau_mult)
    v1 = solve_large(op1, sd1, lambda_context(sd1, lam), g, h, K_frac).v_total.values

    mask = grid.compact_mask(K_frac)
    near = np.argsort(grid.delta)[:5]
    lam1, dists, bvals, fits, supK, amp = [], [], [], [], [], []
    for s in s_list:
        op = family.at(s)
        sd = eigendecompose(assemble_green_matrix(op, grid), tau_mult)
        rep = solve_large(op, sd, lambda_context(sd, lam), g, h, K_frac)
        v = rep.v_total.values
        lam1.append(sd.lam[0])
        dists.append(np.sum(grid.w[mask] * np.abs(v - v1)[mask]))
        bvals.append(op.b)
        fits.append(boundary_exponent_fit(v, grid))
        supK.append(np.max(np.abs(v[mask])))
        amp.append(np.max(np.abs(v[near]) * grid.delta[near] ** op.b))
    lam1 = np.array(lam1)
    dists = np.array(dists)
    fits = np.array(fits)
    return SLimitReport(
        s_list=s_list, lam1=lam1, lam1_err=np.abs(lam1 - sd1.lam[0]),
        b=np.array(bvals), sol_dist=dists, boundary_fit=fits,
        sup_K=np.array(supK), near_boundary_amp=np.array(amp),
        monotone={"sol_dist_decreasing": _monotone_decreasing(dists),
                  "fit_to_zero": _monotone_decreasing(np.abs(fits))},
    )
