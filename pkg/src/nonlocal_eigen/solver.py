"""Large solutions of the inhomogeneous eigenvalue problem, Fredholm
diagnostics, lambda sweeps, and maximum-principle / Poincare verifiers.

A large solution with boundary datum h and interior datum g at a regular
spectral parameter lambda is v = v_h + G_lambda(g + lambda v_h); it is
reported decomposed into v_h, the explicit low-eigenspace part, and the
uniformly bounded complement u_perp.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundaryData, make_boundary_data, martin_apply
from .discretize import DiscreteKernel, GridFunction, as_values, weighted_norm
from .kernels import OperatorSpec
from .spectral import (
    LambdaContext,
    SpectralData,
    apply_Glambda,
    lambda_context,
    project_perp,
)


@dataclass(frozen=True)
class SolveReport:
    """A solution v = v_h + explicit + u_perp with diagnostic norms."""

    lam: float
    I: int
    v_h: GridFunction
    explicit: GridFunction
    u_perp: GridFunction
    v_total: GridFunction
    norms: dict
    green_residual: float

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "I": self.I, "norms": self.norms,
                "green_residual": self.green_residual,
                "v_h": list(self.v_h.values),
                "explicit": list(self.explicit.values),
                "u_perp": list(self.u_perp.values),
                "v_total": list(self.v_total.values)}


def _decompose_solve(sd: SpectralData, ctx: LambdaContext, rhs: np.ndarray,
                     split_at: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Split G_lambda(rhs) into the explicit part on modes < split_at and
    the complement.  split_at defaults to ctx.I."""
    if ctx.singular:
        raise ValueError("solve requested at a spectral value")
    I = ctx.I if split_at is None else split_at
    c = sd.coeffs(rhs) / (sd.lam - ctx.lam)
    explicit = sd.phi[:, :I] @ c[:I]
    perp = sd.phi[:, I:] @ c[I:]
    return explicit, perp


def _report(op: OperatorSpec, sd: SpectralData, ctx: LambdaContext,
            v_h: np.ndarray, rhs: np.ndarray, explicit: np.ndarray,
            perp: np.ndarray, K_frac: float = 0.25) -> SolveReport:
    grid = sd.grid
    g_ = grid
    total = v_h + explicit + perp
    u = explicit + perp  # = G_lambda(rhs)
    Kw = sd.dk.matrix * g_.w[None, :]
    green_res = np.sqrt(np.sum(g_.w * (u - ctx.lam * (Kw @ u) - Kw @ rhs) ** 2))
    mask = grid.compact_mask(K_frac)
    gam = op.gamma
    norms = {
        "v_L1_dgamma": weighted_norm(total, grid, "L1_delta", alpha=gam),
        "uperp_L1_dgamma": weighted_norm(perp, grid, "L1_delta", alpha=gam),
        "sup_K": float(np.max(np.abs(total[mask]))) if np.any(mask) else np.nan,
        "inf_Omega": float(np.min(total)),
    }
    return SolveReport(lam=ctx.lam, I=ctx.I,
                       v_h=GridFunction(grid, v_h),
                       explicit=GridFunction(grid, explicit),
                       u_perp=GridFunction(grid, perp),
                       v_total=GridFunction(grid, total),
                       norms=norms, green_residual=float(green_res))


def solve_dirichlet(sd: SpectralData, ctx: LambdaContext, f,
                    K_frac: float = 0.25) -> SolveReport:
    """Homogeneous boundary data: v = G_lambda(f), decomposed over E/E-perp."""
    op = sd.dk.op
    rhs = as_values(f, sd.grid)
    explicit, perp = _decompose_solve(sd, ctx, rhs)
    return _report(op, sd, ctx, np.zeros(sd.grid.N), rhs, explicit, perp, K_frac)


def solve_large(op: OperatorSpec, sd: SpectralData, ctx: LambdaContext,
                g, h, K_frac: float = 0.25) -> SolveReport:
    """Singular boundary data: v = v_h + G_lambda(g + lambda v_h)."""
    grid = sd.grid
    gv = as_values(g, grid) if g is not None else np.zeros(grid.N)
    v_h = martin_apply(op, grid, h).values
    rhs = gv + ctx.lam * v_h
    explicit, perp = _decompose_solve(sd, ctx, rhs)
    return _report(op, sd, ctx, v_h, rhs, explicit, perp, K_frac)


@dataclass(frozen=True)
class FredholmReport:
    """Projection of g + lambda_i v_h onto the eigenvalue group E_i."""

    group_index: int
    lam_i: float
    projection: GridFunction
    norm_L2: float
    eps: float
    A_plus: np.ndarray
    A_minus: np.ndarray

    @property
    def degenerate(self) -> bool:
        """Case (a) of the dichotomy: the projection vanishes."""
        return len(self.A_plus) == 0 and len(self.A_minus) == 0


def fredholm_diagnose(sd: SpectralData, op: OperatorSpec, g, h, i: int,
                      eps: float | None = None) -> FredholmReport:
    """Evaluate the blow-up dichotomy data at the i-th eigenvalue group.

    i is 1-based.  When eps is omitted it defaults to 1e-3 times the sup
    of the projection, keeping the sign sets nonempty in the blow-up case.
    """
    groups = sd.groups
    if not 1 <= i <= len(groups):
        raise ValueError(f"eigenvalue group index {i} out of range")
    grp = groups[i - 1]
    lam_i = float(sd.lam[grp[0]])
    grid = sd.grid
    gv = as_values(g, grid) if g is not None else np.zeros(grid.N)
    v_h = martin_apply(op, grid, h).values if h is not None else np.zeros(grid.N)
    rhs = gv + lam_i * v_h
    c = sd.coeffs(rhs)[grp]
    proj = sd.phi[:, grp] @ c
    sup = float(np.max(np.abs(proj)))
    if eps is None:
        # floored at the data scale so a projection that vanishes up to
        # roundoff yields empty sign sets (the degenerate case)
        scale = max(float(np.max(np.abs(rhs))), 1e-300)
        eps = max(1e-3 * sup, 1e-10 * scale)
    return FredholmReport(group_index=i, lam_i=lam_i,
                          projection=GridFunction(grid, proj),
                          norm_L2=float(np.sqrt(np.sum(grid.w * proj**2))),
                          eps=float(eps),
                          A_plus=np.nonzero(proj > eps)[0],
                          A_minus=np.nonzero(proj < -eps)[0])


@dataclass(frozen=True)
class SweepReport:
    """Condensed diagnostics of a lambda sweep toward an eigenvalue."""

    lam_i: float
    lam_list: np.ndarray
    sup_K: np.ndarray
    sup_K_Aplus: np.ndarray
    inf_Omega: np.ndarray
    uperp_L1_dgamma: np.ndarray
    proj_i: np.ndarray          # <v_lambda, phi_i> (first mode of the group)
    fitted_constant: float
    fitted_spread: float
    reports: list[SolveReport] = field(repr=False, default=None)


def sweep_lambda(op: OperatorSpec, sd: SpectralData, g, h, i: int,
                 lam_list, K_frac: float = 0.25,
                 eps: float | None = None) -> SweepReport:
    """Sweep lambda toward the i-th eigenvalue, recording blow-up data.

    The E/E-perp split is taken relative to the eigenvalue groups up to
    and including group i, so u_perp stays uniformly bounded while the
    explicit part carries the 1/(lambda_i - lambda) blow-up.
    """
    lam_list = np.asarray(lam_list, dtype=float)
    fred = fredholm_diagnose(sd, op, g, h, i, eps)
    lam_i = fred.lam_i
    grp = sd.groups[i - 1]
    split_at = int(grp[-1]) + 1
    if np.any(np.abs(lam_list - lam_i) < sd.tau_mult * lam_i):
        raise ValueError("sweep grid touches the spectrum")
    grid = sd.grid
    gv = as_values(g, grid) if g is not None else np.zeros(grid.N)
    v_h = martin_apply(op, grid, h).values if h is not None else np.zeros(grid.N)
    mask = grid.compact_mask(K_frac)
    maskA = np.zeros(grid.N, dtype=bool)
    maskA[fred.A_plus] = True
    maskKA = mask & maskA

    reports, supK, supKA, infO, up_norm, proj = [], [], [], [], [], []
    for lam in lam_list:
        ctx = lambda_context(sd, lam)
        rhs = gv + lam * v_h
        explicit, perp = _decompose_solve(sd, ctx, rhs, split_at=split_at)
        rep = _report(op, sd, ctx, v_h, rhs, explicit, perp, K_frac)
        total = rep.v_total.values
        reports.append(rep)
        supK.append(rep.norms["sup_K"])
        supKA.append(float(np.max(np.abs(total[maskKA]))) if np.any(maskKA) else np.nan)
        infO.append(rep.norms["inf_Omega"])
        up_norm.append(rep.norms["uperp_L1_dgamma"])
        proj.append(float(np.sum(grid.w * total * sd.phi[:, grp[0]])))

    supKA = np.array(supKA)
    products = supKA * np.abs(lam_i - lam_list)
    if np.all(np.isfinite(products)) and np.mean(products) > 0:
        fitted = float(np.mean(products))
        spread = float((np.max(products) - np.min(products)) / fitted)
    else:
        fitted, spread = np.nan, np.nan
    return SweepReport(lam_i=lam_i, lam_list=lam_list, sup_K=np.array(supK),
                       sup_K_Aplus=supKA, inf_Omega=np.array(infO),
                       uperp_L1_dgamma=np.array(up_norm), proj_i=np.array(proj),
                       fitted_constant=fitted, fitted_spread=spread,
                       reports=reports)


@dataclass(frozen=True)
class TrialReport:
    n_trials: int
    n_failures: int
    worst_margin: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.n_failures == 0


def check_max_principle(sd: SpectralData, ctx: LambdaContext, trials: int = 100,
                        seed: int = 0, include_singular_data: bool = True) -> TrialReport:
    """Solutions with f >= 0 and lambda < lambda_1 must be nonnegative.

    Random nonnegative data, including delta-weighted unbounded samples;
    a trial fails when min u < -1e-8 * max u.
    """
    if ctx.lam >= sd.lam[0]:
        raise ValueError("maximum principle requires lambda < lambda_1")
    rng = np.random.default_rng(seed)
    grid = sd.grid
    failures = []
    worst = np.inf
    for t in range(trials):
        f = rng.uniform(0.0, 1.0, grid.N)
        if include_singular_data and t % 3 == 2:
            f = f * grid.delta ** (-0.5)
        u = apply_Glambda(sd, ctx, f).values
        margin = np.min(u) / max(np.max(u), 1e-300)
        worst = min(worst, margin)
        if margin < -1e-8:
            failures.append((t, f))
    return TrialReport(n_trials=trials, n_failures=len(failures),
                       worst_margin=float(worst), failures=failures)


def check_poincare(sd: SpectralData, dk: DiscreteKernel, trials: int = 100,
                   seed: int = 0) -> TrialReport:
    """lambda_1 <phi, G_0 phi>_W <= <phi, phi>_W for every phi."""
    rng = np.random.default_rng(seed)
    grid = dk.grid
    lam1 = sd.lam[0]
    failures = []
    worst = -np.inf
    for t in range(trials):
        phi = rng.standard_normal(grid.N)
        lhs = lam1 * np.sum(grid.w * phi * (dk.matrix @ (grid.w * phi)))
        rhs = np.sum(grid.w * phi * phi)
        ratio = lhs / rhs
        worst = max(worst, ratio)
        if ratio > 1.0 + 1e-8:
            failures.append((t, ratio))
    return TrialReport(n_trials=trials, n_failures=len(failures),
                       worst_margin=float(worst), failures=failures)


def check_notions(sd: SpectralData, dk: DiscreteKernel, ctx: LambdaContext,
                  f, u=None) -> dict:
    """Residuals of the equivalent notions of solution for the same u.

    r1: distance to the resolvent solution; r5: Green-identity residual
    u - lambda G_0 u - G_0 f; r6: worst spectral-coefficient residual
    (lambda_j - lambda) <u, phi_j> - <f, phi_j>.
    """
    grid = dk.grid
    fv = as_values(f, grid)
    u_ref = apply_Glambda(sd, ctx, fv).values
    uv = as_values(u, grid) if u is not None else u_ref
    w = grid.w
    r1 = np.sqrt(np.sum(w * (uv - u_ref) ** 2))
    Kw = dk.matrix * w[None, :]
    r5 = np.sqrt(np.sum(w * (uv - ctx.lam * (Kw @ uv) - Kw @ fv) ** 2))
    r6 = np.max(np.abs((sd.lam - ctx.lam) * sd.coeffs(uv) - sd.coeffs(fv)))
    return {"r1": float(r1), "r5": float(r5), "r6": float(r6)}
