"""Eigendecomposition of the discrete Green's operator and the solution
operator for the shifted problem.

The symmetrized matrix A = W^{1/2} K W^{1/2} is diagonalized once; its
eigenvalues mu_j are the discrete eigenvalues of the Green's operator
and lambda_j = 1/mu_j those of the differential operator.  All
solve/project operations act through the retained eigenpairs, so the
resolvent formula u = sum <f, phi_j> phi_j / (lambda_j - lambda) is
exact in the discrete model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .discretize import DiscreteKernel, GridFunction, as_values
from .geometry import QuadGrid


@dataclass(frozen=True)
class SpectralData:
    """Discrete eigenpairs, weighted-orthonormal, eigenvalues ascending."""

    dk: DiscreteKernel
    lam: np.ndarray          # lambda_j = 1/mu_j, ascending
    phi: np.ndarray          # (N, m); column j holds phi_j at the nodes
    tau_mult: float
    n_discarded: int

    @property
    def grid(self) -> QuadGrid:
        return self.dk.grid

    @property
    def m(self) -> int:
        return len(self.lam)

    def coeffs(self, f) -> np.ndarray:
        """Weighted spectral coefficients <f, phi_j>_W."""
        v = as_values(f, self.grid)
        return self.phi.T @ (self.grid.w * v)

    def synth(self, c: np.ndarray) -> GridFunction:
        return GridFunction(self.grid, self.phi @ c)

    @property
    def groups(self) -> list[np.ndarray]:
        """Indices grouped by eigenvalue multiplicity (relative gap tau_mult)."""
        breaks = np.where(np.diff(self.lam) > self.tau_mult * self.lam[1:])[0]
        return np.split(np.arange(self.m), breaks + 1)


@dataclass(frozen=True)
class LambdaContext:
    """Position of a spectral parameter lambda relative to the spectrum."""

    sd: SpectralData = field(repr=False)
    lam: float
    I: int                  # modes with lambda_j <= lambda (grouped)
    lam_bar: float          # next eigenvalue above lambda
    d_sigma: float          # distance to the spectrum
    singular: bool          # lambda coincides with an eigenvalue group


def eigendecompose(dk: DiscreteKernel, tau_mult: float = 1e-6,
                   mu_floor_rel: float = 1e-14) -> SpectralData:
    """Dense symmetric eigendecomposition of the Nystrom operator.

    Eigenvalues of A below mu_floor_rel * mu_max are quadrature noise and
    are discarded.  phi_1 is sign-fixed nonnegative; every other phi_j
    has its first significantly-nonzero component positive.
    """
    w = dk.grid.w
    sw = np.sqrt(w)
    A = dk.matrix * sw[:, None] * sw[None, :]
    asym = np.max(np.abs(A - A.T)) / max(np.max(np.abs(A)), 1e-300)
    if asym > 1e-10:
        raise ValueError(f"symmetrized kernel is not symmetric (relative residual {asym:.2e})")
    mu, psi = scipy.linalg.eigh(A)
    mu, psi = mu[::-1], psi[:, ::-1]
    keep = mu > mu_floor_rel * mu[0]
    n_discarded = int(np.sum(~keep))
    mu, psi = mu[keep], psi[:, keep]
    lam = 1.0 / mu
    phi = psi / sw[:, None]
    # deterministic signs
    for j in range(phi.shape[1]):
        col = phi[:, j]
        if j == 0:
            if np.sum(w * col) < 0:
                phi[:, j] = -col
        else:
            nz = np.nonzero(np.abs(col) > 1e-10 * np.max(np.abs(col)))[0]
            if len(nz) and col[nz[0]] < 0:
                phi[:, j] = -col
    return SpectralData(dk=dk, lam=lam, phi=phi, tau_mult=tau_mult,
                        n_discarded=n_discarded)


def lambda_context(sd: SpectralData, lam: float,
                   allow_singular: bool = False) -> LambdaContext:
    """Locate lambda relative to the discrete spectrum (grouped)."""
    lam = float(lam)
    scale = max(abs(lam), sd.lam[0])
    d = np.abs(sd.lam - lam)
    d_sigma = float(np.min(d))
    singular = d_sigma <= sd.tau_mult * scale
    if singular and not allow_singular:
        j = int(np.argmin(d))
        raise ValueError(f"lambda={lam} is within tau_mult of eigenvalue "
                         f"lambda_{j + 1}={sd.lam[j]}; regular context demanded")
    if singular:
        # include the full eigenvalue group containing lambda in E
        hit = int(np.argmin(d))
        for grp in sd.groups:
            if hit in grp:
                I = int(grp[-1]) + 1
                break
    else:
        I = int(np.sum(sd.lam <= lam))
    lam_bar = float(sd.lam[I]) if I < sd.m else np.inf
    return LambdaContext(sd=sd, lam=lam, I=I, lam_bar=lam_bar,
                         d_sigma=d_sigma, singular=singular)


def apply_Glambda(sd: SpectralData, ctx: LambdaContext, f) -> GridFunction:
    """Spectral solution operator of (L - lambda): all retained modes."""
    if ctx.singular:
        raise ValueError("solution operator undefined at a spectral value")
    c = sd.coeffs(f)
    return sd.synth(c / (sd.lam - ctx.lam))


def apply_Glambda_neumann(dk: DiscreteKernel, ctx: LambdaContext, f,
                          tol: float = 1e-12, max_iter: int = 10_000) -> GridFunction:
    """Fixed-point route u <- lambda G_0 u + G_0 f; contracts for |lambda| < lambda_1."""
    sd = ctx.sd
    lam = ctx.lam
    if abs(lam) >= sd.lam[0]:
        raise ValueError(f"Neumann iteration requires |lambda| < lambda_1 = {sd.lam[0]}")
    w = dk.grid.w
    G0f = dk.matrix @ (w * as_values(f, dk.grid))
    u = G0f.copy()
    for _ in range(max_iter):
        unew = lam * (dk.matrix @ (w * u)) + G0f
        res = np.sqrt(np.sum(w * (unew - lam * (dk.matrix @ (w * unew)) - G0f) ** 2))
        u = unew
        if res <= tol:
            return GridFunction(dk.grid, u)
    raise RuntimeError(f"Neumann iteration did not reach tol={tol} in {max_iter} "
                       f"iterations (residual {res:.3e})")


def project_perp(sd: SpectralData, ctx: LambdaContext, f) -> GridFunction:
    """Remove the eigenspace components with lambda_j below lam_bar: f - P_E f."""
    v = as_values(f, sd.grid)
    if ctx.I == 0:
        return GridFunction(sd.grid, v.copy())
    c = sd.coeffs(v)[: ctx.I]
    return GridFunction(sd.grid, v - sd.phi[:, : ctx.I] @ c)


def apply_Glambda_perp(sd: SpectralData, ctx: LambdaContext, f_perp,
                       orth_tol: float = 1e-8) -> GridFunction:
    """Solution operator restricted to the orthogonal complement of E.

    Well-defined and uniformly bounded even as lambda approaches the top
    of E, since only modes with lambda_j >= lam_bar act.
    """
    v = as_values(f_perp, sd.grid)
    c = sd.coeffs(v)
    if ctx.I > 0:
        scale = np.sqrt(np.sum(sd.grid.w * v**2))
        if scale > 0 and np.max(np.abs(c[: ctx.I])) > orth_tol * scale:
            raise ValueError("input is not orthogonal to the eigenspace E")
        c = c.copy()
        c[: ctx.I] = 0.0
    denom = sd.lam - ctx.lam
    denom[: ctx.I] = 1.0  # inert entries
    return sd.synth(c / denom)


def spectral_norm_Hk(sd: SpectralData, u, k: float) -> float:
    """Push-forward spectral norm (sum lambda_j^k <u, phi_j>^2)^{1/2}."""
    if k < 0:
        raise ValueError("spectral norm order k must be >= 0")
    c = sd.coeffs(u)
    return float(np.sqrt(np.sum(sd.lam**k * c**2)))
