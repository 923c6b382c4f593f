"""Spectral calculus on the half plane X = (0, inf) x R.

A function on X is represented by its coefficients over a symmetric midpoint
grid in the frequency variable and a truncated Laguerre range per fiber.
Operators act as entrywise multipliers on this representation; inner
products use the Plancherel weight derived from the inversion formula and
the fiber normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .axis import (
    AxisGrid,
    LaguerreBasisSpec,
    axis_grid,
    _analysis_factors,
    _basis_matrix,
)
from .specfun import log_gamma

__all__ = [
    "MultiplierSpec",
    "PlaneFunction",
    "PlaneGrid",
    "PlaneSpectral",
    "SampledPlaneFunction",
    "WeightedPlaneFunction",
    "apply_multiplier",
    "fiber_transform",
    "inner_product",
    "modified_symbol",
    "norm_sq",
    "plancherel_weight",
    "quadratic_form",
    "synthesize_plane",
]


@dataclass(frozen=True)
class PlaneGrid:
    """Discretization: symmetric lambda midpoints, fiber truncation, w window.

    The frequency grid holds the midpoints +-(i + 1/2) dlam with
    dlam = lam_max / (n_lam / 2); no node sits at lambda = 0, where fibers
    exist only as a limit and the spectral measure vanishes anyway.
    """

    alpha: float
    lam_max: float = 40.0
    n_lam: int = 256
    k_max: int = 64
    axis_order: int = 72
    w_max: float = 12.0
    n_w: int = 1024

    def __post_init__(self):
        if self.alpha <= -1.0:
            raise ValueError("alpha must be > -1")
        if self.n_lam % 2 or self.n_lam < 2:
            raise ValueError("n_lam must be a positive even count")
        if self.k_max < 0 or self.axis_order < self.k_max + 1:
            raise ValueError("need axis_order >= k_max + 1 >= 1")
        if self.lam_max <= 0 or self.w_max <= 0 or self.n_w < 2:
            raise ValueError("invalid grid extents")

    @cached_property
    def dlam(self) -> float:
        return self.lam_max / (self.n_lam // 2)

    @cached_property
    def lambdas_pos(self) -> np.ndarray:
        i = np.arange(self.n_lam // 2)
        out = (i + 0.5) * self.dlam
        out.setflags(write=False)
        return out

    @cached_property
    def lambdas(self) -> np.ndarray:
        pos = self.lambdas_pos
        out = np.concatenate([-pos[::-1], pos])
        out.setflags(write=False)
        return out

    @cached_property
    def w_nodes(self) -> np.ndarray:
        out = np.linspace(-self.w_max, self.w_max, self.n_w)
        out.setflags(write=False)
        return out

    @cached_property
    def w_weights(self) -> np.ndarray:
        dw = self.w_nodes[1] - self.w_nodes[0]
        out = np.full(self.n_w, dw)
        out[0] *= 0.5
        out[-1] *= 0.5
        out.setflags(write=False)
        return out

    def fiber_spec(self, lam: float) -> LaguerreBasisSpec:
        return LaguerreBasisSpec(self.alpha, lam)

    def fiber_grid(self, lam: float) -> AxisGrid:
        return axis_grid(self.fiber_spec(lam), self.axis_order)


@dataclass
class PlaneSpectral:
    """Coefficients f_hat(lambda_i, k) over a PlaneGrid, complex valued."""

    grid: PlaneGrid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        want = (self.grid.n_lam, self.grid.k_max + 1)
        if self.coeffs.shape != want:
            raise ValueError(f"coefficient shape {self.coeffs.shape} != {want}")

    def copy_with(self, coeffs: np.ndarray) -> "PlaneSpectral":
        return PlaneSpectral(self.grid, coeffs)


def modified_symbol(alpha: float, s: float, lam, k) -> np.ndarray:
    """(2|lam|)^s Gamma(z + (1+s)/2) / Gamma(z + (1-s)/2), z = (2k+alpha+1)/2.

    The Gamma ratio is formed in log space.  At s = 1 the ratio collapses to
    z itself, so the symbol equals |lam| (2k + alpha + 1), the eigenvalue of
    the generating operator.
    """
    lam = np.asarray(lam, dtype=float)
    k = np.asarray(k, dtype=float)
    z = 0.5 * (2.0 * k + alpha + 1.0)
    lg = np.vectorize(math.lgamma)
    ratio = np.exp(lg(z + 0.5 * (1.0 + s)) - lg(z + 0.5 * (1.0 - s)))
    return (2.0 * np.abs(lam)) ** s * ratio


@dataclass(frozen=True)
class MultiplierSpec:
    """Which spectral symbol to apply to the coefficients."""

    kind: str
    param: float | None = None

    _KINDS = ("identity", "L", "pure_power", "modified", "heat")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown multiplier kind {self.kind!r}")
        if self.kind == "modified":
            if not (self.param is not None and 0.0 < self.param < 1.0):
                raise ValueError("modified(s) requires 0 < s < 1")
        elif self.kind == "heat":
            if not (self.param is not None and self.param > 0.0):
                raise ValueError("heat(t) requires t > 0")
        elif self.kind == "pure_power":
            if not (self.param is not None and self.param > 0.0):
                raise ValueError("pure_power(s) requires s > 0")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def generator(cls):
        return cls("L")

    @classmethod
    def pure_power(cls, s: float):
        return cls("pure_power", s)

    @classmethod
    def modified(cls, s: float):
        return cls("modified", s)

    @classmethod
    def heat(cls, t: float):
        return cls("heat", t)

    def symbol(self, grid: PlaneGrid) -> np.ndarray:
        lam = np.abs(grid.lambdas)[:, None]
        k = np.arange(grid.k_max + 1, dtype=float)[None, :]
        eig = lam * (2.0 * k + grid.alpha + 1.0)
        if self.kind == "identity":
            return np.ones_like(eig)
        if self.kind == "L":
            return eig
        if self.kind == "pure_power":
            return eig ** self.param
        if self.kind == "heat":
            return np.exp(-eig * self.param)
        return modified_symbol(grid.alpha, self.param, lam, k)


def apply_multiplier(F: PlaneSpectral, m: MultiplierSpec) -> PlaneSpectral:
    return F.copy_with(F.coeffs * m.symbol(F.grid))


def plancherel_weight(grid: PlaneGrid) -> np.ndarray:
    """rho(lambda, k) with sum_i dlam sum_k |f_hat|^2 rho = ||f||^2 on X."""
    lam = np.abs(grid.lambdas)[:, None]
    k = np.arange(grid.k_max + 1, dtype=float)
    lg = np.vectorize(math.lgamma)
    kfac = np.exp(lg(grid.alpha + k + 1.0) - lg(k + 1.0)
                  - 2.0 * log_gamma(grid.alpha + 1.0))[None, :]
    return lam ** (grid.alpha + 1.0) * kfac / math.pi


def inner_product(F: PlaneSpectral, G: PlaneSpectral) -> complex:
    """L2(X) inner product evaluated in the spectral representation."""
    if F.grid != G.grid:
        raise ValueError("inner_product requires a shared grid")
    rho = plancherel_weight(F.grid)
    return complex(F.grid.dlam * np.sum(F.coeffs * np.conj(G.coeffs) * rho))


def norm_sq(F: PlaneSpectral) -> float:
    return float(inner_product(F, F).real)


def quadratic_form(F: PlaneSpectral, s: float) -> float:
    """<L_s f, f> through the modified multiplier; real and >= 0."""
    val = inner_product(apply_multiplier(F, MultiplierSpec.modified(s)), F)
    if abs(val.imag) > 1e-10 * max(abs(val.real), 1e-300):
        raise ValueError(f"quadratic form has nontrivial imaginary part {val}")
    return float(val.real)


class PlaneFunction:
    """A function on X that knows how to evaluate and transform itself.

    Subclasses may override `transform` with an exact coefficient route and
    `weighted` with a closed-form product against the Hardy weight
    ((delta + x^2/2)^2 + w^2)^-s.  `even_in_w` and `real_valued` let the
    generic transform exploit symmetry.
    """

    even_in_w = True
    real_valued = True

    def __call__(self, x, w):
        raise NotImplementedError

    def transform(self, grid: PlaneGrid) -> PlaneSpectral:
        return fiber_transform(self, grid, even_in_w=self.even_in_w,
                               real_valued=self.real_valued)

    def weighted(self, s: float, delta: float) -> "PlaneFunction":
        return WeightedPlaneFunction(self, s, delta)


class SampledPlaneFunction(PlaneFunction):
    def __init__(self, fn, even_in_w: bool = True, real_valued: bool = True):
        self._fn = fn
        self.even_in_w = even_in_w
        self.real_valued = real_valued

    def __call__(self, x, w):
        return self._fn(x, w)


class WeightedPlaneFunction(PlaneFunction):
    """base(x, w) * ((delta + x^2/2)^2 + w^2)^-s."""

    def __init__(self, base: PlaneFunction, s: float, delta: float):
        self.base = base
        self.s = s
        self.delta = delta
        self.even_in_w = base.even_in_w
        self.real_valued = base.real_valued

    def __call__(self, x, w):
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        wt = ((self.delta + 0.5 * x * x) ** 2 + w * w) ** (-self.s)
        return self.base(x, w) * wt


def fiber_transform(fn, grid: PlaneGrid, *, even_in_w: bool = True,
                    real_valued: bool = True) -> PlaneSpectral:
    """Transform a callable on X to its coefficient matrix.

    The w integral uses the grid's uniform trapezoid nodes, which is
    spectrally accurate for smooth functions that have decayed at the window
    edge; the caller owns choosing w_max and n_w against the decay of fn.
    The fiber analysis runs on the generalized Gauss-Laguerre nodes per
    |lambda|.
    """
    k_max = grid.k_max
    n_half = grid.n_lam // 2
    coeffs = np.empty((grid.n_lam, k_max + 1), dtype=complex)
    wts = grid.w_weights
    wn = grid.w_nodes
    for i, lam in enumerate(grid.lambdas_pos):
        ax = grid.fiber_grid(lam)
        spec = ax.spec
        fvals = np.asarray(fn(ax.x[:, None], wn[None, :]))
        if even_in_w and real_valued:
            fiber = fvals @ (np.cos(lam * wn) * wts)
        else:
            fiber = fvals @ (np.exp(1j * lam * wn) * wts)
        phi = _basis_matrix(spec, k_max, ax.x)
        row = _analysis_factors(spec, k_max) * (phi @ (ax.weights * fiber))
        coeffs[n_half + i] = row
        if real_valued:
            coeffs[n_half - 1 - i] = np.conj(row)
        else:
            fiber_m = fvals @ (np.exp(-1j * lam * wn) * wts)
            coeffs[n_half - 1 - i] = (_analysis_factors(spec, k_max)
                                      * (phi @ (ax.weights * fiber_m)))
    return PlaneSpectral(grid, coeffs)


def synthesize_plane(F: PlaneSpectral, x, w) -> np.ndarray:
    """Invert the representation at points (x_j, w_j), pairwise.

    f(x, w) = dlam / (pi Gamma(a+1)) * sum_i sum_k f_hat(lam_i, k)
              phi_k(x; lam_i) |lam_i|^(a+1) exp(-i lam_i w)
    """
    grid = F.grid
    x = np.atleast_1d(np.asarray(x, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if x.shape != w.shape:
        raise ValueError("x and w must have matching shapes")
    alpha = grid.alpha
    out = np.zeros(x.shape, dtype=complex)
    n_half = grid.n_lam // 2
    k_arr = np.arange(grid.k_max + 1)
    for i, lam in enumerate(grid.lambdas_pos):
        spec = grid.fiber_spec(lam)
        phi = _basis_matrix(spec, grid.k_max, x)          # (k+1, n_pts)
        pos = F.coeffs[n_half + i] @ phi
        neg = F.coeffs[n_half - 1 - i] @ phi
        osc = np.exp(-1j * lam * w)
        out += lam ** (alpha + 1.0) * (pos * osc + neg * np.conj(osc))
    out *= grid.dlam / (math.pi * math.gamma(alpha + 1.0))
    return out
