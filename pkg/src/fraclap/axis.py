"""Laguerre fiber calculus on the half line with measure x^(2a+1) dx.

The basis on one fiber is L_k^a(|lam| x^2) exp(-|lam| x^2 / 2).  This module
supplies basis evaluation, analysis/synthesis between samples and
coefficients, the Laguerre translation operator, and the convolution it
induces.  All node placement uses the substitution u = |lam| x^2, so the
natural quadrature is generalized Gauss-Laguerre with parameter a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import bessel_j_norm, gauss_rule, laguerre_sequence, log_gamma

__all__ = [
    "AxisCoefficients",
    "AxisGrid",
    "AxisProfile",
    "LaguerreBasisSpec",
    "analyze",
    "axis_grid",
    "basis_norm_sq",
    "convolve_axis",
    "eval_profile",
    "laguerre_fn",
    "laguerre_fn_norm",
    "synthesize",
    "translate_axis",
    "translate_fn",
]

DEFAULT_ORDER = 64
DEFAULT_THETA_ORDER = 48


@dataclass(frozen=True)
class LaguerreBasisSpec:
    """The pair (alpha, lam) fixing one fiber basis on the half line.

    alpha > -1 is accepted: alpha = -1/2 occurs as the even sector of the
    one-dimensional Grushin reduction.  Translation additionally requires
    alpha >= 0 (see translate_fn).
    """

    alpha: float
    lam: float

    def __post_init__(self):
        if not self.alpha > -1.0:
            raise ValueError(f"alpha must be > -1, got {self.alpha}")
        if self.lam == 0.0 or not math.isfinite(self.lam):
            raise ValueError("lam must be a nonzero finite real")

    @property
    def abs_lam(self) -> float:
        return abs(self.lam)


def laguerre_fn(k: int, spec: LaguerreBasisSpec, x) -> np.ndarray | float:
    """L_k^a(|lam| x^2) exp(-|lam| x^2 / 2)."""
    x = np.asarray(x, dtype=float)
    u = spec.abs_lam * x * x
    vals = laguerre_sequence(k, spec.alpha, u)[k] * np.exp(-0.5 * u)
    return float(vals) if vals.ndim == 0 else vals


def _norm_factor(k, spec: LaguerreBasisSpec) -> np.ndarray | float:
    # sqrt(2 k! |lam|^(a+1) / Gamma(a+k+1)), the L2 normalization.
    k = np.asarray(k)
    lg = np.vectorize(math.lgamma)
    return np.exp(0.5 * (math.log(2.0) + lg(k + 1.0)
                         + (spec.alpha + 1.0) * math.log(spec.abs_lam)
                         - lg(spec.alpha + k + 1.0)))


def laguerre_fn_norm(k: int, spec: LaguerreBasisSpec, x) -> np.ndarray | float:
    """The L2-normalized variant; orthonormal in L2(x^(2a+1) dx)."""
    return _norm_factor(k, spec) * laguerre_fn(k, spec, x)


def basis_norm_sq(k: int, spec: LaguerreBasisSpec) -> float:
    """Squared L2 norm Gamma(a+k+1) / (2 |lam|^(a+1) k!) of the basis element."""
    return float(1.0 / _norm_factor(k, spec) ** 2)


class AxisGrid:
    """Generalized Gauss-Laguerre rule mapped to x through u = |lam| x^2.

    weights are plain quadrature weights for integrals against x^(2a+1) dx:
    integral F(x) x^(2a+1) dx ~= sum_i weights[i] F(x[i]).
    """

    def __init__(self, spec: LaguerreBasisSpec, order: int = DEFAULT_ORDER):
        rule = gauss_rule("genlaguerre", order, laguerre_alpha=spec.alpha)
        self.spec = spec
        self.order = order
        self.u = rule.nodes
        self.x = np.sqrt(rule.nodes / spec.abs_lam)
        self.weights = (rule.weights * np.exp(rule.nodes)
                        / (2.0 * spec.abs_lam ** (spec.alpha + 1.0)))
        self.x.setflags(write=False)
        self.weights.setflags(write=False)

    def integrate(self, values: np.ndarray):
        return np.sum(self.weights * values, axis=-1)


@lru_cache(maxsize=256)
def _cached_grid(alpha: float, lam: float, order: int) -> AxisGrid:
    return AxisGrid(LaguerreBasisSpec(alpha, lam), order)


def axis_grid(spec: LaguerreBasisSpec, order: int = DEFAULT_ORDER) -> AxisGrid:
    return _cached_grid(spec.alpha, spec.lam, order)


@dataclass
class AxisProfile:
    """A function on one fiber: samples at the grid nodes, optional callable.

    The callable, when present, is used for off-grid evaluation (translation
    needs the function at combined arguments); otherwise off-grid values come
    from coefficient synthesis, which is exact for band-limited profiles.
    """

    spec: LaguerreBasisSpec
    grid: AxisGrid
    samples: np.ndarray
    fn: object = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.shape != (self.grid.order,):
            raise ValueError("sample count must equal the rule order")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("profile samples must be finite")

    @classmethod
    def from_fn(cls, spec: LaguerreBasisSpec, fn, order: int = DEFAULT_ORDER):
        grid = axis_grid(spec, order)
        return cls(spec, grid, np.asarray(fn(grid.x)), fn)


@dataclass
class AxisCoefficients:
    spec: LaguerreBasisSpec
    coeffs: np.ndarray

    @property
    def k_max(self) -> int:
        return len(self.coeffs) - 1


def _basis_matrix(spec: LaguerreBasisSpec, k_max: int, x: np.ndarray
                  ) -> np.ndarray:
    u = spec.abs_lam * x * x
    return laguerre_sequence(k_max, spec.alpha, u) * np.exp(-0.5 * u)


def _analysis_factors(spec: LaguerreBasisSpec, k_max: int) -> np.ndarray:
    # Gamma(a+1) k! / Gamma(a+k+1) for k = 0..k_max
    k = np.arange(k_max + 1, dtype=float)
    lg = np.vectorize(math.lgamma)
    return np.exp(log_gamma(spec.alpha + 1.0) + lg(k + 1.0)
                  - lg(spec.alpha + k + 1.0))


def analyze(profile: AxisProfile, k_max: int) -> AxisCoefficients:
    """Laguerre coefficients of a profile through the fiber quadrature.

    The rule must resolve products of degree 2*k_max, i.e. its order must be
    at least k_max + 1.
    """
    if profile.grid.order < k_max + 1:
        raise ValueError(
            f"rule order {profile.grid.order} too small for k_max={k_max}")
    spec = profile.spec
    phi = _basis_matrix(spec, k_max, profile.grid.x)
    raw = phi @ (profile.grid.weights * profile.samples)
    return AxisCoefficients(spec, _analysis_factors(spec, k_max) * raw)


def synthesize(coeffs: AxisCoefficients, x) -> np.ndarray | float:
    """Pointwise sum (2 |lam|^(a+1) / Gamma(a+1)) sum_k c_k phi_k(x)."""
    spec = coeffs.spec
    x = np.asarray(x, dtype=float)
    phi = _basis_matrix(spec, coeffs.k_max, np.atleast_1d(x).ravel())
    pref = 2.0 * spec.abs_lam ** (spec.alpha + 1.0) / math.gamma(spec.alpha + 1.0)
    vals = pref * (coeffs.coeffs @ phi)
    vals = vals.reshape(x.shape) if x.shape else vals[0]
    return vals


def eval_profile(profile: AxisProfile, x) -> np.ndarray:
    """Profile values at arbitrary points, via the callable when available."""
    if profile.fn is not None:
        return np.asarray(profile.fn(np.asarray(x, dtype=float)))
    coeffs = analyze(profile, profile.grid.order - 1)
    return np.asarray(synthesize(coeffs, x))


def _theta_rule(alpha: float, order: int):
    # cos(theta) nodes for the measure sin^(2a) theta d theta on (0, pi)
    return gauss_rule("jacobi", order, p=alpha - 0.5, q=alpha - 0.5)


def translate_fn(fn, spec: LaguerreBasisSpec, y: float, x,
                 theta_order: int = DEFAULT_THETA_ORDER) -> np.ndarray:
    """Laguerre translation of a callable, evaluated at points x.

    T^y f(x) = C_a * integral_0^pi f(sqrt(x^2 + y^2 + 2 x y cos t))
                      j_{a-1/2}(|lam| x y sin t) sin^(2a) t dt,
    C_a = Gamma(a+1) 2^a / sqrt(2 pi), computed with a Jacobi rule in cos t.
    Requires alpha >= 0; for -1 < alpha < 0 only the spectral route
    (diagonal action on basis elements) is available.
    """
    alpha = spec.alpha
    if alpha < 0.0:
        raise ValueError("translation requires alpha >= 0; "
                         "use the spectral route for -1 < alpha < 0")
    if y < 0.0:
        raise ValueError("translation distance y must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rule = _theta_rule(alpha, theta_order)
    c = rule.nodes
    s = np.sqrt(np.maximum(0.0, 1.0 - c * c))
    # arguments: radial part (n_x, n_theta), kernel part likewise
    rad = np.sqrt(np.maximum(0.0, x[:, None] ** 2 + y * y
                             + 2.0 * y * x[:, None] * c[None, :]))
    ker = bessel_j_norm(alpha - 0.5, spec.abs_lam * y * x[:, None] * s[None, :])
    pref = math.gamma(alpha + 1.0) * 2.0 ** alpha / math.sqrt(2.0 * math.pi)
    fvals = np.asarray(fn(rad.ravel())).reshape(rad.shape)
    return pref * np.sum(rule.weights[None, :] * fvals * ker, axis=1)


def translate_axis(profile: AxisProfile, y: float,
                   theta_order: int = DEFAULT_THETA_ORDER) -> AxisProfile:
    """Translate a profile by y; result sampled on the same grid."""
    fn = profile.fn
    if fn is None:
        coeffs = analyze(profile, profile.grid.order - 1)
        fn = lambda pts: synthesize(coeffs, pts)
    vals = translate_fn(fn, profile.spec, y, profile.grid.x, theta_order)
    return AxisProfile(profile.spec, profile.grid, vals)


def convolve_axis(f: AxisProfile, g: AxisProfile,
                  theta_order: int = DEFAULT_THETA_ORDER) -> AxisProfile:
    """Laguerre convolution (f * g)(x) = integral T^y f(x) g(y) y^(2a+1) dy.

    The y integral runs over the shared fiber grid; both profiles must carry
    the same basis spec.
    """
    if f.spec != g.spec:
        raise ValueError("convolve_axis requires profiles on the same spec")
    grid = f.grid
    fn = f.fn
    if fn is None:
        coeffs = analyze(f, grid.order - 1)
        fn = lambda pts: synthesize(coeffs, pts)
    tmat = np.empty((grid.order, grid.order), dtype=np.result_type(
        f.samples.dtype, g.samples.dtype, float))
    for j, y in enumerate(grid.x):
        tmat[:, j] = translate_fn(fn, f.spec, float(y), grid.x, theta_order)
    vals = tmat @ (grid.weights * g.samples)
    return AxisProfile(f.spec, grid, vals)
