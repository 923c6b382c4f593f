"""Special functions and quadrature primitives used by every other module.

Provides Gamma helpers, generalized Laguerre polynomial sequences, the
normalized Bessel function j_nu(t) = J_nu(t) t^(-nu), Gauss rules for the
three weight families that occur in the calculus (Legendre, Jacobi,
generalized Laguerre), and an adaptive integrator for smooth integrands on
(0, inf) with an algebraic endpoint power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special as _sp

__all__ = [
    "AccuracyError",
    "QuadratureRule",
    "bessel_j_norm",
    "gamma_fn",
    "gamma_ratio",
    "gauss_rule",
    "integrate_semiinfinite",
    "laguerre_sequence",
    "log_gamma",
]

# Largest |t| the normalized Bessel evaluator accepts.  The power series is
# used only for small arguments where it loses no precision; beyond that the
# evaluation is delegated to scipy's J_nu.  Translation integrals stay far
# below this bound for every tested (alpha, lambda, y).
BESSEL_T_MAX = 5000.0

_SERIES_CUTOFF = 8.0


class AccuracyError(RuntimeError):
    """Raised when an adaptive quadrature cannot meet its tolerance.

    Carries the best available estimate and the estimated error bound so
    callers can decide whether the partial result is still usable.
    """

    def __init__(self, message: str, estimate: float | None = None,
                 error_bound: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


def gamma_fn(x: float) -> float:
    """Gamma function for real x, rejecting the poles at 0, -1, -2, ...."""
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"gamma_fn: pole at non-positive integer x={x}")
    return math.gamma(x)


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) for positive arguments.

    Sharp-constant formulas take ratios of nearby large arguments, so the
    ratio is formed in log space once either argument exceeds 30.
    """
    if a <= 0 or b <= 0:
        raise ValueError("gamma_ratio requires positive arguments")
    if a <= 30.0 and b <= 30.0:
        return math.gamma(a) / math.gamma(b)
    return math.exp(math.lgamma(a) - math.lgamma(b))


def laguerre_sequence(k_max: int, alpha: float, x) -> np.ndarray:
    """Values L_0^a(x) .. L_kmax^a(x) by the upward three-term recurrence.

    (k+1) L_{k+1} = (2k + a + 1 - x) L_k - (k + a) L_{k-1}

    The recurrence is run upward in k, which is stable for x >= 0 in the
    regime used here (k <= a few hundred).  `x` may be a scalar or an
    ndarray; the result has shape (k_max + 1,) + shape(x).
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    x = np.asarray(x, dtype=float)
    out = np.empty((k_max + 1,) + x.shape, dtype=float)
    out[0] = 1.0
    if k_max == 0:
        return out
    out[1] = alpha + 1.0 - x
    for k in range(1, k_max):
        out[k + 1] = ((2.0 * k + alpha + 1.0 - x) * out[k]
                      - (k + alpha) * out[k - 1]) / (k + 1.0)
    return out


def _bessel_series(nu: float, tsq: np.ndarray) -> np.ndarray:
    # sum_m (-1)^m (t^2/4)^m / (m! Gamma(nu+m+1) 2^nu), accumulated with a
    # compensated (Kahan) sum; |t| <= 8 keeps the terms small enough that no
    # precision is lost to cancellation.
    quarter = -0.25 * tsq
    term = np.full_like(tsq, 1.0 / (2.0 ** nu * math.gamma(nu + 1.0)))
    total = term.copy()
    comp = np.zeros_like(tsq)
    for m in range(1, 60):
        term = term * quarter / (m * (nu + m))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if np.all(np.abs(term) <= 1e-18 * np.abs(total) + 1e-300):
            break
    return total


def bessel_j_norm(alpha: float, t) -> np.ndarray | float:
    """Normalized Bessel function j_a(t) = J_a(t) t^(-a).

    Even and entire in t; j_a(0) = 1 / (2^a Gamma(a+1)).  Supported for
    |t| <= BESSEL_T_MAX (range error beyond), alpha > -1.
    """
    if alpha <= -1.0:
        raise ValueError("bessel_j_norm requires alpha > -1")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > BESSEL_T_MAX):
        raise ValueError(
            f"bessel_j_norm: |t| > {BESSEL_T_MAX} outside supported range")
    at = np.abs(t)
    small = at <= _SERIES_CUTOFF
    out = np.empty_like(at)
    if np.any(small):
        out[small] = _bessel_series(alpha, at[small] ** 2)
    if np.any(~small):
        tb = at[~small]
        out[~small] = _sp.jv(alpha, tb) * tb ** (-alpha)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """An immutable Gauss rule: nodes, positive weights, and its weight family.

    kind is one of "legendre" (interval [a, b]), "jacobi" (weight
    (1-x)^p (1+x)^q on (-1, 1)) or "genlaguerre" (weight x^a e^-x on
    (0, inf)).  A rule of order N integrates polynomials of degree
    <= 2N - 1 exactly against its weight.
    """

    kind: str
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    params: tuple = field(default=())

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("rule order must be >= 1")
        if len(self.nodes) != self.order or len(self.weights) != self.order:
            raise ValueError("node/weight count must equal the rule order")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be strictly positive")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def integrate(self, fn) -> float | complex:
        vals = fn(self.nodes)
        return np.sum(self.weights * vals)


@lru_cache(maxsize=512)
def _raw_rule(kind: str, order: int, params: tuple) -> tuple[np.ndarray, np.ndarray]:
    if kind == "legendre":
        x, w = _sp.roots_legendre(order)
    elif kind == "jacobi":
        p, q = params
        if p <= -1 or q <= -1:
            raise ValueError("jacobi exponents must be > -1")
        if p == 0.0 and q == 0.0:
            x, w = _sp.roots_legendre(order)
        else:
            x, w = _sp.roots_jacobi(order, p, q)
    elif kind == "genlaguerre":
        (a,) = params
        if a <= -1:
            raise ValueError("generalized-laguerre parameter must be > -1")
        x, w = _sp.roots_genlaguerre(order, a)
    else:
        raise ValueError(f"unknown rule kind {kind!r}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        raise AccuracyError(f"eigensolve for {kind} rule of order {order} "
                            f"with params {params} did not converge")
    return x, w


def gauss_rule(kind: str, order: int, *, a: float = -1.0, b: float = 1.0,
               p: float = 0.0, q: float = 0.0, laguerre_alpha: float = 0.0
               ) -> QuadratureRule:
    """Construct a Gauss rule of the given kind and order.

    legendre: interval [a, b].  jacobi: exponents p, q.  genlaguerre:
    parameter laguerre_alpha.  Rules are cached per parameter set and safe
    to share between threads.
    """
    if kind == "legendre":
        x, w = _raw_rule("legendre", order, ())
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        if half <= 0:
            raise ValueError("legendre rule needs b > a")
        return QuadratureRule("legendre", order, mid + half * x, half * w,
                              (a, b))
    if kind == "jacobi":
        x, w = _raw_rule("jacobi", order, (p, q))
        return QuadratureRule("jacobi", order, x.copy(), w.copy(), (p, q))
    if kind == "genlaguerre":
        x, w = _raw_rule("genlaguerre", order, (laguerre_alpha,))
        return QuadratureRule("genlaguerre", order, x.copy(), w.copy(),
                              (laguerre_alpha,))
    raise ValueError(f"unknown rule kind {kind!r}")


def _legendre_pair(order: int) -> tuple[np.ndarray, np.ndarray]:
    return _raw_rule("legendre", order, ())


def _panel_value(fn, lo: float, hi: float, order: int) -> tuple[float, float]:
    """Integral of fn over [lo, hi] plus an error estimate.

    The estimate is the difference between the requested order and an
    embedded lower-order evaluation of the same panel.
    """
    xh, wh = _legendre_pair(order)
    xl, wl = _legendre_pair(max(4, (2 * order) // 3))
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    vh = half * np.sum(wh * fn(mid + half * xh))
    vl = half * np.sum(wl * fn(mid + half * xl))
    return float(vh), abs(float(vh) - float(vl))


def _endpoint_panel(fn, hi: float, sigma: float, order: int
                    ) -> tuple[float, float]:
    """Integral of fn over [0, hi] when fn ~ t^sigma near 0.

    Maps to a Gauss-Jacobi rule with weight (1+xi)^sigma so the endpoint
    power is integrated exactly; the smooth remainder fn(t)/t^sigma is what
    the rule actually sees.
    """
    def eval_with(n):
        xj, wj = _raw_rule("jacobi", n, (0.0, sigma))
        t = 0.5 * hi * (1.0 + xj)
        smooth = fn(t) * t ** (-sigma)
        return (0.5 * hi) ** (sigma + 1.0) * float(np.sum(wj * smooth))

    vh = eval_with(order)
    vl = eval_with(max(4, (2 * order) // 3))
    return vh, abs(vh - vl)


def integrate_semiinfinite(fn, *, singular_exponent: float = 0.0,
                           scale: float = 1.0, rel_tol: float = 1e-12,
                           abs_tol: float = 0.0, panel_order: int = 48,
                           max_panels: int = 400, max_t: float = 1e16,
                           upper: float = math.inf) -> float:
    """Adaptive integral of fn over (0, upper), upper = inf by default.

    fn must accept ndarray arguments.  `singular_exponent` is the power
    sigma with fn(t) ~ t^sigma as t -> 0 (sigma > -1); it is removed by a
    Gauss-Jacobi endpoint panel.  `scale` hints at the decay scale: the
    initial panelization is geometric starting from [0, scale].  Panels are
    bisected until the summed error estimate meets the tolerance; failure
    raises AccuracyError carrying the best estimate.
    """
    if singular_exponent <= -1.0:
        raise ValueError("singular exponent must be > -1")
    if scale <= 0:
        raise ValueError("scale must be positive")
    limit = min(max_t, upper)

    # (value, err, lo, hi, is_endpoint)
    panels: list[tuple[float, float, float, float, bool]] = []
    first = min(scale, limit)
    v, e = _endpoint_panel(fn, first, singular_exponent, panel_order)
    panels.append((v, e, 0.0, first, True))

    # Geometric extension to the right until contributions are negligible.
    lo = first
    tiny_run = 0
    while lo < limit:
        hi = min(2.0 * lo, limit)
        v, e = _panel_value(fn, lo, hi, panel_order)
        panels.append((v, e, lo, hi, False))
        total = sum(p[0] for p in panels)
        if abs(v) <= max(rel_tol * abs(total), abs_tol, 1e-300):
            tiny_run += 1
            if tiny_run >= 3 and math.isinf(upper):
                break
        else:
            tiny_run = 0
        lo = hi

    def tol_for(total):
        return max(rel_tol * abs(total), abs_tol)

    while True:
        total = sum(p[0] for p in panels)
        err = sum(p[1] for p in panels)
        if err <= tol_for(total):
            return total
        if len(panels) >= max_panels:
            raise AccuracyError(
                "integrate_semiinfinite: panel budget exhausted "
                f"(estimate {total:.17g}, error bound {err:.3g})",
                estimate=total, error_bound=err)
        worst = max(range(len(panels)), key=lambda i: panels[i][1])
        v0, e0, lo, hi, endpoint = panels.pop(worst)
        mid = 0.5 * (lo + hi)
        if endpoint:
            va, ea = _endpoint_panel(fn, mid, singular_exponent, panel_order)
            panels.append((va, ea, 0.0, mid, True))
        else:
            va, ea = _panel_value(fn, lo, mid, panel_order)
            panels.append((va, ea, lo, mid, False))
        vb, eb = _panel_value(fn, mid, hi, panel_order)
        panels.append((vb, eb, mid, hi, False))


def gauss_panels(fn, lo: float, hi: float, n_panels: int, order: int = 24):
    """Fixed composite Gauss-Legendre integral of a vectorized fn on [lo, hi]."""
    x, w = _legendre_pair(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    pts = mids[:, None] + halves[:, None] * x[None, :]
    vals = fn(pts.ravel()).reshape(n_panels, order)
    return float(np.sum(halves[:, None] * w[None, :] * vals))
