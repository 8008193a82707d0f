"""Shared numerical kernels: singular-endpoint quadrature, roots, derivatives.

The flight-time integrals all diverge like [V(x) - V(x_turn)]^(-1/2) at a
simple turning point.  Substituting x = x_turn -+ t^2 removes the divergence
exactly for a simple zero of V - E, leaving a smooth integrand in t that an
adaptive composite Gauss rule handles at nearly machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import NonIntegrable, NoSignChange, ToleranceNotReached

_PANEL_ORDER = 21


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and subdivision budget for the adaptive kernels."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 60

    def __post_init__(self):
        if not (self.rel_tol > 0.0):
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if not (self.abs_tol > 0.0):
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if self.max_subdivisions < 4:
            raise ValueError(f"max_subdivisions must be >= 4, got {self.max_subdivisions!r}")


DEFAULT_CONFIG = QuadratureConfig()


@lru_cache(maxsize=16)
def gauss_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


@lru_cache(maxsize=16)
def gauss_rule_01(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = gauss_rule(order)
    return 0.5 * (x + 1.0), 0.5 * w


class _VectorizedCall:
    """Call f on an array of nodes, falling back to a scalar loop once."""

    def __init__(self, f):
        self.f = f
        self.vectorized = True

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        if self.vectorized:
            try:
                out = np.asarray(self.f(xs), dtype=float)
                if out.shape == xs.shape:
                    return out
            except (TypeError, ValueError):
                pass
            self.vectorized = False
        return np.array([float(self.f(x)) for x in xs], dtype=float)


def _panel(fc: _VectorizedCall, a: float, b: float, order: int = _PANEL_ORDER) -> float:
    nodes, weights = gauss_rule(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.dot(weights, fc(mid + half * nodes)))


def integrate_adaptive(f, lower: float, upper: float,
                       cfg: QuadratureConfig | None = None,
                       order: int = _PANEL_ORDER) -> tuple[float, float]:
    """Adaptive composite Gauss quadrature of a smooth integrand.

    Returns (value, error_estimate).  Panels are accepted when the change
    under bisection falls below the width-proportional share of the global
    tolerance; the accumulated changes form the error estimate.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not (np.isfinite(lower) and np.isfinite(upper)):
        raise ValueError("integration bounds must be finite")
    if upper == lower:
        return 0.0, 0.0
    fc = _VectorizedCall(f)
    total_width = upper - lower
    first = _panel(fc, lower, upper, order)
    estimate = abs(first)
    value = 0.0
    err = 0.0
    stack = [(lower, upper, first, 0)]
    while stack:
        a, b, coarse, depth = stack.pop()
        mid = 0.5 * (a + b)
        left = _panel(fc, a, mid, order)
        right = _panel(fc, mid, b, order)
        fine = left + right
        delta = abs(fine - coarse)
        scale = max(abs(estimate), abs(value))
        tol_here = max(cfg.abs_tol, cfg.rel_tol * scale) * (b - a) / total_width
        if delta <= tol_here:
            value += fine
            err += delta
        elif depth >= cfg.max_subdivisions:
            raise ToleranceNotReached(
                f"subdivision budget {cfg.max_subdivisions} exhausted on "
                f"[{a:.6g}, {b:.6g}] with local error {delta:.3g}"
            )
        else:
            stack.append((a, mid, left, depth + 1))
            stack.append((mid, b, right, depth + 1))
    return value, err


def _probe_endpoint(g, t_scale: float):
    """Reject integrands still divergent after the sqrt substitution."""
    probes = [t_scale * 1e-4, t_scale * 1e-6, t_scale * 1e-8]
    vals = []
    for t in probes:
        v = g(np.asarray([t]))[0]
        if not np.isfinite(v):
            raise NonIntegrable(f"transformed integrand not finite at t={t:.3g}")
        vals.append(abs(v))
    # A regularized integrand tends to a constant; ratios growing ~100x per
    # decade-squared step mean f diverged faster than the inverse square root.
    if vals[1] > 30.0 * (vals[0] + 1.0) and vals[2] > 30.0 * (vals[1] + 1.0):
        raise NonIntegrable("integrand diverges faster than |x - x_s|^(-1/2)")


def integrate_inverse_sqrt_endpoint(f, lower: float, upper: float, singular_end: str,
                                    cfg: QuadratureConfig | None = None,
                                    order: int = _PANEL_ORDER) -> float:
    """Integrate f over [lower, upper] with an inverse-sqrt endpoint singularity.

    ``singular_end`` names the endpoint ("lower" or "upper") where
    f(x) * sqrt|x - x_s| stays finite.  The substitution x = x_s -+ t^2 maps
    the problem to a smooth integrand 2 t f(x(t)) on [0, sqrt(width)].
    """
    value, _ = integrate_inverse_sqrt_endpoint_with_error(f, lower, upper, singular_end,
                                                          cfg, order)
    return value


def integrate_inverse_sqrt_endpoint_with_error(f, lower: float, upper: float, singular_end: str,
                                               cfg: QuadratureConfig | None = None,
                                               order: int = _PANEL_ORDER) -> tuple[float, float]:
    cfg = cfg or DEFAULT_CONFIG
    if not (lower < upper):
        raise ValueError(f"need lower < upper, got [{lower!r}, {upper!r}]")
    if singular_end not in ("lower", "upper"):
        raise ValueError(f"singular_end must be 'lower' or 'upper', got {singular_end!r}")
    width = upper - lower
    fc = _VectorizedCall(f)
    if singular_end == "upper":
        def g(t):
            return 2.0 * t * fc(upper - t * t)
    else:
        def g(t):
            return 2.0 * t * fc(lower + t * t)
    t_max = float(np.sqrt(width))
    _probe_endpoint(g, t_max)
    return integrate_adaptive(g, 0.0, t_max, cfg, order)


def find_root_bracketed(g, bracket, cfg: QuadratureConfig | None = None) -> float:
    """Root of a continuous scalar function on a sign-changing bracket.

    Brent's method (bisection with superlinear refinement) polished until the
    bracket width drops below 1e-13 * max(1, |x|).
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if lo > hi:
        lo, hi = hi, lo
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo < 0.0) == (ghi < 0.0):
        raise NoSignChange(f"g({lo:.6g})={glo:.3g} and g({hi:.6g})={ghi:.3g} have equal signs")
    return float(brentq(g, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200))


def derivative_central(g, x: float, scale: float = 1.0) -> float:
    """Five-point central derivative with one Richardson step.

    Uses steps h and h/2 with h = max(1e-6, 1e-6 |x|) * scale; the two
    fourth-order estimates share the +-h evaluations, so g is called six
    times.  Exceptions raised by g propagate unchanged.
    """
    h = max(1e-6, 1e-6 * abs(x)) * scale
    gm2 = g(x - 2.0 * h)
    gm1 = g(x - h)
    gp1 = g(x + h)
    gp2 = g(x + 2.0 * h)
    d_h = (gm2 - 8.0 * gm1 + 8.0 * gp1 - gp2) / (12.0 * h)
    gm_half = g(x - 0.5 * h)
    gp_half = g(x + 0.5 * h)
    d_half = (gm1 - 8.0 * gm_half + 8.0 * gp_half - gp1) / (6.0 * h)
    return (16.0 * d_half - d_h) / 15.0
