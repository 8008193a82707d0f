"""Closed Euclidean classical paths at fixed starting point and temperature.

Classical paths extremizing the Euclidean action obey M x'' = V'(x):
Newtonian motion in the inverted potential -V.  A closed path of duration
beta*hbar leaves x0, climbs towards a turning point x_t where the conserved
level E = V(x_t) is reached, and returns; inside a well of -V it may also
bounce off both turning points and wind around for full periods.  Everything
about such paths reduces to ordinary integrals between x0 and the turning
points:

    flight time:  beta hbar = 2 int dx / v + 2 n int_{x-}^{x+} dx / v,
    action:       S = beta hbar E + 2 int M v dx + 2 n int_{x-}^{x+} M v dx,

with v(x, x_t) = sqrt((2/M) [V(x) - V(x_t)]).  The flight-time condition at
fixed (x0, beta) generally has several solutions; their number changes across
caustics, which is the whole catastrophe structure mapped by the rest of the
package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConvergenceFailure,
    InvalidBracket,
    NumericsError,
    SingularTurningPoint,
    UnavailableDeterminant,
)
from .potentials import PotentialSpec, WellDescriptor, critical_points, find_wells
from .quadrature import (
    QuadratureConfig,
    derivative_central,
    gauss_rule_01,
    integrate_adaptive,
)

SCAN_POINTS_DEFAULT = 2048
_SCAN_GAUSS_ORDER = 64
_TOF_PANEL_ORDER = 48

# Accuracy used when refining turning points against the flight-time condition.
ROOT_CFG = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-15, max_subdivisions=60)
# Near-machine accuracy for the flight times entering finite differences.
_FD_CFG = QuadratureConfig(rel_tol=5e-14, abs_tol=1e-16, max_subdivisions=60)

_STILL_SNAP_RTOL = 1e-9
_CAUSTIC_DELTA_RTOL = 1e-10


# ---------------------------------------------------------------------------
# stability labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityClass:
    """Stability of a classical path: label plus Morse-index information."""

    label: str   # "minimum" | "one_saddle" | "multi_saddle" | "marginal"
    index: int   # number of negative fluctuation modes (lower bound for n >= 1)

    def __str__(self) -> str:
        if self.label == "multi_saddle":
            return f"multi_saddle({self.index})"
        return self.label

    @property
    def is_minimum(self) -> bool:
        return self.label == "minimum"


MINIMUM = StabilityClass("minimum", 0)
ONE_SADDLE = StabilityClass("one_saddle", 1)
MARGINAL = StabilityClass("marginal", 0)


def multi_saddle(index: int) -> StabilityClass:
    return StabilityClass("multi_saddle", index)


# ---------------------------------------------------------------------------
# path containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TurningPointSolution:
    """One solution of the flight-time condition at fixed (x0, beta).

    ``slope_sign`` records the sign of d(flight time)/d(turning point) at the
    root, read off the final refinement bracket; it determines the sign of
    the fluctuation determinant without extra quadrature.
    """

    side: str            # "left" | "right" | "still"
    n_periods: int
    periodic: bool
    x_turn: float
    x_minus: float | None
    x_plus: float | None
    energy: float
    slope_sign: int = 0


@dataclass(frozen=True)
class ClassicalPath:
    """A closed Euclidean trajectory with its action and stability data."""

    x0: float
    beta: float
    side: str
    x_minus: float | None
    x_plus: float | None
    n_periods: int
    periodic: bool
    energy: float
    action: float = math.nan
    determinant: float | None = None
    stability: StabilityClass | None = None

    @property
    def x_turn(self) -> float | None:
        if self.side == "left":
            return self.x_minus
        if self.side == "right":
            return self.x_plus
        return self.x_minus  # still path stores x_m in both slots


@dataclass(frozen=True)
class PathInventory:
    """All stationary paths at a control point, ordered by ascending action."""

    x0: float
    beta: float
    paths: tuple[ClassicalPath, ...]
    warnings: tuple[str, ...] = ()

    @property
    def p(self) -> int:
        return len(self.paths)

    @property
    def n_minima(self) -> int:
        return sum(1 for p in self.paths if p.stability is not None and p.stability.is_minimum)

    # Conventional name for the count of minima entering the partition sum.
    @property
    def N(self) -> int:
        return self.n_minima


# ---------------------------------------------------------------------------
# cached per-potential geometry
# ---------------------------------------------------------------------------

def _poly_root_bound(coeffs) -> float:
    """Cauchy bound for the real roots of a polynomial (ascending coeffs)."""
    c = np.asarray(coeffs, dtype=float)
    c = np.trim_zeros(c, "b")
    if len(c) <= 1:
        return 0.0
    return 1.0 + float(np.max(np.abs(c[:-1] / c[-1])))


@lru_cache(maxsize=128)
def _critical_bound(spec: PotentialSpec) -> float:
    """Radius beyond which V' cannot vanish."""
    if spec.family == "harmonic":
        return 0.0
    if spec.family == "harmonic_plus_quartic":
        return 0.0
    if spec.family == "double_well":
        return spec.a
    c1 = np.polynomial.polynomial.polyder(np.asarray(spec.coefficients))
    return _poly_root_bound(tuple(c1))


def default_search_interval(spec: PotentialSpec) -> tuple[float, float]:
    """Interval guaranteed to contain every critical point of V."""
    b = _critical_bound(spec) + 1.0
    return (-b, b)


@lru_cache(maxsize=128)
def default_wells(spec: PotentialSpec) -> tuple[WellDescriptor, ...]:
    return tuple(find_wells(spec, default_search_interval(spec)))


@lru_cache(maxsize=128)
def _all_critical_points(spec: PotentialSpec) -> tuple[float, ...]:
    return tuple(critical_points(spec, default_search_interval(spec)))


@lru_cache(maxsize=128)
def _is_convex(spec: PotentialSpec) -> bool:
    if spec.family in ("harmonic", "harmonic_plus_quartic"):
        return True
    if spec.family == "double_well":
        return False
    lo, hi = default_search_interval(spec)
    xs = np.linspace(lo, hi, 4097)
    return bool(np.min(spec.deriv2(xs)) > 0.0)


def _snap_to_critical(spec: PotentialSpec, x0: float) -> float | None:
    for c in _all_critical_points(spec):
        if abs(x0 - c) <= _STILL_SNAP_RTOL * max(1.0, abs(c), abs(x0)):
            return c
    return None


def _containing_well(wells, x: float) -> WellDescriptor | None:
    for w in wells:
        if w.contains(x):
            return w
    return None


# ---------------------------------------------------------------------------
# flight-time integrals
# ---------------------------------------------------------------------------

def _bounce_beta_grid(spec: PotentialSpec, x0: float, turns: np.ndarray) -> np.ndarray:
    """Single-bounce flight times for many turning points, fixed Gauss order.

    Used for bracketing scans: fast and vectorized, accurate to roughly 1e-8
    away from creep limits.  Invalid candidates (where V - E fails to stay
    positive) come back as NaN.
    """
    turns = np.asarray(turns, dtype=float)
    if turns.size == 0:
        return np.empty(0)
    m = spec.units.mass
    hbar = spec.units.hbar
    widths = np.abs(turns - x0)
    tmax = np.sqrt(widths)
    direction = np.sign(x0 - turns)
    nodes, weights = gauss_rule_01(_SCAN_GAUSS_ORDER)
    t = tmax[:, None] * nodes[None, :]
    diff = spec.value_diff_offset(turns[:, None], direction[:, None] * t * t)
    bad = ~(diff > 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        integrand = 2.0 * t / np.sqrt((2.0 / m) * diff)
    integrand = np.where(bad, np.nan, integrand)
    vals = (2.0 / hbar) * tmax * (integrand @ weights)
    return vals


def _bounce_beta_cheap(spec: PotentialSpec, x0: float, x_turn: float) -> float:
    return float(_bounce_beta_grid(spec, x0, np.asarray([x_turn]))[0])


def _bounce_time(spec: PotentialSpec, x0: float, x_turn: float,
                 cfg: QuadratureConfig) -> float:
    """Accurate single-bounce flight time 2/hbar * int dx / v.

    Integrates the substituted form x = x_turn + d t^2 directly, with the
    potential difference computed from the offset t^2 so the quadrature stays
    exact arbitrarily close to the turning point.
    """
    m = spec.units.mass
    direction = math.copysign(1.0, x0 - x_turn)

    def g(t):
        t = np.asarray(t, dtype=float)
        diff = spec.value_diff_offset(x_turn, direction * t * t)
        return 2.0 * t / np.sqrt((2.0 / m) * diff)

    t_max = math.sqrt(abs(x0 - x_turn))
    val, _ = integrate_adaptive(g, 0.0, t_max, cfg, order=_TOF_PANEL_ORDER)
    return 2.0 * val / spec.units.hbar


def time_of_flight(spec: PotentialSpec, x0: float, x_turn: float,
                   side: str | None = None, cfg: QuadratureConfig | None = None) -> float:
    """Inverse temperature of the single-bounce path from x0 turning at x_turn.

    The integrand requires V(x) - V(x_turn) > 0 strictly between x0 and the
    turning point with a simple zero at x_turn; violations raise
    InvalidBracket and SingularTurningPoint respectively.
    """
    if not (np.isfinite(x0) and np.isfinite(x_turn)):
        raise ValueError("x0 and x_turn must be finite")
    if x_turn == x0:
        raise InvalidBracket("turning point coincides with the starting point")
    inferred = "left" if x_turn < x0 else "right"
    if side is not None and side != inferred:
        raise ValueError(f"side {side!r} inconsistent with x_turn on the {inferred}")
    probe = np.linspace(x0, x_turn, 9)[1:-1]
    v1_scale = max(1.0, float(np.max(np.abs(spec.deriv(probe)))))
    if abs(spec.deriv(x_turn)) < 1e-12 * v1_scale:
        raise SingularTurningPoint(f"V'({x_turn:.12g}) vanishes within tolerance")
    interior = np.linspace(x0, x_turn, 102)[1:-1]
    if np.any(spec.value_diff(interior, x_turn) <= 0.0):
        raise InvalidBracket(
            "V(x) - V(x_turn) must stay positive strictly between x0 and x_turn"
        )
    return _bounce_time(spec, x0, x_turn, cfg or ROOT_CFG)


def _left_turning_scalar(spec: PotentialSpec, well: WellDescriptor, x_ref: float) -> float:
    """Root of V(x) = V(x_ref) on the rising slope (left_edge, x_m)."""

    def g(x):
        return spec.value_diff(x, x_ref)

    lo, hi = well.left_edge, well.x_m
    span = hi - lo
    a, b = lo + 1e-14 * span, hi - 1e-14 * span
    ga, gb = g(a), g(b)
    if ga >= 0.0 or gb <= 0.0:
        raise InvalidBracket(
            f"level V({x_ref:.6g}) has no left turning point inside the well"
        )
    return float(brentq(g, a, b, xtol=1e-14, rtol=8.9e-16, maxiter=200))


def _left_turning_grid(spec: PotentialSpec, well: WellDescriptor, xp: np.ndarray) -> np.ndarray:
    """Vectorized bisection counterpart of _left_turning_scalar."""
    lo = np.full(xp.shape, well.left_edge)
    hi = np.full(xp.shape, well.x_m)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        below = spec.value_diff(mid, xp) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def time_of_flight_periodic(spec: PotentialSpec, x0: float, energy: float,
                            n_periods: int, side: str | None,
                            wells=None, cfg: QuadratureConfig | None = None) -> float:
    """Flight time of a bounded path bouncing off both turning points.

    Adds 2 n int_{x-}^{x+} dx / v for n full periods to the one-sided bounce
    (side "left" or "right"); ``side=None`` gives the purely periodic time
    n * T(E).  The energy level must support bounded motion through x0.
    """
    wells = default_wells(spec) if wells is None else tuple(wells)
    well = _containing_well(wells, x0)
    if well is None:
        raise InvalidBracket(f"x0={x0!r} lies in no well of -V; no bounded motion")
    if side is None and n_periods < 1:
        raise ValueError("purely periodic paths need n_periods >= 1")
    v_edges = max(spec.value(well.left_edge), spec.value(well.right_edge))
    if not (v_edges < energy < spec.value(well.x_m)):
        raise InvalidBracket(f"energy {energy!r} outside the bounded-motion window")
    if spec.value(x0) <= energy:
        raise InvalidBracket("x0 lies outside the oscillation region at this energy")
    cfg = cfg or ROOT_CFG

    def g_right(x):
        return spec.value(x) - energy

    span = well.right_edge - well.x_m
    xp = float(brentq(g_right, well.x_m + 1e-14 * span, well.right_edge - 1e-14 * span,
                      xtol=1e-14, rtol=8.9e-16, maxiter=200))
    xm = _left_turning_scalar(spec, well, xp)
    t_r = _bounce_time(spec, x0, xp, cfg)
    t_l = _bounce_time(spec, x0, xm, cfg)
    period = t_r + t_l
    if side == "right":
        return t_r + n_periods * period
    if side == "left":
        return t_l + n_periods * period
    return n_periods * period


# ---------------------------------------------------------------------------
# bracketing scans
# ---------------------------------------------------------------------------

def _parabola_vertex(x0, x1, x2, h0, h1, h2):
    d1 = (h1 - h0) / (x1 - x0)
    d2 = (h2 - h1) / (x2 - x1)
    c = (d2 - d1) / (x2 - x0)
    if c == 0.0:
        return None
    return 0.5 * (x0 + x1) - d1 / (2.0 * c)


def _brackets_from_samples(xs, hs, cheap):
    """Sign-change brackets plus fold candidates hiding between samples.

    ``xs`` are positions in scan order with finite ``hs`` values.  A local
    extremum of the flight-time mismatch that does not cross zero on the grid
    may still hide a near-tangent root pair; a parabolic vertex probe splits
    such intervals.
    """
    brackets: list[tuple[float, float]] = []
    n = len(xs)
    for i in range(n - 1):
        if hs[i] == 0.0:
            lo = xs[i - 1] if i > 0 else xs[i]
            hi = xs[i + 1]
            brackets.append((lo, hi))
        elif hs[i] * hs[i + 1] < 0.0:
            brackets.append((xs[i], xs[i + 1]))
    if n and hs[-1] == 0.0:
        brackets.append((xs[-2] if n > 1 else xs[-1], xs[-1]))
    for i in range(1, n - 1):
        h0, h1, h2 = hs[i - 1], hs[i], hs[i + 1]
        dip = h1 < h0 and h1 < h2 and h1 > 0.0
        hump = h1 > h0 and h1 > h2 and h1 < 0.0
        if not (dip or hump):
            continue
        xv = _parabola_vertex(xs[i - 1], xs[i], xs[i + 1], h0, h1, h2)
        if xv is None:
            continue
        lo, hi = sorted((xs[i - 1], xs[i + 1]))
        if not (lo < xv < hi):
            continue
        hv = cheap(xv)
        if np.isfinite(hv) and hv * h1 < 0.0:
            brackets.append((xs[i - 1], xv))
            brackets.append((xv, xs[i + 1]))
    return brackets


def _refine_root(cheap, accurate, xa, xb, x_scale):
    """Two-stage root refinement: cheap bracketing rule, then the accurate one.

    Returns (root, slope_sign) with slope_sign the sign of dh/dx at the root,
    or None when the candidate evaporates under the accurate evaluator (a
    parabolic fold probe that was an artifact of the coarse rule).  Passing
    ``accurate=None`` stops after the cheap stage, which is enough when only
    path counts and stability signs are wanted.
    """
    lo, hi = (xa, xb) if xa <= xb else (xb, xa)
    if lo == hi:
        return None
    try:
        ca, cb = cheap(lo), cheap(hi)
        if not (np.isfinite(ca) and np.isfinite(cb)):
            return None
        if ca == 0.0:
            r = lo
        elif cb == 0.0:
            r = hi
        elif ca * cb > 0.0:
            return None
        else:
            r = float(brentq(cheap, lo, hi, xtol=max(1e-10, 1e-11 * x_scale),
                             rtol=8.9e-16, maxiter=100))
    except ValueError:
        return None
    if accurate is None:
        return r, (1 if cb > ca else -1)
    width = max(1e-9 * x_scale, 1e-5 * (hi - lo))
    for _ in range(5):
        a = max(lo, r - width)
        b = min(hi, r + width)
        fa = accurate(a)
        fb = accurate(b)
        if fa == 0.0:
            return a, (1 if fb > 0 else -1)
        if fb == 0.0:
            return b, (1 if fb > fa else -1)
        if (fa < 0.0) != (fb < 0.0):
            root = float(brentq(accurate, a, b, xtol=1e-13 * max(1.0, x_scale),
                                rtol=8.9e-16, maxiter=200))
            return root, (1 if fb > fa else -1)
        if a == lo and b == hi:
            return None
        width *= 32.0
    return None


def _admissibility_boundary(spec, x_inadm, x_adm, run_min):
    """Point where V returns to the running minimum, between two scan samples."""
    lo, hi = x_inadm, x_adm
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if spec.value(mid) < run_min:
            hi = mid
        else:
            lo = mid
    return hi


def _n0_side_solutions(spec, x0, beta, side, scan_points):
    """All single-turning-point solutions on one side of x0.

    Scans the admissible turning-point set (V(x_t) strictly below the running
    minimum of V between x0 and x_t), brackets every crossing of the
    flight-time condition, probes for sub-grid fold pairs, and refines each
    root against the adaptive quadrature.
    """
    d = -1.0 if side == "left" else 1.0
    reach = max(abs(x0), _critical_bound(spec)) + 1.0
    length = abs(d * reach - x0)
    if length <= 0.0:
        return []
    n = max(16, int(scan_points))
    offsets = np.linspace(length / n, length, n)
    xs = x0 + d * offsets
    v0 = spec.value(x0)
    vx = spec.value(xs)
    run_min = np.minimum.accumulate(np.concatenate(([v0], vx)))[:-1]
    admissible = vx < run_min
    betas = np.full(n, np.nan)
    if np.any(admissible):
        betas[admissible] = _bounce_beta_grid(spec, x0, xs[admissible])
    admissible &= np.isfinite(betas)
    h = betas - beta
    x_scale = max(1.0, abs(x0), reach)

    def cheap(xt):
        return _bounce_beta_cheap(spec, x0, xt) - beta

    def accurate(xt):
        return _bounce_time(spec, x0, xt, ROOT_CFG) - beta

    solutions = []
    i = 0
    while i < n:
        if not admissible[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and admissible[j + 1]:
            j += 1
        pts_x = list(xs[i:j + 1])
        pts_h = list(h[i:j + 1])
        # Candidate where the run starts right at x0 (tiny-bounce limit).
        if i == 0:
            x_in = x0 + d * 1e-12 * x_scale
            hv = cheap(x_in)
            if np.isfinite(hv):
                pts_x.insert(0, x_in)
                pts_h.insert(0, hv)
        else:
            # Run began at an admissibility boundary: refine it and probe just inside.
            xb = _admissibility_boundary(spec, xs[i - 1], xs[i], run_min[i])
            x_in = xb + (xs[i] - xb) * 1e-3
            hv = cheap(x_in)
            if np.isfinite(hv):
                pts_x.insert(0, x_in)
                pts_h.insert(0, hv)
        if j + 1 < n:
            # Run ended inside the scan: probe just inside the far boundary.
            if vx[j + 1] >= run_min[j + 1]:
                xb = _admissibility_boundary(spec, xs[j + 1], xs[j], run_min[j + 1])
                x_out = xb - (xb - xs[j]) * 1e-3
            else:
                x_out = xs[j] + d * 0.0
            hv = cheap(x_out)
            if np.isfinite(hv) and x_out != pts_x[-1]:
                pts_x.append(x_out)
                pts_h.append(hv)
        for xa, xb_ in _brackets_from_samples(pts_x, pts_h, cheap):
            got = _refine_root(cheap, accurate, xa, xb_, x_scale)
            if got is None:
                continue
            root, slope = got
            solutions.append(TurningPointSolution(
                side=side, n_periods=0, periodic=False, x_turn=root,
                x_minus=root if side == "left" else None,
                x_plus=root if side == "right" else None,
                energy=spec.value(root), slope_sign=slope))
        i = j + 1
    return solutions


def _convex_bounce_solution(spec, x0, beta, x_min):
    """The unique single-bounce path of a convex potential.

    With V'' >= 0 everywhere the fluctuation operator is positive definite
    around every closed path, so the flight time is strictly monotone in the
    turning point and plain bisection suffices.
    """
    side = "left" if x0 > x_min else "right"
    span = abs(x0 - x_min)
    sgn = 1.0 if x0 > x_min else -1.0
    x_scale = max(1.0, abs(x0))

    def cheap(xt):
        return _bounce_beta_cheap(spec, x0, xt) - beta

    def accurate(xt):
        return _bounce_time(spec, x0, xt, ROOT_CFG) - beta

    # Bracket between the creep limit (flight time diverges logarithmically at
    # the hilltop of -V) and the collapse limit (path shrinks to a point).
    eps = 1e-13 * span
    creep = x_min + sgn * eps
    h_creep = cheap(creep)
    for _ in range(40):
        if np.isfinite(h_creep) and h_creep > 0.0:
            break
        eps *= 1e-3
        if eps < 1e-290:
            raise ConvergenceFailure("creep bracket endpoint underflowed")
        creep = x_min + sgn * eps
        h_creep = cheap(creep)
    eps_c = 1e-13 * span
    collapse = x0 - sgn * eps_c
    h_collapse = cheap(collapse)
    for _ in range(40):
        if np.isfinite(h_collapse) and h_collapse < 0.0:
            break
        eps_c *= 1e-3
        if eps_c < 1e-290:
            raise ConvergenceFailure("collapse bracket endpoint underflowed")
        collapse = x0 - sgn * eps_c
        h_collapse = cheap(collapse)
    got = _refine_root(cheap, accurate, creep, collapse, x_scale)
    if got is None:
        raise ConvergenceFailure("convex bounce root lost during refinement")
    root, slope = got
    return TurningPointSolution(
        side=side, n_periods=0, periodic=False, x_turn=root,
        x_minus=root if side == "left" else None,
        x_plus=root if side == "right" else None,
        energy=spec.value(root), slope_sign=slope)


def _bounded_solutions(spec, x0, beta, well, scan_points):
    """Bounded-motion solutions (n >= 1 aperiodic and purely periodic).

    Parameterizes orbits by the right turning point x_plus in (x_m,
    right_edge); the left turning point follows from energy conservation.
    For each winding number the flight-time mismatch is bracketed on the grid
    and refined.
    """
    hbar = spec.units.hbar
    if not well.contains(x0):
        return []
    if not (np.isfinite(well.left_edge) and np.isfinite(well.right_edge)):
        return []
    v0 = spec.value(x0)
    v_edges = max(spec.value(well.left_edge), spec.value(well.right_edge))
    if not (v0 > v_edges):
        return []
    # Period floor from the stiffest curvature of -V inside the well: no
    # oscillation is faster than the hardest local harmonic well.
    ws = np.linspace(well.left_edge, well.right_edge, 513)
    curv = -spec.deriv2(ws)
    k_max = float(np.max(curv))
    if k_max <= 0.0:
        return []
    t_floor = 2.0 * math.pi * math.sqrt(spec.units.mass / k_max) / hbar
    if beta * hbar < t_floor * hbar * 0.999:
        return []
    n_max = math.ceil(beta * hbar * well.omega_m / (2.0 * math.pi)) + 1

    lo_p = max(x0, well.x_m)
    span = well.right_edge - lo_p
    if span <= 0.0:
        return []
    n_grid = max(16, int(scan_points))
    xp = lo_p + np.linspace(span * 1e-9, span * (1.0 - 1e-9), n_grid)
    mask = spec.value_diff(x0, xp) > 0.0
    mask &= spec.value_diff(xp, well.left_edge) > 0.0
    mask &= spec.value_diff(xp, well.right_edge) > 0.0
    if not np.any(mask):
        return []
    xp = xp[mask]
    xm = _left_turning_grid(spec, well, xp)
    t_r = _bounce_beta_grid(spec, x0, xp)
    t_l = _bounce_beta_grid(spec, x0, xm)
    good = np.isfinite(t_r) & np.isfinite(t_l)
    xp, xm, t_r, t_l = xp[good], xm[good], t_r[good], t_l[good]
    if xp.size < 3:
        return []
    period = t_r + t_l
    x_scale = max(1.0, abs(well.right_edge), abs(well.left_edge))

    def make_cheap(n, kind):
        def cheap(x):
            tr = _bounce_beta_cheap(spec, x0, x)
            xl = _left_turning_scalar(spec, well, x)
            tl = _bounce_beta_cheap(spec, x0, xl)
            t = n * (tr + tl) + (tr if kind == "right" else tl if kind == "left" else 0.0)
            return t - beta
        return cheap

    def make_accurate(n, kind):
        def accurate(x):
            xl = _left_turning_scalar(spec, well, x)
            tr = _bounce_time(spec, x0, x, ROOT_CFG)
            tl = _bounce_time(spec, x0, xl, ROOT_CFG)
            t = n * (tr + tl) + (tr if kind == "right" else tl if kind == "left" else 0.0)
            return t - beta
        return accurate

    solutions = []
    for n in range(1, n_max + 1):
        branch_values = {
            "periodic": n * period,
            "right": t_r + n * period,
            "left": t_l + n * period,
        }
        for kind, vals in branch_values.items():
            hs = vals - beta
            if np.nanmin(hs) > 0.0:
                continue
            cheap = make_cheap(n, kind)
            accurate = make_accurate(n, kind)
            for xa, xb in _brackets_from_samples(list(xp), list(hs), cheap):
                got = _refine_root(cheap, accurate, xa, xb, x_scale)
                if got is None:
                    continue
                root, slope = got
                x_left = _left_turning_scalar(spec, well, root)
                energy = spec.value(root)
                if kind == "periodic":
                    for start_side in ("left", "right"):
                        solutions.append(TurningPointSolution(
                            side=start_side, n_periods=n, periodic=True,
                            x_turn=root if start_side == "right" else x_left,
                            x_minus=x_left, x_plus=root,
                            energy=energy, slope_sign=slope))
                else:
                    solutions.append(TurningPointSolution(
                        side=kind, n_periods=n, periodic=False,
                        x_turn=root if kind == "right" else x_left,
                        x_minus=x_left, x_plus=root,
                        energy=energy, slope_sign=slope))
    return solutions


def _dedupe(solutions, x_scale):
    tol = max(1e-10, 1e-9 * x_scale)
    kept: list[TurningPointSolution] = []
    for sol in sorted(solutions, key=lambda s: (s.n_periods, s.periodic, s.side, s.x_turn)):
        dup = any(
            k.side == sol.side and k.n_periods == sol.n_periods and k.periodic == sol.periodic
            and abs(k.x_turn - sol.x_turn) <= tol
            for k in kept
        )
        if not dup:
            kept.append(sol)
    return kept


def solve_turning_points(spec: PotentialSpec, x0: float, beta: float,
                         wells=None, scan_points: int = SCAN_POINTS_DEFAULT,
                         include_higher_periods: bool = True) -> list[TurningPointSolution]:
    """Every closed classical path at (x0, beta), identified by turning points.

    Returns single-bounce solutions on both sides (winding number 0), bounded
    multi-period solutions up to n_max = ceil(beta hbar omega_m / 2 pi) + 1,
    and the constant path when x0 sits at a critical point of V within
    tolerance.
    """
    if not (np.isfinite(beta) and beta > 0.0):
        raise ValueError(f"beta must be positive and finite, got {beta!r}")
    if not np.isfinite(x0):
        raise ValueError(f"x0 must be finite, got {x0!r}")
    wells = default_wells(spec) if wells is None else tuple(wells)
    solutions: list[TurningPointSolution] = []
    snap = _snap_to_critical(spec, x0)
    x_start = x0 if snap is None else snap
    if snap is not None:
        solutions.append(TurningPointSolution(
            side="still", n_periods=0, periodic=False, x_turn=snap,
            x_minus=snap, x_plus=snap, energy=spec.value(snap), slope_sign=0))
    if _is_convex(spec):
        crits = _all_critical_points(spec)
        x_min = crits[0] if crits else 0.0
        if snap is None:
            solutions.append(_convex_bounce_solution(spec, x_start, beta, x_min))
    else:
        for side in ("left", "right"):
            solutions.extend(_n0_side_solutions(spec, x_start, beta, side, scan_points))
        if include_higher_periods:
            well = _containing_well(wells, x_start)
            if well is not None:
                solutions.extend(_bounded_solutions(spec, x_start, beta, well, scan_points))
    return _dedupe(solutions, max(1.0, abs(x0)))


# ---------------------------------------------------------------------------
# action, determinant, stability
# ---------------------------------------------------------------------------

def _mv_integral(spec: PotentialSpec, x0: float, x_turn: float,
                 cfg: QuadratureConfig) -> float:
    """int M v dx between x0 and the turning point (positive)."""
    m = spec.units.mass
    direction = math.copysign(1.0, x0 - x_turn)

    def g(t):
        t = np.asarray(t, dtype=float)
        diff = spec.value_diff_offset(x_turn, direction * t * t)
        return 2.0 * t * np.sqrt(2.0 * m * np.maximum(diff, 0.0))

    t_max = math.sqrt(abs(x0 - x_turn))
    val, _ = integrate_adaptive(g, 0.0, t_max, cfg, order=_TOF_PANEL_ORDER)
    return val


def _mv_integral_cheap(spec: PotentialSpec, x0: float, x_turn: float) -> float:
    m = spec.units.mass
    width = abs(x_turn - x0)
    tmax = math.sqrt(width)
    direction = math.copysign(1.0, x0 - x_turn)
    nodes, weights = gauss_rule_01(_SCAN_GAUSS_ORDER)
    t = tmax * nodes
    diff = spec.value_diff_offset(x_turn, direction * t * t)
    vals = 2.0 * t * np.sqrt(np.maximum(2.0 * m * diff, 0.0))
    return float(tmax * np.dot(weights, vals))


def action(spec: PotentialSpec, path: ClassicalPath,
           cfg: QuadratureConfig | None = None, fast: bool = False) -> float:
    """Euclidean action of a closed classical path from its turning points.

    The constant path contributes beta hbar V(x_m) only; bouncing paths add
    2 int M v dx to the turning point on their side, and bounded paths add
    2 n int_{x-}^{x+} M v dx per full period.
    """
    hbar = spec.units.hbar
    base = path.beta * hbar * path.energy
    if path.side == "still":
        return base
    cfg = cfg or ROOT_CFG
    mv = _mv_integral_cheap if fast else (lambda s, a, b: _mv_integral(s, a, b, cfg))
    total = base
    if not path.periodic:
        x_turn = path.x_turn
        if x_turn is None:
            raise ValueError("bouncing path lacks its turning point")
        total += 2.0 * mv(spec, path.x0, x_turn)
    if path.n_periods > 0:
        if path.x_minus is None or path.x_plus is None:
            raise ValueError("multi-period path lacks a turning-point pair")
        swing = mv(spec, path.x0, path.x_minus) + mv(spec, path.x0, path.x_plus)
        total += 2.0 * path.n_periods * swing
    return total


def _fd_scale(spec, path, wells):
    """Finite-difference scale for the flight-time derivative at x_turn."""
    x_t = path.x_turn
    well = _containing_well(wells, path.x0)
    base = 0.5 * well.width if well is not None and np.isfinite(well.width) \
        else max(1.0, abs(path.x0 - x_t))
    dist = abs(x_t - path.x0)
    for c in _all_critical_points(spec):
        dist = min(dist, abs(x_t - c))
    h_nominal = max(1e-6, 1e-6 * abs(x_t)) * base
    cap = dist / 8.0
    if h_nominal > cap > 0.0:
        base *= cap / h_nominal
    return base


def fluctuation_determinant(spec: PotentialSpec, path: ClassicalPath,
                            wells=None) -> float:
    """Determinant of the second-variation operator around a path.

    Constant paths have the closed forms 2 pi hbar sin(beta hbar w_m)/(M w_m)
    at a maximum of V and the sinh analogue at a minimum.  Single-bounce
    paths use the turning-point formula

        Delta = 4 pi hbar^2 [V(x_t) - V(x0)] / (M V'(x_t)) * d(beta)/d(x_t),

    with the derivative taken at fixed x0 by high-order finite differences of
    the flight time.  No formula is available for multi-period paths.
    """
    hbar, m = spec.units.hbar, spec.units.mass
    if path.side == "still":
        v2 = spec.deriv2(path.x0)
        if v2 < 0.0:
            w_m = math.sqrt(-v2 / m)
            return 2.0 * math.pi * hbar * math.sin(path.beta * hbar * w_m) / (m * w_m)
        w0 = math.sqrt(v2 / m)
        return 2.0 * math.pi * hbar * math.sinh(path.beta * hbar * w0) / (m * w0)
    if path.n_periods >= 1 or path.periodic:
        raise UnavailableDeterminant(
            "fluctuation determinant is only available for single-bounce paths"
        )
    wells = default_wells(spec) if wells is None else tuple(wells)
    x_t = path.x_turn
    v1 = spec.deriv(x_t)
    probe = np.linspace(path.x0, x_t, 9)[1:-1]
    v1_scale = max(1.0, float(np.max(np.abs(spec.deriv(probe)))))
    if abs(v1) < 1e-12 * v1_scale:
        raise SingularTurningPoint(f"V'({x_t:.12g}) vanishes within tolerance")

    def flight(xt):
        return _bounce_time(spec, path.x0, xt, _FD_CFG)

    dbeta = derivative_central(flight, x_t, scale=_fd_scale(spec, path, wells))
    return 4.0 * math.pi * hbar * hbar * spec.value_diff(x_t, path.x0) * dbeta / (m * v1)


def _det_sign_prediction(spec, sol: TurningPointSolution, x0: float) -> int:
    """Sign of the determinant from the scan slope, no quadrature needed."""
    if sol.slope_sign == 0:
        return 0
    s = math.copysign(1.0, spec.value_diff(sol.x_turn, x0))
    s *= math.copysign(1.0, spec.deriv(sol.x_turn))
    return int(s * sol.slope_sign)


def classify_stability(spec: PotentialSpec, path: ClassicalPath,
                       delta: float | None, wells=None) -> StabilityClass:
    """Stability class from the determinant or, for bounded paths, node counts.

    The constant path at a maximum of V gains one negative mode every time
    beta hbar omega_m crosses a multiple of pi.  Multi-period paths are
    always saddles: the velocity zero-mode vanishes at the turning-point
    touches, and a zero-eigenvalue solution with k interior zeros forces at
    least k - 1 negative Dirichlet modes (2n - 1 for n-period orbits, 2n for
    bounce-plus-n-period paths).
    """
    hbar, m = spec.units.hbar, spec.units.mass
    wells = default_wells(spec) if wells is None else tuple(wells)
    if path.side == "still":
        v2 = spec.deriv2(path.x0)
        if v2 > 0.0:
            return MINIMUM
        w_m = math.sqrt(-v2 / m)
        delta_scale = 2.0 * math.pi * hbar / (m * w_m)
        if delta is not None and abs(delta) < _CAUSTIC_DELTA_RTOL * delta_scale:
            return MARGINAL
        index = int(math.floor(path.beta * hbar * w_m / math.pi + 1e-12))
        if index == 0:
            return MINIMUM
        return ONE_SADDLE if index == 1 else multi_saddle(index)
    if path.n_periods >= 1:
        touches = 2 * path.n_periods + (0 if path.periodic else 1)
        index = touches - 1
        return ONE_SADDLE if index == 1 else multi_saddle(index)
    if delta is None:
        raise ValueError("single-bounce classification requires the determinant")
    well = _containing_well(wells, path.x0)
    omega_ref = well.omega_m if well is not None else 1.0
    delta_scale = 2.0 * math.pi * hbar / (m * omega_ref)
    if abs(delta) < _CAUSTIC_DELTA_RTOL * delta_scale:
        return MARGINAL
    return MINIMUM if delta > 0.0 else ONE_SADDLE


# ---------------------------------------------------------------------------
# inventories
# ---------------------------------------------------------------------------

def _path_from_solution(sol: TurningPointSolution, x0: float, beta: float) -> ClassicalPath:
    return ClassicalPath(
        x0=x0, beta=beta, side=sol.side, x_minus=sol.x_minus, x_plus=sol.x_plus,
        n_periods=sol.n_periods, periodic=sol.periodic, energy=sol.energy)


def enumerate_paths(spec: PotentialSpec, x0: float, beta: float,
                    wells=None, scan_points: int = SCAN_POINTS_DEFAULT,
                    detail: str = "full") -> PathInventory:
    """Full path inventory at a control point, ordered by ascending action.

    ``detail`` trades work for information: "full" evaluates the determinant
    of every single-bounce path, "minima" only where the scan slope predicts
    a minimum (enough for the partition-function integrand), and "counts"
    classifies purely from slope signs (enough for region maps).  Per-path
    failures are collected as warnings and leave the path flagged with NaN
    action or missing stability rather than aborting the inventory.
    """
    if detail not in ("full", "minima", "counts"):
        raise ValueError(f"detail must be 'full', 'minima' or 'counts', got {detail!r}")
    wells = default_wells(spec) if wells is None else tuple(wells)
    sols = solve_turning_points(spec, x0, beta, wells=wells, scan_points=scan_points)
    paths: list[ClassicalPath] = []
    warnings: list[str] = []
    for sol in sols:
        path = _path_from_solution(sol, x0, beta)
        try:
            s_val = action(spec, path, fast=(detail == "counts"))
        except NumericsError as exc:
            warnings.append(f"action failed for {sol.side} n={sol.n_periods}: {exc}")
            s_val = math.nan
        delta: float | None = None
        stability: StabilityClass | None = None
        try:
            if sol.side == "still":
                delta = fluctuation_determinant(spec, path, wells=wells)
                stability = classify_stability(spec, path, delta, wells=wells)
            elif sol.n_periods >= 1:
                stability = classify_stability(spec, path, None, wells=wells)
            else:
                sign = _det_sign_prediction(spec, sol, x0)
                want_value = detail == "full" or (detail == "minima" and sign >= 0)
                if want_value:
                    delta = fluctuation_determinant(spec, path, wells=wells)
                    stability = classify_stability(spec, path, delta, wells=wells)
                else:
                    stability = MINIMUM if sign > 0 else ONE_SADDLE
        except NumericsError as exc:
            warnings.append(f"determinant failed for {sol.side} n={sol.n_periods}: {exc}")
        paths.append(replace(path, action=s_val, determinant=delta, stability=stability))
    paths.sort(key=lambda p: (math.isnan(p.action), p.action, p.side, p.n_periods,
                              p.x_turn if p.x_turn is not None else 0.0))
    return PathInventory(x0=x0, beta=beta, paths=tuple(paths), warnings=tuple(warnings))


def inventory_to_record(inv: PathInventory) -> dict:
    """JSON-ready representation of an inventory."""
    record = {
        "x0": inv.x0,
        "beta": inv.beta,
        "p": inv.p,
        "N": inv.n_minima,
        "paths": [
            {
                "side": p.side,
                "x_minus": p.x_minus,
                "x_plus": p.x_plus,
                "n": p.n_periods,
                "periodic": p.periodic,
                "E": p.energy,
                "S": None if math.isnan(p.action) else p.action,
                "Delta": p.determinant,
                "stability": None if p.stability is None else str(p.stability),
            }
            for p in inv.paths
        ],
    }
    if inv.warnings:
        record["warnings"] = list(inv.warnings)
    return record
