"""Jacobi elliptic cn via the arithmetic-geometric mean, and the closed-form
turning point of the harmonic-plus-quartic oscillator.

For V = (M omega^2/2) x^2 + lam x^4 the single turning point satisfies

    x_t = x0 cn(u, k),
    u   = (beta hbar omega / 2) sqrt(1 + 4 lam x_t^2 / (M omega^2)),
    k^2 = (M omega^2 + 2 lam x_t^2) / (M omega^2 + 4 lam x_t^2),

a self-consistent system solved here by bracketed root finding.  The moduli
involved live in [1/sqrt(2), 1], so cn is computed by the descending-Landen
AGM recurrence, which converges uniformly across the whole modulus range.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import asin, cos, cosh, pi, sin, sqrt, tanh

import numpy as np

from .errors import ConvergenceFailure
from .potentials import PotentialSpec
from .quadrature import find_root_bracketed

_AGM_TOL = 1e-17
_AGM_MAX_ITER = 64


@dataclass(frozen=True)
class EllipticArgs:
    """Argument and modulus of a Jacobi elliptic evaluation."""

    u: float
    k: float

    def __post_init__(self):
        if not (0.0 <= self.k <= 1.0):
            raise ValueError(f"modulus must lie in [0, 1], got {self.k!r}")
        if not np.isfinite(self.u):
            raise ValueError(f"argument must be finite, got {self.u!r}")


def _agm_scales(k: float) -> tuple[list[float], list[float]]:
    """Descending AGM sequence a_n and the ratios c_n/a_n."""
    a = 1.0
    b = sqrt((1.0 - k) * (1.0 + k))
    c = k
    a_seq = [a]
    ratio_seq = [c / a]
    for _ in range(_AGM_MAX_ITER):
        if abs(c) <= _AGM_TOL * a:
            break
        a, b, c = 0.5 * (a + b), sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        ratio_seq.append(c / a)
    return a_seq, ratio_seq


def jacobi_sn_cn_dn(u: float, k: float) -> tuple[float, float, float]:
    """sn, cn and dn from a single AGM descending-Landen pass.

    The k = 1 boundary is handled analytically (cn = dn = sech, sn = tanh);
    everywhere else the amplitude recurrence
    phi_{n-1} = (phi_n + asin((c_n/a_n) sin phi_n)) / 2 is unwound from
    phi_N = 2^N a_N u.
    """
    if not (0.0 <= k <= 1.0):
        raise ValueError(f"modulus must lie in [0, 1], got {k!r}")
    if not np.isfinite(u):
        raise ValueError(f"argument must be finite, got {u!r}")
    if k == 1.0:
        sech = 1.0 / cosh(u)
        return tanh(u), sech, sech
    a_seq, ratios = _agm_scales(k)
    n_last = len(a_seq) - 1
    phi = (2.0 ** n_last) * a_seq[n_last] * u
    phi_next = phi
    for n in range(n_last, 0, -1):
        phi_next = phi
        s = ratios[n] * sin(phi)
        s = min(1.0, max(-1.0, s))
        phi = 0.5 * (phi + asin(s))
    sn = sin(phi)
    cn = cos(phi)
    if n_last == 0:
        dn = sqrt(max(0.0, 1.0 - (k * sn) ** 2))
    else:
        dn = cn / cos(phi_next - phi)
    return sn, cn, dn


def jacobi_cn(u: float, k: float) -> float:
    """cn(u, k) to about 1e-12 absolute across the full modulus range."""
    return jacobi_sn_cn_dn(u, k)[1]


def complete_elliptic_k(k: float) -> float:
    """Complete elliptic integral K(k) = pi / (2 agm(1, k'))."""
    if not (0.0 <= k <= 1.0):
        raise ValueError(f"modulus must lie in [0, 1], got {k!r}")
    if k == 1.0:
        return float("inf")
    a_seq, _ = _agm_scales(k)
    return pi / (2.0 * a_seq[-1])


def quartic_elliptic_args(spec: PotentialSpec, x_turn: float, beta: float) -> EllipticArgs:
    """Elliptic argument and modulus attached to a quartic turning point."""
    if spec.family != "harmonic_plus_quartic":
        raise ValueError(f"expected harmonic_plus_quartic potential, got {spec.family!r}")
    m, w, lam = spec.units.mass, spec.omega, spec.lam
    mw2 = m * w * w
    xt2 = x_turn * x_turn
    u = 0.5 * beta * spec.units.hbar * w * sqrt(1.0 + 4.0 * lam * xt2 / mw2)
    k = sqrt((mw2 + 2.0 * lam * xt2) / (mw2 + 4.0 * lam * xt2))
    return EllipticArgs(u=u, k=k)


def quartic_turning_point(spec: PotentialSpec, x0: float, beta: float) -> float:
    """Turning point of the harmonic-plus-quartic oscillator in closed form.

    Solves the self-consistent elliptic system by bracketed root finding on
    g(x_t) = x_t - x0 cn(u(x_t), k(x_t)); the solution is unique, has the
    sign of x0, and satisfies |x_t| < |x0|.
    """
    if spec.family != "harmonic_plus_quartic":
        raise ValueError(f"expected harmonic_plus_quartic potential, got {spec.family!r}")
    if beta < 0.0 or not np.isfinite(beta):
        raise ValueError(f"beta must be non-negative and finite, got {beta!r}")
    if x0 == 0.0 or beta == 0.0:
        return float(x0) if beta == 0.0 else 0.0
    sign = 1.0 if x0 > 0.0 else -1.0
    mag = abs(float(x0))

    def g(xt: float) -> float:
        args = quartic_elliptic_args(spec, xt, beta)
        return xt - mag * jacobi_cn(args.u, args.k)

    lo, hi = 0.0, mag
    if g(lo) >= 0.0 or g(hi) <= 0.0:
        raise ConvergenceFailure(
            f"no turning-point bracket in (0, {mag:.6g}) at beta={beta:.6g}"
        )
    root = find_root_bracketed(g, (lo, hi))
    return sign * root
