"""Unit system, analytic potential families, and discovery of wells of -V.

Euclidean classical motion obeys M x'' = V'(x), i.e. Newtonian motion in the
inverted potential -V.  Bounded motion therefore lives in "wells of -V":
neighbourhoods of local maxima of V, bounded by the adjacent local minima of
V.  Everything downstream needs V, V' and V'' in closed form, so potentials
are restricted to named analytic families plus polynomials bounded below.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateCriticalPoint

FAMILIES = ("harmonic", "harmonic_plus_quartic", "double_well", "polynomial")

# |V''(x_c)| below this times the local V'' scale marks a degenerate critical
# point: the well frequency and the still-path determinant are undefined there.
DEGENERACY_RTOL = 1e-9


@dataclass(frozen=True)
class UnitSystem:
    """Planck constant and particle mass fixing the unit conventions."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.hbar) and self.hbar > 0.0):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar!r}")
        if not (np.isfinite(self.mass) and self.mass > 0.0):
            raise ValueError(f"mass must be positive and finite, got {self.mass!r}")


def _as_float_array(x):
    return np.asarray(x, dtype=float)


def _scalar_or_array(out, x):
    return float(out) if np.ndim(x) == 0 else out


@lru_cache(maxsize=128)
def _poly_derivative_coeffs(coeffs: tuple[float, ...]) -> tuple[tuple[float, ...], tuple[float, ...]]:
    c = np.asarray(coeffs, dtype=float)
    c1 = np.polynomial.polynomial.polyder(c)
    c2 = np.polynomial.polynomial.polyder(c1)
    return tuple(c1), tuple(c2)


@dataclass(frozen=True)
class PotentialSpec:
    """One-dimensional potential from a named family.

    Families and their parameters:

    - ``harmonic``:              V = (M omega^2 / 2) x^2
    - ``harmonic_plus_quartic``: V = (M omega^2 / 2) x^2 + lam x^4, lam > 0
    - ``double_well``:           V = lam (x^2 - a^2)^2, lam > 0, a > 0
    - ``polynomial``:            V = sum_k c_k x^k, bounded below

    Instances are immutable and hashable; all evaluation methods accept
    scalars or numpy arrays and are safe to call concurrently.
    """

    family: str
    omega: float = 0.0
    lam: float = 0.0
    a: float = 0.0
    coefficients: tuple[float, ...] = ()
    units: UnitSystem = UnitSystem()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown potential family {self.family!r}; expected one of {FAMILIES}")
        if self.family in ("harmonic", "harmonic_plus_quartic"):
            if not (np.isfinite(self.omega) and self.omega > 0.0):
                raise ValueError(f"omega must be positive, got {self.omega!r}")
        if self.family in ("harmonic_plus_quartic", "double_well"):
            if not (np.isfinite(self.lam) and self.lam > 0.0):
                raise ValueError(f"lambda must be positive, got {self.lam!r}")
        if self.family == "double_well":
            if not (np.isfinite(self.a) and self.a > 0.0):
                raise ValueError(f"a must be positive, got {self.a!r}")
        if self.family == "polynomial":
            c = tuple(float(v) for v in self.coefficients)
            if not c or not all(np.isfinite(v) for v in c):
                raise ValueError("polynomial coefficients must be a non-empty finite sequence")
            while len(c) > 1 and c[-1] == 0.0:
                c = c[:-1]
            degree = len(c) - 1
            if degree < 2 or degree % 2 != 0 or c[-1] <= 0.0:
                raise ValueError(
                    "polynomial potential must be bounded below: even degree >= 2 "
                    f"with positive leading coefficient, got degree {degree} "
                    f"and leading coefficient {c[-1]!r}"
                )
            object.__setattr__(self, "coefficients", c)

    # -- constructors -----------------------------------------------------

    @classmethod
    def harmonic(cls, omega: float, units: UnitSystem | None = None) -> "PotentialSpec":
        return cls(family="harmonic", omega=float(omega), units=units or UnitSystem())

    @classmethod
    def harmonic_plus_quartic(cls, omega: float, lam: float, units: UnitSystem | None = None) -> "PotentialSpec":
        return cls(family="harmonic_plus_quartic", omega=float(omega), lam=float(lam),
                   units=units or UnitSystem())

    @classmethod
    def double_well(cls, lam: float, a: float, units: UnitSystem | None = None) -> "PotentialSpec":
        return cls(family="double_well", lam=float(lam), a=float(a), units=units or UnitSystem())

    @classmethod
    def polynomial(cls, coefficients, units: UnitSystem | None = None) -> "PotentialSpec":
        return cls(family="polynomial", coefficients=tuple(float(c) for c in coefficients),
                   units=units or UnitSystem())

    @classmethod
    def from_config(cls, mapping) -> "PotentialSpec":
        """Build from a flat configuration mapping.

        Recognized keys: ``family``, ``omega``, ``lambda``, ``a``,
        ``coefficients`` (list, ascending powers), ``hbar``, ``mass``.
        """
        known = {"family", "omega", "lambda", "a", "coefficients", "hbar", "mass"}
        for key in mapping:
            if key not in known:
                raise ValueError(f"unknown potential configuration key {key!r}")
        if "family" not in mapping:
            raise ValueError("potential configuration requires key 'family'")
        family = str(mapping["family"]).strip().lower()
        units = UnitSystem(hbar=float(mapping.get("hbar", 1.0)), mass=float(mapping.get("mass", 1.0)))
        if family == "harmonic":
            return cls.harmonic(mapping["omega"], units)
        if family == "harmonic_plus_quartic":
            return cls.harmonic_plus_quartic(mapping["omega"], mapping["lambda"], units)
        if family == "double_well":
            return cls.double_well(mapping["lambda"], mapping["a"], units)
        if family == "polynomial":
            return cls.polynomial(mapping["coefficients"], units)
        raise ValueError(f"unknown potential family {family!r}; expected one of {FAMILIES}")

    # -- evaluation --------------------------------------------------------

    def value(self, x):
        """V(x); vectorized."""
        xa = _as_float_array(x)
        m, w = self.units.mass, self.omega
        if self.family == "harmonic":
            out = 0.5 * m * w * w * xa * xa
        elif self.family == "harmonic_plus_quartic":
            x2 = xa * xa
            out = 0.5 * m * w * w * x2 + self.lam * x2 * x2
        elif self.family == "double_well":
            d = xa * xa - self.a * self.a
            out = self.lam * d * d
        else:
            out = np.polynomial.polynomial.polyval(xa, np.asarray(self.coefficients))
        return _scalar_or_array(out, x)

    def deriv(self, x):
        """V'(x); vectorized."""
        xa = _as_float_array(x)
        m, w = self.units.mass, self.omega
        if self.family == "harmonic":
            out = m * w * w * xa
        elif self.family == "harmonic_plus_quartic":
            out = m * w * w * xa + 4.0 * self.lam * xa ** 3
        elif self.family == "double_well":
            out = 4.0 * self.lam * xa * (xa * xa - self.a * self.a)
        else:
            c1, _ = _poly_derivative_coeffs(self.coefficients)
            out = np.polynomial.polynomial.polyval(xa, np.asarray(c1))
        return _scalar_or_array(out, x)

    def deriv2(self, x):
        """V''(x); vectorized."""
        xa = _as_float_array(x)
        m, w = self.units.mass, self.omega
        if self.family == "harmonic":
            out = m * w * w * np.ones_like(xa)
        elif self.family == "harmonic_plus_quartic":
            out = m * w * w + 12.0 * self.lam * xa * xa
        elif self.family == "double_well":
            out = 4.0 * self.lam * (3.0 * xa * xa - self.a * self.a)
        else:
            _, c2 = _poly_derivative_coeffs(self.coefficients)
            out = np.polynomial.polynomial.polyval(xa, np.asarray(c2))
        return _scalar_or_array(out, x)

    def value_diff(self, x, y):
        """V(x) - V(y) in a cancellation-free form.

        Flight-time and action integrands depend on V(x) - V(x_turn) with x
        approaching x_turn; forming the difference of two nearly equal values
        would lose half the significant digits right where the integrand is
        singular.  Each family factors the difference exactly instead.
        """
        xa = _as_float_array(x)
        ya = _as_float_array(y)
        m, w = self.units.mass, self.omega
        if self.family == "harmonic":
            out = 0.5 * m * w * w * (xa - ya) * (xa + ya)
        elif self.family == "harmonic_plus_quartic":
            s2 = xa * xa + ya * ya
            out = (xa - ya) * (xa + ya) * (0.5 * m * w * w + self.lam * s2)
        elif self.family == "double_well":
            out = self.lam * (xa - ya) * (xa + ya) * (xa * xa + ya * ya - 2.0 * self.a * self.a)
        else:
            # V(x)-V(y) = (x-y) * sum_k c_k S_k with S_k = (x^k - y^k)/(x - y)
            # built by the recurrence S_1 = 1, S_{k+1} = x S_k + y^k.
            c = self.coefficients
            shape = np.broadcast(xa, ya).shape
            acc = np.zeros(shape)
            sk = np.ones(shape)
            yk = np.ones(shape)
            for k in range(1, len(c)):
                if c[k] != 0.0:
                    acc = acc + c[k] * sk
                if k + 1 < len(c):
                    yk = yk * ya
                    sk = sk * xa + yk
            out = (xa - ya) * acc
        if np.ndim(x) == 0 and np.ndim(y) == 0:
            return float(out)
        return out

    def value_diff_offset(self, y, delta):
        """V(y + delta) - V(y) computed directly from the offset.

        Needed where delta underflows the floating-point spacing of y, e.g.
        quadrature nodes within 1e-13 of a turning point: forming y + delta
        first would lose the offset entirely.
        """
        ya = _as_float_array(y)
        da = _as_float_array(delta)
        xa = ya + da
        m, w = self.units.mass, self.omega
        if self.family == "harmonic":
            out = 0.5 * m * w * w * da * (2.0 * ya + da)
        elif self.family == "harmonic_plus_quartic":
            s2 = xa * xa + ya * ya
            out = da * (2.0 * ya + da) * (0.5 * m * w * w + self.lam * s2)
        elif self.family == "double_well":
            out = self.lam * da * (2.0 * ya + da) * (xa * xa + ya * ya - 2.0 * self.a * self.a)
        else:
            c = self.coefficients
            shape = np.broadcast(xa, ya).shape
            acc = np.zeros(shape)
            sk = np.ones(shape)
            yk = np.ones(shape)
            for k in range(1, len(c)):
                if c[k] != 0.0:
                    acc = acc + c[k] * sk
                if k + 1 < len(c):
                    yk = yk * ya
                    sk = sk * xa + yk
            out = da * acc
        if np.ndim(y) == 0 and np.ndim(delta) == 0:
            return float(out)
        return out

    @property
    def is_even(self) -> bool:
        """True when V(-x) = V(x) exactly."""
        if self.family == "polynomial":
            return all(c == 0.0 for c in self.coefficients[1::2])
        return True


def evaluate(spec: PotentialSpec, x: float) -> tuple[float, float, float]:
    """Return (V, V', V'') at a single point, all in closed form."""
    if not np.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    return spec.value(x), spec.deriv(x), spec.deriv2(x)


@dataclass(frozen=True)
class WellDescriptor:
    """A well of -V: a strict local maximum of V and its bounding minima.

    ``omega_m`` is the small-oscillation frequency at the bottom of the
    inverted-potential well, sqrt(-V''(x_m)/M).  Edges are the adjacent local
    minima of V (or +-inf when the maximum is unbounded on one side, which
    cannot happen for the bounded-below families supported here).
    """

    x_m: float
    omega_m: float
    left_edge: float
    right_edge: float

    @property
    def width(self) -> float:
        return self.right_edge - self.left_edge

    def contains(self, x: float) -> bool:
        return self.left_edge < x < self.right_edge


def _refine_critical_point(spec, lo, hi):
    """Bisection for V' = 0 on a sign-changing bracket, to ~1e-12 relative."""
    flo = spec.deriv(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12 * max(1.0, abs(mid)):
            return mid
        fm = spec.deriv(mid)
        if fm == 0.0:
            return mid
        if (flo < 0.0) == (fm < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_points(spec: PotentialSpec, search_interval, n_scan: int = 4096) -> list[float]:
    """All roots of V' in the interval, located by sign-change scan + bisection."""
    lo, hi = float(search_interval[0]), float(search_interval[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"search interval must be finite with lo < hi, got {search_interval!r}")
    xs = np.linspace(lo, hi, int(n_scan))
    d = spec.deriv(xs)
    crits: list[float] = []
    for i in np.nonzero(d == 0.0)[0]:
        crits.append(float(xs[i]))
    for i in np.nonzero(d[:-1] * d[1:] < 0.0)[0]:
        crits.append(_refine_critical_point(spec, float(xs[i]), float(xs[i + 1])))
    crits.sort()
    merged: list[float] = []
    for c in crits:
        if not merged or c - merged[-1] > 1e-9 * max(1.0, abs(c)):
            merged.append(c)
    return merged


def find_wells(spec: PotentialSpec, search_interval, n_scan: int = 4096) -> list[WellDescriptor]:
    """Locate every well of -V (strict local maximum of V) in the interval.

    Raises DegenerateCriticalPoint when any critical point in the interval
    has |V''| below tolerance: the well frequency would be undefined.
    Potentials without an interior maximum (harmonic, convex quartics)
    yield an empty list.
    """
    xs = np.linspace(float(search_interval[0]), float(search_interval[1]), int(n_scan))
    scale = max(1.0, float(np.max(np.abs(spec.deriv2(xs)))))
    crits = critical_points(spec, search_interval, n_scan)
    kinds: list[str] = []
    for c in crits:
        v2 = spec.deriv2(c)
        if abs(v2) < DEGENERACY_RTOL * scale:
            raise DegenerateCriticalPoint(
                f"critical point x={c:.12g} has |V''|={abs(v2):.3g} below tolerance"
            )
        kinds.append("max" if v2 < 0.0 else "min")
    wells: list[WellDescriptor] = []
    mass = spec.units.mass
    for i, (c, kind) in enumerate(zip(crits, kinds)):
        if kind != "max":
            continue
        left = next((crits[j] for j in range(i - 1, -1, -1) if kinds[j] == "min"), -np.inf)
        right = next((crits[j] for j in range(i + 1, len(crits)) if kinds[j] == "min"), np.inf)
        omega_m = float(np.sqrt(-spec.deriv2(c) / mass))
        wells.append(WellDescriptor(x_m=c, omega_m=omega_m, left_edge=left, right_edge=right))
    return wells
