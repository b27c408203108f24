"""Unitary-gauge model pairs along a ray and their convergence measurements.

For stratum data (m, d) the scale-t model pair on the punctured disk is

    A_t   = a(r) diag(1,-1) (dz/z - dzbar/zbar),   a = (m-2d)/8 + r v_t'/4,
    phi_t = [[0, e_plus z^d], [e_minus z^{m-d}, 0]] dz,
    e_plus = r^{m/2-d} e^{v_t},   e_minus = r^{-(m/2-d)} e^{-v_t},

with v_t from :mod:`hitchlab.painleve`; at t = infinity the same formulas
with v = 0 give the decoupled pair.  The C0 distance between two pairs on an
annulus, measured against the Euclidean background and the standard frame, is

    sup_r |a1 - a2| (2/r) + |e+1 - e+2| r^d + |e-1 - e-2| r^{m-d},

and along a t-ladder the distance to the decoupled pair drops like
``exp(-rate * t)``; the fitted rate is compared with the boundary value
``4 r_min^{1+m/2} / (1 + m/2)`` coming from the exponential tail of the
profile at the innermost radius of the annulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from hitchlab import painleve
from hitchlab.errors import LabError, NumericalFailure
from hitchlab.painleve import Profile, PsiSolution, RadialGrid, rho_of

__all__ = [
    "AnnulusSpec",
    "UnitaryPair",
    "DecayFit",
    "StratumMismatch",
    "NonPositiveRate",
    "model_pair",
    "limiting_pair",
    "c0_distance",
    "hitchin_residual_radial",
    "decay_fit",
    "predicted_rate",
    "DEFAULT_T_LADDER",
]

DEFAULT_T_LADDER = (2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0)


class StratumMismatch(LabError):
    """Pairs carry different stratum data (m, d)."""


class NonPositiveRate(NumericalFailure):
    """Log-linear fit produced a non-positive decay rate."""


@dataclass(frozen=True)
class AnnulusSpec:
    """Compact annulus avoiding the zero, with sampling resolution."""

    r_min: float
    r_max: float
    n_radial: int = 201
    n_angular: int = 8

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise LabError("need 0 < r_min < r_max")

    def radii(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_radial)


@dataclass(frozen=True)
class UnitaryPair:
    """Radial coefficient data of a unitary-gauge pair at scale t (inf allowed)."""

    m: int
    d: int
    t: float
    psi: PsiSolution | None  # None when v vanishes identically (t = inf or m = 2d)

    def __post_init__(self):
        if self.m < 1 or not 0 <= 2 * self.d <= self.m:
            raise LabError(f"need m >= 1 and 0 <= 2d <= m, got ({self.m}, {self.d})")

    @property
    def half_exponent(self) -> Fraction:
        return Fraction(self.m, 2) - self.d

    def _rho_checked(self, r):
        rho = rho_of(self.t, r, self.m)
        lo, hi = np.min(rho), np.max(rho)
        if lo < self.psi.rho_min * (1 - 1e-12) or hi > self.psi.rho_max * (1 + 1e-12):
            raise NumericalFailure(
                f"evaluation needs the profile on [{lo:.3g}, {hi:.3g}], solved "
                f"window is [{self.psi.rho_min:.3g}, {self.psi.rho_max:.3g}]"
            )
        return rho

    def v(self, r):
        if self.psi is None:
            return np.zeros_like(np.asarray(r, dtype=float))
        return self.psi(self._rho_checked(r))

    def dv(self, r):
        if self.psi is None:
            return np.zeros_like(np.asarray(r, dtype=float))
        r = np.asarray(r, dtype=float)
        return 4.0 * self.t * r ** (0.5 * self.m) * self.psi.dpsi(self._rho_checked(r))

    def a(self, r):
        r = np.asarray(r, dtype=float)
        return (self.m - 2 * self.d) / 8.0 + 0.25 * r * self.dv(r)

    def e_plus(self, r):
        r = np.asarray(r, dtype=float)
        return r ** float(self.half_exponent) * np.exp(self.v(r))

    def e_minus(self, r):
        r = np.asarray(r, dtype=float)
        return r ** float(-self.half_exponent) * np.exp(-self.v(r))

    # -- exact bookkeeping ----------------------------------------------------

    def det_phi_exponent_identity(self) -> bool:
        """The full off-diagonal entries multiply to z^m exactly: the radial
        exponents cancel as rationals and exp(v) exp(-v) = 1 symbolically."""
        total = self.half_exponent + (-self.half_exponent) + self.d + (self.m - self.d)
        return total == self.m

    def tr_phi_sq_coefficient(self) -> float:
        """Coefficient of z^m dz^2 in tr(phi^2): exactly 2 for every scale."""
        return 2.0 if self.det_phi_exponent_identity() else float("nan")


def model_pair(t: float, m: int, d: int, grid: RadialGrid) -> UnitaryPair:
    """Scale-t model pair, with the profile solved over the grid's window."""
    a = painleve.boundary_coefficient(m, d)
    if a == 0.0:
        return UnitaryPair(m=m, d=d, t=float(t), psi=None)
    psi = painleve.psi_solution_for(
        a,
        rho_hi=float(rho_of(t, grid.r_max, m)),
        rho_lo=float(rho_of(t, grid.r_min, m)),
    )
    return UnitaryPair(m=m, d=d, t=float(t), psi=psi)


def limiting_pair(m: int, d: int, grid: RadialGrid | None = None) -> UnitaryPair:
    """The decoupled pair: constant connection coefficient (m-2d)/8, v = 0."""
    return UnitaryPair(m=m, d=d, t=math.inf, psi=None)


def c0_distance(p1: UnitaryPair, p2: UnitaryPair, K: AnnulusSpec) -> float:
    """C0 distance of two pairs over the annulus, Euclidean background."""
    if (p1.m, p1.d) != (p2.m, p2.d):
        raise StratumMismatch(f"({p1.m},{p1.d}) vs ({p2.m},{p2.d})")
    r = K.radii()
    m, d = p1.m, p1.d
    gap = (
        np.abs(p1.a(r) - p2.a(r)) * (2.0 / r)
        + np.abs(p1.e_plus(r) - p2.e_plus(r)) * r**d
        + np.abs(p1.e_minus(r) - p2.e_minus(r)) * r ** (m - d)
    )
    return float(np.max(gap))


def hitchin_residual_radial(
    t: float,
    m: int,
    d: int,
    window=(0.5, 1.0),
    psi: PsiSolution | None = None,
    profile_t: float | None = None,
) -> Profile:
    """Radial residual f = (v'' + v'/r)/4 - 2 t^2 r^m sinh(2v) on solver nodes.

    Evaluated with the solver's own discrete second-derivative operator at
    the radii that map onto the solver grid, so a converged profile leaves
    only the Newton tolerance (amplified by (1+m/2)^2 / (4 r^2)).  ``window``
    is a (r_lo, r_hi) pair or a :class:`RadialGrid`, whose bounds select the
    solver nodes.  Passing ``profile_t != t`` evaluates the t-equation on the
    t'-profile, which detects a mis-scaled substitution by a residual of
    order one.
    """
    a = painleve.boundary_coefficient(m, d)
    if isinstance(window, RadialGrid):
        r_lo, r_hi = window.r_min, window.r_max
    else:
        r_lo, r_hi = window
    t_prof = t if profile_t is None else profile_t
    if a == 0.0:
        grid = RadialGrid(np.linspace(r_lo, r_hi, 64))
        z = np.zeros(64)
        return Profile(grid=grid, values=z, derivs=z, a=0.0)
    if psi is None:
        psi = painleve.psi_solution_for(
            a, rho_hi=float(rho_of(t_prof, r_hi, m)), rho_lo=float(rho_of(t_prof, r_lo, m))
        )
    # nodes of the solve, restricted to the window through the t'-scale map
    s = psi.s
    h = s[1] - s[0]
    c = 4.0 * t_prof / (1.0 + 0.5 * m)
    r_nodes = (np.exp(s) / c) ** (1.0 / (0.5 * m + 1.0))
    keep = slice(1, len(s) - 1)
    mask = (r_nodes[keep] >= r_lo) & (r_nodes[keep] <= r_hi)
    if not np.any(mask):
        raise NumericalFailure("no solver nodes map into the requested window")
    d2s = (psi.psi[2:] - 2 * psi.psi[1:-1] + psi.psi[:-2]) / h**2
    r_sel = r_nodes[keep][mask]
    psi_sel = psi.psi[keep][mask]
    d2_sel = d2s[mask]
    # v'' + v'/r = (1+m/2)^2 psi_ss / r^2 for any profile scale
    f = 0.25 * (1.0 + 0.5 * m) ** 2 * d2_sel / r_sel**2 - 2.0 * t**2 * r_sel**m * np.sinh(
        2.0 * psi_sel
    )
    dval = 4.0 * t_prof * r_sel ** (0.5 * m) * psi.dpsi(rho_of(t_prof, r_sel, m))
    return Profile(grid=RadialGrid(r_sel), values=f, derivs=dval, a=a)


def predicted_rate(m: int, r_min: float) -> float:
    """Boundary decay-rate benchmark 4 r_min^{1+m/2} / (1 + m/2)."""
    return 4.0 * r_min ** (1.0 + 0.5 * m) / (1.0 + 0.5 * m)


@dataclass(frozen=True)
class DecayFit:
    """Log-linear fit of distances along a t-ladder."""

    m: int
    d: int
    t_values: tuple
    distances: tuple
    amplitude: float
    rate: float
    rate_predicted: float

    @property
    def relative_gap(self) -> float:
        return (self.rate - self.rate_predicted) / self.rate_predicted

    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.distances, self.distances[1:]))


def decay_fit(
    m: int,
    d: int,
    K: AnnulusSpec,
    t_list=DEFAULT_T_LADDER,
) -> DecayFit:
    """Fit C exp(-c t) to the C0 distance between scale-t and decoupled pairs."""
    t_arr = np.asarray(sorted(float(t) for t in t_list))
    if len(t_arr) < 5 or t_arr[-1] / t_arr[0] < 3.0:
        raise LabError("t-ladder needs >= 5 points spanning a factor >= 3")
    a = painleve.boundary_coefficient(m, d)
    if a == 0.0:
        raise NonPositiveRate("distances identically zero along a v = 0 ray (m = 2d)")
    grid = RadialGrid(np.array([K.r_min, K.r_max]))
    psi = painleve.psi_solution_for(
        a,
        rho_hi=float(rho_of(t_arr[-1], K.r_max, m)),
        rho_lo=float(rho_of(t_arr[0], K.r_min, m)),
    )
    inf_pair = limiting_pair(m, d, grid)
    dists = []
    for t in t_arr:
        pair = UnitaryPair(m=m, d=d, t=float(t), psi=psi)
        dists.append(c0_distance(pair, inf_pair, K))
    dists = np.asarray(dists)
    if np.any(dists <= 0.0):
        raise NonPositiveRate("vanishing distance in the ladder")
    slope, intercept = np.polyfit(t_arr, np.log(dists), 1)
    rate = -float(slope)
    if rate <= 0.0:
        raise NonPositiveRate(f"fitted rate {rate} is not positive")
    return DecayFit(
        m=m,
        d=d,
        t_values=tuple(t_arr),
        distances=tuple(float(x) for x in dists),
        amplitude=float(np.exp(intercept)),
        rate=rate,
        rate_predicted=predicted_rate(m, K.r_min),
    )
