"""Radial sinh-type boundary-value problem for the model solution profile.

The rotationally symmetric model solution on a disk reduces the coupled PDE
system to a single radial ODE.  In the self-similar variable ``rho`` the
profile ``psi`` satisfies the Painleve-III-type equation

    psi'' + psi'/rho = sinh(2 psi) / 2,

with ``rho * psi' -> -a`` as ``rho -> 0`` (``a = (m - 2d)/(m + 2)``) and
decay at infinity, where it matches ``K_0(rho)/pi`` (amplitude asserted only
for a = 1/3; measured otherwise).  The two-point problem is solved with a
damped Newton iteration on a log-radial grid, where the ODE collapses to
``psi_ss = rho^2 sinh(2 psi) / 2`` and the left condition is the plain slope
``psi_s = -a``.

``v_profile`` and ``u_profiles`` perform the substitutions that turn the
universal profile into the scale-t model data: ``v_t(r) = psi(rho(t, r))``
with ``rho = 4 t r^{m/2+1} / (1 + m/2)``, ``u_inf = (m - 2d)/2 * log r`` and
``u_t = u_inf + v_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from hitchlab.errors import LabError, NumericalFailure

__all__ = [
    "RadialGrid",
    "Profile",
    "PsiSolution",
    "NonPositiveArgument",
    "NewtonDivergence",
    "NonMonotoneOutput",
    "k0",
    "rho_of",
    "solve_psi",
    "psi_solution_for",
    "v_profile",
    "u_profiles",
]

_EULER_GAMMA = 0.5772156649015328606


class NonPositiveArgument(LabError):
    """Macdonald function requires a strictly positive argument."""


class NewtonDivergence(NumericalFailure):
    """Damped Newton iteration failed to converge; carries the residual trace."""

    def __init__(self, message, trace):
        super().__init__(f"{message}; residual trace {trace}")
        self.trace = trace


class NonMonotoneOutput(NumericalFailure):
    """Converged profile violates positivity/monotonicity post-conditions."""


# --------------------------------------------------------------------------
# Macdonald function of order zero
# --------------------------------------------------------------------------


def _k0_series(x: float) -> float:
    # ascending series; superexponentially convergent, cancellation-safe for
    # small x
    q = 0.25 * x * x
    term = 1.0
    i0 = 1.0
    s = 0.0
    hk = 0.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        hk += 1.0 / k
        i0 += term
        s += term * hk
        if term * (hk + 1.0) < 1e-18 * (abs(s) + 1.0):
            break
        if k > 300:
            raise NumericalFailure("series for the Macdonald function stalled")
    return -(math.log(0.5 * x) + _EULER_GAMMA) * i0 + s


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _k0_integral(x: float) -> float:
    # exponentially scaled integral representation
    #   K0(x) = e^{-x} * int_0^T exp(-x (cosh t - 1)) dt  (+ tail < e^{-60})
    T = math.acosh(1.0 + 60.0 / x)
    n_panels = 24
    edges = np.linspace(0.0, T, n_panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        ts = mid + half * _GL_NODES
        total += half * float(np.sum(_GL_WEIGHTS * np.exp(-x * (np.cosh(ts) - 1.0))))
    return math.exp(-x) * total


def _k0_asymptotic(x: float) -> float:
    # divergent expansion truncated at the smallest term; below 1e-12 of the
    # sum once x >= 13
    s = 1.0
    term = 1.0
    k = 0
    while True:
        k += 1
        new = term * (-((2 * k - 1) ** 2)) / (8.0 * x * k)
        if abs(new) >= abs(term):
            break
        term = new
        s += term
        if abs(term) < 1e-17 * abs(s):
            break
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * s


def k0(x):
    """Modified Bessel function of the second kind, order zero.

    Relative accuracy better than 1e-10 on the full positive axis: ascending
    series for x <= 2, scaled integral representation on (2, 13), asymptotic
    expansion with the exponential prefactor beyond.  Accepts scalars or
    arrays.
    """
    if np.ndim(x) > 0:
        return np.array([k0(float(v)) for v in np.asarray(x).ravel()]).reshape(np.shape(x))
    x = float(x)
    if x <= 0:
        raise NonPositiveArgument(f"k0 requires x > 0, got {x}")
    if x <= 2.0:
        return _k0_series(x)
    if x < 13.0:
        return _k0_integral(x)
    return _k0_asymptotic(x)


# --------------------------------------------------------------------------
# grids and profiles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing positive sample radii."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise LabError("need a 1-D grid with at least two nodes")
        if nodes[0] <= 0 or np.any(np.diff(nodes) <= 0):
            raise LabError("grid nodes must be positive and strictly increasing")

    @classmethod
    def log_spaced(cls, lo: float, hi: float, n: int) -> "RadialGrid":
        return cls(np.exp(np.linspace(math.log(lo), math.log(hi), n)))

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])


@dataclass(frozen=True)
class Profile:
    """Sampled scalar function with derivative values on a radial grid."""

    grid: RadialGrid
    values: np.ndarray
    derivs: np.ndarray
    a: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "derivs", np.asarray(self.derivs, dtype=float))
        if len(self.values) != len(self.grid.nodes) or len(self.derivs) != len(self.grid.nodes):
            raise LabError("profile arrays must match the grid")

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


# --------------------------------------------------------------------------
# the two-point problem
# --------------------------------------------------------------------------


class PsiSolution:
    """Converged profile on a log grid with node data and smooth evaluators."""

    def __init__(self, a, s, psi, tol, residual, iterations, rhs_scale=1.0):
        self.a = float(a)
        self.s = s
        self.psi = psi
        self.tol = float(tol)
        self.residual = float(residual)
        self.iterations = int(iterations)
        self.rhs_scale = float(rhs_scale)
        self._spline = CubicSpline(s, psi)
        h = s[1] - s[0]
        dpsi_s = np.empty_like(psi)
        dpsi_s[1:-1] = (psi[2:] - psi[:-2]) / (2 * h)
        dpsi_s[0] = (-3 * psi[0] + 4 * psi[1] - psi[2]) / (2 * h)
        dpsi_s[-1] = (3 * psi[-1] - 4 * psi[-2] + psi[-3]) / (2 * h)
        self.psi_s = dpsi_s

    # -- grid views ---------------------------------------------------------

    @property
    def rho(self) -> np.ndarray:
        return np.exp(self.s)

    @property
    def rho_min(self) -> float:
        return float(math.exp(self.s[0]))

    @property
    def rho_max(self) -> float:
        return float(math.exp(self.s[-1]))

    def profile(self) -> Profile:
        rho = self.rho
        return Profile(grid=RadialGrid(rho), values=self.psi, derivs=self.psi_s / rho, a=self.a)

    # -- smooth evaluation --------------------------------------------------

    def __call__(self, rho):
        return self._spline(np.log(rho))

    def dpsi(self, rho):
        """d psi / d rho via the log-grid spline."""
        rho = np.asarray(rho, dtype=float)
        return self._spline(np.log(rho), 1) / rho

    def d2psi(self, rho):
        """Second derivative, through the ODE identity on the solved profile."""
        rho = np.asarray(rho, dtype=float)
        return 0.5 * np.sinh(2.0 * self(rho)) * self.rhs_scale - self.dpsi(rho) / rho

    # -- consistency checks -------------------------------------------------

    def discrete_ode_residual(self) -> float:
        """Sup of the unperturbed discrete operator on the stored values.

        Reassembled independently of the Newton loop; for an honest solve
        this is at the convergence tolerance, and a perturbed right-hand
        side (rhs_scale != 1) is flagged loudly.
        """
        h = self.s[1] - self.s[0]
        rho2 = np.exp(2.0 * self.s[1:-1])
        interior = (self.psi[2:] - 2 * self.psi[1:-1] + self.psi[:-2]) / h**2 - 0.5 * rho2 * np.sinh(
            2.0 * self.psi[1:-1]
        )
        robin = (-3 * self.psi[0] + 4 * self.psi[1] - self.psi[2]) / (2 * h) + self.a
        return max(float(np.max(np.abs(interior))), abs(robin), abs(self.psi[-1]))

    def interior_residual_nodes(self):
        """Interior residual values in the log variable (for scale transfers)."""
        h = self.s[1] - self.s[0]
        rho2 = np.exp(2.0 * self.s[1:-1])
        res = (self.psi[2:] - 2 * self.psi[1:-1] + self.psi[:-2]) / h**2 - 0.5 * rho2 * np.sinh(
            2.0 * self.psi[1:-1]
        ) * self.rhs_scale
        return self.s[1:-1], res


def solve_psi(
    a: float,
    rho_min: float = 1e-4,
    rho_max: float = 20.0,
    tol: float = 1e-10,
    n_nodes: int = 2000,
    max_iter: int = 80,
    rhs_scale: float = 1.0,
) -> PsiSolution:
    """Solve the two-point problem for psi on [rho_min, rho_max].

    Left end carries the slope condition ``rho psi' = -a`` (second-order
    one-sided), right end is ``psi = 0``.  Damped Newton from the initial
    guess ``a log(rho_max / rho)`` clamped at zero.  ``rhs_scale`` rescales
    the sinh right-hand side and exists for fault-injection checks only.
    """
    if not 0.0 <= a < 1.0:
        raise LabError(f"boundary coefficient must satisfy 0 <= a < 1, got {a}")
    if rho_min > 1e-3 or rho_max < 15.0:
        raise LabError("need rho_min <= 1e-3 and rho_max >= 15")
    s = np.linspace(math.log(rho_min), math.log(rho_max), n_nodes)
    h = s[1] - s[0]
    rho2 = np.exp(2.0 * s)
    psi = np.maximum(a * (s[-1] - s), 0.0)

    def residual(p):
        F = np.empty_like(p)
        F[0] = (-3 * p[0] + 4 * p[1] - p[2]) / (2 * h) + a
        F[1:-1] = (p[2:] - 2 * p[1:-1] + p[:-2]) / h**2 - 0.5 * rho2[1:-1] * np.sinh(
            2.0 * p[1:-1]
        ) * rhs_scale
        F[-1] = p[-1]
        return F

    n = n_nodes
    trace = []
    for it in range(max_iter):
        F = residual(psi)
        norm = float(np.max(np.abs(F)))
        trace.append(norm)
        if norm < tol:
            return PsiSolution(a, s, _postcheck(a, psi), tol, norm, it, rhs_scale)
        # banded Jacobian, bandwidths (1, 2): the Robin row has three entries
        ab = np.zeros((4, n))
        ab[0, 2] = -1.0 / (2 * h)
        ab[1, 1] = 4.0 / (2 * h)
        ab[1, 2:] = 1.0 / h**2
        ab[2, 0] = -3.0 / (2 * h)
        ab[2, 1:-1] = -2.0 / h**2 - rho2[1:-1] * np.cosh(2.0 * psi[1:-1]) * rhs_scale
        ab[2, -1] = 1.0
        ab[3, 0:-2] = 1.0 / h**2
        step = solve_banded((1, 2), ab, -F)
        lam = 1.0
        while lam > 1e-10:
            cand = psi + lam * step
            if float(np.max(np.abs(residual(cand)))) < norm:
                break
            lam *= 0.5
        else:
            raise NewtonDivergence("line search stalled", trace)
        psi = psi + lam * step
    raise NewtonDivergence(f"no convergence in {max_iter} iterations", trace)


# Below this amplitude the discrete tail carries attenuated linear-solve
# noise rather than solution (observed noise onsets sit at 2e-32 and below
# across slopes and windows, while every quantity the package consumes lives
# above ~1e-14): the stored profile is truncated to exact zero there and the
# shape conditions apply to the certified prefix.
_TAIL_FLOOR = 1e-30


def _postcheck(a: float, psi: np.ndarray) -> np.ndarray:
    if a == 0.0:
        return psi
    meaningful = psi > _TAIL_FLOOR
    cut = int(np.argmin(meaningful)) if not meaningful.all() else len(psi)
    head = psi[: max(cut, 2)]
    if np.any(head[:-1] <= 0):
        raise NonMonotoneOutput("profile not strictly positive in the interior")
    if np.any(np.diff(head[:-1]) >= 0):
        raise NonMonotoneOutput("profile not strictly decreasing")
    if cut < len(psi):
        psi = psi.copy()
        psi[cut:] = 0.0
    return psi


# --------------------------------------------------------------------------
# substitutions to scale-t model profiles
# --------------------------------------------------------------------------


def rho_of(t: float, r, m: int):
    """Self-similar variable rho = 4 t r^{m/2+1} / (1 + m/2)."""
    r = np.asarray(r, dtype=float) if np.ndim(r) else float(r)
    return 4.0 * t * r ** (0.5 * m + 1.0) / (1.0 + 0.5 * m)


_PSI_CACHE: dict = {}


def _bucket_rho_max(needed: float) -> float:
    out = 20.0
    while out < needed:
        out *= 2.0
    return out


def _bucket_rho_min(needed: float) -> float:
    out = 1e-4
    while out > needed:
        out *= 0.1
    return out


def psi_solution_for(
    a: float,
    rho_hi: float = 20.0,
    rho_lo: float = 1e-4,
    tol: float = 1e-10,
    base_nodes: int = 2000,
) -> PsiSolution:
    """Cached solve whose window covers [rho_lo, rho_hi].

    Both ends are bucketed (powers of two above 20, decades below 1e-4) so
    that runs along a t-ladder share one solve; node count scales with the
    log-window so the mesh width is ladder-independent.
    """
    rho_max = _bucket_rho_max(max(20.0, 1.05 * rho_hi))
    rho_min = _bucket_rho_min(min(1e-4, rho_lo))
    span0 = math.log(20.0 / 1e-4)
    n = int(round(base_nodes * math.log(rho_max / rho_min) / span0))
    key = (round(float(a), 15), rho_min, rho_max, n, tol)
    if key not in _PSI_CACHE:
        _PSI_CACHE[key] = solve_psi(a, rho_min=rho_min, rho_max=rho_max, tol=tol, n_nodes=n)
    return _PSI_CACHE[key]


def boundary_coefficient(m: int, d: int) -> float:
    if m < 1 or d < 0 or 2 * d > m:
        raise LabError(f"need m >= 1 and 0 <= 2d <= m, got m={m}, d={d}")
    return (m - 2 * d) / (m + 2)


def v_profile(
    t: float,
    m: int,
    d: int,
    r_grid: RadialGrid,
    psi: PsiSolution | None = None,
) -> Profile:
    """Model profile v_t(r) = psi(rho(t, r)) with its chain-rule derivative."""
    a = boundary_coefficient(m, d)
    r = r_grid.nodes
    if a == 0.0:
        return Profile(grid=r_grid, values=np.zeros_like(r), derivs=np.zeros_like(r), a=0.0)
    if psi is None:
        psi = psi_solution_for(a, rho_hi=float(rho_of(t, r_grid.r_max, m)),
                               rho_lo=float(rho_of(t, r_grid.r_min, m)))
    rho = rho_of(t, r, m)
    if rho[-1] > psi.rho_max * (1 + 1e-12) or rho[0] < psi.rho_min * (1 - 1e-12):
        raise NumericalFailure(
            f"profile window [{rho[0]:.3g}, {rho[-1]:.3g}] outside the solved "
            f"range [{psi.rho_min:.3g}, {psi.rho_max:.3g}]"
        )
    values = psi(rho)
    derivs = 4.0 * t * r ** (0.5 * m) * psi.dpsi(rho)
    return Profile(grid=r_grid, values=values, derivs=derivs, a=a)


def u_profiles(
    t: float,
    m: int,
    d: int,
    r_grid: RadialGrid,
    psi: PsiSolution | None = None,
) -> tuple[Profile, Profile]:
    """The pair (u_t, u_inf): u_inf = (m-2d)/2 log r and u_t = u_inf + v_t."""
    v = v_profile(t, m, d, r_grid, psi=psi)
    r = r_grid.nodes
    half = 0.5 * (m - 2 * d)
    u_inf = Profile(grid=r_grid, values=half * np.log(r), derivs=half / r, a=v.a)
    u_t = Profile(grid=r_grid, values=u_inf.values + v.values, derivs=u_inf.derivs + v.derivs, a=v.a)
    return u_t, u_inf
