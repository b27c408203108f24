"""Period integrals of sqrt(q), the base energy metric, and fibration norms.

Three groups of functionality:

``sqrtq_integrate``
    integrates the square root of a polynomial quadratic differential along a
    piecewise line/arc path, continuing the branch through the accumulated
    argument of q (never re-branching through a principal value), with
    adaptive Gauss-Legendre panels per segment.

``sk_energy`` / ``pullback_identity_check``
    the weighted Dirichlet-type energy (kappa/4) integral of |qdot|^2 / |q|
    over a disk, with polar refinement around each zero of q (dyadic panels
    plus an analytic closing estimate for the integrable power), and the
    same quantity recomputed on the double cover w^2 = z for a cross-check.

``period_matrix`` / ``horizontal_norm`` / ``vertical_norm`` / ``hodge_duality_check``
    numerical periods of the holomorphic basis x^j dx / y on y^2 = P(x) over
    declared cycles, validation of the Riemann relations, and the induced
    Hermitian Gram form used for the horizontal ((1,0)) and vertical ((0,1))
    norms and the conjugate-linear star duality between them.

Convention (used consistently by all three norm operations): the Hodge star
acts on a (1,0)-form by *dz = -i dz and on a (0,1)-form by *dzbar = i dzbar;
norms are integral(alpha wedge * conj(alpha)), so |dz|^2 integrates to twice
the Euclidean area.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from hitchlab.errors import LabError, NumericalFailure

__all__ = [
    "PolyQuadDiff",
    "DiskSpec",
    "LineSegment",
    "ArcSegment",
    "PathSpec",
    "IntegrationResult",
    "PeriodMatrix",
    "SkEnergyResult",
    "PullbackCheck",
    "PathHitsZero",
    "BranchAmbiguity",
    "NonIntegrableSingularity",
    "ZeroOnBoundary",
    "CycleCountMismatch",
    "RiemannRelationViolation",
    "DimensionMismatch",
    "ZeroInput",
    "sqrtq_integrate",
    "sk_energy",
    "pullback_identity_check",
    "period_matrix",
    "torus_period_matrix",
    "horizontal_norm",
    "vertical_norm",
    "duality_map_coefficients",
    "hodge_duality_check",
]


class PathHitsZero(LabError):
    """Integration path violates the declared clearance around a zero."""


class BranchAmbiguity(NumericalFailure):
    """Argument of q jumps by more than pi between samples even after splitting."""


class NonIntegrableSingularity(LabError):
    """2 ord_p(qdot) - ord_p(q) <= -2 at an interior zero."""


class ZeroOnBoundary(LabError):
    """A zero of q sits on the integration boundary circle."""


class CycleCountMismatch(LabError):
    """Number of cycles differs from twice the genus."""


class RiemannRelationViolation(NumericalFailure):
    """Periods violate symmetry/positivity of the normalized matrix."""


class DimensionMismatch(LabError):
    """Coefficient vector length differs from the genus."""


class ZeroInput(LabError):
    """The duality check needs a nonzero tangent vector."""


# --------------------------------------------------------------------------
# polynomials with located zeros
# --------------------------------------------------------------------------


def _polyval(coeffs, z):
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _polyder(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs) if k >= 1)


def _shift(coeffs, p):
    """Coefficients of q(z + p)."""
    out = [0j] * len(coeffs)
    for k, c in enumerate(coeffs):
        # expand c (z + p)^k
        binom = 1.0
        for j in range(k + 1):
            out[j] += c * binom * p ** (k - j)
            binom = binom * (k - j) / (j + 1)
    return tuple(out)


@dataclass(frozen=True)
class PolyQuadDiff:
    """Polynomial quadratic differential q(z) dz^2 with located zeros."""

    coeffs: tuple
    zeros: tuple  # ((location, multiplicity), ...)

    @classmethod
    def from_coeffs(cls, coeffs, zeros=None, cluster_tol=1e-5) -> "PolyQuadDiff":
        coeffs = [complex(c) for c in coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) == 1 and coeffs[0] == 0:
            raise LabError("the zero differential is not supported")
        if zeros is None:
            if len(coeffs) == 1:
                zeros = ()
            else:
                roots = np.roots(coeffs[::-1])
                scale = max(1.0, float(np.max(np.abs(roots))) if len(roots) else 1.0)
                groups: list[list[complex]] = []
                for r in sorted(roots, key=lambda w: (w.real, w.imag)):
                    for g in groups:
                        if abs(r - g[0]) < cluster_tol * scale:
                            g.append(r)
                            break
                    else:
                        groups.append([r])
                zeros = tuple((complex(np.mean(g)), len(g)) for g in groups)
        else:
            zeros = tuple((complex(p), int(m)) for p, m in zeros)
        q = cls(coeffs=tuple(coeffs), zeros=zeros)
        q._validate_zeros()
        return q

    def _validate_zeros(self):
        if sum(m for _, m in self.zeros) != self.degree:
            raise LabError("zero multiplicities do not sum to the degree")
        lead = self.coeffs[-1]
        probe = np.exp(2j * np.pi * np.arange(17) / 17) * (
            1.0 + max((abs(p) for p, _ in self.zeros), default=0.0)
        )
        recon = lead * np.ones_like(probe)
        for p, m in self.zeros:
            recon = recon * (probe - p) ** m
        direct = _polyval(self.coeffs, probe)
        scale = float(np.max(np.abs(direct))) + 1.0
        if float(np.max(np.abs(recon - direct))) > 1e-10 * scale:
            raise LabError("stated zeros do not reproduce the polynomial")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return _polyval(self.coeffs, z)

    def derivative_coeffs(self):
        return _polyder(self.coeffs)

    def ord_at(self, p: complex, tol: float = 1e-8) -> int:
        """Vanishing order at p (0 when q(p) != 0)."""
        coeffs = _shift(self.coeffs, p)
        scale = max(abs(c) for c in coeffs) + 1e-300
        for k, c in enumerate(coeffs):
            if abs(c) > tol * scale:
                return k
        return len(coeffs)

    def shifted(self, p: complex) -> tuple:
        return _shift(self.coeffs, p)


@dataclass(frozen=True)
class DiskSpec:
    """Integration domain: a closed disk in the z-chart."""

    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise LabError("disk radius must be positive")


# --------------------------------------------------------------------------
# paths and branch-tracked contour integration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LineSegment:
    z0: complex
    z1: complex

    def point(self, t):
        return self.z0 + (self.z1 - self.z0) * t

    def velocity(self, t):
        return (self.z1 - self.z0) * np.ones_like(np.asarray(t))

    def min_distance(self, p: complex) -> float:
        d = self.z1 - self.z0
        if d == 0:
            return abs(self.z0 - p)
        t = ((p - self.z0).real * d.real + (p - self.z0).imag * d.imag) / abs(d) ** 2
        t = min(max(t, 0.0), 1.0)
        return abs(self.z0 + d * t - p)


@dataclass(frozen=True)
class ArcSegment:
    center: complex
    radius: float
    theta0: float
    theta1: float  # may differ by any multiple of 2 pi (multiple loops)

    def point(self, t):
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return self.center + self.radius * np.exp(1j * th)

    def velocity(self, t):
        th = self.theta0 + (self.theta1 - self.theta0) * t
        return 1j * (self.theta1 - self.theta0) * self.radius * np.exp(1j * th)

    def min_distance(self, p: complex) -> float:
        # conservative: sampled distance (exact enough for clearance checks)
        ts = np.linspace(0.0, 1.0, 257)
        return float(np.min(np.abs(self.point(ts) - p)))


@dataclass(frozen=True)
class PathSpec:
    """Piecewise path with declared zero clearance and initial branch choice."""

    segments: tuple
    branch_sign: int = +1
    clearance: float = 1e-6

    def __post_init__(self):
        if not self.segments:
            raise LabError("path needs at least one segment")
        if self.branch_sign not in (+1, -1):
            raise LabError("branch sign must be +1 or -1")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(complex(a.point(1.0)) - complex(b.point(0.0))) > 1e-9:
                raise LabError("path segments are not contiguous")

    @classmethod
    def circle(cls, center: complex, radius: float, loops: int = 1, branch_sign: int = +1,
               clearance: float = 1e-6) -> "PathSpec":
        return cls(
            segments=(ArcSegment(center, radius, 0.0, 2.0 * math.pi * loops),),
            branch_sign=branch_sign,
            clearance=clearance,
        )

    @classmethod
    def polyline(cls, points, branch_sign: int = +1, clearance: float = 1e-6) -> "PathSpec":
        segs = tuple(LineSegment(complex(a), complex(b)) for a, b in zip(points, points[1:]))
        return cls(segments=segs, branch_sign=branch_sign, clearance=clearance)

    def start(self) -> complex:
        return complex(self.segments[0].point(0.0))

    def end(self) -> complex:
        return complex(self.segments[-1].point(1.0))

    def is_closed(self, tol: float = 1e-9) -> bool:
        return abs(self.start() - self.end()) < tol

    def reverse(self) -> "PathSpec":
        rev = []
        for seg in reversed(self.segments):
            if isinstance(seg, LineSegment):
                rev.append(LineSegment(seg.z1, seg.z0))
            else:
                rev.append(ArcSegment(seg.center, seg.radius, seg.theta1, seg.theta0))
        return PathSpec(segments=tuple(rev), branch_sign=self.branch_sign,
                        clearance=self.clearance)

    def check_clearance(self, zeros) -> None:
        for seg in self.segments:
            for p, _ in zeros:
                if seg.min_distance(p) < self.clearance:
                    raise PathHitsZero(
                        f"segment comes within {seg.min_distance(p):.3g} of the zero at {p}"
                    )


@dataclass(frozen=True)
class IntegrationResult:
    value: complex
    start_sqrt: complex
    end_sqrt: complex
    panels: int


_GL20_NODES, _GL20_WEIGHTS = np.polynomial.legendre.leggauss(10)


class _BranchWalker:
    """Continuous square root of q along an ordered point sequence."""

    def __init__(self, q_eval, z0: complex, initial_sqrt: complex | None, branch_sign: int):
        self.q = q_eval
        q0 = complex(q_eval(z0))
        if q0 == 0:
            raise PathHitsZero("path starts at a zero")
        if initial_sqrt is None:
            w0 = cmath.sqrt(q0) * branch_sign
        else:
            w0 = complex(initial_sqrt)
            if abs(w0 * w0 - q0) > 1e-8 * abs(q0):
                raise LabError("initial sqrt value does not square to q at the start point")
        self.q_prev = q0
        self.phase = w0 / abs(w0)
        self.start_sqrt = w0

    def advance(self, z: complex) -> complex:
        q_new = complex(self.q(z))
        if q_new == 0:
            raise PathHitsZero("path passes through a zero")
        dtheta = cmath.phase(q_new / self.q_prev)
        if abs(dtheta) > 0.5 * math.pi:
            raise BranchAmbiguity("argument step exceeds pi/2")
        self.phase *= cmath.exp(0.5j * dtheta)
        self.q_prev = q_new
        return math.sqrt(abs(q_new)) * self.phase

    def current_sqrt(self) -> complex:
        return math.sqrt(abs(self.q_prev)) * self.phase


def _integrate_segment(q_eval, seg, walker: _BranchWalker, n_panels: int) -> complex:
    total = 0j
    for k in range(n_panels):
        t_lo = k / n_panels
        t_hi = (k + 1) / n_panels
        mid = 0.5 * (t_lo + t_hi)
        half = 0.5 * (t_hi - t_lo)
        ts = mid + half * _GL20_NODES
        acc = 0j
        for t, w in zip(ts, _GL20_WEIGHTS):
            z = complex(seg.point(t))
            sq = walker.advance(z)
            acc += w * sq * complex(seg.velocity(t))
        walker.advance(complex(seg.point(t_hi)))
        total += half * acc
    return total


def sqrtq_integrate(
    q: PolyQuadDiff,
    path: PathSpec,
    tol: float = 1e-10,
    initial_sqrt: complex | None = None,
    max_doublings: int = 14,
) -> IntegrationResult:
    """Integral of sqrt(q) dz along the path with continuous branch tracking.

    The argument of q is accumulated step by step (auto-splitting until every
    step moves it by less than pi/2), so the square root never re-branches
    through a cut.  Panels per segment double until two successive refinement
    levels agree to ``tol`` relative.
    """
    path.check_clearance(q.zeros)

    def run(n_panels_per_seg):
        walker = _BranchWalker(q, path.start(), initial_sqrt, path.branch_sign)
        val = 0j
        for seg, n in zip(path.segments, n_panels_per_seg):
            val += _integrate_segment(q, seg, walker, n)
        return val, walker

    base = [4] * len(path.segments)
    prev_val = None
    for attempt in range(max_doublings):
        try:
            val, walker = run(base)
        except BranchAmbiguity:
            base = [2 * n for n in base]
            continue
        if prev_val is not None and abs(val - prev_val) <= tol * (1.0 + abs(val)):
            return IntegrationResult(
                value=val,
                start_sqrt=walker.start_sqrt,
                end_sqrt=walker.current_sqrt(),
                panels=sum(base),
            )
        prev_val = val
        base = [2 * n for n in base]
    raise BranchAmbiguity(
        "no branch-consistent refinement reached the tolerance "
        f"(last estimate {prev_val})"
    )


# --------------------------------------------------------------------------
# singular 2-D quadrature
# --------------------------------------------------------------------------

_GLR_NODES, _GLR_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _smoothstep(x):
    s = np.clip(x, 0.0, 1.0)
    return s**3 * (6.0 * s**2 - 15.0 * s + 10.0)


def _radial_panel_integral(fn, r_lo, r_hi, n_theta):
    """integral over [r_lo, r_hi] x [0, 2pi) of fn(z) r dr dtheta (z relative)."""
    mid = 0.5 * (r_lo + r_hi)
    half = 0.5 * (r_hi - r_lo)
    rs = mid + half * _GLR_NODES
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    zs = rs[:, None] * np.exp(1j * thetas)[None, :]
    vals = fn(zs)
    ang = np.mean(vals, axis=1) * 2.0 * np.pi
    return half * float(np.sum(_GLR_WEIGHTS * ang * rs))


def _disk_integral_centered(fn, r_max, power: float, n_theta=64, dyadic_depth=46,
                            breakpoints=()):
    """integral over |z| <= r_max of fn, where fn ~ |z|^power near 0 (power > -2).

    Dyadic radial panels toward the origin resolve the integrable power, and
    the ring below the last panel is closed with the analytic leading term.
    """
    pts = sorted(set([r_max] + [float(b) for b in breakpoints if 0 < b < r_max]))
    total = 0.0
    # smooth outer panels between breakpoints, capped in width
    lo = pts[0]
    for a, b in zip(pts[:-1], pts[1:]):
        n_sub = max(1, int(math.ceil((b - a) / (0.2 * r_max))))
        for k in range(n_sub):
            total += _radial_panel_integral(
                fn, a + (b - a) * k / n_sub, a + (b - a) * (k + 1) / n_sub, n_theta
            )
    # dyadic panels from the innermost breakpoint toward 0
    hi = lo
    for _ in range(dyadic_depth):
        total += _radial_panel_integral(fn, 0.5 * hi, hi, n_theta)
        hi *= 0.5
    # analytic closing ring: fn ~ c |z|^power
    thetas = np.exp(1j * np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False))
    c_lead = float(np.mean(np.real(fn(hi * thetas)))) / hi**power
    total += 2.0 * np.pi * c_lead * hi ** (power + 2.0) / (power + 2.0)
    return total


@dataclass(frozen=True)
class SkEnergyResult:
    value: float
    kappa: float
    refinement_delta: float
    zero_disks: tuple

    def __float__(self):
        return self.value


def _integrand_factory(q: PolyQuadDiff, qdot: PolyQuadDiff):
    def f(z):
        return np.abs(_polyval(qdot.coeffs, z)) ** 2 / np.abs(_polyval(q.coeffs, z))

    return f


def _interior_zero_data(q, qdot, domain, boundary_clearance=1e-9):
    interior = []
    for p, m in q.zeros:
        dist = abs(p - domain.center)
        if abs(dist - domain.radius) < boundary_clearance * max(1.0, domain.radius):
            raise ZeroOnBoundary(f"zero at {p} sits on the boundary circle")
        if dist < domain.radius:
            b = qdot.ord_at(p)
            if 2 * b - m <= -2:
                raise NonIntegrableSingularity(
                    f"2 ord(qdot) - ord(q) = {2 * b - m} <= -2 at the zero {p}"
                )
            interior.append((p, m, b))
    return interior


def _zero_disk_radii(q, interior, domain):
    radii = []
    others = [p for p, _ in q.zeros]
    for p, m, b in interior:
        r = min(0.1, 0.5 * (domain.radius - abs(p - domain.center)))
        for p2 in others:
            if p2 != p:
                r = min(r, 0.25 * abs(p2 - p))
        radii.append(r)
    return radii


def _sk_energy_raw(q, qdot, domain, n_theta=64, dyadic_depth=46):
    """Plain (kappa = 1, no prefactor) integral of |qdot|^2/|q| over the disk."""
    f = _integrand_factory(q, qdot)
    interior = _interior_zero_data(q, qdot, domain)
    radii = _zero_disk_radii(q, interior, domain)
    total = 0.0
    # per-zero disks with a smooth taper (plateau radius R_p, support 2 R_p)
    for (p, m, b), rp in zip(interior, radii):
        def inner(zz, p=p, rp=rp):
            r = np.abs(zz)
            taper = 1.0 - _smoothstep(r / rp - 1.0)
            return f(zz + p) * taper

        total += _disk_integral_centered(
            inner, 2.0 * rp, power=2 * b - m, n_theta=n_theta, dyadic_depth=dyadic_depth,
            breakpoints=(rp,),
        )

    # complement: the tapers kill the integrand smoothly near each zero
    def outer(zz):
        z_abs = zz + domain.center
        vals = f(z_abs)
        for (p, m, b), rp in zip(interior, radii):
            vals = vals * _smoothstep(np.abs(z_abs - p) / rp - 1.0)
        return vals

    # align radial panel edges with the radial extent of every taper region
    seams = []
    for (p, m, b), rp in zip(interior, radii):
        dist = abs(p - domain.center)
        if dist < 1e-14:
            seams += [rp, 2.0 * rp]
        else:
            seams += [max(dist - 2.0 * rp, 1e-12), dist, dist + 2.0 * rp]
    if interior:
        # the product of tapers vanishes identically inside the innermost
        # plateau only for centered zeros; elsewhere it is merely smooth
        def outer_fn(zz):
            return outer(zz)

        total += _disk_integral_centered(
            outer_fn, domain.radius, power=0.0, n_theta=n_theta,
            dyadic_depth=dyadic_depth, breakpoints=seams,
        )
    else:
        total += _disk_integral_centered(
            f if domain.center == 0 else (lambda zz: f(zz + domain.center)),
            domain.radius, power=0.0, n_theta=n_theta, dyadic_depth=dyadic_depth,
        )
    return total, tuple((p, rp) for (p, _, _), rp in zip(interior, radii))


def sk_energy(
    q: PolyQuadDiff,
    qdot: PolyQuadDiff,
    domain: DiskSpec = DiskSpec(),
    kappa: float = 1.0,
    n_theta: int = 64,
    refine: bool = True,
) -> SkEnergyResult:
    """Energy (kappa/4) integral of |qdot|^2 / |q| over the disk.

    Polar quadrature with dyadic refinement toward every interior zero;
    ``refinement_delta`` reports the relative change under doubling the
    angular resolution (the radial direction is already resolved to near
    machine accuracy by the dyadic panels).
    """
    if kappa <= 0:
        raise LabError("kappa must be positive")
    base, disks = _sk_energy_raw(q, qdot, domain, n_theta=n_theta)
    delta = 0.0
    value = base
    if refine:
        fine, _ = _sk_energy_raw(q, qdot, domain, n_theta=2 * n_theta)
        delta = abs(fine - base) / max(abs(fine), 1e-300)
        value = fine
    return SkEnergyResult(value=0.25 * kappa * value, kappa=kappa,
                          refinement_delta=delta, zero_disks=disks)


@dataclass(frozen=True)
class PullbackCheck:
    value_base: float
    value_cover: float
    chart: str

    @property
    def discrepancy(self) -> float:
        return abs(self.value_cover - self.value_base) / max(abs(self.value_base), 1e-300)


def pullback_identity_check(
    q: PolyQuadDiff,
    qdot: PolyQuadDiff,
    domain: DiskSpec = DiskSpec(),
    kappa: float = 1.0,
    n_theta: int = 96,
) -> PullbackCheck:
    """Cross-check of the disk energy against the double-cover computation.

    With one interior zero of odd order m at the center, the ramified chart
    w -> z = w^2 turns (kappa/2) sum over sheets of |pullback qdot / (2 omega)|^2
    into (kappa/2) integral over |w| <= sqrt(R) of |w|^2 |qdot(w^2)|^2 / |q(w^2)|,
    which must reproduce the base-side energy.  With no interior zero, or a
    single one of even order, the cover is two disjoint sheets and the factor
    (1/2) * 2 cancels; the result is flagged ``two_sheet``.
    """
    base = sk_energy(q, qdot, domain, kappa=kappa, n_theta=n_theta)
    interior = _interior_zero_data(q, qdot, domain)
    if len(interior) > 1:
        raise LabError("the cover chart check needs at most one interior zero")
    if interior and interior[0][1] % 2 == 1:
        p, m, b = interior[0]
        if abs(p - domain.center) > 1e-12:
            raise LabError("the ramified chart check needs the zero at the disk center")
        q_sh = q.shifted(p)
        qd_sh = qdot.shifted(p)

        def cover_integrand(ww):
            zz = ww * ww
            return (
                np.abs(ww) ** 2
                * np.abs(_polyval(qd_sh, zz)) ** 2
                / np.abs(_polyval(q_sh, zz))
            )

        # |w|^{2 + 4b - 2m} near the origin, integrable iff 2b - m > -2
        raw = _disk_integral_centered(
            cover_integrand,
            math.sqrt(domain.radius),
            power=2.0 + 4.0 * b - 2.0 * m,
            n_theta=n_theta,
        )
        cover = 0.5 * kappa * raw
        chart = "ramified"
    else:
        # two disjoint sheets, each contributing |qdot|^2 / (4 |q|)
        raw, _ = _sk_energy_raw(q, qdot, domain, n_theta=2 * n_theta)
        cover = 0.5 * kappa * 2.0 * raw / 4.0
        chart = "two_sheet_even" if interior else "two_sheet_smooth"
    return PullbackCheck(value_base=base.value, value_cover=cover, chart=chart)


# --------------------------------------------------------------------------
# hyperelliptic periods and fibration norms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodMatrix:
    """Periods of the basis x^j dx / y over declared A- and B-cycles.

    ``a_periods[j, i]`` is the integral of x^j dx / y over the i-th A-cycle
    (rows index basis forms), so the normalized matrix is
    ``tau = a_periods^{-1} b_periods``, symmetric with positive-definite
    imaginary part for an admissible symplectic cycle system.
    """

    genus: int
    a_periods: np.ndarray
    b_periods: np.ndarray

    @property
    def tau(self) -> np.ndarray:
        return np.linalg.solve(self.a_periods, self.b_periods)

    def validate_riemann(self, tol: float = 1e-6) -> None:
        tau = self.tau
        scale = float(np.max(np.abs(tau)))
        if float(np.max(np.abs(tau - tau.T))) > tol * max(scale, 1.0):
            raise RiemannRelationViolation(f"normalized periods not symmetric: {tau}")
        eig = np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T))
        if np.min(eig) <= 0:
            raise RiemannRelationViolation(
                f"imaginary part not positive definite (eigenvalues {eig})"
            )

    def gram(self) -> np.ndarray:
        """Hermitian positive form G[j,k] = i * integral(omega_j wedge conj(omega_k))."""
        A, B = self.a_periods, self.b_periods
        G = 1j * (A @ B.conj().T - B @ A.conj().T)
        G = 0.5 * (G + G.conj().T)
        if np.min(np.linalg.eigvalsh(G)) <= 0:
            raise RiemannRelationViolation("Gram form not positive definite")
        return G


def torus_period_matrix(tau: complex = 1j) -> PeriodMatrix:
    """Flat torus C / (Z + tau Z) with the basis form dz."""
    return PeriodMatrix(
        genus=1,
        a_periods=np.array([[1.0 + 0j]]),
        b_periods=np.array([[complex(tau)]]),
    )


def period_matrix(P, cycles, tol: float = 1e-11) -> PeriodMatrix:
    """Integrate the holomorphic basis x^j dx / y over the declared cycles.

    ``P`` is the square-free polynomial of y^2 = P(x) (ascending
    coefficients); the first half of ``cycles`` are the A-cycles, the second
    half the B-cycles.  Each cycle must be closed in the plane and return to
    its starting branch of y; the Riemann relations of the result are
    validated.
    """
    Pq = P if isinstance(P, PolyQuadDiff) else PolyQuadDiff.from_coeffs(P)
    roots = [p for p, m in Pq.zeros for _ in range(m)]
    if any(m > 1 for _, m in Pq.zeros):
        raise LabError("P must be square-free")
    deg = Pq.degree
    g = (deg - 1) // 2
    if g < 1:
        raise LabError("need degree >= 3")
    if len(cycles) != 2 * g:
        raise CycleCountMismatch(f"need {2 * g} cycles for genus {g}, got {len(cycles)}")
    periods = np.zeros((g, 2 * g), dtype=complex)
    for i, cyc in enumerate(cycles):
        if not cyc.is_closed():
            raise LabError(f"cycle {i} is not closed in the plane")
        for j in range(g):
            res = _integrate_form_over_cycle(Pq, cyc, j, tol)
            periods[j, i] = res.value
            if j == 0:
                if abs(res.end_sqrt - res.start_sqrt) > 1e-6 * abs(res.start_sqrt):
                    raise LabError(f"cycle {i} does not close on the surface (sheet flip)")
    pm = PeriodMatrix(genus=g, a_periods=periods[:, :g], b_periods=periods[:, g:])
    pm.validate_riemann()
    return pm


def _integrate_form_over_cycle(Pq: PolyQuadDiff, cyc: PathSpec, j: int, tol: float):
    """integral of x^j dx / y with y = tracked sqrt(P)."""
    cyc.check_clearance(Pq.zeros)

    def run(n_panels_per_seg):
        walker = _BranchWalker(Pq, cyc.start(), None, cyc.branch_sign)
        val = 0j
        for seg, n in zip(cyc.segments, n_panels_per_seg):
            for k in range(n):
                t_lo, t_hi = k / n, (k + 1) / n
                mid, half = 0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo)
                acc = 0j
                for t, w in zip(mid + half * _GL20_NODES, _GL20_WEIGHTS):
                    z = complex(seg.point(t))
                    y = walker.advance(z)
                    acc += w * z**j / y * complex(seg.velocity(t))
                walker.advance(complex(seg.point(t_hi)))
                val += half * acc
        return val, walker

    base = [8] * len(cyc.segments)
    prev = None
    for _ in range(14):
        try:
            val, walker = run(base)
        except BranchAmbiguity:
            base = [2 * n for n in base]
            continue
        if prev is not None and abs(val - prev) <= tol * (1.0 + abs(val)):
            return IntegrationResult(
                value=val, start_sqrt=walker.start_sqrt,
                end_sqrt=walker.current_sqrt(), panels=sum(base),
            )
        prev = val
        base = [2 * n for n in base]
    raise NumericalFailure(f"cycle integral did not converge (last {prev})")


def horizontal_norm(coefficients, periods: PeriodMatrix, kappa: float = 1.0) -> float:
    """Squared norm (kappa/2) integral |tau_dot|^2 of a (1,0) tangent vector.

    The vector is given by its coefficients in the basis underlying
    ``periods``; the integral is the Gram contraction from the Riemann
    bilinear relations.  On the unit torus the form dz has norm^2 = kappa.
    """
    c = np.asarray(coefficients, dtype=complex)
    if c.shape != (periods.genus,):
        raise DimensionMismatch(f"need {periods.genus} coefficients, got {c.shape}")
    G = periods.gram()
    return 0.5 * kappa * float(np.real(c.conj() @ G @ c))


def vertical_norm(coefficients, periods: PeriodMatrix, kappa: float = 1.0) -> float:
    """Squared norm 2/kappa integral |beta|^2 of a (0,1) vector in the conjugate basis."""
    d = np.asarray(coefficients, dtype=complex)
    if d.shape != (periods.genus,):
        raise DimensionMismatch(f"need {periods.genus} coefficients, got {d.shape}")
    G = periods.gram()
    return (2.0 / kappa) * float(np.real(d.conj() @ G @ d))


def duality_map_coefficients(coefficients, kappa: float = 1.0) -> np.ndarray:
    """Coefficients of F(tau_dot) = -(kappa/2) * conj-linear-star(tau_dot).

    With the star convention of this module the image of sum c_j omega_j is
    sum d_j conj(omega_j) with d_j = -(i kappa / 2) conj(c_j).
    """
    c = np.asarray(coefficients, dtype=complex)
    return -0.5j * kappa * np.conj(c)


def hodge_duality_check(coefficients, periods: PeriodMatrix, kappa: float = 1.0) -> float:
    """Relative gap |vertical(F tau_dot) - horizontal(tau_dot)| / horizontal."""
    c = np.asarray(coefficients, dtype=complex)
    if not np.any(c != 0):
        raise ZeroInput("duality check needs a nonzero vector")
    h = horizontal_norm(c, periods, kappa)
    v = vertical_norm(duality_map_coefficients(c, kappa), periods, kappa)
    return abs(v - h) / h
