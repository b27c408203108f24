"""Exact local algebra at a zero of a quadratic differential.

Near a zero of order ``n`` the local modification of a rank-2 Higgs pair is
coordinatized by a truncated polynomial ``u`` in ``C[z]/z^m`` with
``m = floor(n/2) - v``, where ``v`` is the local vanishing order of the Higgs
field.  This module implements that ring with exact rational-complex
coefficients (floating fallback), the chart transition ``u -> [u^{-1}]`` at
even zeros, the local matrix normal form of the Higgs field whose determinant
is ``-z^n`` on the nose, the singular local metrics of the decoupled limit,
and a finite-difference residual check that the fiducial local pair solves
the decoupled equations.

Coefficients stay exact whenever the inputs are integers, Fractions, or
:class:`QC` rational-complex numbers; any float or complex input switches the
computation to ordinary complex arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from hitchlab.errors import LabError

__all__ = [
    "QC",
    "TruncatedPoly",
    "LocalHiggsModel",
    "LocalMatrix",
    "ResidualTriple",
    "ModulusMismatch",
    "NotInvertible",
    "IncompatibleModulus",
    "ConstraintViolated",
    "OriginEvaluation",
    "GridTouchesOrigin",
    "trunc_mul",
    "trunc_inverse",
    "u_transition",
    "local_higgs",
    "limiting_metric",
    "is_locally_fiducial",
    "decoupled_residual",
]


class ModulusMismatch(LabError):
    """Operands live in truncated rings with different moduli."""


class NotInvertible(LabError):
    """Constant term vanishes: no inverse in C[z]/z^m."""


class IncompatibleModulus(LabError):
    """u-coordinate modulus does not match floor(n/2) - v."""


class ConstraintViolated(LabError):
    """Metric functions violate the pointwise determinant constraint."""


class OriginEvaluation(LabError):
    """The singular local metric cannot be evaluated at z = 0."""


class GridTouchesOrigin(LabError):
    """Finite-difference stencil would touch or cross z = 0."""


class QC:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        other = _as_qc(other)
        return QC(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = _as_qc(other)
        return QC(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return QC(-self.re, -self.im)

    def __mul__(self, other):
        other = _as_qc(other)
        return QC(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other):
        other = _as_qc(other)
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        return QC(
            (self.re * other.re + self.im * other.im) / den,
            (self.im * other.re - self.re * other.im) / den,
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _as_qc(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QC({self.re}, {self.im})"


def _as_qc(x) -> QC:
    if isinstance(x, QC):
        return x
    if isinstance(x, (int, Fraction)):
        return QC(x, 0)
    raise TypeError(f"cannot coerce {type(x).__name__} to exact rational-complex")


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QC))


def _lift(x):
    """Lift a scalar into the exact lane if possible, complex otherwise."""
    if isinstance(x, QC):
        return x
    if isinstance(x, (int, Fraction)):
        return QC(x, 0)
    return complex(x)


def _zero_like(exact: bool):
    return QC(0, 0) if exact else 0j


def _scalar_is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, QC) else x == 0


@dataclass(frozen=True)
class TruncatedPoly:
    """Element of C[z]/z^m: ``coeffs[j]`` multiplies z^j, length exactly m.

    ``m = 0`` is the zero ring whose only element is 0 (empty coefficient
    tuple).
    """

    m: int
    coeffs: tuple

    def __post_init__(self):
        if self.m < 0:
            raise LabError("modulus must be >= 0")
        if len(self.coeffs) != self.m:
            raise LabError(f"need exactly {self.m} coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_coeffs(cls, coeffs, m: int | None = None) -> "TruncatedPoly":
        coeffs = [_lift(c) for c in coeffs]
        if m is None:
            m = len(coeffs)
        if len(coeffs) > m:
            coeffs = coeffs[:m]
        exact = all(_is_exact(c) for c in coeffs)
        if not exact:
            coeffs = [complex(c) for c in coeffs]
        pad = _zero_like(exact)
        coeffs = coeffs + [pad] * (m - len(coeffs))
        return cls(m=m, coeffs=tuple(coeffs))

    @classmethod
    def zero(cls, m: int) -> "TruncatedPoly":
        return cls.from_coeffs([], m)

    @property
    def exact(self) -> bool:
        return all(isinstance(c, QC) for c in self.coeffs)

    def constant_term(self):
        return self.coeffs[0] if self.m > 0 else QC(0, 0)

    def is_zero(self) -> bool:
        return all(_scalar_is_zero(c) for c in self.coeffs)

    def as_complex(self) -> tuple[complex, ...]:
        return tuple(complex(c) for c in self.coeffs)

    def __add__(self, other: "TruncatedPoly") -> "TruncatedPoly":
        if self.m != other.m:
            raise ModulusMismatch(f"moduli differ: {self.m} vs {other.m}")
        return TruncatedPoly.from_coeffs(
            [a + b for a, b in _common_lane(self.coeffs, other.coeffs)], self.m
        )

    def __neg__(self) -> "TruncatedPoly":
        return TruncatedPoly.from_coeffs([-c for c in self.coeffs], self.m)


def _common_lane(a, b):
    exact = all(isinstance(c, QC) for c in a) and all(isinstance(c, QC) for c in b)
    if exact:
        return list(zip(a, b))
    return list(zip((complex(c) for c in a), (complex(c) for c in b)))


def trunc_mul(a: TruncatedPoly, b: TruncatedPoly) -> TruncatedPoly:
    """Product in C[z]/z^m.  Operands must share the modulus."""
    if a.m != b.m:
        raise ModulusMismatch(f"moduli differ: {a.m} vs {b.m}")
    m = a.m
    exact = a.exact and b.exact
    ac = a.coeffs if exact else a.as_complex()
    bc = b.coeffs if exact else b.as_complex()
    out = [_zero_like(exact) for _ in range(m)]
    for i, ai in enumerate(ac):
        if _scalar_is_zero(ai):
            continue
        for j in range(m - i):
            out[i + j] = out[i + j] + ai * bc[j]
    return TruncatedPoly.from_coeffs(out, m)


def trunc_inverse(a: TruncatedPoly) -> TruncatedPoly:
    """Two-sided inverse in C[z]/z^m; requires a(0) != 0."""
    if a.m == 0:
        raise NotInvertible("the zero ring has no invertible elements")
    c0 = a.constant_term()
    if _scalar_is_zero(c0):
        raise NotInvertible("constant term vanishes")
    exact = a.exact
    ac = a.coeffs if exact else a.as_complex()
    one = QC(1, 0) if exact else 1.0 + 0j
    b = [one / c0]
    for j in range(1, a.m):
        acc = _zero_like(exact)
        for i in range(1, j + 1):
            acc = acc + ac[i] * b[j - i]
        b.append(-(acc / c0))
    return TruncatedPoly.from_coeffs(b, a.m)


def u_transition(u_plus: TruncatedPoly) -> TruncatedPoly:
    """Chart change at an even zero: u -> [u^{-1}]; an involution where defined."""
    return trunc_inverse(u_plus)


@dataclass(frozen=True)
class LocalHiggsModel:
    """Local data at a zero of order n: divisor value v and u-coordinate.

    The u-coordinate lives in C[z]/z^m with m = floor(n/2) - v; ``sign``
    selects the chart at an even zero and is ignored for odd n.
    """

    n: int
    v: int
    u: TruncatedPoly
    sign: int = +1

    def __post_init__(self):
        if self.n < 1:
            raise LabError(f"zero order must be >= 1, got {self.n}")
        if not 0 <= self.v <= self.n // 2:
            raise LabError(f"need 0 <= v <= floor(n/2) = {self.n // 2}, got {self.v}")
        if self.u.m != self.n // 2 - self.v:
            raise IncompatibleModulus(
                f"u modulus {self.u.m} != floor(n/2) - v = {self.n // 2 - self.v}"
            )
        if self.sign not in (+1, -1):
            raise LabError("chart sign must be +1 or -1")

    def frame_descends(self) -> bool:
        """Even-chart frame condition u(0) != +-1 (vacuous at odd zeros)."""
        if self.n % 2 == 1:
            return True
        c0 = self.u.constant_term()
        return not (c0 == QC(1, 0) or c0 == QC(-1, 0) or c0 == 1 or c0 == -1)


class _Poly:
    """Exact dense polynomial used for the local matrix entries."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and _scalar_is_zero(coeffs[-1]):
            coeffs.pop()
        self.coeffs = coeffs

    @classmethod
    def monomial(cls, k: int, c=1, exact: bool = True):
        lead = _lift(c) if exact else complex(c)
        return cls([_zero_like(exact)] * k + [lead])

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return _Poly([x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return _Poly([-c for c in self.coeffs])

    def __mul__(self, other):
        if not self.coeffs or not other.coeffs:
            return _Poly([])
        exact = all(isinstance(c, QC) for c in self.coeffs + other.coeffs)
        out = [_zero_like(exact)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, ai in enumerate(self.coeffs):
            if _scalar_is_zero(ai):
                continue
            for j, bj in enumerate(other.coeffs):
                out[i + j] = out[i + j] + ai * bj
        return _Poly(out)

    def shift(self, k: int):
        """Multiply by z^k."""
        if not self.coeffs:
            return _Poly([])
        exact = all(isinstance(c, QC) for c in self.coeffs)
        return _Poly([_zero_like(exact)] * k + self.coeffs)

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def as_complex(self):
        return [complex(c) for c in self.coeffs]

    def __repr__(self):
        return f"_Poly({self.coeffs})"


@dataclass(frozen=True)
class LocalMatrix:
    """2x2 matrix of exact polynomials in z, carrying a formal dz factor."""

    entries: tuple  # ((p11, p12), (p21, p22))

    def det(self) -> _Poly:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def trace(self) -> _Poly:
        return self.entries[0][0] + self.entries[1][1]

    def evaluate(self, z: complex) -> np.ndarray:
        (a, b), (c, d) = self.entries
        return np.array([[a(z), b(z)], [c(z), d(z)]], dtype=complex)

    def det_is_minus_zn(self, n: int, tol: float = 1e-12) -> bool:
        """Check det == -z^n coefficientwise: exactly in the rational lane,
        within ``tol`` in the floating lane."""
        det = self.det()
        coeffs = det.coeffs
        if all(isinstance(c, QC) for c in coeffs):
            expected = [_zero_like(True)] * n + [QC(-1, 0)]
            if len(coeffs) != n + 1:
                return False
            return all(a == b for a, b in zip(coeffs, expected))
        cc = [complex(c) for c in coeffs]
        if len(cc) > n + 1:
            if any(abs(c) > tol for c in cc[n + 1 :]):
                return False
            cc = cc[: n + 1]
        cc = cc + [0j] * (n + 1 - len(cc))
        return all(
            abs(c - (-1 if j == n else 0)) <= tol for j, c in enumerate(cc)
        )


def local_higgs(model: LocalHiggsModel) -> LocalMatrix:
    """Local normal form of the Higgs field in the u-coordinate frame.

    For n = 2k+1 (odd, m = k - v)::

        [[ u z^{k+1},        z^{m+k+1}   ],
         [ z^{k-m} (1-u^2 z), -u z^{k+1} ]] dz

    and for n = 2k (even)::

        [[ u z^k,          z^{m+k} ],
         [ z^{k-m} (1-u^2), -u z^k ]] dz

    where u is the truncated representative expanded exactly; in both cases
    the determinant is -z^n as an identity of polynomial coefficients.
    """
    n, v = model.n, model.v
    k = n // 2
    m = k - v
    exact = model.u.exact
    u_poly = _Poly(list(model.u.coeffs))
    one = _Poly([QC(1, 0) if exact else 1.0 + 0j])
    u_sq = u_poly * u_poly
    if n % 2 == 1:
        p11 = u_poly.shift(k + 1)
        p12 = _Poly.monomial(m + k + 1, 1, exact)
        p21 = (one - u_sq.shift(1)).shift(k - m)
    else:
        p11 = u_poly.shift(k)
        p12 = _Poly.monomial(m + k, 1, exact)
        p21 = (one - u_sq).shift(k - m)
    return LocalMatrix(entries=((p11, p12), (p21, -p11)))


def is_locally_fiducial(model: LocalHiggsModel) -> bool:
    """True iff every local modification parameter vanishes (u = 0)."""
    return model.u.is_zero()


def _call_or_value(f, z):
    return f(z) if callable(f) else f


def limiting_metric(
    model: LocalHiggsModel,
    g1,
    g2,
    z: complex,
    constraint_tol: float = 1e-9,
) -> np.ndarray:
    """Singular Hermitian metric of the decoupled limit at the point z != 0.

    ``g1`` (real) and ``g2`` (complex for odd n, real for even n) may be
    values or callables of z; they must satisfy g1^2 - |g2|^2 |z| = 1 at odd
    zeros and g1^2 - g2^2 = 1 at even zeros, which forces det H = 1.
    """
    z = complex(z)
    if z == 0:
        raise OriginEvaluation("limiting metric is singular at z = 0")
    g1v = float(_call_or_value(g1, z))
    g2v = complex(_call_or_value(g2, z))
    n_p = model.n - 2 * model.v
    az = abs(z)
    if model.n % 2 == 1:
        if abs(g1v**2 - abs(g2v) ** 2 * az - 1.0) > constraint_tol:
            raise ConstraintViolated(
                f"g1^2 - |g2|^2 |z| = {g1v**2 - abs(g2v) ** 2 * az} != 1"
            )
        off = g2v * z ** ((1 - n_p) // 2) * az ** (n_p / 2.0)
    else:
        if abs(g2v.imag) > constraint_tol:
            raise ConstraintViolated("g2 must be real at an even zero")
        g2r = g2v.real
        if abs(g1v**2 - g2r**2 - 1.0) > constraint_tol:
            raise ConstraintViolated(f"g1^2 - g2^2 = {g1v**2 - g2r**2} != 1")
        off = g2r * z ** (-n_p // 2) * az ** (n_p / 2.0) if n_p % 2 == 0 else None
        if off is None:  # n even forces n_p even
            raise LabError("even order with odd n - 2v cannot happen")
    return np.array(
        [
            [g1v * az ** (n_p / 2.0), off],
            [np.conj(off), g1v * az ** (-n_p / 2.0)],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class ResidualTriple:
    """Sup norms of the three decoupled-equation residuals on a sample grid."""

    curvature: float
    commutator: float
    holomorphicity: float

    def max(self) -> float:
        return max(self.curvature, self.commutator, self.holomorphicity)


def _fiducial_phi(n: int, v: int, z: complex) -> np.ndarray:
    return np.array([[0, z**v], [z ** (n - v), 0]], dtype=complex)


def decoupled_residual(
    n: int,
    v: int,
    r_min: float,
    r_max: float,
    n_r: int = 8,
    n_theta: int = 8,
    step: float = 1e-3,
) -> ResidualTriple:
    """Finite-difference residuals of the decoupled equations for the fiducial pair.

    The pair is phi = [[0, z^v], [z^{n-v}, 0]] dz with the diagonal metric
    diag(r^{(n-2v)/2}, r^{-(n-2v)/2}).  All three equations hold exactly, so
    the returned sups are pure second-order discretization error in ``step``
    (the commutator is even zero pointwise).
    """
    if r_min - step * math.sqrt(2.0) <= 0:
        raise GridTouchesOrigin("stencil of the sample grid reaches z = 0")
    nu = (n - 2 * v) / 2.0
    rs = np.linspace(r_min, r_max, n_r)
    thetas = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    h = step

    def log_metric(z):
        return nu * math.log(abs(z))

    cur = 0.0
    com = 0.0
    hol = 0.0
    for r in rs:
        for th in thetas:
            z = r * cmath.exp(1j * th)
            # curvature: 5-point Laplacian of log h (F_A = dbar d log h)
            lap = (
                log_metric(z + h)
                + log_metric(z - h)
                + log_metric(z + 1j * h)
                - 4.0 * log_metric(z)
                + log_metric(z - 1j * h)
            ) / h**2
            cur = max(cur, 0.25 * abs(lap))
            # commutator of phi with its metric adjoint, pointwise
            phi = _fiducial_phi(n, v, z)
            H = np.diag([abs(z) ** nu, abs(z) ** (-nu)]).astype(complex)
            Hinv = np.diag([abs(z) ** (-nu), abs(z) ** nu]).astype(complex)
            phi_dag = Hinv @ phi.conj().T @ H
            com = max(com, np.linalg.norm(phi @ phi_dag - phi_dag @ phi))
            # holomorphicity: dbar of each polynomial entry
            for a in (v, n - v):
                f = lambda w: w**a
                dbar = 0.5 * (
                    (f(z + h) - f(z - h)) / (2 * h)
                    + 1j * (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
                )
                hol = max(hol, abs(dbar))
    return ResidualTriple(curvature=cur, commutator=com, holomorphicity=hol)
