"""Stratification combinatorics for rank-2 Hitchin fibers over genus-g surfaces.

A quadratic differential on a genus ``g >= 2`` surface has zero orders summing
to ``4g - 4``; the multiset of orders is a :class:`Partition`.  A Higgs field
with that determinant vanishes along a :class:`HiggsDivisor` bounded pointwise
by half the zero order.  This module computes, with exact integer arithmetic,
the dimensions of the base and fiber strata, the abelian (Prym) part, and the
shape of the non-abelian part of each fiber stratum, i.e. how many C* and C
factors of local modification parameters survive at each zero.

Two independent routes to the fiber shape are provided:

* :func:`fiber_shape` assembles the counts from the per-zero parameter spaces,
* :func:`hecke_param_oracle` enumerates the per-zero local moduli directly,

and the two are cross-checked exhaustively in the test-suite for g in {2, 3}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from hitchlab.errors import LabError

__all__ = [
    "Partition",
    "HiggsDivisor",
    "StratumShape",
    "BadGenus",
    "SumMismatch",
    "NonPositiveDimension",
    "IncompatibleDivisor",
    "StrictlySemistable",
    "OutOfRange",
    "validate_partition",
    "normalized_genus",
    "prym_dimension",
    "base_stratum_dimension",
    "fiber_stratum_dimension",
    "v_max",
    "compatible_divisors",
    "fiber_shape",
    "hecke_param_oracle",
    "hitchin_rank",
    "limiting_moduli_dimension",
    "all_partitions",
]


class BadGenus(LabError):
    """Genus below 2 is outside the supported range."""


class SumMismatch(LabError):
    """Zero orders do not sum to 4g - 4."""


class NonPositiveDimension(LabError):
    """A dimension formula evaluated to a non-positive value."""


class IncompatibleDivisor(LabError):
    """Higgs divisor exceeds floor(order/2) at some zero."""


class StrictlySemistable(LabError):
    """deg V = 2g - 2 with canonical divisor class: no stable points."""


class OutOfRange(LabError):
    """Argument outside its admissible integer range."""


@dataclass(frozen=True)
class Partition:
    """Zero-order data of a quadratic differential: genus and zero orders."""

    g: int
    orders: tuple[int, ...]

    @property
    def r_odd(self) -> int:
        return sum(1 for m in self.orders if m % 2 == 1)

    @property
    def r_even(self) -> int:
        return sum(1 for m in self.orders if m % 2 == 0)

    @property
    def n_zeros(self) -> int:
        return len(self.orders)


@dataclass(frozen=True)
class HiggsDivisor:
    """Per-zero vanishing orders of the Higgs field, aligned with Partition.orders."""

    values: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.values)


@dataclass(frozen=True)
class StratumShape:
    """Shape of one fiber stratum: (C*)^k1 x C^k2 over a prym_dim-dimensional torsor.

    ``k2_printed`` carries the closed-form count from the published dimension
    bookkeeping; it can disagree with the per-zero count ``k2`` (and can even
    be a half-integer).  The per-zero count is authoritative; both are kept so
    discrepancies stay visible.
    """

    k1: int
    k2: int
    prym_dim: int
    total_dim: int
    n_ss: int
    k2_printed: Fraction

    def __post_init__(self) -> None:
        if self.k1 + self.k2 + self.prym_dim != self.total_dim:
            raise LabError("stratum shape arithmetic violated")


def validate_partition(g: int, orders: list[int] | tuple[int, ...]) -> Partition:
    """Check genus and order data and build a :class:`Partition`.

    Raises :class:`BadGenus` for g < 2, :class:`SumMismatch` unless the
    orders sum to 4g - 4.  Orders must all be >= 1.
    """
    if g < 2:
        raise BadGenus(f"genus must be >= 2, got {g}")
    orders = tuple(int(m) for m in orders)
    if not orders or any(m < 1 for m in orders):
        raise OutOfRange(f"every zero order must be >= 1, got {orders}")
    if sum(orders) != 4 * g - 4:
        raise SumMismatch(f"sum(orders) = {sum(orders)} != 4g-4 = {4 * g - 4}")
    return Partition(g=g, orders=orders)


def normalized_genus(p: Partition) -> int:
    """Genus of the normalized double cover: 2g - 1 + r_odd/2."""
    return 2 * p.g - 1 + p.r_odd // 2


def prym_dimension(p: Partition) -> int:
    """Complex dimension of the Prym variety of the cover: g - 1 + r_odd/2."""
    return p.g - 1 + p.r_odd // 2


def base_stratum_dimension(p: Partition) -> tuple[int, bool]:
    """Dimension of the stratum of the space of quadratic differentials.

    Returns ``(r_even + r_odd - (g-1), unconditionally_smooth)`` where the
    flag is set when the number of zeros exceeds 2g - 2 (the stratum is then
    smooth everywhere, not just at generic points).
    """
    dim = p.r_even + p.r_odd - (p.g - 1)
    if dim <= 0:
        raise NonPositiveDimension(
            f"r_even + r_odd - (g-1) = {dim} <= 0 for orders {p.orders}"
        )
    return dim, p.r_even + p.r_odd > 2 * p.g - 2


def fiber_stratum_dimension(g: int, V: HiggsDivisor) -> int:
    """Dimension 3g - 3 - deg(V) of the fiber stratum with Higgs divisor V."""
    return 3 * g - 3 - V.degree


def v_max(p: Partition) -> HiggsDivisor:
    """Maximal Higgs divisor: floor(order/2) at every zero."""
    return HiggsDivisor(tuple(m // 2 for m in p.orders))


def _check_compatible(p: Partition, V: HiggsDivisor) -> None:
    if len(V.values) != len(p.orders):
        raise IncompatibleDivisor(
            f"divisor length {len(V.values)} != number of zeros {len(p.orders)}"
        )
    for m, v in zip(p.orders, V.values):
        if not 0 <= v <= m // 2:
            raise IncompatibleDivisor(f"need 0 <= v <= {m // 2} at a zero of order {m}, got {v}")


def compatible_divisors(p: Partition):
    """Yield every Higgs divisor compatible with the partition (exhaustive)."""
    ranges = [range(m // 2 + 1) for m in p.orders]
    for vals in product(*ranges):
        yield HiggsDivisor(vals)


def hecke_param_oracle(p: Partition, V: HiggsDivisor) -> list[tuple[bool, int]]:
    """Per-zero local moduli of sheaf modifications, straight from the normal forms.

    At a zero of order 2k+1 with divisor value v the modifications form C^(k-v);
    at a zero of order 2k they form C* x C^(k-v-1) unless v = k, where the
    modification is trivial.  Returns one ``(has_cstar, c_dim)`` pair per zero.
    """
    _check_compatible(p, V)
    shapes: list[tuple[bool, int]] = []
    for m, v in zip(p.orders, V.values):
        k = m // 2
        if m % 2 == 1:
            shapes.append((False, k - v))
        elif v == k:
            shapes.append((False, 0))
        else:
            shapes.append((True, k - v - 1))
    return shapes


def fiber_shape(p: Partition, V: HiggsDivisor) -> StratumShape:
    """Shape (C*)^k1 x C^k2 of the non-abelian part of the stratum over V.

    k1 counts even zeros that are not locally semisimple (v < order/2); k2 is
    the total count of additive parameters.  The dimension identity
    k1 + k2 + prym = 3g - 3 - deg V is enforced.  ``k2_printed`` records the
    closed-form expression 2g - 2 - deg(V)/2 - r_even + n_ss - r_odd/2 for
    comparison; it is reported, never used.
    """
    _check_compatible(p, V)
    n_ss = sum(1 for m, v in zip(p.orders, V.values) if m % 2 == 0 and v == m // 2)
    k1 = 0
    k2 = 0
    for m, v in zip(p.orders, V.values):
        k = m // 2
        if m % 2 == 1:
            k2 += k - v
        elif v < k:
            k1 += 1
            k2 += k - v - 1
    total = fiber_stratum_dimension(p.g, V)
    k2_printed = (
        Fraction(2 * p.g - 2)
        - Fraction(V.degree, 2)
        - p.r_even
        + n_ss
        - Fraction(p.r_odd, 2)
    )
    shape = StratumShape(
        k1=k1,
        k2=k2,
        prym_dim=prym_dimension(p),
        total_dim=total,
        n_ss=n_ss,
        k2_printed=k2_printed,
    )
    # cross-check against the direct per-zero enumeration
    oracle = hecke_param_oracle(p, V)
    if k1 != sum(1 for c, _ in oracle if c) or k2 != sum(n for _, n in oracle):
        raise LabError("fiber shape disagrees with per-zero enumeration")
    return shape


def hitchin_rank(g: int, deg_V: int, canonical_divisor_class: bool = False) -> int:
    """Rank of the fibration differential at a stable point with divisor degree deg_V.

    Equals 3g - 3 - deg_V below the top degree; at deg_V = 2g - 2 it is g - 1
    provided the divisor class is not canonical, otherwise the point is
    strictly semistable and :class:`StrictlySemistable` is raised.
    """
    if not 0 <= deg_V <= 2 * g - 2:
        raise OutOfRange(f"need 0 <= deg_V <= 2g-2 = {2 * g - 2}, got {deg_V}")
    if deg_V < 2 * g - 2:
        return 3 * g - 3 - deg_V
    if canonical_divisor_class:
        raise StrictlySemistable(
            "deg V = 2g-2 with canonical divisor class has no stable representative"
        )
    return g - 1


def limiting_moduli_dimension(
    g: int, k_zeros: int, r_even: int | None = None
) -> tuple[int, int | None]:
    """Real dimension k + 2g - 2 of the decoupled-solution moduli for fixed data.

    With the even/odd split supplied, also returns the excess of this count
    over the real Prym dimension 2g - 2 + r_odd, which is exactly ``r_even``
    (one extra weight parameter per even zero).
    """
    if k_zeros < 1:
        raise OutOfRange("need at least one zero")
    dim = k_zeros + 2 * g - 2
    if r_even is None:
        return dim, None
    if not 0 <= r_even <= k_zeros:
        raise OutOfRange(f"need 0 <= r_even <= k_zeros, got {r_even}")
    r_odd = k_zeros - r_even
    excess = dim - (2 * g - 2 + r_odd)
    return dim, excess


def all_partitions(g: int) -> list[Partition]:
    """All partitions of 4g - 4 into parts >= 1, in weakly decreasing order."""
    total = 4 * g - 4

    def gen(remaining: int, cap: int):
        if remaining == 0:
            yield ()
            return
        for first in range(min(cap, remaining), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return [Partition(g=g, orders=orders) for orders in gen(total, total)]
