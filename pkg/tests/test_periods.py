"""Branch-tracked contour integrals, disk energies, periods, fibration norms."""

import cmath
import math

import numpy as np
import pytest

from hitchlab import periods as pp
from hitchlab.periods import (
    ArcSegment,
    DiskSpec,
    LineSegment,
    PathSpec,
    PolyQuadDiff,
    hodge_duality_check,
    horizontal_norm,
    period_matrix,
    pullback_identity_check,
    sk_energy,
    sqrtq_integrate,
    torus_period_matrix,
    vertical_norm,
)


# ---------------------------------------------------------------- fixtures


def circle(center, radius, rev=False, loops=1):
    if rev:
        return PathSpec(segments=(ArcSegment(complex(center), radius, 2 * math.pi * loops, 0.0),))
    return PathSpec.circle(complex(center), radius, loops=loops)


@pytest.fixture(scope="module")
def square_curve_pm():
    # y^2 = x^3 - x: roots -1, 0, 1
    return period_matrix([0, -1, 0, 1], [circle(-0.5, 0.75), circle(0.5, 0.75)])


@pytest.fixture(scope="module")
def genus2_pm():
    # y^2 = x (x^2 - 1)(x^2 - 4): chain loops with the symplectic completion
    # a2 = loop(e1,e2) + loop(e3,e4), b2 = reversed loop(e4,e5)
    a1 = circle(-1.5, 0.75)
    a2 = PathSpec(
        segments=(
            ArcSegment(-1.5, 0.75, 0.0, 2 * math.pi),
            LineSegment(-0.75, -0.25),
            ArcSegment(0.5, 0.75, math.pi, 3 * math.pi),
            LineSegment(-0.25, -0.75),
        )
    )
    b1 = circle(-0.5, 0.75)
    b2 = circle(1.5, 0.75, rev=True)
    return period_matrix([0, 4, 0, -5, 0, 1], [a1, a2, b1, b2])


# ---------------------------------------------------------------- sqrt integration


def test_sqrtq_perfect_square():
    q = PolyQuadDiff.from_coeffs([0, 0, 1])  # z^2
    res = sqrtq_integrate(q, circle(0, 2.0))
    assert abs(res.value) < 1e-9  # contour integral of +-z


def test_sqrtq_residue_branch():
    # sqrt(z^2 - 1) = z - 1/(2z) + O(z^-3): residue -1/2 gives -pi i
    q = PolyQuadDiff.from_coeffs([-1, 0, 1])
    plus = sqrtq_integrate(q, circle(0, 2.0, loops=1))
    assert abs(plus.value - (-math.pi * 1j)) < 1e-8 or abs(plus.value - math.pi * 1j) < 1e-8
    minus = sqrtq_integrate(q, PathSpec(segments=circle(0, 2.0).segments, branch_sign=-1))
    assert abs(plus.value + minus.value) < 1e-9  # opposite branch negates


def test_sqrtq_double_loop_single_valued():
    # (2/3) z^{3/2} is single-valued after winding twice
    q = PolyQuadDiff.from_coeffs([0, 1])
    res = sqrtq_integrate(q, circle(0, 1.0, loops=2))
    assert abs(res.value) < 1e-9
    # sheet flips after an odd loop: endpoint sqrt negates
    one = sqrtq_integrate(q, circle(0, 1.0, loops=1))
    assert abs(one.end_sqrt + one.start_sqrt) < 1e-9


def test_sqrtq_reversal_negates():
    q = PolyQuadDiff.from_coeffs([-1, 0, 1])
    path = PathSpec.polyline([2.0, 2.0 + 1.0j, 1.0 + 2.0j])
    fwd = sqrtq_integrate(q, path)
    back = sqrtq_integrate(q, path.reverse(), initial_sqrt=fwd.end_sqrt)
    assert abs(back.value + fwd.value) < 1e-9
    assert abs(back.end_sqrt - fwd.start_sqrt) < 1e-9


def test_sqrtq_concatenation_additive():
    q = PolyQuadDiff.from_coeffs([-1, 0, 1])
    first = sqrtq_integrate(q, PathSpec.polyline([2.0, 3.0]))
    second = sqrtq_integrate(q, PathSpec.polyline([3.0, 3.0 + 1.0j]), initial_sqrt=first.end_sqrt)
    total = sqrtq_integrate(q, PathSpec.polyline([2.0, 3.0, 3.0 + 1.0j]))
    assert abs(total.value - (first.value + second.value)) < 1e-9


def test_sqrtq_contractible_loop():
    q = PolyQuadDiff.from_coeffs([-1, 0, 1])
    loop = PathSpec.polyline([3.0, 3.0 + 1.0j, 4.0 + 1.0j, 4.0, 3.0])
    assert abs(sqrtq_integrate(q, loop).value) < 1e-9


def test_sqrtq_clearance_guard():
    q = PolyQuadDiff.from_coeffs([-1, 0, 1])
    with pytest.raises(pp.PathHitsZero):
        sqrtq_integrate(q, PathSpec.polyline([0.0, 2.0]))  # runs through z = 1


def test_path_contiguity_guard():
    with pytest.raises(pp.LabError):
        PathSpec(segments=(LineSegment(0, 1), LineSegment(2, 3)))


def test_polyquaddiff_zero_validation():
    with pytest.raises(pp.LabError):
        PolyQuadDiff.from_coeffs([-1, 0, 1], zeros=((0.5, 1), (-0.5, 1)))
    q = PolyQuadDiff.from_coeffs([0, 0, 0, 2])  # 2 z^3
    assert q.zeros == ((0j, 3),)
    assert q.ord_at(0j) == 3 and q.ord_at(1.0 + 0j) == 0


# ---------------------------------------------------------------- disk energy


def test_sk_energy_constant():
    q = PolyQuadDiff.from_coeffs([1])
    qd = PolyQuadDiff.from_coeffs([1])
    res = sk_energy(q, qd)
    assert abs(res.value - math.pi / 4.0) < 1e-6


def test_sk_energy_simple_zero():
    q = PolyQuadDiff.from_coeffs([0, 1])
    qd = PolyQuadDiff.from_coeffs([1])
    res = sk_energy(q, qd)
    assert abs(res.value - math.pi / 2.0) < 1e-4 * (math.pi / 2.0)


def test_sk_energy_double_zero():
    q = PolyQuadDiff.from_coeffs([0, 0, 1])
    qd = PolyQuadDiff.from_coeffs([0, 1])
    res = sk_energy(q, qd)
    assert abs(res.value - math.pi / 4.0) < 1e-4 * (math.pi / 4.0)


def test_sk_energy_rotation_invariance():
    # rigid rotation z -> e^{-ia} w sends q(z) dz^2 to e^{-2ia} q(e^{-ia} w) dw^2,
    # i.e. multiplies the k-th coefficient by rot^{k+2}
    alpha = 0.7
    rot = cmath.exp(-1j * alpha)
    q = PolyQuadDiff.from_coeffs([0, 0, 1])
    qd = PolyQuadDiff.from_coeffs([0, 1, 1])
    q_rot = PolyQuadDiff.from_coeffs([0, 0, rot**4])
    qd_rot = PolyQuadDiff.from_coeffs([0, rot**3, rot**4])
    e1 = sk_energy(q, qd).value
    e2 = sk_energy(q_rot, qd_rot).value
    assert abs(e1 - e2) < 1e-8 * abs(e1)


def test_sk_energy_scaling_law():
    q = PolyQuadDiff.from_coeffs([0, 1])
    qd = PolyQuadDiff.from_coeffs([1, 0.5])
    lam, mu = 2.5 - 1.0j, 0.7 + 0.4j
    base = sk_energy(q, qd).value
    scaled = sk_energy(
        PolyQuadDiff.from_coeffs([0, mu]),
        PolyQuadDiff.from_coeffs([lam, 0.5 * lam]),
    ).value
    assert abs(scaled - base * abs(lam) ** 2 / abs(mu)) < 1e-6 * abs(base)


def test_sk_energy_kappa_prefactor():
    q = PolyQuadDiff.from_coeffs([0, 1])
    qd = PolyQuadDiff.from_coeffs([1])
    assert sk_energy(q, qd, kappa=3.0).value == pytest.approx(
        3.0 * sk_energy(q, qd, kappa=1.0).value, rel=1e-12
    )


def test_sk_energy_refinement_stable():
    q = PolyQuadDiff.from_coeffs([0, 1])
    qd = PolyQuadDiff.from_coeffs([1, 1])  # angular structure
    res = sk_energy(q, qd)
    assert res.refinement_delta < 1e-5


def test_sk_energy_nonintegrable_guard():
    q = PolyQuadDiff.from_coeffs([0, 0, 1])  # double zero
    qd = PolyQuadDiff.from_coeffs([1])  # 2*0 - 2 = -2: not integrable
    with pytest.raises(pp.NonIntegrableSingularity):
        sk_energy(q, qd)


def test_sk_energy_zero_on_boundary_guard():
    q = PolyQuadDiff.from_coeffs([-1, 0, 1])  # zeros at +-1 on the unit circle
    qd = PolyQuadDiff.from_coeffs([1])
    with pytest.raises(pp.ZeroOnBoundary):
        sk_energy(q, qd, DiskSpec(0j, 1.0))


def test_pullback_identity_simple_zero():
    check = pullback_identity_check(
        PolyQuadDiff.from_coeffs([0, 1]), PolyQuadDiff.from_coeffs([1])
    )
    assert check.chart == "ramified"
    assert check.discrepancy < 1e-6


def test_pullback_identity_no_zero():
    check = pullback_identity_check(
        PolyQuadDiff.from_coeffs([1]), PolyQuadDiff.from_coeffs([1])
    )
    assert check.chart == "two_sheet_smooth"
    assert check.discrepancy < 1e-6


def test_pullback_identity_order_three():
    check = pullback_identity_check(
        PolyQuadDiff.from_coeffs([0, 0, 0, 1]), PolyQuadDiff.from_coeffs([0, 1])
    )
    assert check.chart == "ramified"
    assert check.discrepancy < 1e-6


# ---------------------------------------------------------------- period matrices


def test_square_curve_lattice(square_curve_pm):
    tau = complex(square_curve_pm.tau[0, 0])
    assert abs(tau - 1j) < 1e-6


def test_hexagonal_curve_lattice():
    w = cmath.exp(2j * cmath.pi / 3)
    pm = period_matrix(
        [-1, 0, 0, 1],
        [
            circle(0.5 * (1 + w), 0.75 * abs(w - 1)),
            circle(0.5 * (w.conjugate() + 1), 0.75 * abs(1 - w.conjugate())),
        ],
    )
    tau = complex(pm.tau[0, 0])
    for _ in range(200):  # reduce to the fundamental domain
        tau -= round(tau.real)
        if abs(tau) < 1.0 - 1e-13:
            tau = -1.0 / tau
        else:
            break
    hex1 = cmath.exp(2j * cmath.pi / 3)
    hex2 = cmath.exp(1j * cmath.pi / 3)  # boundary twin of the same orbit point
    assert min(abs(tau - hex1), abs(tau - hex2)) < 1e-6


def test_genus2_riemann_relations(genus2_pm):
    tau = genus2_pm.tau
    assert tau.shape == (2, 2)
    assert float(np.max(np.abs(tau - tau.T))) < 1e-8 * float(np.max(np.abs(tau)))
    assert np.min(np.linalg.eigvalsh(tau.imag)) > 0
    G = genus2_pm.gram()
    assert np.min(np.linalg.eigvalsh(G)) > 0


def test_period_matrix_guards():
    with pytest.raises(pp.CycleCountMismatch):
        period_matrix([0, -1, 0, 1], [circle(-0.5, 0.75)])
    with pytest.raises(pp.LabError):
        period_matrix([0, 0, 1, 1], [circle(0, 0.5), circle(0, 0.6)])  # double root
    with pytest.raises(pp.RiemannRelationViolation):
        period_matrix([0, -1, 0, 1], [circle(-0.5, 0.75), circle(0.5, 0.75, rev=True)])


# ---------------------------------------------------------------- fibration norms


def torus_quadrature_norm(f_coeff, kind):
    """Oracle: direct Riemann-sum quadrature of the declared star convention
    on the fundamental square: |f dz|^2 or |f dzbar|^2 integrates 2|f|^2 dA."""
    n = 400
    xs = (np.arange(n) + 0.5) / n
    density = 2.0 * abs(f_coeff) ** 2 * np.ones((n, n))
    return float(np.sum(density)) / n**2


def test_horizontal_norm_torus():
    pm = torus_period_matrix(1j)
    oracle = 0.5 * 1.0 * torus_quadrature_norm(1.0, "dz")
    assert horizontal_norm([1.0], pm, kappa=1.0) == pytest.approx(oracle, abs=1e-12)
    assert horizontal_norm([1.0], pm, kappa=1.0) == pytest.approx(1.0, abs=1e-12)


def test_vertical_norm_torus():
    pm = torus_period_matrix(1j)
    oracle = 2.0 * torus_quadrature_norm(1.0, "dzbar")
    assert vertical_norm([1.0], pm, kappa=1.0) == pytest.approx(oracle, abs=1e-12)
    assert vertical_norm([1.0], pm, kappa=1.0) == pytest.approx(4.0, abs=1e-12)


def test_norms_zero_vector_and_scaling():
    pm = torus_period_matrix(1j)
    assert horizontal_norm([0.0], pm) == 0.0
    assert vertical_norm([0.0], pm) == 0.0
    c = 1.3 - 0.4j
    assert horizontal_norm([c], pm) == pytest.approx(abs(c) ** 2 * horizontal_norm([1.0], pm))
    # kappa scaling: horizontal ~ kappa, vertical ~ 1/kappa
    assert horizontal_norm([1.0], pm, kappa=2.0) == pytest.approx(2.0 * horizontal_norm([1.0], pm))
    assert vertical_norm([1.0], pm, kappa=2.0) == pytest.approx(0.5 * vertical_norm([1.0], pm))


def test_norm_dimension_guard(square_curve_pm):
    with pytest.raises(pp.DimensionMismatch):
        horizontal_norm([1.0, 2.0], square_curve_pm)
    with pytest.raises(pp.DimensionMismatch):
        vertical_norm([1.0, 2.0], square_curve_pm)


def test_duality_torus_any_kappa():
    pm = torus_period_matrix(1j)
    for kappa in (1.0, 2.0, 0.3):
        assert hodge_duality_check([1.0 + 0.5j], pm, kappa=kappa) < 1e-10


def test_duality_random_vectors(square_curve_pm, genus2_pm):
    rng = np.random.default_rng(31)
    for pm in (torus_period_matrix(0.3 + 1.7j), square_curve_pm, genus2_pm):
        g = pm.genus
        for _ in range(100):
            c = rng.standard_normal(g) + 1j * rng.standard_normal(g)
            assert hodge_duality_check(c, pm) < 1e-8


def test_duality_zero_input_guard(square_curve_pm):
    with pytest.raises(pp.ZeroInput):
        hodge_duality_check([0.0], square_curve_pm)
