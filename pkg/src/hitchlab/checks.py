"""Aggregated invariant suite: every module's structural properties in one run.

Each check re-verifies one documented invariant with fresh computations and
fixed seeds, returning pass/fail plus a one-line detail; the CLI ``check``
subcommand renders the table with per-check wall times.  The optional
``inject`` hook deliberately corrupts one ingredient (currently the
right-hand side of the radial solve) so the suite's sensitivity is itself
testable.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from hitchlab import glue, hecke, painleve, periods, rays, strata

__all__ = ["CheckResult", "check_suite", "CHECK_NAMES"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: str


def _check_strata_dimensions():
    for g in (2, 3):
        for p in strata.all_partitions(g):
            prym = strata.prym_dimension(p)
            for V in strata.compatible_divisors(p):
                s = strata.fiber_shape(p, V)
                if s.k1 + s.k2 + prym != 3 * g - 3 - V.degree:
                    return False, f"identity fails at {p.orders}, {V.values}"
                oracle = strata.hecke_param_oracle(p, V)
                if s.k1 != sum(1 for c, _ in oracle if c) or s.k2 != sum(n for _, n in oracle):
                    return False, f"oracle mismatch at {p.orders}, {V.values}"
            smax = strata.fiber_shape(p, strata.v_max(p))
            if (smax.k1, smax.k2) != (0, 0):
                return False, f"v_max stratum not abelian at {p.orders}"
            if p.r_odd % 2 != 0:
                return False, f"odd r_odd at {p.orders}"
            dim, excess = strata.limiting_moduli_dimension(g, p.n_zeros, r_even=p.r_even)
            if excess != p.r_even:
                return False, f"excess != r_even at {p.orders}"
    return True, "exhaustive over g in {2,3}"


def _check_hecke_determinant():
    rng = np.random.default_rng(42)
    count = 0
    for n in range(1, 10):
        for v in range(n // 2 + 1):
            m = n // 2 - v
            for _ in range(20):
                coeffs = (rng.standard_normal(m) + 1j * rng.standard_normal(m)).tolist()
                model = hecke.LocalHiggsModel(n=n, v=v, u=hecke.TruncatedPoly.from_coeffs(coeffs, m))
                if not hecke.local_higgs(model).det_is_minus_zn(n):
                    return False, f"det != -z^n at n={n}, v={v}"
                count += 1
    return True, f"{count} random local fields"


def _check_hecke_involution():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        m = int(rng.integers(1, 6))
        coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        coeffs[0] = 10.0 ** rng.uniform(-1, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        u = hecke.TruncatedPoly.from_coeffs(coeffs.tolist())
        inv = hecke.u_transition(u)
        back = hecke.u_transition(inv)
        err = float(np.max(np.abs(np.array(back.as_complex()) - coeffs)))
        scale = max(1.0, float(np.max(np.abs(np.array(inv.as_complex())))))
        worst = max(worst, err / scale)
    return worst < 1e-12, f"worst scaled round-trip {worst:.2e}"


def _check_hecke_metric():
    rng = np.random.default_rng(5)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        v = int(rng.integers(0, n // 2 + 1))
        model = hecke.LocalHiggsModel(n=n, v=v, u=hecke.TruncatedPoly.zero(n // 2 - v))
        z = rng.uniform(0.2, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        if n % 2 == 1:
            g2 = 0.5 * (rng.standard_normal() + 1j * rng.standard_normal())
            g1 = math.sqrt(1.0 + abs(g2) ** 2 * abs(z))
        else:
            g2 = rng.uniform(0.0, 2.0)
            g1 = math.sqrt(1.0 + g2**2)
        H = hecke.limiting_metric(model, g1, g2, z)
        if abs(np.linalg.det(H) - 1.0) > 1e-10:
            return False, f"det != 1 at n={n}, v={v}"
        # fiducial data is admissible: g1 = 1, g2 = 0 satisfies the constraint
        if hecke.is_locally_fiducial(model):
            hecke.limiting_metric(model, 1.0, 0.0, z)
    return True, "det = 1 on random admissible data"


def _check_psi_refinement():
    coarse = painleve.solve_psi(0.5, n_nodes=500)
    mid = painleve.solve_psi(0.5, n_nodes=999)
    fine = painleve.solve_psi(0.5, n_nodes=1997)
    probe = np.exp(np.linspace(math.log(1e-3), math.log(15.0), 40))
    ratio = float(
        np.max(np.abs(coarse(probe) - mid(probe))) / np.max(np.abs(mid(probe) - fine(probe)))
    )
    return 3.5 < ratio < 4.5, f"refinement ratio {ratio:.2f}"


def _check_psi_shape():
    for a in (0.1, 1.0 / 3.0, 0.5, 0.8):
        sol = painleve.psi_solution_for(a)
        if not (np.all(sol.psi[:-1] > 0) and np.all(np.diff(sol.psi[:-1]) < 0)):
            return False, f"not positive/decreasing at a={a}"
        rho = np.linspace(8.0, 15.0, 40)
        shape = np.log(sol(rho)) + rho + 0.5 * np.log(rho)
        if np.max(shape) - np.min(shape) > 0.1:
            return False, f"tail shape drifts at a={a}"
    return True, "positive, decreasing, exponential tail for four slopes"


def _check_psi_residual(rhs_scale=1.0):
    sol = painleve.solve_psi(0.5, rhs_scale=rhs_scale)
    res = sol.discrete_ode_residual()
    return res < 10 * sol.tol, f"reassembled residual {res:.2e}"


def _check_ray_distances():
    K = rays.AnnulusSpec(0.5, 1.0)
    for m, d in ((1, 0), (2, 0), (3, 1)):
        fit = rays.decay_fit(m, d, K)
        if not fit.strictly_decreasing():
            return False, f"distances not decreasing at (m,d)=({m},{d})"
        if fit.distances[-1] <= 0:
            return False, "vanishing distance"
    return True, "monotone decay along the default ladder"


def _check_ray_d_independence():
    K = rays.AnnulusSpec(0.5, 1.0)
    f0 = rays.decay_fit(3, 0, K)
    f1 = rays.decay_fit(3, 1, K)
    gap = abs(f0.rate - f1.rate) / f0.rate
    return gap < 0.04, f"rate gap between d=0 and d=1 at m=3: {gap:.3%}"


def _check_ray_exact_identities():
    grid = painleve.RadialGrid.log_spaced(0.25, 1.0, 16)
    for pair in (
        rays.model_pair(2.0, 1, 0, grid),
        rays.model_pair(5.0, 3, 1, grid),
        rays.limiting_pair(4, 1),
    ):
        if not pair.det_phi_exponent_identity():
            return False, "determinant exponent bookkeeping failed"
        if pair.tr_phi_sq_coefficient() != 2.0:
            return False, "trace identity failed"
    return True, "exponent bookkeeping exact for sampled pairs"


def _check_glue_support():
    for t, m, d in ((4.0, 1, 0), (9.0, 3, 0)):
        if glue.support_violation_max(t, m, d) != 0.0:
            return False, f"support leak outside r=1 at (m,d)=({m},{d})"
        inner = np.abs(glue.error_density(t, m, d, np.linspace(0.2, 0.5, 30)))
        if np.max(inner) > 100 * 1e-10:
            return False, f"inner region above tolerance at (m,d)=({m},{d})"
    return True, "support confined to the collar"


def _check_glue_matching():
    for r0 in (0.5, 1.0):
        eps = 1e-6
        hm = glue.approx_metric_entry(3.0, 1, 0, r0 - eps)
        h0 = glue.approx_metric_entry(3.0, 1, 0, r0)
        hp = glue.approx_metric_entry(3.0, 1, 0, r0 + eps)
        if abs((h0 - hm) / eps - (hp - h0) / eps) > 1e-4:
            return False, f"derivative jump at r={r0}"
    return True, "C1 matching at both junctions"


def _check_glue_monotone():
    sups = [glue.sup_collar_error(t, 1, 0) for t in rays.DEFAULT_T_LADDER]
    ok = all(b < a for a, b in zip(sups, sups[1:]))
    return ok, "sup-collar error strictly decreasing"


def _check_glue_consistency():
    prof = rays.hitchin_residual_radial(3.0, 1, 0, window=(0.2, 0.5))
    vals = glue.error_density(3.0, 1, 0, prof.grid.nodes)
    ok = np.array_equal(vals, prof.values)
    return ok, "error density equals the ray residual where chi = 1"


def _check_periods_branch():
    q = periods.PolyQuadDiff.from_coeffs([-1, 0, 1])
    path = periods.PathSpec.polyline([2.0, 2.0 + 1.0j, 1.0 + 2.0j])
    fwd = periods.sqrtq_integrate(q, path)
    back = periods.sqrtq_integrate(q, path.reverse(), initial_sqrt=fwd.end_sqrt)
    if abs(back.value + fwd.value) > 1e-9:
        return False, "reversal does not negate"
    loop = periods.PathSpec.polyline([3.0, 3.0 + 1.0j, 4.0 + 1.0j, 4.0, 3.0])
    if abs(periods.sqrtq_integrate(q, loop).value) > 1e-9:
        return False, "contractible loop integral nonzero"
    return True, "reversal and contractible-loop identities"


def _check_periods_energy():
    q = periods.PolyQuadDiff.from_coeffs([0, 1])
    qd = periods.PolyQuadDiff.from_coeffs([1])
    res = periods.sk_energy(q, qd)
    if abs(res.value - math.pi / 2) > 1e-4 * math.pi / 2:
        return False, f"unit-disk energy {res.value} != pi/2"
    if res.refinement_delta > 1e-5:
        return False, f"refinement delta {res.refinement_delta:.2e}"
    check = periods.pullback_identity_check(q, qd)
    if check.discrepancy > 1e-6:
        return False, f"cover identity discrepancy {check.discrepancy:.2e}"
    return True, "energy value, refinement, and cover identity"


def _check_periods_riemann():
    pm = periods.period_matrix(
        [0, -1, 0, 1],
        [periods.PathSpec.circle(-0.5, 0.75), periods.PathSpec.circle(0.5, 0.75)],
    )
    if abs(complex(pm.tau[0, 0]) - 1j) > 1e-6:
        return False, f"square-curve ratio {pm.tau[0, 0]}"
    rng = np.random.default_rng(31)
    for _ in range(100):
        c = rng.standard_normal(1) + 1j * rng.standard_normal(1)
        if periods.hodge_duality_check(c, pm) > 1e-8:
            return False, "duality identity violated"
    return True, "square-curve lattice and star duality"


def _check_cli_reproducible():
    # re-running the same report must byte-reproduce all numeric outputs
    import contextlib
    import io
    import tempfile
    from pathlib import Path

    from hitchlab import cli

    with tempfile.TemporaryDirectory() as tmp:
        d = Path(tmp) / "run"
        argv = ["psi", "--a", "0.25", "--outdir", str(d), "--no-plots"]
        with contextlib.redirect_stdout(io.StringIO()):
            rc1 = cli.main(argv)
        if rc1 != 0:
            return False, "psi run failed"
        first = {f.name: f.read_bytes() for f in d.iterdir()}
        with contextlib.redirect_stdout(io.StringIO()):
            rc2 = cli.main(argv)
        if rc2 != 0:
            return False, "psi re-run failed"
        second = {f.name: f.read_bytes() for f in d.iterdir()}
        same = first.keys() == second.keys() and all(first[k] == second[k] for k in first)
        return same, "all outputs byte-identical across re-runs"


CHECK_NAMES = {
    "strata.dimension_identities": _check_strata_dimensions,
    "hecke.determinant_exact": _check_hecke_determinant,
    "hecke.transition_involution": _check_hecke_involution,
    "hecke.limiting_metric_unimodular": _check_hecke_metric,
    "painleve.grid_refinement": _check_psi_refinement,
    "painleve.profile_shape": _check_psi_shape,
    "painleve.ode_residual": _check_psi_residual,
    "rays.distance_monotone": _check_ray_distances,
    "rays.rate_d_independent": _check_ray_d_independence,
    "rays.exact_identities": _check_ray_exact_identities,
    "glue.support_confinement": _check_glue_support,
    "glue.c1_matching": _check_glue_matching,
    "glue.sup_error_monotone": _check_glue_monotone,
    "glue.ray_consistency": _check_glue_consistency,
    "periods.branch_identities": _check_periods_branch,
    "periods.energy_quadrature": _check_periods_energy,
    "periods.riemann_duality": _check_periods_riemann,
    "cli.byte_reproducible": _check_cli_reproducible,
}


def check_suite(inject: dict | None = None) -> list[CheckResult]:
    """Run every registered invariant check; failures are data, not raises."""
    inject = inject or {}
    results = []
    for name, fn in CHECK_NAMES.items():
        t0 = time.perf_counter()
        try:
            if name == "painleve.ode_residual" and "psi_rhs_scale" in inject:
                ok, detail = fn(rhs_scale=float(inject["psi_rhs_scale"]))
            else:
                ok, detail = fn()
        except Exception as exc:  # a crash is a failure with the exception as detail
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(
            CheckResult(name=name, passed=bool(ok), seconds=time.perf_counter() - t0, detail=detail)
        )
    return results
