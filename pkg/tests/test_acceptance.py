"""One check per acceptance criterion; each prints a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` or as a script.
"""

import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from realsft import cotangent, energy, holcurve, mobius, orbits, quadric


def report(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_gw_line_count():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    counts, worst = [], 0.0
    for n in (3, 4):
        for _ in range(20):
            q, p, dec = quadric.random_configuration(n, rng)
            lines = quadric.enumerate_lines(q, p, dec)
            counts.append(len(lines))
            for line in lines:
                through_p = quadric.plane_distance(line.frame[:1], p.coords[None])
                on_cycle = np.linalg.norm(dec.cycle.projector() @ line.q.coords - line.q.coords)
                worst = max(worst, *line.residuals(), through_p, on_cycle)
    elapsed = time.perf_counter() - start
    ok = all(c == 1 for c in counts) and worst < 1e-8 and elapsed < 5.0
    report("GW line count", ok, f"{len(counts)} configurations, counts={sorted(set(counts))}, residual={worst:.1e}, {elapsed:.2f}s")


def test_involution_classification():
    rng = np.random.default_rng(2)
    grid = mobius.sphere_grid()
    failures, worst_sq, min_disp = 0, 0.0, np.inf
    for sheet, expected in ((mobius.Sheet.PLUS, mobius.InvolutionClass.TYPE_I), (mobius.Sheet.MINUS, mobius.InvolutionClass.TYPE_II)):
        for x in mobius.sample_hyperboloid(sheet, rng, 1000):
            m = mobius.embed_hyperboloid(sheet, x)
            failures += mobius.classify_pair(m) is not expected
            worst_sq = max(worst_sq, mobius.square_residual(m))
            if expected is mobius.InvolutionClass.TYPE_II:
                min_disp = min(min_disp, mobius.min_displacement(mobius.AntiInvolution(m), grid))
    ok = failures == 0 and worst_sq < 1e-10 and min_disp > 1e-2
    report("Involution classification", ok, f"2000 samples, failures={failures}, square residual={worst_sq:.1e}, type II grid min={min_disp:.3f}")


def test_conjugator_property():
    rng = np.random.default_rng(3)
    conj = holcurve.AmbientInvolution.conjugation(4)
    base = holcurve.RationalLineMap(quadric.Quadric(np.diag([1.0, 1.0, -1.0, -1.0])), [[1, 0, 1, 0], [0, 1, 0, 1]])
    worst, wrong = 0.0, 0
    for _ in range(100):
        u = holcurve.manufacture_pseudo_fixed(base, holcurve.random_mobius(rng))
        res = holcurve.detect_pseudo_fixed(u, conj)
        wrong += res.status is not holcurve.PseudoFixStatus.PSEUDO_FIXED
        worst = max(worst, holcurve.fixed_residual(holcurve.normalize_to_fixed(u, res, conj), conj))
    report("Conjugator property", wrong == 0 and worst < 1e-8, f"100 manufactured lines, sup residual={worst:.1e}")


def _pseudo_fixed_corpus():
    """Pseudo-fixed lines for several real structures, with their invariant hyperplanes."""
    rng = np.random.default_rng(4)
    cases = [
        (3, [1, 1, 1, -1, -1]),
        (3, [1, 1, -1, -1, -1]),
        (4, [1, 1, 1, 1, -1, -1]),
        (4, [1, 1, 1, -1, -1, -1]),
    ]
    for k, (n, signs) in enumerate(cases):
        q = quadric.Quadric.standard(n)
        rho = holcurve.AmbientInvolution.diagonal(signs)
        hyperplanes = [h for h in np.eye(n + 2)] + [np.eye(n + 2)[0] + np.eye(n + 2)[1]]
        hyperplanes = [h for h in hyperplanes if rho.preserves_hyperplane(h)]
        for u in holcurve.search_invariant_lines(q, rho, count=10, seed=100 + k):
            yield u, rho, hyperplanes
            yield u.reparametrize(holcurve.random_mobius(rng)), rho, hyperplanes


def test_pseudo_fixed_type_one_property():
    examined, counterexamples = 0, 0
    for u, rho, hyperplanes in _pseudo_fixed_corpus():
        res = holcurve.detect_pseudo_fixed(u, rho)
        if res.status is holcurve.PseudoFixStatus.NOT_PSEUDO_FIXED:
            continue
        for h in hyperplanes:
            try:
                count = holcurve.count_sigma_intersections(u, h)
            except holcurve.ContainedInSigma:
                continue
            if count == 1:
                examined += 1
                counterexamples += res.cls is not mobius.InvolutionClass.TYPE_I
    ok = examined > 0 and counterexamples == 0
    report("Pseudo-fixed lines with one Sigma point are type I", ok, f"{examined} cases, counterexamples={counterexamples}")


def test_symplectomorphism():
    rng = np.random.default_rng(5)
    trip, pull = 0.0, 0.0
    for _ in range(100):
        z = cotangent.random_affine_point(2, rng, spread=2.0)
        back = cotangent.cotangent_to_quadric(cotangent.quadric_to_cotangent(z))
        trip = max(trip, np.abs(back.z - z.z).max() / max(1.0, np.abs(z.z).max()))
        resid, scale = cotangent.pullback_residual(z, cotangent.random_tangent_vector(z, rng), cotangent.random_tangent_vector(z, rng))
        pull = max(pull, resid / scale)
    report("Symplectomorphism", trip < 1e-12 and pull < 1e-6, f"round trip={trip:.1e}, scaled pullback residual={pull:.1e}")


def test_geodesic_symmetric_orbits():
    sys_ = orbits.geodesic_system()
    worst_t, worst_res, slowest, meridian = 0.0, 0.0, 0.0, True
    for theta in np.linspace(0.0, 2 * np.pi, 10, endpoint=False) + 0.05:
        start = time.perf_counter()
        orb = orbits.find_symmetric_orbit(sys_, [theta], sys_.default_half_period)
        slowest = max(slowest, time.perf_counter() - start)
        worst_t = max(worst_t, abs(orb.T - 2 * np.pi))
        worst_res = max(worst_res, orb.residuals["closure"], orb.residuals["symmetry"])
        # meridian: the base point stays in the vertical plane through x0
        a = orb.params[0]
        meridian &= bool(np.abs(orb.samples[:, :2] @ [-np.sin(a), np.cos(a)]).max() < 1e-6)
    ok = worst_t < 1e-6 and worst_res < 1e-6 and slowest < 1.0 and meridian
    report("Geodesic symmetric orbits", ok, f"10 seeds, |T - 2pi|={worst_t:.1e}, residuals={worst_res:.1e}, slowest={slowest:.2f}s")


def test_hill_symmetric_orbit():
    sys_ = orbits.hill_system()
    runs = [orbits.find_symmetric_orbit(sys_, sys_.default_seed, sys_.default_half_period, energy=sys_.default_energy) for _ in range(2)]
    orb = runs[0]
    same = np.array_equal(runs[0].samples, runs[1].samples) and runs[0].T == runs[1].T
    res = orb.residuals
    ok = sys_.default_energy < orbits.HILL_CRITICAL_ENERGY and res["symmetry"] < 1e-6 and res["energy_drift"] < 1e-8 and same
    report(
        "Hill symmetric orbit",
        ok,
        f"H={sys_.default_energy}, T={orb.T:.6f}, symmetry={res['symmetry']:.1e}, drift={res['energy_drift']:.1e}, reproducible={same}",
    )


def test_energy_module():
    a, b, dens = energy.smooth_test_form()
    res = [energy.stokes_residual(energy.synthetic_disk(a, b, dens, energy.disk_mesh(1.0, k))) for k in (8, 16, 32)]
    ratios = [c / f for c, f in zip(res, res[1:])]
    rng = np.random.default_rng(6)
    worst = 0.0
    for n in (3, 4):
        for _ in range(5):
            q, p, dec = quadric.random_configuration(n, rng)
            for line in quadric.enumerate_lines(q, p, dec):
                for radius in (0.5, 3.0, 1000.0):
                    worst = max(worst, energy.disk_bound_check(energy.line_disk(line, dec, radius))["value"])
    ok = all(3.5 <= r <= 4.5 for r in ratios) and worst <= 1 + 1e-6
    report("Energy module", ok, f"Stokes ratios={[round(r, 3) for r in ratios]}, max line-disk area={worst:.6f}")


def test_sft_likeness():
    rng = np.random.default_rng(7)
    worst = max(max(cotangent.sft_residuals_at(cotangent.random_cone_point(2, rng))) for _ in range(20))
    report("SFT-likeness of i on the cone", worst < 1e-6, f"20 points, max residual={worst:.1e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
