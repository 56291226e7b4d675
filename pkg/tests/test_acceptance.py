"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import time

import numpy as np
import pytest

from qvikit.baseline_solver import BaselineParams, solve_baseline
from qvikit.cli import main as cli_main
from qvikit.dr_solver import (TripleState, default_params, residual, rho_map,
                              solve_dr, theoretical_bound, validate_params,
                              weighted_distance)
from qvikit.operators import contraction_modulus, optimal_stepsize, resolvent_batch
from qvikit.sets import Box, Polytope, SamplerConfig
from qvikit.verify import (check_hausdorff_lipschitz, check_projection_lipschitz,
                           segment_family_instance, shifted_square_problem,
                           shifted_square_solution, table_starts)

from _oracles import (assert_projection_matches_grid, random_set,
                      random_strongly_monotone)


def _passed(n, name, detail=""):
    print(f"[acceptance] criterion {n} ({name}): PASS {detail}".rstrip())


@pytest.fixture(scope="module")
def prob():
    return shifted_square_problem()


@pytest.fixture(scope="module")
def params(prob):
    return default_params(prob, xi=4.0, tol=1e-8)


def test_criterion_1_benchmark_solution(prob, params):
    solve_dr(prob, params, *table_starts()[0])  # warm the kernels
    elapsed = []
    for x0, y0 in table_starts():
        rep = solve_dr(prob, params, x0, y0)
        assert rep.status == "converged"
        assert np.linalg.norm(rep.final.x - [0.5, 0.5]) <= 1e-6
        assert np.linalg.norm(rep.final.z - [1 / 128, 1 / 128]) <= 1e-6
        assert rep.elapsed < 1.0
        elapsed.append(rep.elapsed)
    _passed(1, "benchmark solution",
            f"x*=(0.5,0.5) z*=(1/128,1/128) from 3 starts, "
            f"max solve time {max(elapsed):.4f}s")


def test_criterion_2_iteration_counts(prob, params):
    counts = []
    for x0, y0 in table_starts():
        dr = solve_dr(prob, params, x0, y0)
        base = solve_baseline(prob, BaselineParams(seed=0), x0, y0)
        assert dr.status == base.status == "converged"
        assert dr.iterations <= 12
        assert base.iterations > dr.iterations
        counts.append((dr.iterations, base.iterations))
    _passed(2, "iteration counts",
            f"dr vs baseline inner steps: {counts}")


def test_criterion_3_triple_map_contraction(prob, params):
    check = validate_params(prob, params)
    assert check.feasible
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        x1, x2 = prob.C.sample_batch(rng, 2)
        z1, z2, y1, y2 = rng.normal(scale=3.0, size=(4, 2))
        w1 = TripleState(z1, y1, x1)
        w2 = TripleState(z2, y2, x2)
        lhs = weighted_distance(rho_map(prob, params, w1),
                                rho_map(prob, params, w2),
                                params.alpha, params.beta)
        rhs = check.delta * weighted_distance(w1, w2, params.alpha, params.beta)
        assert lhs <= rhs + 1e-9
        worst = max(worst, lhs - rhs)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    _passed(3, "triple-map contraction",
            f"1000 pairs, worst lhs-rhs {worst:.2e}, {elapsed:.2f}s")


def test_criterion_4_reflected_resolvent_modulus():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 11))
        T = random_strongly_monotone(rng, n)
        xi = float(rng.uniform(1e-3, 4.0 / T.L))
        mod = contraction_modulus(T.L, T.mu, xi)
        U = rng.standard_normal((40, n)) * 3
        V = rng.standard_normal((40, n)) * 3
        RU = 2.0 * resolvent_batch(T, xi, U) - U
        RV = 2.0 * resolvent_batch(T, xi, V) - V
        ratios = np.linalg.norm(RU - RV, axis=1)
        bound = mod * np.linalg.norm(U - V, axis=1)
        assert np.all(ratios <= bound + 1e-9)
        worst = max(worst, float(np.max(ratios - bound)))
        # closed form at the optimal step
        g = T.L / T.mu
        xi_opt, mod_opt = optimal_stepsize(T.L, T.mu)
        assert abs(mod_opt - np.sqrt((g - 1.0) / (g + 1.0))) <= 1e-12
        assert abs(contraction_modulus(T.L, T.mu, xi_opt) - mod_opt) <= 1e-12
    _passed(4, "reflected-resolvent modulus",
            f"100 maps, worst ratio excess {worst:.2e}")


def test_criterion_5_rate_bound(prob, params):
    w_star = shifted_square_solution(params.xi)
    check = validate_params(prob, params)
    for x0, y0 in table_starts():
        rep = solve_dr(prob, params, x0, y0, record_trace=True)
        errs = np.array([weighted_distance(v, w_star, params.alpha, params.beta)
                         for v in rep.trace.staggered_states()])
        bounds = theoretical_bound(np.arange(errs.size), check.delta, errs[0])
        assert np.all(errs <= bounds + 1e-12)
    _passed(5, "linear rate bound",
            f"trajectories from 3 starts dominated by delta^k, "
            f"delta={check.delta:.6f}")


def test_criterion_6_projection_lipschitz_certification(prob):
    rep = check_projection_lipschitz(prob.phi, prob.C, prob.phi.lipschitz_l,
                                     SamplerConfig(seed=2, count=100_000))
    assert rep.ok
    assert rep.max_ratio <= 1.0 / 64.0 + 1e-10

    phi1, dom1 = segment_family_instance()
    rep1 = check_projection_lipschitz(phi1, dom1, 1.0,
                                      SamplerConfig(seed=3, count=100_000))
    assert rep1.max_ratio >= np.sqrt(2.0) - 1e-6
    # the defining witness, reproduced exactly
    assert np.array_equal(phi1.project([0.0, 0.0], [1.0, 2.0]), [1.0, 0.0])
    assert np.array_equal(phi1.project([1.0, 0.0], [1.0, 2.0]), [0.0, 1.0])
    _passed(6, "projection-Lipschitz certification",
            f"translated family max ratio {rep.max_ratio:.9f} <= 1/64; "
            f"segment family reaches {rep1.max_ratio:.3f} >= sqrt(2)")


def test_criterion_7_one_way_implication(prob):
    rep2 = check_hausdorff_lipschitz(prob.phi, prob.C, prob.phi.lipschitz_l,
                                     SamplerConfig(seed=4, count=150),
                                     probes_per_pair=400)
    assert rep2.max_ratio <= 1.0 / 64.0 + 1e-6

    phi1, dom1 = segment_family_instance()
    rep1 = check_hausdorff_lipschitz(phi1, dom1, 1.0,
                                     SamplerConfig(seed=5, count=150),
                                     probes_per_pair=400)
    assert rep1.max_ratio == pytest.approx(1.0, abs=1e-6)
    gap = check_projection_lipschitz(phi1, dom1, 1.0,
                                     SamplerConfig(seed=6, count=20_000))
    assert gap.max_ratio >= np.sqrt(2.0) - 1e-6
    _passed(7, "one-way implication",
            f"set-distance ratios: translated {rep2.max_ratio:.6f} <= 1/64, "
            f"segment family {rep1.max_ratio:.6f} == 1 while projection "
            f"ratio reaches {gap.max_ratio:.3f}")


def test_criterion_8_projection_oracle_equivalence():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        dim = int(rng.integers(1, 4))
        s = random_set(rng, dim)
        z = rng.normal(scale=2.0, size=dim)
        assert_projection_matches_grid(s, z,
                                       points_per_axis=41 if dim < 3 else 21)
    # box projection and its normal-cone resolvent realized by the polytope
    # path agree bitwise-tightly
    for _ in range(200):
        lo = rng.uniform(-2, 0, 2)
        box = Box(lo, lo + rng.uniform(0.2, 2, 2))
        poly = Polytope(box, ())
        z = rng.normal(scale=3.0, size=2)
        assert np.linalg.norm(box.project(z) - poly.project(z)) <= 1e-12
    _passed(8, "projection oracle equivalence",
            "1000 grid comparisons in dims 1-3; box vs polytope paths agree")


def test_criterion_9_fixed_point_residual_equivalence(prob, params):
    rng = np.random.default_rng(8)
    w_star = shifted_square_solution(params.xi)
    checked = 0
    for _ in range(100):
        w = TripleState(
            w_star.z + 1e-11 * rng.standard_normal(2),
            w_star.y + 1e-11 * rng.standard_normal(2),
            w_star.x + 1e-11 * rng.standard_normal(2),
        )
        image = rho_map(prob, params, w)
        rho_res = (np.linalg.norm(image.z - w.z)
                   + np.linalg.norm(image.y - w.y)
                   + np.linalg.norm(image.x - w.x))
        assert rho_res <= 1e-10
        assert residual(prob, params.xi, w.z, w.x) <= 1e-8
        checked += 1
    assert checked == 100
    _passed(9, "fixed-point/residual equivalence",
            "100 perturbed near-solutions")


def test_criterion_10_cpu_times_recorded_not_asserted(tmp_path, capsys):
    # timings are machine-dependent and below timer resolution in the
    # reference experiment; the reports record them and nothing asserts them
    out = tmp_path / "report.json"
    code = cli_main(["solve", "example2.json", "--out", str(out)])
    capsys.readouterr()
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["timings"]) == 3
    assert all("elapsed" in t for t in doc["timings"])
    assert all("elapsed" not in r for r in doc["runs"])
    bench = tmp_path / "bench.csv"
    code = cli_main(["bench", "example2.json", "--repeats", "2",
                     "--out", str(bench)])
    capsys.readouterr()
    assert code == 0
    assert bench.exists()
    _passed(10, "cpu times recorded, not asserted",
            "timings present in reports; no test constrains them")
