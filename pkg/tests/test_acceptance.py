"""Acceptance gate: one test per criterion, one printed PASS/FAIL line each.

Run with `pytest -v`; each test prints `criterion-N <name>: PASS/FAIL
(<detail>)` in addition to the pytest verdict.
"""

import math
import time

import numpy as np
import pytest

from locallearn import (cli, environments, learner as ftrl, oracles,
                        polytope, reduction, regularizer, verify)
from locallearn.polytope import ProblemDims
from locallearn.reduction import binom2

DIMS_SWEEP = [ProblemDims(n, L) for n in (2, 3, 4) for L in (2, 3, 5)]


def report(number, name, passed, detail):
    print(f"criterion-{number} {name}: "
          f"{'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, f"criterion-{number} {name}: {detail}"


def test_criterion_1_gamma_bound():
    # |inv-Hessian quadform| <= 4 over >= 1000 random (M, P) pairs
    rng = np.random.default_rng(101)
    t0 = time.time()
    worst = 0.0
    violations = 0
    samples = 1000
    for s in range(samples):
        dims = DIMS_SWEEP[s % len(DIMS_SWEEP)]
        M = verify.random_feasible_matrix(dims, rng)
        i, j = rng.choice(dims.n_items, size=2, replace=False)
        P = rng.uniform(-1.0, 1.0, size=(dims.n_labels, dims.n_labels))
        v = abs(regularizer.inv_hessian_quadform(M, int(i), int(j), P).value)
        worst = max(worst, v)
        violations += v > regularizer.GAMMA_BOUND
    elapsed = time.time() - t0
    report(1, "gamma-bound",
           violations == 0 and elapsed < 60.0,
           f"max |quadform| {worst:.4f} over {samples} samples, "
           f"{violations} violations, {elapsed:.1f}s")


def test_criterion_2_inverse_hessian_identity():
    rng = np.random.default_rng(102)
    t0 = time.time()
    dims_list = [ProblemDims(1, 2), ProblemDims(2, 2), ProblemDims(1, 3),
                 ProblemDims(2, 4), ProblemDims(4, 2), ProblemDims(2, 3)]
    worst_id = 0.0
    worst_fd = 0.0
    for dims in dims_list:
        M = verify.random_feasible_matrix(dims, rng)
        worst_id = max(worst_id,
                       regularizer.hessian_inverse_identity_check(M))
        L = dims.n_labels
        f = lambda X, L=L: np.linalg.slogdet(
            np.eye(X.shape[0]) + L * X)[1]
        H = regularizer.dense_hessian(M)
        H_fd = oracles.fd_hessian(f, M.entries, step=1e-4)
        worst_fd = max(worst_fd,
                       float(np.linalg.norm(H - H_fd) / np.linalg.norm(H)))
    elapsed = time.time() - t0
    report(2, "inverse-hessian-identity",
           worst_id <= 1e-6 and worst_fd <= 1e-3 and elapsed < 60.0,
           f"identity dev {worst_id:.2e} (tol 1e-6), FD rel {worst_fd:.2e} "
           f"(tol 1e-3), {elapsed:.1f}s")


def test_criterion_3_gradient():
    rng = np.random.default_rng(103)
    small = [d for d in DIMS_SWEEP if d.side <= 9] + [ProblemDims(1, 2)]
    worst = 0.0
    for c in range(20):
        dims = small[c % len(small)]
        M = verify.random_feasible_matrix(dims, rng)
        L = dims.n_labels
        f = lambda X, L=L: np.linalg.slogdet(
            np.eye(X.shape[0]) + L * X)[1]
        G_fd = oracles.fd_gradient(f, M.entries, step=1e-5)
        G = regularizer.evaluate(M).gradient
        worst = max(worst, float(np.linalg.norm(G - G_fd)
                                 / np.linalg.norm(G_fd)))
    report(3, "gradient-vs-finite-differences", worst <= 1e-4,
           f"worst relative error {worst:.2e} over 20 matrices (tol 1e-4)")


def test_criterion_4_diameter():
    rng = np.random.default_rng(104)
    worst_excess = -np.inf
    violations = 0
    for c in range(100):
        dims = DIMS_SWEEP[c % len(DIMS_SWEEP)]
        M = verify.random_feasible_matrix(dims, rng)
        excess = abs(regularizer.evaluate(M).value) \
            - regularizer.diameter_bound(dims)
        worst_excess = max(worst_excess, excess)
        violations += excess > 0
    report(4, "diameter-bound", violations == 0,
           f"worst |log det| - nL = {worst_excess:.3f} over 100 matrices, "
           f"{violations} violations")


def _regret_run(dims, env, rng):
    state = ftrl.init(dims, ftrl.choose_nu(dims, env.num_rounds))
    total = 0.0
    for rnd in env:
        i, j = rnd.pair
        a, b = ftrl.predict(state, i, j, rng)
        pf = rnd.reveal(a, b)
        total += ftrl.expected_payoff(state, pf)
        state = ftrl.update(state, pf)
    opt = oracles.brute_force_opt(env.payoffs(), dims).opt_value
    return opt - total


def test_criterion_5_regret_property():
    t0 = time.time()
    means = {}
    bound_ok = True
    worst_frac = 0.0
    for n in (3, 4):
        dims = ProblemDims(n, 2)
        for env_name in ("random", "maxcut"):
            for T in (50, 200):
                regs = []
                for seed in range(10):
                    rng = np.random.default_rng(
                        np.random.SeedSequence([seed, n, T, 105]))
                    if env_name == "random":
                        env = environments.random_env(dims, T, rng)
                    else:
                        g = reduction.gen_gnp(n, 0.5, rng)
                        while g.num_edges == 0:
                            g = reduction.gen_gnp(n, 0.5, rng)
                        edges = g.edges()
                        order = [edges[t % len(edges)] for t in range(T)]
                        env = environments.maxcut_env(g, order)
                    regret = _regret_run(dims, env, rng)
                    bound = 8.0 * math.sqrt(n * 2 * T)
                    worst_frac = max(worst_frac, regret / bound)
                    bound_ok &= regret <= bound
                    regs.append(regret)
                means[(n, env_name, T)] = float(np.mean(regs))
    worst_ratio = -np.inf
    for n in (3, 4):
        for env_name in ("random", "maxcut"):
            ratio = means[(n, env_name, 200)] / means[(n, env_name, 50)]
            worst_ratio = max(worst_ratio, ratio)
    elapsed = time.time() - t0
    report(5, "regret-property",
           bound_ok and worst_ratio <= 2.5 and elapsed < 600.0,
           f"all 80 runs within 8*sqrt(nLT) (worst at {worst_frac:.2f} of "
           f"bound), worst regret(200)/regret(50) ratio {worst_ratio:.2f} "
           f"(limit 2.5), {elapsed:.0f}s")


def test_criterion_6_projection_vs_qp_oracle():
    rng = np.random.default_rng(106)
    dims = ProblemDims(2, 2)
    worst = 0.0
    for _ in range(50):
        raw = rng.uniform(-1.5, 1.5, size=(4, 4))
        raw = 0.5 * (raw + raw.T)
        ours = polytope.project(raw, dims).matrix.entries
        ref = oracles.qp_projection(raw, dims)
        worst = max(worst, float(np.linalg.norm(ours - ref)))
    report(6, "projection-vs-qp-oracle", worst <= 1e-4,
           f"worst Frobenius distance {worst:.2e} over 50 inputs (tol 1e-4)")


def test_criterion_7_reduction_mechanics():
    rng = np.random.default_rng(107)

    # (a) uniform learner on G(200, 1/2), k=40, R=50: average payoff above
    # T/2 + 5*sqrt(T)/2 in at most 5% of 100 trials
    cfg = reduction.clique_config(200, 40, R=50)
    cutoff = cfg.T / 2.0 + 5.0 * math.sqrt(cfg.T) / 2.0
    exceed = 0
    for _ in range(100):
        g = reduction.gen_gnp(200, 0.5, rng)
        run = reduction.run_distinguisher(
            g, cfg, reduction.make_uniform_factory(), rng)
        exceed += run.verdict.avg_payoff > cutoff
    a_ok = exceed <= 5

    # (b) oracle learner payoff on covered-cluster pairs equals C(m, 2)
    b_ok = True
    for _ in range(10):
        g, S = reduction.gen_planted(200, 0.5, 40, 1.0, rng)
        run = reduction.run_distinguisher(
            g, reduction.clique_config(200, 40, R=1),
            reduction.make_oracle_factory(), rng, planted=S,
            keep_rounds=True)
        player = reduction.OraclePlayer(run.partition, S)
        m = sum(player.covered)
        covered_total = sum(
            rec.payoff_received for rec in run.rep_rounds[0]
            if player.covered[rec.pair[0]] and player.covered[rec.pair[1]])
        b_ok &= covered_total == binom2(m)
        b_ok &= run.rep_payoffs[0] >= binom2(m)

    # (c) coverage: >= 2k/25 covered clusters in >= 7/8 of 200 partitions
    k = 50
    need = 2 * k / 25.0
    hits = 0
    for _ in range(200):
        g, S = reduction.gen_planted(500, 0.5, k, 1.0, rng)
        part = reduction.random_partition(500, k, rng)
        planted_set = set(S)
        m = sum(any(v in planted_set for v in members)
                for members in part.clusters)
        hits += m >= need
    c_ok = hits / 200.0 >= 7.0 / 8.0

    # (d) threshold inequality for k in {100, 125, ..., 1000}
    d_ok = all(binom2(2 * k / 25.0) >= 1.01 * 0.5 * binom2(k / 10.0)
               for k in range(100, 1001, 25))

    report(7, "reduction-mechanics", a_ok and b_ok and c_ok and d_ok,
           f"(a) {exceed}/100 above cutoff (limit 5); (b) covered-pair "
           f"payoff exact; (c) coverage {hits}/200 (need 175); "
           f"(d) threshold inequality holds on all k")


def test_criterion_8_parameter_calculators():
    clique = reduction.clique_regret_target(10 ** 6, eps=0.5)
    dense = reduction.dense_regret_target(10 ** 6, alpha=0.125, eps=0.125,
                                          eps_prime=0.125)
    cor = reduction.clique_corollary_exponents(0.3)
    ok = (abs(clique.beta - 0.0) <= 1e-12
          and abs(dense.beta - 0.3) <= 1e-12
          and abs(cor["eps_tilde"] - 0.05) <= 1e-12
          and abs(cor["k_exponent"] - 0.45) <= 1e-12)
    report(8, "parameter-calculators", ok,
           f"clique beta {clique.beta:.1e}, dense beta {dense.beta:.12f}, "
           f"corollary k exponent {cor['k_exponent']}")


def test_criterion_9_cli_determinism(tmp_path):
    commands = [
        ["regret", "--env", "random", "--n", "3", "--T", "15",
         "--seed", "17"],
        ["distinguish", "--regime", "clique", "--n", "200", "--k", "40",
         "--repetitions", "5", "--trials", "2", "--learner", "uniform",
         "--seed", "17"],
    ]
    ok = True
    for idx, argv in enumerate(commands):
        a = tmp_path / f"{idx}a.csv"
        b = tmp_path / f"{idx}b.csv"
        cli.main(argv + ["--out", str(a)])
        cli.main(argv + ["--out", str(b)])
        ok &= a.read_bytes() == b.read_bytes()
    report(9, "cli-determinism", ok,
           f"{len(commands)} commands byte-identical on repeat")
