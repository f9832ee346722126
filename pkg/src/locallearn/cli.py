"""Experiment runner: regret runs, distinguisher runs, verification suites.

Every output file starts with a `#`-prefixed metadata block holding the
command, the fully resolved configuration, and the master seed, so a run can
be reproduced byte for byte.  A single 64-bit seed drives all randomness via
deterministically derived per-component streams.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, environments, graphs, learner as ftrl
from . import oracles, reduction, verify
from .polytope import ProblemDims

REGRET_BOUND_FACTOR = 8.0


def _component_rng(seed: int, *ids: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *ids]))


def _write_metadata(fh, command: str, config: dict) -> None:
    fh.write(f"# command={command}\n")
    fh.write(f"# version={__version__}\n")
    for key in sorted(config):
        fh.write(f"# {key}={config[key]}\n")


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


# ---------------------------------------------------------------------------
# regret


def _build_env(args, rng_env):
    if args.env == "random":
        if args.T is None:
            raise SystemExit("random env needs --T")
        dims = ProblemDims(args.n, args.L)
        return environments.random_env(dims, args.T, rng_env), None
    if args.env == "maxcut":
        if args.graph is None:
            raise SystemExit("maxcut env needs --graph")
        g = graphs.read_graph(args.graph)
        edges = g.edges()
        if not edges:
            return environments.maxcut_env(g, []), None
        if args.T is not None:
            order = [edges[t % len(edges)] for t in range(args.T)]
        else:
            order = edges
        return environments.maxcut_env(g, order), None
    if args.env == "cluster":
        if args.graph is None or args.k is None:
            raise SystemExit("cluster env needs --graph and --k")
        g = graphs.read_graph(args.graph)
        partition = reduction.random_partition(g.n, args.k, rng_env)
        return environments.cluster_edge_env(g, partition), partition
    raise SystemExit(f"unknown env {args.env!r}")


def run_regret(args) -> int:
    env, _ = _build_env(args, _component_rng(args.seed, 0))
    dims = env.dims
    T = env.num_rounds
    nu = args.nu if args.nu is not None else ftrl.choose_nu(dims, max(T, 1))
    inner_cfg = ftrl.default_inner_config(dims.n_labels)
    if args.inner_iters is not None or args.grad_tol is not None:
        inner_cfg = ftrl.InnerSolverConfig(
            step_size=inner_cfg.step_size,
            max_iters=args.inner_iters or inner_cfg.max_iters,
            grad_tol=args.grad_tol or inner_cfg.grad_tol)
    rng_play = _component_rng(args.seed, 1)

    state = ftrl.init(dims, nu, inner_cfg)
    records: list[ftrl.RoundRecord] = []
    total_expected = 0.0
    for t, rnd in enumerate(env):
        i, j = rnd.pair
        a, b = ftrl.predict(state, i, j, rng_play)
        pf = rnd.reveal(a, b)
        exp = ftrl.expected_payoff(state, pf)
        total_expected += exp
        state = ftrl.update(state, pf)
        records.append(ftrl.RoundRecord(t, (i, j), (a, b),
                                        float(pf.block[a, b]), exp,
                                        state.last_inner.iterations,
                                        state.last_inner.residual))

    if args.no_opt:
        opt = None
        regret = None
    else:
        opt = oracles.brute_force_opt(env.payoffs(), dims).opt_value
        regret = opt - total_expected
    bound = REGRET_BOUND_FACTOR * math.sqrt(dims.n_items * dims.n_labels
                                            * max(T, 1))

    config = dict(n=dims.n_items, L=dims.n_labels, T=T, seed=args.seed,
                  env=args.env, graph=args.graph, nu=nu,
                  inner_iters=inner_cfg.max_iters,
                  grad_tol=inner_cfg.grad_tol, no_opt=args.no_opt,
                  threads=os.environ.get("LOCAL_REGRET_THREADS", ""))
    with open(args.out, "w") as fh:
        _write_metadata(fh, "regret", config)
        fh.write("t,i,j,a,b,payoff,expected_payoff,inner_iters,"
                 "inner_residual\n")
        for r in records:
            fh.write(",".join([
                str(r.t), str(r.pair[0]), str(r.pair[1]),
                str(r.predicted[0]), str(r.predicted[1]),
                _fmt(r.payoff_received), _fmt(r.expected_payoff),
                str(r.inner_iters), _fmt(r.inner_residual)]) + "\n")
        fh.write(f"# summary opt={_fmt(opt)},"
                 f"total_expected_payoff={_fmt(total_expected)},"
                 f"regret={_fmt(regret)},"
                 f"bound={REGRET_BOUND_FACTOR:g}*sqrt(nLT)={_fmt(bound)}\n")
    return 0


# ---------------------------------------------------------------------------
# distinguish


def _make_factory(name: str, nu):
    if name == "ftrl":
        return reduction.make_ftrl_factory(nu=nu), False
    if name == "oracle":
        return reduction.make_oracle_factory(), True
    if name == "uniform":
        return reduction.make_uniform_factory(), False
    raise SystemExit(f"unknown learner {name!r}")


def run_distinguish(args) -> int:
    if args.k is None:
        raise SystemExit("distinguish needs --k")
    if args.regime == "clique":
        p, q = (args.p if args.p is not None else 0.5,
                args.q if args.q is not None else 1.0)
        cfg = reduction.clique_config(args.n, args.k, R=args.repetitions)
    else:
        if args.p is None or args.q is None:
            raise SystemExit("dense regime needs --p (ambient) and --q "
                             "(planted) densities")
        p, q = args.p, args.q
        cfg = reduction.dense_config(args.n, args.k, p, q,
                                     R=args.repetitions)
    factory, needs_planted = _make_factory(args.learner, args.nu)

    rows = []
    correct = 0
    for trial in range(args.trials):
        case = "planted" if trial % 2 == 1 else "random"
        rng = _component_rng(args.seed, 2, trial)
        if case == "planted":
            graph, planted = reduction.gen_planted(args.n, p, args.k, q, rng)
        else:
            graph, planted = reduction.gen_gnp(args.n, p, rng), None
        if needs_planted and planted is None:
            planted = []
        run = reduction.run_distinguisher(graph, cfg, factory, rng,
                                          planted=planted)
        if run.verdict.verdict == case:
            correct += 1
        rows.append((trial, case, run.verdict))

    config = dict(n=args.n, k=args.k, regime=args.regime,
                  learner=args.learner, trials=args.trials,
                  repetitions=cfg.R, p=p, q=q, seed=args.seed,
                  l=cfg.l, n_prime=cfg.n_prime, T=cfg.T,
                  threshold=cfg.threshold,
                  threads=os.environ.get("LOCAL_REGRET_THREADS", ""))
    with open(args.out, "w") as fh:
        _write_metadata(fh, "distinguish", config)
        fh.write("trial,case,regime,n,k,l,n_prime,T,R,avg_payoff,threshold,"
                 "verdict,seed\n")
        for trial, case, verdict in rows:
            fh.write(",".join([
                str(trial), case, args.regime, str(args.n), str(args.k),
                str(cfg.l), str(cfg.n_prime), str(cfg.T), str(cfg.R),
                _fmt(verdict.avg_payoff), _fmt(verdict.threshold),
                verdict.verdict, str(args.seed)]) + "\n")
        fh.write(f"# accuracy={correct}/{args.trials}"
                 f"={correct / max(args.trials, 1)!r}\n")
    return 0


# ---------------------------------------------------------------------------
# verify


def run_verify(args) -> int:
    results = verify.run_all(args.seed)
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        lines.append(f"{status}  {res.name}: {res.detail}")
    text = "\n".join(lines)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            _write_metadata(fh, "verify", dict(seed=args.seed))
            fh.write("suite,passed,detail\n")
            for res in results:
                fh.write(f"{res.name},{int(res.passed)},"
                         f"\"{res.detail}\"\n")
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locallearn",
        description="Online local learning experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, default=4)
        p.add_argument("--L", type=int, default=2)
        p.add_argument("--T", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--inner-iters", type=int, default=None)
        p.add_argument("--grad-tol", type=float, default=None)
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--q", type=float, default=None)
        p.add_argument("--graph", type=str, default=None)

    p_regret = sub.add_parser("regret", help="play FTRL and report regret")
    common(p_regret)
    p_regret.add_argument("--env", choices=["maxcut", "random", "cluster"],
                          default="random")
    p_regret.add_argument("--no-opt", action="store_true",
                          help="skip the brute-force OPT oracle")
    p_regret.add_argument("--out", type=str, required=True)
    p_regret.set_defaults(func=run_regret)

    p_dist = sub.add_parser("distinguish",
                            help="planted-vs-random distinguisher trials")
    common(p_dist)
    p_dist.add_argument("--regime", choices=["clique", "dense"],
                        default="clique")
    p_dist.add_argument("--alpha", type=float, default=None)
    p_dist.add_argument("--eps", type=float, default=None)
    p_dist.add_argument("--eps-prime", type=float, default=None)
    p_dist.add_argument("--slack", type=float, default=0.0)
    p_dist.add_argument("--repetitions", type=int, default=None)
    p_dist.add_argument("--trials", type=int, default=2)
    p_dist.add_argument("--learner",
                        choices=["ftrl", "oracle", "uniform"],
                        default="ftrl")
    p_dist.add_argument("--out", type=str, required=True)
    p_dist.set_defaults(func=run_distinguish)

    p_verify = sub.add_parser("verify", help="run the numerical test suites")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", type=str, default=None)
    p_verify.set_defaults(func=run_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
