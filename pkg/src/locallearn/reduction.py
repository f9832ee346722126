"""Planted-subgraph lower-bound pipeline.

Graph generation, random cluster partitions, the repeated-run distinguisher
with its payoff thresholds, and the regret-exponent calculators for both the
planted-clique and planted-dense-subgraph regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import learner as ftrl
from .environments import PayoffFunction, cluster_edge_env
from .graphs import Graph
from .polytope import ProblemDims


def binom2(x: float) -> float:
    """x choose 2 for real x."""
    return x * (x - 1.0) / 2.0


# ---------------------------------------------------------------------------
# graph generation


def gen_gnp(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdos-Renyi G(n, p): each unordered pair is an edge with prob p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return Graph(n, upper | upper.T)


def gen_planted(n: int, p: float, k: int, q: float,
                rng: np.random.Generator) -> tuple[Graph, list[int]]:
    """G(n, p, k, q): G(n, p) with a denser G(k, q) forced on a random S.

    The clique case is q = 1, p = 1/2.  Returns the graph and the planted
    vertex set S (sorted), which only test-only oracle learners may see.
    """
    if k > n:
        raise ValueError("k must be at most n")
    if not (0.0 <= p <= q <= 1.0):
        raise ValueError("need 0 <= p <= q <= 1")
    planted = sorted(rng.choice(n, size=k, replace=False).tolist())
    adj = np.triu(rng.random((n, n)) < p, k=1)
    inside = rng.random((k, k)) < q
    sub = np.ix_(planted, planted)
    adj[sub] = np.triu(inside, k=1)
    adj = adj | adj.T
    np.fill_diagonal(adj, False)
    return Graph(n, adj), planted


# ---------------------------------------------------------------------------
# cluster partitions


@dataclass
class ClusterPartition:
    """Disjoint equal-size clusters; within-cluster position is the label."""

    clusters: list[list[int]]

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    @property
    def cluster_size(self) -> int:
        return len(self.clusters[0])

    def vertex(self, cluster: int, label: int) -> int:
        return self.clusters[cluster][label]

    def label_of(self, v: int) -> tuple[int, int]:
        for c, members in enumerate(self.clusters):
            if v in members:
                return c, members.index(v)
        raise KeyError(f"vertex {v} is in no cluster")


def partition_shape(n: int, k: int) -> tuple[int, int]:
    """Cluster size l = round(10 n / k) and cluster count n' = floor(n / l)."""
    l = round(10 * n / k)
    if l < 1:
        raise ValueError("cluster size rounds to zero; decrease k")
    n_prime = n // l
    if n_prime < 2:
        raise ValueError(
            f"parameters give n'={n_prime} clusters; need at least 2 "
            "(use the regret-target calculator to pick n, k)")
    return l, n_prime


def random_partition(n: int, k: int,
                     rng: np.random.Generator) -> ClusterPartition:
    """Uniform equipartition into n' clusters of size l, edges unseen.

    Surplus vertices (when l * n' < n) are discarded uniformly at random.
    """
    l, n_prime = partition_shape(n, k)
    perm = rng.permutation(n)[:l * n_prime]
    clusters = [perm[c * l:(c + 1) * l].tolist() for c in range(n_prime)]
    return ClusterPartition(clusters)


# ---------------------------------------------------------------------------
# players for the distinguisher


class UniformPlayer:
    """Plays uniformly random labels; validates the null distribution."""

    def __init__(self, dims: ProblemDims, rng: np.random.Generator):
        self._L = dims.n_labels
        self._rng = rng

    def predict(self, i: int, j: int) -> tuple[int, int]:
        return (int(self._rng.integers(self._L)),
                int(self._rng.integers(self._L)))

    def observe(self, payoff: PayoffFunction) -> None:
        pass


class OraclePlayer:
    """Cheating learner that knows the planted set (test-only).

    In any cluster containing a planted vertex it plays the label of the
    first such vertex; otherwise label 0.  Realizes the fixed labeling from
    the planted-case payoff argument.
    """

    def __init__(self, partition: ClusterPartition, planted: list[int]):
        planted_set = set(planted)
        self.choice: list[int] = []
        self.covered: list[bool] = []
        for members in partition.clusters:
            hit = next((pos for pos, v in enumerate(members)
                        if v in planted_set), None)
            self.covered.append(hit is not None)
            self.choice.append(hit if hit is not None else 0)

    def predict(self, i: int, j: int) -> tuple[int, int]:
        return self.choice[i], self.choice[j]

    def observe(self, payoff: PayoffFunction) -> None:
        pass


class FtrlPlayer:
    """Honest learner: the log-det FTRL algorithm."""

    def __init__(self, dims: ProblemDims, T: int, rng: np.random.Generator,
                 nu: float | None = None,
                 inner_cfg: ftrl.InnerSolverConfig | None = None):
        if nu is None:
            nu = ftrl.choose_nu(dims, max(T, 1))
        self.state = ftrl.init(dims, nu, inner_cfg)
        self._rng = rng

    def predict(self, i: int, j: int) -> tuple[int, int]:
        return ftrl.predict(self.state, i, j, self._rng)

    def observe(self, payoff: PayoffFunction) -> None:
        self.state = ftrl.update(self.state, payoff)


def make_uniform_factory():
    def factory(dims, T, partition, planted, rng):
        return UniformPlayer(dims, rng)
    return factory


def make_oracle_factory():
    def factory(dims, T, partition, planted, rng):
        if planted is None:
            raise ValueError("oracle player needs the planted vertex set")
        return OraclePlayer(partition, planted)
    return factory


def make_ftrl_factory(nu: float | None = None,
                      inner_cfg: ftrl.InnerSolverConfig | None = None):
    def factory(dims, T, partition, planted, rng):
        return FtrlPlayer(dims, T, rng, nu=nu, inner_cfg=inner_cfg)
    return factory


# ---------------------------------------------------------------------------
# distinguisher


@dataclass(frozen=True)
class DistinguisherConfig:
    regime: str            # "clique" or "dense"
    n: int
    k: int
    l: int
    n_prime: int
    T: int
    R: int
    threshold: float
    p_s: float = 0.5
    p_d: float = 1.0

    def __post_init__(self) -> None:
        if self.regime not in ("clique", "dense"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.T != self.n_prime * (self.n_prime - 1) // 2:
            raise ValueError("T must equal n_prime choose 2")
        if self.l * self.n_prime > self.n:
            raise ValueError("clusters cannot cover more than n vertices")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.R < 1 or self.T < 1:
            raise ValueError("R and T must be at least 1")


def clique_repetitions(n: int, k: int) -> int:
    """Documented default R = n^4 / k^3.7 (astronomical at real scale)."""
    return max(1, round(n ** 4 / k ** 3.7))


def dense_repetitions(n: int, k: int, p_d: float) -> int:
    """Documented default R = n^4 / (k^3.7 p_d^2)."""
    return max(1, round(n ** 4 / (k ** 3.7 * p_d ** 2)))


def clique_config(n: int, k: int, R: int | None = None) -> DistinguisherConfig:
    """Planted-clique regime: threshold (1 + 1/100) * (1/2) * C(k/10, 2)."""
    l, n_prime = partition_shape(n, k)
    T = n_prime * (n_prime - 1) // 2
    if R is None:
        R = clique_repetitions(n, k)
    threshold = (1.0 + 0.01) * 0.5 * binom2(k / 10.0)
    return DistinguisherConfig("clique", n, k, l, n_prime, T, R, threshold)


def dense_config(n: int, k: int, p_s: float, p_d: float,
                 R: int | None = None) -> DistinguisherConfig:
    """Dense-subgraph regime: threshold (1/2) * C(2k/25, 2) * p_d."""
    l, n_prime = partition_shape(n, k)
    T = n_prime * (n_prime - 1) // 2
    if R is None:
        R = dense_repetitions(n, k, p_d)
    threshold = 0.5 * binom2(2.0 * k / 25.0) * p_d
    return DistinguisherConfig("dense", n, k, l, n_prime, T, R, threshold,
                               p_s=p_s, p_d=p_d)


@dataclass(frozen=True)
class Verdict:
    avg_payoff: float
    threshold: float
    verdict: str            # "planted" or "random"


@dataclass
class DistinguisherRun:
    verdict: Verdict
    rep_payoffs: list[float]
    partition: ClusterPartition
    rep_rounds: list[list[ftrl.RoundRecord]] = field(default_factory=list)


def run_distinguisher(graph: Graph, cfg: DistinguisherConfig, player_factory,
                      rng: np.random.Generator,
                      planted: list[int] | None = None,
                      keep_rounds: bool = False) -> DistinguisherRun:
    """R fresh-learner runs on one random partition; threshold the mean.

    Each repetition gets an independently derived rng stream and a fresh
    player; the partition is drawn once and shared across repetitions.
    """
    partition = random_partition(graph.n, cfg.k, rng)
    env = cluster_edge_env(graph, partition)
    if env.num_rounds != cfg.T:
        raise ValueError("partition rounds disagree with config T")
    streams = rng.spawn(cfg.R)
    totals: list[float] = []
    all_rounds: list[list[ftrl.RoundRecord]] = []
    for r in range(cfg.R):
        player = player_factory(env.dims, cfg.T, partition, planted,
                                streams[r])
        total = 0.0
        rounds: list[ftrl.RoundRecord] = []
        for t, rnd in enumerate(env):
            i, j = rnd.pair
            a, b = player.predict(i, j)
            pf = rnd.reveal(a, b)
            got = float(pf.block[a, b])
            total += got
            if keep_rounds:
                rounds.append(ftrl.RoundRecord(t, (i, j), (a, b), got, got))
            player.observe(pf)
        totals.append(total)
        if keep_rounds:
            all_rounds.append(rounds)
    avg = float(np.mean(totals))
    word = "planted" if avg >= cfg.threshold else "random"
    return DistinguisherRun(Verdict(avg, cfg.threshold, word), totals,
                            partition, all_rounds)


# ---------------------------------------------------------------------------
# regret-exponent calculators


@dataclass(frozen=True)
class RegretTarget:
    """Concrete instance parameters and the regret target sqrt(n' l^b T).

    separation_ratio compares the target against the payoff gap it must
    undercut (k^2 in the clique regime, k^2 * p_d in the dense regime); the
    reduction separates when the ratio is below 1.
    """

    regime: str
    beta: float
    k: float
    l: float
    n_prime: float
    T: float
    target_regret: float
    separation_ratio: float
    p_s: float = 0.5
    p_d: float = 1.0


def clique_regret_target(n: int, eps: float, slack: float = 0.0) -> RegretTarget:
    """Planted-clique regime with k = n^(1/2 - eps).

    slack is the user-supplied stand-in for the asymptotic omega(1/log n)
    term: beta = (1 - slack) / (1/2 + eps) - 1.
    """
    if not 0.0 < eps <= 0.5:
        raise ValueError("clique regime needs 0 < eps <= 1/2")
    if slack < 0.0:
        raise ValueError("slack must be nonnegative")
    beta = (1.0 - slack) / (0.5 + eps) - 1.0
    k = n ** (0.5 - eps)
    l = 10.0 * n / k
    n_prime = k / 10.0
    T = binom2(n_prime)
    target = math.sqrt(max(n_prime * l ** beta * T, 0.0))
    return RegretTarget("clique", beta, k, l, n_prime, T, target,
                        target / k ** 2)


def dense_regret_target(n: int, alpha: float, eps: float, eps_prime: float,
                        slack: float = 0.0) -> RegretTarget:
    """Dense regime with k = n^(1/2 - eps'), p_s = n^-alpha, p_d = k^-(alpha+eps)."""
    if not 0.0 < alpha <= 0.5:
        raise ValueError("dense regime needs 0 < alpha <= 1/2")
    if eps <= 0.0 or eps_prime <= 0.0:
        raise ValueError("dense regime needs eps > 0 and eps_prime > 0")
    if eps_prime >= 0.5:
        raise ValueError("dense regime needs eps_prime < 1/2")
    if slack < 0.0:
        raise ValueError("slack must be nonnegative")
    beta = 2.0 * (0.5 - (0.5 - eps_prime) * (alpha + eps) - slack) \
        / (0.5 + eps_prime) - 1.0
    k = n ** (0.5 - eps_prime)
    p_s = n ** (-alpha)
    p_d = k ** (-(alpha + eps))
    l = 10.0 * n / k
    n_prime = k / 10.0
    T = binom2(n_prime)
    target = math.sqrt(max(n_prime * l ** beta * T, 0.0))
    return RegretTarget("dense", beta, k, l, n_prime, T, target,
                        target / (k ** 2 * p_d), p_s=p_s, p_d=p_d)


def clique_corollary_exponents(eps: float) -> dict[str, float]:
    """Reduction of regret exponent 1 - eps to clique size n^(1/2 - eps/6).

    Returns the shrunk epsilon, the clique-size exponent, and the regime's
    beta, which dominates 1 - eps so the regret target suffices.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    eps_tilde = eps / 6.0
    beta = (1.0 - eps_tilde) / (0.5 + eps_tilde) - 1.0
    return {
        "eps_tilde": eps_tilde,
        "k_exponent": 0.5 - eps_tilde,
        "beta": beta,
        "required_exponent": 1.0 - eps,
    }
