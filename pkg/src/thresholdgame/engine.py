"""Simulation engine for the threshold-test selection game.

One play of the game: every firm owns a test difficulty on the quantile
scale, qualities are drawn i.i.d. uniformly on [0, 1], each firm passes or
fails its own test, and the principal ranks firms by the only rational rule:
all passers ahead of all failers, harder tests first within each group, and
uniformly random order inside blocks that tie on both outcome and difficulty.

Monte Carlo estimates use a counter-based generator (Philox) keyed by
``(seed, chunk index)`` with a fixed chunk size and a fixed draw order inside
each chunk, so results are reproducible bit-for-bit for a given seed and
independent of how chunks would be scheduled across workers.  Chunk sums are
reduced with numpy's pairwise summation in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from thresholdgame.dists import MixedCdf

__all__ = [
    "CHUNK_TRIALS",
    "DEFAULT_TRIALS",
    "FixedThresholds",
    "GameOutcome",
    "IidRule",
    "IndependentRule",
    "InversionEstimate",
    "SameTest",
    "SimulationSummary",
    "kendall_tau_fraction",
    "mc_inversion",
    "parse_rule",
    "play_game",
    "rank_firms",
    "select_two",
    "simulate",
]

CHUNK_TRIALS = 1 << 16
DEFAULT_TRIALS = 10_000_000

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class InversionEstimate:
    """A value of the principal's error probability with its provenance."""

    value: float
    method: str  # "closed_form" | "quadrature" | "monte_carlo"
    std_error: float = 0.0
    trials: int = 0

    def __post_init__(self):
        if not -1e-12 <= self.value <= 1 + 1e-12:
            raise ValueError("estimate outside [0, 1]")
        if self.std_error < 0.0:
            raise ValueError("negative standard error")


@dataclass(frozen=True)
class GameOutcome:
    """Record of a single play: inputs, pass/fail bits, inferred ranking."""

    thresholds: tuple[float, ...]
    qualities: tuple[float, ...]
    passed: tuple[bool, ...]
    ranking: tuple[int, ...]
    coin_flips_used: int


# ---------------------------------------------------------------------------
# Single plays
# ---------------------------------------------------------------------------


def select_two(theta_x: float, theta_y: float, x: float, y: float,
               coin: np.random.Generator) -> int:
    """Winner index (0 or 1) between two firms.

    Exactly one passer wins outright; otherwise the higher threshold wins,
    with a fair coin when both outcome and threshold tie.
    """
    for v in (theta_x, theta_y, x, y):
        if not 0.0 <= v <= 1.0:
            raise ValueError("inputs must lie in [0, 1]")
    pass_x = x >= theta_x
    pass_y = y >= theta_y
    if pass_x != pass_y:
        return 0 if pass_x else 1
    if theta_x != theta_y:
        return 0 if theta_x > theta_y else 1
    return 0 if coin.random() < 0.5 else 1


def rank_firms(thresholds: Sequence[float], qualities: Sequence[float],
               coin: np.random.Generator) -> tuple[int, ...]:
    """Ranking of firm indices, best first, under the selection rule."""
    return play_game(thresholds, qualities, coin).ranking


def play_game(thresholds: Sequence[float], qualities: Sequence[float],
              coin: np.random.Generator) -> GameOutcome:
    thresholds = tuple(float(t) for t in thresholds)
    qualities = tuple(float(q) for q in qualities)
    n = len(thresholds)
    if len(qualities) != n:
        raise ValueError("thresholds and qualities must have the same length")
    if n < 2:
        raise ValueError("need at least two firms")
    passed = tuple(q >= t for q, t in zip(qualities, thresholds))
    tie_keys = coin.random(n)
    order = sorted(
        range(n),
        key=lambda i: (passed[i], thresholds[i], tie_keys[i]),
        reverse=True,
    )
    groups: dict[tuple[bool, float], int] = {}
    for i in range(n):
        key = (passed[i], thresholds[i])
        groups[key] = groups.get(key, 0) + 1
    flips = sum(1 for count in groups.values() if count >= 2)
    return GameOutcome(thresholds, qualities, passed, tuple(order), flips)


def kendall_tau_fraction(ranking: Sequence[int], qualities: Sequence[float]) -> float:
    """Fraction of pairs the ranking orders against the true quality order."""
    n = len(ranking)
    if sorted(ranking) != list(range(n)):
        raise ValueError("ranking is not a permutation")
    if len(qualities) != n:
        raise ValueError("ranking and qualities must have the same length")
    inversions = 0
    for p in range(n):
        for q in range(p + 1, n):
            if qualities[ranking[p]] < qualities[ranking[q]]:
                inversions += 1
    return inversions / (n * (n - 1) // 2)


# ---------------------------------------------------------------------------
# Test-assignment rules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SameTest:
    """Both firms take one fixed test."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("threshold outside [0, 1]")


@dataclass(frozen=True)
class FixedThresholds:
    """Firm i deterministically takes thresholds[i]."""

    thresholds: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if len(self.thresholds) < 2:
            raise ValueError("need at least two thresholds")
        if any(not 0.0 <= t <= 1.0 for t in self.thresholds):
            raise ValueError("threshold outside [0, 1]")


@dataclass(frozen=True)
class IidRule:
    """Every firm draws its test i.i.d. from one distribution."""

    dist: MixedCdf


@dataclass(frozen=True)
class IndependentRule:
    """Firm i draws its test from its own distribution, independently."""

    dists: tuple[MixedCdf, ...]

    def __post_init__(self):
        if len(self.dists) < 2:
            raise ValueError("need at least two distributions")


Rule = SameTest | FixedThresholds | IidRule | IndependentRule


def _rule_firm_count(rule: Rule, n_firms: int | None) -> int:
    if isinstance(rule, FixedThresholds):
        implied = len(rule.thresholds)
    elif isinstance(rule, IndependentRule):
        implied = len(rule.dists)
    else:
        implied = None
    if implied is not None:
        if n_firms is not None and n_firms != implied:
            raise ValueError(f"rule implies {implied} firms, got n_firms={n_firms}")
        return implied
    n = 2 if n_firms is None else int(n_firms)
    if n < 2:
        raise ValueError("need at least two firms")
    return n


def parse_dist(spec: str) -> MixedCdf:
    """Parse a distribution spec: ``uniform:lo,hi`` | ``eq`` | ``eq:a,b`` | ``step:t``."""
    head, _, rest = spec.partition(":")
    if head == "uniform":
        try:
            lo, hi = (float(v) for v in rest.split(","))
        except ValueError as exc:
            raise ValueError(f"bad uniform spec {spec!r}") from exc
        return MixedCdf.uniform(lo, hi)
    if head == "step":
        try:
            return MixedCdf.step(float(rest))
        except ValueError as exc:
            raise ValueError(f"bad step spec {spec!r}") from exc
    if head == "eq":
        from thresholdgame.equilibrium import equilibrium_interval, equilibrium_unrestricted

        if not rest:
            return equilibrium_unrestricted().dist
        try:
            a, b = (float(v) for v in rest.split(","))
        except ValueError as exc:
            raise ValueError(f"bad equilibrium spec {spec!r}") from exc
        return equilibrium_interval(a, b).dist
    raise ValueError(f"unknown distribution kind {head!r}")


def parse_rule(spec: str) -> Rule:
    """Parse a test-assignment rule.

    Grammar: ``same:0.5`` | ``fixed:0.333,0.667`` | ``iid:<dist>`` |
    ``indep:<dist>;<dist>`` with ``<dist>`` as in :func:`parse_dist`.
    """
    head, sep, rest = spec.partition(":")
    if head == "same":
        try:
            return SameTest(float(rest))
        except ValueError as exc:
            raise ValueError(f"bad rule spec {spec!r}") from exc
    if head == "fixed":
        try:
            thresholds = tuple(float(v) for v in rest.split(","))
        except ValueError as exc:
            raise ValueError(f"bad rule spec {spec!r}") from exc
        return FixedThresholds(thresholds)
    if head == "iid":
        if not sep:
            raise ValueError(f"bad rule spec {spec!r}")
        return IidRule(parse_dist(rest))
    if head == "indep":
        parts = rest.split(";")
        if len(parts) < 2:
            raise ValueError("indep rule needs at least two distributions")
        return IndependentRule(tuple(parse_dist(p) for p in parts))
    raise ValueError(f"unknown rule kind {head!r}")


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimulationSummary:
    """Aggregate outcome of many seeded plays."""

    n_firms: int
    trials: int
    seed: int
    inversion_mean: float
    inversion_std_error: float
    win_rates: tuple[float, ...]
    win_rate_std_errors: tuple[float, ...]


def _chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    key = (seed & _MASK64) + (chunk_index << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _chunk_thresholds(rule: Rule, gen: np.random.Generator, m: int, n: int) -> np.ndarray:
    if isinstance(rule, SameTest):
        return np.full((m, n), rule.theta)
    if isinstance(rule, FixedThresholds):
        return np.tile(np.asarray(rule.thresholds), (m, 1))
    if isinstance(rule, IidRule):
        return rule.dist.inverse(gen.random((m, n)))
    u = gen.random((m, n))
    thr = np.empty_like(u)
    for j, dist in enumerate(rule.dists):
        thr[:, j] = dist.inverse(u[:, j])
    return thr


def _simulate_chunk(rule: Rule, n: int, gen: np.random.Generator, m: int):
    """One chunk of plays; returns (sum_frac, sum_frac_sq, win_counts)."""
    qual = gen.random((m, n))
    thr = _chunk_thresholds(rule, gen, m, n)
    if n == 2:
        tie = gen.random(m)
        q0, q1 = qual[:, 0], qual[:, 1]
        t0, t1 = thr[:, 0], thr[:, 1]
        p0 = q0 >= t0
        p1 = q1 >= t1
        first_wins = np.where(p0 != p1, p0, np.where(t0 != t1, t0 > t1, tie < 0.5))
        frac = np.where(first_wins, q1 > q0, q0 > q1).astype(float)
        wins0 = np.count_nonzero(first_wins)
        win_counts = np.array([wins0, m - wins0], dtype=np.int64)
    else:
        tie = gen.random((m, n))
        passed = qual >= thr
        rows = np.repeat(np.arange(m), n)
        order = np.lexsort(
            ((-tie).ravel(), (-thr).ravel(), (~passed).ravel(), rows)
        )
        ranking = order.reshape(m, n) - (np.arange(m) * n)[:, None]
        ranked_qual = np.take_along_axis(qual, ranking, axis=1)
        inv = np.zeros(m)
        for p in range(n - 1):
            inv += np.sum(ranked_qual[:, p + 1:] > ranked_qual[:, p:p + 1], axis=1)
        frac = inv / (n * (n - 1) / 2)
        win_counts = np.bincount(ranking[:, 0], minlength=n)
    return float(np.sum(frac)), float(np.sum(frac * frac)), win_counts


def simulate(rule: Rule, n_firms: int | None = None, trials: int = DEFAULT_TRIALS,
             seed: int = 0) -> SimulationSummary:
    """Play ``trials`` seeded games and summarize inversions and win rates."""
    if trials < 1:
        raise ValueError("trials must be positive")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    n = _rule_firm_count(rule, n_firms)

    n_chunks = (trials + CHUNK_TRIALS - 1) // CHUNK_TRIALS
    sums = np.zeros(n_chunks)
    sq_sums = np.zeros(n_chunks)
    win_counts = np.zeros((n_chunks, n), dtype=np.int64)
    for c in range(n_chunks):
        m = min(CHUNK_TRIALS, trials - c * CHUNK_TRIALS)
        gen = _chunk_generator(seed, c)
        sums[c], sq_sums[c], win_counts[c] = _simulate_chunk(rule, n, gen, m)

    total = float(np.sum(sums))
    total_sq = float(np.sum(sq_sums))
    mean = total / trials
    if trials > 1:
        var = max(total_sq - total * total / trials, 0.0) / (trials - 1)
    else:
        var = 0.0
    std_error = math.sqrt(var / trials)
    rates = np.sum(win_counts, axis=0) / trials
    rate_ses = tuple(math.sqrt(max(r * (1.0 - r), 0.0) / trials) for r in rates)
    return SimulationSummary(
        n_firms=n,
        trials=trials,
        seed=seed,
        inversion_mean=mean,
        inversion_std_error=std_error,
        win_rates=tuple(float(r) for r in rates),
        win_rate_std_errors=rate_ses,
    )


def mc_inversion(rule: Rule, n_firms: int | None = None,
                 trials: int = DEFAULT_TRIALS, seed: int = 0) -> InversionEstimate:
    """Monte Carlo estimate of the expected fraction of inverted pairs."""
    summary = simulate(rule, n_firms=n_firms, trials=trials, seed=seed)
    return InversionEstimate(
        value=summary.inversion_mean,
        method="monte_carlo",
        std_error=summary.inversion_std_error,
        trials=trials,
    )
