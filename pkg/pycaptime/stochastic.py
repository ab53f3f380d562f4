"""
Random-robber machinery on the hypercube.

A greedy cop chasing a random robber on Q_n only sees the distance between
them, so the chase is a birth-death chain on 0..n. From an even distance 2k
the robber must step toward the cop k times, the j-th step succeeding with
probability 2j/n per round: a coupon collector with n/2 coupons and k missing.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from pycaptime.batch import GameConfig, batch_play
from pycaptime.cops import ParityGreedyCops
from pycaptime.engine import TrialSummary
from pycaptime.graphs import hypercube
from pycaptime.helper import Timer
from pycaptime.logs import get_logger
from pycaptime.options import Options
from pycaptime.robbers import PlacementPolicy, RandomRobber

SLACK = 1e-12
HORIZON_CAP = 10**4


def _check_coupons(m, m0):
    if not 1 <= m0 <= m:
        raise ValueError(f"Need 1 <= m0 <= m, got m={m}, m0={m0}")


def coupon_expectation(m: float, m0: int) -> float:
    """Expected rounds to collect the last m0 of m coupons: sum of m / i for i = 1..m0."""
    _check_coupons(m, m0)
    return float(sum(m / i for i in range(1, m0 + 1)))


def coupon_tail_bound(m: float, m0: int, eps: float) -> float:
    """
    Upper bound exp(-m^(-1 + eps) * m0) on P(X < (1 - eps)(m - 1) ln m).

    Raises
    ------
    ValueError
        If m <= 1, eps <= 0 or m0 is outside 1..m.

    """
    if m <= 1:
        raise ValueError(f"The tail bound needs m > 1, got m={m}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _check_coupons(m, m0)
    return math.exp(-(m ** (-1 + eps)) * m0)


def coupon_threshold(m: float, eps: float) -> float:
    return (1 - eps) * (m - 1) * math.log(m)


@dataclass
class CouponSample:
    m: float
    m0: int
    trials: int
    seed: int
    mean: float
    threshold: Optional[float]
    tail: Optional[float]  # Empirical P(X < threshold)
    samples: np.ndarray = field(repr=False)


def coupon_simulate(
    m: float, m0: int, trials: int, seed: int = 0, eps: float = None, threshold: float = None
) -> CouponSample:
    """
    Sample the rounds X needed to collect the last m0 of m coupons.

    X is the sum over i = 1..m0 of independent geometric variables with success
    probability i / m. The tail is measured at `threshold`, or at
    (1 - eps)(m - 1) ln m when only eps is given.

    """
    _check_coupons(m, m0)
    if trials < 1:
        raise ValueError(f"Trial count must be positive, got {trials}")

    rng = np.random.default_rng(seed)
    samples = np.zeros(trials, dtype=np.int64)
    for i in range(1, m0 + 1):
        samples += rng.geometric(i / m, size=trials)

    if threshold is None and eps is not None:
        threshold = coupon_threshold(m, eps)
    tail = float(np.mean(samples < threshold)) if threshold is not None else None
    return CouponSample(m, m0, trials, seed, float(samples.mean()), threshold, tail, samples)


def coupon_report(m: float, m0: int, trials: int, seed: int = 0, eps: float = None) -> pd.DataFrame:
    """One-row frame comparing a simulation with the exact mean and, given eps, the tail bound."""
    sample = coupon_simulate(m, m0, trials, seed, eps)
    bound = coupon_tail_bound(m, m0, eps) if eps is not None else None
    row = {
        "m": m,
        "m0": m0,
        "eps": eps,
        "trials": trials,
        "seed": seed,
        "mean": sample.mean,
        "expectation": coupon_expectation(m, m0),
        "threshold": sample.threshold,
        "tail": sample.tail,
        "bound": bound,
    }
    return pd.DataFrame([row])


@dataclass
class DistanceChainTable:
    """
    p[d, t]: probability that the best cop captures a random robber on Q_n
    within t rounds, starting at distance d with the robber to move.
    """

    n: int
    horizon: int
    p: np.ndarray

    def cop_options(self, d_prime: int) -> List[int]:
        """Distances the cop can reach from d_prime: one step closer, pass, one step away."""
        return [max(d_prime - 1, 0), d_prime, min(d_prime + 1, self.n)]

    def cop_action(self, d_prime: int, t: int, slack: float = SLACK) -> int:
        """
        Best cop distance change after the robber moved to d_prime, with t rounds left
        including the current one.

        Ties within slack go to an even resulting distance, then to the smaller one.

        """
        if not 2 <= d_prime <= self.n:
            raise ValueError(f"The cop chooses only at distances 2..{self.n}, got {d_prime}")
        if not 1 <= t <= self.horizon:
            raise ValueError(f"t must be in 1..{self.horizon}, got {t}")
        options = self.cop_options(d_prime)
        values = [self.p[x, t - 1] for x in options]
        best = max(values)
        chosen = min((x for x, v in zip(options, values) if v >= best - slack), key=lambda x: (x % 2, x))
        return chosen - d_prime

    def to_frame(self) -> pd.DataFrame:
        d, t = np.meshgrid(np.arange(self.n + 1), np.arange(self.horizon + 1), indexing="ij")
        return pd.DataFrame({"d": d.ravel(), "t": t.ravel(), "p": self.p.ravel()})


def distance_chain(n: int, horizon: int, horizon_cap: int = HORIZON_CAP) -> DistanceChainTable:
    """
    Dynamic program over the distance chain on Q_n.

    The robber moves from d to d - 1 with probability d / n and to d + 1
    otherwise. Reaching distance 0 or 1 is a capture; from any larger distance
    the cop picks the best of stepping closer, passing or stepping away.

    """
    if n < 2:
        raise ValueError(f"The distance chain needs n >= 2, got {n}")
    if not 1 <= horizon <= horizon_cap:
        raise ValueError(f"Horizon must be in 1..{horizon_cap}, got {horizon}")

    d = np.arange(n + 1)
    toward = d / n
    away = (n - d) / n

    p = np.zeros((n + 1, horizon + 1))
    p[0, :] = 1.0
    for t in range(1, horizon + 1):
        prev = p[:, t - 1]
        # after[x] is the capture probability once the robber has moved to distance x
        after = np.empty(n + 2)
        after[:2] = 1.0
        up = np.append(prev[1:], prev[n])
        after[2 : n + 1] = np.maximum(np.maximum(prev[1:n], prev[2 : n + 1]), up[2 : n + 1])
        after[n + 1] = 0.0
        p[1:, t] = toward[1:] * after[0:n] + away[1:] * after[2 : n + 2]
    return DistanceChainTable(n, horizon, p)


@dataclass(frozen=True)
class Violation:
    k: int
    t: int
    inequality: str  # "p[2k-2] >= p[2k]" or "p[2k] >= p[2k-1]"
    lhs: float
    rhs: float


def check_lemma2(n: int, horizon: int, slack: float = SLACK, horizon_cap: int = HORIZON_CAP) -> List[Violation]:
    """
    Check the even-distance monotonicity of the distance chain.

    For every 1 <= k <= n / 2 and t <= horizon, p[2k-2, t] >= p[2k, t] and
    p[2k, t] >= p[2k-1, t] must hold up to slack. Returns the failures.

    """
    table = distance_chain(n, horizon, horizon_cap)
    p = table.p
    violations = []
    for k in range(1, n // 2 + 1):
        for t in np.flatnonzero(p[2 * k - 2] < p[2 * k] - slack):
            violations.append(Violation(k, int(t), "p[2k-2] >= p[2k]", float(p[2 * k - 2, t]), float(p[2 * k, t])))
        for t in np.flatnonzero(p[2 * k] < p[2 * k - 1] - slack):
            violations.append(Violation(k, int(t), "p[2k] >= p[2k-1]", float(p[2 * k, t]), float(p[2 * k - 1, t])))
    return violations


def chain_expectation(n: int, d: int) -> float:
    """
    Expected game length of a greedy cop against a random robber on Q_n, when
    the distance at the robber's first turn is d.

    Distances at the robber's turn keep their parity; each m of that parity
    down to 1 costs n / m rounds on average. From an even distance the capture
    is a cop step, one round after the robber reached distance 1.

    """
    if not 1 <= d <= n:
        raise ValueError(f"Need 1 <= d <= n, got n={n}, d={d}")
    total = sum(n / m for m in range(d, 0, -2))
    return float(total + (1 if d % 2 == 0 else 0))


@dataclass(frozen=True)
class LowerBoundParams:
    n: int
    d: float
    T: float  # (n - 1) ln n / 2
    eps: float
    gamma: float
    threshold: float  # (1 - eps) T
    placement_ok: bool  # n^(d+1) 1.85^n < 2^n
    far_distance: int  # floor(n / 4) + 1
    coupon_slots: int  # ceil(n / 8)
    expected_capture_lower: float
    expected_capture_asymptotic: float
    union_bound: float


def lower_bound_params(n: int, d: float) -> LowerBoundParams:
    """
    Survival parameters for a random robber against n^d cops on Q_n.

    `union_bound` bounds the probability that some cop starting at least
    `far_distance` away catches the robber before `threshold` rounds.

    """
    if n < 3:
        raise ValueError(f"Lower-bound parameters need n >= 3, got {n}")
    if d < 0:
        raise ValueError(f"Cop-count exponent must be non-negative, got {d}")

    ln_n = math.log(n)
    T = 0.5 * (n - 1) * ln_n
    eps = math.log((4 * d + 1) * ln_n) / ln_n
    gamma = float(np.euler_gamma)
    slots = math.ceil(n / 8)
    m = n / 2

    placement_ok = (d + 1) * ln_n + n * math.log(1.85) < n * math.log(2)
    log_union = d * ln_n - m ** (-1 + eps) * slots
    return LowerBoundParams(
        n=n,
        d=d,
        T=T,
        eps=eps,
        gamma=gamma,
        threshold=(1 - eps) * T,
        placement_ok=placement_ok,
        far_distance=n // 4 + 1,
        coupon_slots=slots,
        expected_capture_lower=coupon_expectation(m, slots) if slots <= m else float("nan"),
        expected_capture_asymptotic=m * (ln_n - math.log(8) + gamma),
        union_bound=math.exp(min(0.0, log_union)),
    )


@dataclass
class SurvivalReport:
    n: int
    cops: int
    trials: int
    seed: int
    params: LowerBoundParams
    survival_fraction: float
    mean_length: float
    chain_mean: float  # Mean of chain_expectation over the realized start distances
    quantiles: Dict[float, float]
    summaries: List[TrialSummary] = field(repr=False)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (s.trial, s.seed, s.outcome, s.length, s.start_distance, survived(s, self.params.threshold))
            for s in self.summaries
        ]
        return pd.DataFrame(rows, columns=["trial", "seed", "outcome", "length", "start_distance", "survived"])


def survived(summary: TrialSummary, threshold: float) -> bool:
    """The robber survives the threshold when no capture happens in rounds up to it."""
    if summary.outcome == "captured":
        return summary.length > threshold
    return summary.length >= threshold


def survival_config(n: int, cop_count: int, max_rounds: int = None, opts: Options = None) -> GameConfig:
    """
    Game setup of `survival_experiment`: randomly placed parity-greedy cops
    against a random robber that must start at least `far_distance` from every cop.
    """
    if cop_count < 1:
        raise ValueError(f"At least one cop is required, got {cop_count}")
    opts = opts or Options({"progress_bar": False})
    params = lower_bound_params(n, math.log(cop_count) / math.log(n))
    placement = PlacementPolicy("far", min_distance=params.far_distance, restarts=opts.far_restarts)
    return GameConfig(
        hypercube(n),
        cop_count,
        lambda: ParityGreedyCops("random"),
        lambda: RandomRobber(placement),
        max_rounds,
    )


def survival_experiment(
    n: int,
    cop_count: int,
    trials: int,
    seed: int = 0,
    max_rounds: int = None,
    opts: Options = None,
) -> SurvivalReport:
    """
    Random robber, placed far from every cop, against randomly placed parity-greedy cops on Q_n.

    Parameters
    ----------
    n : int
        Hypercube dimension, at least 3.
    cop_count : int
        Number of cops; the exponent d solves cop_count = n^d.
    trials : int
        Number of games.
    seed : int, optional
        Base seed of the batch.
    max_rounds : int, optional
        Round cap, the engine default when omitted.
    opts : Options, optional
        Batch and logging options.

    """
    opts = opts or Options({"progress_bar": False})
    logger = get_logger(opts)
    timer = Timer()

    config = survival_config(n, cop_count, max_rounds, opts)
    params = lower_bound_params(n, math.log(cop_count) / math.log(n))
    summaries = batch_play(config, trials, seed, opts)

    lengths = np.array([s.length for s in summaries])
    starts = [s.start_distance for s in summaries if s.start_distance]
    report = SurvivalReport(
        n=n,
        cops=cop_count,
        trials=trials,
        seed=seed,
        params=params,
        survival_fraction=float(np.mean([survived(s, params.threshold) for s in summaries])),
        mean_length=float(lengths.mean()),
        chain_mean=float(np.mean([chain_expectation(n, d) for d in starts])) if starts else float("nan"),
        quantiles={q: float(np.quantile(lengths, q)) for q in (0.1, 0.5, 0.9)},
        summaries=summaries,
    )
    logger.info(
        f"Survival on Q{n} with {cop_count} cops: {report.survival_fraction} of {trials} trials "
        f"beyond {round(params.threshold, 2)} rounds in {timer.elapsed(2)} seconds"
    )
    return report
