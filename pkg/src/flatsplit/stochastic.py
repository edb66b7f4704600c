"""Monte Carlo experiments on randomly drawn instances.

Sampling draws exact dyadic rationals (53 random bits), so every fairness
decision downstream runs on exact arithmetic; floats appear only in
aggregates (estimates and confidence intervals).

Reproducibility: all experiments take a 64-bit master seed.  Trial ``t``
uses the (t+1)-th output of a splitmix64 generator seeded with the master
seed, so trials can run in any order or in parallel and still reproduce.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Optional, Sequence

from flatsplit.matching import welfare_max_profile
from flatsplit.model import Instance, MoneyLike, money
from flatsplit.model import welfare as assigned_welfare
from flatsplit.solvers import solve_uef

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state: int) -> int:
    z = (state + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def trial_seed(master: int, index: int) -> int:
    """Seed for trial ``index``: advance splitmix64 ``index + 1`` times from
    the master seed (closed form, no loop)."""
    return _splitmix64((master + index * _GOLDEN) & _MASK)


@dataclass(frozen=True)
class DistributionSpec:
    """Room-value distribution: a finite discrete law, the uniform law on
    [0, 1], or a correlated pair of fair coin flips (two players only)."""

    kind: str
    values: tuple[Fraction, ...] = ()
    probabilities: tuple[Fraction, ...] = ()
    correlation: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.kind == "discrete":
            if not self.values or len(self.values) != len(self.probabilities):
                raise ValueError("discrete law needs matching values and probabilities")
            if any(p < 0 for p in self.probabilities):
                raise ValueError("probabilities must be nonnegative")
            if sum(self.probabilities, Fraction(0)) != 1:
                raise ValueError("probabilities must sum to 1")
        elif self.kind == "correlated-bernoulli":
            if not 0 <= self.correlation <= 1:
                raise ValueError("correlation must lie in [0, 1]")
        elif self.kind != "uniform01":
            raise ValueError(f"unknown distribution kind {self.kind!r}")

    @staticmethod
    def discrete(values: Sequence[MoneyLike], probabilities: Sequence[MoneyLike]) -> "DistributionSpec":
        return DistributionSpec(
            kind="discrete",
            values=tuple(money(v) for v in values),
            probabilities=tuple(money(p) for p in probabilities),
        )

    @staticmethod
    def uniform01() -> "DistributionSpec":
        return DistributionSpec(kind="uniform01")

    @staticmethod
    def correlated_bernoulli(r: MoneyLike) -> "DistributionSpec":
        return DistributionSpec(kind="correlated-bernoulli", correlation=money(r))

    def label(self) -> str:
        if self.kind == "uniform01":
            return "uniform01"
        if self.kind == "correlated-bernoulli":
            return f"corr-bernoulli({self.correlation})"
        pairs = ",".join(f"{v}@{p}" for v, p in zip(self.values, self.probabilities))
        return f"discrete({pairs})"


def parse_spec(text: str) -> DistributionSpec:
    """Parse a CLI distribution string.

    Formats: ``uniform01``; ``corr-bernoulli:R``; ``discrete:V@P,V@P,...``
    with all numbers exact (decimal or ratio strings).
    """
    text = text.strip()
    if text == "uniform01":
        return DistributionSpec.uniform01()
    if text.startswith("corr-bernoulli:"):
        return DistributionSpec.correlated_bernoulli(text.split(":", 1)[1])
    if text.startswith("discrete:"):
        pairs = text.split(":", 1)[1].split(",")
        values, probs = [], []
        for pair in pairs:
            v, _, p = pair.partition("@")
            if not p:
                raise ValueError(f"discrete entry {pair!r} must look like VALUE@PROB")
            values.append(v)
            probs.append(p)
        return DistributionSpec.discrete(values, probs)
    raise ValueError(f"cannot parse distribution spec {text!r}")


def _draw_value(rng: Random, spec: DistributionSpec) -> Fraction:
    u = Fraction(rng.getrandbits(53), 1 << 53)
    if spec.kind == "uniform01":
        return u
    cum = Fraction(0)
    for v, p in zip(spec.values, spec.probabilities):
        cum += p
        if u < cum:
            return v
    return spec.values[-1]


def _draw_apartment(rng: Random, n: int, spec: DistributionSpec) -> list[list[Fraction]]:
    """Values for one apartment, indexed [player][room].  Draw order is
    fixed so instance prefixes agree between one-shot and incremental
    sampling."""
    if spec.kind == "correlated-bernoulli":
        if n != 2:
            raise ValueError("correlated-bernoulli sampling is defined for two players")
        rooms: list[list[Fraction]] = [[], []]
        for _ in range(n):
            u = Fraction(rng.getrandbits(53), 1 << 53)
            bit = Fraction(rng.getrandbits(1))
            if u < spec.correlation:
                first, second = bit, bit
            else:
                first, second = bit, 1 - bit
            rooms[0].append(first)
            rooms[1].append(second)
        return rooms
    return [[_draw_value(rng, spec) for _ in range(n)] for _ in range(n)]


def sample_instance(
    n: int, m: int, spec: DistributionSpec, rent: MoneyLike, seed: int
) -> Instance:
    """One random instance: i.i.d. room values, equal rent per apartment,
    normalization flag off."""
    rng = Random(seed)
    rent = money(rent)
    per_apartment = [_draw_apartment(rng, n, spec) for _ in range(m)]
    values = [
        [tuple(per_apartment[j][i]) for j in range(m)]
        for i in range(n)
    ]
    return Instance.build(values=values, rents=[rent] * m, normalized=False)


# ---------------------------------------------------------------------------
# unbalanced welfare and the two existence events
# ---------------------------------------------------------------------------


def muw(inst: Instance, j: int) -> Fraction:
    """Best welfare achievable in apartment ``j`` if one player could take
    several rooms: sum of per-room maxima minus the rent."""
    inst.check_apartment(j)
    total = Fraction(0)
    for k in range(inst.n):
        total += max(inst.values[i][j][k] for i in range(inst.n))
    return total - inst.rents[j]


def _max_holder_matching(inst: Instance, j: int) -> bool:
    """Can every room of apartment ``j`` go to a distinct player who holds
    its maximum value?  Bipartite matching by augmenting paths."""
    n = inst.n
    maxima = [max(inst.values[i][j][k] for i in range(n)) for k in range(n)]
    holders = [
        [k for k in range(n) if inst.values[i][j][k] == maxima[k]] for i in range(n)
    ]
    match_of_room = [-1] * n

    def augment(i: int, seen: list[bool]) -> bool:
        for k in holders[i]:
            if not seen[k]:
                seen[k] = True
                if match_of_room[k] < 0 or augment(match_of_room[k], seen):
                    match_of_room[k] = i
                    return True
        return False

    return all(augment(i, [False] * n) for i in range(n))


def check_event_f(inst: Instance) -> bool:
    """In the apartment with the highest unbalanced welfare (smallest index
    on ties), some bijection attains it; such instances always admit a
    universally envy-free solution."""
    scores = [muw(inst, j) for j in range(inst.m)]
    top = max(scores)
    j_star = scores.index(top)
    return _max_holder_matching(inst, j_star)


def event_e_holds(inst: Instance) -> bool:
    """Recognize the no-solution pattern: ranking apartments by unbalanced
    welfare (all distinct), the apartment ranked n+1 strictly beats every
    other apartment's welfare, while in each apartment ranked t <= n player
    t holds the maximum value of every room.  Under this event no
    universally envy-free solution exists; used to craft negative fixtures.
    """
    n, m = inst.n, inst.m
    if n < 2 or m < n + 1:
        return False
    scores = [(muw(inst, j), j) for j in range(m)]
    ranked = sorted(scores, key=lambda t: (-t[0], t[1]))
    if len({s for s, _ in ranked}) != m:
        return False
    order = [j for _, j in ranked]
    asg = welfare_max_profile(inst)
    welfares = [assigned_welfare(inst, asg, j) for j in range(m)]
    special = order[n]
    if any(welfares[special] <= welfares[j] for j in range(m) if j != special):
        return False
    for t in range(n):
        j = order[t]
        for k in range(n):
            top = max(inst.values[i][j][k] for i in range(n))
            if inst.values[t][j][k] != top:
                return False
    return True


def make_event_e_instance(n: int, m: int, seed: int, rent: MoneyLike = 1) -> Instance:
    """Random instance engineered to satisfy the no-solution event."""
    if n < 2 or m < n + 1:
        raise ValueError("the event needs n >= 2 and m >= n + 1")
    rng = Random(seed)

    def jitter(scale: Fraction) -> Fraction:
        return scale * Fraction(rng.getrandbits(20) + 1, 1 << 22)

    values: list[list[list[Fraction]]] = [[[Fraction(0)] * n for _ in range(m)] for _ in range(n)]
    # apartments 0..n-1: player t dominates apartment t outright
    for t in range(n):
        high = Fraction(9, 10) + Fraction(n - t, 100 * n)
        for k in range(n):
            values[t][t][k] = high + jitter(Fraction(1, 1000))
            for i in range(n):
                if i != t:
                    values[i][t][k] = jitter(Fraction(1, 100))
    # apartment n: a clean diagonal with the best achievable welfare
    diag = Fraction(85, 100)
    for i in range(n):
        for k in range(n):
            values[i][n][k] = diag + jitter(Fraction(1, 1000)) if i == k else jitter(Fraction(1, 100))
    # the rest: negligible values
    for j in range(n + 1, m):
        for i in range(n):
            for k in range(n):
                values[i][j][k] = jitter(Fraction(1, 100))
    inst = Instance.build(
        values=[[tuple(values[i][j]) for j in range(m)] for i in range(n)],
        rents=[money(rent)] * m,
    )
    if not event_e_holds(inst):  # jitters collide with vanishing probability
        return make_event_e_instance(n, m, seed + 1, rent)
    return inst


# ---------------------------------------------------------------------------
# existence probability estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialReport:
    trials: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    seed: int

    def __post_init__(self) -> None:
        if self.successes > self.trials:
            raise ValueError("more successes than trials")


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def uef_exists(inst: Instance) -> bool:
    return solve_uef(inst).found


def _binary_cache_key(inst: Instance) -> Optional[tuple]:
    """Canonical key for two-player 0/1 instances with equal rents.

    Existence of a universally envy-free solution is invariant under
    permuting apartments and swapping the two rooms inside an apartment, so
    equivalent instances share one solver call.
    """
    if inst.n != 2:
        return None
    rent = inst.rents[0]
    if any(r != rent for r in inst.rents):
        return None
    types = []
    zero_one = (Fraction(0), Fraction(1))
    for j in range(inst.m):
        cells = (
            inst.values[0][j][0],
            inst.values[0][j][1],
            inst.values[1][j][0],
            inst.values[1][j][1],
        )
        if any(c not in zero_one for c in cells):
            return None
        a, b, c, d = cells
        types.append(min((a, b, c, d), (b, a, d, c)))
    return (rent, tuple(sorted(types)))


def _uef_exists_cached(inst: Instance, cache: dict) -> bool:
    key = _binary_cache_key(inst)
    if key is None:
        return uef_exists(inst)
    hit = cache.get(key)
    if hit is None:
        hit = uef_exists(inst)
        cache[key] = hit
    return hit


def _estimate_batch(args: tuple) -> int:
    n, m, spec, rent, master, start, stop = args
    cache: dict = {}
    successes = 0
    for t in range(start, stop):
        inst = sample_instance(n, m, spec, rent, trial_seed(master, t))
        if _uef_exists_cached(inst, cache):
            successes += 1
    return successes


def estimate_uef_prob(
    n: int,
    m: int,
    spec: DistributionSpec,
    rent: MoneyLike,
    trials: int,
    seed: int,
    processes: Optional[int] = None,
) -> TrialReport:
    """Fraction of sampled instances admitting a universally envy-free
    solution, with a Wilson 95% interval.

    Trials are independent with per-trial seeds, so they run as a parallel
    map over worker processes; the reduction (a sum) is order-free.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rent = money(rent)
    workers = processes if processes is not None else (os.cpu_count() or 1)
    workers = max(1, min(workers, trials))
    if workers == 1:
        successes = _estimate_batch((n, m, spec, rent, seed, 0, trials))
    else:
        chunk = (trials + workers - 1) // workers
        jobs = [
            (n, m, spec, rent, seed, lo, min(lo + chunk, trials))
            for lo in range(0, trials, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            successes = sum(pool.map(_estimate_batch, jobs))
    low, high = wilson_interval(successes, trials)
    return TrialReport(
        trials=trials,
        successes=successes,
        estimate=successes / trials,
        ci_low=low,
        ci_high=high,
        seed=seed,
    )


def estimate_event_f_prob(
    n: int,
    m: int,
    spec: DistributionSpec,
    rent: MoneyLike,
    trials: int,
    seed: int,
) -> TrialReport:
    """Frequency of the bijective-maximum event; no solver involved."""
    if trials < 1:
        raise ValueError("need at least one trial")
    rent = money(rent)
    successes = 0
    for t in range(trials):
        inst = sample_instance(n, m, spec, rent, trial_seed(seed, t))
        if check_event_f(inst):
            successes += 1
    low, high = wilson_interval(successes, trials)
    return TrialReport(trials, successes, successes / trials, low, high, seed)


# ---------------------------------------------------------------------------
# sequential search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StoppingResult:
    stopped_at: Optional[int]  # None: cap hit without success
    cap: int

    @property
    def stopped(self) -> bool:
        return self.stopped_at is not None


def sequential_stopping(
    n: int,
    spec: DistributionSpec,
    rent: MoneyLike,
    m0: int,
    max_m: int,
    seed: int,
) -> StoppingResult:
    """Add apartments one at a time and stop at the first count >= m0 that
    admits a universally envy-free solution.  Earlier apartments are reused
    between checks, never redrawn."""
    if m0 < 1:
        raise ValueError("m0 must be at least 1")
    if max_m < m0:
        raise ValueError("cap must be at least m0")
    rng = Random(seed)
    rent = money(rent)
    drawn: list[list[list[Fraction]]] = []
    for m in range(1, max_m + 1):
        drawn.append(_draw_apartment(rng, n, spec))
        if m < m0:
            continue
        values = [[tuple(drawn[j][i]) for j in range(m)] for i in range(n)]
        inst = Instance.build(values=values, rents=[rent] * m)
        if uef_exists(inst):
            return StoppingResult(stopped_at=m, cap=max_m)
    return StoppingResult(stopped_at=None, cap=max_m)


# ---------------------------------------------------------------------------
# two players, coin-flip values: exact theory
# ---------------------------------------------------------------------------


def closed_form_uef_prob(m: int, r: MoneyLike) -> Fraction:
    """Exact probability that a universally envy-free solution exists for
    two players, m apartments of rent 1, and per-room values that are fair
    coin flips agreeing with probability r."""
    r = money(r)
    if m < 1:
        raise ValueError("need at least one apartment")
    if not 0 <= r <= 1:
        raise ValueError("correlation must lie in [0, 1]")
    none_prob = (
        ((r * r + 2) / 4) ** m
        - 2 * Fraction(1, 4) ** m
        - ((4 * r - r * r) / 4) ** m
        + 2 * ((2 * r - r * r) / 4) ** m
    )
    return 1 - none_prob


def three_events_test(inst: Instance) -> bool:
    """For two players with 0/1 values and rent-1 apartments: True exactly
    when no universally envy-free solution exists, decided by three
    structural events (no all-ones bijection anywhere; both players value
    something; some apartment fully splits the players)."""
    if inst.n != 2:
        raise ValueError("the test is defined for two players")
    zero_one = (Fraction(0), Fraction(1))
    for i in range(inst.n):
        for j in range(inst.m):
            for k in range(inst.n):
                if inst.values[i][j][k] not in zero_one:
                    raise ValueError("values must be 0 or 1")
    if any(r != 1 for r in inst.rents):
        raise ValueError("rents must all be 1")
    v = inst.values
    e1 = not any(
        (v[0][j][0] == 1 and v[1][j][1] == 1) or (v[0][j][1] == 1 and v[1][j][0] == 1)
        for j in range(inst.m)
    )
    e2 = all(
        any(v[i][j][k] == 1 for j in range(inst.m) for k in range(2)) for i in range(2)
    )
    e3 = any(
        (v[0][j][0] == 1 and v[0][j][1] == 1 and v[1][j][0] == 0 and v[1][j][1] == 0)
        or (v[1][j][0] == 1 and v[1][j][1] == 1 and v[0][j][0] == 0 and v[0][j][1] == 0)
        for j in range(inst.m)
    )
    return e1 and e2 and e3
