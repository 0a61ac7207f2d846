"""Monte-Carlo simulation of the single-state protocol under a given attack.

Each iteration: B reflects or measures-and-resends (prob 1/2 each), Eve's
``U`` acts on the returning qubit, A measures in Z or X (prob 1/2 each).
Eve's ancilla is traced out, so A's outcome is drawn from the reduced
2x2 state.  B then discards his |1> results and balances reflections
against kept |0> results; A discards |0> and |+> outcomes for the key but
they still feed the mismatched-basis statistics.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .attack import AttackSpec, BiasParams, ChannelStatistics, JointKeyDistribution, validate
from .errors import DegenerateAttackError, ValidationError

GENERATOR = "PCG64"
BLOCK = 1 << 16
CASES = ("reflect", "sent0", "sent1")
BASES = ("Z", "X")
BALANCE_MODES = ("empirical", "analytic")


@dataclass(frozen=True)
class SimulationConfig:
    attack: AttackSpec
    iterations: int
    seed: int = 0
    balance_mode: str = "empirical"
    shards: int = 1

    def __post_init__(self):
        if int(self.iterations) < 1:
            raise ValidationError("iterations must be >= 1")
        if self.balance_mode not in BALANCE_MODES:
            raise ValidationError(f"balance_mode must be one of {BALANCE_MODES}")
        if int(self.shards) < 1:
            raise ValidationError("shards must be >= 1")


@dataclass
class SimulationTally:
    """Counters indexed ``[case, basis, outcome, kept]``.

    ``case``: 0 reflect, 1 B resent |0>, 2 B resent |1>.  ``outcome`` 1 is
    |1> in the Z basis and |-> in the X basis.  ``kept`` marks iterations
    that survive B's discards (his |1> results and the balancing step).
    """

    counts: np.ndarray
    iterations: int
    seeds: list = field(default_factory=list)
    generator: str = GENERATOR
    balance_mode: str = "empirical"

    def merge(self, other: "SimulationTally") -> "SimulationTally":
        if self.balance_mode != other.balance_mode:
            raise ValidationError("cannot merge tallies with different balance modes")
        return SimulationTally(self.counts + other.counts, self.iterations + other.iterations,
                               self.seeds + other.seeds, self.generator, self.balance_mode)

    __add__ = merge

    @property
    def raw(self):
        """Counts by (case, basis, outcome) ignoring B's discards."""
        return self.counts.sum(axis=3)

    def error_counts(self):
        """Raw-key errors among fully accepted iterations: (k_A, k_B) = (0,1) and (1,0)."""
        c = self.counts
        return {"01": int(c[1, 0, 1, 1]), "10": int(c[0, 1, 1, 1])}

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "generator": self.generator,
            "seeds": self.seeds,
            "balance_mode": self.balance_mode,
            "counts": {
                f"{CASES[c]}/{BASES[bs]}/{o}/{'kept' if k else 'discarded'}": int(self.counts[c, bs, o, k])
                for c in range(3) for bs in range(2) for o in range(2) for k in range(2)
            },
        }


def outcome_table(attack: AttackSpec):
    """P(A sees |1> (Z) or |-> (X)) for each of B's three outgoing states."""
    bp = BiasParams.of(attack.b)
    iso = attack.isometry()
    d = attack.dim
    minus = np.array([1.0, -1.0]) / math.sqrt(2.0)
    table = np.empty((3, 2))
    for case, psi in enumerate((np.array([bp.x, bp.y]), np.array([1.0, 0.0]), np.array([0.0, 1.0]))):
        m = (iso @ psi).reshape(2, d)
        rho_a = m @ m.conj().T
        table[case, 0] = rho_a[1, 1].real
        table[case, 1] = (minus @ rho_a @ minus).real
    return np.clip(table, 0.0, 1.0), bp.x ** 2


def _run_shard(attack, iterations, seed_seq, balance_mode):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    p_one, p_meas0 = outcome_table(attack)
    raw = np.zeros((3, 2, 2), dtype=np.int64)
    done = 0
    while done < iterations:
        n = min(BLOCK, iterations - done)
        _kernels.tally(rng.random((n, 4)), p_one, p_meas0, raw)
        done += n

    counts = np.zeros((3, 2, 2, 2), dtype=np.int64)
    counts[2, :, :, 0] = raw[2]
    n_r = int(raw[0].sum())
    n_m0 = int(raw[1].sum())
    if balance_mode == "empirical":
        if n_r >= n_m0:
            kept_r = rng.multivariate_hypergeometric(raw[0].ravel(), n_m0).reshape(2, 2)
            kept_m0 = raw[1]
        else:
            kept_r = raw[0]
            kept_m0 = rng.multivariate_hypergeometric(raw[1].ravel(), n_r).reshape(2, 2)
    else:
        n_m = n_m0 + int(raw[2].sum())
        keep = n_m0 / n_m if n_m else 0.5
        kept_r = rng.binomial(raw[0], keep)
        kept_m0 = raw[1]
    counts[0, :, :, 1] = kept_r
    counts[0, :, :, 0] = raw[0] - kept_r
    counts[1, :, :, 1] = kept_m0
    counts[1, :, :, 0] = raw[1] - kept_m0
    return counts


def _thread_cap():
    env = os.environ.get("SQKD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValidationError(f"SQKD_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def run(config: SimulationConfig) -> SimulationTally:
    """Simulate ``config.iterations`` protocol rounds.

    With one shard the generator is ``PCG64(seed)``.  With ``k`` shards the
    seed is split by ``SeedSequence(seed).spawn(k)`` and iterations divided
    as evenly as possible; shards are tallied concurrently up to
    ``SQKD_THREADS`` workers and merged in shard order.
    """
    rep = validate(config.attack)
    if not rep.passed:
        raise ValidationError("attack fails unitarity/bias validation")
    k = int(config.shards)
    n = int(config.iterations)
    if k == 1:
        seqs = [np.random.SeedSequence(config.seed)]
    else:
        seqs = np.random.SeedSequence(config.seed).spawn(k)
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    jobs = [(config.attack, m, s, config.balance_mode) for m, s in zip(sizes, seqs) if m > 0]
    workers = min(len(jobs), _thread_cap())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda j: _run_shard(*j), jobs))
    else:
        parts = [_run_shard(*j) for j in jobs]
    return SimulationTally(sum(parts), n, [int(config.seed)], GENERATOR, config.balance_mode)


@dataclass
class Estimate:
    stats: ChannelStatistics
    joint: JointKeyDistribution | None
    stderr: dict
    samples: dict
    unavailable: list

    @property
    def partial(self):
        return bool(self.unavailable)

    def to_dict(self):
        return {
            "stats": self.stats.to_dict(),
            "joint": None if self.joint is None else self.joint.to_dict(),
            "stderr": self.stderr,
            "samples": self.samples,
            "unavailable": self.unavailable,
        }


def _freq(hits, n):
    if n == 0:
        return float("nan"), float("nan")
    p = hits / n
    return p, math.sqrt(p * (1.0 - p) / n)


def estimate(t: SimulationTally) -> Estimate:
    """Channel statistics and empirical q_ij from a tally, with binomial SEs.

    Empirical ``q_ij = 2 * count_ij / n_kept`` where ``n_kept`` counts
    iterations B keeps, so that they are on the same scale as the exact
    acceptance weights.
    """
    raw = t.raw
    est, se, ns = {}, {}, {}

    def put(name, hits, n):
        est[name], se[name] = _freq(int(hits), int(n))
        ns[name] = int(n)

    n_m0 = raw[1].sum()
    put("p_meas0", n_m0, n_m0 + raw[2].sum())
    put("qz0", raw[1, 0, 1], raw[1, 0].sum())
    put("qz1", raw[2, 0, 0], raw[2, 0].sum())
    put("p0plus", raw[1, 1, 0], raw[1, 1].sum())
    put("p1plus", raw[2, 1, 0], raw[2, 1].sum())
    put("pe1", raw[0, 0, 1], raw[0, 0].sum())
    put("peminus", raw[0, 1, 1], raw[0, 1].sum())

    b_hat = est.pop("p_meas0") - 0.5
    se["b"] = se.pop("p_meas0")
    ns["b"] = ns.pop("p_meas0")
    if not math.isnan(b_hat):
        b_hat = min(max(b_hat, -(0.5 - 1e-6)), 0.5 - 1e-6)
    unavailable = [k for k, n in ns.items() if n == 0]
    stats = ChannelStatistics(b=b_hat, **est)

    kept = t.counts[..., 1]
    n_kept = int(kept[0].sum() + kept[1].sum())
    joint = None
    if n_kept:
        cnt = {"q00": kept[0, 0, 1], "q01": kept[1, 0, 1], "q10": kept[0, 1, 1], "q11": kept[1, 1, 1]}
        for name, c in cnt.items():
            f, s = _freq(int(c), n_kept)
            se[name] = 2.0 * s
        try:
            joint = JointKeyDistribution(**{k: 2.0 * int(c) / n_kept for k, c in cnt.items()})
        except DegenerateAttackError:
            unavailable.append("joint")
    else:
        unavailable.append("joint")
    return Estimate(stats, joint, se, ns, unavailable)
