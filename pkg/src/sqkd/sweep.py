"""Key-rate sweeps over the depolarizing scenario and the noise threshold."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .attack import check_bias
from .bound import KeyRateReport, key_rate
from .depol import DepolScenario, closed_form_statistics
from .errors import ValidationError
from .qmath import binary_entropy

SWEEP_HEADER = ("b", "q", "r", "eta", "lambda", "p_wrong", "h_pcorrect", "aborted")
THRESHOLD_HEADER = ("b", "tau_q")


@dataclass(frozen=True)
class SweepRow:
    b: float
    q: float
    report: KeyRateReport

    @property
    def p_wrong(self):
        j = self.report.joint
        return j["p01"] + j["p10"]

    @property
    def h_pcorrect(self):
        j = self.report.joint
        return binary_entropy(j["p00"] + j["p11"])

    def values(self):
        rep = self.report
        return (self.b, self.q, rep.r, rep.eta, rep.lam, self.p_wrong, self.h_pcorrect, rep.aborted)


def grid(lo, hi, step):
    """Inclusive grid lo, lo+step, ... <= hi (tolerant of float round-off)."""
    if not step > 0:
        raise ValidationError(f"grid step must be positive, got {step!r}")
    if hi < lo:
        raise ValidationError(f"grid max {hi!r} below min {lo!r}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def rate_at(q, b):
    return key_rate(closed_form_statistics(DepolScenario(q, b)))


def sweep_keyrate(b_values, q_min, q_max, q_step):
    """One row per (b, q), b-major, using the depolarization closed forms."""
    qs = grid(q_min, q_max, q_step)
    for b in b_values:
        check_bias(b)
    for q in qs:
        if not 0.0 <= q <= 1.0:
            raise ValidationError(f"q={q!r} outside [0, 1]")
    return [SweepRow(float(b), q, rate_at(q, b)) for b in b_values for q in qs]


def threshold(b, scan_step=1e-3, tol=1e-6):
    """Smallest q at which the bound stops being positive, or None.

    Scans q upward from 0 for the first point with r <= 0, then bisects the
    bracketing interval to width ``tol``.  r(q) is not assumed monotone.
    """
    b = check_bias(b)

    def r(q):
        return rate_at(q, b).r

    if r(0.0) <= 0.0:
        return None
    n = int(round(1.0 / scan_step))
    lo = 0.0
    for i in range(1, n + 1):
        hi = min(i * scan_step, 1.0)
        if r(hi) <= 0.0:
            break
        lo = hi
    else:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if r(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def thresholds(b_values):
    return [(float(b), threshold(b)) for b in b_values]


def write_sweep_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        *nums, aborted = row.values()
        w.writerow([f"{v:.12g}" for v in nums] + [int(aborted)])


def write_threshold_csv(pairs, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(THRESHOLD_HEADER)
    for b, tau in pairs:
        w.writerow([f"{b:.12g}", "" if tau is None else f"{tau:.4f}"])


def crossover_q(b_a, b_b, q_max=0.5, step=1e-3):
    """Smallest grid q beyond which p_wrong(b_a) < p_wrong(b_b) holds up to q_max."""
    qs = np.array(grid(0.0, q_max, step))
    diff = np.array([
        SweepRow(b_a, q, rate_at(q, b_a)).p_wrong - SweepRow(b_b, q, rate_at(q, b_b)).p_wrong
        for q in qs
    ])
    bad = np.nonzero(diff >= 0.0)[0]
    if bad.size == 0:
        return 0.0
    if bad[-1] == qs.size - 1:
        return None
    return float(qs[bad[-1] + 1])
