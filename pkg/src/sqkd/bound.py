"""Key-rate lower bound from observable channel statistics.

The bound is

    r >= h(p00 + p01) - h(p00 + p11) - p01 - p10 - (p00 + p11) h(lambda)

with ``lambda`` driven by a lower bound ``B`` on ``|<h0|h1>|^2`` that is
itself estimated from mismatched-basis statistics.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

from .attack import BiasParams, ChannelStatistics, JointKeyDistribution
from .errors import AbortCondition
from .qmath import binary_entropy, shannon_entropy

log = logging.getLogger(__name__)

ABORT_TOL = 1e-9


def eta_lower_bound(s: ChannelStatistics) -> float:
    """Lower bound on Re<h1|h0> from the observed statistics.

    Every inner product is read off exactly from a statistic except
    Re<e0|e3>, which enters only through a Cauchy-Schwarz bound on
    Re<e1|e2> <= sqrt(<e1|e1><e2|e2>).
    """
    bp = BiasParams.of(s.b)
    x2, y2, xy = 0.5 + bp.b, 0.5 - bp.b, bp.xy
    re01 = s.p0plus - 0.5
    re23 = s.p1plus - 0.5
    re13 = (s.pe1 - x2 * s.qz0 - y2 * (1.0 - s.qz1)) / (2.0 * xy)
    re12_max = math.sqrt(max(s.qz0, 0.0) * max(s.qz1, 0.0))
    re03_min = (0.5 - s.peminus - x2 * re01 - y2 * re23) / xy - re12_max
    return bp.gamma * re01 - bp.gamma * s.qz0 + bp.delta * re03_min - bp.delta * re13


def _lambda_raw(q00, q11, cap_b):
    if q00 + q11 <= 1e-12:
        raise AbortCondition("q00 + q11 ~ 0: too much noise, abort")
    return 0.5 + math.sqrt(4.0 * (q00 - q11) ** 2 + cap_b) / (4.0 * (q00 + q11))


def lambda_from(q00, q01, q10, q11, cap_b):
    """Eigenvalue bound ``lambda`` clamped into [1/2, 1].

    ``q01`` and ``q10`` do not enter the formula; they are accepted so
    callers can pass a full set of weights.
    """
    if cap_b < 0:
        raise ValueError("cap_b must be non-negative")
    lam = _lambda_raw(q00, q11, cap_b)
    if lam > 1.0 + 1e-9:
        log.warning("lambda=%.12g exceeds 1; statistics look inconsistent, clamping", lam)
    return min(max(lam, 0.5), 1.0)


def weights_from_statistics(s: ChannelStatistics) -> JointKeyDistribution:
    """Acceptance weights q_ij read off the channel statistics."""
    return JointKeyDistribution(
        q00=0.5 * s.pe1,
        q01=0.5 * s.qz0,
        q10=0.5 * s.peminus,
        q11=0.5 * (1.0 - s.p0plus),
    )


@dataclass
class KeyRateReport:
    eta: float
    cap_b: float
    lam: float
    h_b_given_a: float
    s_bec: float
    s_ec_upper: float
    r: float
    joint: dict
    aborted: bool = False
    abort_reason: str = ""
    diagnostics: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        # external names
        d["capB"] = d.pop("cap_b")
        d["lambda"] = d.pop("lam")
        d["hBA"] = d.pop("h_b_given_a")
        d["sBEC"] = d.pop("s_bec")
        d["sEC_upper"] = d.pop("s_ec_upper")
        return d


def key_rate(s: ChannelStatistics) -> KeyRateReport:
    """Evaluate the key-rate lower bound ``r`` (bits per accepted iteration).

    Abort conditions (q00 or q11 not positive) set ``aborted`` rather than
    raising; the numbers are still filled in where defined.
    """
    s.validate()
    jd = weights_from_statistics(s)
    eta = eta_lower_bound(s)
    cap_b = max(eta, 0.0) ** 2
    diagnostics = []
    reasons = []
    if jd.q00 <= ABORT_TOL:
        reasons.append("q00 <= 1e-9")
    if jd.q11 <= ABORT_TOL:
        reasons.append("q11 <= 1e-9")
    if eta < 0:
        diagnostics.append(f"eta={eta:.6g} < 0; using B = 0")
    try:
        raw = _lambda_raw(jd.q00, jd.q11, cap_b)
        if raw > 1.0 + 1e-9:
            diagnostics.append(f"lambda={raw:.12g} > 1 clamped to 1 (inconsistent statistics)")
        lam = lambda_from(jd.q00, jd.q01, jd.q10, jd.q11, cap_b)
    except AbortCondition as exc:
        reasons.append(str(exc))
        lam = 0.5
    p00, p01, p10, p11 = jd.probabilities
    p_correct = p00 + p11
    s_bec = shannon_entropy(jd.probabilities)
    s_ec_upper = binary_entropy(p_correct) + p01 + p10 + p_correct * binary_entropy(lam)
    h_ba = s_bec - binary_entropy(p00 + p01)
    r = binary_entropy(p00 + p01) - binary_entropy(p_correct) - p01 - p10 - p_correct * binary_entropy(lam)
    return KeyRateReport(
        eta=eta, cap_b=cap_b, lam=lam, h_b_given_a=h_ba, s_bec=s_bec, s_ec_upper=s_ec_upper,
        r=r, joint=jd.to_dict(), aborted=bool(reasons), abort_reason="; ".join(reasons),
        diagnostics=diagnostics,
    )
