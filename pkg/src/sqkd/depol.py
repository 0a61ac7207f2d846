"""Depolarizing return channel: closed forms and a concrete Stinespring dilation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attack import AttackSpec, BiasParams, ChannelStatistics, JointKeyDistribution, check_bias
from .errors import ValidationError

PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True)
class DepolScenario:
    q: float
    b: float = 0.0

    def __post_init__(self):
        q = float(self.q)
        if not 0.0 <= q <= 1.0:
            raise ValidationError(f"depolarization parameter q={q!r} outside [0, 1]")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "b", check_bias(self.b))


def error_rate_e(s: DepolScenario) -> float:
    """Q_e: probability A reads |-> after a reflection."""
    bp = BiasParams.of(s.b)
    return (1.0 - s.q) * (0.5 - bp.xy) + 0.5 * s.q


def closed_form_statistics(s: DepolScenario) -> ChannelStatistics:
    qz = 0.5 * s.q
    return ChannelStatistics(
        b=s.b, qz0=qz, qz1=qz, p0plus=0.5, p1plus=0.5,
        pe1=0.5 - s.b * (1.0 - s.q),
        peminus=error_rate_e(s),
    )


def closed_form_qij(s: DepolScenario) -> JointKeyDistribution:
    return JointKeyDistribution(
        q00=0.5 * (0.5 - s.b * (1.0 - s.q)),
        q01=0.25 * s.q,
        q10=0.5 * error_rate_e(s),
        q11=0.25,
    )


def kraus_operators(q):
    """Pauli Kraus set, ordered (I, X, Y, Z)."""
    w = (1.0 - 0.75 * q, 0.25 * q, 0.25 * q, 0.25 * q)
    return [math.sqrt(wk) * p for wk, p in zip(w, PAULI)]


def apply_channel(rho, q):
    return sum(k @ rho @ k.conj().T for k in kraus_operators(q))


def dilation(s: DepolScenario, mixing=None) -> AttackSpec:
    """AttackSpec (d = 4) realizing the channel through its Kraus operators.

    ``e_{2j+i}`` collects ``<i|K_k|j>`` over the ancilla index ``k``.  An
    optional 4x4 unitary ``mixing`` yields the equivalent Kraus set
    ``K'_m = sum_k mixing[m, k] K_k``.
    """
    ks = np.array(kraus_operators(s.q))
    if mixing is not None:
        ks = np.tensordot(np.asarray(mixing, dtype=np.complex128), ks, axes=1)
    return AttackSpec(s.b, ks[:, 0, 0], ks[:, 1, 0], ks[:, 0, 1], ks[:, 1, 1])
