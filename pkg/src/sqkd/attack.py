"""Restricted collective attacks ``(b, U)`` and everything derived from them.

Eve replaces A's |+> with ``|e> = X|0> + Y|1>`` (``X = sqrt(1/2 + b)``,
``Y = sqrt(1/2 - b)``) and probes the returning qubit with a unitary ``U``:

    U|0> = |0, e0> + |1, e1>
    U|1> = |0, e2> + |1, e3>

The ancilla vectors ``e0..e3`` fully specify ``U`` on the relevant inputs.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .errors import BiasRangeError, CapabilityError, DegenerateAttackError, ValidationError

BIAS_LIMIT = 0.5 - 1e-6
UNITARITY_TOL = 1e-9
MAX_ORACLE_DIM = 8


def check_bias(b):
    b = float(b)
    if not abs(b) <= BIAS_LIMIT:
        raise BiasRangeError(f"bias b={b!r} outside |b| <= 1/2 - 1e-6")
    return b


@dataclass(frozen=True)
class BiasParams:
    """Amplitudes that depend only on the forward-channel bias."""

    b: float
    x: float      # sqrt(1/2 + b)
    y: float      # sqrt(1/2 - b)
    xy: float     # sqrt(1/4 - b^2), exact at b = 0
    gamma: float  # sqrt(1 + 2b)
    delta: float  # sqrt(1 - 2b)
    alpha: float  # <+|e>
    beta: float   # <-|e>

    @classmethod
    def of(cls, b):
        b = check_bias(b)
        x = math.sqrt(0.5 + b)
        y = math.sqrt(0.5 - b)
        return cls(
            b=b, x=x, y=y, xy=math.sqrt(0.25 - b * b),
            gamma=math.sqrt(1.0 + 2.0 * b),
            delta=math.sqrt(1.0 - 2.0 * b),
            alpha=(x + y) / math.sqrt(2.0),
            beta=(x - y) / math.sqrt(2.0),
        )


def _frozen_vec(v):
    arr = qmath.as_vec(v).copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AttackSpec:
    b: float
    e0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", float(self.b))
        vecs = [_frozen_vec(getattr(self, name)) for name in ("e0", "e1", "e2", "e3")]
        if len({v.size for v in vecs}) != 1:
            raise ValidationError("e0..e3 must share one dimension")
        for name, v in zip(("e0", "e1", "e2", "e3"), vecs):
            object.__setattr__(self, name, v)

    @property
    def dim(self):
        return int(self.e0.size)

    @property
    def vectors(self):
        return (self.e0, self.e1, self.e2, self.e3)

    def isometry(self):
        """The (2d x 2) matrix whose columns are U|0> and U|1>.

        Row index is ``t * d + k`` for transit qubit ``t`` and ancilla basis ``k``.
        """
        return np.column_stack([
            np.concatenate([self.e0, self.e1]),
            np.concatenate([self.e2, self.e3]),
        ])

    def to_dict(self):
        def pairs(v):
            return [[float(z.real), float(z.imag)] for z in v]

        return {"b": self.b, "dim": self.dim, "e0": pairs(self.e0), "e1": pairs(self.e1),
                "e2": pairs(self.e2), "e3": pairs(self.e3)}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValidationError("attack file must hold a JSON object")
        for key in ("b", "e0", "e1", "e2", "e3"):
            if key not in data:
                raise ValidationError(f"attack field '{key}' is missing")
        try:
            b = float(data["b"])
        except (TypeError, ValueError):
            raise ValidationError("attack field 'b' is not a number") from None
        vecs = []
        for key in ("e0", "e1", "e2", "e3"):
            raw = data[key]
            try:
                arr = np.asarray(raw, dtype=np.float64)
            except (TypeError, ValueError):
                raise ValidationError(f"attack field '{key}' is not an array of [re, im] pairs") from None
            if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
                raise ValidationError(f"attack field '{key}' is not an array of [re, im] pairs")
            vecs.append(arr[:, 0] + 1j * arr[:, 1])
        if "dim" in data and any(v.size != data["dim"] for v in vecs):
            raise ValidationError("attack field 'dim' does not match vector lengths")
        return cls(b, *vecs)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed attack JSON: {exc}") from None
        return cls.from_dict(data)


def identity_attack(b=0.0, dim=1):
    """Noiseless return channel, ancilla left in its first basis state."""
    one = np.zeros(dim, dtype=np.complex128)
    one[0] = 1.0
    zero = np.zeros(dim, dtype=np.complex128)
    return AttackSpec(b, one, zero, zero, one)


def random_attack(dim, rng, b=None, scale=None):
    """Draw a random valid attack of ancilla dimension ``dim``.

    With ``scale=None`` the 2d x 2d unitary comes from orthonormalizing the
    columns of a complex Gaussian matrix.  A finite ``scale`` gives instead
    ``exp(i * scale * H)`` for a random Hermitian ``H`` (a low-noise attack).
    ``b`` defaults to a uniform draw from [-0.45, 0.45].
    """
    n = 2 * dim
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if scale is None:
        u, r = np.linalg.qr(g)
        u = u * (np.diagonal(r) / np.abs(np.diagonal(r)))
    else:
        w, v = np.linalg.eigh(0.5 * (g + g.conj().T))
        u = (v * np.exp(1j * scale * w)) @ v.conj().T
    if b is None:
        b = rng.uniform(-0.45, 0.45)
    return AttackSpec(b, u[:dim, 0], u[dim:, 0], u[:dim, dim], u[dim:, dim])


@dataclass(frozen=True)
class ValidationReport:
    norm0_residual: float   # |<e0|e0> + <e1|e1> - 1|
    norm1_residual: float   # |<e2|e2> + <e3|e3> - 1|
    orth_residual: float    # |<e0|e2> + <e1|e3>|
    bias_ok: bool
    passed: bool

    def to_dict(self):
        return dict(self.__dict__)


def validate(a: AttackSpec) -> ValidationReport:
    e0, e1, e2, e3 = a.vectors
    r0 = abs(qmath.inner(e0, e0).real + qmath.inner(e1, e1).real - 1.0)
    r1 = abs(qmath.inner(e2, e2).real + qmath.inner(e3, e3).real - 1.0)
    ro = abs(qmath.inner(e0, e2) + qmath.inner(e1, e3))
    bias_ok = abs(a.b) <= BIAS_LIMIT
    ok = bias_ok and max(r0, r1, ro) <= UNITARITY_TOL
    return ValidationReport(r0, r1, ro, bias_ok, ok)


def _require_valid(a):
    rep = validate(a)
    if not rep.passed:
        if not rep.bias_ok:
            raise BiasRangeError(f"bias b={a.b!r} outside |b| <= 1/2 - 1e-6")
        raise ValidationError(
            "attack violates unitarity: residuals "
            f"{rep.norm0_residual:.3g}, {rep.norm1_residual:.3g}, {rep.orth_residual:.3g}")
    return BiasParams.of(a.b)


@dataclass(frozen=True)
class DerivedStates:
    f0: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray
    g0: np.ndarray
    g1: np.ndarray
    h0: np.ndarray
    h1: np.ndarray


def derive_states(a: AttackSpec) -> DerivedStates:
    """Ancilla states in the X basis (f), after |e> (g) and the h pair."""
    bp = _require_valid(a)
    e0, e1, e2, e3 = a.vectors
    f0 = 0.5 * (e0 + e1 + e2 + e3)
    f1 = 0.5 * (e0 - e1 + e2 - e3)
    f2 = 0.5 * (e0 + e1 - e2 - e3)
    f3 = 0.5 * (e0 - e1 - e2 + e3)
    g0 = bp.alpha * f0 + bp.beta * f2
    g1 = bp.alpha * f1 + bp.beta * f3
    return DerivedStates(f0, f1, f2, f3, g0, g1, g0 - g1, e0 - e1)


def g1_from_e(a: AttackSpec):
    """g1 written directly in the e basis: (X e0 - X e1 + Y e2 - Y e3) / sqrt(2)."""
    bp = _require_valid(a)
    e0, e1, e2, e3 = a.vectors
    return (bp.x * (e0 - e1) + bp.y * (e2 - e3)) / math.sqrt(2.0)


@dataclass(frozen=True)
class JointKeyDistribution:
    """Acceptance weights q_ij and raw-key probabilities p_ij = q_ij / N.

    Index ``i`` is A's key bit, ``j`` is B's.
    """

    q00: float
    q01: float
    q10: float
    q11: float
    norm: float = field(init=False)
    p00: float = field(init=False)
    p01: float = field(init=False)
    p10: float = field(init=False)
    p11: float = field(init=False)

    def __post_init__(self):
        qs = [float(getattr(self, k)) for k in ("q00", "q01", "q10", "q11")]
        if min(qs) < -1e-12:
            raise ValidationError(f"negative acceptance weight {min(qs):.3g}")
        qs = [max(v, 0.0) for v in qs]
        n = sum(qs)
        if n <= 1e-12:
            raise DegenerateAttackError("no accepted iterations: N = sum q_ij ~ 0")
        for k, v in zip(("q00", "q01", "q10", "q11"), qs):
            object.__setattr__(self, k, v)
            object.__setattr__(self, "p" + k[1:], v / n)
        object.__setattr__(self, "norm", n)

    @property
    def probabilities(self):
        return (self.p00, self.p01, self.p10, self.p11)

    @property
    def weights(self):
        return (self.q00, self.q01, self.q10, self.q11)

    def h_b_given_a(self):
        """H(B|A) = H({p_ij}) - h(p00 + p01)."""
        return qmath.shannon_entropy(self.probabilities) - qmath.binary_entropy(self.p00 + self.p01)

    def to_dict(self):
        return {"q00": self.q00, "q01": self.q01, "q10": self.q10, "q11": self.q11, "N": self.norm,
                "p00": self.p00, "p01": self.p01, "p10": self.p10, "p11": self.p11}


STAT_FIELDS = ("b", "qz0", "qz1", "p0plus", "p1plus", "pe1", "peminus")


@dataclass(frozen=True)
class ChannelStatistics:
    """Observable statistics from which the key-rate bound is computed.

    ``qz0``: A reads |1> when B resent |0>.  ``qz1``: A reads |0> when B resent
    |1>.  ``p0plus``/``p1plus``: A reads |+> when B resent |0>/|1>.  ``pe1``
    and ``peminus``: A reads |1> / |-> when B reflected.
    """

    b: float
    qz0: float
    qz1: float
    p0plus: float
    p1plus: float
    pe1: float
    peminus: float

    def __post_init__(self):
        for k in STAT_FIELDS:
            object.__setattr__(self, k, float(getattr(self, k)))

    def validate(self):
        check_bias(self.b)
        for k in STAT_FIELDS[1:]:
            v = getattr(self, k)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValidationError(f"statistic '{k}'={v!r} outside [0, 1]")
        return self

    def to_dict(self):
        return {k: getattr(self, k) for k in STAT_FIELDS}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ValidationError("statistics file must hold a JSON object")
        vals = {}
        for k in STAT_FIELDS:
            if k not in data:
                raise ValidationError(f"statistics field '{k}' is missing")
            try:
                vals[k] = float(data[k])
            except (TypeError, ValueError):
                raise ValidationError(f"statistics field '{k}' is not a number") from None
            if math.isnan(vals[k]):
                raise ValidationError(f"statistics field '{k}' is NaN")
        return cls(**vals).validate()


def joint_distribution(a: AttackSpec) -> JointKeyDistribution:
    st = derive_states(a)
    re = lambda u, v: qmath.inner(u, v).real  # noqa: E731
    return JointKeyDistribution(
        q00=0.25 * (1.0 - 2.0 * re(st.g0, st.g1)),
        q01=0.5 * re(a.e1, a.e1),
        q10=0.5 * re(st.g1, st.g1),
        q11=0.25 * (1.0 - 2.0 * re(a.e0, a.e1)),
    )


def exact_statistics(a: AttackSpec) -> ChannelStatistics:
    bp = _require_valid(a)
    e0, e1, e2, e3 = a.vectors
    re = lambda u, v: qmath.inner(u, v).real  # noqa: E731
    pe1 = bp.x ** 2 * re(e1, e1) + bp.y ** 2 * re(e3, e3) + 2.0 * bp.xy * re(e1, e3)
    g1 = derive_states(a).g1
    return ChannelStatistics(
        b=bp.b,
        qz0=re(e1, e1),
        qz1=re(e2, e2),
        p0plus=0.5 * (1.0 + 2.0 * re(e0, e1)),
        p1plus=0.5 * (1.0 + 2.0 * re(e2, e3)),
        pe1=pe1,
        peminus=re(g1, g1),
    )


def h_overlap(a: AttackSpec):
    """<h0|h1>, the quantity the bound engine lower-bounds in modulus."""
    st = derive_states(a)
    return qmath.inner(st.h0, st.h1)


def conditional_state_be(a: AttackSpec):
    """rho_BE after acceptance, as a (2d x 2d) matrix ordered (B, E)."""
    st = derive_states(a)
    jd = joint_distribution(a)
    d = a.dim
    rho = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    rho[:d, :d] = 0.5 * (0.5 * qmath.outer(st.h0) + qmath.outer(st.g1))
    rho[d:, d:] = 0.5 * (0.5 * qmath.outer(st.h1) + qmath.outer(a.e1))
    return rho / jd.norm


def exact_conditional_entropy(a: AttackSpec) -> float:
    """S(B|E) = S(BE) - S(E) for this particular attack, in bits."""
    if a.dim > MAX_ORACLE_DIM:
        raise CapabilityError(f"ancilla dimension {a.dim} exceeds oracle cap {MAX_ORACLE_DIM}")
    rho_be = conditional_state_be(a)
    d = a.dim
    rho_e = rho_be[:d, :d] + rho_be[d:, d:]
    return qmath.von_neumann_entropy(rho_be) - qmath.von_neumann_entropy(rho_e)
