"""Small complex linear algebra and entropy primitives.

Vectors are 1-d ``complex128`` arrays and Hermitian matrices are 2-d
``complex128`` arrays.  Entropies are in bits, with ``0 log 0 = 0``.
"""
import math

import numpy as np

from . import _kernels
from .errors import NumericError, ValidationError

HERMITIAN_TOL = 1e-12
OFFDIAG_TOL = 1e-14
MAX_SWEEPS = 100


def as_vec(entries):
    """Coerce ``entries`` (complex scalars or ``[re, im]`` pairs) to a vector."""
    arr = np.asarray(entries)
    if arr.ndim == 2 and arr.shape[1] == 2 and not np.iscomplexobj(arr):
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.array(arr, dtype=np.complex128).reshape(-1)
    if arr.size < 1:
        raise ValidationError("vector must have dimension >= 1")
    return arr


def inner(u, v):
    """Return <u|v>, conjugate-linear in ``u``."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


def outer(u, v=None):
    """|u><v| (``v`` defaults to ``u``)."""
    u = np.asarray(u, dtype=np.complex128)
    v = u if v is None else np.asarray(v, dtype=np.complex128)
    return np.outer(u, v.conj())


def hermitian_residual(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _check_hermitian(m):
    m = np.array(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))))
    res = hermitian_residual(m)
    if res > HERMITIAN_TOL * scale:
        raise ValidationError(f"matrix is not Hermitian (residual {res:.3g})")
    return 0.5 * (m + m.conj().T)


def eigh(m):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with values real and sorted descending and
    ``vectors[:, k]`` the eigenvector for ``values[k]``.

    Raises:
        ValidationError: ``m`` is not square or not Hermitian.
        NumericError: no convergence within ``MAX_SWEEPS`` sweeps.
    """
    a = _check_hermitian(m)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    tol = OFFDIAG_TOL * max(1.0, float(np.linalg.norm(a)))
    sweeps = _kernels.jacobi(a, v, tol, MAX_SWEEPS)
    if sweeps < 0:
        raise NumericError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    w = np.diagonal(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigenvalues_hermitian(m):
    """Real eigenvalues of Hermitian ``m``, descending."""
    return eigh(m)[0]


def shannon_entropy(p):
    """Shannon entropy in bits of a probability list.

    >>> shannon_entropy([0.25] * 4)
    2.0
    """
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if p.size == 0:
        raise ValidationError("empty probability list")
    if np.any(p < -1e-12):
        raise ValidationError(f"negative probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"probabilities sum to {total!r}, not 1")
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0


def binary_entropy(x):
    """h(x) = H(x, 1 - x)."""
    x = float(x)
    if x < -1e-12 or x > 1.0 + 1e-12 or math.isnan(x):
        raise ValidationError(f"binary_entropy argument {x!r} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    return shannon_entropy((x, 1.0 - x))


def von_neumann_entropy(m):
    """Entropy in bits of the spectrum of ``m`` normalized to unit trace."""
    w = eigenvalues_hermitian(m)
    total = float(w.sum())
    if total <= 0.0:
        raise ValidationError("density operator has non-positive trace")
    w = w / total
    if w[-1] < -1e-10:
        raise ValidationError(f"matrix is not positive semi-definite (eigenvalue {w[-1]:.3g})")
    w = np.clip(w, 0.0, None)
    return shannon_entropy(w / w.sum())
