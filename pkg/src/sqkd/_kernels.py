"""Hot inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``SQKD_DISABLE_NUMBA`` is unset (or ``0``).  Both paths are always
importable so tests and ``benchmarks/`` can compare them directly.
"""
import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_flag = os.environ.get("SQKD_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = numba is not None and _flag in ("", "0", "false", "no")
BACKEND = "numba" if USE_NUMBA else "numpy"

# Iteration classes tallied by the simulator.
REFLECT, SENT0, SENT1 = 0, 1, 2


# ---------------------------------------------------------------------------
# Cyclic Jacobi for complex Hermitian matrices
# ---------------------------------------------------------------------------

def _rotation(app, aqq, apq):
    r = abs(apq)
    ph = apq / r
    tau = (aqq - app) / (2.0 * r)
    if tau >= 0.0:
        t = 1.0 / (tau + math.hypot(1.0, tau))
    else:
        t = -1.0 / (-tau + math.hypot(1.0, tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, t * c, ph


def jacobi_numpy(a, v, tol, max_sweeps):
    """Diagonalize ``a`` in place, accumulating rotations into ``v``.

    Returns the number of sweeps used, or -1 if ``max_sweeps`` ran out.
    """
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(np.abs(a[iu]) ** 2)))
        if off < tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                c, s, ph = _rotation(a[p, p].real, a[q, q].real, apq)
                cph = ph.conjugate()
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cph * cq
                a[:, q] = s * cp + c * cph * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * ph * rq
                a[q, :] = s * rp + c * ph * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * cph * vq
                v[:, q] = s * vp + c * cph * vq
    return -1


def _jacobi_loops(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q].real ** 2 + a[p, q].imag ** 2
        if math.sqrt(2.0 * off) < tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                ph = apq / r
                cph = ph.conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * cph * akq
                    a[k, q] = s * akp + c * cph * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * cph * vkq
                    v[k, q] = s * vkp + c * cph * vkq
    return -1


# ---------------------------------------------------------------------------
# Monte-Carlo protocol tally
# ---------------------------------------------------------------------------

def tally_numpy(u, p_one, p_meas0, counts):
    """Classify iterations from a block of uniforms and add them to ``counts``.

    ``u`` has shape (n, 4): columns are B's reflect/measure choice, B's
    Z outcome, A's basis, A's outcome.  ``p_one[case, basis]`` is the
    probability that A sees |1> (Z basis) or |-> (X basis).  ``counts`` has
    shape (3, 2, 2) indexed by (case, basis, outcome).
    """
    measure = u[:, 0] >= 0.5
    case = np.where(measure, np.where(u[:, 1] < p_meas0, SENT0, SENT1), REFLECT)
    basis = (u[:, 2] >= 0.5).astype(np.intp)
    outcome = (u[:, 3] < p_one[case, basis]).astype(np.intp)
    flat = case * 4 + basis * 2 + outcome
    counts += np.bincount(flat, minlength=12).reshape(3, 2, 2)


def _tally_loops(u, p_one, p_meas0, counts):
    for i in range(u.shape[0]):
        if u[i, 0] >= 0.5:
            if u[i, 1] < p_meas0:
                case = 1
            else:
                case = 2
        else:
            case = 0
        basis = 1 if u[i, 2] >= 0.5 else 0
        outcome = 1 if u[i, 3] < p_one[case, basis] else 0
        counts[case, basis, outcome] += 1


if numba is not None:
    jacobi_jit = numba.njit(cache=True, nogil=True)(_jacobi_loops)
    tally_jit = numba.njit(cache=True, nogil=True)(_tally_loops)
else:  # pragma: no cover
    jacobi_jit = jacobi_numpy
    tally_jit = tally_numpy

jacobi = jacobi_jit if USE_NUMBA else jacobi_numpy
tally = tally_jit if USE_NUMBA else tally_numpy
