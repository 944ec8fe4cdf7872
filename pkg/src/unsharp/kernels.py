"""Hot inner loops.

Each kernel has a scalar-loop form, compiled with numba when available, and a
vectorised numpy form. ``UNSHARP_DISABLE_NUMBA=1`` routes the public names
(``dykstra``, ``jacobi_eigh``, ``xorshift_sample``) to the numpy forms. Both forms
produce the same numbers up to floating point reassociation; the sampler is
bit-identical because it is integer arithmetic.
"""

import numpy as np

from ._jit import NUMBA_ENABLED, njit

FEASIBLE = 0
INFEASIBLE = 1
INDETERMINATE = 2

_MASK64 = 0xFFFFFFFFFFFFFFFF
_XS_MULT = 0x2545F4914F6CDD1D
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB


# ---------------------------------------------------------------------------
# Dykstra alternating projections for the grand-POVM feasibility problem
# ---------------------------------------------------------------------------
#
# Variables are stacked Bloch coordinates (a, b1, b2, b3) per grand effect.
# Set 1: affine marginal constraints, P(v) = proj @ v + offset.
# Set 2: product of cones |b| <= a.
# Set 3: product of cones |b| <= 1 - a.


def _dykstra_loops(proj, offset, x_init, max_iter, tol_feas, tol_infeas, stall_tol, window):
    n = x_init.shape[0]
    m = n // 4
    x = x_init.copy()
    y = np.empty(n)
    z1 = np.empty(n)
    z2 = np.empty(n)
    p1 = np.zeros(n)
    p2 = np.zeros(n)
    residual = np.inf
    prev = np.inf
    status = INDETERMINATE
    it = 0
    for it in range(1, max_iter + 1):
        for i in range(n):
            s = offset[i]
            for j in range(n):
                s += proj[i, j] * x[j]
            y[i] = s

        for k in range(m):
            o = 4 * k
            a = y[o] + p1[o]
            b0 = y[o + 1] + p1[o + 1]
            b1 = y[o + 2] + p1[o + 2]
            b2 = y[o + 3] + p1[o + 3]
            r = np.sqrt(b0 * b0 + b1 * b1 + b2 * b2)
            if r <= a:
                na, s = a, 1.0
            elif r <= -a:
                na, s = 0.0, 0.0
            else:
                na = 0.5 * (a + r)
                s = na / r
            z1[o] = na
            z1[o + 1] = s * b0
            z1[o + 2] = s * b1
            z1[o + 3] = s * b2
            p1[o] = a - z1[o]
            p1[o + 1] = b0 - z1[o + 1]
            p1[o + 2] = b1 - z1[o + 2]
            p1[o + 3] = b2 - z1[o + 3]

        for k in range(m):
            o = 4 * k
            c = 1.0 - (z1[o] + p2[o])
            b0 = z1[o + 1] + p2[o + 1]
            b1 = z1[o + 2] + p2[o + 2]
            b2 = z1[o + 3] + p2[o + 3]
            r = np.sqrt(b0 * b0 + b1 * b1 + b2 * b2)
            if r <= c:
                nc, s = c, 1.0
            elif r <= -c:
                nc, s = 0.0, 0.0
            else:
                nc = 0.5 * (c + r)
                s = nc / r
            z2[o] = 1.0 - nc
            z2[o + 1] = s * b0
            z2[o + 2] = s * b1
            z2[o + 3] = s * b2
            p2[o] = (z1[o] + p2[o]) - z2[o]
            p2[o + 1] = b0 - z2[o + 1]
            p2[o + 2] = b1 - z2[o + 2]
            p2[o + 3] = b2 - z2[o + 3]

        residual = 0.0
        for i in range(n):
            d = abs(y[i] - z2[i])
            if d > residual:
                residual = d
            x[i] = z2[i]

        if residual < tol_feas:
            viol = 0.0
            for k in range(m):
                o = 4 * k
                r = np.sqrt(y[o + 1] ** 2 + y[o + 2] ** 2 + y[o + 3] ** 2)
                v = max(r - y[o], r - (1.0 - y[o]))
                if v > viol:
                    viol = v
            if viol <= tol_feas:
                status = FEASIBLE
                break

        if it % window == 0:
            if residual > tol_infeas and abs(prev - residual) < stall_tol:
                status = INFEASIBLE
                break
            prev = residual
    return y, residual, it, status


def _soc_project(a, b):
    """Project rows (a, b) onto |b| <= a; returns projected (a, b)."""
    r = np.linalg.norm(b, axis=1)
    inside = r <= a
    polar = r <= -a
    na = np.where(inside, a, np.where(polar, 0.0, 0.5 * (a + r)))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(inside, 1.0, np.where(polar, 0.0, na / r))
    return na, b * scale[:, None]


def dykstra_numpy(proj, offset, x_init, max_iter, tol_feas, tol_infeas, stall_tol, window):
    n = x_init.shape[0]
    m = n // 4
    x = x_init.copy()
    p1 = np.zeros((m, 4))
    p2 = np.zeros((m, 4))
    residual = np.inf
    prev = np.inf
    status = INDETERMINATE
    y = x.copy()
    it = 0
    for it in range(1, max_iter + 1):
        y = proj @ x + offset
        w = y.reshape(m, 4) + p1
        a1, b1 = _soc_project(w[:, 0], w[:, 1:])
        z1 = np.column_stack((a1, b1))
        p1 = w - z1
        w = z1 + p2
        c2, b2 = _soc_project(1.0 - w[:, 0], w[:, 1:])
        z2 = np.column_stack((1.0 - c2, b2))
        p2 = w - z2
        x = z2.ravel()
        residual = float(np.max(np.abs(y - x)))

        if residual < tol_feas:
            yb = y.reshape(m, 4)
            r = np.linalg.norm(yb[:, 1:], axis=1)
            viol = float(np.max(np.maximum(r - yb[:, 0], r - 1.0 + yb[:, 0])))
            if viol <= tol_feas:
                status = FEASIBLE
                break

        if it % window == 0:
            if residual > tol_infeas and abs(prev - residual) < stall_tol:
                status = INFEASIBLE
                break
            prev = residual
    return y, residual, it, status


# ---------------------------------------------------------------------------
# Cyclic complex Jacobi eigensolver (Hermitian, tiny dimension)
# ---------------------------------------------------------------------------


def _jacobi_loops(a, tol, max_sweeps):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(a[i, j]) ** 2
    scale = max(1.0, np.sqrt(scale))
    # entries below skip cannot hold the off-diagonal norm above tol * scale,
    # and rotating them would divide by (possibly subnormal) magnitudes
    skip = tol * scale / n
    sweeps = -1
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += abs(a[i, j]) ** 2
        if np.sqrt(off) <= tol * scale:
            sweeps = sweep
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = diag(1, conj(phase)) on (p, q) followed by a real rotation
                jpp = c + 0j
                jpq = s + 0j
                jqp = -s * np.conj(phase)
                jqq = c * np.conj(phase)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * jpp + akq * jqp
                    a[k, q] = akp * jpq + akq * jqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(jpp) * apk + np.conj(jqp) * aqk
                    a[q, k] = np.conj(jpq) * apk + np.conj(jqq) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * jpp + vkq * jqp
                    v[k, q] = vkp * jpq + vkq * jqq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    order = np.argsort(w)
    return w[order], v[:, order], sweeps


def jacobi_numpy(a, tol, max_sweeps):
    """Same cyclic sweep as the scalar kernel, with rotations applied as 2-column slices."""
    n = a.shape[0]
    a = np.array(a, dtype=np.complex128)
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.linalg.norm(a)))
    mask = ~np.eye(n, dtype=bool)
    skip = tol * scale / n
    sweeps = -1
    for sweep in range(max_sweeps + 1):
        if np.linalg.norm(a[mask]) <= tol * scale:
            sweeps = sweep
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = np.copysign(1.0, tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    w = a.diagonal().real.copy()
    order = np.argsort(w)
    return w[order], v[:, order], sweeps


# ---------------------------------------------------------------------------
# xorshift64* sampler with inverse-CDF lookup
# ---------------------------------------------------------------------------


def splitmix64(x):
    """One splitmix64 output for the 64-bit input ``x`` (Python ints)."""
    z = (x + _SM_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * _SM_MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _SM_MIX2) & _MASK64
    return z ^ (z >> 31)


def _sample_loops(cdf, n, state):
    k = cdf.shape[0]
    counts = np.zeros(k, dtype=np.int64)
    mult = np.uint64(_XS_MULT)
    s12 = np.uint64(12)
    s25 = np.uint64(25)
    s27 = np.uint64(27)
    s11 = np.uint64(11)
    x = state
    for _ in range(n):
        x ^= x >> s12
        x ^= x << s25
        x ^= x >> s27
        out = x * mult
        u = (out >> s11) * 1.1102230246251565e-16
        lo = 0
        hi = k - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u < cdf[mid]:
                hi = mid
            else:
                lo = mid + 1
        counts[lo] += 1
    return counts, x


def sample_python(cdf, n, state):
    """Reference path: plain integers, one draw at a time."""
    k = len(cdf)
    counts = np.zeros(k, dtype=np.int64)
    x = int(state)
    cdf_list = [float(c) for c in cdf]
    for _ in range(n):
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        out = (x * _XS_MULT) & _MASK64
        u = (out >> 11) * 1.1102230246251565e-16
        lo, hi = 0, k - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u < cdf_list[mid]:
                hi = mid
            else:
                lo = mid + 1
        counts[lo] += 1
    return counts, np.uint64(x)


if NUMBA_ENABLED:
    dykstra_numba = njit(cache=True)(_dykstra_loops)
    jacobi_numba = njit(cache=True)(_jacobi_loops)
    sample_numba = njit(cache=True)(_sample_loops)
    dykstra = dykstra_numba
    jacobi_eigh = jacobi_numba
    xorshift_sample = sample_numba
else:
    dykstra_numba = jacobi_numba = sample_numba = None
    dykstra = dykstra_numpy
    jacobi_eigh = jacobi_numpy
    xorshift_sample = sample_python
