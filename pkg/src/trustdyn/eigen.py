"""Eigenvalues of small dense real matrices, implemented in-house.

Householder reduction to upper Hessenberg form followed by the Francis
double-shift QR iteration (EISPACK ``hqr`` lineage).  Complex conjugate
pairs come out of the trailing 2x2 blocks of the quasi-triangular form.
Intended for the 3x3/5x5 Jacobians of the replicator flows; works for any
modest n.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import NumericalError

__all__ = ["eigenvalues", "multiset_distance"]

_EPS = np.finfo(float).eps


def _to_hessenberg(a: np.ndarray) -> np.ndarray:
    """Orthogonal similarity reduction to upper Hessenberg form."""
    h = np.array(a, dtype=float, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        norm_x = math.sqrt(float(np.dot(x, x)))
        if norm_x == 0.0:
            continue
        # reflector v = x - alpha e1 with alpha chosen to avoid cancellation
        alpha = -math.copysign(norm_x, x[0]) if x[0] != 0.0 else -norm_x
        v = x
        v[0] -= alpha
        vnorm2 = float(np.dot(v, v))
        if vnorm2 == 0.0:
            continue
        scale = 2.0 / vnorm2
        h[k + 1:, :] -= np.outer(v, scale * (h[k + 1:, :].T @ v))
        h[:, k + 1:] -= np.outer(scale * (h[:, k + 1:] @ v), v)
        h[k + 1, k] = alpha
        h[k + 2:, k] = 0.0
    return h


def _hqr(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by double-shift QR with
    deflation and occasional exceptional shifts."""
    a = h.copy()
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])
    if anorm == 0.0:
        return wr + 1j * wi
    nn = n - 1
    t = 0.0
    while nn >= 0:
        its = 0
        while True:
            # find the lowest split point of the active block
            l = 0
            for ll in range(nn, 0, -1):
                s = abs(a[ll - 1, ll - 1]) + abs(a[ll, ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll, ll - 1]) <= _EPS * s:
                    a[ll, ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn, nn]
            if l == nn:
                # 1x1 block deflates
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                # 2x2 block deflates: real pair or conjugate pair
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn] = z
                    wi[nn - 1] = -z
                nn -= 2
                break
            if its == 30:
                raise NumericalError("QR eigenvalue iteration did not converge")
            if its in (10, 20):
                # exceptional shift breaks rare cycling
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            # two consecutive small subdiagonals locate the sweep start
            m = l
            p = q = r = 0.0
            for mm in range(nn - 2, l - 1, -1):
                z = a[mm, mm]
                r = x - z
                s = y - z
                p = (r * s - w) / a[mm + 1, mm] + a[mm, mm + 1]
                q = a[mm + 1, mm + 1] - z - r - s
                r = a[mm + 2, mm + 1]
                s = abs(p) + abs(q) + abs(r)
                if s != 0.0:
                    p /= s
                    q /= s
                    r /= s
                if mm == l:
                    m = mm
                    break
                u = abs(a[mm, mm - 1]) * (abs(q) + abs(r))
                vv = abs(p) * (abs(a[mm - 1, mm - 1]) + abs(z) + abs(a[mm + 1, mm + 1]))
                if u <= _EPS * vv:
                    m = mm
                    break
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            # double implicit QR sweep over rows m..nn
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                for j in range(k, nn + 1):
                    p = a[k, j] + q * a[k + 1, j]
                    if k != nn - 1:
                        p += r * a[k + 2, j]
                        a[k + 2, j] -= p * z
                    a[k + 1, j] -= p * y
                    a[k, j] -= p * x
                mmin = nn if nn < k + 3 else k + 3
                for i in range(l, mmin + 1):
                    p = x * a[i, k] + y * a[i, k + 1]
                    if k != nn - 1:
                        p += z * a[i, k + 2]
                        a[i, k + 2] -= p * r
                    a[i, k + 1] -= p * q
                    a[i, k] -= p
    return wr + 1j * wi


def eigenvalues(matrix) -> np.ndarray:
    """All eigenvalues (complex, unordered) of a square real matrix."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([a[0, 0]], dtype=complex)
    return _hqr(_to_hessenberg(a))


def multiset_distance(a, b) -> float:
    """Smallest achievable max pairwise distance over bijections between two
    equal-size collections of complex numbers.  Brute force; fine for the
    handful of eigenvalues this package deals with."""
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        raise ValueError("multisets must have equal size")
    if not a:
        return 0.0
    best = math.inf
    for perm in itertools.permutations(range(len(b))):
        worst = max(abs(a[i] - b[p]) for i, p in enumerate(perm))
        if worst < best:
            best = worst
    return best
