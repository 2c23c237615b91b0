"""Bracketing root finders and Sturm-sequence real-root isolation."""
from __future__ import annotations

import math

import numpy as np


def bisect(f, a, b, xtol=1e-14, maxiter=200):
    """Root of ``f`` in [a, b] by bisection; f(a) and f(b) must differ in sign."""
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise ValueError(f"no sign change on [{a}, {b}]")
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if b - a <= xtol or m in (a, b):
            break
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def sign_changes(f, a, b, n=400):
    """Subintervals of a uniform n-point grid on [a, b] where ``f`` changes sign."""
    xs = np.linspace(a, b, n)
    fs = np.array([f(x) for x in xs])
    out = []
    for i in range(n - 1):
        if fs[i] == 0:
            out.append((xs[i], xs[i]))
        elif fs[i] * fs[i + 1] < 0:
            out.append((xs[i], xs[i + 1]))
    return out


def argmax_unimodal(df, a, b, n=400, xtol=1e-14):
    """Locate interior critical points from sign changes of the derivative
    ``df`` (+ to -) and refine each by bisection."""
    out = []
    for lo, hi in sign_changes(df, a, b, n):
        if lo == hi:
            out.append(lo)
        elif df(lo) > 0:
            out.append(bisect(df, lo, hi, xtol))
    return out


def sturm_sequence(coeffs):
    """Sturm chain of a polynomial given highest-degree-first coefficients."""
    p = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    seq = [p, np.polyder(p)]
    scale = np.max(np.abs(p))
    while len(seq[-1]) > 1:
        _, r = np.polydiv(seq[-2], seq[-1])
        r = np.trim_zeros(-r, "f")
        if r.size == 0 or np.max(np.abs(r)) <= 1e-13 * scale:
            break
        seq.append(r)
    return seq


def _variations(seq, x):
    vals = [np.polyval(p, x) for p in seq]
    vals = [v for v in vals if v != 0]
    return sum(1 for u, v in zip(vals, vals[1:]) if (u > 0) != (v > 0))


def cauchy_bound(coeffs):
    p = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    return 1.0 + float(np.max(np.abs(p[1:] / p[0]))) if len(p) > 1 else 0.0


def real_roots(coeffs, lo=None, hi=None, xtol=1e-14):
    """Distinct real roots of a polynomial in (lo, hi], isolated with a Sturm
    chain and refined by bisection.  Defaults to the Cauchy bound."""
    p = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if len(p) <= 1:
        return []
    B = cauchy_bound(p)
    lo = -B if lo is None else lo
    hi = B if hi is None else hi
    seq = sturm_sequence(p)
    f = lambda x: np.polyval(p, x)

    roots = []
    stack = [(lo, hi, _variations(seq, lo), _variations(seq, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count <= 0:
            continue
        width_ok = b - a <= xtol * max(1.0, abs(a), abs(b))
        if count == 1:
            fa, fb = f(a), f(b)
            if fb == 0:
                roots.append(b)
            elif fa * fb < 0:
                roots.append(bisect(f, a, b, xtol * max(1.0, abs(a), abs(b))))
            elif width_ok:
                roots.append(0.5 * (a + b))
            else:
                m = 0.5 * (a + b)
                vm = _variations(seq, m)
                stack += [(a, m, va, vm), (m, b, vm, vb)]
            continue
        if width_ok:
            roots.append(0.5 * (a + b))
            continue
        m = 0.5 * (a + b)
        vm = _variations(seq, m)
        stack += [(a, m, va, vm), (m, b, vm, vb)]
    return sorted(roots)


def polish_newton(coeffs, x, steps=2):
    """A couple of Newton steps; keeps x if they do not reduce |p(x)|."""
    p = np.asarray(coeffs, dtype=float)
    dp = np.polyder(p)
    best, fbest = x, abs(np.polyval(p, x))
    for _ in range(steps):
        d = np.polyval(dp, x)
        if d == 0 or not math.isfinite(d):
            break
        x = x - np.polyval(p, x) / d
        fx = abs(np.polyval(p, x))
        if fx < fbest:
            best, fbest = x, fx
    return best
