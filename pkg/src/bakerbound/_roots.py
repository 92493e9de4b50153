"""Rightmost-root bracketing for the master threshold equations.

The functions handled here are eventually dominated by their leading
(c - dm) S or (c - dm) S log S term, so a rightmost root exists whenever
any root exists.  The strategy is the one documented by the engine: double
an upper bound until the function is positive over a whole decade, scan a
geometric grid downward for the last sign change, bisect, then certify
"largest" by checking positivity on a grid above the root.
"""

from __future__ import annotations

import math
from typing import Callable


def largest_root(
    phi: Callable[[float], float],
    s_lo: float,
    rel_tol: float = 1e-13,
    grid: int = 4096,
) -> float | None:
    """Largest root of phi on [s_lo, inf), or None when phi > 0 throughout.

    phi must be eventually positive and increasing.  The returned root r
    satisfies |phi(r)| small (bisection to rel_tol in r) and phi > 0 on a
    geometric grid in (r, 10r].
    """
    hi = max(2.0 * s_lo, 1.0)
    for _ in range(200):
        if phi(hi) > 0.0 and _positive_on_decade(phi, hi):
            break
        hi *= 2.0
    else:
        raise ArithmeticError("no dominating upper bracket found")

    # Rightmost sign change on a geometric grid in [s_lo, hi].
    lo = None
    if phi(s_lo) <= 0.0:
        lo = s_lo
    ratio = (hi / s_lo) ** (1.0 / grid) if s_lo > 0 else None
    s = s_lo
    for i in range(1, grid + 1):
        s_next = s_lo * ratio**i if ratio else s_lo + (hi - s_lo) * i / grid
        if phi(s_next) <= 0.0:
            lo = s_next
        s = s_next
    if lo is None:
        return None

    a, b = lo, hi
    # phi(a) <= 0 < phi(b) after the scan; bisect.
    while b - a > rel_tol * max(1.0, abs(a)):
        mid = 0.5 * (a + b)
        if phi(mid) <= 0.0:
            a = mid
        else:
            b = mid
    root = 0.5 * (a + b)

    for i in range(1, 65):
        s = root * (1.0 + 1e-9) * (10.0 ** (i / 64.0))
        if phi(s) <= 0.0:
            # Another crossing above: restart from further out.
            return largest_root(phi, s * 1.5, rel_tol, grid)
    return root


def _positive_on_decade(phi: Callable[[float], float], hi: float) -> bool:
    return all(phi(hi * 10.0 ** (i / 64.0)) > 0.0 for i in range(65))


def bisect_increasing(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    iters: int = 200,
) -> float:
    """Solve f(x) = target for increasing f by plain bisection."""
    if f(lo) > target or f(hi) < target:
        raise ArithmeticError("target not bracketed")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def newton_zlog(y: float, start: float, tol: float) -> float | None:
    """Newton iteration for z log z = y from a safe overestimate.

    Returns None if the iteration leaves the domain z >= 1/e or fails to
    converge; the caller falls back to bisection.
    """
    z = start
    inv_e = 1.0 / math.e
    for _ in range(80):
        if not (z >= inv_e) or not math.isfinite(z):
            return None
        g = z * math.log(z) - y
        if abs(g) <= tol:
            return z
        dg = math.log(z) + 1.0
        if dg <= 0.0:
            return None
        z -= g / dg
    return None
