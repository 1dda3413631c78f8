"""Scalar root-finding utilities.

The steady-state solves need only two tools: a numerically stable quadratic
solver (both steady equations are analytic quadratics) and a bracketed
bisection/secant hybrid for the stator-angle equation, which keeps the
guaranteed convergence of bisection while letting secant steps pull the
iterate in quickly once the bracket is tight.
"""

from __future__ import annotations

import math
from typing import Callable, Tuple

from .errors import NoBracket

__all__ = ["quadratic_roots", "bracketed_root"]


def quadratic_roots(a: float, b: float, c: float) -> Tuple[float, ...]:
    """Real roots of ``a*x**2 + b*x + c = 0``, ascending.

    Uses the citardauq form for the small root so roots of wildly different
    magnitude are both computed to full relative precision.  A linear
    equation (``a == 0``) returns its single root; no real roots returns an
    empty tuple.
    """
    if a == 0.0:
        if b == 0.0:
            return ()
        return (-c / b,)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return ()
    sq = math.sqrt(disc)
    # q has the sign of b to avoid cancellation in -b -/+ sq
    q = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
    if q == 0.0:
        return (0.0, 0.0) if disc == 0.0 else tuple(sorted((q / a, 0.0)))
    r1 = q / a
    r2 = c / q
    return (r1, r2) if r1 <= r2 else (r2, r1)


def bracketed_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    f_tol: float,
    max_iter: int = 200,
) -> float:
    """Root of ``func`` on ``[lo, hi]`` to ``|func(x)| <= f_tol``.

    Requires a sign change over the bracket (degenerate case: an endpoint is
    already within tolerance).  Each iteration tries a secant step through
    the current bracket endpoints and falls back to bisection whenever the
    secant step leaves the bracket or fails to shrink it, so convergence is
    guaranteed while smooth problems finish in a handful of iterations.

    Raises
    ------
    NoBracket
        If ``func`` has the same sign at both endpoints.
    """
    if hi < lo:
        lo, hi = hi, lo
    f_lo = func(lo)
    if abs(f_lo) <= f_tol:
        return lo
    f_hi = func(hi)
    if abs(f_hi) <= f_tol:
        return hi
    if (f_lo > 0.0) == (f_hi > 0.0):
        raise NoBracket(
            f"no sign change on [{lo:g}, {hi:g}]: f(lo)={f_lo:g}, f(hi)={f_hi:g}"
        )

    a, b = lo, hi
    f_a, f_b = f_lo, f_hi
    x, f_x = b, f_b
    for _ in range(max_iter):
        width = b - a
        # Secant through the bracket endpoints, guarded to the interior.
        denom = f_b - f_a
        if denom != 0.0:
            x = b - f_b * width / denom
        if denom == 0.0 or not (a < x < b):
            x = a + 0.5 * width
        f_x = func(x)
        if abs(f_x) <= f_tol:
            return x
        if (f_x > 0.0) == (f_a > 0.0):
            a, f_a = x, f_x
        else:
            b, f_b = x, f_x
        # If the secant step barely moved an endpoint, bisect to keep the
        # bracket shrinking geometrically.
        if (b - a) > 0.75 * width:
            mid = a + 0.5 * (b - a)
            f_mid = func(mid)
            if abs(f_mid) <= f_tol:
                return mid
            if (f_mid > 0.0) == (f_a > 0.0):
                a, f_a = mid, f_mid
            else:
                b, f_b = mid, f_mid
        if (b - a) <= 4.0 * math.ulp(max(abs(a), abs(b))):
            break
    # Bracket exhausted to rounding: return the best endpoint seen.
    return a if abs(f_a) <= abs(f_b) else b
