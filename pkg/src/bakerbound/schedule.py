"""Constructive tuning: from heights to an approximation index vector.

Given envelope axioms and heights H_1..H_m, the tuning picks frequency
targets B_j, solves the master equation for the total budget S, splits S
into fractional indices s_j with r_j(s) = B_j exactly, floors them to
sigma_j, and confirms numerically that the floored index keeps the summed
remainder contribution below 1/2 (which is what converts a nonzero exact
integer into the lower bound 1 <= 2 |form| Q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ._roots import largest_root
from .engine import AxiomParams, q_envelope, r_envelope
from .errors import DomainError


@dataclass(frozen=True)
class Schedule:
    """Tuned index data: total S, targets B_j, split s_j and floors."""

    s_total: float
    freqs: tuple[float, ...]
    parts: tuple[float, ...]
    sigma: tuple[int, ...]
    n_used: int


def _freq_correction(p: AxiomParams, s: float) -> float:
    """dm g(S) + e0 m (sqrt(log S) + 2) + e1 m + e2, the slack that covers
    flooring the split (the remainder-envelope drop from s to sigma+1)."""
    m = p.m
    return (
        p.d * m * p.growth(s)
        + p.e0 * m * (math.sqrt(math.log(s)) + 2.0)
        + p.e1 * m
        + p.e2
    )


def frequencies(
    p: AxiomParams, heights: Sequence[float], s: float
) -> tuple[float, ...]:
    """Frequency targets B_j = log(2m H_j) + flooring slack; all positive."""
    if s < p.m:
        raise DomainError("S must be at least m")
    if len(heights) != p.m:
        raise DomainError("heights must have length m")
    if any(h < 1 for h in heights):
        raise DomainError("all H_j must be >= 1")
    corr = _freq_correction(p, s)
    return tuple(math.log(2 * p.m * h) + corr for h in heights)


def _master_lhs(p: AxiomParams, s: float) -> float:
    """Left side of the master equation (equals log H at the solution)."""
    m = p.m
    ls = math.log(s)
    sq = math.sqrt(ls)
    return (
        ((p.c - p.d * m) * s - p.d * m * m) * p.growth(s)
        - p.e0 * m * s * sq
        - p.e1 * m * s
        - p.e2 * m * ls
        - p.e3 * m
        - p.e0 * m * m * (sq + 2.0)
        - p.e1 * m * m
        - p.e2 * m
    )


def solve_master(p: AxiomParams, heights: Sequence[float]) -> float:
    """Largest S >= m with master_lhs(S) = log prod(2m H_j).

    Case 3 uses the closed quadratic form; cases 1 and 2 bracket the
    rightmost root.  Raises when no root >= m exists (heights too small
    for the tuning to respect S >= m).
    """
    if len(heights) != p.m:
        raise DomainError("heights must have length m")
    if any(h < 1 for h in heights):
        raise DomainError("all H_j must be >= 1")
    log_h = sum(math.log(2 * p.m * h) for h in heights)
    m = float(p.m)
    if p.case == 3:
        cdm = p.c - p.d * p.m
        t = p.d * m * m + p.e1 * m
        s = (t + math.sqrt(t * t + 4 * (p.e1 * m * m + log_h) * cdm)) \
            / (2 * cdm)
        if s < m:
            raise DomainError("no admissible S: master root below m")
    else:
        root = largest_root(
            lambda s_: _master_lhs(p, s_) - log_h, max(m, 1.0)
        )
        if root is None:
            raise DomainError("no admissible S: master root below m")
        s = root
    resid = abs(_master_lhs(p, s) - log_h)
    if resid > 1e-9 * max(1.0, abs(log_h), s):
        raise ArithmeticError("master equation residual too large")
    return s


def split(
    p: AxiomParams, s: float, freqs: Sequence[float]
) -> Schedule:
    """Solve r_j(sbar) = B_j under sum(s_j) = S and floor the result.

    The defining equations give c s_j g(S) = B_j + d S g(S) + (the additive
    remainder-envelope terms at S); with all e_i = 0 this is the familiar
    s_j = (B_j / g(S) + dS) / c.
    """
    if s < p.m:
        raise DomainError("S must be at least m")
    if len(freqs) != p.m:
        raise DomainError("freqs must have length m")
    g = p.growth(s)
    if g <= 0:
        raise DomainError("g(S) must be positive (case 2 needs S > 1)")
    ls = math.log(s)
    extra = p.e0 * s * math.sqrt(ls) + p.e1 * s + p.e2 * ls + p.e3
    parts = tuple((b + extra) / (p.c * g) + p.d * s / p.c for b in freqs)
    if any(x < 0 for x in parts):
        raise DomainError("negative split: heights too unbalanced for S")
    sigma = tuple(math.floor(x) for x in parts)
    return Schedule(
        s_total=s,
        freqs=tuple(freqs),
        parts=parts,
        sigma=sigma,
        n_used=sum(sigma) + p.m,
    )


def build_schedule(p: AxiomParams, heights: Sequence[float]) -> Schedule:
    """solve_master + frequencies + split in one step."""
    s = solve_master(p, heights)
    return split(p, s, frequencies(p, heights, s))


def check_half(
    p: AxiomParams, heights: Sequence[float], sched: Schedule
) -> tuple[bool, float]:
    """Whether sum_j H_j e^{-r_j(sigma+1)} <= 1/2, and the achieved sum.

    Under exact envelopes this always passes for a schedule produced by
    split; the returned sum makes the safety margin visible.
    """
    if len(heights) != p.m:
        raise DomainError("heights must have length m")
    nbar = [x + 1 for x in sched.sigma]
    total = sum(
        h * math.exp(-r_envelope(p, nbar, j + 1))
        for j, h in enumerate(heights)
    )
    return total <= 0.5, total


def q_budget(p: AxiomParams, s: float) -> float:
    """Upper bound a S g(S) + Y(S) for q(N(sigma+1)) via q(S + m).

    Y majorizes the growth of q from S to S+m case by case, using
    log(S+m) <= log S + 1 and the per-case maximum of g' on [S, S+m].
    """
    if s < p.m:
        raise DomainError("S must be at least m")
    m = float(p.m)
    if p.case == 1:
        y = p.a * m + p.b * (math.log(s) + 1.0)
    elif p.case == 2:
        ls = math.log(s)
        sq = math.sqrt(ls)
        y = (
            p.b0 * s * sq
            + (p.a + p.b0 + p.b1) * s
            + (p.a * m + p.b2) * ls
            + p.b0 * m * sq
            + (p.a + p.b0 + p.b1) * m
            + p.b2
            + p.b3
        )
    else:
        y = 2 * p.a * m * s + p.a * m * m + p.b1 * (s + m)
    return p.a * s * p.growth(s) + y


__all__ = [
    "Schedule",
    "frequencies",
    "solve_master",
    "split",
    "build_schedule",
    "check_half",
    "q_budget",
    "q_envelope",
]
