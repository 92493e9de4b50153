"""Shared samplers for randomized property tests.

Admissible draws keep the remainder-envelope coefficients small relative
to c - d*m so the certificate threshold G stays finite and reachable, and
heights are scaled up until the combined height is admissible and the
master equation has a root >= m (with S > 1 in the logarithmic case, as
the split requires)."""

import math
import random

import pytest

from bakerbound import AxiomParams, DomainError, certificate, solve_master
from bakerbound.engine import combined_height


def draw_params(case: int, rng: random.Random) -> AxiomParams:
    m = rng.randint(1, 3)
    a = rng.uniform(0.2, 3.0)
    d = rng.uniform(0.0, 0.5) if rng.random() < 0.7 else 0.0
    c = d * m + rng.uniform(0.3, 3.0)
    cdm = c - d * m
    kw = dict(m=m, case=case, a=a, c=c, d=d, n_min=rng.randint(1, 3))
    lim = 0.1 * cdm / m
    if case == 1:
        kw["b"] = rng.uniform(0.0, 1.0)
        kw["e2"] = rng.uniform(0.0, lim)
    elif case == 2:
        for k in ("b0", "b1", "b2", "b3"):
            kw[k] = rng.uniform(0.0, 0.6)
        for k in ("e0", "e1", "e2", "e3"):
            kw[k] = rng.uniform(0.0, lim)
    else:
        kw["b1"] = rng.uniform(0.0, 1.0)
        kw["e1"] = rng.uniform(0.0, lim)
    return AxiomParams(**kw)


def draw_admissible(case: int, rng: random.Random):
    """(params, heights, certificate, S) with every tuning precondition met."""
    for _ in range(80):
        p = draw_params(case, rng)
        cert = certificate(p)
        if not math.isfinite(cert.h_min):
            continue
        heights = [rng.randint(1, 9) for _ in range(p.m)]
        for _ in range(60):
            if combined_height(p.m, heights) >= max(cert.h_min, 1.0):
                try:
                    s = solve_master(p, heights)
                    if s >= p.m and (case != 2 or s > 1.0):
                        return p, heights, cert, s
                except (DomainError, ArithmeticError):
                    pass
            heights[0] *= 4
    raise AssertionError("sampler failed to produce an admissible draw")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
