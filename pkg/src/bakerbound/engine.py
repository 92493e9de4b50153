"""Envelope axioms, growth-case thresholds and explicit bound certificates.

The inputs are the nonnegative envelope parameters (a, b, c, d, b_i, e_i)
with a, c, c - d*m > 0, a growth case g(N) in {1, log N, N}, and the index
floor N_min from which the envelopes are assumed valid.  From these the
module computes the explicit constants of the lower bound

    |beta_0 + beta_1 Theta_1 + ... + beta_m Theta_m|
        > F * H^(-a/(c-dm) - eps(H)),      H = prod_j (2 m H_j) >= G,

together with the error-term evaluator eps(H) and the admissibility
threshold G.  Everything here is pure floating-point arithmetic over
immutable records.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ._roots import largest_root, newton_zlog
from .errors import DomainError

_E = math.e


@dataclass(frozen=True)
class AxiomParams:
    """Envelope constants for one growth case.

    case selects g(N): 1 -> g = 1, 2 -> g = log N, 3 -> g = N.  The reduced
    envelope shapes of the three cases force some coefficients to vanish:
    case 1 admits only (a, b, c, d, e2), case 2 forces b = 0, and case 3
    admits only (a, b1, c, d, e1).  Nonzero values outside the admitted set
    are rejected rather than silently ignored.
    """

    m: int
    case: int
    a: float
    c: float
    b: float = 0.0
    d: float = 0.0
    b0: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0
    e0: float = 0.0
    e1: float = 0.0
    e2: float = 0.0
    e3: float = 0.0
    n_min: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or self.m < 1:
            raise DomainError("m must be a positive integer")
        if self.case not in (1, 2, 3):
            raise DomainError("case must be 1, 2 or 3")
        if not isinstance(self.n_min, int) or self.n_min < 1:
            raise DomainError("N_min must be a positive integer")
        for name in ("a", "b", "c", "d", "b0", "b1", "b2", "b3",
                     "e0", "e1", "e2", "e3"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative")
        if self.a <= 0:
            raise DomainError("a must be positive")
        if self.c <= 0:
            raise DomainError("c must be positive")
        if self.c - self.d * self.m <= 0:
            raise DomainError("c - d*m must be positive")
        zeros = {
            1: ("b0", "b1", "b2", "b3", "e0", "e1", "e3"),
            2: ("b",),
            3: ("b", "b0", "b2", "b3", "e0", "e2", "e3"),
        }[self.case]
        for name in zeros:
            if getattr(self, name) != 0:
                raise DomainError(
                    f"{name} must be zero in case {self.case}"
                )

    @property
    def f(self) -> float:
        return 2.0 / (self.c - self.d * self.m)

    @property
    def exponent(self) -> float:
        return self.a / (self.c - self.d * self.m)

    def growth(self, n: float) -> float:
        """g(N) for the selected case."""
        if self.case == 1:
            return 1.0
        if self.case == 2:
            return math.log(n)
        return float(n)

    def growth_slope_max(self, s: float) -> float:
        """max of g' on [S, S+m]: 0, 1/S or 1 by case."""
        if self.case == 1:
            return 0.0
        if self.case == 2:
            return 1.0 / s
        return 1.0


def q_envelope(p: AxiomParams, n: float) -> float:
    """Exponent q(N) of the coefficient envelope |A_{k,0}| <= e^q(N).

    Accepts real N >= 1 (the budget estimates evaluate q at S + m).
    """
    if n < 1:
        raise DomainError("N must be >= 1")
    ln = math.log(n)
    return (
        (p.a * n + p.b * ln) * p.growth(n)
        + p.b0 * n * math.sqrt(ln)
        + p.b1 * n
        + p.b2 * ln
        + p.b3
    )


def r_envelope(p: AxiomParams, nbar: Sequence[float], j: int) -> float:
    """Decay exponent r_j(nbar) of the remainder envelope e^{-r_j}.

    j is 1-based; nbar may be real-valued (the tuning evaluates r at the
    fractional split before flooring).
    """
    if len(nbar) != p.m:
        raise DomainError("nbar must have length m")
    if not 1 <= j <= p.m:
        raise DomainError("j must be in 1..m")
    if any(x <= 0 for x in nbar):
        raise DomainError("all components of nbar must be positive")
    n = float(sum(nbar))
    if n < 1:
        raise DomainError("N = sum(nbar) must be >= 1")
    ln = math.log(n)
    minus_r = (
        (p.d * n - p.c * nbar[j - 1]) * p.growth(n)
        + p.e0 * n * math.sqrt(ln)
        + p.e1 * n
        + p.e2 * ln
        + p.e3
    )
    return -minus_r


# -- inverse of z log z ------------------------------------------------


def z_inverse(y: float) -> float:
    """Inverse of y(z) = z log z on z >= 1/e.

    Newton from the nested-log overestimate z_2(y) when y > e, bisection on
    [1/e, max(e, y)] otherwise; |z log z - y| <= 1e-12 * max(1, |y|).
    """
    if y < -1.0 / _E - 1e-15:
        raise DomainError("y below the minimum -1/e of z log z")
    tol = 1e-13 * max(1.0, abs(y))
    if y > _E:
        z = newton_zlog(y, z_chain(y, 2), tol)
        if z is not None:
            return z
    lo, hi = 1.0 / _E, max(_E, y) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.log(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def z_chain(y: float, n: int) -> float:
    """Nested-log iterate: z_0 = y, z_k = y / log z_{k-1}; needs y > e."""
    if y <= _E:
        raise DomainError("z_chain requires y > e")
    if n < 0:
        raise DomainError("n must be nonnegative")
    z = y
    for _ in range(n):
        z = y / math.log(z)
    return z


# -- master threshold (the x_l of the admissibility floor) -------------


def _threshold_parts(p: AxiomParams):
    """(lhs, rhs) of the defining equation of S_l, and its search floor."""
    m, f = p.m, p.f
    if p.case == 1:
        def lhs(s: float) -> float:
            return s

        def rhs(s: float) -> float:
            return f * (p.e2 * m * math.log(s) + p.d * m * m + p.e2 * m)

        return lhs, rhs, 1.0 / _E
    if p.case == 2:
        def lhs(s: float) -> float:
            return s * math.log(s)

        def rhs(s: float) -> float:
            sq = math.sqrt(math.log(s))
            return f * (
                p.e0 * m * s * sq
                + p.e1 * m * s
                + (p.d * m * m + p.e2 * m) * math.log(s)
                + p.e0 * m * m * sq
                + 2 * p.e0 * m * m
                + p.e1 * m * m
                + p.e2 * m
                + p.e3 * m
            )

        return lhs, rhs, 1.0
    raise DomainError("case 3 has no threshold equation (S_3 = 1)")


def solve_master_threshold(p: AxiomParams) -> float:
    """x_l = max{S_l, 1} where S_l is the largest solution of the
    case's threshold equation; returns 1 directly in case 3.

    When the equation has no root >= 1/e the threshold degenerates and
    x_l = 1 (the "no finite largest solution" situation).
    """
    if p.case == 3:
        return 1.0
    lhs, rhs, s_lo = _threshold_parts(p)
    root = largest_root(lambda s: lhs(s) - rhs(s), s_lo)
    if root is None:
        return 1.0
    scale = max(1.0, abs(lhs(root)), abs(rhs(root)))
    if abs(lhs(root) - rhs(root)) > 1e-10 * scale:
        raise ArithmeticError("threshold root residual too large")
    return max(root, 1.0)


# -- certificates -------------------------------------------------------


@dataclass(frozen=True)
class BoundCertificate:
    """Evaluable form of the explicit lower bound for one parameter set.

    constants holds the case-specific values: {A1, B1} (case 1),
    {A2..E2} (case 2) or {v1, v2, w1, w2, A3, B3} (case 3).  log_prefactor
    is kept alongside prefactor so enormous constants stay usable.
    """

    case: int
    m: int
    n_min: int
    f: float
    exponent: float
    x_threshold: float
    h_min: float
    log_prefactor: float
    constants: dict[str, float] = field(repr=False)

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_prefactor)


def _exp_or_inf(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def certificate(p: AxiomParams) -> BoundCertificate:
    """Compute all explicit constants of the bound for the given axioms."""
    m, f = p.m, p.f
    cdm = p.c - p.d * m
    x = solve_master_threshold(p)
    if p.case == 1:
        # Coefficient of log S in Z(S) log H, carried through S <= f log H.
        b1c = p.a * p.e2 * m / cdm + p.b
        a1c = p.a * (p.d * m * m + p.e2 * m) / cdm + p.a * m + p.b \
            + b1c * math.log(f)
        consts = {"A1": a1c, "B1": b1c}
        log_pref = -math.log(2.0) - a1c
        h_min = max(float(m), float(p.n_min), _exp_or_inf(x / f))
    elif p.case == 2:
        a2 = p.b0 + p.a * p.e0 * m / cdm
        b2 = p.a + p.b0 + p.b1 + p.a * p.e1 * m / cdm
        c2 = p.a * m + p.b2 + p.a * (p.d * m * m + p.e2 * m) / cdm
        d2 = p.b0 * m + p.a * p.e0 * m * m / cdm
        e2 = (p.a + p.b0 + p.b1) * m + p.b2 + p.b3 \
            + p.a * ((2 * p.e0 + p.e1) * m * m + (p.e2 + p.e3) * m) / cdm
        consts = {"A2": a2, "B2": b2, "C2": c2, "D2": d2, "E2": e2}
        log_pref = -math.log(2.0) - e2
        h_min = max(
            float(m),
            float(p.n_min),
            _exp_or_inf(x * math.log(x) / f),
            _exp_or_inf(_E / f),
        )
    else:
        dm2e = p.d * m * m + p.e1 * m
        v2 = 1.0 / math.sqrt(cdm)
        v1 = (dm2e + math.sqrt(dm2e * dm2e + 4 * p.e1 * m * m * cdm)) \
            / (2 * cdm)
        w1 = p.a * dm2e / cdm + 2 * p.a * m + p.b1
        w2 = p.a * m * m + p.b1 * m + p.a * p.e1 * m * m / cdm
        a3 = v2 * w1
        b3 = v1 * w1 + w2
        consts = {"v1": v1, "v2": v2, "w1": w1, "w2": w2,
                  "A3": a3, "B3": b3}
        log_pref = -math.log(2.0) - b3
        h_min = max(float(m), float(p.n_min), _E)
    return BoundCertificate(
        case=p.case,
        m=m,
        n_min=p.n_min,
        f=f,
        exponent=p.exponent,
        x_threshold=x,
        h_min=h_min,
        log_prefactor=log_pref,
        constants=consts,
    )


def epsilon(cert: BoundCertificate, big_h: float) -> float:
    """Error term eps(H) of the exponent; H must be admissible (H >= G)."""
    if big_h < cert.h_min:
        raise DomainError("H below the admissibility threshold G")
    lh = math.log(big_h)
    if cert.case == 1:
        return cert.constants["B1"] * math.log(lh) / lh
    if cert.case == 3:
        return cert.constants["A3"] / math.sqrt(lh)
    c = cert.constants
    z = z_inverse(cert.f * lh)
    lz = math.log(z)
    return (
        c["A2"] * math.sqrt(cert.f * z / lh)
        + c["B2"] * z / lh
        + c["C2"] * lz / lh
        + c["D2"] * math.sqrt(lz) / lh
    )


def combined_height(m: int, heights: Sequence[float]) -> float:
    """H = prod_j (2 m H_j)."""
    if len(heights) != m:
        raise DomainError("heights must have length m")
    if any(h < 1 for h in heights):
        raise DomainError("all H_j must be >= 1")
    out = 1.0
    for h in heights:
        out *= 2.0 * m * h
    return out


def log_lower_bound(cert: BoundCertificate, heights: Sequence[float]) -> float:
    """log of the certified lower bound at the given heights."""
    big_h = combined_height(cert.m, heights)
    if big_h < cert.h_min:
        raise DomainError("H below the admissibility threshold G")
    eps = epsilon(cert, big_h)
    return cert.log_prefactor - (cert.exponent + eps) * math.log(big_h)


def lower_bound(cert: BoundCertificate, heights: Sequence[float]) -> float:
    """Certified lower bound F * H^(-exponent - eps(H)); positive and
    nonincreasing in each height."""
    return _exp_or_inf(log_lower_bound(cert, heights))


def corollary_x0(cert: BoundCertificate) -> float:
    """Canonical pivot x_0 = max{f log m, f log N_min, x log x, e^e}."""
    x = cert.x_threshold
    return max(
        cert.f * math.log(cert.m),
        cert.f * math.log(cert.n_min),
        x * math.log(x),
        _E**_E,
    )


def corollary_bound(
    cert: BoundCertificate,
    heights: Sequence[float],
    x0: float | None = None,
) -> float:
    """Weakened, closed-form case-2 bound with the nested log resolved.

    Requires f log H >= x0 >= e^e and additionally H > e (the substitution
    divides by log log H).  Always at most lower_bound at the same heights.
    """
    if cert.case != 2:
        raise DomainError("the weakened closed form applies to case 2 only")
    if x0 is None:
        x0 = corollary_x0(cert)
    if x0 < _E**_E:
        raise DomainError("x0 must be at least e^e")
    big_h = combined_height(cert.m, heights)
    if big_h < cert.h_min:
        raise DomainError("H below the admissibility threshold G")
    lh = math.log(big_h)
    if cert.f * lh < x0:
        raise DomainError("f log H must be at least x0")
    if lh <= 1.0:
        raise DomainError("H must exceed e for the weakened form")
    rho = math.log(x0) / (math.log(x0) - math.log(math.log(x0)))
    ll = math.log(lh)
    c = cert.constants
    log_val = (
        -math.log(2.0)
        - c["E2"]
        - c["C2"] * math.log(cert.f * rho)
        + c["C2"] * math.log(ll / lh)
        - lh * cert.exponent
        - c["A2"] * cert.f * math.sqrt(rho) * lh / math.sqrt(ll)
        - c["B2"] * cert.f * rho * lh / ll
        - c["D2"] * math.sqrt(math.log(cert.f * rho * lh / ll))
    )
    return _exp_or_inf(log_val)


# -- extended-precision rendering ---------------------------------------


def certificate_digits(p: AxiomParams, digits: int = 30) -> dict[str, str]:
    """Certificate constants re-evaluated with mpmath and formatted at the
    requested number of significant digits (the closed forms are exact;
    only exp/log chains gain from the extra precision)."""
    import mpmath as mp

    with mp.workdps(digits + 15):
        m = mp.mpf(p.m)
        a, b, c, d = (mp.mpf(v) for v in (p.a, p.b, p.c, p.d))
        e0, e1, e2, e3 = (mp.mpf(v) for v in (p.e0, p.e1, p.e2, p.e3))
        b0, b1, b2, b3 = (mp.mpf(v) for v in (p.b0, p.b1, p.b2, p.b3))
        cdm = c - d * m
        f = 2 / cdm
        expo = a / cdm
        x = _x_threshold_mp(p, mp)
        out: dict[str, mp.mpf] = {"f": f, "exponent": expo, "x": x}
        if p.case == 1:
            bb = a * e2 * m / cdm + b
            aa = a * (d * m * m + e2 * m) / cdm + a * m + b + bb * mp.log(f)
            out.update(A1=aa, B1=bb, log_prefactor=-mp.log(2) - aa)
            out["G"] = _mp_max(m, mp.mpf(p.n_min), mp.e ** (x / f))
        elif p.case == 2:
            a2 = b0 + a * e0 * m / cdm
            bb2 = a + b0 + b1 + a * e1 * m / cdm
            c2 = a * m + b2 + a * (d * m * m + e2 * m) / cdm
            d2 = b0 * m + a * e0 * m * m / cdm
            ee2 = (a + b0 + b1) * m + b2 + b3 \
                + a * ((2 * e0 + e1) * m * m + (e2 + e3) * m) / cdm
            out.update(A2=a2, B2=bb2, C2=c2, D2=d2, E2=ee2,
                       log_prefactor=-mp.log(2) - ee2)
            out["G"] = _mp_max(m, mp.mpf(p.n_min),
                               mp.e ** (x * mp.log(x) / f), mp.e ** (mp.e / f))
        else:
            dm2e = d * m * m + e1 * m
            v2 = 1 / mp.sqrt(cdm)
            v1 = (dm2e + mp.sqrt(dm2e**2 + 4 * e1 * m * m * cdm)) / (2 * cdm)
            w1 = a * dm2e / cdm + 2 * a * m + b1
            w2 = a * m * m + b1 * m + a * e1 * m * m / cdm
            out.update(v1=v1, v2=v2, w1=w1, w2=w2, A3=v2 * w1,
                       B3=v1 * w1 + w2,
                       log_prefactor=-mp.log(2) - (v1 * w1 + w2))
            out["G"] = _mp_max(m, mp.mpf(p.n_min), mp.e)
        return {k: mp.nstr(v, digits) for k, v in out.items()}


def _mp_max(*vals):
    out = vals[0]
    for v in vals[1:]:
        if v > out:
            out = v
    return out


def _x_threshold_mp(p: AxiomParams, mp) -> "mp.mpf":
    """max{S_l, 1} at working precision, seeded by the float solution."""
    if p.case == 3:
        return mp.mpf(1)
    x64 = solve_master_threshold(p)
    lhs, rhs, _ = _threshold_parts(p)
    if x64 <= 1.0 and abs(lhs(1.0) - rhs(1.0)) > 1e-9:
        return mp.mpf(1)  # degenerate threshold: no root at or above 1

    m = mp.mpf(p.m)
    f = 2 / (mp.mpf(p.c) - mp.mpf(p.d) * m)
    e0, e1, e2, e3 = (mp.mpf(v) for v in (p.e0, p.e1, p.e2, p.e3))
    d = mp.mpf(p.d)

    def phi(s):
        if p.case == 1:
            return s - f * (e2 * m * mp.log(s) + d * m * m + e2 * m)
        sq = mp.sqrt(mp.log(s))
        return s * mp.log(s) - f * (
            e0 * m * s * sq + e1 * m * s
            + (d * m * m + e2 * m) * mp.log(s)
            + e0 * m * m * sq + 2 * e0 * m * m + e1 * m * m
            + e2 * m + e3 * m
        )

    lo = mp.mpf(x64) * mp.mpf("0.99")
    hi = mp.mpf(x64) * mp.mpf("1.01")
    if not phi(lo) <= 0 <= phi(hi):
        return mp.mpf(x64)  # root exactly at a kink; float value stands
    for _ in range(mp.mp.prec + 20):
        mid = (lo + hi) / 2
        if phi(mid) <= 0:
            lo = mid
        else:
            hi = mid
    root = (lo + hi) / 2
    return root if root > 1 else mp.mpf(1)
