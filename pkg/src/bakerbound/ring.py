"""Exact arithmetic in the integer ring of an imaginary quadratic field.

The field is Q(sqrt(-D)) for a positive squarefree D with D % 4 != 0.  Its
ring of integers is Z + Z*omega with omega = h + l*sqrt(-D), where
(h, l) = (0, 1) when D = 1, 2 (mod 4) and (h, l) = (1/2, 1/2) when
D = 3 (mod 4).  Elements are stored as exact integer coordinates (u, v)
meaning u + v*omega; squared moduli are exact rationals, and only the
embedding into the complex plane is carried out in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError


def _is_squarefree(n: int) -> bool:
    if n % 4 == 0:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1 if p == 2 else 2
    return True


@dataclass(frozen=True)
class RingInt:
    """Ring integer u + v*omega with exact integer coordinates."""

    u: int
    v: int

    def __post_init__(self) -> None:
        if not isinstance(self.u, int) or not isinstance(self.v, int):
            raise DomainError("RingInt coordinates must be integers")

    def __add__(self, other: "RingInt") -> "RingInt":
        return RingInt(self.u + other.u, self.v + other.v)

    def __sub__(self, other: "RingInt") -> "RingInt":
        return RingInt(self.u - other.u, self.v - other.v)

    def __neg__(self) -> "RingInt":
        return RingInt(-self.u, -self.v)

    @property
    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def __repr__(self) -> str:
        return f"RingInt({self.u}, {self.v})"


ZERO = RingInt(0, 0)
ONE = RingInt(1, 0)


@dataclass(frozen=True)
class FieldSpec:
    """The imaginary quadratic field Q(sqrt(-D)) and its integer ring.

    Only D is stored; h, l and tau are determined by D mod 4.  tau = 1 - h
    reconciles the small-value radius constant with the lattice determinant
    sqrt(D) / 2^(2h).
    """

    D: int

    def __post_init__(self) -> None:
        if not isinstance(self.D, int) or self.D <= 0:
            raise DomainError("D must be a positive integer")
        if self.D % 4 == 0:
            raise DomainError("D = 0 (mod 4) is not admissible")
        if not _is_squarefree(self.D):
            raise DomainError("D must be squarefree")

    @property
    def h(self) -> Fraction:
        return Fraction(1, 2) if self.D % 4 == 3 else Fraction(0)

    @property
    def l(self) -> Fraction:
        return Fraction(1, 2) if self.D % 4 == 3 else Fraction(1)

    @property
    def tau(self) -> Fraction:
        return 1 - self.h

    @property
    def omega_trace(self) -> int:
        """t with omega^2 = t*omega - n; equals omega + conj(omega)."""
        return 1 if self.D % 4 == 3 else 0

    @property
    def omega_norm(self) -> int:
        """n = omega * conj(omega) = h^2 + l^2 D, always an integer."""
        return (1 + self.D) // 4 if self.D % 4 == 3 else self.D

    def lattice_determinant(self) -> float:
        """Determinant of the real embedding lattice, sqrt(D) / 2^(2h)."""
        return math.sqrt(self.D) / (2.0 ** float(2 * self.h))

    def covering_radius_bound(self) -> float:
        """Coarse upper bound sqrt(1 + l^2 D) / 2 for the covering radius."""
        return math.sqrt(float(1 + self.l * self.l * self.D)) / 2.0

    # -- embeddings ---------------------------------------------------

    def embed(self, x: RingInt) -> complex:
        """Complex value of x: (u + v h) + i * v l sqrt(D)."""
        h = float(self.h)
        l = float(self.l)
        return complex(x.u + x.v * h, x.v * l * math.sqrt(self.D))

    def abs2(self, x: RingInt) -> Fraction:
        """Exact squared modulus (u + v h)^2 + v^2 l^2 D."""
        t = Fraction(x.u) + x.v * self.h
        return t * t + x.v * x.v * self.l * self.l * self.D

    def abs_value(self, x: RingInt) -> float:
        return math.sqrt(float(self.abs2(x)))

    def in_disk(self, x: RingInt, radius: int) -> bool:
        """Exact membership test |x| <= radius for an integer radius."""
        return self.abs2(x) <= radius * radius

    # -- ring structure -----------------------------------------------

    def mul(self, x: RingInt, y: RingInt) -> RingInt:
        """Exact product, using omega^2 = t*omega - n."""
        t, n = self.omega_trace, self.omega_norm
        return RingInt(
            x.u * y.u - n * x.v * y.v,
            x.u * y.v + x.v * y.u + t * x.v * y.v,
        )

    def conj(self, x: RingInt) -> RingInt:
        """Complex conjugate, again a ring integer: u + tv - v*omega."""
        return RingInt(x.u + self.omega_trace * x.v, -x.v)

    def norm(self, x: RingInt) -> int:
        """x * conj(x) as a plain integer (equals abs2, exactly)."""
        t, n = self.omega_trace, self.omega_norm
        return x.u * x.u + t * x.u * x.v + n * x.v * x.v

    def divexact(self, x: RingInt, y: RingInt) -> RingInt:
        """Exact quotient x / y; raises if y is zero or does not divide x."""
        if y.is_zero:
            raise ZeroDivisionError("division by zero ring integer")
        ny = self.norm(y)
        z = self.mul(x, self.conj(y))
        if z.u % ny or z.v % ny:
            raise DomainError("inexact ring division")
        return RingInt(z.u // ny, z.v // ny)

    # -- nearest lattice point ----------------------------------------

    def nearest(self, z: complex) -> RingInt:
        """Ring integer closest to z.

        Ties (within 1e-12 relative distance) are broken by smallest
        (|v|, |u|), then nonnegative v, then nonnegative u, so results are
        deterministic across platforms.
        """
        h = float(self.h)
        lsd = float(self.l) * math.sqrt(self.D)
        v_real = z.imag / lsd
        vf = math.floor(v_real)
        best: list[tuple[float, RingInt]] = []
        for v in range(vf - 1, vf + 3):
            u_real = z.real - v * h
            uf = math.floor(u_real)
            for u in range(uf - 1, uf + 3):
                dx = z.real - (u + v * h)
                dy = z.imag - v * lsd
                best.append((dx * dx + dy * dy, RingInt(u, v)))
        dmin = min(d for d, _ in best)
        tol = 1e-12 * max(1.0, dmin)
        ties = [x for d, x in best if d <= dmin + tol]
        return min(
            ties, key=lambda x: (abs(x.v), abs(x.u), x.v < 0, x.u < 0)
        )


# Module-level aliases matching the operation names used elsewhere.

def embed(x: RingInt, spec: FieldSpec) -> complex:
    return spec.embed(x)


def lattice_determinant(spec: FieldSpec) -> float:
    return spec.lattice_determinant()


def nearest_ring_int(z: complex, spec: FieldSpec) -> RingInt:
    return spec.nearest(z)


def abs_value(x: RingInt, spec: FieldSpec) -> float:
    return spec.abs_value(x)
