"""Small-value witness searches and the exact brute-force oracle.

find_witness realizes the Minkowski existence statement constructively:
enumerate every coefficient tail (beta_1..beta_m) inside the exact height
disks, complete each tail with the nearest ring integer beta_0 (optimal
for a fixed tail), and keep the smallest linear-form value.  brute_min is
the same search with beta_0 capped to an explicit disk, giving the exact
minimum used as the verification oracle.  shidlovskii_witness does the
rational-integer box search of the classical bound.

Disk membership is always decided by the exact integer quadratic form,
never by floating point; only linear-form values are floats.  Enumeration
is partitionable into chunks merged by minimum with a deterministic
lexicographic tie-break.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, DomainError
from .ring import FieldSpec, RingInt

_VALUE_WINDOW = 1e-9  # relative width for collecting tie candidates


@dataclass(frozen=True)
class SearchBox:
    """Targets Theta_1..Theta_m, height caps, and the ambient ring."""

    theta: tuple[complex, ...]
    heights: tuple[int, ...]
    spec: FieldSpec

    def __post_init__(self) -> None:
        if len(self.theta) < 1:
            raise DomainError("need at least one Theta")
        if len(self.heights) != len(self.theta):
            raise DomainError("heights must match theta in length")
        if any(abs(t) == 0 for t in self.theta):
            raise DomainError("all Theta_j must be nonzero")
        if any((not isinstance(h, int)) or h < 1 for h in self.heights):
            raise DomainError("all H_j must be integers >= 1")

    @property
    def m(self) -> int:
        return len(self.theta)


@dataclass(frozen=True)
class Witness:
    """A nonzero coefficient vector with its linear-form value and the
    guaranteed radius it was required to beat."""

    beta: tuple[RingInt, ...]
    value: float
    radius: float


def minkowski_radius(spec: FieldSpec, heights, m: int) -> float:
    """Guaranteed small-value radius (2^tau D^(1/4) / sqrt(pi))^(m+1) / prod H_j."""
    if len(heights) != m or m < 1:
        raise DomainError("heights must have length m >= 1")
    base = 2.0 ** float(spec.tau) * spec.D**0.25 / math.sqrt(math.pi)
    out = base ** (m + 1)
    for h in heights:
        out /= h
    return out


def shidlovskii_radius(theta, h: int) -> float:
    """sqrt(2) * (1 + sum |Theta_j|) / H^((m-1)/2)."""
    m = len(theta)
    c = math.sqrt(2.0) * (1.0 + sum(abs(t) for t in theta))
    return c / h ** ((m - 1) / 2.0)


def disk_points(spec: FieldSpec, radius: int) -> list[RingInt]:
    """All ring integers with |x| <= radius, by the exact integer test."""
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    pts: list[RingInt] = []
    d = spec.D
    if spec.D % 4 == 3:
        # |u + v omega|^2 <= R^2  <=>  (2u + v)^2 + D v^2 <= 4 R^2
        r4 = 4 * radius * radius
        vmax = math.isqrt(r4 // d)
        for v in range(-vmax, vmax + 1):
            rem = r4 - d * v * v
            s = math.isqrt(rem)
            # need |2u + v| <= s
            lo = math.ceil((-s - v) / 2)
            hi = math.floor((s - v) / 2)
            for u in range(lo, hi + 1):
                if (2 * u + v) ** 2 + d * v * v <= r4:
                    pts.append(RingInt(u, v))
    else:
        r2 = radius * radius
        vmax = math.isqrt(r2 // d)
        for v in range(-vmax, vmax + 1):
            s = math.isqrt(r2 - d * v * v)
            for u in range(-s, s + 1):
                pts.append(RingInt(u, v))
    return pts


def _disk_arrays(spec: FieldSpec, radius: int):
    """(u, v, embedding) arrays for the points of disk_points, same order."""
    pts = disk_points(spec, radius)
    u = np.fromiter((p.u for p in pts), dtype=np.int64, count=len(pts))
    v = np.fromiter((p.v for p in pts), dtype=np.int64, count=len(pts))
    h = float(spec.h)
    lsd = float(spec.l) * math.sqrt(spec.D)
    emb = (u + v * h) + 1j * (v * lsd)
    return u, v, emb


def _in_disk_arrays(spec: FieldSpec, u, v, radius: int):
    """Vectorized exact membership |u + v omega| <= radius (integer test)."""
    if spec.D % 4 == 3:
        return (2 * u + v) ** 2 + spec.D * v * v <= 4 * radius * radius
    return u * u + spec.D * v * v <= radius * radius


def _lex_key(beta) -> tuple:
    return tuple((b.u, b.v) for b in beta)


def _best_beta0_blocks(spec: FieldSpec, t, h0: int | None):
    """Per-tail optimal beta_0 over the 8 lattice cells around each target.

    Returns (d2, u0, v0); d2 is +inf where the capped mode found no
    admissible candidate among the 8 (the caller repairs those exactly).
    """
    h = float(spec.h)
    lsd = float(spec.l) * math.sqrt(spec.D)
    vr = t.imag / lsd
    vf = np.floor(vr).astype(np.int64)
    best = np.full(t.shape, np.inf)
    bu = np.zeros(t.shape, dtype=np.int64)
    bv = np.zeros(t.shape, dtype=np.int64)
    for dv in (-1, 0, 1, 2):
        v = vf + dv
        ur = t.real - v * h
        uf = np.floor(ur).astype(np.int64)
        for du in (0, 1):
            u = uf + du
            dx = t.real - (u + v * h)
            dy = t.imag - v * lsd
            d2 = dx * dx + dy * dy
            if h0 is not None:
                d2 = np.where(_in_disk_arrays(spec, u, v, h0), d2, np.inf)
            upd = d2 < best
            best = np.where(upd, d2, best)
            bu = np.where(upd, u, bu)
            bv = np.where(upd, v, bv)
    return best, bu, bv


class _Beta0Disk:
    """Exhaustive beta_0 fallback for the capped search: when the nearest
    lattice point falls outside the |beta_0| <= H0 disk, the true per-tail
    optimum is found by scanning the whole (cached) disk point set."""

    def __init__(self, spec: FieldSpec, h0: int):
        self.u, self.v, self.emb = _disk_arrays(spec, h0)

    def best(self, t: complex) -> list[tuple[float, RingInt]]:
        dx = t.real - self.emb.real
        dy = t.imag - self.emb.imag
        d2 = dx * dx + dy * dy
        dmin = float(np.min(d2))
        thr = dmin * (1.0 + _VALUE_WINDOW) + 5e-324
        return [
            (float(d2[i]), RingInt(int(self.u[i]), int(self.v[i])))
            for i in np.flatnonzero(d2 <= thr)
        ]


class _TailScan:
    """Chunked scan over all coefficient tails with per-tail optimal beta_0.

    Two passes: the first finds the global minimum of |beta_0 - t| (chunk
    minima may run on several workers), the second recollects every
    candidate within a relative window of the minimum so the deterministic
    (value, lexicographic) tie-break sees all contenders.
    """

    CHUNK = 1 << 18

    def __init__(self, box: SearchBox, h0: int | None, cap: int):
        self.box = box
        self.spec = box.spec
        self.h0 = h0
        self.sets = [_disk_arrays(box.spec, hj) for hj in box.heights]
        total = math.prod(len(s[0]) for s in self.sets)
        if total > cap:
            raise CapExceededError(
                f"enumeration of {total} tails exceeds cap {cap}"
            )
        self.zero_idx = [
            int(np.flatnonzero((s[0] == 0) & (s[1] == 0))[0])
            for s in self.sets
        ]
        self.theta = np.asarray(box.theta, dtype=np.complex128)
        self._beta0_disk: _Beta0Disk | None = None

    def _disk(self) -> _Beta0Disk:
        if self._beta0_disk is None:
            assert self.h0 is not None
            self._beta0_disk = _Beta0Disk(self.spec, self.h0)
        return self._beta0_disk

    def _tasks(self):
        outer_ranges = [range(len(s[0])) for s in self.sets[:-1]]
        n_last = len(self.sets[-1][0])
        for outer in itertools.product(*outer_ranges):
            for start in range(0, n_last, self.CHUNK):
                yield outer, start, min(start + self.CHUNK, n_last)

    def _tail_values(self, outer, start, stop):
        prefix = sum(
            self.sets[j][2][idx] * self.theta[j]
            for j, idx in enumerate(outer)
        )
        t = -(prefix + self.sets[-1][2][start:stop] * self.theta[-1])
        d2, bu, bv = _best_beta0_blocks(self.spec, t, self.h0)
        if all(idx == z for idx, z in zip(outer, self.zero_idx[:-1])):
            zi = self.zero_idx[-1]
            if start <= zi < stop:
                d2 = d2.copy()
                d2[zi - start] = np.inf  # the all-zero vector is excluded
        return t, d2, bu, bv

    def _chunk_min(self, task):
        outer, start, stop = task
        t, d2, bu, bv = self._tail_values(outer, start, stop)
        lo = float(np.min(d2)) if d2.size else np.inf
        repaired = []
        if self.h0 is not None and not np.isfinite(d2).all():
            zero_outer = all(
                x == z for x, z in zip(outer, self.zero_idx[:-1])
            )
            for i in np.flatnonzero(np.isinf(d2)):
                if zero_outer and start + i == self.zero_idx[-1]:
                    continue
                for dd, cand in self._disk().best(complex(t[i])):
                    repaired.append((dd, int(i), cand))
                    lo = min(lo, dd)
        return lo, repaired

    def run(self, workers: int = 1):
        tasks = list(self._tasks())
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(self._chunk_min, tasks))
        else:
            results = [self._chunk_min(t) for t in tasks]
        vmin2 = min(r[0] for r in results)
        candidates: list[tuple[float, tuple[RingInt, ...]]] = []
        # Seed candidate for the excluded all-zero tail: the smallest
        # nonzero ring integer has modulus exactly 1.
        unit_cands = [
            (1.0, (c,) + tuple(RingInt(0, 0) for _ in range(self.box.m)))
            for c in disk_points(self.spec, 1)
            if not c.is_zero
        ]
        vmin2 = min(vmin2, 1.0)
        thr = vmin2 * (1.0 + _VALUE_WINDOW) + 5e-324
        if 1.0 <= thr:
            candidates.extend(unit_cands)
        for task, (lo, repaired) in zip(tasks, results):
            if lo > thr and not repaired:
                continue
            outer, start, stop = task
            t, d2, bu, bv = self._tail_values(outer, start, stop)
            for i in np.flatnonzero(d2 <= thr):
                beta0 = RingInt(int(bu[i]), int(bv[i]))
                tail = self._tail(outer, start + int(i))
                candidates.append((math.sqrt(float(d2[i])), (beta0, *tail)))
            for dd, i, cand in repaired:
                if dd <= thr:
                    tail = self._tail(outer, start + i)
                    candidates.append((math.sqrt(dd), (cand, *tail)))
        best = min(candidates, key=lambda c: (c[0], _lex_key(c[1])))
        return best

    def _tail(self, outer, last_idx: int) -> tuple[RingInt, ...]:
        idxs = (*outer, last_idx)
        return tuple(
            RingInt(int(self.sets[j][0][i]), int(self.sets[j][1][i]))
            for j, i in enumerate(idxs)
        )


def _extended_value(beta, theta, digits: int = 30) -> float:
    """Twice-rounded linear-form value: 30-digit evaluation, then float."""
    import mpmath as mp

    with mp.workdps(digits):
        acc = mp.mpc(0)
        spec_emb = beta[0]
        acc += mp.mpc(spec_emb.real, spec_emb.imag)
        for b, th in zip(beta[1:], theta):
            acc += mp.mpc(b.real, b.imag) * mp.mpc(th.real, th.imag)
        return float(mp.fabs(acc))


def find_witness(
    box: SearchBox,
    cap: int = 10_000_000,
    workers: int = 1,
    extended: bool = False,
) -> Witness:
    """Nonzero vector with |beta_j| <= H_j (j >= 1) and value <= the
    Minkowski radius; beta_0 is unconstrained (nearest ring integer).

    A value above the radius would contradict the existence theorem and is
    reported as an implementation defect, never returned silently.
    """
    value, beta = _TailScan(box, None, cap).run(workers)
    radius = minkowski_radius(box.spec, box.heights, box.m)
    if extended:
        emb = [box.spec.embed(b) for b in beta]
        value = _extended_value(emb, box.theta)
    if value > radius * (1.0 + 1e-9) + 5e-324:
        raise AssertionError(
            "witness not found: best value exceeds the guaranteed radius; "
            "this is an implementation defect"
        )
    return Witness(beta=beta, value=value, radius=radius)


def brute_min(
    box: SearchBox,
    h0: int,
    cap: int = 10_000_000,
    workers: int = 1,
) -> Witness:
    """Exact minimum of the linear-form value over nonzero vectors with
    |beta_0| <= H0 and |beta_j| <= H_j; ties broken lexicographically."""
    if not isinstance(h0, int) or h0 < 1:
        raise DomainError("H0 must be an integer >= 1")
    value, beta = _TailScan(box, h0, cap).run(workers)
    return Witness(
        beta=beta,
        value=value,
        radius=minkowski_radius(box.spec, box.heights, box.m),
    )


def default_beta0_cap(box: SearchBox) -> int:
    """H0 large enough that the optimal beta_0 is never clipped:
    ceil(sum H_j |Theta_j|) plus the covering slack."""
    reach = sum(h * abs(t) for h, t in zip(box.heights, box.theta))
    return int(math.ceil(reach + box.spec.covering_radius_bound() + 2.0))


def shidlovskii_witness(
    theta,
    h: int,
    cap: int = 10_000_000,
) -> Witness:
    """Exhaustive rational-integer search: |beta_j| <= H for all j,
    value <= sqrt(2) (1 + sum |Theta_j|) / H^((m-1)/2)."""
    theta = tuple(complex(t) for t in theta)
    m = len(theta)
    if m < 1:
        raise DomainError("need at least one Theta")
    if not isinstance(h, int) or h < 1:
        raise DomainError("H must be an integer >= 1")
    if (2 * h + 1) ** (m + 1) - 1 > cap:
        raise CapExceededError(
            f"enumeration of {(2 * h + 1) ** (m + 1) - 1} vectors "
            f"exceeds cap {cap}"
        )
    candidates: list[tuple[float, tuple[RingInt, ...]]] = []
    best2 = math.inf
    rng = range(-h, h + 1)
    zero_tail = (0,) * m
    staged: list[tuple[float, int, tuple[int, ...]]] = []
    for tail in itertools.product(*[rng] * m):
        if tail == zero_tail:
            continue
        t = sum(b * th for b, th in zip(tail, theta))
        b0 = min(max(round(-t.real), -h), h)
        val2 = (b0 + t.real) ** 2 + t.imag**2
        staged.append((val2, b0, tail))
        best2 = min(best2, val2)
    best2 = min(best2, 1.0)  # beta = (1, 0, ..., 0)
    thr = best2 * (1.0 + _VALUE_WINDOW) + 5e-324
    if 1.0 <= thr:
        candidates.append(
            (1.0, (RingInt(1, 0),) + tuple(RingInt(0, 0) for _ in range(m)))
        )
    for val2, b0, tail in staged:
        if val2 <= thr:
            beta = (RingInt(b0, 0),) + tuple(RingInt(b, 0) for b in tail)
            candidates.append((math.sqrt(val2), beta))
    value, beta = min(candidates, key=lambda c: (c[0], _lex_key(c[1])))
    radius = shidlovskii_radius(theta, h)
    if value > radius * (1.0 + 1e-9) + 5e-324:
        raise AssertionError(
            "witness not found: best value exceeds the classical bound; "
            "this is an implementation defect"
        )
    return Witness(beta=beta, value=value, radius=radius)
