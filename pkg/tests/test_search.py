import itertools
import math
import random

import pytest

from bakerbound import (
    CapExceededError,
    FieldSpec,
    RingInt,
    SearchBox,
    brute_min,
    default_beta0_cap,
    disk_points,
    find_witness,
    minkowski_radius,
    shidlovskii_radius,
    shidlovskii_witness,
)


def reference_min(box: SearchBox, h0: int) -> float:
    """Fully exhaustive oracle: product enumeration over beta_0 and all
    tails, no per-tail shortcut at all."""
    spec = box.spec
    best = math.inf
    pts0 = disk_points(spec, h0)
    tails = [disk_points(spec, h) for h in box.heights]
    for tail in itertools.product(*tails):
        t = sum(
            spec.embed(b) * th for b, th in zip(tail, box.theta)
        )
        for b0 in pts0:
            if b0.is_zero and all(b.is_zero for b in tail):
                continue
            v = abs(spec.embed(b0) + t)
            best = min(best, v)
    return best


def random_box(rng: random.Random, m_max=3, h_max=5) -> SearchBox:
    m = rng.randint(1, m_max)
    d = rng.choice([1, 2, 3, 7, 11])
    theta = tuple(
        complex(rng.uniform(0.1, 3.0), rng.uniform(0.0, 3.0))
        for _ in range(m)
    )
    heights = tuple(rng.randint(1, h_max) for _ in range(m))
    return SearchBox(theta=theta, heights=heights, spec=FieldSpec(d))


def test_minkowski_radius_examples():
    assert minkowski_radius(FieldSpec(1), [1], 1) == pytest.approx(
        4 / math.pi, rel=1e-14
    )
    assert minkowski_radius(FieldSpec(3), [1], 1) == pytest.approx(
        2 * math.sqrt(3) / math.pi, rel=1e-14
    )
    assert minkowski_radius(FieldSpec(1), [10, 10], 2) == pytest.approx(
        (2 / math.sqrt(math.pi)) ** 3 / 100, rel=1e-14
    )


def test_disk_points_exact_membership():
    for d in (1, 2, 3, 7, 11):
        spec = FieldSpec(d)
        for radius in (1, 2, 5):
            pts = set(disk_points(spec, radius))
            assert RingInt(0, 0) in pts
            for p in pts:
                assert spec.abs2(p) <= radius * radius
            # no admissible point was missed: scan a generous box
            for u in range(-2 * radius - 2, 2 * radius + 3):
                for v in range(-2 * radius - 2, 2 * radius + 3):
                    q = RingInt(u, v)
                    if spec.abs2(q) <= radius * radius:
                        assert q in pts


def test_find_witness_ring_element_theta():
    spec = FieldSpec(3)
    omega = spec.embed(RingInt(0, 1))
    wit = find_witness(SearchBox(theta=(omega,), heights=(2,), spec=spec))
    assert wit.value <= 1e-12
    assert any(not b.is_zero for b in wit.beta)


def test_find_witness_pi_example():
    box = SearchBox(
        theta=(complex(math.pi, 0.0),), heights=(1,), spec=FieldSpec(1)
    )
    wit = find_witness(box)
    assert wit.value == pytest.approx(math.pi - 3.0, rel=1e-12)
    assert wit.radius == pytest.approx(4 / math.pi, rel=1e-14)
    assert wit.value <= wit.radius


def test_find_witness_half_example():
    box = SearchBox(
        theta=(complex(0.5, 0.0),), heights=(1,), spec=FieldSpec(1)
    )
    wit = find_witness(box)
    assert wit.value == pytest.approx(0.5, abs=1e-15)


def test_brute_min_equals_reference(rng):
    for _ in range(25):
        box = random_box(rng, m_max=2, h_max=3)
        h0 = rng.randint(1, 6)
        wit = brute_min(box, h0)
        assert wit.value == pytest.approx(
            reference_min(box, h0), rel=1e-12, abs=1e-12
        )


def test_find_witness_matches_brute_min_with_large_cap(rng):
    for _ in range(20):
        box = random_box(rng, m_max=2, h_max=4)
        wit = find_witness(box)
        oracle = brute_min(box, default_beta0_cap(box))
        assert wit.value == pytest.approx(oracle.value, rel=1e-12, abs=1e-15)


def test_brute_min_monotone_in_heights(rng):
    for _ in range(15):
        box = random_box(rng, m_max=2, h_max=3)
        bigger = SearchBox(
            theta=box.theta,
            heights=tuple(h + 2 for h in box.heights),
            spec=box.spec,
        )
        v1 = brute_min(box, 8).value
        v2 = brute_min(bigger, 8).value
        assert v2 <= v1 + 1e-15


def test_theorem_guarantee_sampled(rng):
    for _ in range(40):
        box = random_box(rng)
        wit = find_witness(box)
        assert wit.value <= wit.radius  # zero tolerance


def test_volume_identity():
    for d in (1, 2, 3, 7, 11):
        spec = FieldSpec(d)
        det = spec.lattice_determinant()
        for m in (1, 2, 3, 4):
            for hs in ([1] * m, [100] * m, [3 + 7 * j for j in range(m)]):
                r0 = minkowski_radius(spec, hs, m)
                prod_h2 = 1.0
                for h in hs:
                    prod_h2 *= h * h
                lhs = math.pi ** (m + 1) * prod_h2 * r0 * r0
                rhs = 2 ** (2 * m + 2) * det ** (m + 1)
                assert abs(lhs - rhs) <= 1e-10 * rhs


def test_zero_tail_candidate():
    # Theta far from the lattice and tiny heights: the best vector can be
    # the pure beta_0 = 1 candidate with value exactly 1.
    box = SearchBox(
        theta=(complex(0.5, 0.5),), heights=(1,), spec=FieldSpec(2)
    )
    wit = brute_min(box, 1)
    assert wit.value <= 1.0 + 1e-15
    assert any(not b.is_zero for b in wit.beta)


def test_beta0_cap_respected():
    box = SearchBox(
        theta=(complex(7.3, 0.2),), heights=(3,), spec=FieldSpec(1)
    )
    for h0 in (1, 2, 25):
        wit = brute_min(box, h0)
        assert box.spec.abs2(wit.beta[0]) <= h0 * h0
        assert wit.value == pytest.approx(
            reference_min(box, h0), rel=1e-12, abs=1e-12
        )


def test_workers_deterministic(rng):
    for _ in range(6):
        box = random_box(rng, m_max=2, h_max=4)
        w1 = find_witness(box, workers=1)
        w2 = find_witness(box, workers=3)
        assert w1 == w2


def test_cap_exceeded():
    box = SearchBox(
        theta=(complex(1.1, 0.3),) * 3,
        heights=(50, 50, 50),
        spec=FieldSpec(1),
    )
    with pytest.raises(CapExceededError):
        find_witness(box, cap=10_000)
    with pytest.raises(CapExceededError):
        shidlovskii_witness((1.3, 0.7, 2.2), 50, cap=10_000)


def test_shidlovskii_examples():
    # m = 1: the bound does not decay but still holds
    wit = shidlovskii_witness((complex(1.0, 0.0),), 3)
    assert wit.value <= wit.radius
    assert wit.radius == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    # m = 2 irrationals
    theta = (complex(math.sqrt(2), 0), complex(math.sqrt(3), 0))
    wit2 = shidlovskii_witness(theta, 10)
    assert wit2.radius == pytest.approx(
        math.sqrt(2) * (1 + math.sqrt(2) + math.sqrt(3)) / math.sqrt(10),
        rel=1e-14,
    )
    assert wit2.value <= wit2.radius
    # rational dependence: 2*(i) - (2i) = 0
    wit3 = shidlovskii_witness((1j, 2j), 5)
    assert wit3.value <= 1e-12


def test_shidlovskii_matches_full_enumeration(rng):
    for _ in range(10):
        m = rng.randint(1, 2)
        theta = tuple(
            complex(rng.uniform(0.1, 2.0), rng.uniform(0.0, 2.0))
            for _ in range(m)
        )
        h = rng.randint(1, 4)
        wit = shidlovskii_witness(theta, h)
        best = math.inf
        rng_range = range(-h, h + 1)
        for vec in itertools.product(*[rng_range] * (m + 1)):
            if all(x == 0 for x in vec):
                continue
            val = abs(vec[0] + sum(b * t for b, t in zip(vec[1:], theta)))
            best = min(best, val)
        assert wit.value == pytest.approx(best, rel=1e-12, abs=1e-12)


def test_extended_value_mode():
    box = SearchBox(
        theta=(complex(math.pi, 0.0),), heights=(1,), spec=FieldSpec(1)
    )
    w64 = find_witness(box)
    wx = find_witness(box, extended=True)
    assert wx.beta == w64.beta
    assert wx.value == pytest.approx(w64.value, rel=1e-12)
