import math
import random

import numpy as np
import pytest

from oracles import sigma_direct, trig_sum_direct
from zlab.arcs import (
    NormHistogram,
    arc_point_from_parts,
    classify_arc,
    dirichlet_decompose,
    parseval_check,
    sigma_N_of_Q,
    sigma_NZ,
    split_K,
    trig_sum,
)
from zlab.cfcore import Alphabet
from zlab.ensemble import SamplingPolicy, build_ladder, build_preensembles, product_set
from zlab.errors import InputError

LADDER = build_ladder(1e4, 0.5, Q1_override=4.0)


# ---------------------------------------------------------------- splitting


def test_split_K_examples():
    assert split_K(0.3) == (1, pytest.approx(-0.2))
    assert split_K(0.0) == (0, 0.0)
    assert split_K(0.25) == (0, 0.25)
    assert split_K(-0.25) == (-1, 0.25)


@pytest.mark.parametrize("K", [random.Random(3).uniform(-50, 50) for _ in range(200)])
def test_split_K_partition(K):
    l, lam = split_K(K)
    assert K == pytest.approx(0.5 * l + lam)
    assert -0.25 < lam <= 0.25
    assert abs(l) <= 2 * abs(K) + 1


# ---------------------------------------------------------------- decomposition


def test_decompose_example():
    p = dirichlet_decompose(math.sqrt(2) - 1, 1e4, 2.0)
    assert (p.a, p.q) == (12, 29)
    assert abs(p.K) <= 2.0 * math.sqrt(1e4) / p.q + 1e-9
    assert p.reconstruct() == pytest.approx(p.theta, abs=1e-12)


def test_decompose_rational_and_zero():
    p = dirichlet_decompose(0.0, 1e4, 2.0)
    assert (p.a, p.q, p.l, p.lam) == (0, 1, 0, 0.0)
    p = dirichlet_decompose(0.5, 1e4, 2.0)
    assert (p.a, p.q) == (1, 2) and p.K == 0.0


def test_decompose_constraints_random():
    rng = random.Random(1)
    N, Q1 = 1e6, 4.0
    lad = build_ladder(N, 0.1, Q1_override=Q1)
    for _ in range(500):
        theta = rng.random()
        p = classify_arc(dirichlet_decompose(theta, N, Q1), lad)
        assert math.gcd(p.a, p.q) == 1
        assert 1 <= p.q <= math.sqrt(N) / Q1
        assert abs(p.K) <= Q1 * math.sqrt(N) / p.q + 1e-6
        assert -0.25 < p.lam <= 0.25
        assert abs(p.reconstruct() - theta) < 1e-12
        assert p.alpha is not None and p.beta is not None
        assert 0 <= p.kappa < int(round(lad.T1))


def test_decompose_input_validation():
    with pytest.raises(InputError):
        dirichlet_decompose(1.5, 1e4, 2.0)
    with pytest.raises(InputError):
        dirichlet_decompose(0.3, 2.0, 4.0)


# ---------------------------------------------------------------- classification


def test_classification_is_a_partition():
    # every admissible (q, l) lands in exactly one (alpha, beta, kappa) cell
    lad = LADDER
    Q1 = lad.Q1
    N = lad.N
    t1 = int(round(lad.T1))
    for q in range(1, int(math.sqrt(N) / Q1) + 1):
        for l in range(-40, 41):
            p = arc_point_from_parts(1 if q > 1 else 0, q, l, 0.1, N, lad)
            a_expect = 0 if q < Q1 else int(math.floor(math.log(q, Q1) + 1e-12))
            b_expect = 0 if abs(l) < Q1 else int(math.floor(math.log(abs(l), Q1) + 1e-12))
            assert p.alpha == a_expect
            assert p.beta == b_expect
            assert p.kappa == l % t1
            assert lad.Q(p.alpha) <= max(q, 1e-9) and q < lad.Q(p.alpha + 1)


def test_classify_rejects_bad_denominator():
    with pytest.raises(InputError):
        arc_point_from_parts(1, 3000, 0, 0.0, 1e4, LADDER)


def test_arc_point_validation():
    with pytest.raises(InputError):
        arc_point_from_parts(2, 4, 0, 0.0, 1e4, LADDER)  # gcd > 1
    with pytest.raises(InputError):
        arc_point_from_parts(1, 4, 0, 0.5, 1e4, LADDER)  # lambda out of range


# ---------------------------------------------------------------- trig sums


def test_trig_sum_against_direct():
    hist = NormHistogram.from_norms([3, 5, 5, 9])
    for theta in (0.0, 0.1, 0.37, 0.99):
        direct = trig_sum_direct([3, 5, 5, 9], theta)
        assert trig_sum(hist, theta) == pytest.approx(direct, abs=1e-12)
    assert trig_sum(hist, 0.0) == pytest.approx(4.0 + 0j)


def test_sigma_NZ_single_class_only():
    hist = NormHistogram.from_norms([3, 5])
    p1 = arc_point_from_parts(1, 5, 2, 0.1, 1e4, LADDER)
    p2 = arc_point_from_parts(2, 5, 2, 0.1, 1e4, LADDER)
    val = sigma_NZ(hist, [p1, p2])
    assert val == pytest.approx(
        abs(trig_sum(hist, p1.theta)) + abs(trig_sum(hist, p2.theta))
    )
    p_other = arc_point_from_parts(1, 17, 2, 0.1, 1e4, LADDER)
    with pytest.raises(InputError):
        sigma_NZ(hist, [p1, p_other])


def test_sigma_aggregate_against_direct_oracle():
    norms = [2, 3, 3, 7]
    hist = NormHistogram.from_norms(norms)
    lad = build_ladder(100.0, 0.5, Q1_override=4.0)
    ours = sigma_N_of_Q(hist, 100.0, lad, Q=5.0, quadrature_points=15)
    direct = sigma_direct(norms, 100.0, 4.0, 5.0, 15)
    assert ours == pytest.approx(direct, rel=1e-9)


def test_sigma_monotone_in_Q():
    hist = NormHistogram.from_norms([2, 3, 7])
    lad = build_ladder(100.0, 0.5, Q1_override=4.0)
    lo = sigma_N_of_Q(hist, 100.0, lad, Q=0.0, quadrature_points=15)
    hi = sigma_N_of_Q(hist, 100.0, lad, Q=8.0, quadrature_points=15)
    assert hi <= lo


# ---------------------------------------------------------------- Parseval


def test_parseval_exact_small():
    hist = NormHistogram.from_norms([3, 5])
    res = parseval_check(hist, 16)
    assert res.exact == 2.0
    assert res.relative_error < 1e-12
    assert res.cauchy_schwarz_distinct_bound <= len(hist.counts) + 1e-9


def test_parseval_requires_enough_points():
    hist = NormHistogram.from_norms([3, 5])
    with pytest.raises(InputError):
        parseval_check(hist, 10)


def test_parseval_randomized_ensembles():
    rng = random.Random(42)
    for trial in range(20):
        norms = [rng.randint(1, 200) for _ in range(rng.randint(5, 60))]
        hist = NormHistogram.from_norms(norms)
        res = parseval_check(hist, 2 * hist.max_norm + 1, N=1e4)
        assert res.relative_error < 1e-9
        assert res.cauchy_schwarz_distinct_bound <= len(hist.counts) + 1e-9
        assert res.ratio_to_bound == pytest.approx(res.exact * 1e4 / hist.total**2)


def test_parseval_on_real_ensemble():
    ens = build_preensembles(
        build_ladder(1e4, 0.5, Q1_override=4.0),
        Alphabet((1, 2)),
        SamplingPolicy(mode="sample", max_factor_size=8, seed=0),
    )
    omega = product_set(ens.factors, cap=100_000)
    hist = NormHistogram.from_elements(omega)
    res = parseval_check(hist, 2 * hist.max_norm + 1)
    assert res.relative_error < 1e-9


def test_histogram_validation():
    with pytest.raises(InputError):
        NormHistogram.from_norms([])
    hist = NormHistogram.from_norms([4, 4, 6])
    assert hist.total == 3
    assert hist.max_norm == 6
    assert hist.counts == ((4, 2), (6, 1))
