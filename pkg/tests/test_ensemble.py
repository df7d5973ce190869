import math

import pytest

from zlab.cfcore import Alphabet
from zlab.ensemble import (
    SamplingPolicy,
    build_ladder,
    build_preensembles,
    choose_parameters,
    factorize,
    asymptotic_Q1,
    product_set,
    product_window_report,
    spread_report,
)
from zlab.errors import InputError, ResourceCapError

A12 = Alphabet((1, 2))


def desk_ensemble(seed=0, cap=64):
    ladder = build_ladder(1e5, 0.4, Q1_override=4.0)
    policy = SamplingPolicy(mode="sample", max_factor_size=cap, seed=seed)
    return build_preensembles(ladder, A12, policy)


# ---------------------------------------------------------------- ladder


@pytest.mark.parametrize("N", [1e6, 1e9])
@pytest.mark.parametrize("eps0", [0.05, 0.1])
def test_ladder_shape_and_endpoints(N, eps0):
    lad = build_ladder(N, eps0, Q1_override=4.0)
    assert len(lad.values) == 2 * lad.J + 3
    assert lad.rung(lad.J + 1) == N  # exact by construction
    assert lad.rung(-lad.J - 1) >= 2.0
    # rungs increase strictly
    assert all(b > a for a, b in zip(lad.values, lad.values[1:]))


@pytest.mark.parametrize("N", [1e6, 1e9])
@pytest.mark.parametrize("eps0", [0.05, 0.1])
def test_ladder_pair_inequalities(N, eps0):
    # N_m >= N_{m+1}^(1-eps0) and N/N_{m+1} >= (N/N_m)^(1-eps0)
    lad = build_ladder(N, eps0, Q1_override=4.0)
    for m in range(-lad.J - 1, lad.J):
        lo, hi = lad.rung(m), lad.rung(m + 1)
        assert lo >= hi ** (1.0 - eps0) * (1 - 1e-12)
        assert N / hi >= (N / lo) ** (1.0 - eps0) * (1 - 1e-12)


@pytest.mark.parametrize("N", [1e6, 1e9])
@pytest.mark.parametrize("eps0", [0.05, 0.1])
def test_ladder_branch_agreement(N, eps0):
    # the two branch formulas coincide at j = 0 and j = 1
    lad = build_ladder(N, eps0, Q1_override=4.0)
    for j in (0, 1):
        up = N ** ((1.0 / (2.0 - eps0)) * (1.0 - eps0) ** (1 - j))
        down = N ** (1.0 - (1.0 / (2.0 - eps0)) * (1.0 - eps0) ** j)
        assert abs(up - down) <= 1e-12 * max(up, down)
        assert lad.rung(j) == pytest.approx(up, rel=1e-12)


def test_ladder_Q_sequence():
    lad = build_ladder(1e6, 0.1, Q1_override=3.0)
    assert lad.Q(0) == 0.0
    assert lad.Q(1) == 3.0
    assert lad.Q(4) == 81.0
    assert lad.T1 == 7.0 * 3.0**7
    with pytest.raises(InputError):
        lad.Q(-1)


def test_asymptotic_Q1_overflows():
    with pytest.raises(InputError):
        asymptotic_Q1(2, 1.0 / 2500.0)
    assert asymptotic_Q1(1, 0.9) == pytest.approx(math.exp(0.9**-5))


def test_ladder_input_validation():
    with pytest.raises(InputError):
        build_ladder(8, 0.1, Q1_override=2.0)
    with pytest.raises(InputError):
        build_ladder(1e6, 0.0, Q1_override=2.0)
    with pytest.raises(InputError):
        build_ladder(1e6, 1.0, Q1_override=2.0)


# ---------------------------------------------------------------- ensemble


def test_preensemble_windows():
    ens = desk_ensemble()
    lad = ens.ladder
    A = ens.alphabet.max_letter
    for j, factor in enumerate(ens.factors, start=1):
        r = lad.rung(j - lad.J) / lad.rung(j - lad.J - 1)
        for e in factor:
            assert len(e.word) % 2 == 0
            assert r / (2 * A) <= e.norm <= r


def test_preensemble_deterministic_sampling():
    a = desk_ensemble(seed=7)
    b = desk_ensemble(seed=7)
    c = desk_ensemble(seed=8)
    assert [tuple(e.word for e in f) for f in a.factors] == [
        tuple(e.word for e in f) for f in b.factors
    ]
    assert [len(f) for f in a.factors] == [len(f) for f in c.factors]


def test_preensemble_exhaustive_cap():
    ladder = build_ladder(1e5, 0.4, Q1_override=4.0)
    with pytest.raises(ResourceCapError):
        build_preensembles(ladder, A12, SamplingPolicy(mode="exhaustive", max_factor_size=2))


def test_preensemble_empty_window_rejected():
    ladder = build_ladder(1e4, 0.3, Q1_override=4.0)
    with pytest.raises(InputError):
        build_preensembles(ladder, Alphabet((1, 2, 3)), SamplingPolicy(mode="sample"))


def test_product_sandwich():
    ens = desk_ensemble(cap=16)
    f1, f2, f3 = ens.factors[:3]
    for e1 in f1[:8]:
        for e2 in f2[:8]:
            for e3 in f3[:8]:
                g = e1 * e2 * e3
                prod = e1.norm * e2.norm * e3.norm
                assert prod <= g.norm <= 4 * prod


def test_product_set_identity_and_cap():
    ens = desk_ensemble(cap=8)
    omega = product_set(ens.factors, cap=100_000)
    assert len(omega) >= 1
    with pytest.raises(ResourceCapError):
        product_set(ens.factors, cap=3)


# ---------------------------------------------------------------- factorization


def test_factorization_set_product_identity():
    ens = desk_ensemble(cap=16)
    fact = factorize(ens, M1=50.0, M2=3.0, M4=3.0, cap=500_000)
    whole = {g.word for g in product_set(ens.factors, cap=500_000)}
    recomposed = {g.word for g in product_set(fact.blocks, cap=500_000)}
    assert recomposed == whole


def test_factorization_threshold_indices():
    ens = desk_ensemble()
    lad = ens.ladder
    fact = factorize(ens, M1=50.0, M2=3.0, M4=10.0)
    j0, j1, j2, j3, j4 = fact.indices
    assert j0 == 1 and j4 == 2 * lad.J + 2
    thresholds = (fact.M1, fact.M1 * fact.M2, lad.N / fact.M4)
    for jk, u in zip((j1, j2, j3), thresholds):
        assert u < lad.rung(jk - lad.J) or jk == 2 * lad.J + 2
        assert lad.rung(jk - lad.J - 1) <= u or jk == 1


def test_factorization_H():
    ens = desk_ensemble()
    fact = factorize(ens, M1=50.0)
    assert fact.H == pytest.approx(1.01 * 50.0 ** (1.0 + 2.0 * 0.4))


def test_factorization_validation():
    ens = desk_ensemble()
    with pytest.raises(InputError):
        factorize(ens, M1=1e5, M2=10.0, M4=10.0)  # product exceeds N
    with pytest.raises(InputError):
        factorize(ens, M1=0.5)


def test_spread_report_bound():
    ens = desk_ensemble(cap=16)
    fact = factorize(ens, M1=50.0, M2=3.0, M4=3.0)
    rep = spread_report(fact, cap=500_000)
    assert rep["ratio"] == rep["max_norm"] / rep["min_norm"]
    assert rep["bound"] == 11000 * 2**4
    assert rep["within_bound"]


def test_window_report_fractions_in_range():
    rep = product_window_report(desk_ensemble(cap=16), samples=50, seed=1)
    assert len(rep["rows"]) == 2 * 2 + 1
    for row in rep["rows"]:
        assert 0.0 <= row["window_fraction"] <= 1.0
        assert row["sandwich_fraction"] == 1.0  # sandwich is a theorem


# ---------------------------------------------------------------- parameters


def test_choose_parameters_cases():
    lad = build_ladder(1e6, 0.05, Q1_override=4.0)
    bal = choose_parameters(1, 1, 1e6, lad, A=2, case="balanced")
    assert bal.M1 == pytest.approx(120 * 4 * math.sqrt(1e6 * 16 * 16))
    poly = choose_parameters(1, 1, 1e6, lad, A=2, case="polynomial")
    assert poly.M1 == pytest.approx(150 * 4 * 16**2 * 16)
    # auto picks by the crossover N vs Q_{a+1}^2.5 Q_{b+1}^1.5
    auto = choose_parameters(1, 1, 1e6, lad, A=2)
    assert auto.case == ("balanced" if 1e6 < 16**2.5 * 16**1.5 else "polynomial")


def test_choose_parameters_infeasible_at_desk_scale():
    lad = build_ladder(1e6, 0.05, Q1_override=4.0)
    choice = choose_parameters(1, 1, 1e6, lad, A=2, case="balanced")
    assert choice.M1 > 1e6
    assert not choice.feasible
    assert "infeasible" in choice.notes


def test_choose_parameters_fallback_to_one():
    lad = build_ladder(1e6, 0.05, Q1_override=4.0)
    choice = choose_parameters(0, 0, 1e6, lad, A=2)
    assert choice.M2 == 1.0 and choice.M4 == 1.0  # raw values below Q1
    with pytest.raises(InputError):
        choose_parameters(-1, 0, 1e6, lad, A=2)
