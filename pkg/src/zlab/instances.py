"""Canned desk-scale instances tying the ensemble, arc and verifier
machinery together.

At desk scale the strategy formulas for the block sizes usually exceed
the ensemble bound, so the factorization thresholds are chosen to fit the
desk ensemble while the check parameters carry the strategy values; every
report records which hypotheses actually held.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arcs import arc_point_from_parts
from .cfcore import Alphabet
from .ensemble import (
    Factorization,
    GroupElement,
    SamplingPolicy,
    build_ladder,
    build_preensembles,
    choose_parameters,
)
from .ensemble import factorize as _factorize
from .errors import InputError
from .verifier import CheckParams

__all__ = ["DeskInstance", "desk_instance", "make_arc_class"]


@dataclass(frozen=True)
class DeskInstance:
    factorization: Factorization
    g3: GroupElement
    Z: tuple
    params: CheckParams
    strategy_case: str


def make_arc_class(ladder, N, alpha, beta, lam, size):
    """Up to `size` points of one cell: distinct (a, q) with a fixed l.

    q runs over the alpha window, a over coprime residues; l is the
    smallest admissible value in the beta window.
    """
    Q1 = ladder.Q1
    q_lo = max(1, int(math.ceil(ladder.Q(alpha))))
    q_hi = int(min(math.sqrt(N) / Q1, ladder.Q(alpha + 1) - 1e-9))
    if q_hi < q_lo:
        raise InputError(f"alpha window [{q_lo}, {q_hi}] is empty at this scale")
    l = 0 if beta == 0 else int(math.ceil(ladder.Q(beta)))
    points = []
    for q in range(q_lo, q_hi + 1):
        residues = [0] if q == 1 else [a for a in range(1, q) if math.gcd(a, q) == 1]
        for a in residues:
            if abs(l) > 3.0 * Q1 * math.sqrt(N) / q:
                continue
            p = arc_point_from_parts(a, q, l, lam, N, ladder)
            if p.alpha != alpha or p.beta != beta:
                continue
            points.append(p)
            if len(points) == size:
                return tuple(points)
    if not points:
        raise InputError("no admissible arc points in this cell")
    return tuple(points)


def desk_instance(
    alphabet: Alphabet,
    N: float = 1e5,
    eps0: float = 0.4,
    Q1: float = 4.0,
    alpha: int = 1,
    beta: int = 0,
    lam: float = 0.0,
    z_size: int = 10,
    case: str = "polynomial",
    block_thresholds=(50.0, 3.0, 3.0),
    max_factor_size: int = 512,
    seed: int = 0,
) -> DeskInstance:
    """Build ladder, ensemble, a fitting factorization, one arc class and
    the strategy check parameters for verifier runs."""
    ladder = build_ladder(N, eps0, Q1_override=Q1)
    ens = build_preensembles(
        ladder, alphabet, SamplingPolicy(mode="sample", max_factor_size=max_factor_size, seed=seed)
    )
    m1f, m2f, m4f = block_thresholds
    fact = _factorize(ens, M1=m1f, M2=m2f, M4=m4f)
    g3 = fact.blocks[2][len(fact.blocks[2]) // 2]
    Z = make_arc_class(ladder, N, alpha, beta, lam, z_size)
    choice = choose_parameters(alpha, beta, N, ladder, alphabet.max_letter, case=case)
    params = CheckParams(
        N=float(N),
        M1=choice.M1,
        H=1.01 * choice.M1 ** (1.0 + 2.0 * eps0),
        A=alphabet.max_letter,
        Q_beta1=ladder.Q(beta + 1),
    )
    return DeskInstance(
        factorization=fact, g3=g3, Z=Z, params=params, strategy_case=case
    )
