"""Slow, simple reference implementations used to cross-check the package.

Everything here is deliberately naive: breadth-first numpy expansion with no
search-order tricks, direct double loops for trigonometric sums, a cylinder
covering for the dimension, and a from-scratch rewrite of the congruence
predicates.  Shared nothing with the implementations under test beyond the
public data types.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def unpruned_census(letters, limit: int) -> set:
    """All continuants <= limit by breadth-first expansion of (p, q) states.

    Continuants only grow along a word, so discarding q > limit is lossless;
    no other pruning or ordering is used.  States are deduplicated per level
    with np.unique, and every intermediate q is recorded.
    """
    letters = np.asarray(sorted(letters), dtype=np.int64)
    states = np.array([[0, 1]], dtype=np.int64)  # rows (p, q) = (K_{k-1}, K_k)
    seen = set()
    while len(states):
        p, q = states[:, 0], states[:, 1]
        nxt = np.concatenate(
            [np.stack([q, d * q + p], axis=1) for d in letters], axis=0
        )
        nxt = nxt[nxt[:, 1] <= limit]
        nxt = np.unique(nxt, axis=0)
        seen.update(int(x) for x in nxt[:, 1])
        states = nxt
    return seen


def multiplicity_oracle(letters, limit: int) -> dict:
    """r(d): number of distinct fractions b/d with d <= limit, by exhaustive
    expansion of full matrices and set-of-pairs dedup."""
    frontier = {(1, 0, 0, 1)}
    pairs = set()
    while frontier:
        nxt = set()
        for a, b, c, d in frontier:
            for dl in letters:
                m = (b, a + b * dl, d, c + d * dl)
                if m[3] <= limit:
                    nxt.add(m)
                    pairs.add((m[1], m[3]))
        frontier = nxt
    out: dict = {}
    for b, d in pairs:
        out[d] = out.get(d, 0) + 1
    return out


def dimension_oracle(letters, n1: int = 10, n2: int = 12) -> float:
    """Covering-dimension estimate from cylinder intervals.

    s_n is the root of sum over |w| = n of |I_w|^s = 1 with
    |I_w| = 1/(q (q + q_prev)); s_n = delta + c/n to high accuracy, so two
    depths give the eliminant (n2 s_{n2} - n1 s_{n1}) / (n2 - n1).
    """

    def root(n: int) -> float:
        lengths = []
        for w in itertools.product(sorted(letters), repeat=n):
            p, q = 0, 1
            for d in w:
                p, q = q, d * q + p
            lengths.append(1.0 / (q * (q + p)))
        lo, hi = 1e-3, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if sum(l**mid for l in lengths) > 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    s1, s2 = root(n1), root(n2)
    return (n2 * s2 - n1 * s1) / (n2 - n1)


def trig_sum_direct(norms, theta: float) -> complex:
    """Sum of e(theta * n) over the norm multiset, one term at a time."""
    return sum(complex(math.cos(2 * math.pi * theta * n), math.sin(2 * math.pi * theta * n)) for n in norms)


def sigma_direct(norms, N, Q1, Q, points: int) -> float:
    """Aggregated second moment by direct triple/lambda double loop."""
    total = 0.0
    max_q = int(math.sqrt(N) / Q1)
    for q in range(1, max_q + 1):
        residues = [0] if q == 1 else [a for a in range(1, q) if math.gcd(a, q) == 1]
        lmax = int(3.0 * Q1 * math.sqrt(N) / q)
        for a in residues:
            for l in range(-lmax, lmax + 1):
                if max(q, abs(l)) < Q:
                    continue
                for k in range(points):
                    lam = -0.25 + (k + 0.5) / (2.0 * points)
                    theta = a / q + l / (2.0 * N) + lam / N
                    total += abs(trig_sum_direct(norms, theta)) ** 2 / (2.0 * points)
    return total


def _dist(x: Fraction) -> Fraction:
    """||x|| via rounding, independently of the floor-based version."""
    nearest = round(x)
    return abs(x - nearest)


def near_set_membership(x, y, t1, t2, N, M1, A, Q_beta1) -> bool:
    """Literal transcription of the approximate-congruence definition."""
    N, M1, Qb1 = Fraction(N), Fraction(M1), Fraction(Q_beta1)
    lam = Fraction(t1.lam)
    for i in range(2):
        xi, yi = Fraction(x[i]), Fraction(y[i])
        lhs = _dist(xi * Fraction(t1.a, t1.q) - yi * Fraction(t2.a, t2.q))
        b1 = (
            150 * A**3 * xi / N
            + _dist((xi * t1.l - yi * t2.l) / (2 * N))
            + _dist(lam * (xi - yi) / N)
        )
        b2 = (9 * A) ** 5 * xi * Qb1 / N
        b3 = 74 * A**2 * Qb1 / M1
        if lhs > b1 or lhs > b2 or lhs > b3:
            return False
        if abs(xi * t1.l - yi * t2.l) > (9 * A) ** 5 * xi + 2 * N * lhs:
            return False
    return True


def exact_set_membership(x, y, t1, t2, A) -> bool:
    """Exact-congruence definition checked through the zero-distance form."""
    for i in range(2):
        if _dist(Fraction(x[i] * t1.a, t1.q) - Fraction(y[i] * t2.a, t2.q)) != 0:
            return False
        if abs(x[i] * t1.l - y[i] * t2.l) > (9 * A) ** 5 * x[i]:
            return False
    return True
