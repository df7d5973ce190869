"""The norm ladder, pre-ensemble factors, the product ensemble and its
four-block factorization, plus the parameter strategy for the two cases
of the arc analysis.

The asymptotic-scale constants are astronomically large (the geometric base
Q_1 = exp(A^4 eps0^-5) with eps0 <= 1/2500 overflows a double), so every
constant here is a configuration value: the asymptotic defaults are
recorded in ASYMPTOTIC_CONSTANTS and desk-scale surrogates are passed
explicitly.  Formula structure is preserved exactly.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .cfcore import Alphabet, IDENTITY, UniMat, word_matrix
from .errors import InputError, ResourceCapError

__all__ = [
    "ASYMPTOTIC_CONSTANTS",
    "Ladder",
    "build_ladder",
    "GroupElement",
    "SamplingPolicy",
    "Ensemble",
    "build_preensembles",
    "Factorization",
    "factorize",
    "ParameterChoice",
    "choose_parameters",
    "product_set",
    "product_window_report",
    "spread_report",
]

# Asymptotic values used in the source analysis, for the record.  The
# lower/upper window slacks (70A^2, 73A^2, 150A^2, 1.01, 1.02) appear as
# explicit arguments of the reporting helpers below.
ASYMPTOTIC_CONSTANTS = {
    "eps0_max": 1.0 / 2500.0,
    "Q1_formula": "exp(A^4 / eps0^5)",
    "ensemble_norm_slack": 1.02,
    "H_factor": 1.01,
    "spread_constant": 11000,  # times A^4
}


def asymptotic_Q1(max_letter: int, eps0: float) -> float:
    """Q_1 = exp(A^4 eps0^-5); overflows a double for any realistic eps0."""
    try:
        return math.exp(max_letter**4 * eps0**-5)
    except OverflowError as exc:
        raise InputError(
            "asymptotic Q1 formula overflows a double at these parameters; "
            "pass an explicit Q1 override"
        ) from exc


@dataclass(frozen=True)
class Ladder:
    """The rung sequence N_{-J-1},...,N_{J+1} plus the geometric Q sequence."""

    N: float
    eps0: float
    J: int
    values: tuple  # length 2J+3, index 0 <-> rung -J-1
    Q1: float

    def rung(self, j: int) -> float:
        """N_j for -J-1 <= j <= J+1."""
        if not -self.J - 1 <= j <= self.J + 1:
            raise InputError(f"rung index {j} outside [-{self.J + 1}, {self.J + 1}]")
        return self.values[j + self.J + 1]

    def Q(self, j: int) -> float:
        """Q_0 = 0, Q_j = Q1^j for j >= 1."""
        if j < 0:
            raise InputError("Q index must be >= 0")
        return 0.0 if j == 0 else self.Q1**j

    @property
    def T1(self) -> float:
        """Arc congruence modulus 7*Q_7."""
        return 7.0 * self.Q(7)

    def as_dict(self):
        return {
            "N": self.N,
            "eps0": self.eps0,
            "J": self.J,
            "Q1": self.Q1,
            "values": list(self.values),
        }


def _rung_formula(N: float, eps0: float, j: int) -> float:
    # Both branches agree at j = 0 and j = 1.
    if j <= 1:
        return N ** ((1.0 / (2.0 - eps0)) * (1.0 - eps0) ** (1 - j))
    return N ** (1.0 - (1.0 / (2.0 - eps0)) * (1.0 - eps0) ** j)


def build_ladder(N: float, eps0: float, Q1_override=None, max_letter=None) -> Ladder:
    """Build the rung sequence; J is the deepest value keeping the bottom
    rung N_{-J-1} >= 2 (desk-scale convention; the asymptotic choice is
    J ~ log log N).  The top rung N_{J+1} is N exactly by definition."""
    if N < 16:
        raise InputError("N must be >= 16")
    if not 0.0 < eps0 < 1.0:
        raise InputError("eps0 must lie in (0, 1)")
    J = 0
    while _rung_formula(N, eps0, -(J + 2)) >= 2.0:
        J += 1
    values = [_rung_formula(N, eps0, j) for j in range(-J - 1, J + 1)]
    values.append(float(N))  # N_{J+1} = N exactly
    if Q1_override is not None:
        Q1 = float(Q1_override)
        if Q1 <= 1.0:
            raise InputError("Q1 must exceed 1")
    else:
        if max_letter is None:
            raise InputError("either Q1_override or max_letter is required")
        Q1 = asymptotic_Q1(max_letter, eps0)
    return Ladder(N=float(N), eps0=float(eps0), J=J, values=tuple(values), Q1=Q1)


@dataclass(frozen=True)
class GroupElement:
    """A semigroup element together with its generating word."""

    word: tuple
    mat: UniMat

    @classmethod
    def from_word(cls, quotients, alphabet: Alphabet) -> "GroupElement":
        word = tuple(int(x) for x in quotients)
        bad = [x for x in word if x not in alphabet]
        if bad:
            raise InputError(f"letters {bad} not in alphabet {alphabet}")
        return cls(word, word_matrix(word))

    @property
    def norm(self) -> int:
        return self.mat.d

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.word + other.word, self.mat @ other.mat)


ELEMENT_IDENTITY = GroupElement((), IDENTITY)


@dataclass(frozen=True)
class SamplingPolicy:
    mode: str = "exhaustive"  # or "sample"
    max_factor_size: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exhaustive", "sample"):
            raise InputError("policy mode must be 'exhaustive' or 'sample'")
        if self.max_factor_size < 1:
            raise InputError("max_factor_size must be >= 1")


@dataclass(frozen=True)
class Ensemble:
    alphabet: Alphabet
    ladder: Ladder
    factors: tuple  # tuple of tuples of GroupElement, factors[j-1] = Xi_j
    policy: SamplingPolicy

    @property
    def num_factors(self) -> int:
        return len(self.factors)


def _even_words_in_window(alphabet, lo: float, hi: float, cap: int):
    """All even-length words with continuant in [lo, hi], norm-pruned DFS."""
    out = []
    stack = [((), 0, 1)]
    while stack:
        word, p, q = stack.pop()
        for d in alphabet.letters:
            q2 = d * q + p
            if q2 <= hi:
                w2 = word + (d,)
                if len(w2) % 2 == 0 and q2 >= lo:
                    out.append(GroupElement(w2, word_matrix(w2)))
                    if len(out) > cap:
                        raise ResourceCapError(
                            f"window enumeration exceeded cap {cap}", required=len(out)
                        )
                stack.append((w2, q, q2))
    out.sort(key=lambda e: e.word)
    return out


def build_preensembles(
    ladder: Ladder,
    alphabet: Alphabet,
    policy: SamplingPolicy = SamplingPolicy(),
    enumeration_cap: int = 2_000_000,
) -> Ensemble:
    """Factors Xi_1..Xi_{2J+1}: even-length-word matrices with norm in the
    window [R_j/(2A), R_j], R_j = N_{j-J}/N_{j-J-1}.

    This is a surrogate for the cited pre-ensemble construction (which
    additionally thins each factor to cardinality ~ norm^(2 delta)); the
    product structure that the later modules test is preserved.
    """
    A = alphabet.max_letter
    J = ladder.J
    factors = []
    for j in range(1, 2 * J + 2):
        r = ladder.rung(j - J) / ladder.rung(j - J - 1)
        lo, hi = r / (2 * A), r
        members = _even_words_in_window(alphabet, lo, hi, enumeration_cap)
        if not members:
            raise InputError(
                f"empty norm window [{lo:.3g}, {hi:.3g}] for factor j={j}; "
                "ladder too steep for this alphabet"
            )
        if policy.mode == "exhaustive":
            if len(members) > policy.max_factor_size:
                raise ResourceCapError(
                    f"factor j={j} has {len(members)} members, cap is "
                    f"{policy.max_factor_size}",
                    required=len(members),
                )
        elif len(members) > policy.max_factor_size:
            rng = random.Random(policy.seed * 1_000_003 + j)
            members = sorted(
                rng.sample(members, policy.max_factor_size), key=lambda e: e.word
            )
        factors.append(tuple(members))
    return Ensemble(alphabet=alphabet, ladder=ladder, factors=tuple(factors), policy=policy)


def product_set(factor_list, cap: int = 1_000_000):
    """Exact set product of a list of factor sets (deduplicated by word)."""
    acc = {(): ELEMENT_IDENTITY}
    for factor in factor_list:
        nxt = {}
        for e in acc.values():
            for f in factor:
                g = e * f
                nxt[g.word] = g
                if len(nxt) > cap:
                    raise ResourceCapError(
                        f"set product exceeded cap {cap}", required=len(nxt)
                    )
        acc = nxt
    return tuple(sorted(acc.values(), key=lambda e: e.word))


@dataclass(frozen=True)
class Factorization:
    ensemble: Ensemble
    indices: tuple  # (j0, j1, j2, j3, j4), j0 = 1, j4 = 2J+2
    blocks: tuple  # four tuples of GroupElement
    M1: float
    M2: float
    M4: float

    @property
    def H(self) -> float:
        """1.01 * M1^(1 + 2 eps0)."""
        return 1.01 * self.M1 ** (1.0 + 2.0 * self.ensemble.ladder.eps0)

    def as_dict(self):
        return {
            "indices": list(self.indices),
            "cardinalities": [len(b) for b in self.blocks],
            "M1": self.M1,
            "M2": self.M2,
            "M4": self.M4,
            "H": self.H,
        }


def _threshold_index(ladder: Ladder, U: float) -> int:
    """Smallest j in [1, 2J+2] with U < N_{j-J}; clamps at the top rung."""
    for j in range(1, 2 * ladder.J + 2):
        if U < ladder.rung(j - ladder.J):
            return j
    return 2 * ladder.J + 2


def factorize(
    ensemble: Ensemble, M1: float, M2: float = 1.0, M4: float = 1.0, cap: int = 1_000_000
) -> Factorization:
    """Split the factor list into four blocks by the threshold rule
    N_{j_k-J-1} <= U^(k) < N_{j_k-J} with U = M1, M1*M2, N/M4, N."""
    ladder = ensemble.ladder
    N = ladder.N
    if M1 * M2 * M4 > N:
        raise InputError("M-product exceeds N")
    for name, m in (("M1", M1), ("M2", M2), ("M4", M4)):
        if m < 1.0:
            raise InputError(f"{name} must be >= 1")
    thresholds = (M1, M1 * M2, N / M4, N)
    j1, j2, j3 = (_threshold_index(ladder, u) for u in thresholds[:3])
    indices = (1, j1, j2, j3, 2 * ladder.J + 2)
    if any(b < a for a, b in zip(indices, indices[1:])):
        raise InputError(f"threshold rule produced non-monotone indices {indices}")
    blocks = []
    for k in range(4):
        sub = ensemble.factors[indices[k] - 1 : indices[k + 1] - 1]
        blocks.append(product_set(sub, cap=cap) if sub else (ELEMENT_IDENTITY,))
    return Factorization(
        ensemble=ensemble,
        indices=indices,
        blocks=tuple(blocks),
        M1=float(M1),
        M2=float(M2),
        M4=float(M4),
    )


@dataclass(frozen=True)
class ParameterChoice:
    M1: float
    M2: float
    M4: float
    case: str  # "balanced" (square-root form) or "polynomial" (Q-power form)
    M2_raw: float
    M4_raw: float
    feasible: bool  # resolved product M1*M2*M4 <= N and M1 <= N
    notes: str = ""


def choose_parameters(
    alpha: int, beta: int, N: float, ladder: Ladder, A: int, case: str = "auto"
) -> ParameterChoice:
    """Case-selected block sizes for an arc cell (alpha, beta).

    Below the crossover N < Q_{alpha+1}^(5/2) Q_{beta+1}^(3/2) the balanced
    square-root form M1 = 120 A^2 (N Q_{alpha+1} Q_{beta+1})^(1/2) is used,
    otherwise M1 = 150 A^2 Q_{alpha+1}^2 Q_{beta+1}.  M2 and M4 fall back
    to 1 whenever their raw formulas drop below Q1.
    """
    if alpha < 0 or beta < 0:
        raise InputError("alpha, beta must be non-negative")
    if case not in ("auto", "balanced", "polynomial"):
        raise InputError("case must be 'auto', 'balanced' or 'polynomial'")
    eps0 = ladder.eps0
    Q1 = ladder.Q1
    Qa = ladder.Q(alpha)
    Qb = ladder.Q(beta)
    Qa1 = ladder.Q(alpha + 1)
    Qb1 = ladder.Q(beta + 1)
    Q3 = ladder.Q(3)
    if case == "auto":
        case = "balanced" if N < Qa1**2.5 * Qb1**1.5 else "polynomial"
    if case == "balanced":
        M1 = 120.0 * A**2 * math.sqrt(N * Qa1 * Qb1)
    else:
        M1 = 150.0 * A**2 * Qa1**2 * Qb1
    M2_raw = (Qb ** (0.5 - 2.0 * eps0)) * (M1 ** (-2.0 * eps0)) / Q3 if Qb > 0 else 0.0
    M4_raw = math.sqrt(Qa) / Q3 if Qa > 0 else 0.0
    M2 = M2_raw if M2_raw >= Q1 else 1.0
    M4 = M4_raw if M4_raw >= Q1 else 1.0
    feasible = (M1 * M2 * M4 <= N) and (Q1 <= M1 <= N)
    notes = "" if feasible else "infeasible at this scale: block sizes exceed N"
    return ParameterChoice(
        M1=M1, M2=M2, M4=M4, case=case, M2_raw=M2_raw, M4_raw=M4_raw,
        feasible=feasible, notes=notes,
    )


def _sample_products(ensemble: Ensemble, j: int, samples: int, rng) -> list:
    """Random selections (xi_1..xi_j), returned as (prefix product, norms)."""
    out = []
    for _ in range(samples):
        pick = [rng.choice(ensemble.factors[i]) for i in range(j)]
        g = ELEMENT_IDENTITY
        for e in pick:
            g = g * e
        out.append((g, [e.norm for e in pick]))
    return out


def product_window_report(
    ensemble: Ensemble,
    samples: int = 200,
    seed: int = 0,
    lower_slack: float = 70.0,
    upper_slack: float = 1.01,
    tail_lower_slack: float = 150.0,
    tail_upper_slack: float = 73.0,
):
    """Measured (not asserted) fractions of sampled prefix/suffix products
    inside the forward window [N_{j-J}/(70 A^2), 1.01 N_{j-J}] and the
    complementary window for suffixes.  With surrogate pre-ensembles these
    are empirical statistics only."""
    A = ensemble.alphabet.max_letter
    ladder = ensemble.ladder
    J = ladder.J
    rng = random.Random(seed)
    rows = []
    for j in range(1, 2 * J + 2):
        hits = 0
        sandwich = 0
        for g, norms in _sample_products(ensemble, j, samples, rng):
            target = ladder.rung(j - J)
            if target / (lower_slack * A**2) <= g.norm <= upper_slack * target:
                hits += 1
            prod = math.prod(norms)
            if prod <= g.norm <= 2 ** (len(norms) - 1) * prod:
                sandwich += 1
        rows.append(
            {
                "j": j,
                "window_fraction": hits / samples,
                "sandwich_fraction": sandwich / samples,
            }
        )
    return {
        "constants": {
            "lower_slack": lower_slack,
            "upper_slack": upper_slack,
            "tail_lower_slack": tail_lower_slack,
            "tail_upper_slack": tail_upper_slack,
        },
        "samples": samples,
        "rows": rows,
    }


def spread_report(factorization: Factorization, cap: int = 1_000_000):
    """Norm spread of Omega = Omega2 Omega3 Omega4 against 11000 A^4."""
    omega = product_set(factorization.blocks[1:], cap=cap)
    norms = [e.norm for e in omega]
    a4 = factorization.ensemble.alphabet.max_letter ** 4
    ratio = max(norms) / min(norms)
    return {
        "min_norm": min(norms),
        "max_norm": max(norms),
        "ratio": ratio,
        "bound": 11000 * a4,
        "within_bound": ratio <= 11000 * a4,
        "cardinality": len(omega),
    }


def dump_words(elements, path):
    """One comma-separated word per line."""
    with open(path, "w") as fh:
        for e in elements:
            fh.write(",".join(str(d) for d in e.word) + "\n")


def dump_factorization_json(factorization: Factorization, path):
    payload = {
        "ladder": factorization.ensemble.ladder.as_dict(),
        "factor_cardinalities": [len(f) for f in factorization.ensemble.factors],
        "factorization": factorization.as_dict(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
