"""Dirichlet decomposition of frequencies, geometric arc classification,
and trigonometric sums over a matrix-norm histogram.

The trig sum S(theta) = sum_g e(theta * ||g||) only depends on the multiset
of norms, so everything here consumes a NormHistogram and never iterates
matrices.  The mean of |S|^2 over enough uniform points is an exact
evaluation of the L2 mass (discrete orthogonality of a trigonometric
polynomial), which gives a sharp self-check of the quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .ensemble import Ladder
from .errors import InputError, ResourceCapError

__all__ = [
    "ArcPoint",
    "NormHistogram",
    "dirichlet_decompose",
    "split_K",
    "classify_arc",
    "arc_point_from_parts",
    "trig_sum",
    "sigma_NZ",
    "sigma_N_of_Q",
    "parseval_check",
    "ParsevalResult",
]


@dataclass(frozen=True)
class ArcPoint:
    """A frequency theta = {a/q + K/N} with K = l/2 + lambda, plus the
    geometric cell (alpha, beta, kappa) once classified."""

    theta: float
    N: float
    a: int
    q: int
    K: float
    l: int
    lam: float
    alpha: int | None = None
    beta: int | None = None
    kappa: int | None = None

    def reconstruct(self) -> float:
        """a/q + l/2N + lambda/N reduced mod 1."""
        return (self.a / self.q + self.l / (2.0 * self.N) + self.lam / self.N) % 1.0

    def same_class(self, other: "ArcPoint") -> bool:
        return (
            self.alpha == other.alpha
            and self.beta == other.beta
            and self.kappa == other.kappa
            and self.lam == other.lam
        )


def split_K(K: float):
    """K = l/2 + lambda with lambda in (-1/4, 1/4]; then |l| <= 2|K| + 1."""
    l = math.ceil(2.0 * K - 0.5)
    lam = K - 0.5 * l
    # guard against float boundary drift
    if lam > 0.25:
        l += 1
        lam = K - 0.5 * l
    elif lam <= -0.25:
        l -= 1
        lam = K - 0.5 * l
    return int(l), lam


def _convergents(theta: float, max_q: int):
    """Continued-fraction convergents p/q of theta with q <= max_q."""
    out = [(0, 1)]
    p0, q0, p1, q1 = 1, 0, 0, 1
    x = theta
    for _ in range(64):
        if x == 0:
            break
        a = math.floor(1.0 / x)
        if a < 1:
            break
        x = 1.0 / x - a
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > max_q:
            break
        out.append((p1, q1))
    return out


def dirichlet_decompose(theta: float, N: float, Q1: float) -> ArcPoint:
    """Best rational approximation a/q with q <= sqrt(N)/Q1 and
    |K| = N|theta - a/q| <= Q1 sqrt(N)/q, taking the convergent with the
    largest admissible denominator.  theta = 0 maps to (0, 1, 0)."""
    if not 0.0 <= theta < 1.0:
        raise InputError("theta must lie in [0, 1)")
    if N < Q1 * Q1:
        raise InputError("need N >= Q1^2 so that the denominator bound is >= 1")
    max_q = int(math.sqrt(N) / Q1)
    kbound = Q1 * math.sqrt(N)
    best = None
    for p, q in _convergents(theta, max_q):
        if abs(N * (theta - p / q)) <= kbound / q + 1e-9:
            best = (p, q)
    if best is None:  # Dirichlet guarantees at least one admissible convergent
        best = (0, 1)
    p, q = best
    a = p % q if q > 1 else 0
    K = N * (theta - p / q)
    l, lam = split_K(K)
    return ArcPoint(theta=theta, N=float(N), a=a, q=q, K=K, l=l, lam=lam)


def classify_arc(point: ArcPoint, ladder: Ladder) -> ArcPoint:
    """Attach (alpha, beta, kappa): q and |l| are binned into the half-open
    geometric windows [Q_alpha, Q_{alpha+1}) (lower-closed so that the cells
    partition), kappa = l mod T1 in [0, T1)."""
    Q1 = ladder.Q1
    if point.q > math.sqrt(point.N) / Q1 + 1e-9:
        raise InputError("not a valid Dirichlet denominator for this N, Q1")

    def window_index(v: float) -> int:
        if v < Q1:
            return 0
        return int(math.floor(math.log(v) / math.log(Q1) + 1e-12))

    alpha = window_index(point.q)
    beta = window_index(abs(point.l))
    t1 = int(round(ladder.T1))
    kappa = point.l % t1
    return replace(point, alpha=alpha, beta=beta, kappa=kappa)


def cell_nonempty_bound_ok(point: ArcPoint, ladder: Ladder) -> bool:
    """Q_{alpha+1} Q_{beta+1} <= 3 Q_3 sqrt(N), necessary for a non-empty cell."""
    if point.alpha is None or point.beta is None:
        raise InputError("classify the point first")
    return ladder.Q(point.alpha + 1) * ladder.Q(point.beta + 1) <= 3.0 * ladder.Q(
        3
    ) * math.sqrt(point.N)


def arc_point_from_parts(a, q, l, lam, N, ladder: Ladder) -> ArcPoint:
    """Build (and classify) a point directly from its label; validates the
    Dirichlet constraints."""
    if math.gcd(a, q) != 1:
        raise InputError("a and q must be coprime")
    if not (0 <= a < q or (a == 0 and q == 1)):
        raise InputError("need 0 <= a < q")
    if not -0.25 < lam <= 0.25:
        raise InputError("lambda must lie in (-1/4, 1/4]")
    if abs(l) > 3.0 * ladder.Q1 * math.sqrt(N) / q + 1e-9:
        raise InputError("l out of Dirichlet range for this q")
    K = 0.5 * l + lam
    theta = (a / q + K / N) % 1.0
    point = ArcPoint(theta=theta, N=float(N), a=int(a), q=int(q), K=K, l=int(l), lam=lam)
    return classify_arc(point, ladder)


@dataclass(frozen=True)
class NormHistogram:
    """Multiset of matrix norms: d -> multiplicity r(d)."""

    counts: tuple  # sorted tuple of (norm, count)

    @classmethod
    def from_norms(cls, norms) -> "NormHistogram":
        acc: dict = {}
        for n in norms:
            acc[int(n)] = acc.get(int(n), 0) + 1
        if not acc:
            raise InputError("histogram must be non-empty")
        return cls(tuple(sorted(acc.items())))

    @classmethod
    def from_elements(cls, elements) -> "NormHistogram":
        return cls.from_norms(e.norm for e in elements)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)

    @property
    def max_norm(self) -> int:
        return self.counts[-1][0]

    def arrays(self):
        d = np.array([n for n, _ in self.counts], dtype=np.float64)
        r = np.array([c for _, c in self.counts], dtype=np.float64)
        return d, r


def trig_sum(hist: NormHistogram, theta: float) -> complex:
    """S(theta) = sum_d r(d) e(theta d), e(x) = exp(2 pi i x)."""
    d, r = hist.arrays()
    phases = np.exp(2j * np.pi * theta * d)
    return complex(np.dot(r, phases))


def sigma_NZ(hist: NormHistogram, Z) -> float:
    """sum over theta in Z of |S(theta)|; Z must lie in one arc class."""
    Z = list(Z)
    if not Z:
        raise InputError("Z must be non-empty")
    first = Z[0]
    if any(not first.same_class(p) for p in Z[1:]):
        raise InputError("Z must lie in one arc class")
    return float(sum(abs(trig_sum(hist, p.theta)) for p in Z))


def _coprime_residues(q: int):
    if q == 1:
        return [0]
    return [a for a in range(1, q) if math.gcd(a, q) == 1]


def sigma_N_of_Q(
    hist: NormHistogram,
    N: float,
    ladder: Ladder,
    Q: float,
    quadrature_points: int,
    triple_cap: int = 200_000,
) -> float:
    """Aggregated second moment: integral over lambda in (-1/4, 1/4] of
    sum over admissible (a, q, l) with max(q, |l|) >= Q of
    |S(a/q + l/2N + lambda/N)|^2, by composite midpoint rule."""
    if Q < 0:
        raise InputError("Q must be >= 0")
    if quadrature_points < 2 * hist.max_norm + 1:
        raise InputError(
            f"need at least {2 * hist.max_norm + 1} quadrature points for this histogram"
        )
    Q1 = ladder.Q1
    max_q = int(math.sqrt(N) / Q1)
    triples = []
    for q in range(1, max_q + 1):
        lmax = int(3.0 * Q1 * math.sqrt(N) / q)
        for a in _coprime_residues(q):
            for l in range(-lmax, lmax + 1):
                if max(q, abs(l)) >= Q:
                    triples.append((a, q, l))
                    if len(triples) > triple_cap:
                        raise ResourceCapError(
                            f"(a,q,l) enumeration exceeded cap {triple_cap}",
                            required=len(triples),
                        )
    if not triples:
        return 0.0
    P = int(quadrature_points)
    lam = -0.25 + (np.arange(P) + 0.5) / (2.0 * P)  # midpoints, weight 1/(2P)
    d, r = hist.arrays()
    # e((base + lam/N) d) = e(base d) * e(lam d / N)
    lam_phases = np.exp(2j * np.pi * np.outer(lam, d / N))  # (P, D)
    total = 0.0
    for a, q, l in triples:
        base = a / q + l / (2.0 * N)
        s = lam_phases @ (r * np.exp(2j * np.pi * base * d))
        total += float(np.sum(np.abs(s) ** 2)) / (2.0 * P)
    return total


@dataclass(frozen=True)
class ParsevalResult:
    exact: float
    quadrature: float
    relative_error: float
    ratio_to_bound: float | None  # exact * N / total^2 when N given
    cauchy_schwarz_distinct_bound: float  # total^2 / exact <= #distinct norms


def parseval_check(
    hist: NormHistogram, quadrature_points: int, N: float | None = None
) -> ParsevalResult:
    """Exact L2 mass sum_d r(d)^2 against the uniform-grid mean of |S|^2,
    exact for more than 2*max_norm points."""
    if quadrature_points <= 2 * hist.max_norm:
        raise InputError(
            f"need more than {2 * hist.max_norm} quadrature points for this histogram"
        )
    _, r = hist.arrays()
    exact = float(np.sum(r * r))
    M = int(quadrature_points)
    grid = np.arange(M) / M
    vals = [abs(trig_sum(hist, t)) ** 2 for t in grid]
    quad = float(np.mean(vals))
    rel = abs(quad - exact) / exact
    total = hist.total
    ratio = (exact * N / total**2) if N is not None else None
    return ParsevalResult(
        exact=exact,
        quadrature=quad,
        relative_error=rel,
        ratio_to_bound=ratio,
        cauchy_schwarz_distinct_bound=total**2 / exact,
    )
