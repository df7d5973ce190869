"""Exact arithmetic of continuants, continued-fraction values and the
word <-> matrix correspondence over a finite alphabet of partial quotients.

Everything here is pure and exact: words are tuples of letters, values are
`fractions.Fraction`, matrices carry arbitrary-precision integer entries.
Continuants overflow 64 bits already near length ~90 over {1,2}, so no
fixed-width shortcuts are taken in this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError

__all__ = [
    "Alphabet",
    "Word",
    "UniMat",
    "IDENTITY",
    "continuant",
    "continuant_pair",
    "cf_value",
    "word_matrix",
    "matrix_norm",
    "separation_check",
    "separation_sweep",
    "SeparationResult",
]


@dataclass(frozen=True)
class Alphabet:
    """A finite, strictly increasing tuple of positive integer letters."""

    letters: tuple

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        if not letters:
            raise InputError("alphabet must be non-empty")
        if any(x < 1 for x in letters):
            raise InputError("alphabet letters must be >= 1")
        if any(b <= a for a, b in zip(letters, letters[1:])):
            raise InputError("alphabet letters must be strictly increasing")
        object.__setattr__(self, "letters", letters)

    @property
    def max_letter(self) -> int:
        return self.letters[-1]

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)

    def __contains__(self, x):
        return x in self.letters

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        """Parse a comma-separated list such as "1,2,3,4,10"."""
        try:
            letters = sorted({int(t) for t in text.split(",") if t.strip()})
        except ValueError as exc:
            raise InputError(f"cannot parse alphabet {text!r}") from exc
        return cls(tuple(letters))

    def __str__(self):
        return ",".join(str(x) for x in self.letters)


@dataclass(frozen=True)
class Word:
    """A finite (possibly empty) sequence of partial quotients over an alphabet."""

    quotients: tuple
    alphabet: Alphabet

    def __post_init__(self):
        q = tuple(int(x) for x in self.quotients)
        bad = [x for x in q if x not in self.alphabet]
        if bad:
            raise InputError(f"quotients {bad} not in alphabet {self.alphabet}")
        object.__setattr__(self, "quotients", q)

    def __len__(self):
        return len(self.quotients)

    def reversed(self) -> "Word":
        return Word(self.quotients[::-1], self.alphabet)

    def concat(self, other: "Word") -> "Word":
        return Word(self.quotients + other.quotients, self.alphabet)


def _quotients(w) -> tuple:
    """Accept a Word or a bare sequence of positive integers."""
    if isinstance(w, Word):
        return w.quotients
    return tuple(int(x) for x in w)


def continuant_pair(w) -> tuple:
    """(K_{k-1}, K_k) for the quotient sequence, via the two-term recurrence
    K_j = d_j K_{j-1} + K_{j-2} with K_{-1} = 0, K_0 = 1."""
    p, q = 0, 1
    for d in _quotients(w):
        p, q = q, d * q + p
    return p, q


def continuant(w) -> int:
    """<d_1,...,d_k>; the empty continuant is 1."""
    return continuant_pair(w)[1]


def cf_value(w) -> Fraction:
    """Exact value of the continued fraction 1/(d_1 + 1/(d_2 + ...)) in
    lowest terms.  Undefined (raises) for the empty word."""
    q = _quotients(w)
    if not q:
        raise InputError("undefined value: empty continued fraction")
    # numerator <D_-> by running the recurrence on the tail
    num = continuant(q[1:])
    den = continuant(q)
    return Fraction(num, den)


@dataclass(frozen=True)
class UniMat:
    """2x2 non-negative integer matrix with determinant +-1 (row-major a,b,c,d).

    Images of non-empty words additionally satisfy the entry chain
    a <= c <= d, a <= b <= d; the chain is strict from length 2 on but is
    not enforced here so that length-1 generator factors stay representable.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise InputError("matrix entries must be non-negative")
        if abs(self.det()) != 1:
            raise InputError("matrix must have determinant +-1")

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "UniMat") -> "UniMat":
        return UniMat(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def column(self) -> tuple:
        """The image of (0,1)^t: the right-hand column (b, d)."""
        return (self.b, self.d)


IDENTITY = UniMat(1, 0, 0, 1)


def word_matrix(w) -> UniMat:
    """Product of generators (0 1; 1 d_j), left to right; empty word -> identity.

    Defined for words of any length; membership of the image in the
    even-word semigroup is a property of the word, not of this map.
    """
    a, b, c, d = 1, 0, 0, 1
    for dl in _quotients(w):
        # right-multiply by (0 1; 1 dl)
        a, b, c, d = b, a + b * dl, d, c + d * dl
    return UniMat(a, b, c, d)


def matrix_norm(g: UniMat) -> int:
    """max entry = bottom-right entry d; equals the continuant of the word."""
    return g.d


@dataclass(frozen=True)
class SeparationResult:
    lower_bound: Fraction
    actual_gap: Fraction
    holds: bool


def separation_check(D: Word, T: Word, W: Word) -> SeparationResult:
    """Witness for the separation bound |[D,T] - [D,W]| >= 1/((2A)^4 <D>^2).

    T and W must be non-empty, of equal length, over the same alphabet as D,
    and differ in their first letters.
    """
    if D.alphabet != T.alphabet or T.alphabet != W.alphabet:
        raise InputError("lemma preconditions unmet: mixed alphabets")
    if len(T) == 0 or len(W) == 0 or len(T) != len(W):
        raise InputError("lemma preconditions unmet: T, W must be non-empty and of equal length")
    if T.quotients[0] == W.quotients[0]:
        raise InputError("lemma preconditions unmet: T and W must differ in their first letters")
    A = D.alphabet.max_letter
    lower = Fraction(1, (2 * A) ** 4 * continuant(D) ** 2)
    gap = abs(cf_value(D.concat(T)) - cf_value(D.concat(W)))
    return SeparationResult(lower, gap, gap >= lower)


def _words_of_length(alphabet: Alphabet, k: int):
    return (Word(q, alphabet) for q in itertools.product(alphabet.letters, repeat=k))


def separation_sweep(alphabet: Alphabet, max_len: int) -> dict:
    """Exhaustive check of the separation bound over all prefixes D with
    |D| <= max_len and all unordered pairs T, W of equal length <= max_len
    that differ in their first letters.  Returns counts and the first
    violating triple, if any."""
    if max_len < 1:
        raise InputError("max_len must be >= 1")
    pairs = []
    for k in range(1, max_len + 1):
        words = list(_words_of_length(alphabet, k))
        pairs.extend(
            (t, w)
            for t, w in itertools.combinations(words, 2)
            if t.quotients[0] != w.quotients[0]
        )
    checks = 0
    violations = 0
    first = None
    for dlen in range(0, max_len + 1):
        for D in _words_of_length(alphabet, dlen):
            for t, w in pairs:
                res = separation_check(D, t, w)
                checks += 1
                if not res.holds:
                    violations += 1
                    if first is None:
                        first = {
                            "D": list(D.quotients),
                            "T": list(t.quotients),
                            "W": list(w.quotients),
                            "gap": str(res.actual_gap),
                            "lower_bound": str(res.lower_bound),
                        }
    return {"checks": checks, "violations": violations, "first_violation": first}
