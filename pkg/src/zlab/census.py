"""Enumeration of semigroup denominators under a norm bound.

The census walks the word tree depth-first, pruning as soon as the
continuant exceeds the limit (sound because continuants are monotone in
extensions).  The hot loop is JIT-compiled; parallel runs partition the
tree by fixed-depth prefixes and OR per-worker bitmaps together, so the
result is independent of the thread count.
"""

from __future__ import annotations

import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .cfcore import Alphabet
from .errors import InputError, ResourceCapError

__all__ = [
    "CensusResult",
    "enumerate_denominators",
    "proportion_table",
    "missing_denominators",
    "dump_bitmap",
    "load_bitmap",
]

DEFAULT_MEMORY_BUDGET = 1 << 30  # bytes for the presence bitmap
DEFAULT_MULTIPLICITY_CAP = 50_000_000  # visited words when collecting r(d)

BITMAP_MAGIC = b"ZDCB"
BITMAP_VERSION = 1


@njit(cache=True, nogil=True)
def _dfs_mark(letters, limit, p0, q0, present):
    # State (p, q) = (<w minus last letter>, <w>); children (q, d*q + p).
    L = letters.shape[0]
    cap = 128 * L + 16
    sp = np.empty(cap, np.int64)
    sq = np.empty(cap, np.int64)
    top = 0
    sp[0] = p0
    sq[0] = q0
    top = 1
    while top > 0:
        top -= 1
        p = sp[top]
        q = sq[top]
        for i in range(L):
            q2 = letters[i] * q + p
            if q2 <= limit:
                present[q2] = True
                sp[top] = q
                sq[top] = q2
                top += 1


@njit(cache=True, nogil=True)
def _dfs_fractions(letters, limit, out_den, out_num, cap):
    # Tracks the full generator product so the numerator <D_-> is available.
    # Returns the number of words visited, or -1 if cap was hit.
    L = letters.shape[0]
    scap = 128 * L + 16
    sa = np.empty(scap, np.int64)
    sb = np.empty(scap, np.int64)
    sc = np.empty(scap, np.int64)
    sd = np.empty(scap, np.int64)
    sa[0] = 1
    sb[0] = 0
    sc[0] = 0
    sd[0] = 1
    top = 1
    n = 0
    while top > 0:
        top -= 1
        a = sa[top]
        b = sb[top]
        c = sc[top]
        d = sd[top]
        for i in range(L):
            dl = letters[i]
            d2 = c + d * dl
            if d2 <= limit:
                if n >= cap:
                    return -1
                b2 = a + b * dl
                out_den[n] = d2
                out_num[n] = b2
                n += 1
                sa[top] = b
                sb[top] = b2
                sc[top] = d
                sd[top] = d2
                top += 1
    return n


@dataclass
class CensusResult:
    limit: int
    alphabet: Alphabet
    present: np.ndarray  # bool array of length limit+1; index 0 unused
    count: int
    multiplicity: dict | None = None
    elapsed: float = 0.0

    def missing(self) -> list:
        return [int(i) for i in np.flatnonzero(~self.present[1:]) + 1]

    def count_up_to(self, n: int) -> int:
        if n > self.limit:
            raise InputError(f"census only covers [1, {self.limit}]")
        return int(self.present[1 : n + 1].sum())


def _prefix_states(letters, limit, min_partitions):
    """Expand the word tree breadth-first until at least `min_partitions`
    frontier states exist; returns (interior continuants, frontier (p,q) list)."""
    frontier = [(0, 1)]
    interior = []
    while len(frontier) < min_partitions:
        nxt = []
        grew = False
        for p, q in frontier:
            for d in letters:
                q2 = d * q + p
                if q2 <= limit:
                    interior.append(q2)
                    nxt.append((q, q2))
                    grew = True
        if not grew:
            return interior, []
        frontier = nxt
    return interior, frontier


def enumerate_denominators(
    alphabet: Alphabet,
    limit: int,
    collect_multiplicity: bool = False,
    threads: int = 1,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    multiplicity_cap: int = DEFAULT_MULTIPLICITY_CAP,
) -> CensusResult:
    """Census of denominators with a representable fraction, up to `limit`.

    With `collect_multiplicity` the map d -> #{distinct numerators b} is
    built as well; the word count is bounded by `multiplicity_cap` because
    the fraction list grows like limit^(2 delta).
    """
    if limit < 1:
        raise InputError("limit must be >= 1")
    need = limit + 1
    if need > memory_budget:
        raise ResourceCapError(
            f"bitmap for limit {limit} needs {need} bytes, budget is {memory_budget}",
            required=need,
        )
    t0 = time.perf_counter()
    letters = np.array(alphabet.letters, dtype=np.int64)
    threads = max(1, int(threads))

    if threads == 1:
        present = np.zeros(need, dtype=np.bool_)
        _dfs_mark(letters, limit, 0, 1, present)
    else:
        interior, frontier = _prefix_states(alphabet.letters, limit, 8 * threads)
        present = np.zeros(need, dtype=np.bool_)
        for q in interior:
            present[q] = True
        if frontier:
            # Round-robin the prefix subtrees over per-worker bitmaps; the
            # kernels release the GIL, and OR-merging is order-independent.
            chunks = [frontier[i::threads] for i in range(threads)]
            worker_maps = [np.zeros(need, dtype=np.bool_) for _ in chunks]

            def run(args):
                states, bitmap = args
                for p, q in states:
                    _dfs_mark(letters, limit, p, q, bitmap)

            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(run, zip(chunks, worker_maps)))
            for m in worker_maps:
                np.logical_or(present, m, out=present)

    multiplicity = None
    if collect_multiplicity:
        multiplicity = _collect_multiplicity(letters, limit, multiplicity_cap)

    count = int(present[1:].sum())
    return CensusResult(
        limit=limit,
        alphabet=alphabet,
        present=present,
        count=count,
        multiplicity=multiplicity,
        elapsed=time.perf_counter() - t0,
    )


def _collect_multiplicity(letters, limit, cap):
    den = np.empty(cap, dtype=np.int64)
    num = np.empty(cap, dtype=np.int64)
    n = _dfs_fractions(letters, limit, den, num, cap)
    if n < 0:
        raise ResourceCapError(
            f"multiplicity collection exceeds the word cap of {cap}", required=cap
        )
    # Distinct fractions b/d: a rational has two representations (last
    # quotient >= 2 vs trailing 1), so dedupe by the (b, d) pair.
    key = den[:n] * (limit + 1) + num[:n]
    uniq = np.unique(key)
    dens = uniq // (limit + 1)
    counts: dict = {}
    for d in dens:
        d = int(d)
        counts[d] = counts.get(d, 0) + 1
    return counts


def proportion_table(
    alphabet: Alphabet, limits, threads: int = 1, memory_budget: int = DEFAULT_MEMORY_BUDGET
):
    """Rows (N, |D_A(N)|, |D_A(N)|/N) for ascending limits, via one traversal."""
    limits = [int(x) for x in limits]
    if not limits or any(b <= a for a, b in zip(limits, limits[1:])):
        raise InputError("limits must be a non-empty ascending list")
    result = enumerate_denominators(
        alphabet, limits[-1], threads=threads, memory_budget=memory_budget
    )
    rows = []
    for n in limits:
        c = result.count_up_to(n)
        rows.append((n, c, c / n))
    return rows


def missing_denominators(alphabet: Alphabet, limit: int, threads: int = 1, **kw) -> list:
    """Ascending complement of the census in [1, limit]."""
    return enumerate_denominators(alphabet, limit, threads=threads, **kw).missing()


def dump_bitmap(result: CensusResult, path):
    """Compact binary dump: magic ZDCB, version u8, N u64 LE, then
    ceil(N/8) bytes, LSB-first within each byte (bit i-1 <-> integer i)."""
    n = result.limit
    packed = np.packbits(result.present[1 : n + 1], bitorder="little")
    with open(path, "wb") as fh:
        fh.write(BITMAP_MAGIC)
        fh.write(struct.pack("<B", BITMAP_VERSION))
        fh.write(struct.pack("<Q", n))
        fh.write(packed.tobytes())


def load_bitmap(path):
    """Inverse of dump_bitmap; returns (limit, present array)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != BITMAP_MAGIC:
            raise InputError(f"bad bitmap magic {magic!r}")
        (version,) = struct.unpack("<B", fh.read(1))
        if version != BITMAP_VERSION:
            raise InputError(f"unsupported bitmap version {version}")
        (n,) = struct.unpack("<Q", fh.read(8))
        raw = np.frombuffer(fh.read((n + 7) // 8), dtype=np.uint8)
    bits = np.unpackbits(raw, count=n, bitorder="little").astype(np.bool_)
    present = np.zeros(n + 1, dtype=np.bool_)
    present[1 : n + 1] = bits
    return int(n), present
