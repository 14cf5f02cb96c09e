"""Finite fields, t-wise linearly independent vector sets and the orthogonal
arrays (t-wise independent symbol arrays) built from them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .kernel import DesignError, ParseError


class FieldUnsupported(DesignError):
    pass


class GiveUp(DesignError):
    pass


class OddT(DesignError):
    pass


# low-to-high coefficients of the defining polynomial for each prime power
IRREDUCIBLE = {
    4: (2, (1, 1, 1)),
    8: (2, (1, 1, 0, 1)),
    9: (3, (2, 2, 1)),
    16: (2, (1, 1, 0, 0, 1)),
    25: (5, (2, 4, 1)),
    27: (3, (1, 2, 0, 1)),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


class GF:
    """The field with ``q`` elements, labelled ``0..q-1``.

    Prime-power elements are base-p digit strings of their polynomial
    representative (lowest digit = constant term). Arithmetic goes through
    precomputed tables, which also makes vectorised numpy use trivial.
    """

    def __init__(self, q: int):
        if _is_prime(q):
            p, deg, poly = q, 1, None
        elif q in IRREDUCIBLE:
            p, poly = IRREDUCIBLE[q]
            deg = len(poly) - 1
        else:
            raise FieldUnsupported(f"no arithmetic configured for q={q}")
        self.q, self.p, self.degree = q, p, deg
        elems = range(q)
        if poly is None:
            self.add = np.array([[(a + b) % q for b in elems] for a in elems], dtype=np.int64)
            self.mul = np.array([[(a * b) % q for b in elems] for a in elems], dtype=np.int64)
        else:
            digits = [self._digits(a) for a in elems]
            self.add = np.array(
                [[self._undigits([(x + y) % p for x, y in zip(digits[a], digits[b])]) for b in elems]
                 for a in elems], dtype=np.int64)
            self.mul = np.array(
                [[self._undigits(self._polymul(digits[a], digits[b], poly)) for b in elems] for a in elems],
                dtype=np.int64)
        self.neg = np.array([int(np.nonzero(self.add[a] == 0)[0][0]) for a in elems], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            hits = np.nonzero(self.mul[a] == 1)[0]
            if hits.size != 1:
                raise FieldUnsupported(f"defining polynomial for q={q} is reducible")
            inv[a] = hits[0]
        self.inv = inv

    def _digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.degree):
            out.append(a % self.p)
            a //= self.p
        return out

    def _undigits(self, ds: Sequence[int]) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(ds))

    def _polymul(self, a, b, poly):
        p, n = self.p, self.degree
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by the monic defining polynomial
        for k in range(len(prod) - 1, n - 1, -1):
            c = prod[k]
            if c:
                for i, f in enumerate(poly):
                    prod[k - n + i] = (prod[k - n + i] - c * f) % p
        return prod[:n]

    def vec_add(self, u: tuple, v: tuple) -> tuple:
        return tuple(int(self.add[a, b]) for a, b in zip(u, v))

    def vec_scale(self, c: int, v: tuple) -> tuple:
        return tuple(int(self.mul[c, a]) for a in v)

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        acc = 0
        for a, b in zip(u, v):
            acc = int(self.add[acc, self.mul[a, b]])
        return acc

    def rank(self, vectors: Sequence[Sequence[int]]) -> int:
        rows = [list(v) for v in vectors]
        if not rows:
            return 0
        ncol = len(rows[0])
        rank = 0
        for col in range(ncol):
            piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            pinv = int(self.inv[rows[rank][col]])
            rows[rank] = [int(self.mul[pinv, x]) for x in rows[rank]]
            for i in range(len(rows)):
                if i != rank and rows[i][col]:
                    f = int(self.neg[rows[i][col]])
                    rows[i] = [int(self.add[x, self.mul[f, y]]) for x, y in zip(rows[i], rows[rank])]
            rank += 1
        return rank


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)


@dataclass(frozen=True)
class SymbolArray:
    """Multiset of rows in ``{0..q-1}^d``."""

    q: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        if rows.ndim != 2:
            raise ValueError("rows must be 2-D")
        if rows.size and (rows.min() < 0 or rows.max() >= self.q):
            raise ValueError("symbols must lie in 0..q-1")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def __len__(self):
        return self.rows.shape[0]


def independent_vector_set(q: int, r: int, t: int, seed: int, limit: int | None = None) -> list[tuple[int, ...]]:
    """Greedy subset of ``F_q^r`` in which every ``t`` or fewer vectors are independent.

    Candidates are visited in a seeded random order; a vector is kept unless it
    lies in the span of some ``t-1`` already kept vectors. ``limit`` stops the
    scan early once that many vectors are kept (the result is then a prefix of
    the unlimited run).
    """
    if r < 1 or t < 2:
        raise ValueError("need r >= 1 and t >= 2")
    F = field(q)
    nonzero = [v for v in itertools.product(range(q), repeat=r) if any(v)]
    order = np.random.default_rng(seed).permutation(len(nonzero))
    zero = (0,) * r
    # combos[j]: vectors that are combinations of exactly j kept vectors
    combos: list[set] = [{zero}] + [set() for _ in range(t - 1)]
    forbidden = {zero}
    chosen: list[tuple[int, ...]] = []
    scalars = range(1, q)
    for idx in order:
        v = nonzero[idx]
        if v in forbidden:
            continue
        chosen.append(v)
        if limit is not None and len(chosen) >= limit:
            break
        multiples = [F.vec_scale(c, v) for c in scalars]
        for j in range(t - 2, -1, -1):
            new = {F.vec_add(c, m) for c in combos[j] for m in multiples}
            combos[j + 1] |= new
            forbidden |= new
    return chosen


def dual_family(S: Sequence[Sequence[int]], q: int, r: int) -> SymbolArray:
    """Rows ``(<x, s>)_{s in S}`` for every ``x`` in ``F_q^r`` (lexicographic in x)."""
    if not S:
        raise ValueError("S must be nonempty")
    F = field(q)
    Smat = np.array(S, dtype=np.int64)
    if Smat.shape[1] != r:
        raise ValueError("vectors in S must have length r")
    X = np.array(list(itertools.product(range(q), repeat=r)), dtype=np.int64)
    acc = np.zeros((X.shape[0], Smat.shape[0]), dtype=np.int64)
    for i in range(r):
        acc = F.add[acc, F.mul[X[:, i][:, None], Smat[:, i][None, :]]]
    return SymbolArray(q, acc)


def max_field_dimension(q: int, d: int, t: int) -> int:
    return max(1, int(8 * (t - 1) * math.log(8 * q * d, q)))


def twise_construct(q: int, d: int, t: int, seed: int) -> SymbolArray:
    """t-wise independent multiset in ``{0..q-1}^d`` from the smallest workable ``F_q^r``."""
    if t < 2 or d < 1:
        raise ValueError("need t >= 2 and d >= 1")
    field(q)
    for r in range(1, max_field_dimension(q, d, t) + 1):
        if q**r < d and r < t:
            continue
        S = independent_vector_set(q, r, t, seed, limit=d)
        if len(S) >= d:
            return dual_family(S[:d], q, r)
    raise GiveUp(f"no r <= {max_field_dimension(q, d, t)} gave {d} vectors")


@dataclass(frozen=True)
class TwiseResult:
    passed: bool
    subset: tuple[int, ...] = ()
    pattern: tuple[int, ...] = ()
    count: int = 0
    expected: float = 0.0

    def __bool__(self):
        return self.passed


def twise_verify(X: SymbolArray, t: int) -> TwiseResult:
    """Exhaustive check that every set of at most ``t`` columns is uniform.

    On failure the witness is the least frequent pattern of the first failing
    column set (ties go to the lexicographically last pattern).
    """
    n, d = X.rows.shape
    q = X.q
    for size in range(1, min(t, d) + 1):
        expected = n / q**size
        weights = q ** np.arange(size - 1, -1, -1)
        for I in itertools.combinations(range(d), size):
            codes = X.rows[:, I] @ weights
            counts = np.bincount(codes, minlength=q**size)
            if np.all(counts == expected):
                continue
            low = counts.min()
            code = int(np.nonzero(counts == low)[0][-1])
            pattern = tuple(int(c) for c in np.unravel_index(code, (q,) * size))
            return TwiseResult(False, I, pattern, int(low), expected)
    return TwiseResult(True)


def independent_set_upper_bound(q: int, r: int, t: int) -> int:
    """Largest ``s`` with ``binom(s, t/2) <= q^r``."""
    if t < 2 or t % 2:
        raise OddT("the bound needs an even t >= 2")
    half, cap = t // 2, q**r
    s = half
    while math.comb(s + 1, half) <= cap:
        s += 1
    return s


# ---------------------------------------------------------------------------
# array files

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def format_array(X: SymbolArray) -> str:
    if X.q > len(_DIGITS):
        raise ValueError("array files support q <= 36")
    out = ["array v1", f"q: {X.q}", f"d: {X.d}", f"rows: {len(X)}"]
    out.extend("".join(_DIGITS[v] for v in row) for row in X.rows)
    return "\n".join(out) + "\n"


def parse_array(text: str) -> SymbolArray:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "array v1":
        raise ParseError("malformed header, expected 'array v1'", 1)
    vals = {}
    for i, key in enumerate(("q", "d", "rows"), start=1):
        if i >= len(lines):
            raise ParseError(f"missing header field {key!r}", i + 1)
        k, sep, v = lines[i].partition(":")
        if not sep or k.strip() != key:
            raise ParseError(f"malformed header, expected {key!r}", i + 1)
        try:
            vals[key] = int(v)
        except ValueError:
            raise ParseError(f"{key} is not an integer", i + 1) from None
    q, d, n = vals["q"], vals["d"], vals["rows"]
    body = [ln.strip() for ln in lines[4:] if ln.strip()]
    if len(body) != n:
        raise ParseError("row count mismatch", 5)
    rows = []
    for off, ln in enumerate(body):
        if len(ln) != d:
            raise ParseError(f"expected {d} symbols", 5 + off)
        try:
            row = [_DIGITS.index(c) for c in ln.lower()]
        except ValueError:
            raise ParseError("bad symbol", 5 + off) from None
        if max(row) >= q:
            raise ParseError("symbol out of range", 5 + off)
        rows.append(row)
    return SymbolArray(q, np.array(rows, dtype=np.int64).reshape(n, d))


def read_array(path) -> SymbolArray:
    return parse_array(Path(path).read_text(encoding="utf-8"))


def write_array(X: SymbolArray, path) -> None:
    Path(path).write_text(format_array(X), encoding="utf-8")
