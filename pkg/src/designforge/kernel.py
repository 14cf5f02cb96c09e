"""Exact scalars, multi-indices, the weighted point-set carrier and the design file format."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

MEASURES = ("sphere", "gaussian")
KINDS = ("unweighted", "weighted", "signed")

FLOAT_TOL = 1e-12


class DesignError(Exception):
    """Base class for every error raised by designforge."""


class GradingMismatch(DesignError):
    pass


class ParseError(DesignError):
    def __init__(self, message: str, line: int):
        super().__init__(f"{message} at line {line}")
        self.line = line


class InvalidPointSet(DesignError):
    pass


# ---------------------------------------------------------------------------
# exact scalars


@dataclass(frozen=True)
class PiValue:
    """The exact number ``coeff * pi**(e/2)``.

    Values with different gradings never add; that would leave the ring of
    single-term values and is almost always a bookkeeping bug upstream.
    """

    coeff: Fraction
    e: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.coeff == 0:
            object.__setattr__(self, "e", 0)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __add__(self, other):
        other = _as_pivalue(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.e != other.e:
            raise GradingMismatch(f"cannot add pi^({self.e}/2) and pi^({other.e}/2) terms")
        return PiValue(self.coeff + other.coeff, self.e)

    __radd__ = __add__

    def __neg__(self):
        return PiValue(-self.coeff, self.e)

    def __sub__(self, other):
        return self + (-_as_pivalue(other))

    def __mul__(self, other):
        other = _as_pivalue(other)
        if other is NotImplemented:
            return other
        return PiValue(self.coeff * other.coeff, self.e + other.e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_pivalue(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("PiValue division by zero")
        return PiValue(self.coeff / other.coeff, self.e - other.e)

    def __float__(self) -> float:
        return float(self.coeff) * math.pi ** (self.e / 2)

    def to_pipoly(self) -> "PiPoly":
        if self.is_zero():
            return PiPoly()
        if self.e > 0 or self.e % 2:
            raise GradingMismatch(f"pi^({self.e}/2) is not a polynomial in 1/pi")
        return PiPoly({-self.e // 2: self.coeff})

    def __str__(self) -> str:
        if self.e == 0:
            return str(self.coeff)
        if self.e % 2 == 0:
            return f"{self.coeff}*pi^({self.e // 2})"
        return f"{self.coeff}*pi^({self.e}/2)"


def _as_pivalue(x):
    if isinstance(x, PiValue):
        return x
    if isinstance(x, (int, Fraction)):
        return PiValue(Fraction(x), 0)
    return NotImplemented


class PiPoly:
    """Exact value ``sum_j coeffs[j] * pi**(-j)``, a polynomial in ``u = 1/pi``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: dict[int, Fraction] | None = None):
        c = {}
        for j, v in (coeffs or {}).items():
            if j < 0:
                raise ValueError("PiPoly exponents must be nonnegative")
            v = Fraction(v)
            if v:
                c[int(j)] = v
        self._c = c

    @classmethod
    def const(cls, value) -> "PiPoly":
        return cls({0: Fraction(value)})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def degree(self) -> int:
        return max(self._c, default=-1)

    def is_zero(self) -> bool:
        return not self._c

    def _coerce(self, other):
        if isinstance(other, PiPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return PiPoly.const(other)
        if isinstance(other, PiValue):
            return other.to_pipoly()
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for j, v in other._c.items():
            c[j] = c.get(j, 0) + v
        return PiPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return PiPoly({j: -v for j, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return PiPoly({j: v * other for j, v in self._c.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c: dict[int, Fraction] = {}
        for i, a in self._c.items():
            for j, b in other._c.items():
                c[i + j] = c.get(i + j, 0) + a * b
        return PiPoly(c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return PiPoly({j: v / Fraction(other) for j, v in self._c.items()})
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __float__(self) -> float:
        return math.fsum(float(v) * math.pi ** (-j) for j, v in self._c.items())

    def __repr__(self):
        return f"PiPoly({self})"

    def __str__(self) -> str:
        if not self._c:
            return "0"
        terms = []
        for j in sorted(self._c):
            v = self._c[j]
            if j == 0:
                terms.append(str(v))
            elif j == 1:
                terms.append(f"{v}*u")
            else:
                terms.append(f"{v}*u^{j}")
        return " + ".join(terms)

    def token(self) -> str:
        """Whitespace-free form used inside design files."""
        return str(self).replace(" + ", "+")

    _TERM = re.compile(r"^([+-]?\d+(?:/\d+)?)(?:\*u(?:\^(\d+))?)?$")

    @classmethod
    def parse(cls, text: str) -> "PiPoly":
        text = text.replace(" ", "")
        if not text:
            raise ValueError("empty PiPoly")
        c: dict[int, Fraction] = {}
        for part in text.split("+"):
            m = cls._TERM.match(part)
            if not m:
                raise ValueError(f"bad PiPoly term {part!r}")
            coeff = Fraction(m.group(1))
            if "*u" in part:
                j = int(m.group(2)) if m.group(2) else 1
            else:
                j = 0
            c[j] = c.get(j, 0) + coeff
        return cls(c)


def to_float(x) -> float:
    return float(x)


# ---------------------------------------------------------------------------
# multi-indices


def enumerate_multi_indices(d: int, max_deg: int) -> list[tuple[int, ...]]:
    """All exponent vectors of length ``d`` with total degree at most ``max_deg``,
    in lexicographic order."""
    if d < 1 or max_deg < 0:
        raise ValueError("need d >= 1 and max_deg >= 0")
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            for a in range(remaining + 1):
                out.append(tuple(prefix + [a]))
            return
        for a in range(remaining + 1):
            rec(prefix + [a], remaining - a, slots - 1)

    rec([], max_deg, d)
    return out


def multi_indices_of_degree(d: int, deg: int) -> Iterator[tuple[int, ...]]:
    for alpha in enumerate_multi_indices(d, deg):
        if sum(alpha) == deg:
            yield alpha


# ---------------------------------------------------------------------------
# point sets


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _is_exact_value(v) -> bool:
    return isinstance(v, (int, Fraction, PiPoly)) and not isinstance(v, bool)


@dataclass(frozen=True)
class WeightedPointSet:
    """Finite (possibly signed) weighted point set on the sphere or in Gaussian space.

    Float sets hold ``float64`` arrays. Exact sets hold object arrays of
    ``Fraction`` coordinates and ``Fraction`` or ``PiPoly`` weights.
    """

    points: np.ndarray
    weights: np.ndarray
    measure: str = "sphere"
    kind: str = "weighted"
    strength: int | None = None
    dimension: int = field(init=False)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise InvalidPointSet(f"unknown measure {self.measure!r}")
        if self.kind not in KINDS:
            raise InvalidPointSet(f"unknown kind {self.kind!r}")
        pts = np.asarray(self.points)
        w = np.asarray(self.weights)
        if pts.ndim != 2:
            raise InvalidPointSet("points must be an (N, d) array")
        if w.shape != (pts.shape[0],):
            raise InvalidPointSet("need exactly one weight per point")
        if pts.shape[0] == 0:
            raise InvalidPointSet("empty point set")
        exact = pts.dtype == object
        if exact:
            if not all(isinstance(v, (int, Fraction)) for v in pts.flat):
                raise InvalidPointSet("exact coordinates must be rationals")
            pts = np.array([[Fraction(v) for v in row] for row in pts], dtype=object)
            w = np.array([v if isinstance(v, PiPoly) else Fraction(v) for v in w], dtype=object)
        else:
            pts = np.array(pts, dtype=np.float64)
            if w.dtype == object:
                w = np.array([float(v) for v in w], dtype=np.float64)
            else:
                w = np.array(w, dtype=np.float64)
            if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
                raise InvalidPointSet("non-finite value in point set")
        object.__setattr__(self, "points", _freeze(pts))
        object.__setattr__(self, "weights", _freeze(w))
        object.__setattr__(self, "dimension", pts.shape[1])
        self._check_invariants()

    @property
    def exact(self) -> bool:
        return self.points.dtype == object

    def __len__(self) -> int:
        return self.points.shape[0]

    def _check_invariants(self):
        n = len(self)
        w = self.weights
        if self.exact:
            total = sum(w, Fraction(0))
            if total != 1:
                raise InvalidPointSet(f"weights sum to {total}, not 1")
            if self.kind == "unweighted" and any(v != Fraction(1, n) for v in w):
                raise InvalidPointSet("unweighted set must carry weights 1/N")
            if self.kind == "weighted":
                if any(isinstance(v, PiPoly) for v in w):
                    raise InvalidPointSet("PiPoly weights are only allowed for signed sets")
                if any(v <= 0 for v in w):
                    raise InvalidPointSet("weighted set needs positive weights")
            if self.measure == "sphere":
                for i, row in enumerate(self.points):
                    if sum(v * v for v in row) != 1:
                        raise InvalidPointSet(f"point {i} is not on the unit sphere")
        else:
            if abs(math.fsum(w) - 1.0) > FLOAT_TOL * max(1, n) ** 0.5 * 10:
                raise InvalidPointSet(f"weights sum to {math.fsum(w)!r}, not 1")
            if self.kind == "unweighted" and np.any(np.abs(w - 1.0 / n) > FLOAT_TOL):
                raise InvalidPointSet("unweighted set must carry weights 1/N")
            if self.kind == "weighted" and np.any(w <= 0):
                raise InvalidPointSet("weighted set needs positive weights")
            if self.measure == "sphere":
                sq = np.einsum("ij,ij->i", self.points, self.points)
                bad = np.nonzero(np.abs(sq - 1.0) > 1e-12)[0]
                if bad.size:
                    raise InvalidPointSet(f"point {int(bad[0])} is not on the unit sphere")

    def float_points(self) -> np.ndarray:
        if self.exact:
            return np.array([[float(v) for v in row] for row in self.points], dtype=np.float64)
        return self.points

    def float_weights(self) -> np.ndarray:
        if self.exact:
            return np.array([float(v) for v in self.weights], dtype=np.float64)
        return self.weights

    def to_float(self) -> "WeightedPointSet":
        if not self.exact:
            return self
        w = self.float_weights()
        kind = self.kind
        if kind == "unweighted":
            w = np.full(len(self), 1.0 / len(self))
        pts = self.float_points()
        if self.measure == "sphere":
            pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
        return WeightedPointSet(pts, w, self.measure, kind, self.strength)

    def with_strength(self, t: int | None) -> "WeightedPointSet":
        return WeightedPointSet(self.points, self.weights, self.measure, self.kind, t)

    def __eq__(self, other):
        if not isinstance(other, WeightedPointSet):
            return NotImplemented
        if (self.measure, self.kind, self.strength, self.exact) != (
            other.measure, other.kind, other.strength, other.exact
        ):
            return False
        if self.points.shape != other.points.shape:
            return False
        if self.exact:
            return (self.points.tolist() == other.points.tolist()
                    and list(self.weights) == list(other.weights))
        return bool(np.array_equal(self.points, other.points)
                    and np.array_equal(self.weights, other.weights))

    __hash__ = None


def uniform_weights(n: int, exact: bool) -> np.ndarray:
    if exact:
        return np.array([Fraction(1, n)] * n, dtype=object)
    return np.full(n, 1.0 / n)


def infer_kind(weights: Sequence) -> str:
    n = len(weights)
    if all(w == weights[0] for w in weights) and (
        weights[0] == Fraction(1, n) if not isinstance(weights[0], float)
        else abs(weights[0] - 1.0 / n) <= FLOAT_TOL
    ):
        return "unweighted"
    if all(not isinstance(w, PiPoly) and w > 0 for w in weights):
        return "weighted"
    return "signed"


# ---------------------------------------------------------------------------
# design files

_HEADER = "design v1"


def format_number(x) -> str:
    if isinstance(x, PiPoly):
        if x.degree() <= 0:
            return format_number(x.coeffs.get(0, Fraction(0)))
        return x.token()
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return f"{x}/1"
    return repr(float(x))


def parse_number(token: str, line: int):
    """``p/q`` is an exact rational, anything else a binary64 float.

    Weights of signed Gaussian sets may also be ``PiPoly`` tokens (``1/2+-3/4*u``).
    """
    if "u" in token:
        try:
            return PiPoly.parse(token)
        except ValueError:
            raise ParseError(f"bad number {token!r}", line) from None
    if "/" in token:
        num, _, den = token.partition("/")
        try:
            p, q = int(num), int(den)
        except ValueError:
            raise ParseError(f"bad rational {token!r}", line) from None
        if q == 0:
            raise ParseError(f"zero denominator in {token!r}", line)
        return Fraction(p, q)
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"bad number {token!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite float {token!r}", line)
    return v


def _header_field(lines: list[str], idx: int, key: str) -> str:
    if idx >= len(lines):
        raise ParseError(f"missing header field {key!r}", idx + 1)
    k, sep, v = lines[idx].partition(":")
    if not sep or k.strip() != key:
        raise ParseError(f"malformed header, expected {key!r}", idx + 1)
    return v.strip()


def parse_design(text: str) -> WeightedPointSet:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _HEADER:
        raise ParseError("malformed header, expected 'design v1'", 1)
    measure = _header_field(lines, 1, "measure")
    if measure not in MEASURES:
        raise ParseError(f"unknown measure {measure!r}", 2)
    try:
        d = int(_header_field(lines, 2, "dimension"))
    except ValueError:
        raise ParseError("dimension is not an integer", 3) from None
    if d < 1:
        raise ParseError("dimension must be >= 1", 3)
    kind = _header_field(lines, 3, "kind")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", 4)
    idx = 4
    strength = None
    if idx < len(lines) and lines[idx].startswith("strength:"):
        try:
            strength = int(_header_field(lines, idx, "strength"))
        except ValueError:
            raise ParseError("strength is not an integer", idx + 1) from None
        idx += 1
    try:
        n = int(_header_field(lines, idx, "points"))
    except ValueError:
        raise ParseError("point count is not an integer", idx + 1) from None
    idx += 1
    body = lines[idx:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n:
        raise ParseError("point count mismatch", idx + 1)
    rows, weights = [], []
    for off, raw in enumerate(body):
        lineno = idx + off + 1
        toks = raw.split()
        if len(toks) != d + 1:
            raise ParseError(f"expected {d + 1} numbers, got {len(toks)}", lineno)
        vals = [parse_number(tok, lineno) for tok in toks]
        if any(isinstance(v, PiPoly) for v in vals[1:]):
            raise ParseError("pi-polynomials are only allowed in the weight column", lineno)
        weights.append(vals[0])
        rows.append(vals[1:])
    flat = [v for row in rows for v in row] + [w for w in weights if not isinstance(w, PiPoly)]
    exact = all(isinstance(v, Fraction) for v in flat)
    has_float = any(isinstance(v, float) for v in flat)
    if has_float and any(isinstance(v, (Fraction, PiPoly)) for v in flat + weights):
        raise ParseError("mixed exact and float numbers in one design", idx + 1)
    if exact:
        pts = np.array(rows, dtype=object)
        w = np.array(weights, dtype=object)
    else:
        pts = np.array(rows, dtype=np.float64)
        w = np.array(weights, dtype=np.float64)
    try:
        return WeightedPointSet(pts, w, measure, kind, strength)
    except InvalidPointSet as exc:
        raise ParseError(str(exc), idx + 1) from None


def format_design(ps: WeightedPointSet) -> str:
    out = [_HEADER, f"measure: {ps.measure}", f"dimension: {ps.dimension}", f"kind: {ps.kind}"]
    if ps.strength is not None:
        out.append(f"strength: {ps.strength}")
    out.append(f"points: {len(ps)}")
    for w, row in zip(ps.weights, ps.points):
        out.append(" ".join([format_number(w)] + [format_number(v) for v in row]))
    return "\n".join(out) + "\n"


def read_design(path) -> WeightedPointSet:
    return parse_design(Path(path).read_text(encoding="utf-8"))


def write_design(ps: WeightedPointSet, path) -> None:
    Path(path).write_text(format_design(ps), encoding="utf-8")
