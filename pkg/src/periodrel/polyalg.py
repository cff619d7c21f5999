"""Sparse multivariate polynomials in the period-matrix variables.

Variables live in four g x g blocks (Y, Z and their primed copies); the
monomial order is degrevlex over the fixed variable order
Y[1,1] < ... < Y[g,g] < Z[1,1] < ... < Z[g,g] < Y'[..] < Z'[..], which every
certificate records implicitly by construction.  Coefficients are exact
(Fraction or QuadScalar).  A deliberately small Buchberger engine decides
ideal membership at desk scale; blowup is converted into a clean
"undecided" outcome by a hard pair cap.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import matrices as mx
from .scalars import QuadScalar, Scalar, scalar_from_json, scalar_to_json

BLOCKS = ("Y", "Z", "Yp", "Zp")

MONOMIAL_ORDER = "degrevlex"


class ResourceCapExceeded(RuntimeError):
    """Raised when the Buchberger engine hits its configured caps."""


@dataclass(frozen=True)
class VarId:
    block: str
    row: int
    col: int
    copy: int = 1

    def __post_init__(self) -> None:
        if self.block not in BLOCKS:
            raise ValueError(f"unknown block {self.block!r}")
        if self.row < 1 or self.col < 1 or self.copy < 1:
            raise ValueError("variable indices are 1-based")

    def key(self) -> tuple[int, int, int, int]:
        return (self.copy, BLOCKS.index(self.block), self.row, self.col)

    def __lt__(self, other: "VarId") -> bool:
        return self.key() < other.key()

    def __str__(self) -> str:
        copy = "" if self.copy == 1 else str(self.copy)
        return f"{self.block}{copy}[{self.row},{self.col}]"


def yvar(i: int, j: int) -> VarId:
    return VarId("Y", i, j)


def zvar(i: int, j: int) -> VarId:
    return VarId("Z", i, j)


# ---------------------------------------------------------------------------
# Monomials


@dataclass(frozen=True)
class Monomial:
    """Sorted tuple of (variable, positive exponent) pairs."""

    exps: tuple

    @staticmethod
    def one() -> "Monomial":
        return Monomial(())

    @staticmethod
    def of(*pairs: tuple[VarId, int]) -> "Monomial":
        return Monomial(tuple(sorted((v, e) for v, e in pairs if e != 0)))

    @staticmethod
    def var(v: VarId, e: int = 1) -> "Monomial":
        return Monomial(((v, e),)) if e else Monomial(())

    def degree(self) -> int:
        return sum(e for _, e in self.exps)

    def variables(self) -> tuple[VarId, ...]:
        return tuple(v for v, _ in self.exps)

    def exponent(self, v: VarId) -> int:
        for w, e in self.exps:
            if w == v:
                return e
        return 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        merged: dict[VarId, int] = dict(self.exps)
        for v, e in other.exps:
            merged[v] = merged.get(v, 0) + e
        return Monomial(tuple(sorted(merged.items())))

    def divides(self, other: "Monomial") -> bool:
        it = dict(other.exps)
        return all(it.get(v, 0) >= e for v, e in self.exps)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        merged: dict[VarId, int] = dict(self.exps)
        for v, e in other.exps:
            r = merged.get(v, 0) - e
            if r < 0:
                raise ValueError("monomial division with negative exponent")
            if r == 0:
                merged.pop(v, None)
            else:
                merged[v] = r
        return Monomial(tuple(sorted(merged.items())))

    def lcm(self, other: "Monomial") -> "Monomial":
        merged: dict[VarId, int] = dict(self.exps)
        for v, e in other.exps:
            merged[v] = max(merged.get(v, 0), e)
        return Monomial(tuple(sorted(merged.items())))

    def coprime(self, other: "Monomial") -> bool:
        vs = {v for v, _ in self.exps}
        return all(v not in vs for v, _ in other.exps)

    def __lt__(self, other: "Monomial") -> bool:
        # degrevlex: compare total degree, then scan variables upward from
        # the smallest; the monomial with the *larger* exponent at the first
        # difference is the smaller one.
        ds, do = self.degree(), other.degree()
        if ds != do:
            return ds < do
        if self.exps == other.exps:
            return False
        vars_union = sorted({v for v, _ in self.exps} | {v for v, _ in other.exps})
        for v in vars_union:
            es, eo = self.exponent(v), other.exponent(v)
            if es != eo:
                return es > eo
        return False

    def __le__(self, other: "Monomial") -> bool:
        return self == other or self < other

    def __str__(self) -> str:
        if not self.exps:
            return "1"
        return "*".join(f"{v}^{e}" if e > 1 else str(v) for v, e in self.exps)


# ---------------------------------------------------------------------------
# Polynomials


class MultiPoly:
    """Sparse polynomial: monomial -> nonzero exact coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None, *, _clean: bool = True):
        if terms is None:
            self.terms: dict[Monomial, Scalar] = {}
        elif _clean:
            self.terms = {
                m: (Fraction(c) if isinstance(c, int) else c)
                for m, c in terms.items()
                if c != 0
            }
        else:
            self.terms = dict(terms)

    # -- constructors

    @staticmethod
    def zero() -> "MultiPoly":
        return MultiPoly()

    @staticmethod
    def constant(c: Scalar) -> "MultiPoly":
        return MultiPoly({Monomial.one(): c})

    @staticmethod
    def variable(v: VarId) -> "MultiPoly":
        return MultiPoly({Monomial.var(v): Fraction(1)})

    # -- predicates

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        return max((m.degree() for m in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        degs = {m.degree() for m in self.terms}
        return len(degs) <= 1

    def variables(self) -> set[VarId]:
        return {v for m in self.terms for v in m.variables()}

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, QuadScalar)):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(((m, str(c)) for m, c in self.terms.items()), key=lambda t: t[0].exps)))

    # -- arithmetic

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return MultiPoly(out, _clean=False)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = -c if s is None else s - c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return MultiPoly(out, _clean=False)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self.terms.items()}, _clean=False)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        out: dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                c = c1 * c2
                s = out.get(m)
                s = c if s is None else s + c
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return MultiPoly(out, _clean=False)

    def scale(self, c: Scalar) -> "MultiPoly":
        if c == 0:
            return MultiPoly.zero()
        return MultiPoly({m: c * x for m, x in self.terms.items()}, _clean=False)

    def term_mul(self, coeff: Scalar, mono: Monomial) -> "MultiPoly":
        if coeff == 0:
            return MultiPoly.zero()
        return MultiPoly({m * mono: c * coeff for m, c in self.terms.items()}, _clean=False)

    def __pow__(self, n: int) -> "MultiPoly":
        out = MultiPoly.constant(Fraction(1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- leading data (degrevlex)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms)

    def leading_coeff(self) -> Scalar:
        return self.terms[self.leading_monomial()]

    def monic(self) -> "MultiPoly":
        lc = self.leading_coeff()
        if lc == 1:
            return self
        inv = Fraction(1) / lc if isinstance(lc, Fraction) else lc.inverse()
        return self.scale(inv)

    # -- calculus / evaluation / substitution

    def partial(self, v: VarId) -> "MultiPoly":
        out: dict[Monomial, Scalar] = {}
        for m, c in self.terms.items():
            e = m.exponent(v)
            if e == 0:
                continue
            lowered = m / Monomial.var(v)
            s = out.get(lowered)
            t = c * e
            s = t if s is None else s + t
            if s == 0:
                out.pop(lowered, None)
            else:
                out[lowered] = s
        return MultiPoly(out, _clean=False)

    def evaluate(self, assignment: Mapping[VarId, Scalar]) -> Scalar:
        total: Scalar = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for v, e in m.exps:
                if v not in assignment:
                    raise KeyError(f"no value for variable {v}")
                x = assignment[v]
                for _ in range(e):
                    val = val * x
            total = total + val
        return total

    def substitute(self, mapping: Mapping[VarId, "MultiPoly"]) -> "MultiPoly":
        """Replace variables by polynomials; unmapped variables persist."""
        total = MultiPoly.zero()
        for m, c in self.terms.items():
            part = MultiPoly.constant(c)
            for v, e in m.exps:
                rep = mapping.get(v)
                if rep is None:
                    part = part * MultiPoly({Monomial.var(v, e): Fraction(1)})
                else:
                    part = part * rep**e
            total = total + part
        return total

    def rename_variables(self, func: Callable[[VarId], VarId]) -> "MultiPoly":
        out: dict[Monomial, Scalar] = {}
        for m, c in self.terms.items():
            nm = Monomial.of(*((func(v), e) for v, e in m.exps))
            s = out.get(nm)
            s = c if s is None else s + c
            if s == 0:
                out.pop(nm, None)
            else:
                out[nm] = s
        return MultiPoly(out, _clean=False)

    # -- display / JSON

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            c = self.terms[m]
            parts.append(f"({c})*{m}" if m.exps else f"({c})")
        return " + ".join(parts)

    __repr__ = __str__

    def to_json(self) -> list:
        out = []
        for m in sorted(self.terms, reverse=True):
            mono = [
                [v.block, v.row, v.col, e] if v.copy == 1 else [v.block, v.row, v.col, e, v.copy]
                for v, e in m.exps
            ]
            out.append({"coeff": scalar_to_json(self.terms[m]), "monomial": mono})
        return out

    @staticmethod
    def from_json(obj: Iterable[dict]) -> "MultiPoly":
        total: dict[Monomial, Scalar] = {}
        for term in obj:
            pairs = []
            for ent in term["monomial"]:
                block, row, col, e = ent[0], int(ent[1]), int(ent[2]), int(ent[3])
                copy = int(ent[4]) if len(ent) > 4 else 1
                pairs.append((VarId(block, row, col, copy), e))
            m = Monomial.of(*pairs)
            c = scalar_from_json(term["coeff"])
            total[m] = total.get(m, Fraction(0)) + c
        return MultiPoly(total)


# ---------------------------------------------------------------------------
# Polynomial matrices


class PolyMatrix:
    """Rectangular grid of MultiPoly entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]]):
        self.entries = tuple(tuple(row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if any(len(row) != self.cols for row in self.entries):
            raise ValueError("ragged polynomial matrix")

    @staticmethod
    def identity(n: int) -> "PolyMatrix":
        return PolyMatrix(
            [
                [MultiPoly.constant(Fraction(int(i == j))) if i == j else MultiPoly.zero() for j in range(n)]
                for i in range(n)
            ]
        )

    @staticmethod
    def zeros(r: int, c: int) -> "PolyMatrix":
        return PolyMatrix([[MultiPoly.zero() for _ in range(c)] for _ in range(r)])

    @staticmethod
    def from_scalars(m) -> "PolyMatrix":
        return PolyMatrix([[MultiPoly.constant(x) for x in row] for row in m])

    @staticmethod
    def symbolic(block: str, g: int, copy: int = 1) -> "PolyMatrix":
        """The g x g matrix whose (i,j) entry is the variable block[i,j]."""
        return PolyMatrix(
            [[MultiPoly.variable(VarId(block, i + 1, j + 1, copy)) for j in range(g)] for i in range(g)]
        )

    def __getitem__(self, ij: tuple[int, int]) -> MultiPoly:
        return self.entries[ij[0]][ij[1]]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return PolyMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return PolyMatrix(
            [
                [self.entries[i][j] - other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.rows}x{self.cols} * {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = MultiPoly.zero()
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def scale(self, c: Scalar) -> "PolyMatrix":
        return PolyMatrix([[e.scale(c) for e in row] for row in self.entries])

    def scale_poly(self, p: MultiPoly) -> "PolyMatrix":
        return PolyMatrix([[e * p for e in row] for row in self.entries])

    def map(self, func: Callable[[MultiPoly], MultiPoly]) -> "PolyMatrix":
        return PolyMatrix([[func(e) for e in row] for row in self.entries])

    def substitute(self, mapping: Mapping[VarId, MultiPoly]) -> "PolyMatrix":
        return self.map(lambda e: e.substitute(mapping))

    def evaluate(self, assignment: Mapping[VarId, Scalar]):
        return mx.freeze(
            [[e.evaluate(assignment) for e in row] for row in self.entries]
        )

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            self.entries[i][j] == other.entries[i][j]
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }

    @staticmethod
    def from_json(obj: dict) -> "PolyMatrix":
        return PolyMatrix([[MultiPoly.from_json(e) for e in row] for row in obj["entries"]])


SYMBOLIC_DET_CAP = 4


def determinant(m: PolyMatrix) -> MultiPoly:
    """Exact determinant: Bareiss for constant matrices, cofactor expansion
    (fraction-free over the polynomial ring) for symbolic ones up to 4x4."""
    if m.rows != m.cols:
        raise ValueError("determinant of non-square matrix")
    if m.rows == 0:
        return MultiPoly.constant(Fraction(1))
    if _all_constant(m):
        return MultiPoly.constant(mx.det(m.evaluate({})))
    if m.rows > SYMBOLIC_DET_CAP:
        raise ResourceCapExceeded(
            f"symbolic determinant capped at {SYMBOLIC_DET_CAP}x{SYMBOLIC_DET_CAP}"
        )
    return _det_cofactor(m.entries)


def _all_constant(m: PolyMatrix) -> bool:
    return all(
        not e.terms or (len(e.terms) == 1 and Monomial.one() in e.terms)
        for row in m.entries
        for e in row
    )


def _det_cofactor(rows) -> MultiPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = MultiPoly.zero()
    for i in range(n):
        if rows[i][0].is_zero():
            continue
        minor = [
            [rows[r][c] for c in range(1, n)] for r in range(n) if r != i
        ]
        term = rows[i][0] * _det_cofactor(minor)
        total = total + term if i % 2 == 0 else total - term
    return total


def adjugate(m: PolyMatrix) -> PolyMatrix:
    """Transpose cofactor matrix: m * adjugate(m) = determinant(m) * I."""
    if m.rows != m.cols:
        raise ValueError("adjugate of non-square matrix")
    n = m.rows
    if n == 1:
        return PolyMatrix([[MultiPoly.constant(Fraction(1))]])
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [
                [m.entries[r][c] for c in range(n) if c != i]
                for r in range(n)
                if r != j
            ]
            cof = _det_cofactor(minor)
            row.append(cof if (i + j) % 2 == 0 else -cof)
        out.append(row)
    return PolyMatrix(out)


# ---------------------------------------------------------------------------
# Buchberger engine (rational coefficients only)


DEFAULT_PAIR_CAP = 20000
DEFAULT_VAR_CAP = 18  # 2 g^2 with g <= 3
DEFAULT_DEGREE_CAP = 4


def _check_rational(polys: Iterable[MultiPoly]) -> None:
    for p in polys:
        for c in p.terms.values():
            if not isinstance(c, Fraction):
                raise ResourceCapExceeded(
                    "Groebner engine runs over Q only; use the evaluation or permutation criteria"
                )


def normal_form(p: MultiPoly, basis: Sequence[MultiPoly]) -> MultiPoly:
    """Full remainder of p under multivariate division by basis."""
    rem = MultiPoly.zero()
    cur = p
    lms = [(b.leading_monomial(), b.leading_coeff(), b) for b in basis if b]
    while cur:
        lm = cur.leading_monomial()
        lc = cur.terms[lm]
        for blm, blc, b in lms:
            if blm.divides(lm):
                cur = cur - b.term_mul(lc / blc, lm / blm)
                break
        else:
            t = MultiPoly({lm: lc})
            rem = rem + t
            cur = cur - t
    return rem


def _spoly(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    lmf, lmg = f.leading_monomial(), g.leading_monomial()
    l = lmf.lcm(lmg)
    return f.term_mul(Fraction(1) / f.leading_coeff(), l / lmf) - g.term_mul(
        Fraction(1) / g.leading_coeff(), l / lmg
    )


def groebner_basis(
    generators: Sequence[MultiPoly],
    pair_cap: int = DEFAULT_PAIR_CAP,
) -> list[MultiPoly]:
    """Buchberger with degrevlex, coprime-lm and chain pair elimination.

    Raises :class:`ResourceCapExceeded` after processing ``pair_cap`` pairs.
    """
    gens = [g.monic() for g in generators if g]
    if not gens:
        raise ValueError("generator list must be nonempty")
    _check_rational(gens)
    basis = list(gens)
    heap: list[tuple[int, int, int]] = []
    done: set[tuple[int, int]] = set()
    for i in range(len(basis)):
        for j in range(i):
            l = basis[i].leading_monomial().lcm(basis[j].leading_monomial())
            heapq.heappush(heap, (l.degree(), j, i))
    processed = 0
    while heap:
        _, i, j = heapq.heappop(heap)
        done.add((i, j))
        processed += 1
        if processed > pair_cap:
            raise ResourceCapExceeded(
                "membership undecided at this scale; use probabilistic nonmembership"
            )
        fi, fj = basis[i], basis[j]
        lmi, lmj = fi.leading_monomial(), fj.leading_monomial()
        if lmi.coprime(lmj):
            continue
        l = lmi.lcm(lmj)
        # chain criterion: some k with lm_k | lcm and both pairs processed
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if basis[k].leading_monomial().divides(l):
                pik = (min(i, k), max(i, k))
                pjk = (min(j, k), max(j, k))
                if pik in done and pjk in done:
                    skip = True
                    break
        if skip:
            continue
        r = normal_form(_spoly(fi, fj), basis)
        if r:
            r = r.monic()
            basis.append(r)
            new = len(basis) - 1
            for k in range(new):
                l2 = basis[k].leading_monomial().lcm(r.leading_monomial())
                heapq.heappush(heap, (l2.degree(), k, new))
    return _interreduce(basis)


def _interreduce(basis: list[MultiPoly]) -> list[MultiPoly]:
    basis = sorted((b for b in basis if b), key=lambda b: b.leading_monomial())
    out: list[MultiPoly] = []
    for i, b in enumerate(basis):
        others = out + basis[i + 1 :]
        lm = b.leading_monomial()
        if any(o.leading_monomial().divides(lm) for o in others):
            continue
        out.append(normal_form(b, [o for o in out]).monic() if out else b)
    # one more full-reduction pass so every element is reduced against the rest
    return [normal_form(b, [o for o in out if o is not b]).monic() for b in out]


def buchberger_reduce(
    p: MultiPoly,
    generators: Sequence[MultiPoly],
    pair_cap: int = DEFAULT_PAIR_CAP,
    var_cap: int = DEFAULT_VAR_CAP,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> tuple[MultiPoly, bool]:
    """Reduce p modulo the ideal of the generators; (remainder, in_ideal).

    Exact and certifying in both directions, but deliberately capped:
    too many variables, too-high degree, or a pair-count blowup raise
    :class:`ResourceCapExceeded` instead of grinding.
    """
    if not generators:
        raise ValueError("generator list must be nonempty")
    _check_rational([p])
    nvars = len(set().union(*[g.variables() for g in generators], p.variables()))
    if nvars > var_cap:
        raise ResourceCapExceeded(
            "membership undecided at this scale; use probabilistic nonmembership"
        )
    if p.degree() > degree_cap or any(g.degree() > degree_cap for g in generators):
        raise ResourceCapExceeded(
            "membership undecided at this scale; use probabilistic nonmembership"
        )
    gb = groebner_basis(generators, pair_cap=pair_cap)
    rem = normal_form(p, gb)
    return rem, rem.is_zero()
