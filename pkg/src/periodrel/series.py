"""Truncated univariate power series with exact coefficients.

Truncation order is explicit data: a series of order N carries coefficients
for X^0..X^N and nothing beyond.  Binary operations propagate the minimum
order of their operands.  Radius and boundedness reports are honest about
what a finite coefficient scan can and cannot certify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .scalars import (
    Place,
    Scalar,
    ScalarError,
    abs_at_place,
    is_prime,
    padic_abs_exact,
    scalar_from_json,
    scalar_to_json,
    valuation,
)


@dataclass(frozen=True)
class TruncatedSeries:
    coeffs: tuple
    order: int

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValueError("truncation order must be >= 0")
        if len(self.coeffs) != self.order + 1:
            raise ValueError(f"need {self.order + 1} coefficients, got {len(self.coeffs)}")
        object.__setattr__(
            self,
            "coeffs",
            tuple(Fraction(c) if isinstance(c, int) else c for c in self.coeffs),
        )

    # -- constructors

    @staticmethod
    def from_coeffs(coeffs: Sequence[Scalar], order: int | None = None) -> "TruncatedSeries":
        cs = list(coeffs)
        if order is None:
            order = len(cs) - 1
        if len(cs) < order + 1:
            cs += [Fraction(0)] * (order + 1 - len(cs))
        return TruncatedSeries(tuple(cs[: order + 1]), order)

    @staticmethod
    def zero(order: int) -> "TruncatedSeries":
        return TruncatedSeries((Fraction(0),) * (order + 1), order)

    @staticmethod
    def constant(c: Scalar, order: int) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs([c], order)

    @staticmethod
    def x(order: int) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs([0, 1], order)

    @staticmethod
    def geometric(order: int) -> "TruncatedSeries":
        """1/(1-X) truncated."""
        return TruncatedSeries.from_coeffs([Fraction(1)] * (order + 1), order)

    # -- basics

    def __getitem__(self, n: int) -> Scalar:
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self.coeffs[: order + 1], order)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(
            tuple(self.coeffs[i] + other.coeffs[i] for i in range(n + 1)), n
        )

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        return TruncatedSeries(
            tuple(self.coeffs[i] - other.coeffs[i] for i in range(n + 1)), n
        )

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.order)

    def scale(self, c: Scalar) -> "TruncatedSeries":
        return TruncatedSeries(tuple(c * x for x in self.coeffs), self.order)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a == 0:
                continue
            for j in range(0, n + 1 - i):
                b = other.coeffs[j]
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return TruncatedSeries(tuple(out), n)

    def derivative(self) -> "TruncatedSeries":
        if self.order == 0:
            return TruncatedSeries.zero(0)
        return TruncatedSeries(
            tuple((i + 1) * self.coeffs[i + 1] for i in range(self.order)),
            self.order - 1,
        )

    def nth_derivative(self, k: int) -> "TruncatedSeries":
        f = self
        for _ in range(k):
            f = f.derivative()
        return f

    def is_integral(self) -> bool:
        """All computed coefficients lie in Z."""
        return all(
            isinstance(c, Fraction) and c.denominator == 1 for c in self.coeffs
        )

    def __str__(self) -> str:
        parts = [f"{c}*X^{n}" for n, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(parts) if parts else "0"

    # -- JSON

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [scalar_to_json(c) for c in self.coeffs]}

    @staticmethod
    def from_json(obj: dict) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs(
            [scalar_from_json(c) for c in obj["coeffs"]], int(obj["order"])
        )


# ---------------------------------------------------------------------------
# Composition and inversion


def compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """f(g(X)) to the shared truncation order; requires g(0) = 0."""
    if g.coeffs[0] != 0:
        raise ValueError("inner series must vanish at origin")
    n = min(f.order, g.order)
    g = g.truncate(n)
    # Horner from the top coefficient down
    acc = TruncatedSeries.constant(f.coeffs[n], n)
    for i in range(n - 1, -1, -1):
        acc = acc * g + TruncatedSeries.constant(f.coeffs[i], n)
    return acc


def reciprocal(f: TruncatedSeries) -> TruncatedSeries:
    """1/f to f's truncation order; requires f(0) != 0."""
    c0 = f.coeffs[0]
    if c0 == 0:
        raise ValueError("series with zero constant term has no reciprocal")
    inv0 = Fraction(1) / c0 if isinstance(c0, Fraction) else c0.inverse()
    out = [inv0]
    for n in range(1, f.order + 1):
        s = None
        for i in range(1, n + 1):
            if i < len(f.coeffs) and f.coeffs[i] != 0:
                t = f.coeffs[i] * out[n - i]
                s = t if s is None else s + t
        out.append(-(s * inv0) if s is not None else Fraction(0))
    return TruncatedSeries(tuple(out), f.order)


def compositional_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """The series g with f(g(X)) = g(f(X)) = X to the truncation order.

    Requires f(0) = 0 and f'(0) != 0.  Uses Newton iteration with doubling
    precision on truncations; when f has integer coefficients and
    f'(0) = +-1 the result again has integer coefficients.
    """
    if f.coeffs[0] != 0:
        raise ValueError("series must vanish at origin")
    if f.order < 1 or f.coeffs[1] == 0:
        raise ValueError("series needs a unit linear coefficient")
    n = f.order
    c1 = f.coeffs[1]
    inv1 = Fraction(1) / c1 if isinstance(c1, Fraction) else c1.inverse()
    # zero-pad the derivative to order n: with doubling precision the padded
    # coefficient only ever multiplies into orders beyond the truncation
    fprime = TruncatedSeries.from_coeffs(list(f.derivative().coeffs), n)
    g = TruncatedSeries.from_coeffs([0, inv1], 1)
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        gk = TruncatedSeries.from_coeffs(list(g.coeffs), prec)
        err = compose(f.truncate(prec), gk) - TruncatedSeries.x(prec)
        corr = err * reciprocal(compose(fprime.truncate(prec), gk))
        g = gk - corr
    return g


# ---------------------------------------------------------------------------
# Radius reports


@dataclass(frozen=True)
class RadiusReport:
    place: Place
    lower_bound: float
    certified: bool


def radius_lower_bound(
    f: TruncatedSeries, v: Place, integral_coefficients: bool = False
) -> RadiusReport:
    """Lower bound for the v-adic radius of convergence.

    A certified bound of 1 at a finite place requires the caller to assert
    structurally that all coefficients (including the uncomputed tail) are
    integers; scanning finitely many coefficients never certifies anything.
    The heuristic bound is min over computed n >= 1 of |a_n|_v^(-1/n).
    """
    if v.is_finite() and integral_coefficients:
        if not f.is_integral():
            raise ScalarError("integrality asserted but computed coefficients are not integers")
        return RadiusReport(v, 1.0, True)
    best = math.inf
    for idx in range(1, f.order + 1):
        c = f.coeffs[idx]
        if c == 0:
            continue
        a = abs_at_place(c, v)
        if a > 0:
            best = min(best, a ** (-1.0 / idx))
    return RadiusReport(v, best, False)


# ---------------------------------------------------------------------------
# Globally-bounded scan


@dataclass(frozen=True)
class GloballyBoundedReport:
    positive_radius_everywhere: bool
    bad_primes: tuple[int, ...]
    verdict: str  # "bounded" | "unbounded_evidence" | "inconclusive"
    witness: tuple[int, int] | None = None  # (n, p) with |a_n|_p > 1


def _denominator_factors(den: int, limit: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= den and p <= limit:
        while den % p == 0:
            out[p] = out.get(p, 0) + 1
            den //= p
        p += 1 if p == 2 else 2
    if den > 1:
        if is_prime(den):
            out[den] = out.get(den, 0) + 1
        else:
            out[-den] = 1  # unfactored composite tail; recorded, never a witness
    return out


def globally_bounded_scan(f: TruncatedSeries, prime_bound: int) -> GloballyBoundedReport:
    """Scan coefficient denominators for evidence about global boundedness.

    bounded: all computed denominators divide a fixed integer determined by
    the first half of the scan.  unbounded_evidence: new primes <= prime_bound
    keep entering the denominator support late in the scan; the witness (n, p)
    satisfies |a_n|_p > 1.  Everything else is inconclusive.
    """
    dens = []
    for c in f.coeffs:
        if not isinstance(c, Fraction):
            raise ScalarError("globally-bounded scan is defined over rational coefficients")
        dens.append(c.denominator)

    entry: dict[int, int] = {}
    for n, den in enumerate(dens):
        for p in _denominator_factors(den, max(prime_bound, 10**5)):
            # negative keys mark unfactored composite tails; not primes
            if p > 1 and p not in entry:
                entry[p] = n
    bad = tuple(sorted(entry))

    pos_radius = all(
        radius_lower_bound(f, Place.finite(p)).lower_bound > 0 for p in bad
    ) and radius_lower_bound(f, Place.arch()).lower_bound > 0

    if all(den == 1 for den in dens):
        return GloballyBoundedReport(pos_radius, (), "bounded")

    half = f.order // 2
    l = 1
    for den in dens[: half + 1]:
        l = l * den // math.gcd(l, den)
    if all(l % den == 0 for den in dens):
        return GloballyBoundedReport(pos_radius, bad, "bounded")

    late = [(n, p) for p, n in entry.items() if n > half and 1 < p <= prime_bound]
    if late:
        n, p = max(late)
        return GloballyBoundedReport(pos_radius, bad, "unbounded_evidence", witness=(n, p))
    return GloballyBoundedReport(pos_radius, bad, "inconclusive")


# ---------------------------------------------------------------------------
# Evaluation with tail bounds


@dataclass(frozen=True)
class EvalResult:
    value: Scalar | float
    tail_bound: float
    heuristic: bool
    # exact form of the tail bound at a finite place: v_p(tail) = (N+1) v_p(x)
    tail_valuation: int | None = None


def eval_with_tail_bound(
    f: TruncatedSeries, x: Scalar, v: Place, integral_tail: bool = False
) -> EvalResult:
    """Evaluate the partial sum at x and bound the omitted tail.

    At a finite place with ``integral_tail`` (caller asserts the whole
    coefficient sequence is integral) the partial sum is exact and the tail
    bound |x|_v^(N+1) is rigorous; it requires |x|_v < 1.  Archimedean
    evaluation returns a float with a geometric tail estimate read off the
    last computed coefficient ratios, flagged heuristic.
    """
    if x == 0:
        return EvalResult(f.coeffs[0], 0.0, False)

    if v.is_finite():
        absx = abs_at_place(x, v)
        total = f.coeffs[0]
        xp = x
        for n in range(1, f.order + 1):
            total = total + f.coeffs[n] * xp
            xp = xp * x if n < f.order else xp
        if integral_tail:
            if not f.is_integral():
                raise ScalarError("integral tail asserted but computed coefficients are not integers")
            if absx >= 1.0:
                raise ScalarError("evaluation outside certified disc")
            vx = valuation(x, v.p)
            return EvalResult(total, absx ** (f.order + 1), False, (f.order + 1) * vx)
        last = [abs_at_place(c, v) for c in f.coeffs[-5:] if c != 0]
        tail = (max(last) if last else 0.0) * absx ** (f.order + 1)
        return EvalResult(total, tail, True)

    # archimedean: float partial sum, geometric tail from trailing ratios
    xf = _arch_value(x, v)
    mags = [abs_at_place(c, v) for c in f.coeffs]
    total_f = 0.0
    for n in range(f.order, -1, -1):
        total_f = total_f * xf + _arch_value(f.coeffs[n], v)
    ratios = [
        mags[i] / mags[i - 1]
        for i in range(max(1, f.order - 4), f.order + 1)
        if mags[i - 1] > 0 and mags[i] > 0
    ]
    rho = max(ratios) if ratios else 1.0
    q = rho * abs(xf)
    lastmag = mags[f.order] * abs(xf) ** f.order
    tail = lastmag * q / (1.0 - q) if q < 1.0 else math.inf
    # allowance for float rounding of the partial sum itself
    maxterm = max((m * abs(xf) ** n for n, m in enumerate(mags)), default=0.0)
    tail += 2.3e-16 * (f.order + 1) * maxterm
    return EvalResult(total_f, tail, True)


def _arch_value(c: Scalar, v: Place) -> float:
    from .scalars import QuadScalar

    if isinstance(c, QuadScalar):
        if c.d < 0:
            raise ScalarError("archimedean evaluation over imaginary quadratic scalars is not supported")
        return c.embed(v.embedding or "sigma")
    return float(c.numerator) / float(c.denominator)


def padic_partial_sum(f: TruncatedSeries, x: Fraction) -> Fraction:
    """Exact partial sum over Q (helper for finite-place self-consistency)."""
    total = Fraction(0)
    xp = Fraction(1)
    for c in f.coeffs:
        total += c * xp
        xp *= x
    return total


def padic_difference_valuation(a: Fraction, b: Fraction, p: int) -> int | None:
    """v_p(a - b), None when a = b (infinite valuation)."""
    d = a - b
    if d == 0:
        return None
    return valuation(d, p)


__all__ = [
    "TruncatedSeries",
    "RadiusReport",
    "GloballyBoundedReport",
    "EvalResult",
    "compose",
    "reciprocal",
    "compositional_inverse",
    "radius_lower_bound",
    "globally_bounded_scan",
    "eval_with_tail_bound",
    "padic_partial_sum",
    "padic_difference_valuation",
    "padic_abs_exact",
]
