"""Exact rational symplectic-similitude sampling and basis completion.

Samples are words in three generator families (block-diagonal with a
unimodular top block, unit upper-triangular shears with a symmetric block,
and the standard form J itself), so every sample satisfies M^t J M = J
exactly by construction; the similitude multiplier enters by a diagonal
rescaling of the last g columns.  Every constructor re-verifies its defining
identity before returning.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import matrices as mx


def standard_form(g: int):
    """J = [[0, I], [-I, 0]] as an exact 2g x 2g matrix."""
    top = mx.hstack(mx.zeros(g, g), mx.identity(g))
    bottom = mx.hstack(mx.scalar_mul(Fraction(-1), mx.identity(g)), mx.zeros(g, g))
    return mx.vstack(top, bottom)


def similitude_defect(m, mu: Fraction, g: int):
    """M^t J M - mu J; the zero matrix exactly when M is a mu-similitude."""
    j = standard_form(g)
    return mx.mat_sub(mx.mat_mul(mx.mat_mul(mx.transpose(m), j), m), mx.scalar_mul(mu, j))


@dataclass(frozen=True)
class SymplecticSample:
    matrix: tuple
    multiplier: Fraction

    @property
    def g(self) -> int:
        return len(self.matrix) // 2

    def verify(self) -> bool:
        return mx.is_zero_matrix(similitude_defect(self.matrix, self.multiplier, self.g))

    def to_json(self) -> dict:
        from .scalars import scalar_to_json

        return {
            "g": self.g,
            "multiplier": scalar_to_json(self.multiplier),
            "matrix": mx.matrix_to_json(self.matrix),
        }


@dataclass(frozen=True)
class IsotropicFrame:
    """2g x g stack (Y; Z) with Y^t Z - Z^t Y = 0 exactly."""

    columns: tuple

    @property
    def g(self) -> int:
        return len(self.columns) // 2

    @property
    def y_block(self):
        g = self.g
        return mx.freeze(self.columns[:g])

    @property
    def z_block(self):
        g = self.g
        return mx.freeze(self.columns[g:])

    def isotropy_defect(self):
        y, z = self.y_block, self.z_block
        return mx.mat_sub(
            mx.mat_mul(mx.transpose(y), z), mx.mat_mul(mx.transpose(z), y)
        )

    def verify(self) -> bool:
        return mx.is_zero_matrix(self.isotropy_defect())


def _make_sample(matrix, multiplier: Fraction) -> SymplecticSample:
    s = SymplecticSample(mx.freeze(matrix), Fraction(multiplier))
    if not s.verify():
        raise ValueError("matrix is not a symplectic similitude for the claimed multiplier")
    return s


def _random_unimodular(rng: random.Random, g: int) -> list[list[Fraction]]:
    # product of integer shears; det stays 1, entries stay small
    a = [[Fraction(int(i == j)) for j in range(g)] for i in range(g)]
    for _ in range(g + 2):
        i = rng.randrange(g)
        j = rng.randrange(g)
        if i == j:
            continue
        c = rng.choice((-2, -1, 1, 2))
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
    return a


def _random_symmetric(rng: random.Random, g: int) -> list[list[Fraction]]:
    b = [[Fraction(0)] * g for _ in range(g)]
    for i in range(g):
        for j in range(i, g):
            c = Fraction(rng.randint(-2, 2))
            b[i][j] = c
            b[j][i] = c
    return b


def sample_symplectic(g: int, seed: int, word_length: int = 8) -> SymplecticSample:
    """Deterministic exact sample of Sp_2g(Q) as a word in three generator kinds.

    Degenerate draws (words whose leading g x g block is singular, which would
    park the projected frame outside the open cell) are regenerated by
    extending the word; the result is still an exact generator word and is
    deterministic given the seed.
    """
    if g < 1:
        raise ValueError("g must be >= 1")
    rng = random.Random(seed)
    m = mx.identity(2 * g)
    j = standard_form(g)

    def gen_of(kind: str):
        if kind == "linear":
            a = mx.freeze(_random_unimodular(rng, g))
            return mx.block(a, mx.zeros(g, g), mx.zeros(g, g), mx.transpose(mx.inverse(a)))
        if kind == "shear":
            return mx.block(mx.identity(g), mx.freeze(_random_symmetric(rng, g)), mx.zeros(g, g), mx.identity(g))
        return j

    for _ in range(word_length):
        m = mx.mat_mul(m, gen_of(rng.choice(("linear", "shear", "swap"))))
    if word_length > 0:
        guard = 0
        while mx.inverse(mx.freeze([row[:g] for row in m[:g]])) is None:
            # a shear followed by J replaces the leading block by a generic mix
            m = mx.mat_mul(mx.mat_mul(m, gen_of("shear")), j)
            guard += 1
            if guard > 60:
                raise AssertionError("could not regenerate a non-degenerate word")
    return _make_sample(m, Fraction(1))


def with_multiplier(s: SymplecticSample, mu: Fraction) -> SymplecticSample:
    """Rescale the last g columns by mu; multiplier gets multiplied by mu."""
    mu = Fraction(mu)
    if mu == 0:
        raise ValueError("multiplier must be nonzero")
    g = s.g
    scaled = [
        [x if j < g else mu * x for j, x in enumerate(row)] for row in s.matrix
    ]
    return _make_sample(scaled, s.multiplier * mu)


def project_to_V(s: SymplecticSample) -> IsotropicFrame:
    """First g columns of the sample; exactly isotropic by the defining identity."""
    g = s.g
    frame = IsotropicFrame(mx.freeze([row[:g] for row in s.matrix]))
    if not frame.verify():
        raise AssertionError("projection of a similitude sample must be isotropic")
    return frame


def _pairing(j, u, v) -> Fraction:
    """<u, v> = u^t J v for column vectors given as flat lists."""
    total = Fraction(0)
    n = len(u)
    for i in range(n):
        if u[i] == 0:
            continue
        row = j[i]
        for k in range(n):
            if row[k] != 0 and v[k] != 0:
                total += u[i] * row[k] * v[k]
    return total


def complete_to_symplectic_basis(frame: IsotropicFrame) -> SymplecticSample:
    """Extend an independent isotropic frame to a full symplectic sample.

    Greedy symplectic Gram-Schmidt: the dual vector for each frame column is
    found by an exact linear solve whose pivot scan follows the standard
    basis in index order, then corrected against previously built duals; the
    output is deterministic given the frame, the first g columns equal the
    input columns, and the multiplier is 1.
    """
    g = frame.g
    n = 2 * g
    cols = [[frame.columns[r][c] for r in range(n)] for c in range(g)]
    if mx.rank(mx.freeze([[cols[c][r] for c in range(g)] for r in range(n)])) != g:
        raise ValueError("frame not full rank")
    if not frame.verify():
        raise ValueError("frame not isotropic")
    j = standard_form(g)
    duals: list[list[Fraction]] = []
    for jj in range(g):
        # <w_k, u> = delta_{k jj} for all k
        system = mx.freeze([[_jrow(j, cols[k], c) for c in range(n)] for k in range(g)])
        rhs = [Fraction(int(k == jj)) for k in range(g)]
        u = mx.solve(system, rhs)
        if u is None:
            raise ValueError("frame not full rank")
        # kill pairings with already-built duals by adding frame columns
        for i, ui in enumerate(duals):
            c = _pairing(j, ui, u)
            if c != 0:
                u = [x + c * w for x, w in zip(u, cols[i])]
        duals.append(u)
    full = [[(cols[c][r] if c < g else duals[c - g][r]) for c in range(2 * g)] for r in range(n)]
    return _make_sample(full, Fraction(1))


def _jrow(j, w, c: int) -> Fraction:
    """Coefficient of unknown u_c in <w, u> = sum_i w_i J[i][c] u_c."""
    total = Fraction(0)
    for i in range(len(w)):
        if w[i] != 0 and j[i][c] != 0:
            total += w[i] * j[i][c]
    return total
