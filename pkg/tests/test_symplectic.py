import random
from fractions import Fraction

import pytest

from periodrel import matrices as mx
from periodrel.symplectic import (
    IsotropicFrame,
    complete_to_symplectic_basis,
    project_to_V,
    sample_symplectic,
    similitude_defect,
    standard_form,
    with_multiplier,
)


def test_word_length_zero_is_identity():
    s = sample_symplectic(2, seed=0, word_length=0)
    assert mx.mat_eq(s.matrix, mx.identity(4))
    assert s.verify()


def test_standard_form_is_a_sample():
    g = 3
    j = standard_form(g)
    assert mx.is_zero_matrix(similitude_defect(j, Fraction(1), g))


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_random_samples_verify(g):
    for seed in range(10):
        s = sample_symplectic(g, seed=seed)
        assert s.multiplier == 1
        assert s.verify()


def test_with_multiplier():
    s = sample_symplectic(2, seed=42, word_length=6)
    assert with_multiplier(s, Fraction(1)).multiplier == 1
    t = with_multiplier(s, Fraction(-2, 5))
    assert t.multiplier == Fraction(-2, 5)
    assert t.verify()
    ident = sample_symplectic(2, seed=0, word_length=0)
    t3 = with_multiplier(ident, Fraction(3))
    expect = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 3, 0], [0, 0, 0, 3]]
    assert mx.mat_eq(t3.matrix, mx.freeze([[Fraction(x) for x in row] for row in expect]))
    with pytest.raises(ValueError):
        with_multiplier(s, Fraction(0))


def test_projection_identity_and_j():
    g = 2
    ident = sample_symplectic(g, seed=0, word_length=0)
    fr = project_to_V(ident)
    assert mx.mat_eq(fr.y_block, mx.identity(g))
    assert mx.is_zero_matrix(fr.z_block)
    js = sample_symplectic(g, 0, 0)
    jso = type(js)(standard_form(g), Fraction(1))
    fr2 = project_to_V(jso)
    assert mx.is_zero_matrix(fr2.y_block)
    assert mx.mat_eq(fr2.z_block, mx.scalar_mul(Fraction(-1), mx.identity(g)))


@pytest.mark.parametrize("g", [2, 3])
def test_projection_random_isotropic(g):
    for seed in range(20):
        fr = project_to_V(sample_symplectic(g, seed=seed))
        assert fr.verify()


def test_completion_of_standard_frame():
    g = 2
    cols = [[Fraction(int(i == j)) for j in range(g)] for i in range(g)]
    cols += [[Fraction(0)] * g for _ in range(g)]
    s = complete_to_symplectic_basis(IsotropicFrame(mx.freeze(cols)))
    assert s.verify() and s.multiplier == 1


def test_completion_rejects_degenerate_frame():
    g = 2
    col = [Fraction(1), Fraction(0), Fraction(0), Fraction(0)]
    cols = [[col[r], col[r]] for r in range(4)]  # two equal columns
    with pytest.raises(ValueError, match="frame not full rank"):
        complete_to_symplectic_basis(IsotropicFrame(mx.freeze(cols)))


def test_completion_rejects_non_isotropic():
    # columns e_1 and e_3 pair to <e_1, e_3> = 1 at g = 2
    cols = [
        [Fraction(1), Fraction(0)],
        [Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(1)],
        [Fraction(0), Fraction(0)],
    ]
    with pytest.raises(ValueError, match="frame not isotropic"):
        complete_to_symplectic_basis(IsotropicFrame(mx.freeze(cols)))


@pytest.mark.parametrize("g", [2, 3])
def test_completion_roundtrip_preserves_frame(g):
    for seed in range(15):
        fr = project_to_V(sample_symplectic(g, seed=seed))
        s = complete_to_symplectic_basis(fr)
        assert s.verify()
        # first g columns literally equal the input frame columns
        for r in range(2 * g):
            for c in range(g):
                assert s.matrix[r][c] == fr.columns[r][c]


def test_completion_deterministic():
    fr = project_to_V(sample_symplectic(2, seed=9))
    a = complete_to_symplectic_basis(fr)
    b = complete_to_symplectic_basis(fr)
    assert mx.mat_eq(a.matrix, b.matrix)


def test_density_proxy_top_block_invertible():
    # dominance heuristic: the top g x g block of a projected frame is
    # invertible for >= 95% of draws
    for g in (2, 3):
        ok = 0
        n = 200
        for seed in range(n):
            fr = project_to_V(sample_symplectic(g, seed=1000 + seed))
            if mx.inverse(fr.y_block) is not None:
                ok += 1
        assert ok >= int(0.95 * n)


def test_sample_json():
    s = sample_symplectic(2, seed=42)
    doc = s.to_json()
    assert doc["g"] == 2
    assert mx.mat_eq(mx.matrix_from_json(doc["matrix"]), s.matrix)
