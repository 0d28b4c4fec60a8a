import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasespace.errors import DivisionByZero, NotPrime, ReducibleModulus, UsageError
from phasespace.fields import (
    build_field,
    build_quadratic_extension,
    char_phase,
    gf_arith,
    label_digits,
    verify_field_axioms,
)

from conftest import ORDERS

GF4_MUL = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]]
GF4_ADD = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]


def poly_mulmod(a, b, modulus, p):
    """Schoolbook product of digit lists reduced by a monic modulus."""
    m = len(modulus) - 1
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(len(prod) - 1, m - 1, -1):
        c = prod[deg]
        if c:
            for k in range(m + 1):
                prod[deg - m + k] = (prod[deg - m + k] - c * modulus[k]) % p
    return prod[:m]


def test_gf4_tables_match_reference():
    F = build_field(2, 2)
    assert F.mul.tolist() == GF4_MUL
    assert F.add.tolist() == GF4_ADD
    assert F.modulus == (1, 1, 1)


@pytest.mark.parametrize("p,m,modulus", [(2, 3, (1, 1, 0, 1)), (3, 2, (1, 0, 1)), (2, 4, (1, 1, 0, 0, 1))])
def test_default_modulus_is_smallest_irreducible(p, m, modulus):
    assert build_field(p, m).modulus == modulus


@pytest.mark.parametrize("d", sorted(ORDERS) + [16, 25, 27])
def test_axioms(d):
    F = build_field(*ORDERS.get(d, {16: (2, 4), 25: (5, 2), 27: (3, 3)}.get(d)))
    assert all(verify_field_axioms(F).values())


@pytest.mark.parametrize("p,m", [(2, 2), (2, 3), (3, 2), (5, 2), (2, 5)])
def test_multiplication_against_polynomial_oracle(p, m):
    F = build_field(p, m)
    for x, y in itertools.product(range(F.d), repeat=2):
        expect = poly_mulmod(label_digits(x, p, m), label_digits(y, p, m), F.modulus, p)
        assert label_digits(int(F.mul[x, y]), p, m) == expect


def test_addition_is_digitwise():
    F = build_field(3, 2)
    for x, y in itertools.product(range(9), repeat=2):
        dx, dy = label_digits(x, 3, 2), label_digits(y, 3, 2)
        assert label_digits(int(F.add[x, y]), 3, 2) == [(a + b) % 3 for a, b in zip(dx, dy)]


def test_prime_field_is_modular_arithmetic():
    F = build_field(7, 1)
    r = np.arange(7)
    assert np.array_equal(F.mul, np.outer(r, r) % 7)
    assert np.array_equal(F.add, (r[:, None] + r[None, :]) % 7)


def test_custom_modulus_and_rejections():
    F = build_field(2, 2, modulus=[1, 1, 1])
    assert F.mul.tolist() == GF4_MUL
    with pytest.raises(ReducibleModulus):
        build_field(2, 2, modulus=[1, 0, 1])
    with pytest.raises(NotPrime):
        build_field(4, 1)
    with pytest.raises(UsageError):
        build_field(2, 9)


def test_tables_are_read_only():
    F = build_field(2, 2)
    with pytest.raises(ValueError):
        F.add[0, 0] = 3


def test_gf_arith_dispatch():
    F = build_field(2, 2)
    assert gf_arith(F, "mul", 2, 3) == 1
    assert gf_arith(F, "div", 1, 2) == 3
    assert gf_arith(F, "sub", 2, 3) == 1
    assert gf_arith(F, "inv", 3) == 2
    with pytest.raises(DivisionByZero):
        gf_arith(F, "inv", 0)
    with pytest.raises(ZeroDivisionError):
        gf_arith(F, "div", 1, 0)
    with pytest.raises(UsageError):
        gf_arith(F, "pow", 1, 1)
    with pytest.raises(UsageError):
        gf_arith(F, "add", 4, 0)


@pytest.mark.parametrize("d", sorted(ORDERS))
def test_character_sum_vanishes_off_zero(d, fields):
    F = fields[d]
    for i in range(d):
        total = F.gamma[F.mul[np.arange(d), i]].sum()
        assert abs(total - (d if i == 0 else 0)) < 1e-10


@pytest.mark.parametrize("d", sorted(ORDERS))
def test_character_is_additive(d, fields):
    F = fields[d]
    g = F.gamma
    assert np.abs(g[:, None] * g[None, :] - g[F.add]).max() < 1e-12


@given(st.sampled_from(sorted(ORDERS)), st.data())
@settings(max_examples=60, deadline=None)
def test_half_character_squares_to_character(d, data):
    F = build_field(*ORDERS[d])
    x = data.draw(st.integers(0, d - 1))
    assert abs(char_phase(F, x, half=True) ** 2 - char_phase(F, x)) < 1e-12


@given(st.sampled_from([3, 5, 7, 9]), st.data())
@settings(max_examples=60, deadline=None)
def test_field_laws_random_triples(d, data):
    F = build_field(*ORDERS[d])
    x, y, z = (data.draw(st.integers(0, d - 1)) for _ in range(3))
    assert F.mul[x, F.add[y, z]] == F.add[F.mul[x, y], F.mul[x, z]]
    if y:
        assert F.mul[F.div(x, y), y] == x


@pytest.mark.parametrize("p,R,Q", [(2, 1, 1), (3, 1, 1), (5, 1, 2)])
def test_quadratic_extension(p, R, Q):
    base = build_field(p, 1)
    qx = build_quadratic_extension(base)
    assert (qx.R, qx.Q) == (R, Q)
    E = qx.ext
    assert all(verify_field_axioms(E).values())
    t = qx.pair(0, 1)
    assert E.mul[t, t] == qx.pair(R, Q)
    for a, b in itertools.product(range(p), repeat=2):
        assert qx.split(qx.pair(a, b)) == (a, b)
        # base field embeds as (a, 0)
        assert E.mul[qx.pair(a, 0), qx.pair(b, 0)] == qx.pair(int(base.mul[a, b]), 0)


def test_gf4_extension_reproduces_reference_tables():
    qx = build_quadratic_extension(build_field(2, 1))
    assert qx.ext.mul.tolist() == GF4_MUL
    assert qx.ext.add.tolist() == GF4_ADD


def test_to_json_roundtrip_shape():
    doc = build_field(3, 1).to_json()
    assert doc["add"][2][2] == 1 and doc["mul"][2][2] == 1 and doc["inv"] == [0, 1, 2]
