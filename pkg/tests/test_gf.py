import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from euclidscheme.gf import (
    FieldError,
    field_for_q,
    is_irreducible,
    legendre,
    make_field,
    multiplicative_order,
    odd_prime_powers,
    primitive_generator,
    tables,
    trace,
)

SMALL_Q = odd_prime_powers(121)


def test_modulus_selection():
    assert make_field(3, 2).modulus == (1, 0, 1)
    assert make_field(5, 2).modulus == (2, 0, 1)
    assert make_field(7, 1).modulus == (0, 1)
    for p, ell in [(3, 2), (3, 3), (3, 4), (5, 2), (7, 2), (11, 2)]:
        assert is_irreducible(make_field(p, ell).modulus, p)


@pytest.mark.parametrize("q", [8, 1, 2, 15, 6, 0, -3])
def test_rejects_bad_q(q):
    with pytest.raises(FieldError):
        field_for_q(q)


def test_q_cap():
    with pytest.raises(FieldError):
        make_field(1031, 2, q_max=1 << 20)


@pytest.mark.parametrize("q,gen", [(3, 2), (5, 2), (7, 3)])
def test_primitive_generator_examples(q, gen):
    assert primitive_generator(field_for_q(q)).enc == gen


def test_legendre_examples():
    f7 = field_for_q(7)
    assert legendre(f7(0)) == 0
    assert legendre(f7(2)) == 1
    assert legendre(f7(3)) == -1
    f9 = field_for_q(9)
    assert legendre(-f9.one) == 1
    assert -f9.one in {x * x for x in f9.elements()}


def test_trace_zero_and_prime_field():
    f = field_for_q(7)
    assert trace(f(0)) == 0
    assert [trace(f(x)) for x in range(7)] == list(range(7))


@pytest.mark.parametrize("q", SMALL_Q)
def test_legendre_multiplicative_and_balanced(q):
    f = field_for_q(q)
    t = tables(f)
    units = range(1, q)
    assert sum(1 for x in units if t.leg[x] == 1) == (q - 1) // 2
    for x, y in itertools.product(units, repeat=2):
        assert t.leg[t.mul(x, y)] == t.leg[x] * t.leg[y]
    squares = {int(t.mul(x, x)) for x in units}
    assert all((t.leg[x] == 1) == (x in squares) for x in units)


@pytest.mark.parametrize("q", SMALL_Q)
def test_trace_linear_and_surjective(q):
    f = field_for_q(q)
    t = tables(f)
    assert set(t.trace.tolist()) == set(range(f.p))
    for x, y in itertools.product(range(q), repeat=2):
        assert t.trace[t.add(x, y)] == (t.trace[x] + t.trace[y]) % f.p
    for c in range(f.p):
        assert all(t.trace[t.mul(c, x)] == c * t.trace[x] % f.p for x in range(q))


@pytest.mark.parametrize("q", SMALL_Q)
def test_generator_powers(q):
    f = field_for_q(q)
    theta = primitive_generator(f)
    assert multiplicative_order(theta) == q - 1
    powers = [theta**j for j in range(q - 1)]
    assert len({x.enc for x in powers}) == q - 1
    assert all(legendre(x) == (-1) ** j for j, x in enumerate(powers))


@pytest.mark.parametrize("q", [9, 25, 27, 49, 81, 121])
def test_inverse_euclid_matches_fermat(q):
    f = field_for_q(q)
    for x in list(f.elements())[1:]:
        assert x.inverse() == x ** (q - 2)
        assert x * x.inverse() == f.one


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL_Q), st.data())
def test_field_axioms(q, data):
    f = field_for_q(q)
    a, b, c = (f(data.draw(st.integers(0, q - 1))) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == f.zero
    assert a - b == -(b - a)
    if b.enc:
        assert (a / b) * b == a
    assert legendre(a * a) in (0, 1)


@pytest.mark.parametrize("q", [9, 27, 25])
def test_tables_agree_with_scalar_arithmetic(q):
    f = field_for_q(q)
    t = tables(f)
    for x, y in itertools.product(range(q), repeat=2):
        assert t.add(x, y) == (f(x) + f(y)).enc
        assert t.mul(x, y) == (f(x) * f(y)).enc
        assert t.sub(x, y) == (f(x) - f(y)).enc
