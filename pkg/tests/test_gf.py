import numpy as np
import pytest

from codefam.gf import (FieldSpec, FieldElement, make_field, parse_field_tag,
                        smallest_irreducible, NotPrime, OrderTooLarge,
                        DivisionByZero, FieldError)


def test_prime_field_matches_int_mod_p():
    f = make_field(7, 1)
    for a in range(7):
        for b in range(7):
            assert f.add(a, b) == (a + b) % 7
            assert f.sub(a, b) == (a - b) % 7
            assert f.mul(a, b) == (a * b) % 7
    for a in range(1, 7):
        assert f.mul(a, f.inv(a)) == 1


def test_smallest_irreducible_known_values():
    assert smallest_irreducible(2, 1) == (0, 1)
    assert smallest_irreducible(2, 2) == (1, 1, 1)          # x^2 + x + 1
    assert smallest_irreducible(2, 3) == (1, 0, 1, 1)       # x^3 + x^2 + 1
    assert smallest_irreducible(3, 2) == (1, 0, 1)          # x^2 + 1


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (5, 1), (2, 4)])
def test_field_axioms_exhaustive(p, m):
    f = make_field(p, m)
    q = f.q
    els = list(range(q))
    for a in els:
        assert f.add(a, 0) == a
        assert f.mul(a, 1) == a
        assert f.mul(a, 0) == 0
        assert f.sub(a, a) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
    # associativity and distributivity on all triples
    for a in els:
        for b in els:
            ab = f.mul(a, b)
            assert ab == f.mul(b, a)
            assert f.add(a, b) == f.add(b, a)
            for c in els:
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
                assert f.mul(a, f.add(b, c)) == f.add(ab, f.mul(a, c))


def test_generator_has_full_order():
    f = make_field(2, 4)
    seen = set()
    acc = 1
    for _ in range(f.q - 1):
        seen.add(acc)
        acc = f.mul(acc, f.generator)
    assert seen == set(range(1, f.q))


def test_frobenius_is_additive():
    f = make_field(3, 2)
    for a in range(f.q):
        for b in range(f.q):
            lhs = f.pow(f.add(a, b), 3)
            rhs = f.add(f.pow(a, 3), f.pow(b, 3))
            assert lhs == rhs


def test_vectorized_ops_match_scalar():
    f = make_field(2, 3)
    a = np.arange(f.q, dtype=np.int64)
    b = np.arange(f.q, dtype=np.int64)[::-1].copy()
    add = f.add(a, b)
    mul = f.mul(a, b)
    for i in range(f.q):
        assert int(add[i]) == f.add(int(a[i]), int(b[i]))
        assert int(mul[i]) == f.mul(int(a[i]), int(b[i]))


def test_digits_roundtrip():
    f = make_field(3, 3)
    v = np.arange(f.q, dtype=np.int64)
    d = f.to_digits(v)
    assert d.shape == (f.q, 3)
    back = f.from_digits(d)
    assert np.array_equal(back, v)


def test_tag_roundtrip():
    f = make_field(2, 4)
    g = parse_field_tag(f.tag().split())
    assert g == f


def test_pow_edge_cases():
    f = make_field(5, 1)
    assert f.pow(0, 0) == 1
    assert f.pow(0, 3) == 0
    assert f.pow(2, 0) == 1
    with pytest.raises(DivisionByZero):
        f.pow(0, -1)
    with pytest.raises(DivisionByZero):
        f.inv(0)


def test_errors():
    with pytest.raises(NotPrime):
        FieldSpec(4, 1)
    with pytest.raises(OrderTooLarge):
        FieldSpec(2, 17)
    with pytest.raises(FieldError):
        FieldSpec(2, 2, (1, 0, 1))  # x^2 + 1 reducible over GF(2)


def test_field_element_operators():
    f = make_field(2, 2)
    a = f.element(2)
    b = f.element(3)
    assert (a + b).value == f.add(2, 3)
    assert (a * b).value == f.mul(2, 3)
    assert (a ** 3).value == f.pow(2, 3)
    assert (a.inverse() * a).value == 1
    with pytest.raises(FieldError):
        FieldElement(f, 7)


def test_make_field_cached():
    assert make_field(2, 3) is make_field(2, 3)
