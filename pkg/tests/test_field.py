import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qss.errors import DuplicatePoint, ModulusMismatch, ValueOutOfRange, ZeroInverse
from qss.field import (
    FieldElement,
    Polynomial,
    PrimeModulus,
    eval_poly,
    field_inv,
    interpolate_at_zero,
    is_prime,
    lagrange_coeff,
    shadow,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


def fe(v, d):
    return FieldElement(v % d, PrimeModulus(d))


def poly(coeffs, d):
    return Polynomial(tuple(fe(c, d) for c in coeffs))


def brute_inverse(a, d):
    """Independent oracle: scan all candidates for a*b = 1 mod d."""
    for b in range(1, d):
        if a * b % d == 1:
            return b
    raise AssertionError(f"no inverse of {a} mod {d}")


class TestPrimality:
    def test_small_values(self):
        expected = {p for p in range(100) if p > 1 and all(p % q for q in range(2, p))}
        assert {p for p in range(100) if is_prime(p)} == expected

    def test_rejects_composite_modulus(self):
        with pytest.raises(ValueOutOfRange):
            PrimeModulus(6)
        with pytest.raises(ValueOutOfRange):
            PrimeModulus(1)

    def test_large_prime_accepted(self):
        PrimeModulus((1 << 61) - 1)  # Mersenne prime


class TestFieldElement:
    def test_range_enforced(self):
        with pytest.raises(ValueOutOfRange):
            FieldElement(7, PrimeModulus(7))
        with pytest.raises(ValueOutOfRange):
            FieldElement(-1, PrimeModulus(7))

    def test_mixed_moduli_rejected(self):
        with pytest.raises(ModulusMismatch):
            fe(1, 5) + fe(1, 7)

    def test_inverse_examples(self):
        assert field_inv(fe(1, 7)).value == 1
        assert field_inv(fe(3, 7)).value == brute_inverse(3, 7) == 5
        assert field_inv(fe(4, 5)).value == brute_inverse(4, 5) == 4

    def test_inverse_of_zero(self):
        with pytest.raises(ZeroInverse):
            field_inv(fe(0, 7))

    @given(st.sampled_from(SMALL_PRIMES), st.integers(min_value=1, max_value=1 << 20))
    def test_inverse_involution(self, d, raw):
        a = fe(raw % (d - 1) + 1, d)
        assert field_inv(field_inv(a)) == a
        assert (a * field_inv(a)).value == 1


class TestPolynomial:
    def test_eval_examples(self):
        p = poly([3, 2], 7)  # 3 + 2x
        assert eval_poly(p, fe(1, 7)).value == 5
        assert eval_poly(p, fe(2, 7)).value == 0  # 3 + 4 = 7 = 0 mod 7

    def test_zero_polynomial(self):
        p = poly([0, 0, 0], 11)
        for x in range(1, 11):
            assert eval_poly(p, fe(x, 11)).value == 0

    def test_zero_point_rejected(self):
        with pytest.raises(ValueOutOfRange):
            eval_poly(poly([3, 2], 7), fe(0, 7))

    def test_modulus_mismatch(self):
        with pytest.raises(ModulusMismatch):
            eval_poly(poly([3, 2], 7), fe(1, 5))

    def test_empty_rejected(self):
        with pytest.raises(ValueOutOfRange):
            Polynomial(())


class TestLagrange:
    def test_single_point_weight_is_one(self):
        assert lagrange_coeff(fe(3, 5), [fe(3, 5)]).value == 1

    def test_two_point_examples(self):
        xs = [fe(1, 7), fe(2, 7)]
        # 2 * (2-1)^-1 = 2 and 1 * (1-2)^-1 = 6^-1 = 6
        assert lagrange_coeff(fe(1, 7), xs).value == 2
        assert lagrange_coeff(fe(2, 7), xs).value == 6
        assert 6 * 6 % 7 == 1  # 6 really is the inverse of -1 mod 7

    def test_duplicate_points_rejected(self):
        with pytest.raises(DuplicatePoint):
            lagrange_coeff(fe(1, 7), [fe(1, 7), fe(1, 7)])
        with pytest.raises(DuplicatePoint):
            lagrange_coeff(fe(3, 7), [fe(1, 7), fe(2, 7)])

    def test_weights_sum_to_one(self):
        # Interpolating the constant polynomial 1 must give 1.
        for d in (5, 7, 11):
            for t in range(1, 5):
                for xs_values in itertools.combinations(range(1, d), t):
                    xs = [fe(x, d) for x in xs_values]
                    total = sum(lagrange_coeff(x, xs).value for x in xs) % d
                    assert total == 1


class TestShadow:
    def test_examples(self):
        xs = [fe(1, 7), fe(2, 7)]
        assert shadow(fe(5, 7), fe(1, 7), xs).value == 3  # 5*2 mod 7
        assert shadow(fe(0, 7), fe(2, 7), xs).value == 0
        assert shadow(fe(2, 5), fe(3, 5), [fe(3, 5)]).value == 2

    def test_shadows_sum_to_constant_term(self):
        # f(x) = 3 + 2x over Z_7 at x in {1, 2}: shadows must sum to f(0).
        p = poly([3, 2], 7)
        xs = [fe(1, 7), fe(2, 7)]
        total = sum(shadow(eval_poly(p, x), x, xs).value for x in xs) % 7
        assert total == 3


class TestInterpolation:
    def test_recovers_constant_term(self):
        p = poly([3, 2], 7)
        points = [(x, eval_poly(p, x)) for x in [fe(1, 7), fe(2, 7)]]
        assert interpolate_at_zero(points).value == 3

    def test_single_point(self):
        assert interpolate_at_zero([(fe(4, 11), fe(9, 11))]).value == 9

    def test_exhaustive_small_fields(self):
        # Every polynomial of degree < t over Z_d, every t-subset of points.
        for d in (2, 3, 5):
            for t in (1, 2, 3):
                if t >= d:
                    continue
                for coeffs in itertools.product(range(d), repeat=t):
                    p = poly(list(coeffs), d)
                    for xs_values in itertools.combinations(range(1, d), t):
                        points = [
                            (fe(x, d), eval_poly(p, fe(x, d))) for x in xs_values
                        ]
                        assert interpolate_at_zero(points).value == coeffs[0]

    @settings(max_examples=60)
    @given(
        st.sampled_from([7, 11, 13]),
        st.integers(min_value=1, max_value=4),
        st.randoms(use_true_random=False),
    )
    def test_random_polynomials(self, d, t, rnd):
        coeffs = [rnd.randrange(d) for _ in range(t)]
        p = poly(coeffs, d)
        xs_values = rnd.sample(range(1, d), t)
        points = [(fe(x, d), eval_poly(p, fe(x, d))) for x in xs_values]
        assert interpolate_at_zero(points).value == coeffs[0]

    def test_shadow_sum_equals_interpolation(self):
        # The two reconstruction routes agree on random instances.
        import random

        rnd = random.Random(20240811)
        for _ in range(50):
            d = rnd.choice([5, 7, 11, 13])
            t = rnd.randint(1, 4)
            coeffs = [rnd.randrange(d) for _ in range(t)]
            p = poly(coeffs, d)
            xs = [fe(x, d) for x in rnd.sample(range(1, d), t)]
            points = [(x, eval_poly(p, x)) for x in xs]
            via_shadows = sum(shadow(y, x, xs).value for x, y in points) % d
            assert via_shadows == interpolate_at_zero(points).value == coeffs[0]
