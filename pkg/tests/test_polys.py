import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from formsums.arith import primes_up_to
from formsums.polys import (
    BinaryForm, RepeatedFactorError, UniPoly, bareiss_det, content_and_primitive, delta_F, disc_form, disc_uni,
    gl2_act, q_value, resultant, shape_decompose, specialize,
)
from gen import forms, polys, random_shape_form

X = sympy.Symbol("x")


def sympy_disc(f: UniPoly) -> int:
    return int(sympy.discriminant(sympy.Poly(list(reversed(f.coeffs)), X)))


def sympy_form_disc(F: BinaryForm) -> int:
    """Oracle: disc F(x,1), corrected by a_1^2 when x2 divides F."""
    a = F.coeffs
    f = F.dehomogenize()
    if a[0] != 0:
        return sympy_disc(f) if F.degree > 1 else 1
    if len(a) > 1 and a[1] != 0:
        return a[1] ** 2 * (sympy_disc(f) if f.degree > 1 else 1)
    return 0


class TestUniPoly:
    def test_parse_and_print(self):
        f = UniPoly.parse("0 -1 0 1")
        assert f.coeffs == (0, -1, 0, 1) and f.degree == 3 and str(f) == "x^3 - x"
        assert UniPoly.parse("1, 0, 1") == UniPoly([1, 0, 1, 0, 0])
        with pytest.raises(ValueError):
            UniPoly.parse("")

    @given(polys(), polys(), st.integers(-20, 20))
    def test_ring_ops_evaluate(self, f, g, x):
        assert (f + g)(x) == f(x) + g(x)
        assert (f - g)(x) == f(x) - g(x)
        assert (f * g)(x) == f(x) * g(x)

    @given(polys(), st.integers(-5, 5).filter(bool), st.integers(-5, 5), st.integers(-9, 9))
    def test_compose_affine(self, f, a, b, x):
        assert f.compose_affine(a, b)(x) == f(a * x + b)


class TestContent:
    @pytest.mark.parametrize("coeffs, c, prim", [
        ([4, 0, 2], 2, [2, 0, 1]),
        ([0, 1, 1], 1, [0, 1, 1]),
        ([0, 10, 0, 6], 2, [0, 5, 0, 3]),
    ])
    def test_examples(self, coeffs, c, prim):
        assert content_and_primitive(UniPoly(coeffs)) == (c, UniPoly(prim))

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            content_and_primitive(UniPoly([]))

    @given(polys())
    def test_product(self, f):
        c, g = content_and_primitive(f)
        assert g.content() == 1 and g * c == f


class TestDiscriminant:
    @pytest.mark.parametrize("coeffs, disc", [([0, 1], 1), ([1, 0, 1], -4), ([1, 2, 1], 0)])
    def test_uni_examples(self, coeffs, disc):
        assert disc_uni(UniPoly(coeffs)) == disc

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            disc_uni(UniPoly([]))

    @given(polys(max_degree=6))
    def test_uni_matches_sympy(self, f):
        assume(f.degree >= 1)
        assert disc_uni(f) == sympy_disc(f)

    @given(polys(max_degree=5))
    def test_formal_degree(self, f):
        assume(f.degree >= 1)
        assert disc_uni(f, f.degree + 1) == f.lc**2 * disc_uni(f)
        assert disc_uni(f, f.degree + 2) == 0

    @pytest.mark.parametrize("coeffs, disc", [([0, 1, 0], 1), ([1, 0, 1], -4), ([0, 1, 0, 0], 0), ([1, 0, 0, 2], -108)])
    def test_form_examples(self, coeffs, disc):
        assert disc_form(BinaryForm(coeffs)) == disc

    @given(forms())
    def test_form_matches_oracle(self, F):
        assert disc_form(F) == sympy_form_disc(F)

    @given(forms(), st.integers(0, 8))
    def test_shift_independent(self, F, t):
        assume(F(1, t) != 0)
        assert disc_form(F, shift=t) == disc_form(F)

    def test_resultant_and_det(self):
        assert resultant(UniPoly([-1, 0, 1]), UniPoly([-2, 1])) == 3
        assert bareiss_det([[2, 0, 1], [1, 3, 2], [1, 1, 1]]) == int(sympy.Matrix([[2, 0, 1], [1, 3, 2], [1, 1, 1]]).det())


class TestGL2:
    def test_examples(self):
        F = BinaryForm([1, 2, 3])
        assert gl2_act(F, ((1, 0), (0, 1))) == F
        assert gl2_act(BinaryForm([0, 1, 0, 0]), ((0, 1), (1, 0))) == BinaryForm([0, 0, 1, 0])
        assert gl2_act(BinaryForm([0, 1, 0]), ((1, 1), (0, 1))) == BinaryForm([0, 1, 1])

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            gl2_act(BinaryForm([1, 0, 1]), ((1, 2), (2, 4)))

    @given(forms(), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5),
           st.integers(-5, 5), st.integers(-5, 5))
    def test_evaluates(self, F, a, b, c, d, x1, x2):
        assume(a * d - b * c)
        assert gl2_act(F, ((a, b), (c, d)))(x1, x2) == F(a * x1 + b * x2, c * x1 + d * x2)

    def test_transformation_law(self):
        rng = random.Random(7)
        done = 0
        while done < 100:
            d = rng.randint(1, 5)
            F = BinaryForm([rng.randint(-5, 5) for _ in range(d + 1)])
            M = [[rng.randint(-5, 5) for _ in range(2)] for _ in range(2)]
            det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
            if F.is_zero() or det == 0:
                continue
            assert disc_form(gl2_act(F, M)) == det ** (d * (d - 1)) * disc_form(F)
            done += 1


class TestShape:
    @pytest.mark.parametrize("coeffs, d1, d2, G", [
        ([0, 1, 1, 0], 1, 1, [1, 1]),
        ([1, 0, 0, 2], 0, 0, [1, 0, 0, 2]),
        ([0, 1, 0, 1], 0, 1, [1, 0, 1]),
    ])
    def test_examples(self, coeffs, d1, d2, G):
        S = shape_decompose(BinaryForm(coeffs))
        assert (S.d1, S.d2, S.G) == (d1, d2, BinaryForm(G))

    def test_repeated_factor(self):
        with pytest.raises(RepeatedFactorError) as exc:
            shape_decompose(BinaryForm([0, 1, 0, 0]))
        assert "x1" in exc.value.witness
        with pytest.raises(RepeatedFactorError) as exc:
            shape_decompose(BinaryForm([1, 2, 1]))
        assert exc.value.witness == "(x1 + x2)^2"

    @given(forms())
    def test_reconstructs(self, F):
        assume(disc_form(F) != 0)
        S = shape_decompose(F)
        G = S.G
        assert G.coeffs[0] != 0 and G.coeffs[-1] != 0 and disc_form(G) != 0
        for x1, x2 in [(2, 3), (-1, 5), (7, -4)]:
            assert x1**S.d1 * x2**S.d2 * G(x1, x2) == F(x1, x2)
        assert S.d_prime == S.d - S.d2 and S.d_doubleprime == S.d - S.d1 - S.d2

    def test_disc_divisibility_clauses(self):
        rng = random.Random(11)
        for _ in range(100):
            F = random_shape_form(rng)
            S = shape_decompose(F)
            a = S.G.coeffs
            D = disc_form(F)
            for p in primes_up_to(13):
                if len(a) > 1 and a[0] % p == 0 and a[1] % p == 0:
                    assert D % p == 0
                if S.d2 == 1 and a[0] % p == 0:
                    assert D % p == 0


class TestDelta:
    @pytest.mark.parametrize("coeffs, value", [([0, 1, 1, 0], 1), ([1, 0, 1], Fraction(3, 2)), ([1, 0, 0, 2], 2)])
    def test_examples(self, coeffs, value):
        assert delta_F(BinaryForm(coeffs)) == value

    def test_zero_disc_rejected(self):
        with pytest.raises(RepeatedFactorError):
            delta_F(BinaryForm([1, 2, 1]))


class TestSpecialize:
    @pytest.mark.parametrize("G, d1, n2, f, q", [
        ([1, 0, 1], 0, 2, [4, 0, 1], 1),
        ([2, 0, 1], 0, 2, [2, 0, 1], 2),
        ([1, 1], 1, 3, [0, 3, 1], 1),
    ])
    def test_examples(self, G, d1, n2, f, q):
        form = BinaryForm(list(G) + [0] * d1)
        S = shape_decompose(form)
        assert specialize(S, n2) == (UniPoly(f), q)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            specialize(shape_decompose(BinaryForm([1, 0, 1])), 0)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 40))
    def test_identity(self, seed, n2):
        S = shape_decompose(random_shape_form(random.Random(seed)))
        f, q = specialize(S, n2)
        assert q == q_value(S.G, n2)
        assert f.content() == 1 and f.degree == S.d_prime
        g = UniPoly(a * n2**j for j, a in reversed(list(enumerate(S.G.coeffs)))).shift_x(S.d1)
        assert f * q == g


class TestFormLiterals:
    def test_parse(self):
        F = BinaryForm.parse("3; 1 0 0 2")
        assert F.coeffs == (1, 0, 0, 2) and F.literal() == "3; 1 0 0 2" and str(F) == "x1^3 + 2*x2^3"
        assert F.norm == 2
        with pytest.raises(ValueError):
            BinaryForm.parse("2; 1 0")
        with pytest.raises(ValueError):
            BinaryForm.parse("1 0 1")
