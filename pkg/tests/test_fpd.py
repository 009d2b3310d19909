import dataclasses
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formsums.fpd import (
    Leaf, MultiPrimeCertificate, ReductionError, Stage, fixed_prime_divisors, has_fpd, pqr_decompose, reduce_full,
    reduce_once, remove_all_fpd, trivial_certificate, verify_certificate,
)
from formsums.polys import UniPoly, disc_form, disc_uni, shape_decompose, specialize
from gen import random_fpd_poly, random_shape_form

X2X = UniPoly([0, 1, 1])
X3X = UniPoly([0, -1, 0, 1])
X5X = UniPoly([0, -1, 0, 0, 0, 1])
X2P1 = UniPoly([1, 0, 1])


def brute_fpds(f):
    return [p for p in range(2, f.degree + 1) if all(f(n) % p == 0 for n in range(p))
            and all(p % q for q in range(2, p))]


def replace_leaf(cert, i, leaf):
    leaves = list(cert.leaves)
    leaves[i] = leaf
    return MultiPrimeCertificate(cert.f, cert.primes, tuple(leaves))


class TestFixedPrimeDivisors:
    @pytest.mark.parametrize("f, fpds", [(X2X, [2]), (X3X, [2, 3]), (X2P1, [])])
    def test_examples(self, f, fpds):
        assert fixed_prime_divisors(f) == fpds

    def test_non_primitive_rejected(self):
        with pytest.raises(ReductionError):
            fixed_prime_divisors(UniPoly([2, 4]))

    @given(st.lists(st.integers(-30, 30), min_size=2, max_size=7))
    def test_matches_brute(self, coeffs):
        f = UniPoly(coeffs)
        if f.degree < 1 or f.content() != 1:
            return
        assert fixed_prime_divisors(f) == brute_fpds(f)


class TestPQR:
    @pytest.mark.parametrize("f, p, q, r, e", [
        (X2X, 2, [1], [0, 1], 0),
        (X3X, 3, [1], [], 0),
        (X3X, 2, [1, 1], [], 1),
    ])
    def test_examples(self, f, p, q, r, e):
        d = pqr_decompose(f, p)
        assert (d.q, d.r, d.e) == (UniPoly(q), UniPoly(r), e)

    def test_not_an_fpd(self):
        with pytest.raises(ReductionError):
            pqr_decompose(X2P1, 2)

    @given(st.integers(0, 2**32 - 1))
    def test_identity(self, seed):
        f = random_fpd_poly(random.Random(seed))
        for p in fixed_prime_divisors(f):
            d = pqr_decompose(f, p)
            xp = UniPoly([0, -1] + [0] * (p - 2) + [1])
            assert xp * d.q + d.r * p == f
            assert all(0 <= c < p for c in d.q.coeffs) and d.q.lc != 0


class TestReduceOnce:
    @pytest.mark.parametrize("f, p, k, nu, g", [
        (X2X, 2, 0, 0, [0, 1, 2]),
        (X2X, 2, 1, 0, [1, 3, 2]),
        (X3X, 3, 0, 0, [0, -1, 0, 9]),
    ])
    def test_examples(self, f, p, k, nu, g):
        assert reduce_once(f, p, k) == (nu, UniPoly(g))

    def test_bad_digit(self):
        with pytest.raises(ReductionError):
            reduce_once(X2X, 2, 2)

    @given(st.integers(0, 2**32 - 1))
    def test_properties(self, seed):
        f = random_fpd_poly(random.Random(seed))
        for p in fixed_prime_divisors(f):
            e = pqr_decompose(f, p).e
            for k in range(p):
                nu, g = reduce_once(f, p, k)
                assert 0 <= nu <= e
                assert g.content() == 1 and g.degree == f.degree
                assert g * p ** (nu + 1) == f.compose_affine(p, k)
                if has_fpd(g, p):
                    assert pqr_decompose(g, p).e <= e - p + 1


class TestReduceFull:
    def test_x2_plus_x(self):
        c = reduce_full(X2X, 2)
        assert [(b.digits, b.mus, b.result) for b in c.branches] == [
            ((0,), (1,), UniPoly([0, 1, 2])), ((1,), (1,), UniPoly([1, 3, 2]))]

    def test_worked_cubic(self):
        c = reduce_full(X3X, 2)
        assert c.e == 1
        assert [(b.digits, b.delta, b.mus, b.result) for b in c.branches] == [
            ((0,), 0, (1,), UniPoly([0, -1, 0, 4])),
            ((1, 0), 1, (2, 1), UniPoly([0, 1, 6, 8])),
            ((1, 1), 1, (2, 1), UniPoly([3, 13, 18, 8])),
        ]
        for b in c.branches:
            assert sum(b.mus) <= (c.e + 1) ** 2 and b.delta <= c.e
        assert verify_certificate(c.as_multi()).passed

    def test_no_fpd_rejected(self):
        with pytest.raises(ReductionError):
            reduce_full(X2P1, 2)

    def test_zero_disc_rejected(self):
        with pytest.raises(ReductionError):
            reduce_full(UniPoly([0, 0, 1, 1]), 2)

    @given(st.integers(0, 2**32 - 1))
    def test_branch_invariants(self, seed):
        f = random_fpd_poly(random.Random(seed))
        for p in fixed_prime_divisors(f):
            c = reduce_full(f, p)
            digits = [b.digits for b in c.branches]
            assert digits == sorted(digits)
            for b in c.branches:
                shift = sum(k * p**i for i, k in enumerate(b.digits))
                assert b.result * p ** sum(b.mus) == f.compose_affine(p ** (b.delta + 1), shift)
                assert b.result.content() == 1 and not has_fpd(b.result, p)
                assert sum(b.mus) <= (c.e + 1) ** 2 and b.delta <= c.e
            # prefix-free exact cover of the digit tree
            depth = max(len(x) for x in digits)
            assert sum(p ** (depth - len(x)) for x in digits) == p**depth
            for a in digits:
                for b in digits:
                    assert a == b or a[:len(b)] != b


class TestRemoveAll:
    def test_trivial(self):
        cert = remove_all_fpd(X2P1)
        assert cert.primes == () and cert.leaves == (Leaf(1, 0, 1, X2P1, ()),)
        assert verify_certificate(cert).passed
        assert verify_certificate(trivial_certificate(X2P1)).passed

    @pytest.mark.parametrize("f", [X2X, X3X, X5X])
    def test_named(self, f):
        cert = remove_all_fpd(f)
        rep = verify_certificate(cert)
        assert rep.passed, rep.failures
        assert rep.fully_fpd_free
        assert cert.primes == tuple(fixed_prime_divisors(f))
        for lf in cert.leaves:
            assert lf.g.degree == f.degree
            assert fixed_prime_divisors(lf.g) == []

    def test_cubic_composes_with_three(self):
        cert = remove_all_fpd(X3X)
        two = [s for lf in cert.leaves for s in lf.stages if s.p == 2]
        assert {(s.digits, s.mus) for s in two} == {((0,), (1,)), ((1, 0), (2, 1)), ((1, 1), (2, 1))}
        assert all(lf.stages[1].p == 3 for lf in cert.leaves)

    def test_later_primes_survive_earlier_stages(self):
        # x -> p^k x + b permutes residues mod q != p, so q stays an fpd of every leaf
        rng = random.Random(4)
        for _ in range(20):
            f = random_fpd_poly(rng)
            cert = remove_all_fpd(f)
            for lf in cert.leaves:
                assert [s.p for s in lf.stages] == list(cert.primes)
                assert all(s.digits for s in lf.stages)

    def test_empty_stage_accepted_when_prime_absent(self):
        cert = MultiPrimeCertificate(X2P1, (2,), (Leaf(1, 0, 1, X2P1, (Stage(2, (), ()),)),))
        assert verify_certificate(cert).passed

    def test_json_roundtrip(self, tmp_path):
        cert = remove_all_fpd(X5X)
        text = cert.to_json()
        assert json.loads(text)["format"] == "formsums-certificate/1"
        assert MultiPrimeCertificate.from_json(text) == cert
        with pytest.raises(ValueError):
            MultiPrimeCertificate.from_dict({"format": "other"})

    def test_random_suite(self):
        rng = random.Random(99)
        for _ in range(30):
            f = random_fpd_poly(rng)
            rep = verify_certificate(remove_all_fpd(f))
            assert rep.passed, (f, rep.failures)


class TestVerifierCatchesTampering:
    def setup_method(self):
        self.cert = remove_all_fpd(X3X)

    def test_decremented_mu(self):
        lf = self.cert.leaves[1]
        st0 = lf.stages[0]
        bad = dataclasses.replace(lf, stages=(Stage(st0.p, st0.digits, (st0.mus[0] - 1,) + st0.mus[1:]),)
                                  + lf.stages[1:])
        rep = verify_certificate(replace_leaf(self.cert, 1, bad))
        assert not rep.check_passed("identity")

    def test_wrong_g(self):
        lf = self.cert.leaves[0]
        rep = verify_certificate(replace_leaf(self.cert, 0, dataclasses.replace(lf, g=lf.g + UniPoly([1]))))
        assert not rep.check_passed("identity")

    def test_missing_leaf(self):
        cert = MultiPrimeCertificate(self.cert.f, self.cert.primes, self.cert.leaves[1:])
        assert not verify_certificate(cert).check_passed("partition")

    def test_duplicated_leaf(self):
        cert = MultiPrimeCertificate(self.cert.f, self.cert.primes, self.cert.leaves + self.cert.leaves[:1])
        assert not verify_certificate(cert).check_passed("partition")

    def test_skipped_prime(self):
        cert = MultiPrimeCertificate(X3X, (2,), (Leaf(1, 0, 1, X3X, (Stage(2, (), ()),)),))
        rep = verify_certificate(cert)
        assert not rep.check_passed("fpd_free")

    def test_substituting_past_the_fpd(self):
        # x^2 + x loses its fpd after one step; a second level is over budget
        leaves = []
        for b in range(4):
            digits = (b % 2, b // 2)
            h = X2X.compose_affine(2, digits[0]).divexact(2).compose_affine(2, digits[1])
            c = h.content()
            mu2 = 0
            while c % 2 == 0:
                c //= 2
                mu2 += 1
            g = h.divexact(2**mu2)
            leaves.append(Leaf(4, b, 2 ** (1 + mu2), g, (Stage(2, digits, (1, mu2)),)))
        rep = verify_certificate(MultiPrimeCertificate(X2X, (2,), tuple(leaves)))
        assert not rep.check_passed("budget")

    def test_report_record(self):
        rec = verify_certificate(self.cert).as_record()
        assert rec["passed"] and set(rec["checks"]) == {"identity", "partition", "fpd_free", "budget", "discriminant"}


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(1, 20))
def test_specialized_discriminant_relation(seed, n2):
    F = random_shape_form(random.Random(seed))
    S = shape_decompose(F)
    d = S.d
    f, q = specialize(S, n2)
    for lf in remove_all_fpd(f).leaves:
        lhs = disc_uni(lf.g, d) * (lf.gamma * q) ** (2 * (d - 1))
        rhs = lf.alpha ** (d * (d - 1)) * disc_form(F)
        e = (d - 2 * S.d2) * (d - 1)
        if e >= 0:
            assert lhs == rhs * n2**e
        else:
            assert lhs * n2 ** (-e) == rhs
