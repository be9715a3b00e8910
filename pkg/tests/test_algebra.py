import random
from fractions import Fraction as Q

import pytest

import heckepairs as hp
from heckepairs.algebra import (HeckeElement, basis_element, convolve,
                                convolution_power_moment, identity_element,
                                involution, is_self_adjoint, norms,
                                power_moments, structure_constants,
                                structure_constants_csv)
from heckepairs.errors import (LengthUndefinedOnSupport, NotSelfAdjoint,
                               StoreMismatch)
from heckepairs.groups import Aff, get_pair
from heckepairs.lengths import word_length

from conftest import FG_LABELS
from oracles import central_trinomial


def random_element(store, classes, rng, signed=True):
    supp = rng.sample(classes, k=rng.randint(1, min(3, len(classes))))
    lo = -9 if signed else 1
    return HeckeElement(store, {d: Q(rng.randint(lo, 9), rng.randint(1, 4))
                                for d in supp})


def z_delta(store, n):
    pair = store.pair
    return basis_element(store, store.dc(store.lookup(pair.parse(f"zvec {n}"))))


def test_identity_is_two_sided_unit():
    for label in FG_LABELS:
        store = hp.enumerate_ball(get_pair(label), 2)
        classes = store.classes_in_ball(2)
        ident = identity_element(store)
        rng = random.Random(41)
        for _ in range(20):
            f = random_element(store, classes, rng)
            assert convolve(ident, f) == f
            assert convolve(f, ident) == f


def test_s3_basis_product():
    # frozen: T_d * T_d = 2 T_e + T_d for the nontrivial S3 class (also
    # cross-checked against the exhaustive oracle in test_oracle)
    store = hp.enumerate_ball(get_pair("s3-h12"), 3)
    classes = store.classes_in_ball(3)
    assert len(classes) == 2   # a 2-dimensional algebra
    e = store.identity_class()
    d = next(x for x in classes if x != e)
    td = basis_element(store, d)
    assert convolve(td, td) == HeckeElement(store, {e: Q(2), d: Q(1)})


def test_z_group_convolution():
    store = hp.enumerate_ball(get_pair("z:1"), 4)
    assert convolve(z_delta(store, 1), z_delta(store, -1)) == z_delta(store, 0)


def test_basis_norm_squared_is_R():
    for label in ("s3-h12", "bcp:2", "psl2z1p:2"):
        store = hp.enumerate_ball(get_pair(label), 2)
        for d in store.classes_in_ball(2):
            rep = norms(basis_element(store, d))
            assert rep.l2_sq_exact == store.class_R(d)


def test_norm_examples():
    store = hp.enumerate_ball(get_pair("z:1"), 3)
    ident = identity_element(store)
    rep = norms(ident)
    assert rep.l1_exact == 1 and rep.l2_sq_exact == 1
    lw = word_length(store)
    w = norms(ident, lw, 2.0)
    assert w.weighted == pytest.approx(1.0)

    f = z_delta(store, -1) + z_delta(store, 0) + z_delta(store, 1)
    rep = norms(f)
    assert rep.l1_exact == 3
    assert rep.l2_sq_exact == 3
    assert norms(f, lw, 0.0).weighted == pytest.approx(rep.l2)

    missing = HeckeElement(store, {store.dc(store.lookup(
        store.pair.parse("zvec 3"))): Q(1)})
    short = word_length(hp.enumerate_ball(get_pair("z:1"), 1))
    with pytest.raises(LengthUndefinedOnSupport):
        norms(missing, short, 1.0)


def test_s3_norm_from_R():
    store = hp.enumerate_ball(get_pair("s3-h12"), 3)
    classes = store.classes_in_ball(3)
    d = next(x for x in classes if x != store.identity_class())
    assert norms(basis_element(store, d)).l2_sq_exact == 2


def test_involution_examples():
    store = hp.enumerate_ball(get_pair("bcp:2"), 2)
    pair = store.pair
    d = store.dc(store.lookup(Aff(Q(0), Q(2))))
    d_inv = store.dc(store.lookup(Aff(Q(0), Q(1, 2))))
    td = basis_element(store, d)
    assert involution(td) == HeckeElement(store, {d_inv: Q(1, 2)})
    assert store.class_delta(d) == Q(1, 2)
    ident = identity_element(store)
    assert involution(ident) == ident


@pytest.mark.parametrize("label", FG_LABELS)
def test_involution_is_involutive_and_antimultiplicative(label):
    store = hp.enumerate_ball(get_pair(label), 2)
    classes = store.classes_in_ball(2)
    rng = random.Random(59)
    for _ in range(25):
        f = random_element(store, classes, rng)
        g = random_element(store, classes, rng)
        assert involution(involution(f)) == f
        assert involution(convolve(f, g)) == convolve(involution(g),
                                                      involution(f))


@pytest.mark.parametrize("label", ["z:1", "z:2", "dinf", "s3-h12", "bcp:2"])
def test_associativity_randomized(label):
    store = hp.enumerate_ball(get_pair(label), 3)
    classes = store.classes_in_ball(3)
    rng = random.Random(61)
    for _ in range(50):
        f, g, h = (random_element(store, classes, rng) for _ in range(3))
        assert convolve(convolve(f, g), h) == convolve(f, convolve(g, h))


def test_moments_against_polynomial_oracle(z1_store):
    # oracle: a_n = central coefficient of (x^{-1} + 1 + x)^{2n}
    f = (z_delta(z1_store, -1) + z_delta(z1_store, 0) + z_delta(z1_store, 1))
    want = [central_trinomial(2 * n) for n in range(1, 7)]
    assert want[:2] == [3, 19]
    got = power_moments(f, 6)
    assert got == want
    assert convolution_power_moment(f, 2) == 19


def test_moments_need_self_adjoint(z1_store):
    with pytest.raises(NotSelfAdjoint):
        power_moments(z_delta(z1_store, 1), 2)
    assert is_self_adjoint(z_delta(z1_store, 1) + z_delta(z1_store, -1))


def test_moment_nonnegative_and_identity():
    store = hp.enumerate_ball(get_pair("s3-h12"), 3)
    ident = identity_element(store)
    assert power_moments(ident, 5) == [Q(1)] * 5


def test_rho_monotone():
    for label in ("z:1", "dinf", "s3-h12"):
        store = hp.enumerate_ball(get_pair(label), 2)
        classes = store.classes_in_ball(1)
        f = HeckeElement(store, {d: Q(1) for d in classes})
        f = Q(1, 2) * (f + involution(f))
        moments = power_moments(f, 8)
        rho = [float(a) ** (1 / (2 * n))
               for n, a in enumerate(moments, start=1)]
        for a, b in zip(rho, rho[1:]):
            assert b >= a - 1e-12


def test_store_mismatch():
    s1 = hp.enumerate_ball(get_pair("z:1"), 2)
    s2 = hp.enumerate_ball(get_pair("z:1"), 2)
    with pytest.raises(StoreMismatch):
        convolve(identity_element(s1), identity_element(s2))


def test_element_arithmetic_and_text():
    store = hp.enumerate_ball(get_pair("z:1"), 3)
    f = Q(2, 3) * z_delta(store, 1) + z_delta(store, -1)
    g = HeckeElement.from_text(store, f.to_text())
    assert g == f
    assert (f - f) == HeckeElement(store, {})
    assert not (f - f)


def test_structure_constants_cached_and_csv():
    store = hp.enumerate_ball(get_pair("s3-h12"), 3)
    ds = store.classes_in_ball(3)
    a = structure_constants(store, ds[1], ds[1])
    assert store.sc_cache[(ds[1], ds[1])] is a
    csv_text = structure_constants_csv(store, ds)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "d1,d2,d,coeff"
    assert f"{ds[1]},{ds[1]},{ds[0]},2" in lines
    assert f"{ds[1]},{ds[1]},{ds[1]},1" in lines


def test_convolution_power_support_growth_is_linear(z1_store):
    f = z_delta(z1_store, 1) + z_delta(z1_store, -1)
    g = f
    for n in range(2, 6):
        g = convolve(g, f)
        reps = sorted(z1_store.reps[z1_store.dcs[d].rep_cid].coords[0]
                      for d in g.coeffs)
        assert max(reps) == n and min(reps) == -n


def test_l2_at_most_l1_sanity():
    # counting measure with mass >= 1 per coset: sum a^2 <= (sum |a|)^2
    rng = random.Random(83)
    for label in ("z:2", "bcp:2", "psl2z1p:2"):
        store = hp.enumerate_ball(get_pair(label), 2)
        classes = store.classes_in_ball(2)
        for _ in range(20):
            f = random_element(store, classes, rng)
            rep = norms(f)
            assert rep.l2_sq_exact <= rep.l1_exact * rep.l1_exact


def test_hecke_element_json_round_trip():
    store = hp.enumerate_ball(get_pair("z:1"), 3)
    f = Q(2, 3) * z_delta(store, 1) + Q(-5, 7) * z_delta(store, -1)
    assert HeckeElement.from_json(store, f.to_json()) == f
    assert f.to_json() == {str(d): str(c) for d, c in f.coeffs.items()}
