import itertools
import random
from fractions import Fraction

import pytest

from twirl import (
    CuspidalData,
    DomainError,
    Mat,
    TorusElem,
    level_character,
    make_field,
    member,
    norm_preimage,
    orthogonal_form,
    parse_elem,
    support_scan,
    vdash,
)
from twirl.cyclotomic import CharacterValue
from twirl.supercuspidal import pi_e_matrix, pi_e_inverse_power


def ctx5():
    return make_field(5, 1, (-5, 1), 18)


def ctx2():
    return make_field(2, 2, (-2, 0, 1), 24)


def rand_i1(c, rng):
    return Mat(c, [[c.one() + c.random_elem(rng, 1, 4), c.random_elem(rng, 0, 3)],
                   [c.random_elem(rng, 1, 4), c.one() + c.random_elem(rng, 1, 4)]])


def test_pi_e_square():
    c = ctx2()
    pe = pi_e_matrix(c)
    assert pe * pe == Mat.identity(c, 2).shift(1)
    assert (pi_e_inverse_power(c, 2) * pe * pe) == Mat.identity(c, 2)


def test_member_filtration():
    c = ctx2()
    one = Mat.identity(c, 2)
    for lv in ("I2", "I1", "I0", "K", "C0", "C"):
        assert member(one, lv)
    m = Mat.from_ints(c, [[1, 1], [0, 1]])
    assert member(m, "I1") and not member(m, "I2")
    rng = random.Random(0)
    for _ in range(60):
        h = rand_i1(c, rng)
        assert member(h, "I1") and member(h, "I0") and member(h, "K")
        # O_E^x times I_1 stays in C0
        a = c.random_unit(rng)
        b = c.random_elem(rng, 0, 3)
        u = Mat(c, [[a, b], [b.shift(1), a]])  # a + b pi_E
        assert member(u * h, "C0")


def test_data_requires_deep_two():
    with pytest.raises(DomainError):
        CuspidalData(make_field(2, 1, (-2, 1), 14))
    CuspidalData(ctx5())  # odd p fine with e = 1


def test_level_character_values():
    c = ctx2()
    m = Mat.from_ints(c, [[1, 1], [0, 1]])
    assert level_character(m) == CharacterValue.rational(2, Fraction(-1))
    iota = Mat(c, [[c.one() + c.pi(2), c.pi(1)], [c.pi(2), c.one() + c.pi(3)]])
    assert member(iota, "I2")
    assert level_character(iota) == CharacterValue.one(2)
    with pytest.raises(DomainError):
        level_character(Mat.diag(c, [c.pi(1), c.one()]))


@pytest.mark.parametrize("mk", [ctx2, ctx5])
def test_level_character_is_character(mk):
    c = mk()
    rng = random.Random(1)
    one = CharacterValue.one(c.p)
    for _ in range(200):
        g1, g2 = rand_i1(c, rng), rand_i1(c, rng)
        assert level_character(g1 * g2) == level_character(g1) * level_character(g2)
    if c.p == 2:
        for _ in range(50):
            lam = level_character(rand_i1(c, rng))
            assert lam * lam == one


@pytest.mark.parametrize("mk", [ctx2, ctx5])
def test_psi_factorization_independence(mk):
    """psi(gamma h) = lambda(h), independent of the chosen unit lift."""
    c = mk()
    data = CuspidalData(c)
    rng = random.Random(2)
    pe = pi_e_matrix(c)
    for _ in range(60):
        h = rand_i1(c, rng)
        u = c.random_unit(rng)
        g = Mat.diag(c, [u, u]) * h
        assert data.psi(g) == level_character(h)
        # the same coset entered through pi_E and a central shift
        z = c.random_unit(rng).shift(2 * rng.randrange(-1, 2))
        g2 = (pe * g).scale(z)
        v = data.psi(g2)
        assert not v.is_zero()
        assert data.psi(g2.scale(c.random_unit(rng))) == v


def test_psi_outside_support():
    c = ctx2()
    data = CuspidalData(c)
    assert data.psi(Mat.diag(c, [c.pi(2), c.one()])).is_zero()
    assert data.f(Mat.diag(c, [c.pi(2), c.one()])).is_zero()
    assert data.f(Mat.identity(c, 2)) == CharacterValue.one(2)
    # pi C and C are disjoint by determinant valuation
    assert data.f(Mat.identity(c, 2).shift(1)).is_zero()


@pytest.mark.parametrize("mk", [ctx2, ctx5])
def test_central_reconstruction(mk):
    """Sum over central classes of f(zg) recovers psi(g)."""
    c = mk()
    data = CuspidalData(c)
    rng = random.Random(3)
    pe = pi_e_matrix(c)
    depth = 3

    def central_sum(g):
        jd = g.det().val
        total = CharacterValue.zero(c.p)
        tuples = [t for t in itertools.product(range(c.p), repeat=depth)
                  if t[0] != 0]
        for k in range(-3, 4):
            if (jd + 2 * k) not in (0, 1):
                continue
            acc = CharacterValue.zero(c.p)
            for t in tuples:
                u = c.from_digits(0, t)
                acc = acc + data.f(g.scale(u.shift(k)))
            total = total + acc.scale(Fraction(1, len(tuples)))
        return total

    for _ in range(15):
        h = rand_i1(c, rng)
        u = c.random_unit(rng)
        g = (pe if rng.random() < 0.5 else Mat.identity(c, 2)) * Mat.diag(
            c, [u, u]) * h
        g = g.scale(c.random_unit(rng).shift(rng.randrange(-2, 3)))
        assert central_sum(g) == data.psi(g)


def test_kappa_average_matches_bruteforce():
    c = ctx2()
    data = CuspidalData(c)
    form = orthogonal_form(c, 2)
    alpha = c.one() + c.pi(2)
    x = norm_preimage(TorusElem(alpha), form).inverse()
    from twirl.matlattice import a_e, n_b

    def brute(y, level):
        tuples = list(itertools.product(range(2), repeat=level))
        total = CharacterValue.zero(2)
        cnt = 0
        for da in tuples:
            for db in tuples:
                for dc in tuples:
                    for dd in tuples:
                        kap = Mat(c, [
                            [c.from_digits(0, da), c.from_digits(0, db)],
                            [c.from_digits(0, dc), c.from_digits(0, dd)],
                        ])
                        if kap.det().val != 0:
                            continue
                        total = total + data.f(kap * y * vdash(kap, form))
                        cnt += 1
        return total.scale(Fraction(1, cnt))

    # level 2 is the locality level, so the finite average already equals
    # the Haar integral; the pure-element route here is independent of the
    # vectorized enumeration
    for j, digits in [(0, ()), (1, (1,)), (2, (1, 0))]:
        b = c.from_digits(-j, digits) if j else c.zero()
        g0 = n_b(c, b) * a_e(c, 2)
        y = g0 * x * vdash(g0, form)
        assert data.kappa_average(y, form) == brute(y, 2)


def test_kappa_average_level_stability():
    """Averaging one or two congruence levels deeper gives the same exact
    value (the integrand is right-invariant at the locality level)."""
    c = ctx2()
    data = CuspidalData(c)
    form = orthogonal_form(c, 2)
    alpha = c.one() + c.pi(2)
    y = norm_preimage(TorusElem(alpha), form).inverse().shift(2)
    v2 = data.kappa_average(y, form)
    assert v2 == data._kappa_average_vec(y, 0, 3)
    assert v2 == data._kappa_average_vec(y, 0, 4)


def test_kappa_average_conjugation_invariance():
    c = ctx2()
    data = CuspidalData(c)
    form = orthogonal_form(c, 2)
    rng = random.Random(4)
    alpha = c.one() + c.pi(3)
    y = norm_preimage(TorusElem(alpha), form).inverse().shift(3)
    for _ in range(5):
        kap = Mat.random_integral(c, 2, rng, unit_det=True)
        y2 = kap * y * vdash(kap, form)
        assert data.kappa_average(y, form) == data.kappa_average(y2, form)


def test_kappa_congruence_sharpness():
    """kappa kappa^t = det kappa mod I_2 needs 2 in pi^2."""
    c2 = ctx2()
    form2 = orthogonal_form(c2, 2)
    rng = random.Random(5)
    for _ in range(100):
        kap = Mat.random_integral(c2, 2, rng, unit_det=True)
        t = (kap * vdash(kap, form2)).scale(kap.det().inverse())
        assert member(t, "I2")
    c1 = make_field(2, 1, (-2, 1), 14)
    form1 = orthogonal_form(c1, 2)
    witness = Mat.from_ints(c1, [[1, 0], [1, 1]])
    t = (witness * vdash(witness, form1)).scale(witness.det().inverse())
    assert not member(t, "I2")


def test_support_scan_regimes():
    c5 = ctx5()
    d5 = CuspidalData(c5)
    f5 = orthogonal_form(c5, 2)
    for spec in ("pi", "pi^2", "pi^-1", "2", "1+pi"):
        rep = support_scan(d5, f5, TorusElem(parse_elem(c5, spec)), depth=6)
        assert not rep.found(), spec
    rep = support_scan(d5, f5, TorusElem(parse_elem(c5, "-1+pi")), depth=6)
    assert rep.found()
    c2 = ctx2()
    rep2 = support_scan(CuspidalData(c2), orthogonal_form(c2, 2),
                        TorusElem(parse_elem(c2, "1+pi^2")), depth=6)
    assert rep2.found()
    assert rep2.witness["i"] == 2
    j = rep2.to_json()
    assert j["regime"].endswith("witness")


def test_support_scan_randomized_regimes():
    """The three vanishing regimes hold across >= 50 random gamma each."""
    c = ctx5()
    d = CuspidalData(c)
    form = orthogonal_form(c, 2)
    rng = random.Random(9)
    # noncompact alpha
    for _ in range(50):
        v = rng.choice([-2, -1, 1, 2])
        alpha = c.random_unit(rng).shift(v)
        assert not support_scan(d, form, TorusElem(alpha), depth=6).found()
    # unit alpha away from +-1 mod p
    done = 0
    while done < 50:
        alpha = c.random_unit(rng)
        if alpha.residue() in (1, 4):
            continue
        assert not support_scan(d, form, TorusElem(alpha), depth=6).found()
        done += 1
    # odd residue characteristic with alpha = 1 mod p
    for _ in range(50):
        e = rng.randrange(1, 5)
        alpha = c.one() + c.random_unit(rng).shift(e)
        assert not support_scan(d, form, TorusElem(alpha), depth=6).found()
