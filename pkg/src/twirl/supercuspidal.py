"""The ramified-induction test function on GL_2(F): subgroup filtration
K > I_0 > I_1 > I_2, the compact support C = O_E^x I_1 {1, pi_E} for
E = F(sqrt(pi)), the level character on I_1, the matrix coefficient psi,
and the cut-off f = psi * 1_C.

pi_E is realized inside M_2(F) as [[0,1],[pi,0]], so pi_E^2 = pi and the
trace entering the level character is F-valued: for g = 1 + [[a,b],[c,d]]
the character value is Lambda_1(b + c/pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cyclotomic import CharacterValue
from .errors import DomainError
from .localfield import INF, Elem, LocalFieldCtx, additive_char
from .matlattice import GroupForm, Mat, a_e, mat_ord, n_b, vdash
from .ringvec import ResidueRing, iter_gl2
from .twisted import TorusElem, is_eps_symmetric, norm_preimage

LEVELS = ("K", "I0", "I1", "I2", "C0", "C")


def pi_e_matrix(ctx: LocalFieldCtx) -> Mat:
    z, o = ctx.zero(), ctx.one()
    return Mat(ctx, [[z, o], [o.shift(1), z]])


def pi_e_inverse_power(ctx: LocalFieldCtx, j: int) -> Mat:
    """pi_E^(-j) exactly; pi_E^2 = pi."""
    half, rem = divmod(j, 2)
    out = Mat.identity(ctx, 2).shift(-half)
    if rem:
        z, o = ctx.zero(), ctx.one()
        out = out * Mat(ctx, [[z, o.shift(-1)], [o, z]])
    return out


def member(g: Mat, level: str) -> bool:
    """Exact congruence membership tests for the subgroup filtration."""
    ctx = g.ctx
    one = ctx.one()
    a, b = g.rows[0]
    c, d = g.rows[1]
    if level == "K":
        return mat_ord(g) >= 0 and g.det().val == 0
    if level == "I0":
        return (mat_ord(g) >= 0 and a.val == 0 and d.val == 0 and c.val >= 1)
    if level == "I1":
        return ((a - one).val >= 1 and b.val >= 0 and c.val >= 1
                and (d - one).val >= 1)
    if level == "I2":
        return ((a - one).val >= 2 and b.val >= 1 and c.val >= 2
                and (d - one).val >= 2)
    if level == "C0":
        for r in range(1, ctx.p):
            s = ctx.from_int(r).inverse()
            if member(g.scale(s), "I1"):
                return True
        return False
    if level == "C":
        return member(g, "C0") or member(pi_e_inverse_power(ctx, 1) * g, "C0")
    raise ValueError(f"unknown level {level!r}")


def level_character(g: Mat) -> CharacterValue:
    """The I_2-invariant character of I_1 given by the trace pairing with
    pi_E^(-1): value Lambda_1(b + c/pi)."""
    if not member(g, "I1"):
        raise DomainError("character argument must lie in I1")
    arg = g.rows[0][1] + g.rows[1][0].shift(-1)
    return additive_char(arg)


@dataclass
class CuspidalData:
    """Inducing data: E = F(sqrt(pi)) embedded via pi_E = [[0,1],[pi,0]],
    inducing compact fixed to I_1, central character trivial.  For p = 2 the
    construction requires 2 in pi^2, i.e. ramification degree >= 2."""

    ctx: LocalFieldCtx

    def __post_init__(self):
        if self.ctx.p == 2 and self.ctx.e < 2:
            raise DomainError("even residue characteristic needs 2 in pi^2")
        self._avg_cache: dict = {}

    @property
    def p(self) -> int:
        return self.ctx.p

    # -- pointwise evaluation -------------------------------------------------

    def psi(self, g: Mat) -> CharacterValue:
        """Matrix coefficient: extension by zero of the character on
        E^x I_1.  Factors g = pi_E^j * (unit lift) * h deterministically;
        the value is independent of the chosen unit lift."""
        ctx = self.ctx
        d = g.det()
        if d.val is INF:
            return CharacterValue.zero(self.p)
        j = d.val
        gp = pi_e_inverse_power(ctx, j) * g
        for r in range(1, ctx.p):
            h = gp.scale(ctx.from_int(r).inverse())
            if member(h, "I1"):
                return level_character(h)
        return CharacterValue.zero(self.p)

    def in_support(self, g: Mat) -> bool:
        d = g.det()
        return d.val in (0, 1) and member(g, "C")

    def f(self, g: Mat) -> CharacterValue:
        """f = psi * 1_C, C = O_E^x I_1 {1, pi_E}."""
        if not self.in_support(g):
            return CharacterValue.zero(self.p)
        return self.psi(g)

    def f_split(self, g: Mat, part: int) -> CharacterValue:
        """f_0 (det valuation 0 piece) or f_1 (valuation 1 piece)."""
        d = g.det()
        if d.val != part:
            return CharacterValue.zero(self.p)
        return self.f(g)

    # -- support and locality metadata used by the integrator -----------------

    detval_support = frozenset((0, 1))

    def value_level(self, parity: int) -> int:
        """f(kappa Y kappa^t) with Y integral depends on kappa mod
        pi^level: 2 on the det-valuation-0 piece, 3 on the other."""
        return 2 + (1 if parity else 0)

    def support_prefilter(self, y: Mat, form: GroupForm) -> str | None:
        """Necessary conditions for some K-twisted conjugate of y to meet
        the support; returns a reason string when the stratum is dead."""
        if mat_ord(y) < 0:
            return "not integral"
        if y.det().val not in self.detval_support:
            return "det valuation outside {0,1}"
        if not is_eps_symmetric(y, form, mod_level=1):
            return "not eps-symmetric mod p"
        return None

    # -- exact averaged evaluation over K --------------------------------------

    def kappa_average(self, y: Mat, form: GroupForm, level: int | None = None
                      ) -> CharacterValue:
        """Exact integral over kappa in GL_2(O) of f(kappa y kappa^t) with
        vol(K) = 1.  The enumeration runs at the locality level of f (the
        integrand is invariant under 1 + pi^level M_2(O) on the right), so
        the finite average equals the Haar integral; passing a larger
        `level` recomputes at that depth, which must give the same value."""
        parity = y.det().val % 2
        level = max(self.value_level(parity), level or 0)
        key = (y.residue_key(level + 1), parity, level)
        got = self._avg_cache.get(key)
        if got is not None:
            return got
        out = self._kappa_average_vec(y, parity, level)
        self._avg_cache[key] = out
        return out

    def _kappa_average_vec(self, y: Mat, parity: int, level: int
                           ) -> CharacterValue:
        ctx = self.ctx
        s = level
        ring = ResidueRing(ctx, max(s, 2))
        y_res = [[ring.from_elem(y.rows[i][j]) for j in range(2)]
                 for i in range(2)]
        p = ctx.p
        counts = np.zeros(p, dtype=np.int64)
        total = 0
        for a, b, c, d in iter_gl2(ctx, level, ring):
            total += a.shape[0]
            cnt = _f_exponent_counts(ring, a, b, c, d, y_res, parity, p)
            counts += cnt
        value = CharacterValue.from_exponent_counts(p, counts.tolist())
        return value.scale(_frac(1, total))

    # -- pointwise evaluation on residue matrices (dual route, for tests) ------

    def f_on_residues(self, x: Mat) -> CharacterValue:
        return self.f(x)


def _frac(a, b):
    from fractions import Fraction

    return Fraction(a, b)


def _f_values(ring: ResidueRing, a, b, c, d, y_res, parity: int):
    """Evaluate f(kappa Y kappa^t) on a chunk of kappa residues.
    Returns (support mask, Lambda exponents mod p on the support)."""
    p = ring.p
    y00, y01 = y_res[0]
    y10, y11 = y_res[1]
    # T = kappa * Y
    t00 = ring.add(ring.mul(a, y00), ring.mul(b, y10))
    t01 = ring.add(ring.mul(a, y01), ring.mul(b, y11))
    t10 = ring.add(ring.mul(c, y00), ring.mul(d, y10))
    t11 = ring.add(ring.mul(c, y01), ring.mul(d, y11))
    # X = T * kappa^t, kappa^t = [[d, b], [c, a]]
    x00 = ring.add(ring.mul(t00, d), ring.mul(t01, c))
    x01 = ring.add(ring.mul(t00, b), ring.mul(t01, a))
    x10 = ring.add(ring.mul(t10, d), ring.mul(t11, c))
    x11 = ring.add(ring.mul(t10, b), ring.mul(t11, a))
    alive = np.ones(x00.shape[0], dtype=bool)
    if parity:
        # X <- pi_E^(-1) X = [[x10/pi, x11/pi], [x00, x01]]
        ok = ring.divisible_by_pi(x10) & ring.divisible_by_pi(x11)
        alive &= ok
        nx00 = ring.div_pi(np.where(ok[..., None], x10, 0))
        nx01 = ring.div_pi(np.where(ok[..., None], x11, 0))
        x00, x01, x10, x11 = nx00, nx01, x00, x01
    exps = np.zeros(x00.shape[0], dtype=np.int64)
    taken = np.zeros(x00.shape[0], dtype=bool)
    for r in range(1, p):
        rinv = ring.scalar(pow(r, -1, ring.pm))
        h00 = ring.mul(rinv, x00)
        h10 = ring.mul(rinv, x10)
        h11 = ring.mul(rinv, x11)
        mask = (
            alive
            & ~taken
            & (ring.residue_mod_p(ring.sub(h00, ring.scalar(1))) == 0)
            & (ring.residue_mod_p(h10) == 0)
            & (ring.residue_mod_p(ring.sub(h11, ring.scalar(1))) == 0)
        )
        if not mask.any():
            continue
        taken |= mask
        h01 = ring.mul(rinv, x01)
        arg = ring.add(h01, ring.div_pi(np.where(mask[..., None], h10, 0)))
        exps = np.where(mask, ring.residue_mod_p(arg), exps)
    return taken, exps


def _f_exponent_counts(ring: ResidueRing, a, b, c, d, y_res, parity: int,
                       p: int) -> np.ndarray:
    mask, exps = _f_values(ring, a, b, c, d, y_res, parity)
    if not mask.any():
        return np.zeros(p, dtype=np.int64)
    return np.bincount(exps[mask], minlength=p)


# -- support scanning ----------------------------------------------------------


@dataclass
class ScanStratum:
    i: int
    b_level: int
    b_digits: tuple
    verdict: str


@dataclass
class ScanReport:
    regime: str
    witness: dict | None
    strata: list
    kappa_level: int

    def found(self) -> bool:
        return self.witness is not None

    def to_json(self):
        return {
            "regime": self.regime,
            "witness": self.witness,
            "strata_searched": [
                {"i": s.i, "b_level": s.b_level, "b": list(s.b_digits),
                 "verdict": s.verdict}
                for s in self.strata
            ],
            "kappa_level": self.kappa_level,
        }


def _classify_regime(ctx: LocalFieldCtx, alpha: Elem) -> str:
    v = alpha.val
    if v != 0:
        return "alpha-noncompact"
    r = alpha.residue()
    if r != 1 % ctx.p and r != (-1) % ctx.p:
        return "alpha-not-pm1-mod-p"
    if ctx.p != 2:
        return "alpha-minus1-mod-p" if r == (-1) % ctx.p else "alpha-plus1-mod-p"
    return "alpha-unit-even"


def support_scan(data: CuspidalData, form: GroupForm, gamma: TorusElem,
                 depth: int = 6, b_window: int = 12) -> ScanReport:
    """Search for g = kappa n_b a_i with f(g S(gamma)^(-1) g^t) != 0.

    The det-valuation parity forces i; integrality bounds the b window;
    eps-symmetry mod p and the other prefilters are kappa-free.  Surviving
    strata are settled by exact enumeration of kappa at the stabilized
    congruence level (that level is <= depth in every supported case, so an
    empty scan is exhaustive over all of K)."""
    ctx = data.ctx
    x = norm_preimage(gamma, form).inverse()
    regime = _classify_regime(ctx, gamma.alpha)
    d = x.det().val
    icands = []
    for target in (0, 1):
        if (target - d) % 2 == 0:
            icands.append((target - d) // 2)
    strata: list[ScanStratum] = []
    witness = None
    kappa_level_used = 0
    trace = x.rows[0][0] + x.rows[1][1]
    for i in icands:
        # hard bound on the b level from integrality of the (0,1) entry
        off_ord = trace.val
        jmax = b_window if off_ord is INF else max(0, i + off_ord)
        jmax = min(jmax, b_window)
        for j in range(0, jmax + 1):
            for digits in _b_digit_tuples(ctx.p, j):
                b = ctx.from_digits(-j, digits) if j else ctx.zero()
                g0 = n_b(ctx, b) * a_e(ctx, i)
                y = g0 * x * vdash(g0, form)
                dead = data.support_prefilter(y, form)
                if dead is not None:
                    strata.append(ScanStratum(i, j, digits, dead))
                    continue
                level = min(depth, data.value_level(y.det().val % 2))
                kappa_level_used = max(kappa_level_used, level)
                kap = _kappa_witness(data, y, level)
                if kap is None:
                    strata.append(ScanStratum(i, j, digits, "kappa scan empty"))
                    continue
                strata.append(ScanStratum(i, j, digits, "witness"))
                gw = kap * g0
                witness = {
                    "i": i,
                    "b_level": j,
                    "b": list(digits),
                    "kappa": kap.to_digit_lists(4),
                    "value": data.f(gw * x * vdash(gw, form)).to_json(),
                }
                break
            if witness:
                break
        if witness:
            break
    if witness is None and regime == "alpha-unit-even":
        regime_out = "even-none"
    elif witness is None:
        regime_out = regime
    else:
        regime_out = regime + "-witness"
    return ScanReport(regime_out, witness, strata, kappa_level_used)


def _b_digit_tuples(p: int, j: int):
    if j == 0:
        return [()]
    out = [(d,) for d in range(1, p)]
    for _ in range(j - 1):
        out = [t + (d,) for t in out for d in range(p)]
    return out


def _kappa_witness(data: CuspidalData, y: Mat, level: int) -> Mat | None:
    """First kappa residue (lexicographic digit order) with
    f(kappa y kappa^t) != 0, or None if the scan is exhaustive-empty."""
    ctx = data.ctx
    ring = ResidueRing(ctx, max(level, 2))
    y_res = [[ring.from_elem(y.rows[i][j]) for j in range(2)] for i in range(2)]
    parity = y.det().val % 2
    for a, b, c, d in iter_gl2(ctx, level, ring):
        mask, _ = _f_values(ring, a, b, c, d, y_res, parity)
        idx = np.flatnonzero(mask)
        if idx.size:
            k = int(idx[0])
            return Mat(ctx, [
                [_lift(ring, a[k]), _lift(ring, b[k])],
                [_lift(ring, c[k]), _lift(ring, d[k])],
            ])
    return None


def _lift(ring: ResidueRing, coeff_vec) -> Elem:
    return Elem(ring.ctx, 0, tuple(int(v) for v in coeff_vec), False)
