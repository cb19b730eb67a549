"""Torus volume weight factors: closed form under the split-times-compact
hypothesis, a counting oracle over valuation vectors, and the square-class
weighted sum."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ClubsuitViolated, Singular, WindowOverflow
from .localfield import Elem, INF, LocalFieldCtx, SquareClassSet
from .matlattice import LatticeSpec, Mat, delta_vector, mat_ord


@dataclass(frozen=True)
class WeightQuery:
    """Weight-factor query: vol_T(T cap pi^(-k) g^(-1) L h^(-1)) for the
    torus of split rank `rank` with diagonal split part
    diag(a_1..a_r, 1.., a_r^(-1)..a_1^(-1)) and compact part inside the
    lattice stabilizer."""

    g: Mat
    k: int
    rank: int
    h: Mat | None = None
    lattice: LatticeSpec = field(default_factory=lambda: LatticeSpec(0))
    clubsuit: bool = True


def _keff(q: WeightQuery) -> int:
    # pi^(-k) L = pi^(-(k + i)) M_n(O)
    return q.k + q.lattice.i


def weight_closed(q: WeightQuery) -> int:
    """Closed form: 0 if some Delta_i(g) < -2k, else
    prod_i (Delta_i(g) + 2k + 1).  Requires h = 1 and the split-times-compact
    hypothesis (with general h the closed product is only a lower bound).

    When the split rank is below n/2 the unscaled middle columns must also
    be integral after the pi^k dilation, otherwise the volume is 0; with
    full split rank the condition is vacuous."""
    if q.h is not None:
        raise ClubsuitViolated("closed form requires h = 1")
    if not q.clubsuit:
        raise ClubsuitViolated("torus does not satisfy the split-compact hypothesis")
    k = _keff(q)
    g = q.g
    for j in range(q.rank, g.n - q.rank):
        if min(x.val for x in g.column(j)) < -k:
            return 0
    total = 1
    for d in delta_vector(g, q.rank):
        if d < -2 * k:
            return 0
        total *= d + 2 * k + 1
    return total


def _split_elem(ctx: LocalFieldCtx, n: int, rank: int, js, units=None) -> Mat:
    entries = [ctx.one()] * n
    for i, j in enumerate(js):
        u = ctx.one() if units is None else units[i]
        entries[i] = u.shift(j)
        entries[n - 1 - i] = u.inverse().shift(-j)
    return Mat.diag(ctx, entries)


def _scaled(g: Mat, n: int, rank: int, js) -> Mat:
    """g * diag split element with unit parts 1: exact column shifts."""
    rows = [list(r) for r in g.rows]
    for i, j in enumerate(js):
        for r in range(n):
            rows[r][i] = rows[r][i].shift(j)
            rows[r][n - 1 - i] = rows[r][n - 1 - i].shift(-j)
    return Mat(g.ctx, rows)


def weight_oracle(q: WeightQuery, probe_rng=None) -> int:
    """Count valuation vectors in a window provably containing every
    solution, testing pi^k g t h in L by exact membership.  Normalization:
    vol of the unit-diagonal part is 1 per split coordinate, vol(T_c) = 1.

    The window comes from column valuations (h = 1) or from the norm bound
    via g^(-1), h^(-1); one boundary ring beyond the window is scanned and
    any solution there raises WindowOverflow (it would contradict the
    bound)."""
    g, h, rank = q.g, q.h, q.rank
    ctx = g.ctx
    n = g.n
    k = _keff(q)
    ranges = []
    if h is None:
        for i in range(rank):
            c1 = min(x.val for x in g.column(i))
            c2 = min(x.val for x in g.column(n - 1 - i))
            lo, hi = -k - c1, k + c2
            ranges.append(range(lo - 1, hi + 2))
    else:
        window = k - mat_ord(g.inverse()) - mat_ord(h.inverse())
        if window < 0:
            window = 0
        ranges = [range(-window - 1, window + 2)] * rank
    count = 0
    for js in itertools.product(*ranges):
        x = _scaled(g, n, rank, js)
        if h is not None:
            x = x * h
        if mat_ord(x) >= -k:
            if any(js[i] in (ranges[i][0], ranges[i][-1]) for i in range(rank)):
                raise WindowOverflow(
                    f"solution on the window boundary {js}"
                )
            if probe_rng is not None:
                units = [ctx.random_unit(probe_rng) for _ in range(rank)]
                tp = _split_elem(ctx, n, rank, js, units)
                xp = (g * tp) if h is None else (g * tp * h)
                assert mat_ord(xp) >= -k, "unit part affected lattice membership"
            count += 1
    return count


def torus_cap_volume(ctx: LocalFieldCtx, n: int, rank: int, k: int,
                     lattice: LatticeSpec | None = None) -> int:
    """vol_T(T cap pi^(-k) L); equals (2k+1)^rank for k >= 0 and 0 for
    k < 0 when L = M_n(O)."""
    lat = lattice if lattice is not None else LatticeSpec(0)
    return weight_oracle(WeightQuery(Mat.identity(ctx, n), k, rank, None, lat))


def scaling_block(alpha: Elem, n: int) -> Mat:
    """x_alpha = diag(alpha I_m, I_m) for n = 2m; satisfies
    x_alpha eps(x_alpha)^(-1) = alpha I."""
    if alpha.val is INF:
        raise Singular("alpha must be nonzero")
    ctx = alpha.ctx
    m = n // 2
    return Mat.diag(ctx, [alpha] * m + [ctx.one()] * m)


def _omega_values(scs: SquareClassSet, omega):
    if omega is None:
        return [1] * len(scs.reps)
    vals = list(omega)
    if len(vals) != len(scs.reps) or any(v * v != 1 for v in vals):
        raise ValueError("omega must assign +-1 to every square class")
    return vals


def square_class_weight(g: Mat, h: Mat | None, scs: SquareClassSet, k: int,
                        omega=None, rank: int = 1,
                        lattice: LatticeSpec | None = None,
                        use_oracle: bool = True) -> int:
    """Signed sum over square classes of w_k(g x_alpha^(-1), h).  For
    g in GL_2(O), h = 1, trivial omega this is |O^x/(O^x)^2| times
    (2 Delta_1(g) + 4k + 1) when Delta_1(g) >= -2k."""
    lat = lattice if lattice is not None else LatticeSpec(0)
    vals = _omega_values(scs, omega)
    total = 0
    for w_sign, rep in zip(vals, scs.reps):
        gx = g * scaling_block(rep, g.n).inverse()
        query = WeightQuery(gx, k, rank, h, lat)
        wk = weight_oracle(query) if use_oracle or h is not None else weight_closed(query)
        total += w_sign * wk
    return total


def square_class_weight_from_delta(delta1: int, card_units: int, k: int) -> int:
    """GL_2 fast path for trivial omega and L = M_2(O): the class sum
    collapses to |O^x/(O^x)^2| (2 Delta_1 + 4k + 1), vanishing when
    Delta_1 < -2k."""
    total = 0
    for shift in (0, 1):  # unit classes, pi classes
        d = delta1 - shift
        if d >= -2 * k:
            total += d + 2 * k + 1
    return card_units * total


@dataclass(frozen=True)
class SymbolicWeight:
    """Per-class weights with the formal |alpha|^(-ns) factor recorded as an
    exact exponent of u = q^(-2ns)."""

    terms: tuple  # (class_index, weight, u_exponent: Fraction, sign)

    def at_s_zero(self) -> int:
        return sum(sign * w for _, w, _, sign in self.terms)


def square_class_weight_symbolic(g: Mat, h: Mat | None, scs: SquareClassSet,
                                 k: int, omega=None, rank: int = 1,
                                 lattice: LatticeSpec | None = None
                                 ) -> SymbolicWeight:
    """Like square_class_weight but keeping the per-class power of u:
    |alpha|^(-ns) = u^(-ord(alpha)/2) for each representative alpha."""
    lat = lattice if lattice is not None else LatticeSpec(0)
    vals = _omega_values(scs, omega)
    terms = []
    for idx, (w_sign, rep) in enumerate(zip(vals, scs.reps)):
        gx = g * scaling_block(rep, g.n).inverse()
        wk = weight_oracle(WeightQuery(gx, k, rank, h, lat))
        terms.append((idx, wk, Fraction(-rep.val, 2), w_sign))
    return SymbolicWeight(tuple(terms))
