"""Norm correspondence, twisted conjugation, twisted centralizers, and the
twisted and ordinary discriminants."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotRegular, PrecisionExhausted, Singular, SingularGammaMinusOne
from .localfield import INF, Elem, LocalFieldCtx
from .matlattice import GroupForm, Mat, mat_ord, nu, vdash


@dataclass(frozen=True)
class TorusElem:
    """gamma = diag(alpha, alpha^(-1)) in the split torus of H;
    regular means alpha is not +-1."""

    alpha: Elem

    @property
    def ctx(self) -> LocalFieldCtx:
        return self.alpha.ctx

    @property
    def regular(self) -> bool:
        one = self.ctx.one()
        return not (self.alpha == one or self.alpha == -one)

    def matrix(self) -> Mat:
        return Mat.diag(self.ctx, [self.alpha, self.alpha.inverse()])

    def __repr__(self):
        return f"TorusElem(alpha={self.alpha})"


def norm_preimage(gamma: TorusElem, form: GroupForm) -> Mat:
    """S(gamma) = w J^(-1) (gamma - 1), the preimage of the class of gamma
    under the norm correspondence.  For the split orthogonal 2x2 form this
    is diag(alpha - 1, alpha^(-1) - 1)."""
    ctx = gamma.ctx
    gm = gamma.matrix() - Mat.identity(ctx, form.n)
    if gm.det().val is INF:
        raise SingularGammaMinusOne("gamma - 1 is singular")
    return form.w * form.J.inverse() * gm


def twisted_conj(g: Mat, delta: Mat, form: GroupForm) -> Mat:
    """The twisted action g . delta = g delta g^vdash."""
    return g * delta * vdash(g, form)


def nu_of_norm_check(gamma: TorusElem, form: GroupForm) -> bool:
    """nu(S(gamma)) = -gamma, exactly."""
    s = norm_preimage(gamma, form)
    return nu(s, form) == -gamma.matrix()


def is_eps_symmetric(x: Mat, form: GroupForm, mod_level: int | None = None) -> bool:
    """X^vdash = X, exactly or modulo pi^mod_level.  The mod test works on
    raw representatives (entrywise divisibility), so it never needs to
    normalize a difference that is exactly zero."""
    d = vdash(x, form) - x
    if mod_level is None:
        return d == Mat.zero(x.ctx, x.n)
    return all(e.divisible_by(mod_level) for r in d.rows for e in r)


# -- characteristic polynomial (division-free Berkowitz) -----------------------


def charpoly(a, ctx: LocalFieldCtx):
    """Coefficients of det(t*I - A), lowest degree first, over the exact
    element ring.  Division-free, so valid at p = 2 as well."""
    n = len(a)
    one, zero = ctx.one(), ctx.zero()
    # vector of charpoly coefficients of the leading 1x1 minor, highest first
    poly = [one, -a[0][0]]
    for r in range(1, n):
        row = a[r][:r]
        col = [a[i][r] for i in range(r)]
        arr = a[r][r]
        # q = (1, -a_rr, -(row.col), -(row.M.col), ...), M the leading minor
        q = [one, -arr]
        cur = col
        for _ in range(r):
            q.append(-sum((row[i] * cur[i] for i in range(r)), zero))
            cur = [sum((a[i][j] * cur[j] for j in range(r)), zero)
                   for i in range(r)]
        # lower-triangular Toeplitz multiply: new[i] = sum_j q[i-j] poly[j]
        new = []
        for i in range(r + 2):
            s = zero
            for j in range(max(0, i - r - 1), min(i, r) + 1):
                if 0 <= i - j < len(q):
                    s = s + q[i - j] * poly[j]
            new.append(s)
        poly = new
    poly.reverse()
    return poly


def _twist_operator(delta: Mat, form: GroupForm):
    """Matrix of X -> -delta X^vdash delta^(-1) - X on the n^2-dimensional
    space of matrices, in the matrix-unit basis (row-major)."""
    ctx = delta.ctx
    n = delta.n
    dinv = delta.inverse()
    cols = []
    for k in range(n):
        for l in range(n):
            eb = Mat.zero(ctx, n)
            eb.rows[k][l] = ctx.one()
            img = -(delta * vdash(eb, form) * dinv) - eb
            cols.append([img.rows[i][j] for i in range(n) for j in range(n)])
    m = n * n
    return [[cols[c][r] for c in range(m)] for r in range(m)]


@dataclass(frozen=True)
class DiscriminantReport:
    """|value| = q^(-ord_value); kernel_dim counts trailing-zero charpoly
    coefficients (the dimension of the centralizer Lie algebra)."""

    ord_value: int
    kernel_dim: int
    charpoly_lowterm: Elem
    regular: bool

    @property
    def phi(self) -> int:
        """log_q max(1, |value|^(-1)) = max(0, ord_value)."""
        return max(0, self.ord_value)

    def to_json(self):
        from fractions import Fraction

        return {
            "abs_value_q_exponent": str(Fraction(-self.ord_value)),
            "kernel_dim": self.kernel_dim,
            "regular": self.regular,
        }


def _trailing_zeros(coeffs, cutoff: int):
    """Number of leading (low-degree) coefficients that vanish at working
    precision, and the first surviving coefficient."""
    for i, c in enumerate(coeffs):
        try:
            v = c.val
        except PrecisionExhausted:
            continue
        if v is not INF and v < cutoff:
            return i, c
    raise NotRegular("all characteristic coefficients vanish at precision")


def twisted_discriminant(delta: Mat, form: GroupForm,
                         expected_dim: int | None = None) -> DiscriminantReport:
    """det(Ad(delta) o d_eps - 1) on the quotient of the full matrix algebra
    by the twisted-centralizer Lie algebra, computed as the lowest nonzero
    characteristic-polynomial coefficient of the defining operator."""
    ctx = delta.ctx
    op = _twist_operator(delta, form)
    coeffs = charpoly(op, ctx)
    cutoff = ctx.precision - 2 * ctx.e
    r, low = _trailing_zeros(coeffs, cutoff)
    expected = expected_dim if expected_dim is not None else delta.n // 2
    return DiscriminantReport(
        ord_value=low.val,
        kernel_dim=r,
        charpoly_lowterm=low,
        regular=(r == expected),
    )


def twisted_discriminant_oracle(delta: Mat, form: GroupForm) -> DiscriminantReport:
    """Independent route: compute the kernel of the operator, complete a
    saturated kernel basis to a lattice basis, and take the determinant of
    the induced map on the quotient."""
    ctx = delta.ctx
    op = _twist_operator(delta, form)
    m = len(op)
    cutoff = ctx.precision - 2 * ctx.e

    def vec_ord(v):
        w = INF
        for x in v:
            try:
                xv = x.val
            except PrecisionExhausted:
                continue
            if xv < w:
                w = xv
        return w

    # kernel via row reduction with minimal-valuation pivoting
    rows = [list(r) for r in op]
    pivots = []  # (row, col)
    used_rows: set[int] = set()
    for _ in range(m):
        best = None
        bv = INF
        for i in range(m):
            if i in used_rows:
                continue
            for j in range(m):
                if any(pc == j for _, pc in pivots):
                    continue
                v = rows[i][j].val
                if v < bv:
                    best, bv = (i, j), v
        if best is None or bv is INF or bv >= cutoff:
            break
        i0, j0 = best
        used_rows.add(i0)
        pivots.append((i0, j0))
        pinv = rows[i0][j0].inverse()
        rows[i0] = [pinv * x for x in rows[i0]]
        for i in range(m):
            if i == i0:
                continue
            f = rows[i][j0]
            if not f.is_zero():
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[i0])]
    rank = len(pivots)
    free_cols = [j for j in range(m) if all(pc != j for _, pc in pivots)]
    kernel = []
    for j in free_cols:
        v = [ctx.zero()] * m
        v[j] = ctx.one()
        for i0, j0 in pivots:
            v[j0] = -rows[i0][j]
        w = vec_ord(v)
        kernel.append([x.shift(-w) if not x.is_zero() else x for x in v])

    # complete the saturated kernel basis to a lattice basis: column-reduce
    # to unit pivots in distinct coordinate rows
    kcols = [list(v) for v in kernel]
    kpivots = []
    for c in range(len(kcols)):
        best, bv = None, INF
        for i in range(m):
            if any(i == r0 for r0, _ in kpivots):
                continue
            v = kcols[c][i].val
            if v < bv:
                best, bv = i, v
        if bv != 0:
            # rescale so the pivot is a unit (saturation)
            kcols[c] = [x.shift(-bv) for x in kcols[c]]
        i0 = best
        pinv = kcols[c][i0].inverse()
        kcols[c] = [pinv * x for x in kcols[c]]
        for c2 in range(len(kcols)):
            if c2 == c:
                continue
            f = kcols[c2][i0]
            if not f.is_zero():
                kcols[c2] = [x - f * y for x, y in zip(kcols[c2], kcols[c])]
        kpivots.append((i0, c))
    pivot_rows = [r0 for r0, _ in kpivots]
    comp_rows = [i for i in range(m) if i not in pivot_rows]

    def project(v):
        """Reduce v modulo the kernel columns; return complement coords."""
        v = list(v)
        for r0, c in kpivots:
            f = v[r0]
            if not f.is_zero():
                v = [x - f * y for x, y in zip(v, kcols[c])]
        return [v[i] for i in comp_rows]

    amat = []
    for i in comp_rows:
        image = [op[r][i] for r in range(m)]
        amat.append(project(image))
    # columns of the induced map, indexed by complement basis
    qn = len(comp_rows)
    qmat = Mat(ctx, [[amat[c][r] for c in range(qn)] for r in range(qn)])
    det = qmat.det()
    sign = (-1) ** qn
    lowterm = det if sign == 1 else -det
    return DiscriminantReport(
        ord_value=det.val,
        kernel_dim=m - rank,
        charpoly_lowterm=lowterm,
        regular=(m - rank == delta.n // 2),
    )


def weyl_discriminant(gamma: TorusElem, h_kind: str = "orthogonal-split"):
    """D(gamma) = det(Ad(gamma) - 1) on Lie(H)/Lie(T).  For split SO(2),
    H = T and the quotient is zero-dimensional, so D = 1.  The rank-one
    symplectic variant computes the two root-space eigenvalues."""
    ctx = gamma.ctx
    if not gamma.regular:
        raise NotRegular("Weyl discriminant needs a regular element")
    if h_kind == "orthogonal-split":
        return DiscriminantReport(0, 0, ctx.one(), True)
    if h_kind == "symplectic-rank1":
        a2 = gamma.alpha * gamma.alpha
        one = ctx.one()
        d = (a2 - one) * (a2.inverse() - one)
        return DiscriminantReport(d.val, 0, d, True)
    raise ValueError(f"unknown H kind {h_kind!r}")


def phi_s(gamma: TorusElem, form: GroupForm) -> int:
    """log_q max(1, |D_eps(S(gamma))|^(-1)); always >= 0."""
    s = norm_preimage(gamma, form)
    return twisted_discriminant(s, form).phi


# -- randomized twisted-centralizer verification --------------------------------


@dataclass
class CentralizerReport:
    depth: int
    slack: int
    tree_leaves: int
    sampled: int
    all_in_torus: bool
    witnesses_outside: list


def _solve_mod_p(rows, rhs, p):
    """Solve M h = rhs over F_p; return (particular, nullspace basis) or None."""
    m = len(rows)
    n = len(rows[0])
    a = [list(r) + [rhs[i] % p] for i, r in enumerate(rows)]
    piv = []
    rank = 0
    for c in range(n):
        sel = None
        for r in range(rank, m):
            if a[r][c] % p:
                sel = r
                break
        if sel is None:
            continue
        a[rank], a[sel] = a[sel], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [(x * inv) % p for x in a[rank]]
        for r in range(m):
            if r != rank and a[r][c] % p:
                f = a[r][c]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        piv.append(c)
        rank += 1
    for r in range(rank, m):
        if a[r][n] % p:
            return None
    part = [0] * n
    for r, c in enumerate(piv):
        part[c] = a[r][n]
    basis = []
    free = [c for c in range(n) if c not in piv]
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for r, c in enumerate(piv):
            v[c] = (-a[r][fc]) % p
        basis.append(v)
    return part, basis


def twisted_centralizer_sample(gamma: TorusElem, form: GroupForm, m: int,
                               trials: int, rng, slack: int | None = None
                               ) -> CentralizerReport:
    """Enumerate the solution tree of g X g^vdash = X (X = S(gamma)^(-1))
    modulo pi^m by level-one brute force plus linear lifting, then sample
    solutions and test membership in the diagonal torus mod pi^(m-1)."""
    ctx = gamma.ctx
    p = ctx.p
    x = norm_preimage(gamma, form).inverse()
    a = max(0, -min(0, mat_ord(x)))
    if slack is None:
        slack = a
    xt = x.shift(a)  # integral rescaling
    n = form.n
    basis = []
    for k in range(n):
        for l in range(n):
            eb = Mat.zero(ctx, n)
            eb.rows[k][l] = ctx.one()
            basis.append(eb)

    def defect(g: Mat) -> Mat:
        return g * xt * vdash(g, form) - xt

    # level 1: brute force over GL_n(O/p)
    digit_sets = [range(p)] * (n * n)
    level1 = []
    import itertools

    for digs in itertools.product(*digit_sets):
        g = Mat.from_ints(ctx, [[digs[i * n + j] for j in range(n)]
                                for i in range(n)])
        if g.det().residue() == 0:
            continue
        if mat_ord(defect(g)) >= 1:
            level1.append(g)
    nodes = level1
    for j in range(1, m):
        nxt = []
        pij = ctx.pi(j)
        for g in nodes:
            d = defect(g)
            rhs_mat = d.shift(-j)
            rhs = [(-rhs_mat.rows[i][k].residue()) % p
                   for i in range(n) for k in range(n)]
            cols = []
            for eb in basis:
                t = g * (eb * xt + xt * vdash(eb, form)) * vdash(g, form)
                cols.append([t.rows[i][k].residue() for i in range(n)
                             for k in range(n)])
            rows = [[cols[c][r] for c in range(n * n)] for r in range(n * n)]
            sol = _solve_mod_p(rows, rhs, p)
            if sol is None:
                continue
            part, null = sol
            combos = [part]
            for v in null:
                combos = [[(c0 + t0 * v0) % p for c0, v0 in zip(c, v)]
                          for c in combos for t0 in range(p)]
            for hvec in combos:
                h = Mat.from_ints(ctx, [[hvec[i * n + k] for k in range(n)]
                                        for i in range(n)])
                gp = g * (Mat.identity(ctx, n) + h.scale(pij))
                nxt.append(gp)
        nodes = nxt
    leaves = nodes
    level = m - 1
    outside = []
    for _ in range(trials):
        g = leaves[rng.randrange(len(leaves))]
        in_t = (
            g.rows[0][1].residue_digits(level) == (0,) * level
            and g.rows[1][0].residue_digits(level) == (0,) * level
            and (g.rows[0][0] * g.rows[1][1] - ctx.one()).residue_digits(level)
            == (0,) * level
        )
        if not in_t:
            outside.append(g)
    return CentralizerReport(
        depth=m,
        slack=slack,
        tree_leaves=len(leaves),
        sampled=trials,
        all_in_torus=not outside,
        witnesses_outside=outside[:5],
    )
