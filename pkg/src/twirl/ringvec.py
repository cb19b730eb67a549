"""Vectorized arithmetic in O / pi^s for exact enumeration over compact
groups.

Elements are arrays of polynomial coefficient vectors (shape (..., e)) with
integer coefficients modulo p^Ms, reduced by the Eisenstein relation.  All
operations are exact; numpy is used only for speed, never for floats.
"""

from __future__ import annotations

import numpy as np

from .localfield import Elem, LocalFieldCtx, _pi_power_poly


class ResidueRing:
    """O / pi^s with vectorized exact operations."""

    def __init__(self, ctx: LocalFieldCtx, s: int):
        self.ctx = ctx
        self.s = s
        self.e = ctx.e
        self.p = ctx.p
        self.ms = -(-s // ctx.e) + 1
        self.pm = ctx.p ** self.ms
        if ctx.e * (self.pm ** 2) * ctx.e >= 2 ** 62:
            raise OverflowError("coefficient modulus too large for int64 path")
        e = ctx.e
        # reduction rows for x^e .. x^(2e-2)
        red = np.zeros((max(e - 1, 0), e), dtype=np.int64)
        for j in range(e - 1):
            red[j] = [c % self.pm for c in ctx._red[j]]
        self.red = red
        self.p_over_pi = np.array([c % self.pm for c in ctx._p_over_pi],
                                  dtype=np.int64)
        self.pi_pows = np.stack(
            [np.array([c % self.pm for c in _pi_power_poly(ctx, k)],
                      dtype=np.int64) for k in range(s + 1)]
        )

    # -- conversions ----------------------------------------------------------

    def from_elem(self, x: Elem) -> np.ndarray:
        x = x.normalized()
        if x.is_zero():
            return np.zeros(self.e, dtype=np.int64)
        if x.mexp < self.ms:
            raise ValueError(
                f"element validity {x.mexp} below ring level {self.ms}"
            )
        v = x.vbase
        if v < 0:
            raise ValueError("element is not integral")
        if v > self.s:
            return np.zeros(self.e, dtype=np.int64)
        coeffs = np.array([c % self.pm for c in x.coeffs], dtype=np.int64)
        return self.mul(self.pi_pows[v], coeffs)

    def from_digit_grid(self, level: int) -> np.ndarray:
        """All residues mod pi^level as an array (p^level, e)."""
        p, e = self.p, self.e
        count = p ** level
        out = np.zeros((count, e), dtype=np.int64)
        idx = np.arange(count)
        for t in range(level):
            d = (idx // p ** t) % p
            out = (out + d[:, None] * self.pi_pows[t][None, :]) % self.pm
        return out

    # -- arithmetic -----------------------------------------------------------

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        e = self.e
        if e == 1:
            return (a * b) % self.pm
        conv = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
                        + (2 * e - 1,), dtype=np.int64)
        for i in range(e):
            for j in range(e):
                conv[..., i + j] = (conv[..., i + j] + a[..., i] * b[..., j]) % self.pm
        out = conv[..., :e].copy()
        for j in range(e - 1):
            out = (out + conv[..., e + j][..., None] * self.red[j][None, :]) % self.pm
        return out % self.pm

    def add(self, a, b):
        return (a + b) % self.pm

    def sub(self, a, b):
        return (a - b) % self.pm

    def neg(self, a):
        return (-a) % self.pm

    def scalar(self, n: int) -> np.ndarray:
        v = np.zeros(self.e, dtype=np.int64)
        v[0] = n % self.pm
        return v

    def is_unit(self, a) -> np.ndarray:
        return (a[..., 0] % self.p) != 0

    def divisible_by_pi(self, a) -> np.ndarray:
        return (a[..., 0] % self.p) == 0

    def residue_mod_p(self, a) -> np.ndarray:
        return a[..., 0] % self.p

    def div_pi(self, a: np.ndarray) -> np.ndarray:
        """Exact division by pi of elements with positive valuation
        (callers must mask to divisible entries first)."""
        e = self.e
        c0 = a[..., 0]
        out = np.zeros_like(a)
        if e > 1:
            out[..., : e - 1] = a[..., 1:]
        out = (out + (c0 // self.p)[..., None] * self.p_over_pi[None, :]) % self.pm
        return out

    def inv_units(self, a: np.ndarray) -> np.ndarray:
        """Inverse of unit entries (Newton iteration)."""
        p = self.p
        r = a[..., 0] % p
        inv_table = np.zeros(p, dtype=np.int64)
        for v in range(1, p):
            inv_table[v] = pow(v, -1, p)
        w = np.zeros_like(a)
        w[..., 0] = inv_table[r]
        two = self.scalar(2)
        steps = max(1, (self.e * self.ms).bit_length())
        for _ in range(steps):
            t = self.sub(two, self.mul(a, w))
            w = self.mul(w, t)
        return w


_gl2_cache: dict = {}


def gl2_unit_count(ctx: LocalFieldCtx, level: int) -> int:
    """|GL_2(O/pi^level)|."""
    p = ctx.p
    q4 = p ** 4
    gl2_res = (p * p - 1) * (p * p - p)
    return gl2_res * q4 ** (level - 1)


def iter_gl2(ctx: LocalFieldCtx, level: int, ring: ResidueRing | None = None):
    """Yield GL_2(O/pi^level) as chunks of coefficient arrays (a, b, c, d).
    Small levels are materialized and cached; larger ones stream."""
    if ring is None:
        ring = ResidueRing(ctx, max(level, 2))
    key = (ctx.p, ctx.e, ctx.eisenstein, level, ring.s)
    got = _gl2_cache.get(key)
    if got is not None:
        yield got
        return
    table = ring.from_digit_grid(level)
    m = table.shape[0]
    if m ** 4 <= 1_500_000:
        ia, ib, ic, id_ = np.meshgrid(
            np.arange(m), np.arange(m), np.arange(m), np.arange(m), indexing="ij"
        )
        a = table[ia.ravel()]
        b = table[ib.ravel()]
        c = table[ic.ravel()]
        d = table[id_.ravel()]
        det = ring.sub(ring.mul(a, d), ring.mul(b, c))
        mask = ring.is_unit(det)
        out = (a[mask], b[mask], c[mask], d[mask])
        _gl2_cache[key] = out
        yield out
        return
    ib, ic, id_ = np.meshgrid(np.arange(m), np.arange(m), np.arange(m),
                              indexing="ij")
    ib, ic, id_ = ib.ravel(), ic.ravel(), id_.ravel()
    b = table[ib]
    c = table[ic]
    d = table[id_]
    for i in range(m):
        a = np.broadcast_to(table[i], b.shape).copy()
        det = ring.sub(ring.mul(a, d), ring.mul(b, c))
        mask = ring.is_unit(det)
        yield (a[mask], b[mask], c[mask], d[mask])
