"""The double-coset algebra of GL_2 over a small prime field.

Functions on GL_2(F_q) that are constant on U,U double cosets form an algebra
under convolution.  Its basis k_nu is indexed by the monomial matrices nu,
and the elements T_w 1_lam built from it satisfy the relations of H_{q-1} at
v^2 = q.  Everything is computed by brute force over the group.

>>> model = build_model(3)
>>> len(model.elements), len(model.nu)
(48, 8)
>>> model.s_dot
(0, 1, 2, 0)
>>> s = model.nu_index[model.s_dot]
>>> sq = model.convolve(model.k(s), model.k(s))
>>> sorted((model.describe(i), c) for i, c in sq.items())
[('s*t(0,0)', 1), ('s*t(1,1)', 1), ('t(1,1)', 3)]
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from .canbase import CheckFailure
from .hecke import HeckeCtx, HeckeElt
from .scalars import Cyclo, lcm

__all__ = [
    "FiniteGL",
    "build_model",
    "DoubleCosetFn",
    "OuterDatum",
    "yokonuma_relations",
    "iso_check",
    "twisted_conjugation_check",
    "parabolic_projection_check",
    "structure_constants_json",
]

Mat = Tuple[int, int, int, int]  # (a, b, c, d) = [[a, b], [c, d]] over F_q
DoubleCosetFn = Dict[int, object]  # nu index -> scalar

ELEMENT_BOUND = 20000


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, int(q ** 0.5) + 1))


def primitive_root(q: int) -> int:
    """Least generator of F_q^* (q prime).

    >>> primitive_root(7)
    3
    """
    for g in range(1, q):
        if len({pow(g, k, q) for k in range(q - 1)}) == q - 1:
            return g
    raise ValueError(f"no primitive root mod {q}")


def build_model(q: int, element_bound: int = ELEMENT_BOUND) -> "FiniteGL":
    """Enumerate GL_2(F_q) and the pinning data; q must be prime."""
    if not _is_prime(q):
        raise ValueError(f"q = {q}: only prime fields are supported")
    order = (q * q - 1) * (q * q - q)
    if order > element_bound:
        raise ValueError(f"|GL_2(F_{q})| = {order} exceeds the element bound {element_bound}")
    return FiniteGL(q)


class FiniteGL:
    """GL_2(F_q) with B*, T, U, the monomial group N and the pinning."""

    def __init__(self, q: int):
        self.q = q
        self.gen = primitive_root(q)
        self.log = {pow(self.gen, k, q): k for k in range(q - 1)}
        self.elements: List[Mat] = [m for m in product(range(q), repeat=4) if self.det(m)]
        self.U = [(1, a, 0, 1) for a in range(q)]
        self.T = [(x, 0, 0, y) for x in range(1, q) for y in range(1, q)]
        self.B = [self.mul(t, u) for t in self.T for u in self.U]
        self.y, self.s_dot = self._find_s_dot()
        # nu = w_dot * t(a, b), identity part first
        self.nu: List[Mat] = []
        self.nu_parts: List[Tuple[int, int, int]] = []
        for w in (0, 1):
            for a in range(q - 1):
                for b in range(q - 1):
                    m = self.torus(a, b)
                    if w:
                        m = self.mul(self.s_dot, m)
                    self.nu.append(m)
                    self.nu_parts.append((w, a, b))
        self.nu_index = {m: i for i, m in enumerate(self.nu)}
        self.coset_label = self._double_cosets()
        self._consts: Optional[Dict[Tuple[int, int], Dict[int, int]]] = None

    # group arithmetic ------------------------------------------------------
    def mul(self, x: Mat, y: Mat) -> Mat:
        q = self.q
        a, b, c, d = x
        e, f, g, h = y
        return ((a * e + b * g) % q, (a * f + b * h) % q, (c * e + d * g) % q, (c * f + d * h) % q)

    def det(self, x: Mat) -> int:
        return (x[0] * x[3] - x[1] * x[2]) % self.q

    def inv(self, x: Mat) -> Mat:
        q = self.q
        di = pow(self.det(x), q - 2, q)
        a, b, c, d = x
        return ((d * di) % q, (-b * di) % q, (-c * di) % q, (a * di) % q)

    def torus(self, a: int, b: int) -> Mat:
        q, g = self.q, self.gen
        return (pow(g, a % (q - 1), q), 0, 0, pow(g, b % (q - 1), q))

    def torus_exponents(self, t: Mat) -> Tuple[int, int]:
        if t[1] or t[2]:
            raise ValueError("not a diagonal matrix")
        return self.log[t[0]], self.log[t[3]]

    def coroot(self, a: int) -> Mat:
        """The coroot a -> diag(a, a^-1)."""
        return (a % self.q, 0, 0, pow(a, self.q - 2, self.q))

    def x_s(self, a: int) -> Mat:
        return (1, a % self.q, 0, 1)

    def _find_s_dot(self) -> Tuple[Mat, Mat]:
        """y in the opposite root group with x_s(1) y x_s(1) monomial; unique."""
        found = []
        for c in range(1, self.q):
            y = (1, 0, c, 1)
            m = self.mul(self.mul(self.x_s(1), y), self.x_s(1))
            if m[0] == 0 and m[3] == 0:
                found.append((y, m))
        if len(found) != 1:
            raise CheckFailure("s_dot is not uniquely determined by the pinning", found)
        return found[0]

    def _double_cosets(self) -> Dict[Mat, int]:
        label: Dict[Mat, int] = {}
        for i, nu in enumerate(self.nu):
            for u1 in self.U:
                for u2 in self.U:
                    g = self.mul(self.mul(u1, nu), u2)
                    if label.setdefault(g, i) != i:
                        raise CheckFailure("U nu U double cosets overlap", (nu, g))
        if len(label) != len(self.elements):
            raise CheckFailure("U nu U double cosets do not cover the group")
        return label

    def bruhat_cells(self) -> int:
        """Number of B,B double cosets, each a union of U nu U (asserted)."""
        cells = {}
        for g in self.elements:
            w = self.nu_parts[self.coset_label[g]][0]
            cells.setdefault(w, set()).add(g)
        for w, cell in cells.items():
            rep = self.s_dot if w else (1, 0, 0, 1)
            bwb = {self.mul(self.mul(b1, rep), b2) for b1 in self.B for b2 in self.B}
            if bwb != cell:
                raise CheckFailure("B w B differs from the union of its U nu U pieces", w)
        return len(cells)

    def describe(self, i: int) -> str:
        w, a, b = self.nu_parts[i]
        return f"{'s*' if w else ''}t({a},{b})"

    # the convolution algebra -------------------------------------------------
    @property
    def structure_constants(self) -> Dict[Tuple[int, int], Dict[int, int]]:
        """k_i k_j = sum_k c k_k, with c = |U|^-1 #{g1 in U nu_i U : g1^-1 nu_k in U nu_j U}."""
        if self._consts is None:
            members: Dict[int, List[Mat]] = {}
            for g, i in self.coset_label.items():
                members.setdefault(i, []).append(g)
            consts: Dict[Tuple[int, int], Dict[int, int]] = {}
            nU = len(self.U)
            for i in range(len(self.nu)):
                for k, nu_k in enumerate(self.nu):
                    counts: Dict[int, int] = {}
                    for g1 in members[i]:
                        j = self.coset_label[self.mul(self.inv(g1), nu_k)]
                        counts[j] = counts.get(j, 0) + 1
                    for j, c in counts.items():
                        if c % nU:
                            raise CheckFailure("structure constant is not an integer", (i, j, k))
                        consts.setdefault((i, j), {})[k] = c // nU
            self._consts = consts
        return self._consts

    def k(self, i: int) -> DoubleCosetFn:
        return {i: 1}

    def convolve(self, h1: DoubleCosetFn, h2: DoubleCosetFn) -> DoubleCosetFn:
        out: Dict[int, object] = {}
        consts = self.structure_constants
        for i, a in h1.items():
            for j, b in h2.items():
                for k, c in consts.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    def convolve_direct(self, h1: DoubleCosetFn, h2: DoubleCosetFn) -> DoubleCosetFn:
        """The defining sum over g1 g2 = g, evaluated at each nu (slow route)."""
        nU = len(self.U)
        out = {}
        for k, g in enumerate(self.nu):
            total = 0
            for g1 in self.elements:
                a = h1.get(self.coset_label[g1])
                if not a:
                    continue
                b = h2.get(self.coset_label[self.mul(self.inv(g1), g)])
                if b:
                    total = total + a * b
            if total:
                out[k] = total * Fraction(1, nU)
        return out

    # characters and embedded elements ----------------------------------------
    @property
    def conductor(self) -> int:
        return lcm(self.q - 1, 4)

    def theta(self, lam: Sequence[int], t: Mat) -> Cyclo:
        """theta^lam(t) = zeta_{q-1}^(lam . log t) for diagonal t."""
        a, b = self.torus_exponents(t)
        m, n = self.conductor, self.q - 1
        return Cyclo.root(m, (m // n) * (lam[0] * a + lam[1] * b))

    def sqrt_sign(self, x: Cyclo) -> Cyclo:
        """sqrt(1) = 1 and sqrt(-1) = the fixed i."""
        if x == 1:
            return Cyclo.rational(1, self.conductor)
        if x == -1:
            return Cyclo.root(self.conductor, self.conductor // 4)
        raise ValueError("only square roots of +-1 are needed")

    def characters(self) -> List[Tuple[int, int]]:
        n = self.q - 1
        return [(a, b) for a in range(n) for b in range(n)]

    def idem(self, lam: Sequence[int]) -> DoubleCosetFn:
        """1_lam = |T|^-1 sum_t theta^lam(t) k_t."""
        nT = len(self.T)
        return {self.nu_index[t]: self.theta(lam, t) * Fraction(1, nT) for t in self.T}

    def cocycle(self, w: int, lam: Sequence[int]) -> Cyclo:
        """prod over inverted positive roots of sqrt(theta^lam(coroot(-1)))."""
        if w == 0:
            return Cyclo.rational(1, self.conductor)
        return self.sqrt_sign(self.theta(lam, self.coroot(-1)))

    def T_elt(self, w: int, lam: Sequence[int]) -> DoubleCosetFn:
        """T_w 1_lam = cocycle * k_{w_dot} 1_lam."""
        base = self.s_dot if w else (1, 0, 0, 1)
        c = self.cocycle(w, lam)
        return {self.nu_index[self.mul(base, t)]: c * self.theta(lam, t) * Fraction(1, len(self.T))
                for t in self.T}

    def T_coordinates(self, h: DoubleCosetFn) -> Dict[Tuple[int, Tuple[int, int]], Cyclo]:
        """Explicit inverse: a_{w,lam} = cocycle^-1 sum_t theta^lam(t)^-1 h(w_dot t)."""
        out = {}
        for w in (0, 1):
            base = self.s_dot if w else (1, 0, 0, 1)
            for lam in self.characters():
                total = Cyclo.rational(0, self.conductor)
                for t in self.T:
                    val = h.get(self.nu_index[self.mul(base, t)])
                    if val:
                        total = total + self.theta(lam, t).sp_conj() * val
                if total:
                    out[(w, lam)] = total * self.cocycle(w, lam).inverse()
        return out

    def wlam(self, w: int, lam: Sequence[int]) -> Tuple[int, int]:
        n = self.q - 1
        return (lam[1] % n, lam[0] % n) if w else (lam[0] % n, lam[1] % n)

    # the module of functions on G/U -------------------------------------------
    @property
    def cosets(self) -> Tuple[List[Mat], Dict[Mat, int]]:
        """Representatives of the cosets xU and the map g -> coset index."""
        if not hasattr(self, "_cosets"):
            reps: List[Mat] = []
            of: Dict[Mat, int] = {}
            for g in self.elements:
                if g in of:
                    continue
                for u in self.U:
                    of[self.mul(g, u)] = len(reps)
                reps.append(g)
            self._cosets = (reps, of)
        return self._cosets

    def act_matrix(self, h: DoubleCosetFn) -> List[List[object]]:
        """Matrix of f -> hf with (hf)(x) = |U|^-1 sum_x' h(x') f(x x')."""
        reps, of = self.cosets
        size = len(reps)
        M: List[List[object]] = [[0] * size for _ in range(size)]
        nU = Fraction(1, len(self.U))
        for i, x in enumerate(reps):
            for g in self.elements:
                c = h.get(self.coset_label[g])
                if c:
                    j = of[self.mul(x, g)]
                    M[i][j] = M[i][j] + c * nU
        return M


# --------------------------------------------------------------------------
# relation checks


def _eq(h1: DoubleCosetFn, h2: DoubleCosetFn) -> bool:
    keys = set(h1) | set(h2)
    return all(h1.get(k, 0) == h2.get(k, 0) for k in keys)


def _add(h1: DoubleCosetFn, h2: DoubleCosetFn, scale=1) -> DoubleCosetFn:
    out = dict(h1)
    for k, c in h2.items():
        out[k] = out.get(k, 0) + c * scale
    return {k: c for k, c in out.items() if c}


def yokonuma_relations(model: FiniteGL, associativity: bool = True) -> Dict[str, bool]:
    """Quadratic relation, braid-type products, unit, idempotents, associativity."""
    q = model.q
    res: Dict[str, bool] = {}
    nN = len(model.nu)
    s = model.nu_index[model.s_dot]
    lhs = model.convolve(model.k(s), model.k(s))
    rhs = {model.nu_index[model.coroot(-1)]: q}
    for a in range(1, q):
        rhs = _add(rhs, model.convolve(model.k(s), model.k(model.nu_index[model.coroot(a)])))
    res["quadratic"] = _eq(lhs, rhs)
    res["quadratic_direct"] = _eq(model.convolve_direct(model.k(s), model.k(s)), lhs)
    ok = True
    for i, j in product(range(nN), repeat=2):
        if model.nu_parts[i][0] and model.nu_parts[j][0]:
            continue
        prod_ij = model.mul(model.nu[i], model.nu[j])
        ok &= model.convolve(model.k(i), model.k(j)) == {model.nu_index[prod_ij]: 1}
    res["length_additive_products"] = ok
    unit = model.nu_index[(1, 0, 0, 1)]
    res["unit"] = all(model.convolve(model.k(unit), model.k(i)) == model.k(i) ==
                      model.convolve(model.k(i), model.k(unit)) for i in range(nN))
    if associativity:
        ok = True
        for i, j, k in product(range(nN), repeat=3):
            left = model.convolve(model.convolve(model.k(i), model.k(j)), model.k(k))
            right = model.convolve(model.k(i), model.convolve(model.k(j), model.k(k)))
            ok &= _eq(left, right)
        res["associativity"] = ok
    idems = {lam: model.idem(lam) for lam in model.characters()}
    ok = True
    total: DoubleCosetFn = {}
    for lam, e in idems.items():
        total = _add(total, e)
        for lam2, e2 in idems.items():
            prod_e = model.convolve(e, e2)
            ok &= _eq(prod_e, e if lam == lam2 else {})
    res["idempotents"] = ok
    res["idempotents_sum_to_unit"] = _eq(total, {unit: 1})
    return res


def _hecke_T_coords(ctx: HeckeCtx, h: HeckeElt, q: int) -> Dict[Tuple[int, Tuple[int, ...]], Fraction]:
    """Coordinates in the T_w 1_lam basis at v^2 = q (TT_w = v^-l(w) T_w)."""
    out = {}
    for (e, lam), c in h.terms.items():
        val = c.shift(-ctx.G.ext_length(e)).substitute_v2(q)
        if val:
            out[(e, ctx.L.char(lam).values)] = val
    return out


def iso_check(model: FiniteGL, ctx: Optional[HeckeCtx] = None) -> Dict[str, object]:
    """Compare the images of T_w 1_lam with H_{q-1} at v^2 = q, exhaustively."""
    q = model.q
    if ctx is None:
        ctx = HeckeCtx.build("GL2", q - 1)
    if ctx.n != q - 1 or ctx.datum.label != "GL2":
        raise ValueError("context must be GL2 with n = q - 1")
    s_idx = ctx.G.simple[0]
    w_of = {0: 0, 1: s_idx}
    res: Dict[str, object] = {}
    chars = model.characters()
    res["dim_T"] = len(model.nu)
    res["dim_H"] = ctx.dim_w_part
    res["dim_equal"] = len(model.nu) == ctx.dim_w_part == 2 * (q - 1) ** 2
    # explicit inverse: every k_nu is recovered from its T-coordinates
    basis = {(w, lam): model.T_elt(w, lam) for w in (0, 1) for lam in chars}
    ok = True
    for i in range(len(model.nu)):
        coords = model.T_coordinates(model.k(i))
        rebuilt: DoubleCosetFn = {}
        for key, c in coords.items():
            rebuilt = _add(rebuilt, basis[key], c)
        ok &= _eq(rebuilt, model.k(i))
    res["full_rank"] = ok
    # relations of the embedded elements
    ok_w = ok_len = ok_sq = True
    for lam in chars:
        for w in (0, 1):
            lhs = basis[(w, lam)]
            rhs = model.convolve(model.idem(model.wlam(w, lam)), _sum_over_lams(model, w))
            ok_w &= _eq(lhs, rhs)
        # T_s^2 restricted to 1_lam
        sq = model.convolve(_sum_over_lams(model, 1), basis[(1, lam)])
        want = _add({}, model.idem(lam), q)
        if model.theta(lam, model.coroot(model.gen)) == 1:
            want = _add(want, basis[(1, lam)], q - 1)
        ok_sq &= _eq(sq, want)
        ok_len &= _eq(model.convolve(basis[(0, model.wlam(1, lam))], basis[(1, lam)]), basis[(1, lam)])
    res["T_w_idempotent_commutation"] = ok_w
    res["T_s_quadratic"] = ok_sq
    res["T_length_additive"] = ok_len
    # structure constants against H_{q-1}
    ok = True
    mismatches = []
    for (w1, l1), (w2, l2) in product(basis, repeat=2):
        prod_T = model.T_coordinates(model.convolve(basis[(w1, l1)], basis[(w2, l2)]))
        h = ctx.T(w_of[w1], ctx.L.index[tuple(l1)]) * ctx.T(w_of[w2], ctx.L.index[tuple(l2)])
        want = _hecke_T_coords(ctx, h, q)
        got = {(w_of[w], tuple(lam)): c for (w, lam), c in prod_T.items()}
        if set(got) != set(want) or any(got[k] != want[k] for k in got):
            ok = False
            mismatches.append([w1, list(l1), w2, list(l2)])
    res["structure_constants_match"] = ok
    res["mismatches"] = mismatches[:10]
    # faithfulness of the action on functions on G/U
    res["action_faithful"] = _matrix_rank([_flatten(model.act_matrix(model.k(i))) for i in range(len(model.nu))]) \
        == len(model.nu)
    res["ok"] = all(v for k, v in res.items() if isinstance(v, bool))
    return res


def _sum_over_lams(model: FiniteGL, w: int) -> DoubleCosetFn:
    """T_w = sum_lam T_w 1_lam."""
    out: DoubleCosetFn = {}
    for lam in model.characters():
        out = _add(out, model.T_elt(w, lam))
    return out


def _flatten(M) -> List[object]:
    return [c for row in M for c in row]


def _matrix_rank(rows: List[List[object]]) -> int:
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    data = []
    for row in rows:
        r = []
        for c in row:
            if isinstance(c, Cyclo):
                c = c.to_rational()
            c = Fraction(c)
            r.append(QQ(c.numerator, c.denominator))
        data.append(r)
    return DomainMatrix(data, (len(rows), len(rows[0])), QQ).rank()


# --------------------------------------------------------------------------
# the outer twist and parabolic projections on functions on G/U


def _mat_mul(A, B):
    n = len(A)
    m = len(B[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for k, a in enumerate(Ai):
            if not a:
                continue
            Bk = B[k]
            row = out[i]
            for j in range(m):
                b = Bk[j]
                if b:
                    row[j] = row[j] + a * b
    return out


def _mat_eq(A, B) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def _mat_add(A, B, scale=1):
    return [[a + b * scale for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


@dataclass
class OuterDatum:
    """G = GL_2 x| <sigma>, sigma(g) = J (g^T)^-1 J^-1; elements are (matrix, power)."""

    model: FiniteGL
    J: Mat = (0, 1, -1, 0)

    def __post_init__(self):
        q = self.model.q
        self.J = tuple(x % q for x in self.J)

    def sigma(self, g: Mat, power: int = 1) -> Mat:
        m = self.model
        for _ in range(power % 2):
            a, b, c, d = m.inv(g)
            gt_inv = (a, c, b, d)
            g = m.mul(m.mul(self.J, gt_inv), m.inv(self.J))
        return g

    def mul(self, x: Tuple[Mat, int], y: Tuple[Mat, int]) -> Tuple[Mat, int]:
        return self.model.mul(x[0], self.sigma(y[0], x[1])), (x[1] + y[1]) % 2

    def inv(self, x: Tuple[Mat, int]) -> Tuple[Mat, int]:
        g, p = x
        return self.sigma(self.model.inv(g), p), p

    def check(self) -> Dict[str, bool]:
        m = self.model
        out = {
            "order_two": all(self.sigma(g, 2) == g for g in m.elements),
            "automorphism": all(self.sigma(m.mul(x, y)) == m.mul(self.sigma(x), self.sigma(y))
                                for x in m.elements[:50] for y in m.elements[:50]),
            "preserves_B": {self.sigma(b) for b in m.B} == set(m.B),
            "preserves_T": {self.sigma(t) for t in m.T} == set(m.T),
            "preserves_pinning": all(self.sigma(m.x_s(a)) == m.x_s(a) for a in range(m.q)),
        }
        return out

    def rho(self, g: Tuple[Mat, int], g2: Tuple[Mat, int]):
        """Matrix of (rho f)(x) = f(g^-1 x g2) on functions on G/U."""
        m = self.model
        reps, of = m.cosets
        size = len(reps)
        M = [[0] * size for _ in range(size)]
        gi = self.inv(g)
        for i, x in enumerate(reps):
            y, p = self.mul(self.mul(gi, (x, 0)), g2)
            if p:
                raise ValueError("g and g2 lie in different components")
            M[i][of[y]] = 1
        return M


def twisted_conjugation_check(model: FiniteGL, d: Tuple[Mat, int] = ((1, 0, 0, 1), 1),
                              ctx: Optional[HeckeCtx] = None) -> Dict[str, object]:
    """rho_{d,d} T_w 1_lam rho_{d^-1,d^-1} = theta^lam(d^-1 t_{d,w} d)^-1 T_{eps(w)} 1_{uD lam}."""
    outer = OuterDatum(model)
    res: Dict[str, object] = {"d_power": d[1]}
    res.update({f"sigma_{k}": v for k, v in outer.check().items()})
    di = outer.inv(d)

    def conj_torus(t: Mat) -> Mat:
        y, p = outer.mul(outer.mul(di, (t, 0)), d)
        assert p == 0
        return y

    # uD on characters: theta^{uD lam}(t) = theta^lam(d^-1 t d)
    uD: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for lam in model.characters():
        matches = [mu for mu in model.characters()
                   if all(model.theta(mu, t) == model.theta(lam, conj_torus(t)) for t in model.T)]
        if len(matches) != 1:
            raise CheckFailure("uD lam is not determined", lam)
        uD[lam] = matches[0]
    if ctx is not None and d[1]:
        ext = ctx.G.ext(1, 0)
        res["uD_matches_datum"] = all(
            ctx.L.char(ctx.L.act_table[ext][ctx.L.index[lam]]).values == uD[lam] for lam in model.characters())
    # eps(w) from conjugating the monomial representatives
    eps = {}
    for w in (0, 1):
        base = model.s_dot if w else (1, 0, 0, 1)
        img, p = outer.mul(outer.mul(d, (base, 0)), di)
        eps[w] = int(img[0] == 0)
        if p or model.nu_parts[model.nu_index.get(img, 0)][0] != eps[w]:
            raise CheckFailure("d does not normalize N", w)
    rho = outer.rho(d, d)
    rho_inv = outer.rho(di, di)
    ok = True
    failures = []
    for w in (0, 1):
        base = model.s_dot if w else (1, 0, 0, 1)
        eps_base = model.s_dot if eps[w] else (1, 0, 0, 1)
        t_dw, p = outer.mul(outer.mul(d, (base, 0)), di)
        t_dw = model.mul(model.inv(eps_base), t_dw)
        if t_dw[1] or t_dw[2]:
            raise CheckFailure("t_{d,w} is not in T", w)
        for lam in model.characters():
            lhs = _mat_mul(_mat_mul(rho, model.act_matrix(model.T_elt(w, lam))), rho_inv)
            scalar = model.theta(lam, conj_torus(t_dw)).inverse()
            rhs_mat = model.act_matrix(model.T_elt(eps[w], uD[lam]))
            rhs = [[c * scalar for c in row] for row in rhs_mat]
            if not _mat_eq(lhs, rhs):
                ok = False
                failures.append([w, list(lam)])
    res["identity"] = ok
    res["failures"] = failures
    res["uD"] = {f"{a},{b}": list(v) for (a, b), v in sorted(uD.items())}
    res["ok"] = all(v for k, v in res.items() if isinstance(v, bool))
    return res


def _parabolics(model: FiniteGL, J: Sequence[int]):
    """(list of Q, map coset rep -> Q) for Q in P_J^F, Q_{J,B*} the standard one."""
    reps, _of = model.cosets
    if J:
        return ["G"], {x: "G" for x in reps}
    # Borel subgroups x B* x^-1, keyed by the frozen set of their elements
    key_of = {}
    for x in reps:
        xi = model.inv(x)
        key_of[x] = frozenset(model.mul(model.mul(x, b), xi) for b in model.B)
    return sorted(set(key_of.values()), key=lambda s: sorted(s)), key_of


def parabolic_projection_check(model: FiniteGL, J: Sequence[int], ctx: Optional[HeckeCtx] = None) -> Dict[str, object]:
    """Theta^J(phi) = sum_Q pr_Q phi pr_Q on functions on G/U, for every T_w 1_lam.

    pr_Q keeps f(x) when x Q_J x^-1 = Q and gives 0 otherwise.
    """
    from .convtrace import theta_J

    q = model.q
    if ctx is None:
        ctx = HeckeCtx.build("GL2", q - 1)
    reps, _of = model.cosets
    Qs, key_of = _parabolics(model, J)
    size = len(reps)
    projections = []
    for Q in Qs:
        P = [[0] * size for _ in range(size)]
        for i, x in enumerate(reps):
            if key_of[x] == Q:
                P[i][i] = 1
        projections.append(P)
    res: Dict[str, object] = {"J": list(J), "n_parabolics": len(Qs)}
    s_idx = ctx.G.simple[0]
    w_back = {0: 0, s_idx: 1}
    ok = True
    failures = []
    for w in (0, 1):
        for lam in model.characters():
            phi = model.act_matrix(model.T_elt(w, lam))
            rhs = [[0] * size for _ in range(size)]
            for P in projections:
                rhs = _mat_add(rhs, _mat_mul(_mat_mul(P, phi), P))
            h = theta_J(ctx, J, ctx.T(0 if w == 0 else s_idx, ctx.L.index[lam]))
            lhs = [[0] * size for _ in range(size)]
            for (e, mu), c in _hecke_T_coords(ctx, h, q).items():
                lhs = _mat_add(lhs, model.act_matrix(model.T_elt(w_back[e], mu)), c)
            if not _mat_eq(lhs, rhs):
                ok = False
                failures.append([w, list(lam)])
    res["identity"] = ok
    res["failures"] = failures
    res["ok"] = ok
    return res


def structure_constants_json(model: FiniteGL) -> str:
    """Sorted JSON of k_i k_j = sum c k_k with readable labels."""
    data = {}
    for (i, j), row in sorted(model.structure_constants.items()):
        data[f"{model.describe(i)}*{model.describe(j)}"] = {model.describe(k): c for k, c in sorted(row.items())}
    return json.dumps({"q": model.q, "basis": [model.describe(i) for i in range(len(model.nu))],
                       "products": data}, sort_keys=True, indent=1)
