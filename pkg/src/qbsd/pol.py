"""The quantum polynomial algebras and their crossed product.

The holomorphic and antiholomorphic sides are the graded duals of the
two truncated generalized Verma modules; multiplication within a side is
dual to the Verma coproduct, and products across sides are straightened
with the flipped R-matrix.  On top of this sit the distinguished
degree-one element solving F_{l0} z = q_{l0}^{1/2}, the antilinear
involution exchanging the two sides, the vacuum (Fock) representation,
the invariant elements y_i and y, the localization at y, and the
boundary quotient by the two-sided ideal (y).
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import (InvalidArgument, NotOre, TruncationExceeded,
                         UnsupportedAtRank)
from .linalg import (SpanSolver, coordinates, independent_subset, invert,
                     mat_mul, rank_at_sample, solve)
from .rmatrix import QuasiRMatrix, RMatrixOperator, tensor_action
from .uq import E, F, K, Kinv, UqElement
from .weightmodules import GeneralizedVerma, build_generalized_verma


class DualAlgebraModule:
    """Graded dual of a truncated generalized Verma module.

    Action: (xi f)(v) = f(S(xi) v).  The degree-raising letter cannot act
    on the top graded piece of the truncation and raises
    TruncationExceeded there.
    """

    def __init__(self, verma: GeneralizedVerma, raising):
        self.verma = verma
        self.field = verma.field
        self.datum = verma.datum
        self.dim = verma.dim
        self.cut = verma.cut
        self.weights = [tuple(-x for x in w) for w in verma.weights]
        self.raising = raising
        self._letter_cache = {}

    def degree(self, idx):
        return self.verma.grades[idx]

    def degree_indices(self, g):
        return self.verma.grade_indices(g)

    def weight_indices(self, mu):
        return [k for k in range(self.dim) if self.weights[k] == tuple(mu)]

    def _dual_columns(self, letter):
        cols = self._letter_cache.get(letter)
        if cols is not None:
            return cols
        field = self.field
        kind, i = letter
        # S(E) = -K^{-1}E, S(F) = -FK, S(K) = K^{-1}
        cols = {}
        for b in range(self.dim):
            vec = {b: field.one}
            try:
                if kind == "E":
                    vec = self.verma.apply_letter(E(i), vec)
                    vec = self.verma.apply_letter(Kinv(i), vec)
                else:
                    vec = self.verma.apply_letter(K(i), vec)
                    vec = self.verma.apply_letter(F(i), vec)
            except TruncationExceeded:
                vec = {}  # lands beyond the cut: pairs to zero in range
            for a, c in vec.items():
                cols.setdefault(a, {})[b] = -c
        self._letter_cache[letter] = cols
        return cols

    def apply_letter(self, letter, vec):
        kind, i = letter
        field = self.field
        if kind in ("K", "Ki"):
            out = {}
            exp = 1 if kind == "K" else -1
            for idx, c in vec.items():
                w = self.weights[idx]
                if w[i]:
                    c = c * field.q_power(exp * self.datum.d[i] * w[i])
                out[idx] = c
            return out
        if letter == self.raising:
            for idx in vec:
                if self.degree(idx) == self.cut:
                    raise TruncationExceeded(
                        "raising a top-degree dual element; rebuild with larger cut")
        cols = self._dual_columns(letter)
        out = {}
        for a, c in vec.items():
            for b, m in cols.get(a, {}).items():
                s = out.get(b, field.zero) + m * c
                if s.is_zero():
                    out.pop(b, None)
                else:
                    out[b] = s
        return out


class PolElement:
    """Bigraded element: dict {(hol index, ahol index): Scalar}."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx, terms=None):
        self.ctx = ctx
        self.terms = {}
        if terms:
            for key, c in terms.items():
                if not c.is_zero():
                    self.terms[key] = c

    def __add__(self, other):
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, self.ctx.field.zero) + c
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return PolElement(self.ctx, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PolElement(self.ctx, {k: -c for k, c in self.terms.items()})

    def scale(self, c):
        if not c:
            return PolElement(self.ctx)
        return PolElement(self.ctx, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PolElement):
            return self.ctx.multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        return self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def bidegrees(self):
        hol, ahol = self.ctx.hol, self.ctx.ahol
        return sorted({(hol.degree(a), ahol.degree(b)) for a, b in self.terms})

    def component(self, i, j):
        hol, ahol = self.ctx.hol, self.ctx.ahol
        return PolElement(self.ctx, {
            (a, b): c for (a, b), c in self.terms.items()
            if hol.degree(a) == i and ahol.degree(b) == j})

    def bracket(self):
        """The vacuum expectation: coefficient of the unit."""
        return self.terms.get((0, 0), self.ctx.field.zero)

    def star(self):
        return self.ctx.star(self)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c!r})*[h{a}|a{b}]"
                          for (a, b), c in sorted(self.terms.items()))


class PolAlgebra:
    """Context for the crossed-product polynomial algebra at a truncation."""

    def __init__(self, field, datum, cut):
        datum.require_hermitian()
        self.field = field
        self.datum = datum
        self.cut = cut
        self.nplus = build_generalized_verma(field, datum, "+", cut)
        self.nminus = build_generalized_verma(field, datum, "-", cut)
        self.hol = DualAlgebraModule(self.nplus, raising=E(datum.l0))
        self.ahol = DualAlgebraModule(self.nminus, raising=F(datum.l0))
        self.quasi = QuasiRMatrix(field, datum)
        self._rop = RMatrixOperator(self.quasi, self.ahol, self.hol)
        self._rhat_cache = {}
        self._mul_hol = {}
        self._mul_ahol = {}
        self._star_data = None
        self._prod_basis = {}

    # -- element constructors ------------------------------------------------

    def one(self):
        return PolElement(self, {(0, 0): self.field.one})

    def from_hol(self, vec):
        return PolElement(self, {(a, 0): c for a, c in vec.items()})

    def from_ahol(self, vec):
        return PolElement(self, {(0, b): c for b, c in vec.items()})

    def hol_dim(self, g):
        return len(self.hol.degree_indices(g))

    def ahol_dim(self, g):
        return len(self.ahol.degree_indices(g))

    # -- structure tables -----------------------------------------------------

    def mul_hol(self, a1, a2):
        """Product of dual basis elements f_{a1} f_{a2} as {w: Scalar}."""
        key = (a1, a2)
        cached = self._mul_hol.get(key)
        if cached is None:
            g = self.hol.degree(a1) + self.hol.degree(a2)
            cached = {}
            for w in self.hol.degree_indices(g):
                c = self.nplus.coproduct_of_index(w).get(key)
                if c is not None:
                    cached[w] = c
            self._mul_hol[key] = cached
        return cached

    def mul_ahol(self, b1, b2):
        key = (b1, b2)
        cached = self._mul_ahol.get(key)
        if cached is None:
            g = self.ahol.degree(b1) + self.ahol.degree(b2)
            cached = {}
            for w in self.ahol.degree_indices(g):
                c = self.nminus.coproduct_of_index(w).get(key)
                if c is not None:
                    cached[w] = c
            self._mul_ahol[key] = cached
        return cached

    def rhat(self, b, a):
        """R-check of (antihol b) (x) (hol a): {(hol, ahol): Scalar}."""
        key = (b, a)
        cached = self._rhat_cache.get(key)
        if cached is None:
            cached = self._rop.apply({(b, a): self.field.one}, flip=True)
            self._rhat_cache[key] = cached
        return cached

    # -- multiplication ---------------------------------------------------------

    def multiply(self, x: PolElement, y: PolElement):
        field = self.field
        out = {}
        for (a1, b1), c1 in x.terms.items():
            for (a2, b2), c2 in y.terms.items():
                if (self.hol.degree(a1) + self.hol.degree(a2) > self.cut or
                        self.ahol.degree(b1) + self.ahol.degree(b2) > self.cut):
                    raise TruncationExceeded(
                        "product degree exceeds the truncation; rebuild with larger cut")
                c = c1 * c2
                for (h, ab), cr in self.rhat(b1, a2).items():
                    left = self.mul_hol(a1, h)
                    right = self.mul_ahol(ab, b2)
                    for w1, cl in left.items():
                        for w2, crr in right.items():
                            key = (w1, w2)
                            s = out.get(key, field.zero) + c * cr * cl * crr
                            if s.is_zero():
                                out.pop(key, None)
                            else:
                                out[key] = s
        return PolElement(self, out)

    # -- covariant action ----------------------------------------------------------

    def act_letter(self, letter, x: PolElement):
        pairs = tensor_action((self.hol, self.ahol), letter, x.terms)
        return PolElement(self, pairs)

    def act(self, element: UqElement, x: PolElement):
        field = self.field
        out = PolElement(self)
        for word, c in element.terms.items():
            cur = x
            for letter in reversed(word):
                cur = self.act_letter(letter, cur)
            out = out + cur.scale(c)
        return out

    # -- the distinguished degree-one element -----------------------------------------

    def z_low(self):
        """Unique degree-(1,0) element with F_{l0} z = q_{l0}^{1/2},
        F_j z = 0 otherwise."""
        field, datum = self.field, self.datum
        idxs = self.hol.degree_indices(1)
        rows = []
        rhs = []
        for j in range(datum.rank):
            img_rows = {}
            for pos, a in enumerate(idxs):
                img = self.hol.apply_letter(F(j), {a: field.one})
                for w, c in img.items():
                    img_rows.setdefault(w, {})[pos] = c
            targets = sorted(img_rows)
            for w in targets:
                rows.append([img_rows[w].get(pos, field.zero)
                             for pos in range(len(idxs))])
                want = field.zero
                if j == datum.l0 and w == 0:
                    want = field.q_power(Fraction(datum.d[datum.l0], 2))
                rhs.append(want)
        sol = solve(rows, [rhs], field)[0]
        if sol is None:
            raise InvalidArgument("no solution for the lowest-weight generator")
        return self.from_hol({a: c for a, c in zip(idxs, sol) if not c.is_zero()})

    # -- involution --------------------------------------------------------------------

    def _star_setup(self):
        if self._star_data is not None:
            return self._star_data
        field, datum = self.field, self.datum
        hol1 = self.hol.degree_indices(1)
        ahol1 = self.ahol.degree_indices(1)
        n = len(hol1)
        if len(ahol1) != n:
            raise InvalidArgument("degree-one pieces of the two sides differ")
        # unknown antilinear map Phi: hol_1 -> ahol_1 with
        # Phi . conj(A_xi) = B_{S(xi)*} . Phi for xi in the Levi part,
        # pinned by the F_{l0} condition.
        unknowns = n * n  # Phi[row ahol1-pos][col hol1-pos]
        rows = []
        rhs = []

        def add_rows(mat_a, mat_b, extra=None, scale=None):
            # Phi conj(A) = B Phi (+ inhomogeneous part per hol column)
            for col in range(n):
                for r in range(n):
                    row = [field.zero] * unknowns
                    for k in range(n):
                        row[r * n + k] = row[r * n + k] + mat_a[k][col].conjugate()
                        # minus B Phi
                    for k in range(n):
                        row[k * n + col] = row[k * n + col] - mat_b[r][k]
                    rows.append(row)
                    rhs.append(field.zero if extra is None else extra[r][col])

        levi = [K(i) for i in range(datum.rank)]
        levi += [E(j) for j in range(datum.rank) if j != datum.l0]
        levi += [F(j) for j in range(datum.rank) if j != datum.l0]
        for letter in levi:
            mat_a = self._restricted_matrix(self.hol, UqElement.generator(
                field, datum, letter), hol1, hol1)
            img = UqElement.generator(field, datum, letter).antipode() \
                .involution("star")
            mat_b = self._restricted_matrix(self.ahol, img, ahol1, ahol1)
            add_rows(mat_a, mat_b)
        # F_{l0}: conj(F z-part scalar) = q_{l0}^2 E_{l0} Phi(z)
        qsq = field.q_power(2 * datum.d[datum.l0])
        e_cols = {}
        for pos, b in enumerate(ahol1):
            img = self.ahol.apply_letter(E(datum.l0), {b: field.one})
            e_cols[pos] = img.get(0, field.zero)
        for col in range(n):
            f_img = self.hol.apply_letter(F(datum.l0), {hol1[col]: field.one})
            scalar = f_img.get(0, field.zero)
            row = [field.zero] * unknowns
            for k in range(n):
                row[k * n + col] = qsq * e_cols[k]
            rows.append(row)
            rhs.append(scalar.conjugate())
        sol = solve(rows, [rhs], field)[0]
        if sol is None:
            raise InvalidArgument("no antilinear involution on the degree-one piece")
        phi = [[sol[r * n + c] for c in range(n)] for r in range(n)]
        psi = invert([[phi[r][c].conjugate() for c in range(n)] for r in range(n)],
                     field)
        self._star_data = (hol1, ahol1, phi, psi)
        return self._star_data

    def _restricted_matrix(self, module, element, cols, rows_idx):
        field = self.field
        out = [[field.zero] * len(cols) for _ in rows_idx]
        pos_of = {b: r for r, b in enumerate(rows_idx)}
        for cpos, a in enumerate(cols):
            img = element.act(module, {a: field.one})
            for b, c in img.items():
                r = pos_of.get(b)
                if r is None:
                    raise InvalidArgument("action leaves the degree-one piece")
                out[r][cpos] = c
        return out

    def _product_basis(self, side, g):
        """Spanning products of degree-one dual elements: list of
        (tuple of degree-1 positions, vector dict), plus solver."""
        key = (side, g)
        cached = self._prod_basis.get(key)
        if cached is not None:
            return cached
        field = self.field
        module = self.hol if side == "hol" else self.ahol
        mul = self.mul_hol if side == "hol" else self.mul_ahol
        ones = module.degree_indices(1)
        target = module.degree_indices(g)
        pos = {w: p for p, w in enumerate(target)}
        if g == 0:
            data = ([((), {0: field.one})], [[field.one]])
            self._prod_basis[key] = data
            return data
        if g == 1:
            prods = [((p,), {a: field.one}) for p, a in enumerate(ones)]
        else:
            prev, _ = self._product_basis(side, g - 1)
            prods = []
            for word, vec in prev:
                for p, a in enumerate(ones):
                    new = {}
                    for w0, c0 in vec.items():
                        tbl = mul(w0, a)
                        for w1, c1 in tbl.items():
                            s = new.get(w1, field.zero) + c0 * c1
                            if s.is_zero():
                                new.pop(w1, None)
                            else:
                                new[w1] = s
                    prods.append((word + (p,), new))
            vectors = [[vec.get(w, field.zero) for w in target]
                       for _, vec in prods]
            chosen = independent_subset(vectors, field)
            prods = [prods[k] for k in chosen]
        if len(prods) != len(target):
            raise InvalidArgument(
                f"degree-{g} piece not generated by degree one")
        basis_cols = [[vec.get(w, field.zero) for _, vec in prods]
                      for w in target]
        inv = invert(basis_cols, field)
        data = (prods, inv)
        self._prod_basis[key] = data
        return data

    def star_side_vector(self, side, vec):
        """Image of a one-sided element under the involution, computed by
        reversing spanning products of degree-one elements."""
        field = self.field
        hol1, ahol1, phi, psi = self._star_setup()
        module = self.hol if side == "hol" else self.ahol
        other_mul = self.mul_ahol if side == "hol" else self.mul_hol
        ones = hol1 if side == "hol" else ahol1
        other_ones = ahol1 if side == "hol" else hol1
        m = phi if side == "hol" else psi
        by_degree = {}
        for a, c in vec.items():
            by_degree.setdefault(module.degree(a), {})[a] = c
        out = {}
        for g, comp in by_degree.items():
            prods, inv = self._product_basis(side, g)
            target = module.degree_indices(g)
            coords = [comp.get(w, field.zero) for w in target]
            in_prod = [sum((inv[r][c] * coords[c] for c in range(len(coords))),
                           field.zero) for r in range(len(prods))]
            for (word, _), c in zip(prods, in_prod):
                if c.is_zero():
                    continue
                c = c.conjugate()
                # (z_{c1} ... z_{cg})^* = z_{cg}^* ... z_{c1}^*
                acc = None
                for p in reversed(word):
                    img = {other_ones[r]: m[r][p] for r in range(len(other_ones))
                           if not m[r][p].is_zero()}
                    if acc is None:
                        acc = img
                    else:
                        new = {}
                        for w0, c0 in acc.items():
                            for w1, c1 in img.items():
                                tbl = other_mul(w0, w1)
                                for w2, c2 in tbl.items():
                                    s = new.get(w2, field.zero) + c0 * c1 * c2
                                    if s.is_zero():
                                        new.pop(w2, None)
                                    else:
                                        new[w2] = s
                        acc = new
                if acc is None:
                    acc = {0: field.one}
                for w, cc in acc.items():
                    s = out.get(w, field.zero) + c * cc
                    if s.is_zero():
                        out.pop(w, None)
                    else:
                        out[w] = s
        return out

    def star(self, x: PolElement):
        """Antilinear anti-homomorphism exchanging the two sides."""
        field = self.field
        out = PolElement(self)
        for (a, b), c in x.terms.items():
            left = self.star_side_vector("ahol", {b: field.one})  # in hol
            right = self.star_side_vector("hol", {a: field.one})  # in ahol
            term = PolElement(self, {(w1, w2): c.conjugate() * c1 * c2
                                     for w1, c1 in left.items()
                                     for w2, c2 in right.items()})
            out = out + term
        return out

    # -- sesquilinear structure ---------------------------------------------------

    def pairing(self, f1: PolElement, f2: PolElement):
        """(f1, f2) = <f2^* f1>."""
        return self.multiply(self.star(f2), f1).bracket()

    def gram_hol(self, g):
        field = self.field
        idxs = self.hol.degree_indices(g)
        els = [self.from_hol({a: field.one}) for a in idxs]
        stars = [self.star(e) for e in els]
        return [[self.multiply(stars[j], els[i]).bracket()
                 for j in range(len(els))] for i in range(len(els))]


def build_pol(field, datum, cut):
    return PolAlgebra(field, datum, cut)


class FockSpace:
    """Vacuum representation on the holomorphic side of the truncation."""

    def __init__(self, ctx: PolAlgebra):
        self.ctx = ctx
        self.field = ctx.field

    def gram(self, k):
        return self.ctx.gram_hol(k)

    def matrix_block(self, x: PolElement, k_from):
        """T_F(x) restricted to the degree-k piece, as {(row idx, col idx): c}
        over hol basis indices; degree overflow raises."""
        ctx = self.ctx
        field = self.field
        cols = {}
        for a in ctx.hol.degree_indices(k_from):
            img = ctx.multiply(x, ctx.from_hol({a: field.one}))
            vec = {}
            for (h, b), c in img.terms.items():
                if b == 0:
                    vec[h] = c
                # components with b != 0 annihilate the vacuum
            cols[a] = vec
        return cols

    def vacuum_cyclicity_defect(self, upto):
        """Vectors of degree 1..upto killed by every degree-(0,1) operator."""
        ctx = self.ctx
        field = self.field
        ahol1 = ctx.ahol.degree_indices(1)
        defect = []
        for k in range(1, upto + 1):
            idxs = ctx.hol.degree_indices(k)
            rows = {}
            for pos, a in enumerate(idxs):
                for b in ahol1:
                    img = ctx.multiply(ctx.from_ahol({b: field.one}),
                                       ctx.from_hol({a: field.one}))
                    for (h, bb), c in img.terms.items():
                        if bb == 0:
                            rows.setdefault((b, h), {})[pos] = c
            mat = [[r.get(pos, field.zero) for pos in range(len(idxs))]
                   for r in rows.values()]
            kern = [] if not mat else _nullspace_dim(mat, field)
            if mat and kern:
                defect.append((k, kern))
            if not mat and idxs:
                defect.append((k, len(idxs)))
        return defect

    def hom_block_rank(self, k, j):
        """Rank of the map from bidegree (k, j) to Hom(H_j, H_k)."""
        ctx = self.ctx
        field = self.field
        hk = ctx.hol.degree_indices(k)
        hj = ctx.hol.degree_indices(j)
        rows = []
        for a in hk:
            for b in ctx.ahol.degree_indices(j):
                x = PolElement(ctx, {(a, b): field.one})
                block = self.matrix_block(x, j)
                row = []
                for col in hj:
                    vec = block.get(col, {})
                    row.extend(vec.get(r, field.zero) for r in hk)
                rows.append(row)
        if not rows:
            return 0, 0
        return rank_at_sample(rows), len(rows)


def _nullspace_dim(mat, field):
    from .linalg import rank
    return len(mat[0]) - rank_at_sample(mat) if mat else 0


# ---------------------------------------------------------------------------
# invariants, localization at y, boundary quotient
# ---------------------------------------------------------------------------

class InvariantFamily:
    """The invariant elements y_1..y_r and y = 1 + sum (-1)^i y_i."""

    def __init__(self, ctx: PolAlgebra, z_levels):
        """z_levels: list over i = 1..r of lists of degree-(1,0) ... (i,0)
        elements z_{lam,j} at H_S-level i (images of top-row coefficients)."""
        self.ctx = ctx
        field = ctx.field
        self.y_list = []
        for level in z_levels:
            acc = PolElement(ctx)
            for z in level:
                acc = acc + ctx.multiply(z, ctx.star(z))
            self.y_list.append(acc)
        y = ctx.one()
        for i, yi in enumerate(self.y_list, start=1):
            y = y + yi.scale(field.from_constant((-1) ** i))
        self.y = y

    def self_adjoint_defects(self):
        return [i + 1 for i, yi in enumerate(self.y_list)
                if not (self.ctx.star(yi) - yi).is_zero()]

    def commutation_defects(self):
        bad = []
        for i in range(len(self.y_list)):
            for j in range(i + 1, len(self.y_list)):
                lhs = self.ctx.multiply(self.y_list[i], self.y_list[j])
                rhs = self.ctx.multiply(self.y_list[j], self.y_list[i])
                if not (lhs - rhs).is_zero():
                    bad.append((i + 1, j + 1))
        return bad

    def levi_invariance_defects(self):
        ctx = self.ctx
        datum = ctx.datum
        bad = []
        for idx, yi in enumerate(self.y_list, start=1):
            for j in range(datum.rank):
                if j != datum.l0:
                    if not ctx.act_letter(E(j), yi).is_zero():
                        bad.append((idx, ("E", j)))
                    if not ctx.act_letter(F(j), yi).is_zero():
                        bad.append((idx, ("F", j)))
                if not (ctx.act_letter(K(j), yi) - yi).is_zero():
                    bad.append((idx, ("K", j)))
        return bad


def quasi_commutation_defects(ctx: PolAlgebra, y: PolElement):
    """Check z y = q_{l0}^{-2} y z and z^* y = q_{l0}^{2} y z^* for all
    degree-one generators z; returns offending indices."""
    field, datum = ctx.field, ctx.datum
    q2 = field.q_power(2 * datum.d[datum.l0])
    bad = []
    for a in ctx.hol.degree_indices(1):
        z = ctx.from_hol({a: field.one})
        lhs = ctx.multiply(z, y)
        rhs = ctx.multiply(y, z).scale(q2.inverse())
        if not (lhs - rhs).is_zero():
            bad.append(("z", a))
        zs = ctx.star(z)
        lhs = ctx.multiply(zs, y)
        rhs = ctx.multiply(y, zs).scale(q2)
        if not (lhs - rhs).is_zero():
            bad.append(("z*", a))
    return bad


class LocalizedPol:
    """Pair (f, m) representing f y^{-m}, with the monomial rewriting
    y^{-m} g = q_{l0}^{-2 m (i - j)} g y^{-m} per bidegree (i, j)."""

    __slots__ = ("ctx", "num", "power")

    def __init__(self, ctx, num: PolElement, power: int = 0):
        self.ctx = ctx
        self.num = num
        self.power = power

    def multiply(self, other):
        ctx = self.ctx
        field = ctx.field
        d = ctx.datum.d[ctx.datum.l0]
        moved = PolElement(ctx)
        for (a, b), c in other.num.terms.items():
            i = ctx.hol.degree(a)
            j = ctx.ahol.degree(b)
            scale = field.q_power(-2 * d * self.power * (i - j))
            moved = moved + PolElement(ctx, {(a, b): c * scale})
        return LocalizedPol(ctx, ctx.multiply(self.num, moved),
                            self.power + other.power)

    def equal(self, other, y: PolElement):
        """Equality after clearing denominators with the invariant y."""
        a, b = self, other
        num_a, num_b = a.num, b.num
        for _ in range(max(0, b.power - a.power)):
            num_a = self.ctx.multiply(num_a, y)
        for _ in range(max(0, a.power - b.power)):
            num_b = self.ctx.multiply(num_b, y)
        return (num_a - num_b).is_zero()


def boundary_quotient_data(ctx: PolAlgebra, y: PolElement, bound):
    """Two-sided ideal (y) computed inside the filtered piece with
    bidegrees <= bound; returns per-bidegree dimension drops and the
    stability defects of the ideal under the parabolic generators."""
    field = ctx.field
    max_i, max_j = bound
    basis = []  # (a, b) keys filtered
    for a in range(ctx.hol.dim):
        for b in range(ctx.ahol.dim):
            if ctx.hol.degree(a) <= max_i and ctx.ahol.degree(b) <= max_j:
                basis.append((a, b))
    pos = {k: p for p, k in enumerate(basis)}

    def vec_of(x: PolElement):
        row = [field.zero] * len(basis)
        for key, c in x.terms.items():
            p = pos.get(key)
            if p is None:
                return None  # leaves the filtered window
            row[p] = c
        return row

    gens = []
    for a in range(ctx.hol.dim):
        for b in range(ctx.ahol.dim):
            u = PolElement(ctx, {(a, b): field.one})
            try:
                prod = ctx.multiply(u, y)
            except TruncationExceeded:
                continue
            for c in range(ctx.hol.dim):
                for e in range(ctx.ahol.dim):
                    w = PolElement(ctx, {(c, e): field.one})
                    try:
                        el = ctx.multiply(prod, w)
                    except TruncationExceeded:
                        continue
                    row = vec_of(el)
                    if row is not None and any(not x.is_zero() for x in row):
                        gens.append((el, row))
    solver = SpanSolver(field)
    ideal_rows = []
    for k, (_, row) in enumerate(gens):
        if solver.insert(row, k) is None:
            ideal_rows.append(row)
    # dimension drop per bidegree of the filtered quotient
    drops = {}
    for (i, j) in sorted({(ctx.hol.degree(a), ctx.ahol.degree(b))
                          for a, b in basis}):
        sub = [p for p, (a, b) in enumerate(basis)
               if ctx.hol.degree(a) == i and ctx.ahol.degree(b) == j]
        mat = [[row[p] for p in sub] for row in ideal_rows]
        mat = [r for r in mat if any(not x.is_zero() for x in r)]
        drop = rank_at_sample(mat) if mat else 0
        drops[(i, j)] = (len(sub), drop)
    # stability: E_{l0} y and F_{l0} y lie in the ideal span
    stable = {}
    for letter in (E(ctx.datum.l0), F(ctx.datum.l0)):
        img = ctx.act_letter(letter, y)
        row = vec_of(img)
        if row is None:
            stable[letter] = None
        else:
            residual, _ = solver.reduce(row)
            stable[letter] = all(x.is_zero() for x in residual)
    return drops, stable


def pol_u_twist(ctx: PolAlgebra, x: PolElement):
    """The compact twist f -> (-1)^{deg f} f^* on the crossed product."""
    field = ctx.field
    out = PolElement(ctx)
    star = ctx.star(x)
    for (a, b), c in star.terms.items():
        deg = ctx.hol.degree(a) - ctx.ahol.degree(b)
        sign = field.one if deg % 2 == 0 else -field.one
        out = out + PolElement(ctx, {(a, b): c * sign})
    return out
