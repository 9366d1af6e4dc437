"""Weight modules: simple L(lam), truncated generalized Verma modules,
tensor products, contravariant forms, special bases, matrix coefficients.

Simple modules are built by closing F-words over the highest vector and
quotienting by the radical of the contravariant form, weight by weight;
dimensions are checked against the Weyl dimension formula.  Generalized
Verma modules are built up to a grading cut from F-words modulo the
relation kernel, which is computed by exact linear algebra in the
radical-free cone of an auxiliary Verma module (see ``shapovalov``).
"""

from __future__ import annotations

from .exceptions import (BadVector, InvalidArgument, NoWitness, NotDominant,
                         TruncationExceeded)
from .linalg import coordinates, independent_subset
from .shapovalov import VermaWords
from .uq import F


def _vec_add(field, acc, vec, scale=None):
    for idx, c in vec.items():
        if scale is not None:
            c = scale * c
        s = acc.get(idx, field.zero) + c
        if s.is_zero():
            acc.pop(idx, None)
        else:
            acc[idx] = s
    return acc


class WeightModuleBase:
    """Shared letter-action plumbing; weights are stored per basis index."""

    def apply_letter(self, letter, vec):
        kind, i = letter
        if kind in ("K", "Ki"):
            out = {}
            exp = 1 if kind == "K" else -1
            for idx, c in vec.items():
                w = self.weights[idx]
                if w[i]:
                    c = c * self.field.q_power(exp * self.datum.d[i] * w[i])
                if not c.is_zero():
                    out[idx] = c
            return out
        return self._apply_ef(kind, i, vec)

    def _apply_ef(self, kind, i, vec):
        raise NotImplementedError

    def act_word(self, word, vec):
        for letter in reversed(word):
            vec = self.apply_letter(letter, vec)
            if not vec:
                break
        return vec

    def basis_vector(self, idx):
        if not 0 <= idx < self.dim:
            raise BadVector(f"index {idx} out of range for dim {self.dim}")
        return {idx: self.field.one}

    def weight_indices(self, mu):
        return [k for k in range(self.dim) if self.weights[k] == tuple(mu)]


class SimpleModule(WeightModuleBase):
    """Finite dimensional simple module of a dominant highest weight."""

    kind = "simple"

    def __init__(self, field, datum, lam):
        if not datum.is_dominant(lam):
            raise NotDominant(f"{lam} is not dominant")
        self.field = field
        self.datum = datum
        self.highest_weight = tuple(lam)
        self._words = VermaWords(field, datum, lam)
        self._gram_cache = {}
        self._build()

    def _build(self):
        field, datum = self.field, self.datum
        words = [()]
        weights = [self.highest_weight]
        reductions = {(): {0: field.one}}
        e_act = {}
        f_act = {}
        frontier = {self.highest_weight: [0]}
        parents = {0: None}
        while frontier:
            cand = {}
            for mu, idxs in sorted(frontier.items()):
                for idx in idxs:
                    for i in range(datum.rank):
                        target = tuple(a - b for a, b in
                                       zip(mu, datum.simple_root(i)))
                        cand.setdefault(target, []).append((i, idx))
            new_frontier = {}
            for mu, pairs in sorted(cand.items()):
                wlist = [((F(i),) + words[idx]) for i, idx in pairs]
                gram = [[self._words.pairing(w1, w2) for w2 in wlist]
                        for w1 in wlist]
                chosen = independent_subset(gram, field)
                new_ids = []
                for pos in chosen:
                    w = wlist[pos]
                    idx = len(words)
                    words.append(w)
                    weights.append(mu)
                    reductions[w] = {idx: field.one}
                    parents[idx] = pairs[pos]
                    new_ids.append(idx)
                basis_rows = [gram[pos] for pos in chosen]
                for k, w in enumerate(wlist):
                    if w in reductions:
                        continue
                    if not new_ids:
                        reductions[w] = {}
                        continue
                    coords = coordinates(basis_rows, gram[k], field)
                    reductions[w] = {new_ids[s]: coords[s]
                                     for s in range(len(new_ids))
                                     if not coords[s].is_zero()}
                if new_ids:
                    new_frontier[mu] = new_ids
            # record F-action for the frontier we just expanded
            for mu, idxs in frontier.items():
                for idx in idxs:
                    for i in range(datum.rank):
                        w = (F(i),) + words[idx]
                        f_act[(i, idx)] = reductions.get(w, {})
            # E-action on the new layer via the commutation relation
            for mu, idxs in new_frontier.items():
                for idx in idxs:
                    j, parent = parents[idx]
                    mu_parent = weights[parent]
                    for i in range(datum.rank):
                        vec = {}
                        up = e_act.get((i, parent), {})
                        for k, c in up.items():
                            _vec_add(field, vec, f_act.get((j, k), {}), c)
                        if i == j:
                            qi = field.q_power(datum.d[i])
                            bracket = field.q_int(mu_parent[i], base=qi)
                            if not bracket.is_zero():
                                _vec_add(field, vec, {parent: field.one}, bracket)
                        e_act[(i, idx)] = vec
            frontier = new_frontier
        self.words = words
        self.weights = weights
        self.dim = len(words)
        self._e_act = e_act
        self._f_act = f_act
        expected = self.datum.weyl_dimension(self.highest_weight)
        if self.dim != expected:
            raise InvalidArgument(
                f"built dim {self.dim} != Weyl dimension {expected}")

    def _apply_ef(self, kind, i, vec):
        table = self._e_act if kind == "E" else self._f_act
        out = {}
        for idx, c in vec.items():
            _vec_add(self.field, out, table.get((i, idx), {}), c)
        return out

    # -- contravariant form -------------------------------------------------

    def gram_entry(self, i, j):
        if self.weights[i] != self.weights[j]:
            return self.field.zero
        key = (min(i, j), max(i, j))
        val = self._gram_cache.get(key)
        if val is None:
            val = self._words.pairing(self.words[key[0]], self.words[key[1]])
            self._gram_cache[key] = val
        return val

    def pairing(self, u, v):
        """Contravariant Hermitian form; antilinear in the second slot."""
        total = self.field.zero
        for i, ci in u.items():
            for j, cj in v.items():
                g = self.gram_entry(i, j)
                if not g.is_zero():
                    total = total + g * ci * cj.conjugate()
        return total

    def to_json_dict(self):
        mats = {}
        for kind, table in (("E", self._e_act), ("F", self._f_act)):
            for (i, col), vec in table.items():
                trip = mats.setdefault(f"{kind}{i + 1}", [])
                for row, c in vec.items():
                    trip.append([row, col, c.describe()])
        return {
            "kind": self.kind,
            "highest_weight": list(self.highest_weight),
            "dim": self.dim,
            "weights": [list(w) for w in self.weights],
            "action": mats,
        }


def build_simple(field, datum, lam):
    return SimpleModule(field, datum, lam)


class GeneralizedVerma(WeightModuleBase):
    """Generalized Verma module with scalar generator, truncated at ``cut``.

    sign '+' is the highest-weight-zero module graded in degrees
    0..-cut; sign '-' is its mirror under E <-> F, K <-> K^{-1}.

    The F-word quotient classes are read off the simple module of highest
    weight cut * fundamental(l0), which realizes the same right-ideal
    quotient of the negative part in all grades <= cut (the first
    reduction of that module happens in grade cut + 1).  Only the E-action
    depends on the trivial character; it is recomputed symbolically.
    """

    kind = "generalized-verma"

    def __init__(self, field, datum, sign, cut):
        datum.require_hermitian()
        if cut < 0:
            raise InvalidArgument("cut must be >= 0")
        if sign not in ("+", "-"):
            raise InvalidArgument("sign must be '+' or '-'")
        self.field = field
        self.datum = datum
        self.sign = sign
        self.cut = cut
        self._build_raw()
        if sign == "+":
            self.weights = [self._raw_weight(w) for w in self.words]
        else:
            self.weights = [tuple(-x for x in self._raw_weight(w))
                            for w in self.words]

    def _raw_weight(self, word):
        lam = [0] * self.datum.rank
        for _, i in word:
            col = self.datum.simple_root(i)
            lam = [a - b for a, b in zip(lam, col)]
        return tuple(lam)

    def _grade_of_l_weight(self, mu):
        diff = tuple(a - b for a, b in zip(self._big.highest_weight, mu))
        coords = self.datum._weight_to_root_coords(diff)
        g = coords[self.datum.l0]
        if g.denominator != 1:
            raise InvalidArgument("weight off the root lattice")
        return int(g)

    def _build_raw(self):
        field, datum = self.field, self.datum
        l0 = datum.l0
        big_weight = tuple(self.cut * int(i == l0) for i in range(datum.rank))
        self._big = build_simple(field, datum, big_weight)
        selected = [k for k in range(self._big.dim)
                    if self._grade_of_l_weight(self._big.weights[k]) <= self.cut]
        selected.sort(key=lambda k: (self._grade_of_l_weight(self._big.weights[k]), k))
        self._to_big = selected
        self._from_big = {b: n for n, b in enumerate(selected)}
        self.words = [self._big.words[b] for b in selected]
        self.grades = [self._grade_of_l_weight(self._big.weights[b])
                       for b in selected]
        self.dim = len(selected)
        self._windex = {w: n for n, w in enumerate(self.words)}
        self._zero_words = VermaWords(field, datum, datum.zero_weight())
        self._f_act = {}
        self._e_act = {}
        for n, b in enumerate(selected):
            g = self.grades[n]
            for i in range(datum.rank):
                if i == l0 and g == self.cut:
                    self._f_act[(i, n)] = None  # beyond the truncation
                    continue
                self._f_act[(i, n)] = self._restrict(self._big._f_act[(i, b)])
            for i in range(datum.rank):
                vec = {}
                for ww, c in self._zero_words.e_apply(i, self.words[n]).items():
                    _vec_add(field, vec, self._class_of_word(ww), c)
                self._e_act[(i, n)] = vec
        self._coproducts = {}

    def _restrict(self, big_vec):
        out = {}
        for b, c in big_vec.items():
            n = self._from_big.get(b)
            if n is None:
                raise InvalidArgument("action left the truncation unexpectedly")
            out[n] = c
        return out

    def _class_of_word(self, word):
        """Image of an F-word in the truncated quotient, via the realizing
        simple module (the class structure does not depend on the
        character)."""
        vec = self._big.act_word(word, {0: self.field.one})
        return self._restrict(vec)

    def _apply_ef(self, kind, i, vec):
        raw = kind
        if self.sign == "-":
            raw = "F" if kind == "E" else "E"
        table = self._f_act if raw == "F" else self._e_act
        out = {}
        for idx, c in vec.items():
            col = table.get((i, idx), {})
            if col is None:
                raise TruncationExceeded(
                    f"action leaves the degree-{self.cut} truncation")
            _vec_add(self.field, out, col, c)
        return out

    def grade(self, idx):
        return self.grades[idx]

    def grade_indices(self, g):
        return [k for k in range(self.dim) if self.grades[k] == g]

    # -- coalgebra ----------------------------------------------------------

    def coproduct_of_index(self, idx):
        """Delta(basis idx) as dict (idx1, idx2) -> Scalar (chirality-aware)."""
        raw = self._raw_coproduct(idx)
        if self.sign == "+":
            return raw
        return {(b, a): c for (a, b), c in raw.items()}

    def _raw_coproduct(self, idx):
        cached = self._coproducts.get(idx)
        if cached is not None:
            return cached
        word = self.words[idx]
        if not word:
            out = {(0, 0): self.field.one}
        else:
            i = word[0][1]
            parent = self._windex[word[1:]]
            prev = self._raw_coproduct(parent)
            out = {}
            qi = self.field.q_power(self.datum.d[i])
            for (a, b), c in prev.items():
                # K_i^{-1} a (x) F_i b
                wa = self._raw_weight(self.words[a])
                scale = c * qi ** (-wa[i])
                fb = self._f_act[(i, b)]
                for b2, cb in (fb or {}).items():
                    key = (a, b2)
                    _vec_add_pair(self.field, out, key, scale * cb)
                # F_i a (x) b
                fa = self._f_act[(i, a)]
                for a2, ca in (fa or {}).items():
                    key = (a2, b)
                    _vec_add_pair(self.field, out, key, c * ca)
        self._coproducts[idx] = out
        return out


def _vec_add_pair(field, acc, key, c):
    s = acc.get(key, field.zero) + c
    if s.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = s


def build_generalized_verma(field, datum, sign, cut):
    return GeneralizedVerma(field, datum, sign, cut)


def verma_coproduct(module: GeneralizedVerma, vec):
    """Coproduct of a vector of the truncated generalized Verma module."""
    out = {}
    for idx, c in vec.items():
        if not 0 <= idx < module.dim:
            raise NoWitness(f"index {idx} has no generator-word witness")
        for key, v in module.coproduct_of_index(idx).items():
            _vec_add_pair(module.field, out, key, c * v)
    return out


class TensorModule(WeightModuleBase):
    """Tensor product of weight modules with the coproduct action."""

    kind = "tensor"

    def __init__(self, factors):
        if not factors:
            raise InvalidArgument("need at least one factor")
        self.factors = list(factors)
        self.field = factors[0].field
        self.datum = factors[0].datum
        dims = [m.dim for m in self.factors]
        self.dim = 1
        for d in dims:
            self.dim *= d
        self._dims = dims
        self.weights = []
        for flat in range(self.dim):
            idxs = self.split(flat)
            w = [0] * self.datum.rank
            for m, k in zip(self.factors, idxs):
                w = [a + b for a, b in zip(w, m.weights[k])]
            self.weights.append(tuple(w))

    def split(self, flat):
        out = []
        for d in reversed(self._dims):
            out.append(flat % d)
            flat //= d
        return tuple(reversed(out))

    def join(self, idxs):
        flat = 0
        for d, k in zip(self._dims, idxs):
            flat = flat * d + k
        return flat

    def _apply_ef(self, kind, i, vec):
        out = {}
        n = len(self.factors)
        for flat, c in vec.items():
            idxs = self.split(flat)
            for pos in range(n):
                # E: K_i on the left factors; F: K_i^{-1} on the right ones
                scale = c
                hit = self.factors[pos].apply_letter((kind, i), {idxs[pos]: self.field.one})
                if not hit:
                    continue
                if kind == "E":
                    for p in range(pos):
                        w = self.factors[p].weights[idxs[p]]
                        if w[i]:
                            scale = scale * self.field.q_power(self.datum.d[i] * w[i])
                else:
                    for p in range(pos + 1, n):
                        w = self.factors[p].weights[idxs[p]]
                        if w[i]:
                            scale = scale * self.field.q_power(-self.datum.d[i] * w[i])
                for k2, c2 in hit.items():
                    new = list(idxs)
                    new[pos] = k2
                    key = self.join(new)
                    _vec_add_pair(self.field, out, key, scale * c2)
        return out

    def pairing(self, u, v):
        """Product contravariant form (compatible with the coproduct action)."""
        total = self.field.zero
        for fu, cu in u.items():
            iu = self.split(fu)
            for fv, cv in v.items():
                iv = self.split(fv)
                prod = cu * cv.conjugate()
                if prod.is_zero():
                    continue
                term = prod
                ok = True
                for m, a, b in zip(self.factors, iu, iv):
                    g = m.gram_entry(a, b) if hasattr(m, "gram_entry") else (
                        m.field.one if a == b else m.field.zero)
                    if g.is_zero():
                        ok = False
                        break
                    term = term * g
                if ok:
                    total = total + term
        return total


# ---------------------------------------------------------------------------
# special bases and matrix coefficients
# ---------------------------------------------------------------------------

class SpecialBasisRecord:
    __slots__ = ("word", "weight", "vector", "norm_sq", "chain")

    def __init__(self, word, weight, vector, norm_sq, chain):
        self.word = word
        self.weight = weight
        self.vector = vector
        self.norm_sq = norm_sq
        self.chain = chain


def special_basis(field, datum, module=None, fundamental_index=None):
    """Extreme-weight vectors of L(fundamental) built by prescribed F-power
    chains, with exact squared norms under the contravariant form."""
    datum.require_hermitian()
    idx = datum.l1 if fundamental_index is None else fundamental_index
    if module is None:
        module = build_simple(field, datum, datum.fundamental_weight(idx))
    out = []
    for word, chain, mu in datum.coset_reps(idx):
        vec = module.basis_vector(0)
        for (i, m, _) in chain:
            for _ in range(m):
                vec = module.apply_letter(F(i), vec)
        norm = module.pairing(vec, vec)
        if norm.is_zero():
            raise InvalidArgument("special basis vector has zero norm")
        out.append(SpecialBasisRecord(word, mu, vec, norm, chain))
    return out


class MatrixCoefficient:
    """The functional xi -> (xi v_ket, v_bra) on the enveloping algebra.

    bra and ket are (weight, position) pairs addressing the module basis;
    ``normalizers`` optionally holds squared norms used to orthonormalize.
    """

    def __init__(self, module, bra, ket, bra_norm_sq=None, ket_norm_sq=None):
        self.module = module
        self.bra = self._resolve(bra)
        self.ket = self._resolve(ket)
        self.bra_norm_sq = bra_norm_sq
        self.ket_norm_sq = ket_norm_sq

    def _resolve(self, ref):
        mu, pos = ref
        idxs = self.module.weight_indices(mu)
        if pos >= len(idxs):
            raise BadVector(f"no basis vector {pos} at weight {mu}")
        return idxs[pos]

    def evaluate(self, element):
        vec = element.act(self.module, self.module.basis_vector(self.ket))
        val = self.module.pairing(vec, self.module.basis_vector(self.bra))
        field = self.module.field
        for nsq in (self.bra_norm_sq, self.ket_norm_sq):
            if nsq is not None:
                root = _exact_sqrt(field, nsq)
                val = val / root
        return val


def _exact_sqrt(field, s):
    """Square root of a monomial scalar c*u^(2k) with square rational c."""
    mono = s.monomial_exponent()
    if mono is None:
        raise InvalidArgument(f"no exact square root for {s!r}")
    c, e = mono
    if e % 2 or c.im or c.re < 0:
        raise InvalidArgument(f"no exact square root for {s!r}")
    from fractions import Fraction
    num = _isqrt_exact(c.re.numerator)
    den = _isqrt_exact(c.re.denominator)
    if num is None or den is None:
        raise InvalidArgument(f"no exact square root for {s!r}")
    return field.from_constant(Fraction(num, den)) * field.u_power(e // 2)


def _isqrt_exact(n):
    r = int(n ** 0.5)
    for c in (r - 1, r, r + 1):
        if c >= 0 and c * c == n:
            return c
    return None


def check_defining_relations(module, uq_factory):
    """Assert the Drinfeld-Jimbo relations act as zero; returns None or the
    first offending element."""
    from .uq import UqElement, casimir_like_relation, serre_element
    field, datum = module.field, module.datum
    candidates = []
    for i in range(datum.rank):
        for j in range(datum.rank):
            candidates.append(casimir_like_relation(field, datum, i, j))
            if i != j:
                candidates.append(serre_element(field, datum, i, j, True))
                candidates.append(serre_element(field, datum, i, j, False))
    for x in candidates:
        for k in range(module.dim):
            if x.act(module, {k: field.one}):
                return x
    return None
