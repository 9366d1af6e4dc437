"""Exact computations with lowering-operator words relative to a highest
weight.

Everything in this module works purely from the defining relations: no
module basis is presupposed.  ``VermaWords`` provides, for a fixed
dominant weight lam,

* ``e_apply(i, word)``: the expansion of E_i F_{word} v as a combination
  of shorter F-words applied to v,
* ``pairing(w1, w2)``: the contravariant (Shapovalov) form
  (F_{w1} v, F_{w2} v) with respect to the compact involution
  E^star = K F, F^star = E K^{-1},
* adaptive word families spanning a given weight space of the negative
  part, sized by the Kostant partition count.

These coordinates realize U^-_{-nu} faithfully whenever lam dominates nu
coordinate-wise, which is how the generalized Verma truncations are cut
out by exact linear algebra.
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import InvalidArgument
from .linalg import _eliminate, rank_at_sample
from .rootdata import RootDatum
from .scalars import ScalarField


def word_root_coords(datum, word):
    nu = [0] * datum.rank
    for _, i in word:
        nu[i] += 1
    return tuple(nu)


def kostant_partition_count(datum: RootDatum, nu):
    """Number of ways to write nu as a sum of positive roots (with
    multiplicity); the dimension of the weight-(-nu) piece of U^-."""
    counts = {(0,) * datum.rank: 1}
    for beta in datum.positive_roots:
        new = dict(counts)
        for target in sorted(_cone_points(nu), key=sum):
            prev = tuple(t - b for t, b in zip(target, beta))
            if all(c >= 0 for c in prev) and prev in new:
                new[target] = new.get(target, 0) + new[prev]
        counts = new
    return counts.get(tuple(nu), 0)


def _cone_points(nu):
    if not nu:
        yield ()
        return
    head, rest = nu[0], nu[1:]
    for t in _cone_points(rest):
        for c in range(head + 1):
            yield (c,) + t


class VermaWords:
    """Recursive word calculus in the Verma module of highest weight lam."""

    def __init__(self, field: ScalarField, datum: RootDatum, lam):
        self.field = field
        self.datum = datum
        self.lam = tuple(lam)
        self._e_cache = {}
        self._p_cache = {}
        self._w_cache = {(): self.lam}

    def weight_of(self, word):
        cached = self._w_cache.get(word)
        if cached is not None:
            return cached
        prev = self.weight_of(word[1:])
        col = self.datum.simple_root(word[0][1])
        out = tuple(x - y for x, y in zip(prev, col))
        self._w_cache[word] = out
        return out

    def _k_bracket(self, i, mu_i):
        """(q_i^{mu_i} - q_i^{-mu_i}) / (q_i - q_i^{-1})."""
        qi = self.field.q_power(self.datum.d[i])
        return self.field.q_int(mu_i, base=qi)

    def e_apply(self, i, word):
        """E_i F_{word} v as dict {shorter word: Scalar}."""
        key = (i, word)
        cached = self._e_cache.get(key)
        if cached is not None:
            return cached
        if not word:
            out = {}
        else:
            head, rest = word[0], word[1:]
            j = head[1]
            out = {}
            for w, c in self.e_apply(i, rest).items():
                key2 = (head,) + w
                out[key2] = out.get(key2, self.field.zero) + c
            if j == i:
                mu = self.weight_of(rest)
                c = self._k_bracket(i, mu[i])
                if not c.is_zero():
                    out[rest] = out.get(rest, self.field.zero) + c
            out = {w: c for w, c in out.items() if not c.is_zero()}
        self._e_cache[key] = out
        return out

    def pairing(self, w1, w2):
        """Contravariant form (F_{w1} v, F_{w2} v); exact Scalar."""
        if len(w1) != len(w2):
            return self.field.zero
        key = (w1, w2)
        cached = self._p_cache.get(key)
        if cached is not None:
            return cached
        if not w1:
            return self.field.one
        if word_root_coords(self.datum, w1) != word_root_coords(self.datum, w2):
            self._p_cache[key] = self.field.zero
            return self.field.zero
        # (F_i u v, w2 v) = (u v, E_i K_i^{-1} w2 v)
        i = w1[0][1]
        rest = w1[1:]
        mu = self.weight_of(w2)
        qi = self.field.q_power(self.datum.d[i])
        scale = qi ** (-mu[i])
        total = self.field.zero
        for w, c in self.e_apply(i, w2).items():
            total = total + c * self.pairing(rest, w)
        total = scale * total
        self._p_cache[key] = total
        return total

    # -- adaptive spanning families -------------------------------------------

    def weight_family(self, nu):
        """Deterministic list of F-words of root weight nu whose Shapovalov
        Gram has full rank kostant(nu); cached."""
        nu = tuple(nu)
        cache = getattr(self, "_fam_cache", None)
        if cache is None:
            cache = self._fam_cache = {}
        if nu in cache:
            return cache[nu]
        target = kostant_partition_count(self.datum, nu)
        if any(n > l for n, l in zip(nu, _root_caps(self.datum, self.lam))):
            raise InvalidArgument("weight outside the radical-free cone")
        # sampled rank certifies full rank of the chosen Gram exactly
        family = []
        gram = []
        for word in _words_of_weight(self.datum, nu):
            row = [self.pairing(word, f) for f in family] + [self.pairing(word, word)]
            trial = [g + [row[k]] for k, g in enumerate(gram)] + [row]
            if rank_at_sample(trial) > len(family):
                family.append(word)
                gram = trial
                if len(family) == target:
                    break
        if len(family) != target:
            raise InvalidArgument(
                f"could not span weight space {nu}: got {len(family)} of {target}")
        cache[nu] = family
        return family

    def coords(self, combo, nu):
        """Coordinates of an element sum_w c_w F_w v against the family of nu."""
        fam = self.weight_family(nu)
        out = []
        for f in fam:
            acc = self.field.zero
            for w, c in combo.items():
                acc = acc + c * self.pairing(w, f)
            out.append(acc)
        return out


def _root_caps(datum, lam):
    return lam


def _rank_of(rows):
    if not rows:
        return 0
    work = [list(r) for r in rows]
    return len(_eliminate(work, len(rows[0])))


def _words_of_weight(datum, nu):
    """Lazily enumerate all words in the F_i with letter counts nu,
    lexicographically by letter index."""
    total = sum(nu)
    counts = list(nu)

    def gen(counts, length):
        if length == 0:
            yield ()
            return
        for i in range(datum.rank):
            if counts[i]:
                counts[i] -= 1
                for tail in gen(counts, length - 1):
                    yield (("F", i),) + tail
                counts[i] += 1

    return gen(counts, total)
