"""The Drinfeld-Jimbo algebra as formal words in E_i, F_i, K_i^{+-1}.

Elements are finite Scalar-combinations of words; no normal form is
imposed in general (equality is decided semantically by acting on weight
modules, see ``equal_on_modules``).  For the rank-one datum a canonical
F^a K^b E^c normal form is available.

Letters are tuples ('E', i), ('F', i), ('K', i), ('Ki', i) with 0-based
node index i; ('Ki', i) is the inverse of ('K', i).
"""

from __future__ import annotations

from .exceptions import BadVector, InvalidArgument, UnsupportedDatum
from .rootdata import RootDatum
from .scalars import ScalarField


def E(i):
    return ("E", i)


def F(i):
    return ("F", i)


def K(i):
    return ("K", i)


def Kinv(i):
    return ("Ki", i)


class UqElement:
    """Scalar combination of generator words over a fixed root datum."""

    __slots__ = ("field", "datum", "terms")

    def __init__(self, field: ScalarField, datum: RootDatum, terms=None):
        self.field = field
        self.datum = datum
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if not c.is_zero():
                    self.terms[tuple(w)] = c

    # -- constructors -------------------------------------------------------

    @classmethod
    def generator(cls, field, datum, letter):
        return cls(field, datum, {(letter,): field.one})

    @classmethod
    def unit(cls, field, datum, coeff=None):
        return cls(field, datum, {(): coeff if coeff is not None else field.one})

    @classmethod
    def word(cls, field, datum, letters, coeff=None):
        return cls(field, datum, {tuple(letters): coeff if coeff is not None else field.one})

    # -- ring structure ------------------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, self.field.zero) + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return UqElement(self.field, self.datum, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return UqElement(self.field, self.datum,
                         {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, UqElement):
            return self.scale(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                s = out.get(w, self.field.zero) + c1 * c2
                if s.is_zero():
                    out.pop(w, None)
                else:
                    out[w] = s
        return UqElement(self.field, self.datum, out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        if not isinstance(c, type(self.field.one)):
            c = self.field.from_constant(c)
        return UqElement(self.field, self.datum,
                         {w: c * v for w, v in self.terms.items()})

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for w, c in sorted(self.terms.items()):
            mono = "*".join(f"{kind}{i + 1}" for kind, i in w) or "1"
            bits.append(f"({c!r})*{mono}")
        return " + ".join(bits)

    # -- involutions -----------------------------------------------------------

    def involution(self, kind: str):
        """Apply one of the involutions.

        'star'  : noncompact antilinear anti-homomorphism (extra signs at l0)
        'aster' : compact antilinear anti-homomorphism
        'theta' : linear automorphism with signs at l0 (star = theta aster)
        'tau'   : antilinear anti-homomorphism q_j S on E_j, q_j^-1 S on F_j
        """
        if kind == "theta":
            out = {}
            for w, c in self.terms.items():
                sign = sum(1 for kd, i in w if i == self.datum.l0 and kd in ("E", "F"))
                out[w] = -c if sign % 2 else c
            return UqElement(self.field, self.datum, out)
        if kind not in ("star", "aster", "tau"):
            raise InvalidArgument(f"unknown involution {kind!r}")
        acc = UqElement(self.field, self.datum)
        for w, c in self.terms.items():
            term = UqElement.unit(self.field, self.datum, c.conjugate())
            for letter in reversed(w):
                term = term * self._letter_image(letter, kind)
            acc = acc + term
        return acc

    def _letter_image(self, letter, kind):
        fld, dat = self.field, self.datum
        kd, i = letter
        qi = fld.q_power(dat.d[i])
        if kind == "tau":
            if kd == "E":
                return UqElement(fld, dat, {(Kinv(i), E(i)): -qi})
            if kd == "F":
                return UqElement(fld, dat, {(F(i), K(i)): -qi.inverse()})
            return UqElement.generator(fld, dat, K(i) if kd == "Ki" else Kinv(i))
        sign = fld.one
        if kind == "star" and i == dat.l0 and kd in ("E", "F"):
            sign = -fld.one
        if kd == "E":
            return UqElement(fld, dat, {(K(i), F(i)): sign})
        if kd == "F":
            return UqElement(fld, dat, {(E(i), Kinv(i)): sign})
        return UqElement.generator(fld, dat, letter)

    # -- Hopf structure ----------------------------------------------------------

    def coproduct(self, opposite=False):
        """Return dict (word, word) -> Scalar for Delta(x) (or Delta^op)."""
        out = {}
        for w, c in self.terms.items():
            parts = {((), ()): c}
            for letter in w:
                kd, i = letter
                new = {}
                if kd == "E":
                    split = [((letter,), ()), ((K(i),), (letter,))]
                elif kd == "F":
                    split = [((letter,), (Kinv(i),)), ((), (letter,))]
                else:
                    split = [((letter,), (letter,))]
                for (w1, w2), cc in parts.items():
                    for s1, s2 in split:
                        key = (w1 + s1, w2 + s2)
                        acc = new.get(key, self.field.zero) + cc
                        if acc.is_zero():
                            new.pop(key, None)
                        else:
                            new[key] = acc
                parts = new
            for key, cc in parts.items():
                if opposite:
                    key = (key[1], key[0])
                acc = out.get(key, self.field.zero) + cc
                if acc.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = acc
        return out

    def counit(self):
        total = self.field.zero
        for w, c in self.terms.items():
            if all(kd in ("K", "Ki") for kd, _ in w):
                total = total + c
        return total

    def antipode(self, inverse=False):
        acc = UqElement(self.field, self.datum)
        for w, c in self.terms.items():
            term = UqElement.unit(self.field, self.datum, c)
            for letter in reversed(w):
                kd, i = letter
                if kd == "E":
                    img = {(Kinv(i), E(i)): -self.field.one} if not inverse \
                        else {(E(i), Kinv(i)): -self.field.one}
                elif kd == "F":
                    img = {(F(i), K(i)): -self.field.one} if not inverse \
                        else {(K(i), F(i)): -self.field.one}
                elif kd == "K":
                    img = {(Kinv(i),): self.field.one}
                else:
                    img = {(K(i),): self.field.one}
                term = term * UqElement(self.field, self.datum, img)
            acc = acc + term
        return acc

    # -- action on modules ----------------------------------------------------------

    def act(self, module, vec):
        """Apply the element to a vector dict {basis index: Scalar}."""
        for idx in vec:
            if not 0 <= idx < module.dim:
                raise BadVector(f"index {idx} outside module of dim {module.dim}")
        out = {}
        for w, c in self.terms.items():
            cur = vec
            for letter in reversed(w):
                cur = module.apply_letter(letter, cur)
                if not cur:
                    break
            for idx, val in cur.items():
                s = out.get(idx, self.field.zero) + c * val
                if s.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = s
        return out

    def matrix(self, module):
        cols = []
        for j in range(module.dim):
            col = self.act(module, {j: self.field.one})
            cols.append(col)
        return [[cols[j].get(i, self.field.zero) for j in range(module.dim)]
                for i in range(module.dim)]


def equal_on_modules(x: UqElement, y: UqElement, modules):
    """Semantic equality: same action on every module of the family."""
    diff = x - y
    for m in modules:
        for j in range(m.dim):
            if diff.act(m, {j: x.field.one}):
                return False
    return True


# ---------------------------------------------------------------------------
# sl2 normal form: F^a K^b E^c with b in Z.
# ---------------------------------------------------------------------------

_RANKS = {"F": 0, "K": 1, "Ki": 1, "E": 2}


def normal_form_sl2(x: UqElement):
    """Canonical form over the rank-one datum: sorted F^a K^b E^c monomials.

    Returns a new UqElement whose words are all of the shape
    F...F K..K(or Ki..Ki) E...E, with K-powers combined.
    """
    if x.datum.rank != 1:
        raise UnsupportedDatum("normal form is implemented for the rank-one datum")
    fld, dat = x.field, x.datum
    q = fld.q
    qq = q - q.inverse()
    work = [(w, c) for w, c in x.terms.items()]
    done = {}
    while work:
        w, c = work.pop()
        pos = _first_violation(w)
        if pos is None:
            key = _collapse_sl2(w)
            if key is None:
                continue
            s = done.get(key, fld.zero) + c
            if s.is_zero():
                done.pop(key, None)
            else:
                done[key] = s
            continue
        a, b = w[pos], w[pos + 1]
        head, tail = w[:pos], w[pos + 2:]
        ka, kb = a[0], b[0]
        if ka == "E" and kb == "F":
            work.append((head + (b, a) + tail, c))
            work.append((head + (K(0),) + tail, c / qq))
            work.append((head + (Kinv(0),) + tail, -c / qq))
        elif ka == "E":  # E K^{+-1}
            factor = q ** (-2) if kb == "K" else q ** 2
            work.append((head + (b, a) + tail, c * factor))
        elif kb == "F":  # K^{+-1} F
            factor = q ** (-2) if ka == "K" else q ** 2
            work.append((head + (b, a) + tail, c * factor))
        else:  # K Ki or Ki K
            work.append((head + tail, c))
    out = {}
    for (a, b, cc) in done:
        word = (F(0),) * a
        word += (K(0),) * b if b > 0 else (Kinv(0),) * (-b)
        word += (E(0),) * cc
        out[word] = done[(a, b, cc)]
    return UqElement(fld, dat, out)


def _first_violation(w):
    for p in range(len(w) - 1):
        ra, rb = _RANKS[w[p][0]], _RANKS[w[p + 1][0]]
        if ra > rb:
            return p
        if ra == rb == 1 and w[p][0] != w[p + 1][0]:
            return p
    return None


def _collapse_sl2(w):
    a = sum(1 for kd, _ in w if kd == "F")
    b = sum(1 for kd, _ in w if kd == "K") - sum(1 for kd, _ in w if kd == "Ki")
    c = sum(1 for kd, _ in w if kd == "E")
    return (a, b, c)


def serre_element(field, datum, i, j, positive=True):
    """The (i, j) Serre relation element, acting as zero on every module."""
    if i == j:
        raise InvalidArgument("Serre relation needs i != j")
    n = 1 - datum.cartan[i][j]
    qi = field.q_power(datum.d[i])
    gen = E if positive else F
    acc = UqElement(field, datum)
    for m in range(n + 1):
        word = (gen(i),) * (n - m) + (gen(j),) + (gen(i),) * m
        coeff = field.q_binomial(n, m, base=qi)
        if m % 2:
            coeff = -coeff
        acc = acc + UqElement.word(field, datum, word, coeff)
    return acc


def casimir_like_relation(field, datum, i, j):
    """E_i F_j - F_j E_i - delta_ij (K_i - K_i^-1)/(q_i - q_i^-1)."""
    x = UqElement.word(field, datum, (E(i), F(j)))
    y = UqElement.word(field, datum, (F(j), E(i)))
    acc = x - y
    if i == j:
        qi = field.q_power(datum.d[i])
        c = (qi - qi.inverse()).inverse()
        acc = acc - UqElement(field, datum, {(K(i),): c, (Kinv(i),): -c})
    return acc
