"""Exact coefficient field for everything downstream.

Scalars are elements of QQ(i)(u), the field of rational functions in one
variable u over the Gaussian rationals.  A scalar field fixes a root order
N and declares q = u^N, so that every fractional power of q appearing in
the structure constants (q^{1/2}, q^{1/4}, q^{1/s}, ...) is an integer
power of u.  Conjugation fixes u (q is a real parameter in (0,1)) and
negates the imaginary unit.

Numeric evaluation at a rational sample point q0 in (0,1) is provided for
formulas that contain square roots of non-monomials and therefore cannot
be verified exactly.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _math_gcd

import mpmath

from .exceptions import DivisionByZero, EvaluationPole, InvalidArgument

_FRAC_ZERO = Fraction(0)
_FRAC_ONE = Fraction(1)


class GaussRational:
    """A Gaussian rational (rn/rd) + (im_n/im_d)*i on raw int pairs.

    Plain int arithmetic with math.gcd keeps this far faster than
    Fraction-based coefficients in the polynomial inner loops.
    """

    __slots__ = ("rn", "rd", "imn", "imd")

    def __init__(self, re=0, im=0):
        if type(re) is int:
            self.rn, self.rd = re, 1
        elif isinstance(re, Fraction):
            self.rn, self.rd = re.numerator, re.denominator
        else:
            f = Fraction(re)
            self.rn, self.rd = f.numerator, f.denominator
        if type(im) is int:
            self.imn, self.imd = im, 1
        elif isinstance(im, Fraction):
            self.imn, self.imd = im.numerator, im.denominator
        else:
            f = Fraction(im)
            self.imn, self.imd = f.numerator, f.denominator

    @classmethod
    def _raw(cls, rn, rd, imn, imd):
        self = cls.__new__(cls)
        if rn:
            g = _gcd(rn, rd)
            if rd < 0:
                g = -g
            self.rn, self.rd = rn // g, rd // g
        else:
            self.rn, self.rd = 0, 1
        if imn:
            g = _gcd(imn, imd)
            if imd < 0:
                g = -g
            self.imn, self.imd = imn // g, imd // g
        else:
            self.imn, self.imd = 0, 1
        return self

    @property
    def re(self):
        return Fraction(self.rn, self.rd)

    @property
    def im(self):
        return Fraction(self.imn, self.imd)

    def __bool__(self):
        return bool(self.rn or self.imn)

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return (self.rn == other.rn and self.rd == other.rd
                    and self.imn == other.imn and self.imd == other.imd)
        if isinstance(other, int):
            return self.imn == 0 and self.rd == 1 and self.rn == other
        if isinstance(other, Fraction):
            return self.imn == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.rn, self.rd, self.imn, self.imd))

    def __add__(self, other):
        if not isinstance(other, GaussRational):
            other = GaussRational(other)
        if self.imn == 0 and other.imn == 0:
            return GaussRational._raw(self.rn * other.rd + other.rn * self.rd,
                                      self.rd * other.rd, 0, 1)
        return GaussRational._raw(self.rn * other.rd + other.rn * self.rd,
                                  self.rd * other.rd,
                                  self.imn * other.imd + other.imn * self.imd,
                                  self.imd * other.imd)

    def __sub__(self, other):
        if not isinstance(other, GaussRational):
            other = GaussRational(other)
        if self.imn == 0 and other.imn == 0:
            return GaussRational._raw(self.rn * other.rd - other.rn * self.rd,
                                      self.rd * other.rd, 0, 1)
        return GaussRational._raw(self.rn * other.rd - other.rn * self.rd,
                                  self.rd * other.rd,
                                  self.imn * other.imd - other.imn * self.imd,
                                  self.imd * other.imd)

    def __neg__(self):
        out = GaussRational.__new__(GaussRational)
        out.rn, out.rd, out.imn, out.imd = -self.rn, self.rd, -self.imn, self.imd
        return out

    def __mul__(self, other):
        if not isinstance(other, GaussRational):
            other = GaussRational(other)
        if self.imn == 0 and other.imn == 0:
            return GaussRational._raw(self.rn * other.rn, self.rd * other.rd, 0, 1)
        a, b = Fraction(self.rn, self.rd), Fraction(self.imn, self.imd)
        c, d = Fraction(other.rn, other.rd), Fraction(other.imn, other.imd)
        re = a * c - b * d
        im = a * d + b * c
        return GaussRational._raw(re.numerator, re.denominator,
                                  im.numerator, im.denominator)

    __radd__ = __add__
    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussRational):
            other = GaussRational(other)
        if not other:
            raise DivisionByZero("division by zero Gaussian rational")
        if self.imn == 0 and other.imn == 0:
            return GaussRational._raw(self.rn * other.rd, self.rd * other.rn, 0, 1)
        a, b = self.re, self.im
        c, d = other.re, other.im
        n = c * c + d * d
        re = (a * c + b * d) / n
        im = (b * c - a * d) / n
        return GaussRational._raw(re.numerator, re.denominator,
                                  im.numerator, im.denominator)

    def conjugate(self):
        if self.imn == 0:
            return self
        out = GaussRational.__new__(GaussRational)
        out.rn, out.rd, out.imn, out.imd = self.rn, self.rd, -self.imn, self.imd
        return out

    def __repr__(self):
        if not self.imn:
            return str(self.re)
        if not self.rn:
            return f"{self.im}*i"
        sign = "+" if self.imn > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}*i)"


_gcd = _math_gcd


def _coerce(x):
    if isinstance(x, GaussRational):
        return x
    return GaussRational(x)


QQI_ZERO = GaussRational(0)
QQI_ONE = GaussRational(1)
QQI_I = GaussRational(0, 1)


# ---------------------------------------------------------------------------
# Laurent polynomial helpers.  A Laurent polynomial is a dict {exp: coeff}
# with nonzero GaussRational values; {} is zero.
# ---------------------------------------------------------------------------

def lp_add(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, QQI_ZERO) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def lp_neg(a):
    return {e: -c for e, c in a.items()}

def lp_scale(a, c):
    if not c:
        return {}
    return {e: v * c for e, v in a.items()}


def lp_mul(a, b):
    if not a or not b:
        return {}
    if len(a) == 1:
        (ea, ca), = a.items()
        return {ea + e: ca * c for e, c in b.items()}
    if len(b) == 1:
        (eb, cb), = b.items()
        return {e + eb: c * cb for e, c in a.items()}
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            s = out.get(e, QQI_ZERO) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def lp_conj(a):
    return {e: c.conjugate() for e, c in a.items()}


def _lp_to_dense(a):
    # shift so min exponent is 0; return (list of coeffs, valuation)
    if not a:
        return [], 0
    lo = min(a)
    hi = max(a)
    dense = [QQI_ZERO] * (hi - lo + 1)
    for e, c in a.items():
        dense[e - lo] = c
    return dense, lo


def _dense_trim(d):
    while d and not d[-1]:
        d.pop()
    return d


def _dense_divmod(num, den):
    num = list(num)
    q = [QQI_ZERO] * max(0, len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / lead
        if c:
            q[k] = c
            for j, dj in enumerate(den):
                num[k + j] = num[k + j] - c * dj
    return _dense_trim(q), _dense_trim(num)


def _dense_gcd(a, b):
    a = _dense_trim(list(a))
    b = _dense_trim(list(b))
    while b:
        _, r = _dense_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _stride_of(*polys):
    """gcd of exponent steps above each polynomial's valuation."""
    from math import gcd
    g = 0
    for p in polys:
        if not p:
            continue
        lo = min(p)
        for e in p:
            g = gcd(g, e - lo)
    return g if g else 1


def lp_divexact(a, b):
    """Divide a by b, returning None if the division is not exact."""
    if not a:
        return {}
    g = _stride_of(a, b)
    va, vb = min(a), min(b)
    da = [QQI_ZERO] * ((max(a) - va) // g + 1)
    for e, c in a.items():
        if (e - va) % g:
            return None
        da[(e - va) // g] = c
    db = [QQI_ZERO] * ((max(b) - vb) // g + 1)
    for e, c in b.items():
        if (e - vb) % g:
            return None
        db[(e - vb) // g] = c
    q, r = _dense_divmod(da, db)
    if r:
        return None
    return {i * g + va - vb: c for i, c in enumerate(q) if c}


class Scalar:
    """Canonical num/den pair of Laurent polynomials in u, q = u^N.

    The denominator is an ordinary polynomial with nonzero constant term,
    monic in its top coefficient, and coprime to the polynomial part of
    the numerator; this makes the representation unique.
    """

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den=None, _canonical=False):
        self.field = field
        if den is None:
            den = {0: QQI_ONE}
        if _canonical:
            self.num = num
            self.den = den
            return
        if not den:
            raise DivisionByZero("scalar with zero denominator")
        self.num, self.den = _normalize(num, den)

    # -- ring/field operations -------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if self.den == other.den:
            return Scalar(self.field, lp_add(self.num, other.num), dict(self.den))
        num = lp_add(lp_mul(self.num, other.den), lp_mul(other.num, self.den))
        return Scalar(self.field, num, lp_mul(self.den, other.den))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __neg__(self):
        return Scalar(self.field, lp_neg(self.num), dict(self.den), _canonical=True)

    def __mul__(self, other):
        other = self._coerce(other)
        if _is_one(self.den) and _is_one(other.den):
            return Scalar(self.field, lp_mul(self.num, other.num), {0: QQI_ONE},
                          _canonical=True)
        return Scalar(self.field, lp_mul(self.num, other.num),
                      lp_mul(self.den, other.den))

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n):
        if n == 0:
            return self.field.one
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inversion of zero scalar")
        return Scalar(self.field, dict(self.den), dict(self.num))

    def conjugate(self):
        """Complex conjugation: fixes u, negates the imaginary unit."""
        return Scalar(self.field, lp_conj(self.num), lp_conj(self.den),
                      _canonical=True)

    # -- predicates and hashing ------------------------------------------

    def is_zero(self):
        return not self.num

    def is_one(self):
        return _is_one(self.num) and _is_one(self.den)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussRational)):
            other = self._coerce(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((frozenset(self.num.items()), frozenset(self.den.items())))

    def _coerce(self, x):
        if isinstance(x, Scalar):
            if x.field.root_order != self.field.root_order:
                raise InvalidArgument("scalars from fields with different root order")
            return x
        if isinstance(x, (int, Fraction, GaussRational)):
            return self.field.from_constant(x)
        raise TypeError(f"cannot coerce {type(x)!r} to Scalar")

    # -- inspection -------------------------------------------------------

    def as_constant(self):
        """Return the GaussRational value if the scalar is constant, else None."""
        if not self.num:
            return QQI_ZERO
        if _is_one(self.den) and len(self.num) == 1 and 0 in self.num:
            return self.num[0]
        return None

    def monomial_exponent(self):
        """If the scalar is c*u^k, return (c, k), else None."""
        if len(self.num) == 1 and _is_one(self.den):
            (e, c), = self.num.items()
            return c, e
        return None

    def __repr__(self):
        return f"({_lp_str(self.num)})/({_lp_str(self.den)})" if not _is_one(self.den) \
            else _lp_str(self.num)

    def describe(self):
        """Serialized form 'poly/poly in u, q=u^N'."""
        return f"({_lp_str(self.num)})/({_lp_str(self.den)}) in u, q=u^{self.field.root_order}"


def _is_one(p):
    return len(p) == 1 and p.get(0) == QQI_ONE


def _lp_str(p):
    if not p:
        return "0"
    parts = []
    for e in sorted(p):
        c = p[e]
        if e == 0:
            parts.append(repr(c))
        elif e == 1:
            parts.append(f"{c!r}*u" if c != QQI_ONE else "u")
        else:
            parts.append(f"{c!r}*u^{e}" if c != QQI_ONE else f"u^{e}")
    return " + ".join(parts)


def _normalize(num, den):
    if not num:
        return {}, {0: QQI_ONE}
    # pull u-powers out of the denominator
    vd = min(den)
    if vd:
        den = {e - vd: c for e, c in den.items()}
        num = {e - vd: c for e, c in num.items()}
    if len(den) == 1:
        c = den[0]
        if c == QQI_ONE:
            return num, den
        return {e: v / c for e, v in num.items()}, {0: QQI_ONE}
    # compress exponents by their common stride before polynomial gcd work
    stride = _stride_of(num, den)
    vn = min(num)
    dn = [QQI_ZERO] * ((max(num) - vn) // stride + 1)
    for e, c in num.items():
        dn[(e - vn) // stride] = c
    dd = [QQI_ZERO] * (max(den) // stride + 1)
    for e, c in den.items():
        dd[e // stride] = c
    g = _dense_gcd(dn, dd)
    if len(g) > 1:
        dn, _ = _dense_divmod(dn, g)
        dd, _ = _dense_divmod(dd, g)
    lead = dd[-1]
    num = {i * stride + vn: c / lead for i, c in enumerate(dn) if c}
    den = {i * stride: c / lead for i, c in enumerate(dd) if c}
    return num, den


class NumericValue:
    """Numeric evaluation result at a rational sample point q0 in (0,1)."""

    __slots__ = ("re", "im", "q0", "precision")

    def __init__(self, re, im, q0, precision):
        self.re = re
        self.im = im
        self.q0 = q0
        self.precision = precision

    def __repr__(self):
        return f"NumericValue({self.re}, {self.im}, q0={self.q0})"

    def abs(self):
        with mpmath.workdps(self.precision + 10):
            return mpmath.sqrt(self.re ** 2 + self.im ** 2)

    def distance(self, other):
        with mpmath.workdps(self.precision + 10):
            return mpmath.sqrt((self.re - other.re) ** 2 + (self.im - other.im) ** 2)


def _exact_nth_root(x: Fraction, n: int):
    """Rational n-th root of x if it exists, else None."""
    def iroot(m):
        if m == 0:
            return 0
        r = round(m ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** n == m:
                return cand
        return None

    p = iroot(x.numerator)
    q = iroot(x.denominator)
    if p is None or q is None:
        return None
    return Fraction(p, q)


class ScalarField:
    """Factory for Scalars over QQ(i)(u) with q = u^root_order.

    The root order is fixed at construction and never mutated, so field
    instances and their scalars are safe to share between threads.
    """

    def __init__(self, root_order: int):
        if root_order < 1:
            raise InvalidArgument("root order must be a positive integer")
        self.root_order = root_order
        self._upow_cache = {}
        self.zero = Scalar(self, {}, _canonical=True)
        self.one = Scalar(self, {0: QQI_ONE}, _canonical=True)
        self.i = Scalar(self, {0: QQI_I}, _canonical=True)
        self.u = Scalar(self, {1: QQI_ONE}, _canonical=True)
        self.q = Scalar(self, {root_order: QQI_ONE}, _canonical=True)

    def from_constant(self, c):
        c = c if isinstance(c, GaussRational) else GaussRational(c)
        if not c:
            return self.zero
        return Scalar(self, {0: c}, _canonical=True)

    def u_power(self, k: int):
        cached = self._upow_cache.get(k)
        if cached is None:
            cached = Scalar(self, {k: QQI_ONE}, _canonical=True)
            self._upow_cache[k] = cached
        return cached

    def q_power(self, r):
        """q^r for rational r; requires r*root_order to be an integer."""
        e = Fraction(r) * self.root_order
        if e.denominator != 1:
            raise InvalidArgument(
                f"q^{r} is not an integer power of u at root order {self.root_order}")
        return self.u_power(int(e))

    # -- quantum combinatorics -------------------------------------------

    def q_int(self, n: int, base=None):
        """[n] = (base^n - base^-n)/(base - base^-1); base defaults to q."""
        base = self.q if base is None else base
        if n == 0:
            return self.zero
        num = base ** n - base ** (-n)
        return num / (base - base.inverse())

    def q_factorial(self, n: int, base=None):
        if n < 0:
            raise InvalidArgument("factorial of negative integer")
        out = self.one
        for k in range(2, n + 1):
            out = out * self.q_int(k, base)
        return out

    def q_binomial(self, n: int, k: int, base=None):
        if not 0 <= k <= n:
            raise InvalidArgument("binomial requires 0 <= k <= n")
        return self.q_factorial(n, base) / (
            self.q_factorial(k, base) * self.q_factorial(n - k, base))

    def q_pochhammer(self, a, t, n: int):
        """(a; t)_n = prod_{k=0}^{n-1} (1 - a t^k)."""
        if n < 0:
            raise InvalidArgument("pochhammer of negative length")
        out = self.one
        tk = self.one
        for _ in range(n):
            out = out * (self.one - a * tk)
            tk = tk * t
        return out

    # -- numeric evaluation ------------------------------------------------

    def evaluate(self, s: Scalar, q0, precision: int = 64) -> NumericValue:
        """Evaluate s at q = q0 in (0,1) to the requested decimal precision."""
        q0 = Fraction(q0)
        if not 0 < q0 < 1:
            raise InvalidArgument("sample point q0 must lie in (0,1)")
        u0 = _exact_nth_root(q0, self.root_order)
        if u0 is not None:
            nv = _eval_rational(s, u0)
            if nv is None:
                raise EvaluationPole(f"denominator vanishes at q0={q0}")
            re, im = nv
            with mpmath.workdps(precision + 10):
                return NumericValue(mpmath.mpf(re.numerator) / re.denominator,
                                    mpmath.mpf(im.numerator) / im.denominator,
                                    q0, precision)
        with mpmath.workdps(2 * precision + 20):
            u = mpmath.root(mpmath.mpf(q0.numerator) / q0.denominator,
                            self.root_order)
            nre, nim = _eval_mp(s.num, u)
            dre, dim = _eval_mp(s.den, u)
            dmag = mpmath.sqrt(dre ** 2 + dim ** 2)
            if dmag < mpmath.mpf(10) ** (-(precision + precision // 2)):
                raise EvaluationPole(f"denominator vanishes at q0={q0}")
            dn = dre ** 2 + dim ** 2
            re = (nre * dre + nim * dim) / dn
            im = (nim * dre - nre * dim) / dn
            return NumericValue(re, im, q0, precision)


def _eval_rational(s: Scalar, u0: Fraction):
    def ev(p):
        re = _FRAC_ZERO
        im = _FRAC_ZERO
        for e, c in p.items():
            t = u0 ** e
            re += c.re * t
            im += c.im * t
        return re, im

    nre, nim = ev(s.num)
    dre, dim = ev(s.den)
    if dre == 0 and dim == 0:
        return None
    dn = dre * dre + dim * dim
    return (nre * dre + nim * dim) / dn, (nim * dre - nre * dim) / dn


def _eval_mp(p, u):
    re = mpmath.mpf(0)
    im = mpmath.mpf(0)
    for e, c in p.items():
        t = u ** e
        re += t * mpmath.mpf(c.re.numerator) / c.re.denominator
        im += t * mpmath.mpf(c.im.numerator) / c.im.denominator
    return re, im
