"""Exact dense linear algebra over a ScalarField.

Matrices are plain lists of rows of Scalars.  Everything here is
fraction-honest Gaussian elimination with pivots chosen to keep the
rational-function entries small.  For pure rank questions there is also a
fast path that clears denominators and evaluates at a rational sample
point: the sampled rank is a certified lower bound, which proves
full-rank / nonvanishing-determinant claims exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .exceptions import InvalidArgument
from .scalars import QQI_ONE, GaussRational, Scalar, _eval_rational


def zeros(field, nrows, ncols):
    return [[field.zero for _ in range(ncols)] for _ in range(nrows)]


def identity(field, n):
    m = zeros(field, n, n)
    for k in range(n):
        m[k][k] = field.one
    return m


def mat_mul(a, b):
    n, m = len(a), len(b[0])
    inner = len(b)
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            acc = None
            for k in range(inner):
                if ai[k].is_zero() or b[k][j].is_zero():
                    continue
                t = ai[k] * b[k][j]
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else ai[0].field.zero)
        out.append(row)
    return out


def mat_vec(a, v):
    return [_dot(row, v) for row in a]


def _dot(row, v):
    acc = None
    for x, y in zip(row, v):
        if x.is_zero() or y.is_zero():
            continue
        t = x * y
        acc = t if acc is None else acc + t
    return acc if acc is not None else row[0].field.zero


def mat_equal(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _size(s: Scalar):
    return len(s.num) + len(s.den)


def _eliminate(rows, ncols):
    """In-place fraction-honest row reduction.

    Returns list of (row_index, pivot_col) in elimination order.
    """
    pivots = []
    used = set()
    for col in range(ncols):
        best = None
        for r in range(len(rows)):
            if r in used or rows[r][col].is_zero():
                continue
            if best is None or _size(rows[r][col]) < _size(rows[best][col]):
                best = r
        if best is None:
            continue
        used.add(best)
        pivots.append((best, col))
        piv = rows[best][col]
        inv = piv.inverse()
        rows[best] = [x * inv for x in rows[best]]
        for r in range(len(rows)):
            if r == best or rows[r][col].is_zero():
                continue
            f = rows[r][col]
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[best])]
    return pivots


def rank(mat, field=None):
    if not mat or not mat[0]:
        return 0
    rows = [list(r) for r in mat]
    return len(_eliminate(rows, len(mat[0])))


_RANK_PRIME = (1 << 61) - 1  # Mersenne prime; u sample is a unit mod p


def _eval_mod(poly, u0, p):
    """Evaluate a Laurent polynomial at u = u0 in F_p x F_p (re, im)."""
    re = im = 0
    uinv = pow(u0, p - 2, p)
    for e, c in poly.items():
        t = pow(u0, e, p) if e >= 0 else pow(uinv, -e, p)
        if c.rd % p == 0 or c.imd % p == 0:
            raise InvalidArgument("sample prime divides a denominator")
        re = (re + c.rn * pow(c.rd, p - 2, p) * t) % p
        im = (im + c.imn * pow(c.imd, p - 2, p) * t) % p
    return re, im


def rank_at_sample(mat, u0=12345, p=_RANK_PRIME):
    """Rank after evaluating at u = u0 over F_p(i): a certified lower bound
    on the true rank, which proves full-rank claims exactly."""
    if not mat or not mat[0]:
        return 0
    rows = []
    for row in mat:
        vals = []
        for x in row:
            nre, nim = _eval_mod(x.num, u0, p)
            dre, dim = _eval_mod(x.den, u0, p)
            nrm = (dre * dre + dim * dim) % p
            if nrm == 0:
                raise InvalidArgument("sample point hit a denominator zero")
            inv = pow(nrm, p - 2, p)
            vals.append((((nre * dre + nim * dim) * inv) % p,
                         ((nim * dre - nre * dim) * inv) % p))
        rows.append(vals)
    return _mod_rank(rows, p)


def _mod_rank(rows, p):
    rank_ = 0
    ncols = len(rows[0])
    col = 0
    r0 = 0
    rows = [list(r) for r in rows]
    while col < ncols and r0 < len(rows):
        piv = next((r for r in range(r0, len(rows)) if rows[r][col] != (0, 0)), None)
        if piv is None:
            col += 1
            continue
        rows[r0], rows[piv] = rows[piv], rows[r0]
        a, b = rows[r0][col]
        nrm = (a * a + b * b) % p
        inv = pow(nrm, p - 2, p)
        ia, ib = (a * inv) % p, (-b * inv) % p
        rows[r0] = [((x * ia - y * ib) % p, (x * ib + y * ia) % p)
                    for x, y in rows[r0]]
        for r in range(len(rows)):
            if r != r0 and rows[r][col] != (0, 0):
                fa, fb = rows[r][col]
                rows[r] = [((x - (fa * px - fb * py)) % p,
                            (y - (fa * py + fb * px)) % p)
                           for (x, y), (px, py) in zip(rows[r], rows[r0])]
        rank_ += 1
        r0 += 1
        col += 1
    return rank_


def _lp_mul_once(a, b):
    from .scalars import lp_mul
    return lp_mul(a, b)


def _lp_quot(a, b):
    from .scalars import lp_divexact
    q = lp_divexact(a, b)
    if q is None:
        raise InvalidArgument("denominator clearing failed")
    return q


def _frac_rank(rows):
    rank_ = 0
    ncols = len(rows[0])
    rows = [list(r) for r in rows]
    col = 0
    r0 = 0
    while col < ncols and r0 < len(rows):
        piv = None
        for r in range(r0, len(rows)):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            col += 1
            continue
        rows[r0], rows[piv] = rows[piv], rows[r0]
        pr = rows[r0]
        inv = QQI_ONE / pr[col]
        rows[r0] = pr = [x * inv for x in pr]
        for r in range(len(rows)):
            if r != r0 and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], pr)]
        rank_ += 1
        r0 += 1
        col += 1
    return rank_


def solve(mat, rhs_cols, field):
    """Solve mat @ x = rhs for each rhs column; None where inconsistent.

    mat: n x m, rhs_cols: list of length-n vectors.  Returns a list of
    length-m solution vectors (a particular solution each) or None.
    """
    n = len(mat)
    m = len(mat[0]) if mat else 0
    k = len(rhs_cols)
    rows = [list(mat[i]) + [rhs_cols[j][i] for j in range(k)] for i in range(n)]
    pivots = _eliminate(rows, m)
    sols = []
    pivot_of_col = {c: r for r, c in pivots}
    pivot_rows = set(r for r, _ in pivots)
    for j in range(k):
        # consistency: non-pivot rows must have zero rhs
        ok = all(rows[r][m + j].is_zero() for r in range(n) if r not in pivot_rows)
        if not ok:
            sols.append(None)
            continue
        x = [field.zero] * m
        for c, r in pivot_of_col.items():
            x[c] = rows[r][m + j]
        sols.append(x)
    return sols


def nullspace(mat, field, ncols=None):
    """Basis of the right kernel of mat."""
    if not mat:
        return identity(field, ncols) if ncols else []
    m = len(mat[0])
    rows = [list(r) for r in mat]
    pivots = _eliminate(rows, m)
    pivot_cols = {c: r for r, c in pivots}
    free = [c for c in range(m) if c not in pivot_cols]
    basis = []
    for fc in free:
        v = [field.zero] * m
        v[fc] = field.one
        for c, r in pivot_cols.items():
            v[c] = -rows[r][fc]
        basis.append(v)
    return basis


def invert(mat, field):
    n = len(mat)
    rows = [list(mat[i]) + list(identity(field, n)[i]) for i in range(n)]
    pivots = _eliminate(rows, n)
    if len(pivots) != n:
        raise InvalidArgument("matrix is singular")
    out = [[field.zero] * n for _ in range(n)]
    for r, c in pivots:
        out[c] = rows[r][n:]
    return out


def det(mat, field):
    n = len(mat)
    if n == 0:
        return field.one
    rows = [list(r) for r in mat]
    d = field.one
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not rows[r][col].is_zero():
                if piv is None or _size(rows[r][col]) < _size(rows[piv][col]):
                    piv = r
        if piv is None:
            return field.zero
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            d = -d
        d = d * rows[col][col]
        inv = rows[col][col].inverse()
        rows[col] = [x * inv for x in rows[col]]
        for r in range(col + 1, n):
            if not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return d


def independent_subset(vectors, field):
    """Greedy maximal linearly independent subset; returns indices."""
    if not vectors:
        return []
    reduced = {}  # pivot col -> normalized reduced row
    chosen = []
    for idx, v in enumerate(vectors):
        r = list(v)
        for pc, pr in reduced.items():
            if not r[pc].is_zero():
                f = r[pc]
                r = [x - f * y for x, y in zip(r, pr)]
        piv = next((c for c in range(len(r)) if not r[c].is_zero()), None)
        if piv is None:
            continue
        inv = r[piv].inverse()
        reduced[piv] = [x * inv for x in r]
        chosen.append(idx)
    return chosen


class SpanSolver:
    """Incremental row space with coordinate tracking.

    Vectors are inserted with a tag; ``reduce`` expresses a vector in the
    span of the inserted ones (returning {tag: coeff}) or reports the
    nonzero residual.  Used for quotient constructions where candidates
    arrive one at a time.
    """

    def __init__(self, field):
        self.field = field
        self._rows = []  # (pivot_col, reduced_row, coeffs {tag: Scalar})

    def reduce(self, vec):
        """Return (residual_row, coeffs) with vec = sum coeffs + residual."""
        r = list(vec)
        coeffs = {}
        for pc, prow, pcoeffs in self._rows:
            f = r[pc]
            if f.is_zero():
                continue
            r = [x - f * y for x, y in zip(r, prow)]
            for tag, c in pcoeffs.items():
                s = coeffs.get(tag, self.field.zero) + f * c
                if s.is_zero():
                    coeffs.pop(tag, None)
                else:
                    coeffs[tag] = s
        return r, coeffs

    def insert(self, vec, tag):
        """Insert vec; returns None if it extends the span, else its
        coordinates {tag: coeff} over previously inserted vectors."""
        r, coeffs = self.reduce(vec)
        piv = None
        for c in range(len(r)):
            if not r[c].is_zero() and (piv is None or _size(r[c]) < _size(r[piv])):
                piv = c
        if piv is None:
            return coeffs
        inv = r[piv].inverse()
        row = [x * inv for x in r]
        own = {tag: inv}
        for t, c in coeffs.items():
            own[t] = -inv * c
        self._rows.append((piv, row, own))
        return None

    @property
    def rank(self):
        return len(self._rows)


def coordinates(basis_vectors, target, field):
    """Coordinates of target in the span of basis_vectors, or None."""
    if not basis_vectors:
        return None if any(not t.is_zero() for t in target) else []
    mat = [[basis_vectors[j][i] for j in range(len(basis_vectors))]
           for i in range(len(target))]
    sol = solve(mat, [list(target)], field)[0]
    return sol
