"""Cartan data, weights, Weyl words, Hermitian-pair detection.

Weights are tuples of integers in the fundamental-weight basis.  Node
indices are 0-based internally; constructors accept the conventional
1-based labels (so ``RootDatum.from_name("A3", l0=2)`` marks the middle
node).  Weyl-group words are tuples of 0-based letters (j1, ..., jL)
denoting s_{j1} ... s_{jL}, applied to weights rightmost first.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .exceptions import InvalidArgument, NotFiniteType, NotHermitian

_NAMED = {}


def _chain(n, pairs=()):
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
    for i in range(n - 1):
        a[i][i + 1] = a[i + 1][i] = -1
    for i, j, v in pairs:
        a[i][j] = v
    return a


def cartan_matrix(name: str):
    """Cartan matrix for a standard type string like 'A3', 'C2', 'E6'."""
    kind, rank = name[0].upper(), int(name[1:])
    if kind == "A" and rank >= 1:
        return _chain(rank)
    if kind == "B" and rank >= 2:
        # last node short: a_{n-1,n} = -1, a_{n,n-1} = -2
        return _chain(rank, [(rank - 1, rank - 2, -2)])
    if kind == "C" and rank >= 2:
        return _chain(rank, [(rank - 2, rank - 1, -2)])
    if kind == "D" and rank >= 3:
        a = _chain(rank)
        a[rank - 1][rank - 2] = a[rank - 2][rank - 1] = 0
        a[rank - 1][rank - 3] = a[rank - 3][rank - 1] = -1
        return a
    if kind == "E" and rank in (6, 7, 8):
        # Bourbaki: node 2 hangs off node 4 of the chain 1-3-4-5-...
        a = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            a[i][i] = 2
        edges = [(0, 2), (2, 3), (1, 3)] + [(i, i + 1) for i in range(3, rank - 1)]
        for i, j in edges:
            a[i][j] = a[j][i] = -1
        return a
    if kind == "F" and rank == 4:
        return _chain(4, [(2, 1, -2), (1, 2, -1)])
    if kind == "G" and rank == 2:
        return [[2, -3], [-1, 2]]
    raise InvalidArgument(f"unknown Cartan type {name!r}")


def _compute_d(a):
    """Coprime positive d_i making (d_i a_ij) symmetric."""
    n = len(a)
    ratios = [None] * n
    for start in range(n):
        if ratios[start] is not None:
            continue
        ratios[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if i != j and a[i][j] != 0 and ratios[j] is None:
                    # d_i a_ij = d_j a_ji
                    ratios[j] = ratios[i] * Fraction(a[i][j], a[j][i])
                    stack.append(j)
    denom = lcm(*(r.denominator for r in ratios))
    d = [int(r * denom) for r in ratios]
    g = gcd(*d)
    return [x // g for x in d]


def _fraction_matrix_inverse(a):
    n = len(a)
    rows = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
            for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col]), None)
        if piv is None:
            raise InvalidArgument("singular Cartan matrix")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [row[n:] for row in rows]


def _det(a):
    n = len(a)
    rows = [[Fraction(x) for x in row] for row in a]
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            d = -d
        d *= rows[col][col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(col + 1, n):
            if rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return d


class RootDatum:
    """Cartan matrix with a distinguished node and derived combinatorics."""

    def __init__(self, cartan, l0: int, name=None):
        a = [list(map(int, row)) for row in cartan]
        n = len(a)
        if any(len(row) != n for row in a):
            raise InvalidArgument("Cartan matrix must be square")
        for i in range(n):
            if a[i][i] != 2:
                raise NotFiniteType("diagonal entries must equal 2")
            for j in range(n):
                if i != j and (a[i][j] > 0 or (a[i][j] == 0) != (a[j][i] == 0)):
                    raise NotFiniteType("off-diagonal entries invalid")
        if not 1 <= l0 <= n:
            raise InvalidArgument(f"l0 must be in 1..{n}")
        self.cartan = a
        self.rank = n
        self.l0 = l0 - 1
        self.name = name
        self.d = _compute_d(a)
        sym = [[self.d[i] * a[i][j] for j in range(n)] for i in range(n)]
        # finite type <=> symmetrized matrix positive definite
        for k in range(1, n + 1):
            minor = [row[:k] for row in sym[:k]]
            if _det(minor) <= 0:
                raise NotFiniteType("symmetrized Cartan matrix not positive definite")
        self.a_inv = _fraction_matrix_inverse(a)
        self.cartan_det = abs(int(_det(a)))  # |P/Q|, from the Smith form
        self._simple_root_cache = [tuple(a[j][i] for j in range(n)) for i in range(n)]
        self.positive_roots = self._positive_roots()
        self._connected = self._is_connected()
        self.highest_root = self._highest_root() if self._connected else None
        self.hermitian = (self.highest_root is not None
                          and self.highest_root[self.l0] == 1)
        self._l1 = None

    # -- basics ------------------------------------------------------------

    @classmethod
    def from_name(cls, name: str, l0: int):
        return cls(cartan_matrix(name), l0, name=name)

    @property
    def nodes(self):
        return range(self.rank)

    @property
    def s_nodes(self):
        """The subset S: all nodes except l0."""
        return [i for i in range(self.rank) if i != self.l0]

    def default_root_order(self):
        return 4 * self.cartan_det * lcm(*self.d)

    def _is_connected(self):
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in range(self.rank):
                if j not in seen and self.cartan[i][j] != 0:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.rank

    # -- roots ---------------------------------------------------------------

    def _positive_roots(self):
        """All positive roots in simple-root coordinates, by Weyl closure."""
        simples = [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]
        seen = set(simples)
        queue = list(simples)
        while queue:
            beta = queue.pop()
            for i in range(self.rank):
                # s_i(beta) in root coordinates
                pair = sum(self.cartan[i][j] * beta[j] for j in range(self.rank))
                new = list(beta)
                new[i] -= pair
                new = tuple(new)
                if new not in seen:
                    seen.add(new)
                    queue.append(new)
        return sorted(b for b in seen if all(c >= 0 for c in b))

    def _highest_root(self):
        return max(self.positive_roots, key=lambda b: (sum(b), b))

    def require_hermitian(self):
        if not self.hermitian:
            raise NotHermitian(
                f"(cartan, l0={self.l0 + 1}) is not a Hermitian symmetric pair")

    def noncompact_positive_roots(self):
        """Roots of the +1 graded piece: l0-coefficient equal to 1."""
        self.require_hermitian()
        return [b for b in self.positive_roots if b[self.l0] == 1]

    # -- weights -------------------------------------------------------------

    def zero_weight(self):
        return (0,) * self.rank

    def fundamental_weight(self, i):
        return tuple(int(i == j) for j in range(self.rank))

    def rho(self):
        return (1,) * self.rank

    def simple_root(self, i):
        """alpha_i in fundamental-weight coordinates (column i of the Cartan matrix)."""
        return self._simple_root_cache[i]

    def root_to_weight(self, root_coords):
        out = [0] * self.rank
        for i, c in enumerate(root_coords):
            if c:
                col = self.simple_root(i)
                out = [x + c * y for x, y in zip(out, col)]
        return tuple(out)

    def is_dominant(self, lam):
        return all(x >= 0 for x in lam)

    def reflect(self, i, lam):
        """s_i(lam) = lam - lam_i * alpha_i."""
        c = lam[i]
        if c == 0:
            return tuple(lam)
        col = self.simple_root(i)
        return tuple(x - c * y for x, y in zip(lam, col))

    def act(self, word, lam):
        """Apply s_{j1} ... s_{jL} to lam, rightmost letter first."""
        for i in reversed(word):
            lam = self.reflect(i, lam)
        return lam

    def pairing(self, lam, mu) -> Fraction:
        """W-invariant form with (alpha_i, alpha_j) = d_i a_ij."""
        total = Fraction(0)
        for i, li in enumerate(lam):
            if not li:
                continue
            for j, mj in enumerate(mu):
                if mj:
                    total += li * mj * self.d[j] * self.a_inv[j][i]
        return total

    def hs_value(self, lam, node=None) -> Fraction:
        """lam(H_S) for S = nodes minus {node} (default node = l0)."""
        node = self.l0 if node is None else node
        return 2 * sum(Fraction(lam[i]) * self.a_inv[node][i]
                       for i in range(self.rank) if lam[i])

    # -- Weyl group -----------------------------------------------------------

    def w0_word(self):
        """A reduced word for the longest element (greedy descent from rho)."""
        lam = self.rho()
        word = ()
        target = tuple(-x for x in self.rho())
        while lam != target:
            i = next(k for k in range(self.rank) if lam[k] > 0)
            lam = self.reflect(i, lam)
            word = (i,) + word
        return word

    def w0_action(self, lam):
        return self.act(self.w0_word(), lam)

    @property
    def l1(self):
        """Node with fundamental weight -w0(fundamental(l0))."""
        if self._l1 is None:
            img = tuple(-x for x in self.w0_action(self.fundamental_weight(self.l0)))
            for i in range(self.rank):
                if img == self.fundamental_weight(i):
                    self._l1 = i
                    break
            else:
                raise InvalidArgument("-w0 does not permute fundamental weights")
        return self._l1

    def word_length(self, word):
        """Length of the Weyl element: positive roots sent negative."""
        count = 0
        for beta in self.positive_roots:
            img = self.act(word, self.root_to_weight(beta))
            # negative iff expansion in simple roots is nonpositive; read via H_S-free
            coords = self._weight_to_root_coords(img)
            if all(c <= 0 for c in coords):
                count += 1
        return count

    def _weight_to_root_coords(self, lam):
        return tuple(sum(Fraction(self.a_inv[k][i]) * lam[i] for i in range(self.rank))
                     for k in range(self.rank))

    def orbit_words(self, lam):
        """Minimal-length, lexicographically-smallest word reaching each
        weight in the Weyl orbit of lam; words act rightmost first."""
        words = {tuple(lam): ()}
        layer = {tuple(lam): ()}
        while layer:
            candidates = {}
            for mu, w in sorted(layer.items(), key=lambda kv: kv[1]):
                for i in range(self.rank):
                    nu = self.reflect(i, mu)
                    if nu in words:
                        continue
                    cand = (i,) + w
                    if nu not in candidates or cand < candidates[nu]:
                        candidates[nu] = cand
            words.update(candidates)
            layer = candidates
        return words

    def coset_reps(self, fundamental_index=None):
        """Shortest coset representatives for the stabilizer of a fundamental
        weight, each with its lowering chain.

        Returns a list of (word, chain, weight) sorted by (length, word),
        where chain = [(i_k, m_k, lambda_k)] describes the weight path
        lambda_k = s_{i_k} lambda_{k-1} with exponents
        m_k = lambda_{k-1}(H_{i_k}); the chain starts at the fundamental
        weight and is applied to a highest vector F-first.
        """
        self.require_hermitian()
        idx = self.l0 if fundamental_index is None else fundamental_index
        omega = self.fundamental_weight(idx)
        out = []
        for mu, word in self.orbit_words(omega).items():
            chain = []
            lam = omega
            for i in reversed(word):
                m = lam[i]
                if m < 0:
                    raise InvalidArgument("orbit word is not a lowering chain")
                chain.append((i, m, self.reflect(i, lam)))
                lam = self.reflect(i, lam)
            out.append((word, chain, mu))
        out.sort(key=lambda t: (len(t[0]), t[0]))
        return out

    def domain_rank(self):
        """Rank of the bounded symmetric domain: half the sum of the H_S
        eigenvalues of the two extreme fundamental weights."""
        self.require_hermitian()
        r = (self.hs_value(self.fundamental_weight(self.l1))
             + self.hs_value(self.fundamental_weight(self.l0))) / 2
        if r.denominator != 1:
            raise InvalidArgument("domain rank is not an integer")
        return int(r)

    # -- oracles ---------------------------------------------------------------

    def weyl_dimension(self, lam):
        """Weyl dimension formula; independent oracle for module sizes."""
        if not self.is_dominant(lam):
            return 0
        num = Fraction(1)
        rho = self.rho()
        lam_rho = tuple(x + 1 for x in lam)
        for beta in self.positive_roots:
            bw = self.root_to_weight(beta)
            num *= self.pairing(lam_rho, bw) / self.pairing(rho, bw)
        if num.denominator != 1:
            raise InvalidArgument("Weyl dimension is not an integer")
        return int(num)

    def __repr__(self):
        label = self.name or f"rank{self.rank}"
        return f"RootDatum({label}, l0={self.l0 + 1})"
