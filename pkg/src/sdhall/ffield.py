"""Arithmetic and linear algebra over F_q, q = p or p^2 with p an odd prime.

Field elements are canonical integers in range(q).  For q = p^2 the
integer a + b*p encodes a + b*x in F_p[x]/(f), where f = x^2 + 1 when
p = 3 (mod 4) and f = x^2 - n for the least positive non-residue n
otherwise.  Matrices are tuples of row tuples of encoded entries, and
all elimination is deterministic: pivots are chosen in the leftmost
column, breaking ties by the smallest encoded representative.
"""

from __future__ import annotations

import itertools


class FieldError(ValueError):
    pass


class SingularMatrixError(ValueError):
    pass


def _factor_prime_power(q: int):
    if q < 3 or q % 2 == 0:
        raise FieldError("q must be an odd prime power >= 3, got %r" % (q,))
    p = None
    n = q
    d = 3
    while d * d <= n:
        if n % d == 0:
            p = d
            break
        d += 2
    if p is None:
        p = n
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise FieldError("q = %d is not a prime power" % q)
    return p, e


class FF:
    """The finite field F_q with canonical integer encoding."""

    def __init__(self, q: int):
        p, e = _factor_prime_power(q)
        if e > 2:
            raise FieldError("only q = p or p^2 supported, got q = %d" % q)
        self.q = q
        self.p = p
        self.e = e
        if e == 2:
            if p % 4 == 3:
                self.xsq = p - 1          # x^2 = -1
            else:
                n = 2
                while pow(n, (p - 1) // 2, p) != p - 1:
                    n += 1
                self.xsq = n              # x^2 = n, n the least non-residue
        else:
            self.xsq = None
        self._inv_table = None

    # -- encoding -------------------------------------------------------

    def encode(self, a: int, b: int = 0) -> int:
        return (a % self.p) + (b % self.p) * self.p if self.e == 2 \
            else a % self.p

    def decode(self, u: int):
        if self.e == 2:
            return u % self.p, u // self.p
        return u % self.p, 0

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    # -- arithmetic -------------------------------------------------------

    def add(self, u: int, v: int) -> int:
        p = self.p
        if self.e == 1:
            return (u + v) % p
        a1, b1 = u % p, u // p
        a2, b2 = v % p, v // p
        return (a1 + a2) % p + ((b1 + b2) % p) * p

    def neg(self, u: int) -> int:
        p = self.p
        if self.e == 1:
            return (-u) % p
        a, b = u % p, u // p
        return (-a) % p + ((-b) % p) * p

    def sub(self, u: int, v: int) -> int:
        return self.add(u, self.neg(v))

    def mul(self, u: int, v: int) -> int:
        p = self.p
        if self.e == 1:
            return (u * v) % p
        a1, b1 = u % p, u // p
        a2, b2 = v % p, v // p
        return (a1 * a2 + b1 * b2 * self.xsq) % p + \
            ((a1 * b2 + a2 * b1) % p) * p

    def inv(self, u: int) -> int:
        if u == 0:
            raise ZeroDivisionError("inverse of zero in F_%d" % self.q)
        if self._inv_table is None:
            self._build_inv_table()
        return self._inv_table[u]

    def _build_inv_table(self):
        table = [0] * self.q
        if self.e == 1:
            for u in range(1, self.q):
                table[u] = pow(u, self.p - 2, self.p)
        else:
            p = self.p
            for u in range(1, self.q):
                a, b = u % p, u // p
                norm = (a * a - b * b * self.xsq) % p
                ninv = pow(norm, p - 2, p)
                table[u] = (a * ninv) % p + ((-b * ninv) % p) * p
        self._inv_table = table

    def pow(self, u: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(u), -n)
        r = 1
        base = u
        while n:
            if n & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            n >>= 1
        return r

    def frobenius(self, u: int) -> int:
        """x -> x^p; the conjugation of the quadratic extension."""
        if self.e != 2:
            raise FieldError("frobenius requires q = p^2")
        p = self.p
        a, b = u % p, u // p
        # x^p = -x for both modulus choices (x^2 is a non-residue).
        return a + ((-b) % p) * p

    def conj(self, u: int) -> int:
        """Frobenius when q = p^2, identity when q = p."""
        return self.frobenius(u) if self.e == 2 else u

    def quad_character(self, u: int) -> int:
        """+1 for nonzero squares, -1 for non-squares."""
        if u == 0:
            raise FieldError("quadratic character of zero")
        r = self.pow(u, (self.q - 1) // 2)
        return 1 if r == 1 else -1

    def is_square(self, u: int) -> bool:
        return u == 0 or self.quad_character(u) == 1

    def sqrt(self, u: int):
        """A square root of u, or None when u is a non-square."""
        for v in range(self.q):
            if self.mul(v, v) == u:
                return v
        return None

    def least_nonsquare(self) -> int:
        for v in self.units():
            if self.quad_character(v) == -1:
                return v
        raise FieldError("no non-square unit found")

    def least_generator(self) -> int:
        """Smallest encoding generating the multiplicative group."""
        target = self.q - 1
        for v in self.units():
            order = 1
            w = v
            while w != 1:
                w = self.mul(w, v)
                order += 1
            if order == target:
                return v
        raise FieldError("no multiplicative generator found")

    def __repr__(self):
        return "FF(%d)" % self.q

    def __eq__(self, other):
        return isinstance(other, FF) and other.q == self.q

    def __hash__(self):
        return hash(("FF", self.q))


# -- matrices: tuples of row tuples of encoded entries ----------------------

def mat(rows):
    return tuple(tuple(r) for r in rows)


def zeros(r, c):
    return tuple((0,) * c for _ in range(r))


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n))
                 for i in range(n))


def shape(A):
    return len(A), len(A[0]) if A else 0


def mat_add(F, A, B):
    return tuple(tuple(F.add(a, b) for a, b in zip(ra, rb))
                 for ra, rb in zip(A, B))


def mat_sub(F, A, B):
    return tuple(tuple(F.sub(a, b) for a, b in zip(ra, rb))
                 for ra, rb in zip(A, B))


def mat_neg(F, A):
    return tuple(tuple(F.neg(a) for a in row) for row in A)


def mat_scale(F, c, A):
    return tuple(tuple(F.mul(c, a) for a in row) for row in A)


def mat_mul(F, A, B):
    ra = len(A)
    if ra == 0:
        return ()
    inner = len(A[0])
    if inner != len(B):
        # products with a zero-dimensional factor are empty/zero blocks;
        # callers working with graded pieces handle those via dims.
        if inner == 0 and len(B) == 0:
            return tuple(() for _ in range(ra))
        raise FieldError("matrix shape mismatch in product")
    Bt = list(zip(*B)) if B else []
    add, mul = F.add, F.mul
    out = []
    for row in A:
        orow = []
        for col in Bt:
            s = 0
            for a, b in zip(row, col):
                if a and b:
                    s = add(s, mul(a, b))
            orow.append(s)
        out.append(tuple(orow))
    return tuple(out)


def mat_vec(F, A, v):
    add, mul = F.add, F.mul
    out = []
    for row in A:
        s = 0
        for a, x in zip(row, v):
            if a and x:
                s = add(s, mul(a, x))
        out.append(s)
    return tuple(out)


def transpose(A):
    return tuple(zip(*A)) if A else ()


def conj_transpose(F, A):
    return tuple(tuple(F.conj(a) for a in col) for col in zip(*A)) \
        if A else ()


def mat_eq(A, B):
    return A == B


def rref(F, A):
    """Reduced row echelon form.

    Returns (R, pivot_columns).  Pivot selection is deterministic:
    leftmost column first, then the row whose entry has the smallest
    canonical encoding among nonzero candidates.
    """
    rows = [list(r) for r in A]
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    pivots = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        best = None
        for i in range(r, nr):
            if rows[i][c] != 0:
                if best is None or rows[i][c] < rows[best][c]:
                    best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [F.sub(x, F.mul(f, y))
                           for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return tuple(tuple(row) for row in rows), tuple(pivots)


def rank(F, A):
    if not A or not A[0]:
        return 0
    _, pivots = rref(F, A)
    return len(pivots)


def kernel_basis(F, A):
    """Basis of the right kernel {v : A v = 0} in echelon convention."""
    nr, nc = shape(A)
    if nc == 0:
        return []
    if nr == 0:
        return [tuple(1 if i == j else 0 for j in range(nc))
                for i in range(nc)]
    R, pivots = rref(F, A)
    pivset = set(pivots)
    free = [c for c in range(nc) if c not in pivset]
    basis = []
    for fc in free:
        v = [0] * nc
        v[fc] = 1
        for i, pc in enumerate(pivots):
            # row i reads: v[pc] + sum_{c > pc, free} R[i][c] v[c] = 0
            v[pc] = F.neg(R[i][fc])
        basis.append(tuple(v))
    return basis


def solve(F, A, b):
    """One solution of A x = b, or None when inconsistent."""
    nr, nc = shape(A)
    aug = [list(A[i]) + [b[i]] for i in range(nr)]
    R, pivots = rref(F, mat(aug))
    x = [0] * nc
    for i, pc in enumerate(pivots):
        if pc == nc:
            return None
        x[pc] = R[i][nc]
    # rows past the pivot count must be consistent
    for i in range(len(pivots), nr):
        if R[i][nc] != 0:
            return None
    return tuple(x)


def inverse(F, A):
    n, m = shape(A)
    if n != m:
        raise SingularMatrixError("inverse of a non-square matrix")
    aug = [list(A[i]) + [1 if j == i else 0 for j in range(n)]
           for i in range(n)]
    R, pivots = rref(F, mat(aug))
    if len(pivots) < n or any(p >= n for p in pivots):
        raise SingularMatrixError("matrix is singular")
    return tuple(tuple(R[i][n:]) for i in range(n))


def det_nonzero(F, A):
    n, m = shape(A)
    return n == m and rank(F, A) == n


def row_space_key(F, A):
    """Canonical key of the row space: its RREF with zero rows dropped."""
    R, pivots = rref(F, A)
    return tuple(R[i] for i in range(len(pivots)))


def echelon_bases(F, n, k):
    """Yield every k-dimensional subspace of F^n as an RREF basis matrix.

    Subspaces are produced in a deterministic order: pivot column
    combinations ascending, then free entries in ascending encoding.
    """
    if k == 0:
        yield ()
        return
    if k > n:
        return
    for pivots in itertools.combinations(range(n), k):
        pivset = set(pivots)
        free_slots = []
        for i in range(k):
            for c in range(pivots[i] + 1, n):
                if c not in pivset:
                    free_slots.append((i, c))
        for vals in itertools.product(range(F.q), repeat=len(free_slots)):
            rows = [[0] * n for _ in range(k)]
            for i in range(k):
                rows[i][pivots[i]] = 1
            for (i, c), v in zip(free_slots, vals):
                rows[i][c] = v
            yield tuple(tuple(r) for r in rows)


def gaussian_binomial(n, k, q):
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def gl_order(q, n):
    """|GL_n(F_q)| as an integer (1 when n = 0)."""
    total = 1
    for i in range(n):
        total *= q ** n - q ** i
    return total
