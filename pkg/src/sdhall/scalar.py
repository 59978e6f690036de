"""Exact arithmetic in Q(q^(1/4)).

All twist coefficients live in the field Q(q^(1/4)), represented as
residues modulo m(t), the minimal polynomial of the positive real
fourth root of q over the rationals.  Depending on q, m(t) is one of

    t^4 - q        q not a perfect square,
    t^2 - sqrt(q)  q a square but not a fourth power,
    t  - q^(1/4)   q a fourth power,

so in every case m(t) = t^deg - c for a positive rational c and
reduction is the single rewrite t^deg = c.  Elements are coefficient
vectors of exact rationals.  A total order is provided through the
real embedding t = q^(1/4) > 0.
"""

from __future__ import annotations

from fractions import Fraction


class ScalarFieldError(ValueError):
    """Raised for invalid field parameters or arithmetic misuse."""


def _integer_nth_root(n: int, k: int) -> int | None:
    """Return the integer k-th root of n if n is a perfect k-th power."""
    if n < 1:
        return None
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 1 and cand ** k == n:
            return cand
    return None


def _is_odd_prime_power(q: int) -> bool:
    if q < 3 or q % 2 == 0:
        return False
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
    while n % p == 0:
        n //= p
    return n == 1


class ScalarField:
    """The coefficient field Q(q^(1/4)) for a fixed odd prime power q."""

    def __init__(self, q: int):
        if not isinstance(q, int) or not _is_odd_prime_power(q):
            raise ScalarFieldError(
                "q must be an odd prime power >= 3, got %r" % (q,))
        self.q = q
        r4 = _integer_nth_root(q, 4)
        r2 = _integer_nth_root(q, 2)
        if r4 is not None:
            self.deg = 1
            self.c = Fraction(r4)
        elif r2 is not None:
            self.deg = 2
            self.c = Fraction(r2)
        else:
            self.deg = 4
            self.c = Fraction(q)
        self._zero = Scalar(self, (Fraction(0),) * self.deg)
        self._one = Scalar(self, tuple(
            Fraction(1 if i == 0 else 0) for i in range(self.deg)))

    # -- constructors -------------------------------------------------

    def zero(self) -> "Scalar":
        return self._zero

    def one(self) -> "Scalar":
        return self._one

    def from_fraction(self, a) -> "Scalar":
        a = Fraction(a)
        coeffs = [Fraction(0)] * self.deg
        coeffs[0] = a
        return Scalar(self, tuple(coeffs))

    def from_int(self, n: int) -> "Scalar":
        return self.from_fraction(Fraction(n))

    def element(self, coeffs) -> "Scalar":
        cs = [Fraction(x) for x in coeffs]
        if len(cs) > self.deg:
            raise ScalarFieldError("coefficient vector too long")
        cs += [Fraction(0)] * (self.deg - len(cs))
        return Scalar(self, tuple(cs))

    # -- powers of the generator --------------------------------------

    def t_power(self, e: int) -> "Scalar":
        """t^e as a field element, for any integer e."""
        quo, rem = divmod(e, self.deg)
        scale = self.c ** quo
        coeffs = [Fraction(0)] * self.deg
        coeffs[rem] = scale
        return Scalar(self, tuple(coeffs))

    def nu_power(self, k) -> "Scalar":
        """nu^k where nu = q^(-1/2); k may be a half-integer."""
        k = Fraction(k)
        e = -2 * k
        if e.denominator != 1:
            raise ScalarFieldError(
                "nu exponent must lie in (1/2)Z, got %s" % (k,))
        return self.t_power(int(e))

    def nu(self) -> "Scalar":
        return self.nu_power(1)

    def nu0(self) -> "Scalar":
        """nu_0 = q^(-1/4) = t^(-1)."""
        return self.t_power(-1)

    def q_power(self, r) -> "Scalar":
        """q^r for r in (1/4)Z."""
        r = Fraction(r)
        e = 4 * r
        if e.denominator != 1:
            raise ScalarFieldError(
                "q exponent must lie in (1/4)Z, got %s" % (r,))
        return self.t_power(int(e))

    # -- descriptor ----------------------------------------------------

    def modulus_string(self) -> str:
        if self.deg == 1:
            return "t - %s" % self.c
        return "t^%d - %s" % (self.deg, self.c)

    def __repr__(self):
        return "ScalarField(q=%d, m=%s)" % (self.q, self.modulus_string())

    def __eq__(self, other):
        return isinstance(other, ScalarField) and other.q == self.q

    def __hash__(self):
        return hash(("ScalarField", self.q))

    # -- root bracketing for the total order ---------------------------

    def root_bracket(self, tolerance: Fraction):
        """Rational interval [lo, hi] containing t with hi-lo <= tolerance."""
        if self.deg == 1:
            return self.c, self.c
        lo, hi = Fraction(0), Fraction(max(self.c, 1))
        while hi - lo > tolerance:
            mid = (lo + hi) / 2
            if mid ** self.deg <= self.c:
                lo = mid
            else:
                hi = mid
        return lo, hi


def make_scalar_field(q: int) -> ScalarField:
    """Build the field descriptor for Q(q^(1/4))."""
    return ScalarField(q)


class Scalar:
    """Residue in Q[t]/(m(t)); immutable and hashable."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ScalarField, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    # -- ring structure -------------------------------------------------

    def _check(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise ScalarFieldError("mixed scalar fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_fraction(other)
        return NotImplemented

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return Scalar(self.field, tuple(
            a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return Scalar(self.field, tuple(
            a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        deg = self.field.deg
        c = self.field.c
        out = [Fraction(0)] * deg
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(o.coeffs):
                if b == 0:
                    continue
                k = i + j
                if k >= deg:
                    out[k - deg] += a * b * c
                else:
                    out[k] += a * b
        return Scalar(self.field, tuple(out))

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        """Multiplicative inverse via the extended Euclidean algorithm."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        deg = self.field.deg
        # m(t) = t^deg - c as a coefficient list, low degree first.
        m = [Fraction(0)] * (deg + 1)
        m[0] = -self.field.c
        m[deg] = Fraction(1)
        a = list(self.coeffs)
        r0, r1 = m, _poly_trim(a)
        s0, s1 = [], [Fraction(1)]
        while _poly_deg(r1) > 0:
            qp, rp = _poly_divmod(r0, r1)
            r0, r1 = r1, rp
            s0, s1 = s1, _poly_sub(s0, _poly_mul(qp, s1))
        if not r1:
            raise ScalarFieldError("element not invertible (modulus reducible?)")
        lead = r1[0]
        inv_coeffs = [x / lead for x in s1][:deg]
        inv_coeffs += [Fraction(0)] * (deg - len(inv_coeffs))
        return Scalar(self.field, tuple(inv_coeffs))

    def __truediv__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return o * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- predicates and order --------------------------------------------

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_fraction(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def sign(self) -> int:
        """Sign of the real value at t = q^(1/4): -1, 0, or +1."""
        if self.is_zero():
            return 0
        if self.field.deg == 1:
            val = self.coeffs[0]
            return -1 if val < 0 else 1
        tol = Fraction(1, 16)
        while True:
            lo, hi = self.field.root_bracket(tol)
            vlo, vhi = _interval_eval(self.coeffs, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            tol = tol / 16

    def __lt__(self, other):
        o = self._check(other)
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._check(other)
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._check(other)
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._check(other)
        return (self - o).sign() >= 0

    def evaluate(self, tolerance=Fraction(1, 10 ** 12)):
        """Rational interval (lo, hi) containing the real value."""
        tol = tolerance
        while True:
            lo, hi = self.field.root_bracket(tol)
            vlo, vhi = _interval_eval(self.coeffs, lo, hi)
            if vhi - vlo <= tolerance:
                return vlo, vhi
            tol = tol / 16

    # -- rational extraction ----------------------------------------------

    def as_fraction(self) -> Fraction:
        """The value as a rational; raises if not rational."""
        if any(a != 0 for a in self.coeffs[1:]):
            raise ScalarFieldError("scalar %s is irrational" % (self,))
        return self.coeffs[0]

    # -- printing -----------------------------------------------------------

    def __str__(self):
        parts = []
        for k, ck in enumerate(self.coeffs):
            if ck == 0:
                continue
            if k == 0:
                parts.append(str(ck))
            elif k == 1:
                parts.append("%s*t" % ck)
            else:
                parts.append("%s*t^%d" % (ck, k))
        if not parts:
            return "0"
        return " + ".join(parts)

    def __repr__(self):
        return "Scalar(%s; q=%d)" % (self, self.field.q)


def cmp(a: Scalar, b: Scalar) -> int:
    """Three-way comparison under the real embedding."""
    return (a - b).sign()


# -- small exact polynomial helpers (low degree first) ---------------------

def _poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_deg(p):
    return len(p) - 1 if p else -1


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] -= x
    return _poly_trim(out)


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = _poly_trim(a)
    b = _poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    rem = list(a)
    db = _poly_deg(b)
    lead = b[-1]
    while _poly_deg(rem) >= db:
        shift = _poly_deg(rem) - db
        factor = rem[-1] / lead
        quo[shift] += factor
        for i in range(len(b)):
            rem[shift + i] -= factor * b[i]
        rem = _poly_trim(rem)
    return _poly_trim(quo), rem


def _interval_eval(coeffs, lo, hi):
    """Interval Horner evaluation for t in [lo, hi], 0 <= lo <= hi."""
    vlo = vhi = Fraction(0)
    for a in reversed(coeffs):
        # multiply current interval by [lo, hi] (nonnegative interval)
        cands = (vlo * lo, vlo * hi, vhi * lo, vhi * hi)
        vlo, vhi = min(cands), max(cands)
        vlo, vhi = vlo + a, vhi + a
    return vlo, vhi
