"""Exact arithmetic in the field Q(q).

Scalars are reduced fractions of integer Laurent polynomials in a single
formal variable q.  All operations are exact; q is never specialized
except through ``QRational.evaluate``, which substitutes a rational number.

Values are immutable after construction and safe to share freely.
"""

from fractions import Fraction


class ScalarError(ArithmeticError):
    pass


class DivisionByZeroError(ScalarError):
    """Division by the zero element of Q(q)."""


class PoleError(ScalarError):
    """Numeric evaluation at a zero of the denominator."""


def _gcd_int(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _content(coeffs):
    g = 0
    for c in coeffs:
        g = _gcd_int(g, c)
        if g == 1:
            return 1
    return g


def _strip(lst):
    while lst and lst[-1] == 0:
        lst.pop()
    return lst


def _list_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _strip(out)


def _list_pseudo_rem(a, b):
    # pseudo-remainder of dense integer polynomials, leading coeffs last
    a = list(a)
    lb = b[-1]
    while len(a) >= len(b):
        la = a[-1]
        shift = len(a) - len(b)
        a = [lb * c for c in a]
        for i, c in enumerate(b):
            a[i + shift] -= la * c
        _strip(a)
        if not a:
            break
    return a


def _primitive(a):
    c = _content(a)
    if c > 1:
        a = [x // c for x in a]
    return a


def _list_gcd(a, b):
    """gcd of dense integer polynomial coefficient lists (primitive part
    tracked separately from integer content)."""
    if not a:
        return list(b)
    if not b:
        return list(a)
    ca, cb = _content(a), _content(b)
    a = [x // ca for x in a]
    b = [x // cb for x in b]
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _primitive(_list_pseudo_rem(a, b))
        a, b = b, r
    g = [x * _gcd_int(ca, cb) for x in a]
    if g[-1] < 0:
        g = [-x for x in g]
    return g


def _list_divexact(a, b):
    """Exact division of coefficient lists; raises if not divisible."""
    if not a:
        return []
    q = [0] * (len(a) - len(b) + 1)
    r = list(a)
    for k in range(len(q) - 1, -1, -1):
        if len(r) < len(b) + k:
            continue
        c, rem = divmod(r[len(b) + k - 1], b[-1])
        if rem:
            raise ScalarError("inexact polynomial division")
        q[k] = c
        if c:
            for i, y in enumerate(b):
                r[i + k] -= c * y
        _strip(r)
    if r:
        raise ScalarError("inexact polynomial division")
    return q


class LaurentPoly:
    """Integer Laurent polynomial in q, stored as {exponent: coefficient}.

    Invariant: no stored coefficient is zero; the zero polynomial is the
    empty map.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        if coeffs:
            self.c = {e: v for e, v in coeffs.items() if v}
        else:
            self.c = {}

    @classmethod
    def _raw(cls, cdict):
        p = cls.__new__(cls)
        p.c = cdict
        return p

    @classmethod
    def from_int(cls, n):
        return cls._raw({0: n} if n else {})

    @classmethod
    def q_power(cls, e, coeff=1):
        return cls._raw({e: coeff} if coeff else {})

    def is_zero(self):
        return not self.c

    def is_one(self):
        return self.c == {0: 1}

    def min_exp(self):
        return min(self.c)

    def max_exp(self):
        return max(self.c)

    def __add__(self, other):
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e, 0) + v
            if w:
                out[e] = w
            else:
                del out[e]
        return LaurentPoly._raw(out)

    def __sub__(self, other):
        out = dict(self.c)
        for e, v in other.c.items():
            w = out.get(e, 0) - v
            if w:
                out[e] = w
            elif e in out:
                del out[e]
        return LaurentPoly._raw(out)

    def __neg__(self):
        return LaurentPoly._raw({e: -v for e, v in self.c.items()})

    def __mul__(self, other):
        a, b = self.c, other.c
        if not a or not b:
            return LaurentPoly._raw({})
        if len(a) == 1:
            (ea, va), = a.items()
            return LaurentPoly._raw({ea + e: va * v for e, v in b.items()})
        if len(b) == 1:
            (eb, vb), = b.items()
            return LaurentPoly._raw({eb + e: vb * v for e, v in a.items()})
        if len(a) * len(b) >= 40:
            return self._mul_kronecker(a, b)
        out = {}
        for ea, va in a.items():
            for eb, vb in b.items():
                e = ea + eb
                w = out.get(e, 0) + va * vb
                if w:
                    out[e] = w
                elif e in out:
                    del out[e]
        return LaurentPoly._raw(out)

    @staticmethod
    def _mul_kronecker(a, b):
        # pack both factors into single integers and use the builtin
        # bignum product; digit width is chosen so no column overflows
        alo, ahi = min(a), max(a)
        blo, bhi = min(b), max(b)
        abound = max(abs(v) for v in a.values())
        bbound = max(abs(v) for v in b.values())
        width = (abound.bit_length() + bbound.bit_length()
                 + min(len(a), len(b)).bit_length() + 2)
        pa = 0
        for e, v in a.items():
            pa += v << (width * (e - alo))
        pb = 0
        for e, v in b.items():
            pb += v << (width * (e - blo))
        prod = pa * pb
        neg = prod < 0
        if neg:
            prod = -prod
        out = {}
        mask = (1 << width) - 1
        half = 1 << (width - 1)
        e = alo + blo
        carry = 0
        while prod or carry:
            d = (prod & mask) + carry
            prod >>= width
            if d >= half:
                d -= mask + 1
                carry = 1
            else:
                carry = 0
            if d:
                out[e] = -d if neg else d
            e += 1
        return LaurentPoly._raw(out)

    def shift(self, k):
        if k == 0:
            return self
        return LaurentPoly._raw({e + k: v for e, v in self.c.items()})

    def content(self):
        return _content(self.c.values())

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def to_list(self):
        """Dense coefficient list after shifting min exponent to zero."""
        if not self.c:
            return 0, []
        lo = self.min_exp()
        out = [0] * (self.max_exp() - lo + 1)
        for e, v in self.c.items():
            out[e - lo] = v
        return lo, out

    @classmethod
    def from_list(cls, lo, lst):
        return cls._raw({lo + i: v for i, v in enumerate(lst) if v})

    def evaluate(self, q0):
        val = Fraction(0)
        for e, v in self.c.items():
            val += v * q0 ** e
        return val

    def evaluate_mod(self, q0, p):
        """Value at q = q0 over the prime field GF(p)."""
        val = 0
        for e, v in self.c.items():
            val = (val + v * pow(q0, e % (p - 1), p)) % p
        return val

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for e in sorted(self.c):
            v = self.c[e]
            sign = "-" if v < 0 else "+"
            av = abs(v)
            if e == 0:
                body = str(av)
            else:
                body = ("q" if av == 1 else "%d*q" % av) + ("" if e == 1 else "^%d" % e)
            parts.append((sign, body))
        s0, b0 = parts[0]
        out = ("-" if s0 == "-" else "") + b0
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self):
        return "LaurentPoly(%s)" % self


_L_ZERO = LaurentPoly._raw({})
_L_ONE = LaurentPoly._raw({0: 1})


class QRational:
    """Element of Q(q): reduced fraction num/den of Laurent polynomials.

    Canonical form: gcd(num, den) is a unit, den is an ordinary polynomial
    with nonzero positive constant term and content 1.  Equality is
    structural equality of the reduced data.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, int):
            num = LaurentPoly.from_int(num)
        if den is None:
            den = _L_ONE
        elif isinstance(den, int):
            den = LaurentPoly.from_int(den)
        if den.is_zero():
            raise DivisionByZeroError("zero denominator in Q(q)")
        self.num, self.den = _reduce(num, den)

    @classmethod
    def _trusted(cls, num, den):
        r = cls.__new__(cls)
        r.num = num
        r.den = den
        return r

    @classmethod
    def from_laurent(cls, p):
        return cls._trusted(p, _L_ONE)

    @classmethod
    def q_power(cls, e, coeff=1):
        return cls._trusted(LaurentPoly.q_power(e, coeff), _L_ONE)

    def is_zero(self):
        return not self.num.c

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def __bool__(self):
        return bool(self.num.c)

    def __add__(self, other):
        if self.den.is_one() and other.den.is_one():
            return QRational._trusted(self.num + other.num, _L_ONE)
        if self.den == other.den:
            n = self.num + other.num
            return QRational._trusted(*_reduce(n, self.den))
        n = self.num * other.den + other.num * self.den
        return QRational._trusted(*_reduce(n, self.den * other.den))

    def __sub__(self, other):
        if self.den.is_one() and other.den.is_one():
            return QRational._trusted(self.num - other.num, _L_ONE)
        if self.den == other.den:
            n = self.num - other.num
            return QRational._trusted(*_reduce(n, self.den))
        n = self.num * other.den - other.num * self.den
        return QRational._trusted(*_reduce(n, self.den * other.den))

    def __neg__(self):
        return QRational._trusted(-self.num, self.den)

    def __mul__(self, other):
        if not self.num.c or not other.num.c:
            return Q_ZERO
        if self.den.is_one() and other.den.is_one():
            return QRational._trusted(self.num * other.num, _L_ONE)
        return QRational._trusted(*_reduce(self.num * other.num,
                                           self.den * other.den))

    def __truediv__(self, other):
        if not other.num.c:
            raise DivisionByZeroError("division by zero in Q(q)")
        if not self.num.c:
            return Q_ZERO
        return QRational._trusted(*_reduce(self.num * other.den,
                                           self.den * other.num))

    def inv(self):
        if not self.num.c:
            raise DivisionByZeroError("inverse of zero in Q(q)")
        return QRational._trusted(*_reduce(self.den, self.num))

    def __eq__(self, other):
        return (isinstance(other, QRational)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def evaluate(self, q0):
        """Exact value at q = q0 (a Fraction or int); q0 must not be 0 or
        a zero of the denominator."""
        q0 = Fraction(q0)
        if q0 == 0:
            raise PoleError("cannot evaluate at q = 0")
        d = self.den.evaluate(q0)
        if d == 0:
            raise PoleError("evaluation at a pole of the denominator")
        return self.num.evaluate(q0) / d

    def evaluate_mod(self, q0, p):
        """Value in GF(p) at q = q0, or None at a modular pole."""
        d = self.den.evaluate_mod(q0, p)
        if d == 0:
            return None
        n = self.num.evaluate_mod(q0, p)
        if d == 1:
            return n
        return (n * pow(d, p - 2, p)) % p

    def __str__(self):
        return "(%s)/(%s)" % (self.num, self.den)

    def __repr__(self):
        return "QRational(%s)" % self


def _reduce(num, den):
    """Bring num/den to canonical form.  den is assumed nonzero."""
    if not num.c:
        return _L_ZERO, _L_ONE
    # split off unit q^k so both become ordinary polynomials
    nlo, nl = num.to_list()
    dlo, dl = den.to_list()
    shift = nlo - dlo
    if len(dl) == 1:
        d0 = dl[0]
        if d0 != 1:
            cn = _content(nl)
            g = _gcd_int(cn, abs(d0))
            if g > 1:
                nl = [x // g for x in nl]
                d0 //= g
            if d0 < 0:
                nl = [-x for x in nl]
                d0 = -d0
        return (LaurentPoly.from_list(shift, nl),
                LaurentPoly.from_int(d0) if d0 != 1 else _L_ONE)
    g = _list_gcd(nl, dl)
    if len(g) > 1 or g[0] != 1:
        nl = _list_divexact(nl, g)
        dl = _list_divexact(dl, g)
    cd = _content(dl)
    if cd > 1:
        cn = _content(nl)
        g2 = _gcd_int(cn, cd)
        if g2 > 1:
            nl = [x // g2 for x in nl]
            dl = [x // g2 for x in dl]
    if dl[0] < 0:
        nl = [-x for x in nl]
        dl = [-x for x in dl]
    return LaurentPoly.from_list(shift, nl), LaurentPoly.from_list(0, dl)


Q_ZERO = QRational._trusted(_L_ZERO, _L_ONE)
Q_ONE = QRational._trusted(_L_ONE, _L_ONE)


def q_power(e, coeff=1):
    return QRational.q_power(e, coeff)


def q_int(n, d=1):
    """The symmetric q-integer [n] in q^d: (q^{dn} - q^{-dn})/(q^d - q^{-d})."""
    if n == 0:
        return Q_ZERO
    sign = 1
    if n < 0:
        n, sign = -n, -1
    p = {}
    for k in range(n):
        p[d * (n - 1 - 2 * k)] = p.get(d * (n - 1 - 2 * k), 0) + sign
    return QRational.from_laurent(LaurentPoly(p))


def q_factorial(n, d=1):
    out = Q_ONE
    for k in range(2, n + 1):
        out = out * q_int(k, d)
    return out


def q_binomial(n, k, d=1):
    """Gaussian binomial coefficient (n choose k) in q^d."""
    if k < 0 or k > n:
        return Q_ZERO
    return q_factorial(n, d) / (q_factorial(k, d) * q_factorial(n - k, d))
