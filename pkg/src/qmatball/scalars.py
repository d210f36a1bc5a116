"""Exact arithmetic in the coefficient field Q(i)(q^(1/2)).

Every symbolic coefficient in the package is a reduced fraction of Laurent
polynomials in s = q^(1/2) with Gaussian-rational coefficients.  Canonical
form: numerator and denominator are shifted by a common power of s until both
are ordinary polynomials and at least one has a nonzero constant term, the
polynomial gcd is divided out, and the denominator is normalized so that its
lowest-degree coefficient equals 1.  Equality is then structural, which is
what lets identity checks elsewhere assert exact zero instead of comparing
floats.
"""

from __future__ import annotations

import math
from fractions import Fraction

# A Gaussian rational is a pair (re, im) of Fractions; a Laurent polynomial in
# s is a dict {exponent: gauss} with no zero values.

_ZERO = Fraction(0)
_ONE = Fraction(1)
GZERO = (_ZERO, _ZERO)
GONE = (_ONE, _ZERO)


def _g(re=0, im=0):
    return (Fraction(re), Fraction(im))


def _gadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gdiv(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    return ((a[0] * b[0] + a[1] * b[1]) / n, (a[1] * b[0] - a[0] * b[1]) / n)


def _padd(p, r):
    out = dict(p)
    for e, c in r.items():
        v = _gadd(out.get(e, GZERO), c)
        if v == GZERO:
            out.pop(e, None)
        else:
            out[e] = v
    return out


def _pneg(p):
    return {e: (-c[0], -c[1]) for e, c in p.items()}


def _pscale(p, c):
    if c == GZERO:
        return {}
    return {e: _gmul(v, c) for e, v in p.items()}


def _pmul(p, r):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in r.items():
            e = e1 + e2
            v = _gadd(out.get(e, GZERO), _gmul(c1, c2))
            if v == GZERO:
                out.pop(e, None)
            else:
                out[e] = v
    return out


def _pshift(p, k):
    if k == 0:
        return dict(p)
    return {e + k: c for e, c in p.items()}


def _pdivmod(a, b):
    """Long division of ordinary (min degree >= 0) polynomials; b != 0."""
    rem = dict(a)
    quo = {}
    db = max(b)
    lead = b[db]
    while rem:
        dr = max(rem)
        if dr < db:
            break
        c = _gdiv(rem[dr], lead)
        e = dr - db
        quo[e] = _gadd(quo.get(e, GZERO), c)
        for k, v in b.items():
            nk = k + e
            nv = _gadd(rem.get(nk, GZERO), _gmul((-c[0], -c[1]), v))
            if nv == GZERO:
                rem.pop(nk, None)
            else:
                rem[nk] = nv
    return quo, rem


def _pgcd(a, b):
    """Monic gcd of two ordinary polynomials over Q(i)."""
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, r
    lead = a[max(a)]
    if lead != GONE:
        a = {e: _gdiv(c, lead) for e, c in a.items()}
    return a


def _pdiv_exact(a, b):
    q, r = _pdivmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


class QScalar:
    """Reduced fraction of Laurent polynomials in s = q^(1/2) over Q(i)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, _canonical=False):
        if den is None:
            den = {0: GONE}
        if not _canonical:
            num, den = self._canon(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _canon(num, den):
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return {}, {0: GONE}
        mn = min(min(num), min(den))
        if mn != 0:
            num = _pshift(num, -mn)
            den = _pshift(den, -mn)
        if len(num) > 1 and len(den) > 1:
            g = _pgcd(num, den)
            if max(g) > 0:
                num = _pdiv_exact(num, g)
                den = _pdiv_exact(den, g)
        unit = den[min(den)]
        if unit != GONE:
            num = {e: _gdiv(c, unit) for e, c in num.items()}
            den = {e: _gdiv(c, unit) for e, c in den.items()}
        return num, den

    # ---- constructors ----

    @classmethod
    def zero(cls):
        return cls({}, {0: GONE}, _canonical=True)

    @classmethod
    def one(cls):
        return cls({0: GONE}, {0: GONE}, _canonical=True)

    @classmethod
    def rational(cls, re, im=0):
        c = _g(re, im)
        if c == GZERO:
            return cls.zero()
        return cls({0: c}, {0: GONE}, _canonical=True)

    @classmethod
    def i_unit(cls):
        return cls.rational(0, 1)

    @classmethod
    def s_power(cls, k, coeff=1):
        c = _g(coeff) if not isinstance(coeff, tuple) else coeff
        if c == GZERO:
            return cls.zero()
        if k >= 0:
            return cls({k: c}, {0: GONE}, _canonical=True)
        return cls({0: c}, {-k: GONE}, _canonical=True)

    @classmethod
    def q_power(cls, e, coeff=1):
        """q^e for integer or half-integer e."""
        e = Fraction(e)
        k = e * 2
        if k.denominator != 1:
            raise ValueError(f"q_power needs a half-integer exponent, got {e}")
        return cls.s_power(int(k), coeff)

    @classmethod
    def lam(cls):
        """The standard deformation scalar q - q^(-1)."""
        return cls.q_power(1) - cls.q_power(-1)

    # ---- ring ops ----

    def __add__(self, other):
        other = _coerce(other)
        if not self.num:
            return other
        if not other.num:
            return self
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return QScalar(num, _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return QScalar(_pneg(self.num), dict(self.den), _canonical=True)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if not self.num or not other.num:
            return QScalar.zero()
        return QScalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def invert(self):
        if not self.num:
            raise ZeroDivisionError("inverting zero scalar")
        return QScalar(dict(self.den), dict(self.num))

    def __truediv__(self, other):
        return self * _coerce(other).invert()

    def __rtruediv__(self, other):
        return _coerce(other) * self.invert()

    def __pow__(self, k):
        if k == 0:
            return QScalar.one()
        base = self if k > 0 else self.invert()
        out = base
        for _ in range(abs(k) - 1):
            out = out * base
        return out

    def conj(self):
        """Complex conjugate; s = q^(1/2) is real, so only coefficients flip."""
        num = {e: (c[0], -c[1]) for e, c in self.num.items()}
        den = {e: (c[0], -c[1]) for e, c in self.den.items()}
        return QScalar(num, den, _canonical=True)

    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == {0: GONE} and self.den == {0: GONE}

    def is_real(self):
        return all(c[1] == 0 for c in self.num.values()) and all(
            c[1] == 0 for c in self.den.values()
        )

    # ---- evaluation ----

    def eval(self, q):
        """Numeric value at a given q in (0, 1); returns a complex number."""
        s = math.sqrt(q)
        return _peval(self.num, s) / _peval(self.den, s)

    # ---- comparisons ----

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QScalar.rational(other)
        if not isinstance(other, QScalar):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (frozenset(self.num.items()), frozenset(self.den.items()))
            )
        return self._hash

    # ---- text form ----

    def __str__(self):
        return render_scalar(self)

    def __repr__(self):
        return f"QScalar({render_scalar(self)})"


def _coerce(x):
    if isinstance(x, QScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return QScalar.rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to QScalar")


def _peval(p, s):
    out = 0j
    for e, c in p.items():
        out += complex(c[0], c[1]) * (s ** e)
    return out


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _qpart(e):
    """Power-of-q string for an s-exponent e (so the q exponent is e/2)."""
    if e == 0:
        return None
    if e % 2 == 0:
        k = e // 2
        if k == 1:
            return "q"
        return f"q^{k}" if k > 0 else f"q^({k})"
    return f"q^({e}/2)"


def _frac_str(f):
    return str(f)  # "2", "-1/3"


def _gauss_str(c):
    re, im = c
    if im == 0:
        return _frac_str(re)
    if re == 0:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return f"{_frac_str(im)}*i"
    sign = " - " if im < 0 else " + "
    mag = -im if im < 0 else im
    ipart = "i" if mag == 1 else f"{_frac_str(mag)}*i"
    return f"{_frac_str(re)}{sign}{ipart}"


def _render_poly(p):
    if not p:
        return "0"
    parts = []
    for e in sorted(p, reverse=True):
        c = p[e]
        qp = _qpart(e)
        if c[1] != 0:
            body = f"({_gauss_str(c)})*{qp}" if qp else f"({_gauss_str(c)})"
            parts.append((False, body))
            continue
        re = c[0]
        neg = re < 0
        mag = -re if neg else re
        if qp is None:
            body = _frac_str(mag)
        elif mag == 1:
            body = qp
        else:
            body = f"{_frac_str(mag)}*{qp}"
        parts.append((neg, body))
    neg0, body0 = parts[0]
    if neg0:
        if "*" in body0 or body0[0] == "q":
            head = f"(-1)*{body0}" if body0[0] == "q" else f"(-{body0})"
        else:
            head = f"-{body0}"
    else:
        head = body0
    out = [head]
    for neg, body in parts[1:]:
        out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def render_scalar(x):
    if len(x.den) == 1:
        ((k, c),) = x.den.items()
        if c == GONE:
            return _render_poly(_pshift(x.num, -k))
    num = _render_poly(x.num)
    den = _render_poly(x.den)
    if " " in num:
        num = f"({num})"
    if " " in den or "*" in den or "/" in den:
        den = f"({den})"
    return f"{num}/{den}"


def parse_scalar(text):
    """Inverse of render_scalar (a restriction of the full expression parser)."""
    from . import exprs

    return exprs.parse_scalar(text)
