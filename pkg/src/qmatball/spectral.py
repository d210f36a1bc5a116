"""Elements whose middle coefficients are functions on the joint spectrum.

For a fixed representation series, an element is stored exactly like an
algebra element, z^I psi z^{*J}, except that psi is a function on the exact
spectrum grid of Q_1..Q_n instead of a polynomial.  The same rewrite engine
drives the products; only the coefficient operations differ.  Transport of a
function past the shift generators follows

    psi(Q) z_j  = z_j  psi(q^2 Q_1, .., q^2 Q_j, Q_{j+1}, ..)
    z*_j psi(Q) = psi(q^2 Q_1, .., q^2 Q_j, Q_{j+1}, ..) z*_j

Coefficient classes:

    'finite'  dict {point: value}, value exact (or complex after a numeric
              product); the only class every product can absorb
    'poly'    polynomial in the coordinates (same layout as algebra middles)
    'fn'      exact callable point -> ExactScalar, used internally for the
              radial factors of the operator expansion; not integrable
    'decay'   numeric callable with a caller-certified integral tail bound;
              only scalar multiples and products with finite supports
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import (
    mul_terms,
    qp_add,
    qp_conj,
    qp_contract,
    qp_mul,
    qp_mul_Qu,
    qp_scale,
    qp_shift,
    qp_one,
    rmul_scalar,
    star_terms,
    _acc,
    _inc,
)
from .scalars import QScalar
from .series import SeriesError, SpectrumGrid

_HALF = Fraction(1, 2)


class SpectralKindError(TypeError):
    """Operation not defined for this coefficient class."""


class ExactScalar:
    """Finite sum of QScalar * q^mu with rational mu in [0, 1/2).

    Closes the coefficient field under the fractional q-powers coming from
    A = q^(2 alpha); for half-integer exponents it collapses back to the
    mu = 0 slot, so exact cancellation stays structural.
    """

    __slots__ = ("slots",)

    def __init__(self, slots=None):
        self.slots = {} if slots is None else slots

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({Fraction(0): QScalar.one()})

    @classmethod
    def from_qscalar(cls, c):
        if c.is_zero():
            return cls()
        return cls({Fraction(0): c})

    @classmethod
    def q_power(cls, e, coeff=None, sign=1):
        """sign * coeff * q^e for any rational e."""
        e = Fraction(e)
        mu = e % _HALF
        c = QScalar.s_power(int(2 * (e - mu)))
        if coeff is not None:
            c = c * coeff
        if sign < 0:
            c = -c
        if c.is_zero():
            return cls()
        return cls({mu: c})

    def __add__(self, other):
        other = _exact(other)
        out = dict(self.slots)
        for mu, c in other.slots.items():
            v = out.get(mu)
            v = c if v is None else v + c
            if v.is_zero():
                out.pop(mu, None)
            else:
                out[mu] = v
        return ExactScalar(out)

    def __neg__(self):
        return ExactScalar({mu: -c for mu, c in self.slots.items()})

    def __sub__(self, other):
        return self + (-_exact(other))

    def __mul__(self, other):
        other = _exact(other)
        out = {}
        for m1, c1 in self.slots.items():
            for m2, c2 in other.slots.items():
                mu = m1 + m2
                c = c1 * c2
                if mu >= _HALF:
                    mu -= _HALF
                    c = c * QScalar.s_power(1)
                v = out.get(mu)
                v = c if v is None else v + c
                if v.is_zero():
                    out.pop(mu, None)
                else:
                    out[mu] = v
        return ExactScalar(out)

    def scale(self, c):
        if c.is_zero():
            return ExactScalar()
        return ExactScalar({mu: v * c for mu, v in self.slots.items()})

    def invert(self):
        if len(self.slots) != 1:
            raise ArithmeticError("only single-slot exact scalars are invertible")
        ((mu, c),) = self.slots.items()
        mu2 = (-mu) % _HALF
        carry = int(2 * (-mu - mu2))
        return ExactScalar({mu2: c.invert() * QScalar.s_power(carry)})

    def conj(self):
        return ExactScalar({mu: c.conj() for mu, c in self.slots.items()})

    def is_zero(self):
        return not self.slots

    def eval(self, q):
        out = 0j
        for mu, c in self.slots.items():
            out += c.eval(q) * (q ** float(mu))
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QScalar)):
            other = _exact(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self.slots == other.slots

    def __hash__(self):
        return hash(frozenset(self.slots.items()))

    def __str__(self):
        if not self.slots:
            return "0"
        parts = []
        for mu in sorted(self.slots):
            c = self.slots[mu]
            if mu == 0:
                parts.append(str(c))
            else:
                parts.append(f"({c})*q^({mu})")
        return " + ".join(parts)

    __repr__ = __str__


def _exact(x):
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, QScalar):
        return ExactScalar.from_qscalar(x)
    if isinstance(x, (int, Fraction)):
        return ExactScalar.from_qscalar(QScalar.rational(x))
    raise TypeError(f"cannot coerce {type(x).__name__} to ExactScalar")


def coord_exact(key):
    """Exact value of a coordinate key (0 or (sign, exponent))."""
    if key == 0:
        return ExactScalar.zero()
    return ExactScalar.q_power(key[1], sign=key[0])


def qp_eval_exact(p, point):
    """Exact value of a coordinate polynomial at a grid point."""
    out = ExactScalar.zero()
    for e, c in p.items():
        term = ExactScalar.from_qscalar(c)
        dead = False
        expo = Fraction(0)
        sign = 1
        for key, ei in zip(point, e):
            if not ei:
                continue
            if key == 0:
                dead = True
                break
            expo += key[1] * ei
            if key[0] < 0 and ei % 2:
                sign = -sign
        if dead:
            continue
        out = out + term * ExactScalar.q_power(expo, sign=sign)
    return out


class SpectralFn:
    """One middle coefficient: a function on the spectrum grid."""

    __slots__ = ("kind", "data", "tail")

    def __init__(self, kind, data, tail=None):
        self.kind = kind
        self.data = data
        self.tail = tail

    @classmethod
    def finite(cls, points):
        return cls("finite", points)

    @classmethod
    def poly(cls, p):
        return cls("poly", p)

    @classmethod
    def fn(cls, call):
        return cls("fn", call)

    @classmethod
    def decay(cls, call, tail):
        return cls("decay", call, tail)

    def is_zero_like(self):
        if self.kind in ("finite", "poly"):
            return not self.data
        return False

    def __eq__(self, other):
        if not isinstance(other, SpectralFn):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.kind in ("finite", "poly"):
            return self.data == other.data
        return self.data is other.data

    def __hash__(self):
        if self.kind in ("finite", "poly"):
            return hash((self.kind, frozenset(self.data.items())))
        return id(self.data)


def _shift_key(key, d):
    if key == 0:
        return 0
    return (key[0], key[1] + d)


class SpectralCoeffOps:
    """Coefficient interface of the rewrite engine for spectral middles."""

    __slots__ = ("cfg", "n")

    def __init__(self, cfg):
        self.cfg = cfg
        self.n = cfg.n

    # -- value helpers (finite supports may mix exact and complex values) --

    def _vadd(self, x, y):
        if isinstance(x, ExactScalar) and isinstance(y, ExactScalar):
            return x + y
        return self._vfloat(x) + self._vfloat(y)

    def _vmul(self, x, y):
        if isinstance(x, ExactScalar) and isinstance(y, ExactScalar):
            return x * y
        return self._vfloat(x) * self._vfloat(y)

    def _vfloat(self, x):
        return x.eval(self.cfg.q) if isinstance(x, ExactScalar) else x

    def _vzero(self, x):
        return x.is_zero() if isinstance(x, ExactScalar) else x == 0

    def _vscale(self, x, c):
        if isinstance(x, ExactScalar):
            return x.scale(c)
        return x * c.eval(self.cfg.q)

    def _value_at(self, f, pt):
        if f.kind == "finite":
            return f.data.get(pt, ExactScalar.zero())
        if f.kind == "poly":
            return qp_eval_exact(f.data, pt)
        if f.kind == "fn":
            return f.data(pt)
        return f.data(pt)

    # -- engine interface --

    def add(self, a, b):
        ka, kb = a.kind, b.kind
        if ka == "finite" and kb == "finite":
            out = dict(a.data)
            for pt, v in b.data.items():
                if pt in out:
                    s = self._vadd(out[pt], v)
                    if self._vzero(s):
                        del out[pt]
                    else:
                        out[pt] = s
                else:
                    out[pt] = v
            return SpectralFn.finite(out)
        if ka == "poly" and kb == "poly":
            return SpectralFn.poly(qp_add(a.data, b.data))
        if a.is_zero_like():
            return b
        if b.is_zero_like():
            return a
        if "decay" in (ka, kb):
            raise SpectralKindError("cannot add decay coefficients symbolically")
        fa, fb = self._as_exact_callable(a), self._as_exact_callable(b)
        return SpectralFn.fn(lambda t, fa=fa, fb=fb: fa(t) + fb(t))

    def scale(self, a, c):
        k = a.kind
        if k == "finite":
            if c.is_zero():
                return SpectralFn.finite({})
            return SpectralFn.finite({pt: self._vscale(v, c) for pt, v in a.data.items()})
        if k == "poly":
            return SpectralFn.poly(qp_scale(a.data, c))
        if k == "fn":
            f = a.data
            return SpectralFn.fn(lambda t, f=f, c=c: f(t).scale(c))
        cv = c.eval(self.cfg.q)
        f, tail = a.data, a.tail
        return SpectralFn.decay(
            lambda t, f=f, cv=cv: f(t) * cv, lambda K, tail=tail, cv=cv: tail(K) * abs(cv)
        )

    def mul(self, a, b):
        ka, kb = a.kind, b.kind
        if ka == "finite" or kb == "finite":
            fin, oth = (a, b) if ka == "finite" else (b, a)
            out = {}
            for pt, v in fin.data.items():
                w = self._value_at(oth, pt)
                nv = self._vmul(v, w)
                if not self._vzero(nv):
                    out[pt] = nv
            return SpectralFn.finite(out)
        if "decay" in (ka, kb):
            raise SpectralKindError(
                "decay coefficients multiply only with finite supports and scalars"
            )
        if ka == "poly" and kb == "poly":
            return SpectralFn.poly(qp_mul(a.data, b.data))
        fa, fb = self._as_exact_callable(a), self._as_exact_callable(b)
        return SpectralFn.fn(lambda t, fa=fa, fb=fb: fa(t) * fb(t))

    def _as_exact_callable(self, f):
        if f.kind == "fn":
            return f.data
        if f.kind == "poly":
            p = f.data
            return lambda t, p=p: qp_eval_exact(p, t)
        raise SpectralKindError(f"no exact callable for kind {f.kind!r}")

    def shift(self, a, j, sign, power):
        """Substitute t_i -> q^(2*sign*power) t_i for i <= j."""
        k = a.kind
        d = 2 * sign * power
        if k == "finite":
            out = {}
            for pt, v in a.data.items():
                npt = tuple(_shift_key(key, -d) for key in pt[:j]) + pt[j:]
                out[npt] = v
            return SpectralFn.finite(out)
        if k == "poly":
            return SpectralFn.poly(qp_shift(a.data, j, sign, power))
        if k == "fn":
            f = a.data
            return SpectralFn.fn(
                lambda t, f=f, j=j, d=d: f(
                    tuple(_shift_key(key, d) for key in t[:j]) + t[j:]
                )
            )
        raise SpectralKindError("decay coefficients cannot pass shift generators")

    def mul_Qu(self, a, u):
        k = a.kind
        if k == "finite":
            out = {}
            for pt, v in a.data.items():
                fac = coord_exact(pt[u - 1])
                nv = self._vmul(v, fac)
                if not self._vzero(nv):
                    out[pt] = nv
            return SpectralFn.finite(out)
        if k == "poly":
            return SpectralFn.poly(qp_mul_Qu(a.data, u))
        if k == "fn":
            f = a.data
            return SpectralFn.fn(lambda t, f=f, u=u: f(t) * coord_exact(t[u - 1]))
        raise SpectralKindError("decay coefficients cannot absorb coordinates")

    def contract(self, a, m, power):
        """Multiply by (t_{m+1} - q^(2*power) t_m), with t_{n+1} = 1."""
        k = a.kind
        qp = QScalar.s_power(4 * power)
        if k == "poly":
            return SpectralFn.poly(qp_contract(a.data, m, power, self.n))
        if k == "finite":
            out = {}
            for pt, v in a.data.items():
                fac = self._contract_factor(pt, m, qp)
                nv = self._vmul(v, fac)
                if not self._vzero(nv):
                    out[pt] = nv
            return SpectralFn.finite(out)
        if k == "fn":
            f = a.data
            return SpectralFn.fn(
                lambda t, f=f, m=m, qp=qp: f(t) * self._contract_factor(t, m, qp)
            )
        raise SpectralKindError("decay coefficients cannot absorb coordinates")

    def _contract_factor(self, pt, m, qp):
        hi = ExactScalar.one() if m == self.n else coord_exact(pt[m])
        return hi - coord_exact(pt[m - 1]).scale(qp)

    def is_zero(self, a):
        return a.is_zero_like()

    def conj(self, a):
        k = a.kind
        if k == "finite":
            return SpectralFn.finite(
                {
                    pt: (v.conj() if isinstance(v, ExactScalar) else v.conjugate())
                    for pt, v in a.data.items()
                }
            )
        if k == "poly":
            return SpectralFn.poly(qp_conj(a.data))
        if k == "fn":
            f = a.data
            return SpectralFn.fn(lambda t, f=f: f(t).conj())
        f, tail = a.data, a.tail
        return SpectralFn.decay(lambda t, f=f: f(t).conjugate(), tail)


class SpectralElement:
    """Normal form z^I psi z^{*J} with spectral middle coefficients."""

    __slots__ = ("cfg", "terms")

    def __init__(self, cfg, terms=None):
        self.cfg = cfg
        self.terms = {} if terms is None else terms

    @property
    def ops(self):
        return SpectralCoeffOps(self.cfg)

    # -- constructors --

    @classmethod
    def zero(cls, cfg):
        return cls(cfg)

    @classmethod
    def middle(cls, cfg, fn):
        zero = (0,) * cfg.n
        if fn.is_zero_like():
            return cls(cfg)
        return cls(cfg, {(zero, zero): fn})

    @classmethod
    def unit(cls, cfg):
        return cls.middle(cfg, SpectralFn.poly(qp_one(cfg.n)))

    @classmethod
    def z(cls, cfg, m):
        zero = (0,) * cfg.n
        return cls(cfg, {(_inc(zero, m - 1), zero): SpectralFn.poly(qp_one(cfg.n))})

    @classmethod
    def zstar(cls, cfg, m):
        zero = (0,) * cfg.n
        return cls(cfg, {(zero, _inc(zero, m - 1)): SpectralFn.poly(qp_one(cfg.n))})

    @classmethod
    def from_alg(cls, cfg, elem):
        if elem.n != cfg.n:
            raise ValueError("algebra element and series have different n")
        return cls(
            cfg, {key: SpectralFn.poly(dict(p)) for key, p in elem.terms.items()}
        )

    @classmethod
    def delta(cls, cfg, idx):
        """Spectral projection onto the grid point of one basis index."""
        idx = tuple(idx)
        if len(idx) != cfg.n:
            raise ValueError(f"index tuple must have length {cfg.n}")
        for j in range(1, cfg.n + 1):
            b = cfg.block(j)
            v = idx[j - 1]
            if b == "top" and v < 0:
                raise ValueError(f"direction {j} needs a nonnegative index")
            if b == "nat" and v < 1:
                raise ValueError(f"direction {j} needs a positive index")
            if b in ("v", "dead") and v != 0:
                raise ValueError(f"direction {j} carries no index")
        point = SpectrumGrid(cfg).point(idx)
        return cls.middle(cfg, SpectralFn.finite({point: ExactScalar.one()}))

    # -- arithmetic --

    def _check(self, other):
        if self.cfg != other.cfg:
            raise SeriesError("elements belong to different series")

    def __add__(self, other):
        self._check(other)
        ops = self.ops
        out = dict(self.terms)
        for key, f in other.terms.items():
            _acc(out, key, f, ops)
        return SpectralElement(self.cfg, out)

    def __neg__(self):
        return self.scale(QScalar.rational(-1))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not isinstance(c, QScalar):
            c = QScalar.rational(c)
        return SpectralElement(self.cfg, rmul_scalar(self.terms, c, self.ops))

    def __mul__(self, other):
        if isinstance(other, SpectralElement):
            self._check(other)
            return SpectralElement(
                self.cfg, mul_terms(self.cfg.n, self.terms, other.terms, self.ops)
            )
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def star(self):
        return SpectralElement(self.cfg, star_terms(self.cfg.n, self.terms, self.ops))

    def p00(self):
        zero = (0,) * self.cfg.n
        return self.terms.get((zero, zero), SpectralFn.finite({}))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SpectralElement):
            return NotImplemented
        return self.cfg == other.cfg and self.terms == other.terms

    def coeff_value(self, I, J, point):
        """Exact (or numeric) value of the (I, J) coefficient at a point."""
        f = self.terms.get((tuple(I), tuple(J)))
        if f is None:
            return ExactScalar.zero()
        return self.ops._value_at(f, point)


def mul_spectral(a, b):
    """Product of spectral elements (module-level alias)."""
    return a * b
