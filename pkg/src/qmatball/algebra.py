"""Normal-form arithmetic for the coordinate ring of the quantum matrix ball.

Generators z_1..z_n and their adjoints satisfy

    z_k z_l = q z_l z_k                 (k < l)
    z*_l z_k = q z_k z*_l               (k != l)
    z*_k z_k = q^2 z_k z*_k - (1-q^2) sum_{j>k} z_j z*_j + (1-q^2)   (k < n)
    z*_n z_n = q^2 z_n z*_n + (1-q^2)

With Q_k = 1 - sum_{j>=k} z_j z*_j (and Q_{n+1} = 1) these are equivalent to

    z_k z*_k = Q_{k+1} - Q_k,   z*_k z_k = Q_{k+1} - q^2 Q_k,
    Q_k z_j = z_j Q_k (j < k),  Q_k z_j = q^2 z_j Q_k (j >= k),
    Q_k z*_j = z*_j Q_k (j < k), Q_k z*_j = q^{-2} z*_j Q_k (j >= k),

and the Q_k commute.  Every element is stored in the normal form

    f = sum_{I.J = 0} z^I p_{IJ}(Q_1..Q_n) z^{*J},   z^I = z_1^{i_1}..z_n^{i_n},

multi-indices with disjoint supports.  Multiplication folds the right factor
into the left one letter at a time.  The only non-bookkeeping step is the
contraction

    z*_m^j z_m = (Q_{m+1} - q^{2j} Q_m) z*_m^{j-1},

an induction on j from the defining relations, together with the substitution
rule p(Q) z_m = z_m p(.., q^2 Q_m) for the middle polynomial.

The rewrite engine below is written against a small coefficient-operations
interface so the same code also drives elements whose middle coefficients are
spectral functions instead of polynomials (see spectral.py).
"""

from __future__ import annotations

from functools import lru_cache

from .scalars import QScalar


@lru_cache(maxsize=4096)
def _qpow(k):
    """q^k as an exact scalar (integer k)."""
    return QScalar.s_power(2 * k)


def _inc(t, i):
    return t[:i] + (t[i] + 1,) + t[i + 1:]

def _dec(t, i):
    return t[:i] + (t[i] - 1,) + t[i + 1:]


# ---------------------------------------------------------------------------
# polynomials in the commuting family Q_1..Q_n
# ---------------------------------------------------------------------------
# A QPoly is a dict {exponent tuple: QScalar}; exps[i] is the power of Q_{i+1}.

def qp_const(n, c):
    if c.is_zero():
        return {}
    return {(0,) * n: c}

def qp_one(n):
    return qp_const(n, QScalar.one())

def qp_Q(n, u):
    e = [0] * n
    e[u - 1] = 1
    return {tuple(e): QScalar.one()}

def qp_add(p, r):
    out = dict(p)
    for e, c in r.items():
        v = out.get(e)
        v = c if v is None else v + c
        if v.is_zero():
            out.pop(e, None)
        else:
            out[e] = v
    return out

def qp_neg(p):
    return {e: -c for e, c in p.items()}

def qp_scale(p, c):
    if isinstance(c, QScalar) and c.is_zero():
        return {}
    return {e: v * c for e, v in p.items()}

def qp_mul(p, r):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in r.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = out.get(e)
            v = c1 * c2 if v is None else v + c1 * c2
            if v.is_zero():
                out.pop(e, None)
            else:
                out[e] = v
    return out

def qp_conj(p):
    return {e: c.conj() for e, c in p.items()}

def qp_shift(p, j, sign, power):
    """Substitute Q_i -> q^(2*sign*power) Q_i for all i <= j."""
    out = {}
    for e, c in p.items():
        t = 2 * sign * power * sum(e[:j])
        out[e] = c * _qpow(t) if t else c
    return out

def qp_mul_Qu(p, u):
    return {_inc(e, u - 1): c for e, c in p.items()}

def qp_contract(p, m, power, n):
    """Multiply by (Q_{m+1} - q^(2*power) Q_m), with Q_{n+1} = 1."""
    a = qp_mul_Qu(p, m + 1) if m < n else dict(p)
    return qp_add(a, qp_neg(qp_scale(qp_mul_Qu(p, m), _qpow(2 * power))))

def qp_degree(p):
    return max((sum(e) for e in p), default=0)

def qp_eval(p, coords, q):
    """Numeric value at Q_j = coords[j-1]."""
    out = 0j
    for e, c in p.items():
        v = c.eval(q)
        for ei, x in zip(e, coords):
            if ei:
                v *= x ** ei
        out += v
    return out


class PolyCoeffOps:
    """Coefficient interface of the rewrite engine for QPoly middles."""

    __slots__ = ("n",)

    def __init__(self, n):
        self.n = n

    def add(self, a, b):
        return qp_add(a, b)

    def scale(self, a, c):
        return qp_scale(a, c)

    def mul(self, a, b):
        return qp_mul(a, b)

    def shift(self, a, j, sign, power):
        return qp_shift(a, j, sign, power)

    def mul_Qu(self, a, u):
        return qp_mul_Qu(a, u)

    def contract(self, a, m, power):
        return qp_contract(a, m, power, self.n)

    def is_zero(self, a):
        return not a

    def conj(self, a):
        return qp_conj(a)


# ---------------------------------------------------------------------------
# the rewrite engine, generic over middle coefficients
# ---------------------------------------------------------------------------
# terms: dict {(I, J): coef}  with I, J exponent tuples of length n and
# min(I[t], J[t]) == 0 for every t.

def _acc(out, key, coef, ops):
    cur = out.get(key)
    if cur is None:
        if not ops.is_zero(coef):
            out[key] = coef
        return
    v = ops.add(cur, coef)
    if ops.is_zero(v):
        del out[key]
    else:
        out[key] = v


def rmul_z(n, terms, m, ops):
    """Right-multiply normal-form terms by z_m."""
    mi = m - 1
    out = {}
    for (I, J), p in terms.items():
        if J[mi] > 0:
            # pass z*_l (l > m), then contract against the z*_m block
            coef = ops.contract(ops.scale(p, _qpow(sum(J[mi + 1:]))), m, J[mi])
            _acc(out, (I, _dec(J, mi)), coef, ops)
        else:
            # pass the whole z* block, substitute through p, join the z block
            coef = ops.scale(p, _qpow(sum(J) - sum(I[mi + 1:])))
            _acc(out, (_inc(I, mi), J), ops.shift(coef, m, +1, 1), ops)
    return out


def rmul_zstar(n, terms, m, ops):
    """Right-multiply normal-form terms by z*_m."""
    mi = m - 1
    out = {}
    for (I, J), p in terms.items():
        coef = ops.scale(p, _qpow(sum(J[mi + 1:])))
        I2, J2 = I, _inc(J, mi)
        while I2[mi] > 0 and J2[mi] > 0:
            # z^I p z*^J = q^(sum_{l>m} i_l - sum_{l<m} j_l) *
            #              z^(I-e_m) [p(.., q^{-2}Q_m)(Q_{m+1}-Q_m)] z*^(J-e_m)
            t = sum(I2[mi + 1:]) - sum(J2[:mi])
            coef = ops.contract(ops.shift(ops.scale(coef, _qpow(t)), m, -1, 1), m, 0)
            I2, J2 = _dec(I2, mi), _dec(J2, mi)
        _acc(out, (I2, J2), coef, ops)
    return out


def rmul_Q(n, terms, u, ops):
    """Right-multiply by Q_u (u = n+1 is the unit)."""
    if u == n + 1:
        return dict(terms)
    out = {}
    for (I, J), p in terms.items():
        coef = ops.mul_Qu(ops.scale(p, _qpow(2 * sum(J[u - 1:]))), u)
        _acc(out, (I, J), coef, ops)
    return out


def rmul_scalar(terms, c, ops):
    out = {}
    for key, p in terms.items():
        coef = ops.scale(p, c)
        if not ops.is_zero(coef):
            out[key] = coef
    return out


def rmul_middle(n, terms, mid, ops):
    """Right-multiply by a middle coefficient (polynomial or spectral)."""
    out = {}
    for (I, J), p in terms.items():
        m2 = mid
        for j in range(1, n + 1):
            if J[j - 1]:
                m2 = ops.shift(m2, j, +1, J[j - 1])
        _acc(out, (I, J), ops.mul(p, m2), ops)
    return out


def mul_terms(n, aterms, bterms, ops):
    """Product of two normal forms: fold each right-hand term letterwise."""
    out = {}
    for (I, J), mid in bterms.items():
        cur = aterms
        for m in range(1, n + 1):
            for _ in range(I[m - 1]):
                cur = rmul_z(n, cur, m, ops)
        cur = rmul_middle(n, cur, mid, ops)
        for m in range(1, n + 1):
            for _ in range(J[m - 1]):
                cur = rmul_zstar(n, cur, m, ops)
        for key, coef in cur.items():
            _acc(out, key, coef, ops)
    return out


def star_terms(n, terms, ops):
    """Adjoint of a normal form.

    (z^I p z^{*J})* = q^(sum_{k<l} (i_k i_l - j_k j_l)) z^J conj(p) z^{*I};
    the twist counts the swaps needed to resort both reversed blocks.
    """
    out = {}
    for (I, J), p in terms.items():
        t = 0
        for k in range(n):
            for l in range(k + 1, n):
                t += I[k] * I[l] - J[k] * J[l]
        _acc(out, (J, I), ops.scale(ops.conj(p), _qpow(t)), ops)
    return out


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class AlgElement:
    """An element of the ball algebra in normal form."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {} if terms is None else terms

    @property
    def ops(self):
        return PolyCoeffOps(self.n)

    # -- constructors --

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def unit(cls, n):
        zero = (0,) * n
        return cls(n, {(zero, zero): qp_one(n)})

    @classmethod
    def scalar(cls, n, c):
        if not isinstance(c, QScalar):
            c = QScalar.rational(c)
        if c.is_zero():
            return cls(n)
        zero = (0,) * n
        return cls(n, {(zero, zero): qp_const(n, c)})

    @classmethod
    def z(cls, n, m):
        zero = (0,) * n
        return cls(n, {(_inc(zero, m - 1), zero): qp_one(n)})

    @classmethod
    def zstar(cls, n, m):
        zero = (0,) * n
        return cls(n, {(zero, _inc(zero, m - 1)): qp_one(n)})

    @classmethod
    def Q(cls, n, u):
        if u == n + 1:
            return cls.unit(n)
        zero = (0,) * n
        return cls(n, {(zero, zero): qp_Q(n, u)})

    @classmethod
    def from_poly(cls, n, poly):
        zero = (0,) * n
        return cls(n, {(zero, zero): dict(poly)}) if poly else cls(n)

    # -- arithmetic --

    def __add__(self, other):
        if not isinstance(other, AlgElement):
            return NotImplemented
        out = dict(self.terms)
        ops = self.ops
        for key, p in other.terms.items():
            _acc(out, key, p, ops)
        return AlgElement(self.n, out)

    def __neg__(self):
        return AlgElement(self.n, {k: qp_neg(p) for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not isinstance(c, QScalar):
            c = QScalar.rational(c)
        return AlgElement(self.n, rmul_scalar(self.terms, c, self.ops))

    def __mul__(self, other):
        if isinstance(other, AlgElement):
            return AlgElement(
                self.n, mul_terms(self.n, self.terms, other.terms, self.ops)
            )
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def star(self):
        return AlgElement(self.n, star_terms(self.n, self.terms, self.ops))

    # -- queries --

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, AlgElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash(
            (self.n, frozenset((k, frozenset(p.items())) for k, p in self.terms.items()))
        )

    def p00(self):
        """Middle polynomial of the z-free, z*-free part."""
        zero = (0,) * self.n
        return dict(self.terms.get((zero, zero), {}))

    def total_z_degree(self):
        """Largest z-degree after expanding every Q (each Q is quadratic)."""
        deg = 0
        for (I, J), p in self.terms.items():
            deg = max(deg, sum(I) + sum(J) + 2 * qp_degree(p))
        return deg

    def __str__(self):
        from . import exprs

        return exprs.render_element(self)

    __repr__ = __str__


def normalize(n, word):
    """Normal form of a product of letters.

    Letters: ('z', m), ('z*', m), ('Q', u) with 1 <= u <= n+1, or
    ('c', QScalar).
    """
    out = AlgElement.unit(n)
    ops = out.ops
    terms = out.terms
    for kind, val in word:
        if kind == "z":
            terms = rmul_z(n, terms, val, ops)
        elif kind == "z*":
            terms = rmul_zstar(n, terms, val, ops)
        elif kind == "Q":
            terms = rmul_Q(n, terms, val, ops)
        elif kind == "c":
            terms = rmul_scalar(terms, val, ops)
        else:
            raise ValueError(f"unknown letter kind {kind!r}")
    return AlgElement(n, terms)
