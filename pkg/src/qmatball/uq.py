"""Module-*-algebra action of U_q(su(n,1)) on the ball algebra.

Chevalley generators E_j, F_j, K_j (j = 1..n) act on generators by

  j < n:  E_j: z_{j+1} -> q^(-1/2) z_j,     z*_j -> -q^(-3/2) z*_{j+1}
          F_j: z_j -> q^(1/2) z_{j+1},      z*_{j+1} -> -q^(3/2) z*_j
          K_j: z_j -> q z_j, z_{j+1} -> q^(-1) z_{j+1} (starred: inverse)
  j = n:  E_n: z_n -> -q^(1/2) z_n^2,  z_k -> -q^(1/2) z_n z_k (k < n),
               z*_n -> q^(-3/2)
          F_n: z_n -> q^(1/2),  z*_n -> -q^(5/2) z*_n^2,
               z*_k -> -q^(5/2) z*_k z*_n (k < n)
          K_n: z_n -> q^2 z_n, z_k -> q z_k (starred: inverse)

extended to products through the coproduct: E acts as E x 1 + K x E, F as
F x K^(-1) + 1 x F, K multiplicatively.  K fixes every Q_u, so K/Kinv act
termwise on normal forms; E and F expand the Q's into z-words first, which is
what the degree guard bounds.

The same generators also act on spectral elements through the operator
expansion

    K_j > f = rho_j f rho_j^(-1)
    E_j > f = A_j f - rho_j f rho_j^(-1) A_j
    F_j > f = B_j f rho_j - q^2 f rho_j B_j

with radial coefficients rho_j = |Q_j|^(1/2) |Q_{j+1}|^(-1) |Q_{j+2}|^(1/2)
(rho_n = |Q_1|^(1/2) |Q_n|^(1/2)), A_j = -q^(-3/2) lambda^(-1) z_j Q_{j+1}^(-1)
z*_{j+1} (A_n = q^(-1/2) lambda^(-1) z_n) and B_j = rho_j^(-1) A_j^*
(B_n = -rho_n^(-1) A_n^*); defined on series with l = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import AlgElement, normalize, _qpow
from .scalars import QScalar
from .series import SeriesError
from .spectral import ExactScalar, SpectralElement, SpectralFn


class DegreeGuardError(RuntimeError):
    """The Q-expansion of the acted-on element exceeds the degree guard."""


_KINDS = ("E", "F", "K", "Kinv")


@dataclass(frozen=True)
class Generator:
    kind: str
    j: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.j < 1:
            raise ValueError("generator index must be positive")

    def __str__(self):
        return f"{self.kind}{self.j}"


@dataclass(frozen=True)
class GeneratorWord:
    factors: tuple
    coeff: QScalar = QScalar.one()

    def __mul__(self, other):
        return GeneratorWord(self.factors + other.factors, self.coeff * other.coeff)

    def scale(self, c):
        return GeneratorWord(self.factors, self.coeff * c)


def cartan(i, j):
    if i == j:
        return 2
    if abs(i - j) == 1:
        return -1
    return 0


def counit(g):
    """Counit of a generator or generator word."""
    if isinstance(g, GeneratorWord):
        out = g.coeff
        for f in g.factors:
            out = out * counit(f)
        return out
    return QScalar.one() if g.kind in ("K", "Kinv") else QScalar.zero()


# ---------------------------------------------------------------------------
# action tables on the generators
# ---------------------------------------------------------------------------

def _kappa_exp(n, j, letter):
    """Exponent e with K_j > letter = q^e letter."""
    kind, m = letter
    if j < n:
        if kind == "z":
            return 1 if m == j else (-1 if m == j + 1 else 0)
        return -1 if m == j else (1 if m == j + 1 else 0)
    if kind == "z":
        return 2 if m == n else 1
    return -2 if m == n else -1


@lru_cache(maxsize=None)
def _table_E(n, j):
    half = QScalar.q_power
    tab = {}
    if j < n:
        tab[("z", j + 1)] = AlgElement.z(n, j).scale(half(-0.5))
        tab[("z*", j)] = AlgElement.zstar(n, j + 1).scale(-half(-1.5))
    else:
        tab[("z", n)] = normalize(n, [("z", n), ("z", n)]).scale(-half(0.5))
        for m in range(1, n):
            tab[("z", m)] = normalize(n, [("z", n), ("z", m)]).scale(-half(0.5))
        tab[("z*", n)] = AlgElement.unit(n).scale(half(-1.5))
    return tab


@lru_cache(maxsize=None)
def _table_F(n, j):
    half = QScalar.q_power
    tab = {}
    if j < n:
        tab[("z", j)] = AlgElement.z(n, j + 1).scale(half(0.5))
        tab[("z*", j + 1)] = AlgElement.zstar(n, j).scale(-half(1.5))
    else:
        tab[("z", n)] = AlgElement.unit(n).scale(half(0.5))
        tab[("z*", n)] = normalize(n, [("z*", n), ("z*", n)]).scale(-half(2.5))
        for m in range(1, n):
            tab[("z*", m)] = normalize(n, [("z*", m), ("z*", n)]).scale(-half(2.5))
    return tab


def _expand_q_monomial(n, e):
    """Expansion of Q^e into signed z-letter words via Q_u = 1 - sum z_j z*_j."""
    combos = [((), 1)]
    for u in range(1, n + 1):
        for _ in range(e[u - 1]):
            new = []
            for letters, sgn in combos:
                new.append((letters, sgn))
                for jj in range(u, n + 1):
                    new.append((letters + (("z", jj), ("z*", jj)), -sgn))
            combos = new
    return combos


def _act_letters(n, gen, letters):
    """Leibniz expansion of E_j or F_j over one z-letter word."""
    tab = _table_E(n, gen.j) if gen.kind == "E" else _table_F(n, gen.j)
    res = AlgElement.zero(n)
    if gen.kind == "E":
        kacc = QScalar.one()
        left = AlgElement.unit(n)
        for p, u in enumerate(letters):
            hit = tab.get(u)
            if hit is not None:
                rest = normalize(n, letters[p + 1:])
                res = res + (left * hit * rest).scale(kacc)
            kacc = kacc * _qpow(_kappa_exp(n, gen.j, u))
            left = left * normalize(n, [u])
        return res
    suffix = [QScalar.one()]
    for u in reversed(letters):
        suffix.append(suffix[-1] * _qpow(-_kappa_exp(n, gen.j, u)))
    suffix.reverse()
    left = AlgElement.unit(n)
    for p, u in enumerate(letters):
        hit = tab.get(u)
        if hit is not None:
            rest = normalize(n, letters[p + 1:])
            res = res + (left * hit * rest).scale(suffix[p + 1])
        left = left * normalize(n, [u])
    return res


def act(gen, f, degree_guard=12):
    """Action of one generator on an algebra element."""
    n = f.n
    if not 1 <= gen.j <= n:
        raise ValueError(f"generator index {gen.j} out of range for n={n}")
    if gen.kind in ("K", "Kinv"):
        sign = 1 if gen.kind == "K" else -1
        out = {}
        for (I, J), p in f.terms.items():
            if gen.j < n:
                e = I[gen.j - 1] - I[gen.j] - J[gen.j - 1] + J[gen.j]
            else:
                e = (
                    2 * I[n - 1]
                    + sum(I[: n - 1])
                    - 2 * J[n - 1]
                    - sum(J[: n - 1])
                )
            coef = {ee: c * _qpow(sign * e) for ee, c in p.items()} if e else p
            out[(I, J)] = dict(coef)
        return AlgElement(n, out)

    if f.total_z_degree() > degree_guard:
        raise DegreeGuardError(
            f"z-degree {f.total_z_degree()} exceeds the guard {degree_guard}; "
            "raise degree_guard to act on larger elements"
        )
    res = AlgElement.zero(n)
    for (I, J), p in f.terms.items():
        base_z = tuple(("z", m) for m in range(1, n + 1) for _ in range(I[m - 1]))
        base_zs = tuple(("z*", m) for m in range(1, n + 1) for _ in range(J[m - 1]))
        for e, c in p.items():
            for letters, sgn in _expand_q_monomial(n, e):
                word = base_z + letters + base_zs
                contrib = _act_letters(n, gen, word)
                if not contrib.is_zero():
                    res = res + contrib.scale(c if sgn > 0 else -c)
    return res


def act_word(word, f, degree_guard=12):
    """Action of a product of generators (leftmost factor acts last)."""
    if isinstance(word, GeneratorWord):
        out = act_word(word.factors, f, degree_guard)
        return out.scale(word.coeff)
    out = f
    for g in reversed(tuple(word)):
        out = act(g, out, degree_guard)
    return out


def all_generators(n):
    return [Generator(kind, j) for j in range(1, n + 1) for kind in _KINDS]


# ---------------------------------------------------------------------------
# axiom and relation verification
# ---------------------------------------------------------------------------

def _star_twist(n, gen):
    """(coeff, generator) with S(X)* = coeff * generator."""
    if gen.kind == "K":
        return QScalar.one(), Generator("Kinv", gen.j)
    if gen.kind == "Kinv":
        return QScalar.one(), Generator("K", gen.j)
    sign = 1 if gen.j == n else -1
    if gen.kind == "E":
        return QScalar.q_power(-2, coeff=sign), Generator("F", gen.j)
    return QScalar.q_power(2, coeff=sign), Generator("E", gen.j)


def verify_module_algebra(f, g, generators=None, degree_guard=14):
    """Check the module-*-algebra axioms on a pair of elements.

    Returns a list of {axiom, generator, ok} records covering the product
    rule (through the coproduct), the unit rule and the star compatibility
    X > f* = (S(X)* > f)*.
    """
    n = f.n
    gens = generators if generators is not None else all_generators(n)
    records = []
    prod = f * g
    unit = AlgElement.unit(n)
    for X in gens:
        lhs = act(X, prod, degree_guard)
        if X.kind == "E":
            K = Generator("K", X.j)
            rhs = act(X, f, degree_guard) * g + act(K, f) * act(X, g, degree_guard)
        elif X.kind == "F":
            Ki = Generator("Kinv", X.j)
            rhs = act(X, f, degree_guard) * act(Ki, g) + f * act(X, g, degree_guard)
        else:
            rhs = act(X, f) * act(X, g)
        records.append(
            {"axiom": "product", "generator": str(X), "ok": (lhs - rhs).is_zero()}
        )
        ru = act(X, unit)
        records.append(
            {
                "axiom": "unit",
                "generator": str(X),
                "ok": (ru - unit.scale(counit(X))).is_zero(),
            }
        )
        c, Y = _star_twist(n, X)
        lhs_s = act(X, f.star(), degree_guard)
        rhs_s = act(Y, f, degree_guard).scale(c).star()
        records.append(
            {"axiom": "star", "generator": str(X), "ok": (lhs_s - rhs_s).is_zero()}
        )
    return records


def uq_relation_residuals(n):
    """The defining relations, as named residual maps f -> element."""
    lam_inv = QScalar.lam().invert()
    rels = []

    def word(*gens):
        return list(gens)

    def residual(terms):
        # terms: list of (QScalar, [generators])
        def run(f, guard=14):
            out = AlgElement.zero(f.n)
            for c, gens in terms:
                out = out + act_word(gens, f, guard).scale(c)
            return out

        return run

    one = QScalar.one()
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            Ei, Fi = Generator("E", i), Generator("F", i)
            Ej, Fj = Generator("E", j), Generator("F", j)
            Ki = Generator("K", i)
            if i < j:
                Kj = Generator("K", j)
                rels.append(
                    (f"K{i}K{j} commute",
                     residual([(one, word(Ki, Kj)), (-one, word(Kj, Ki))]))
                )
            if i == j:
                rels.append(
                    (f"K{i} invertible",
                     residual([(one, word(Ki, Generator("Kinv", i))), (-one, [])]))
                )
                rels.append(
                    (f"[E{i},F{i}] = (K{i}-K{i}^-1)/lambda",
                     residual([
                         (one, word(Ei, Fi)),
                         (-one, word(Fi, Ei)),
                         (-lam_inv, word(Ki)),
                         (lam_inv, word(Generator("Kinv", i))),
                     ]))
                )
            else:
                rels.append(
                    (f"[E{i},F{j}] = 0",
                     residual([(one, word(Ei, Fj)), (-one, word(Fj, Ei))]))
                )
            a = cartan(i, j)
            rels.append(
                (f"K{i}E{j} = q^{a}E{j}K{i}",
                 residual([(one, word(Ki, Ej)), (-_qpow(a), word(Ej, Ki))]))
            )
            rels.append(
                (f"K{i}F{j} = q^{-a}F{j}K{i}",
                 residual([(one, word(Ki, Fj)), (-_qpow(-a), word(Fj, Ki))]))
            )
            if i < j and a == 0:
                rels.append(
                    (f"E{i}E{j} commute",
                     residual([(one, word(Ei, Ej)), (-one, word(Ej, Ei))]))
                )
                rels.append(
                    (f"F{i}F{j} commute",
                     residual([(one, word(Fi, Fj)), (-one, word(Fj, Fi))]))
                )
            if a == -1:
                qq = _qpow(1) + _qpow(-1)
                rels.append(
                    (f"Serre E{i}E{j}",
                     residual([
                         (one, word(Ei, Ei, Ej)),
                         (-qq, word(Ei, Ej, Ei)),
                         (one, word(Ej, Ei, Ei)),
                     ]))
                )
                rels.append(
                    (f"Serre F{i}F{j}",
                     residual([
                         (one, word(Fi, Fi, Fj)),
                         (-qq, word(Fi, Fj, Fi)),
                         (one, word(Fj, Fi, Fi)),
                     ]))
                )
    return rels


def verify_uq_relations(f_samples, degree_guard=14):
    """Evaluate every defining relation on each sample element, exactly."""
    if not f_samples:
        return []
    n = f_samples[0].n
    records = []
    for name, run in uq_relation_residuals(n):
        for f in f_samples:
            r = run(f, degree_guard)
            records.append({"relation": name, "ok": r.is_zero()})
    return records


# ---------------------------------------------------------------------------
# operator-expansion action on spectral elements
# ---------------------------------------------------------------------------

def _abs_power_fn(powers):
    """Exact callable prod_i |t_i|^powers[i] over nonzero coordinates."""

    def call(t, powers=powers):
        e = sum((key[1] * p for key, p in zip(t, powers) if key != 0 and p), Fraction(0))
        return ExactScalar.q_power(e)

    return call


@lru_cache(maxsize=None)
def _rho_elem(cfg, j, sign):
    F = Fraction
    n = cfg.n
    powers = [F(0)] * n
    if j < n:
        powers[j - 1] += F(1, 2)
        powers[j] -= 1
        if j + 2 <= n:
            powers[j + 1] += F(1, 2)
    else:
        powers[0] += F(1, 2)
        powers[n - 1] += F(1, 2)
    if sign < 0:
        powers = [-p for p in powers]
    return SpectralElement.middle(cfg, SpectralFn.fn(_abs_power_fn(tuple(powers))))


@lru_cache(maxsize=None)
def _A_elem(cfg, j):
    from .algebra import qp_const, _inc

    n = cfg.n
    lam_inv = QScalar.lam().invert()
    zero = (0,) * n
    if j == n:
        c = QScalar.q_power(-0.5) * lam_inv
        return SpectralElement(
            cfg, {(_inc(zero, n - 1), zero): SpectralFn.poly(qp_const(n, c))}
        )
    c0 = -QScalar.q_power(-1.5) * lam_inv

    def coeff(t, j=j, c0=c0):
        sgn, e = t[j]  # coordinate j+1; nonzero on l = 0 grids
        return ExactScalar.q_power(-e, sign=sgn).scale(c0)

    return SpectralElement(
        cfg, {(_inc(zero, j - 1), _inc(zero, j)): SpectralFn.fn(coeff)}
    )


@lru_cache(maxsize=None)
def _B_elem(cfg, j):
    base = _rho_elem(cfg, j, -1) * _A_elem(cfg, j).star()
    return -base if j == cfg.n else base


def act_expansion(gen, f):
    """Action on a spectral element through the operator expansion."""
    cfg = f.cfg
    if cfg.l:
        raise SeriesError("the operator expansion needs a series with l = 0")
    n = cfg.n
    if not 1 <= gen.j <= n:
        raise ValueError(f"generator index {gen.j} out of range for n={n}")
    rho = _rho_elem(cfg, gen.j, +1)
    rho_inv = _rho_elem(cfg, gen.j, -1)
    if gen.kind == "K":
        return rho * f * rho_inv
    if gen.kind == "Kinv":
        return rho_inv * f * rho
    if gen.kind == "E":
        A = _A_elem(cfg, gen.j)
        return A * f - rho * f * rho_inv * A
    B = _B_elem(cfg, gen.j)
    return B * f * rho - (f * rho * B).scale(_qpow(2))
