"""Invariant integration on the matrix ball and its q-lattice cousins.

The invariant integral of a normal-form element only sees the (0, 0)
coefficient: on a faithful series every off-diagonal block z^I psi z^{*J}
with I or J nonzero is traceless against the radial weight, because I and J
never overlap in a normal form.  What remains is a weighted lattice sum

    h(f) = c * sum over attained grid points of psi_00(t) q^(w(t))

with q^w = |t_1|^(-n) |t_2| .. |t_n| (|t_1|^(-1) when n = 1).  The same
functional has a trace form h(f) = c tr(pi(f) Gamma) on the truncated
matrix model, which is the independent numerical route used for
cross-checks.

Constant and polynomial integrands make the lattice sum divergent unless
every direction keeps a summable geometric ratio; divergence raises
DivergentIntegralError carrying a short report instead of returning junk.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import AlgElement
from .scalars import QScalar
from .series import SeriesError, SpectrumGrid, iter_attained
from .spectral import ExactScalar, SpectralElement, SpectralKindError


class DivergentIntegralError(ArithmeticError):
    """The requested integral diverges; args[0] holds the report."""

    @property
    def report(self):
        return self.args[0] if self.args else ""


@dataclass
class IntegralResult:
    value: complex
    mode: str
    exact: object = None  # QScalar or ExactScalar when the sum is exact
    tail_bound: float | None = None
    meta: dict = field(default_factory=dict)


def _coerce_c(c):
    """Split a normalization into (exact QScalar or None, float).

    When the exact part is present the caller recomputes the float at its
    own q, so the float slot is only meaningful for inexact constants.
    """
    if isinstance(c, QScalar):
        return c, 0j
    if isinstance(c, (int, Fraction)):
        return QScalar.rational(Fraction(c)), complex(c)
    return None, complex(c)


def weight_exact(grid, pt):
    return ExactScalar.q_power(grid.weight_exponent(pt))


# ---------------------------------------------------------------------------
# closed-form lattice sum
# ---------------------------------------------------------------------------

def _poly_closed(cfg, p, label):
    """Exact sum of a Q-polynomial against the weight, or divergence.

    On an all-top series the sum factorizes into independent geometric
    series, one per direction; the monomial t^e converges exactly when
    E_j = e_1 + .. + e_j satisfies E_j >= n - j + 2 for every j.  Any
    nonzero polynomial on a series with a two-sided direction diverges.
    """
    n = cfg.n
    if cfg.k > 0:
        raise DivergentIntegralError(
            f"h diverges on {label}: polynomial integrands are never summable "
            "over the two-sided direction"
        )
    total = QScalar.zero()
    for e, coeff in p.items():
        parts = []
        running = 0
        for j in range(1, n + 1):
            running += e[j - 1]
            d = running - n + j - 1
            if d < 1:
                raise DivergentIntegralError(
                    f"h diverges on {label}: monomial Q^{tuple(e)} keeps "
                    f"ratio q^({2 * d}) in direction {j}"
                )
            parts.append(d)
        term = coeff
        for d in parts:
            term = term / (QScalar.one() - QScalar.q_power(2 * d))
        total = total + term
    return total


def h_closed(f, c=1, tol=1e-12, max_radius=400):
    """Invariant integral of a spectral element as an exact lattice sum.

    Finite supports and summable polynomials are evaluated exactly; decay
    coefficients are summed shell by shell until their tail certificate
    drops below tol.  Divergent integrands raise DivergentIntegralError.
    """
    cfg = f.cfg
    if cfg.l:
        raise SeriesError("the invariant weight lives on series with l = 0")
    q = cfg.q
    grid = SpectrumGrid(cfg)
    label = cfg.series_label()
    phi = f.p00()
    c_exact, c_float = _coerce_c(c)
    if c_exact is not None:
        c_float = complex(c_exact.eval(q))

    if phi.kind == "poly":
        total = _poly_closed(cfg, phi.data, label)
        if c_exact is not None:
            total = total * c_exact
            return IntegralResult(complex(total.eval(q)), "closed", exact=total)
        return IntegralResult(c_float * complex(total.eval(q)), "closed")

    if phi.kind == "finite":
        exact_sum = ExactScalar.zero()
        float_sum = 0j
        all_exact = True
        for pt, v in phi.data.items():
            if grid.attained(pt) is None:
                continue
            w = weight_exact(grid, pt)
            if isinstance(v, ExactScalar):
                exact_sum = exact_sum + v * w
            else:
                all_exact = False
                float_sum += complex(v) * complex(w.eval(q))
        if all_exact:
            if c_exact is not None:
                exact_sum = exact_sum.scale(c_exact)
                return IntegralResult(
                    complex(exact_sum.eval(q)), "closed", exact=exact_sum
                )
            return IntegralResult(
                c_float * complex(exact_sum.eval(q)), "closed"
            )
        value = c_float * (complex(exact_sum.eval(q)) + float_sum)
        return IntegralResult(value, "closed")

    if phi.kind == "decay":
        if phi.tail is None:
            raise ValueError("decay integrands need a tail certificate")
        total = 0j
        for r in range(max_radius + 1):
            for idx in iter_attained(cfg, r):
                pt = grid.point(idx)
                total += complex(phi.data(pt)) * q ** float(
                    grid.weight_exponent(pt)
                )
            bound = float(phi.tail(r))
            if bound <= tol:
                return IntegralResult(
                    c_float * total,
                    "closed",
                    tail_bound=abs(c_float) * bound,
                    meta={"radius": r},
                )
        raise DivergentIntegralError(
            f"h did not meet its tail certificate on {label} within "
            f"radius {max_radius}"
        )

    raise SpectralKindError(
        "cannot certify a bare callable integrand; use a finite support, "
        "a polynomial, or a decay coefficient with a tail certificate"
    )


def h_trace(f, c=1, cutoff=None):
    """The same functional as c tr(pi(f) Gamma) on the truncated model."""
    from .representations import rep_model

    cfg = f.cfg if isinstance(f, SpectralElement) else None
    if cfg is None:
        raise TypeError("h_trace integrates spectral elements")
    if cutoff is not None and cutoff != cfg.cutoff:
        cfg2 = cfg.replace(cutoff=cutoff)
        f = SpectralElement(cfg2, dict(f.terms))
        cfg = cfg2
    model = rep_model(cfg)
    gamma = model.gamma_diag()
    diag = model.evaluate(f).diagonal()
    _, c_float = _coerce_c(c)
    if isinstance(c, QScalar):
        c_float = complex(c.eval(cfg.q))
    return IntegralResult(
        c_float * complex(np.dot(diag, gamma)), "trace", meta={"cutoff": cfg.cutoff}
    )


# ---------------------------------------------------------------------------
# one-dimensional q-lattice integrals
# ---------------------------------------------------------------------------

def jackson_01(psi, q, base=1, bound=None, tol=1e-14, max_terms=100000):
    """Jackson integral of psi over [0, 1] on the lattice q^(base*k).

    A polynomial {exponent: coefficient} integrates exactly to
    sum c_e (1 - q^b) / (1 - q^(b(e+1))) with b = base.  A callable needs
    a sup bound on [0, 1] to certify truncation.
    """
    if isinstance(psi, dict):
        total = QScalar.zero()
        for e, coeff in psi.items():
            if e <= -1:
                raise DivergentIntegralError(
                    f"the Jackson integral of t^({e}) on [0, 1] diverges: "
                    "the lattice sum has ratio q^(b(e+1)) with e+1 <= 0"
                )
            num = QScalar.one() - QScalar.q_power(base)
            den = QScalar.one() - QScalar.q_power(base * (e + 1))
            total = total + _as_qscalar(coeff) * num / den
        return IntegralResult(complex(total.eval(q)), "jackson01", exact=total)
    if bound is None:
        raise ValueError("callable Jackson integrands need a sup bound")
    qb = q**base
    total = 0j
    for k in range(max_terms):
        t = qb**k
        total += (1 - qb) * t * complex(psi(t))
        tail = bound * qb ** (k + 1)
        if tail <= tol:
            return IntegralResult(total, "jackson01", tail_bound=tail)
    raise DivergentIntegralError("Jackson series did not converge in budget")


def jackson_0inf(psi, q, base=1, tail=None, tol=1e-14, max_shells=100000):
    """Jackson integral over [0, infinity) on the bilateral lattice q^(b k).

    Every nonzero polynomial diverges here (the bilateral geometric series
    has no summable ratio).  Callables need a caller tail certificate
    tail(K) bounding the weighted sum beyond |k| > K.
    """
    if isinstance(psi, dict):
        if any(not _is_zero_coeff(cc) for cc in psi.values()):
            raise DivergentIntegralError(
                "the Jackson integral over [0, infinity) of a polynomial "
                "diverges: the bilateral lattice sum has no summable ratio"
            )
        return IntegralResult(0j, "jackson0inf", exact=QScalar.zero())
    if tail is None:
        raise ValueError(
            "callable integrands on [0, infinity) need a tail certificate"
        )
    qb = q**base
    total = (1 - qb) * complex(psi(1.0))
    for K in range(1, max_shells):
        for k in (K, -K):
            t = qb**k
            total += (1 - qb) * t * complex(psi(t))
        bound = float(tail(K))
        if bound <= tol:
            return IntegralResult(total, "jackson0inf", tail_bound=bound)
    raise DivergentIntegralError("Jackson series did not converge in budget")


def _as_qscalar(c):
    if isinstance(c, QScalar):
        return c
    if isinstance(c, (int, Fraction)):
        return QScalar.rational(Fraction(c))
    raise TypeError("polynomial coefficients must be exact for Jackson sums")


def _is_zero_coeff(c):
    if isinstance(c, QScalar):
        return c.is_zero()
    return c == 0


# ---------------------------------------------------------------------------
# disc integrals, summed directly on their one-dimensional lattices
# ---------------------------------------------------------------------------

def h_disc(f, c=1, tol=1e-12, max_terms=4000):
    """Invariant integral on a q-disc, summed on its own lattice.

    Type (I) is the series (1,0,0): lattice t = q^(2k), k >= 0, weight
    q^(-2k); polynomials reduce to a base-q^2 Jackson integral through
    psi -> psi * t^(-2).  Type (II) is (0,0,1) at half-integer parameter
    alpha_d = 2 alpha: lattice t = -q^(2(alpha_d + k)), k in Z, weight
    |t|^(-1); every nonzero polynomial diverges there.

    This function never touches the spectral-grid machinery; it is the
    independent route against h_closed.
    """
    cfg = f.cfg
    if cfg.n != 1 or cfg.l != 0:
        raise SeriesError("disc integrals need a one-direction series with l = 0")
    q = cfg.q
    disc2 = cfg.k == 1
    phi = f.p00()
    c_exact, c_float = _coerce_c(c)
    if c_exact is not None:
        c_float = complex(c_exact.eval(q))

    if phi.kind == "poly":
        mono = {e[0]: coeff for e, coeff in phi.data.items()}
        if not mono:
            return IntegralResult(0j, "disc", exact=QScalar.zero())
        if disc2:
            raise DivergentIntegralError(
                "h diverges on the type (II) disc: polynomial integrands "
                "are never summable over the bilateral lattice"
            )
        shifted = {}
        for e, coeff in mono.items():
            if e < 2:
                raise DivergentIntegralError(
                    f"h diverges on the type (I) disc: t^({e}) decays too "
                    "slowly against the weight t^(-1) on the q^2-lattice"
                )
            shifted[e - 2] = coeff
        inner = jackson_01(shifted, q, base=2)
        pref = QScalar.one() / (QScalar.one() - QScalar.q_power(2))
        total = pref * inner.exact
        if c_exact is not None:
            total = total * c_exact
            return IntegralResult(complex(total.eval(q)), "disc", exact=total)
        return IntegralResult(c_float * complex(total.eval(q)), "disc")

    alpha_d = 2 * cfg.alpha

    def lattice_point(k):
        if disc2:
            e = 2 * (alpha_d + k)
            return ((-1, Fraction(e)),), q ** float(e)
        return ((1, Fraction(2 * k)),), q ** (2 * k)

    if phi.kind == "finite":
        exact_sum = ExactScalar.zero()
        float_sum = 0j
        all_exact = True
        for pt, v in phi.data.items():
            key = pt[0]
            if key == 0:
                continue
            sign, e = key
            if disc2:
                if sign != -1 or (Fraction(e) / 2 - alpha_d).denominator != 1:
                    continue
            else:
                if sign != 1 or Fraction(e) % 2 != 0 or e < 0:
                    continue
            w = ExactScalar.q_power(-Fraction(e))
            if isinstance(v, ExactScalar):
                exact_sum = exact_sum + v * w
            else:
                all_exact = False
                float_sum += complex(v) * q ** float(-e)
        if all_exact:
            if c_exact is not None:
                exact_sum = exact_sum.scale(c_exact)
                return IntegralResult(
                    complex(exact_sum.eval(q)), "disc", exact=exact_sum
                )
            return IntegralResult(c_float * complex(exact_sum.eval(q)), "disc")
        return IntegralResult(
            c_float * (complex(exact_sum.eval(q)) + float_sum), "disc"
        )

    if phi.kind == "decay":
        if phi.tail is None:
            raise ValueError("decay integrands need a tail certificate")
        total = 0j
        count = 0
        for r in range(max_terms):
            kvals = [r] if not disc2 else ([0] if r == 0 else [r, -r])
            for k in kvals:
                pt, tmag = lattice_point(k)
                total += complex(phi.data(pt)) / tmag
                count += 1
            bound = float(phi.tail(r))
            if bound <= tol:
                return IntegralResult(
                    c_float * total,
                    "disc",
                    tail_bound=abs(c_float) * bound,
                    meta={"terms": count},
                )
        raise DivergentIntegralError(
            "disc integral did not meet its tail certificate in budget"
        )

    raise SpectralKindError(
        "cannot certify a bare callable integrand on the disc"
    )


# ---------------------------------------------------------------------------
# the compact-twin functional, exact on the algebra
# ---------------------------------------------------------------------------

def compact_norm_constant(n):
    """prod_{r=1}^n (1 - q^(2r)), the value making h_compact(1) = 1."""
    c = QScalar.one()
    for r in range(1, n + 1):
        c = c * (QScalar.one() - QScalar.q_power(2 * r))
    return c


def h_compact(f):
    """Unique invariant state on the compact twin of the ball algebra.

    Kills every off-diagonal normal-form block and sends Q^e to
    prod_r (1 - q^(2r)) / (1 - q^(2(r + E_r))) with E_r = e_1 + .. + e_r.
    Exact; h_compact(1) = 1.
    """
    if not isinstance(f, AlgElement):
        raise TypeError("h_compact integrates algebra elements")
    n = f.n
    c = compact_norm_constant(n)
    zero = (0,) * n
    total = QScalar.zero()
    p = f.terms.get((zero, zero))
    if p is None:
        return QScalar.zero()
    for e, coeff in p.items():
        term = coeff * c
        running = 0
        for r in range(1, n + 1):
            running += e[r - 1]
            term = term / (QScalar.one() - QScalar.q_power(2 * (r + running)))
        total = total + term
    return total


def h_compact_trace(f, cutoff=30):
    """Numerical reconciliation of h_compact as a weighted trace.

    On the all-top series the same state is c tr(pi(f) diag(t_1 .. t_n)),
    summed on the truncated model; used to cross-check the constant.
    """
    from .representations import rep_model
    from .series import SeriesConfig

    n = f.n
    cfg = SeriesConfig(n=n, m=n, l=0, k=0, cutoff=cutoff)
    model = rep_model(cfg)
    w = np.ones(model.size)
    for u in range(1, n + 1):
        w = w * model.q_diag(u).real
    diag = model.evaluate(f).diagonal()
    c = complex(compact_norm_constant(n).eval(cfg.q))
    return c * complex(np.dot(diag, w))


# ---------------------------------------------------------------------------
# invariance residuals
# ---------------------------------------------------------------------------

def _as_exactscalar(v):
    return v if isinstance(v, ExactScalar) else ExactScalar.from_qscalar(v)


def invariance_residual(gen, f, mode="exact", c=1, cutoff=None, tol=1e-12, q=0.5):
    """h(gen > f) - counit(gen) h(f) in the requested evaluation mode.

    mode "exact":   act through the operator expansion, sum exactly;
                    returns {"abs", "exact_zero"} with exact_zero True only
                    when the difference vanishes identically.
    mode "trace":   both sides as weighted traces on the truncated model.
    mode "compact": the compact-twin state, exact on algebra elements.
    """
    from .uq import act, act_expansion, counit

    eps = counit(gen)
    if mode == "compact":
        d = h_compact(act(gen, f)) - eps * h_compact(f)
        return {"abs": abs(complex(d.eval(q))), "exact_zero": d.is_zero()}
    qf = f.cfg.q
    g = act_expansion(gen, f)
    if mode == "exact":
        lhs = h_closed(g, c=c, tol=tol)
        rhs = h_closed(f, c=c, tol=tol)
        if lhs.exact is not None and rhs.exact is not None:
            d = _as_exactscalar(lhs.exact) + _as_exactscalar(rhs.exact).scale(-eps)
            return {"abs": abs(complex(d.eval(qf))), "exact_zero": d.is_zero()}
        dv = lhs.value - complex(eps.eval(qf)) * rhs.value
        return {"abs": abs(dv), "exact_zero": None}
    if mode == "trace":
        lhs = h_trace(g, c=c, cutoff=cutoff)
        rhs = h_trace(f, c=c, cutoff=cutoff)
        dv = lhs.value - complex(eps.eval(qf)) * rhs.value
        return {"abs": abs(dv), "exact_zero": None}
    raise ValueError(f"unknown mode {mode!r}")
