"""Commutator model of the first order differential calculus on the disc.

For the n = 1 algebra the doubled representation rho = pi (+) pi carries
the symmetric operator

    C = (1 - q^2)^{-1} [[0, z], [z*, 0]],

and d(f) = i[C, rho(f)] recovers the covariant calculus with bimodule
relations dz.z = q^2 z.dz, dz.z* = q^{-2} z*.dz and their adjoints.  On
functions of y = Q_1 the differential collapses to the base-q^2 difference
quotient

    d(psi(y)) = -rho(z) Dpsi(y) d(z*) - q^{-2} Dpsi(y) rho(z*) d(z),

which is what makes delta distributions differentiable.  Commutators are
assembled from the unscaled block matrix and scaled afterwards, so entries
that cancel exactly in the algebra cancel exactly in floating point too.
"""

import random
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .scalars import QScalar
from .series import SeriesError
from .spectral import (ExactScalar, SpectralElement, SpectralFn,
                       SpectralKindError)
from .representations import rep_model, interior_residual


def q_derivative(phi, cfg, base=2):
    """Difference quotient (phi(t) - phi(q^base t)) / (t (1 - q^base)).

    Finite supports and polynomials stay exact; plain callables are wrapped
    pointwise.  Decay certificates do not survive the quotient, so decay
    inputs come back as bare callables.
    """
    q = cfg.q
    inv = (QScalar.one() - QScalar.q_power(base)).invert()
    if phi.kind == "poly":
        out = {}
        for e, c in phi.data.items():
            if not e[0]:
                continue
            fac = (QScalar.one() - QScalar.q_power(base * e[0])) * inv
            out[(e[0] - 1,)] = out.get((e[0] - 1,), QScalar.zero()) + c * fac
        return SpectralFn.poly({e: c for e, c in out.items() if not c.is_zero()})
    if phi.kind == "finite":
        out = {}
        for pt, v in phi.data.items():
            key = pt[0]
            if key == 0:
                raise SpectralKindError("difference quotient needs t != 0")
            sign, e = key
            for shift, flip in ((0, 1), (base, -1)):
                coeff = ExactScalar.q_power(shift - e, sign=sign).scale(inv)
                target = ((sign, e - shift),)
                if isinstance(v, ExactScalar):
                    add = v * coeff if flip > 0 else -(v * coeff)
                else:
                    add = flip * v * complex(coeff.eval(q))
                prev = out.get(target)
                if prev is None:
                    out[target] = add
                elif isinstance(prev, ExactScalar) and isinstance(add, ExactScalar):
                    out[target] = prev + add
                else:
                    pf = prev.eval(q) if isinstance(prev, ExactScalar) else prev
                    af = add.eval(q) if isinstance(add, ExactScalar) else add
                    out[target] = pf + af
        return SpectralFn.finite(out)

    call = phi.data
    facf = 1.0 / (1.0 - q ** base)

    def dcall(pt):
        key = pt[0]
        if key == 0:
            raise SpectralKindError("difference quotient needs t != 0")
        sign, e = key
        a = call(pt)
        b = call(((sign, e + base),))
        if isinstance(a, ExactScalar) and isinstance(b, ExactScalar):
            return (a - b) * ExactScalar.q_power(-e, sign=sign).scale(inv)
        af = a.eval(q) if isinstance(a, ExactScalar) else a
        bf = b.eval(q) if isinstance(b, ExactScalar) else b
        return (af - bf) * facf * sign * q ** (-float(e))

    return SpectralFn.fn(dcall)


def spectral_q_derivative(f, base=2):
    """Apply the difference quotient to a pure function of the Q coordinates."""
    zero = (0,) * f.cfg.n
    out = SpectralElement.zero(f.cfg)
    for (I, J), phi in f.terms.items():
        if I != zero or J != zero:
            raise SpectralKindError(
                "the difference quotient applies to functions of the Q coordinates")
        out = out + SpectralElement.middle(f.cfg, q_derivative(phi, f.cfg, base))
    return out


class CalculusRep:
    """Doubled disc representation with the commutator generator C."""

    def __init__(self, cfg):
        if cfg.n != 1:
            raise SeriesError("the commutator calculus lives over the disc, n = 1")
        if cfg.l:
            raise SeriesError("series with an l block carry no Q-diagonal model")
        self.cfg = cfg
        self.q = cfg.q
        self.model = rep_model(cfg)
        self.dim = self.model.size
        Z = self.model.Z[0]
        Zs = self.model.Zs[0]
        self.scale = 1.0 / (1.0 - self.q ** 2)
        self._C0 = sp.bmat([[None, Z], [Zs, None]], format="csr")
        self.C = self.scale * self._C0
        self.Y = self.model.Q_matrix(1)
        zero = sp.csr_matrix((self.dim, self.dim))
        self.dz = sp.bmat([[zero, zero], [1j * self.Y, zero]], format="csr")
        self.dzstar = sp.bmat([[zero, -1j * self.Y], [zero, zero]], format="csr")

    def lift(self, f):
        """rho(f) acting diagonally on the doubled space."""
        M = f if sp.issparse(f) else self.model.evaluate(f)
        return sp.block_diag((M, M), format="csr")

    def d_parts(self, f):
        """The two halves of i[C, rho(f)], cancellation left to the caller."""
        R = f if sp.issparse(f) and f.shape[0] == 2 * self.dim else self.lift(f)
        w = 1j * self.scale
        return w * (self._C0 @ R), w * (R @ self._C0)

    def d(self, f):
        """Exterior derivative i[C, rho(f)] of an element or a lifted matrix."""
        P, M = self.d_parts(f)
        return P - M

    def interior(self, margin=4):
        cols = self.model.interior(margin)
        return cols + [c + self.dim for c in cols]


def build_calculus(cfg):
    return CalculusRep(cfg)


def d(f, rep):
    """Exterior derivative of f in the given calculus representation."""
    return rep.d(f)


def _core_residual(lhs, rhs, cols):
    """Residual with rows and columns both restricted to the interior.

    Adjoints move truncation damage from edge columns into edge rows, so
    star checks have to cut in both directions before comparing.  Either
    side may be a list of parts, judged like interior_residual does.
    """
    L = lhs if isinstance(lhs, (list, tuple)) else [lhs]
    R = rhs if isinstance(rhs, (list, tuple)) else [rhs]
    idx = np.asarray(cols, dtype=int)
    parts = [np.asarray(p.tocsr()[idx][:, idx].todense()) for p in (*L, *R)]
    nl = len(L)
    D = sum(parts[:nl]) - sum(parts[nl:])
    scale = np.ones(idx.size)
    for part in parts:
        scale = np.maximum(scale, np.sqrt((np.abs(part) ** 2).sum(axis=0)))
    return float(np.max(np.sqrt((np.abs(D) ** 2).sum(axis=0)) / scale))


def _sample_elements(cfg, seed, count=6, max_deg=3):
    """Deterministic pseudo-random disc elements of bounded z-degree."""
    rng = random.Random(seed)
    band = range(-3, 4) if cfg.k else range(0, 6)
    out = []
    for _ in range(count):
        a = rng.randint(0, max_deg)
        b = rng.randint(0, max_deg - a)
        if rng.random() < 0.5:
            mid = SpectralElement.delta(cfg, (rng.choice(list(band)),))
        else:
            c = QScalar.rational(Fraction(rng.randint(1, 5), rng.randint(1, 3)))
            mid = SpectralElement.middle(
                cfg, SpectralFn.poly({(rng.randint(0, 2),): c}))
        f = mid
        for _ in range(a):
            f = SpectralElement.z(cfg, 1) * f
        for _ in range(b):
            f = f * SpectralElement.zstar(cfg, 1)
        out.append((f, a + b))
    return out


def verify_bimodule(rep, margin=4, seed=7):
    """Residuals of the bimodule, Leibniz, and involution identities.

    The Leibniz rule is checked on pseudo-random pairs whose combined
    z-degree stays below the interior margin, so truncation artifacts of
    the two evaluation routes cannot masquerade as failures.  Records are
    {"relation", "residual"}.
    """
    cfg = rep.cfg
    q = rep.q
    cols = rep.interior(margin)
    records = []

    def rec(name, lhs, rhs):
        records.append({"relation": name,
                        "residual": interior_residual(lhs, rhs, cols)})

    zS = SpectralElement.z(cfg, 1)
    zsS = SpectralElement.zstar(cfg, 1)
    rz = rep.lift(zS)
    rzs = rep.lift(zsS)

    records.append({"relation": "C symmetric",
                    "residual": _core_residual(rep.C, rep.C.conj().T.tocsr(), cols)})
    P1, M1 = rep.d_parts(SpectralElement.unit(cfg))
    rec("d1 vanishes", P1, M1)
    rec("dz z bimodule", rep.dz @ rz, (q ** 2) * (rz @ rep.dz))
    rec("dz z* bimodule", rep.dz @ rzs, (q ** -2) * (rzs @ rep.dz))
    rec("dz* z bimodule", rep.dzstar @ rz, (q ** 2) * (rz @ rep.dzstar))
    rec("dz* z* bimodule", rep.dzstar @ rzs, (q ** -2) * (rzs @ rep.dzstar))
    Pz, Mz = rep.d_parts(zS)
    rec("dz commutator form", [Pz, -1.0 * Mz], rep.dz)
    Ps, Ms = rep.d_parts(zsS)
    rec("dz* commutator form", [Ps, -1.0 * Ms], rep.dzstar)

    samples = _sample_elements(cfg, seed)
    pairs = [(f, g) for f, df in samples for g, dg in samples
             if df + dg + 1 <= margin]
    for i, (f, g) in enumerate(pairs):
        Pfg, Mfg = rep.d_parts(f * g)
        Pf, Mf = rep.d_parts(f)
        Pg, Mg = rep.d_parts(g)
        rf, rg = rep.lift(f), rep.lift(g)
        rec(f"Leibniz pair {i}", [Pfg, -1.0 * Mfg],
            [rf @ Pg, -1.0 * (rf @ Mg), Pf @ rg, -1.0 * (Mf @ rg)])

    for i, (f, deg) in enumerate(samples):
        if deg + 1 > margin:
            continue
        Pf, Mf = rep.d_parts(f)
        Ps, Ms = rep.d_parts(f.star())
        records.append({"relation": f"involution sample {i}",
                        "residual": _core_residual(
                            [Pf.conj().T.tocsr(), -1.0 * (Mf.conj().T.tocsr())],
                            [Ps, -1.0 * Ms], cols)})
    return records


def verify_dpsi(psi, rep, margin=4):
    """Interior residual of the difference-quotient form of d(psi(y))."""
    cfg = rep.cfg
    if isinstance(psi, SpectralFn):
        psi = SpectralElement.middle(cfg, psi)
    dpsi = spectral_q_derivative(psi)
    rz = rep.lift(SpectralElement.z(cfg, 1))
    rzs = rep.lift(SpectralElement.zstar(cfg, 1))
    Dl = rep.lift(dpsi)
    P, M = rep.d_parts(psi)
    rhs = [-1.0 * (rz @ Dl @ rep.dzstar),
           (-rep.q ** -2) * (Dl @ rzs @ rep.dz)]
    return interior_residual([P, -1.0 * M], rhs, rep.interior(margin))


def verify_calculus(cfg, margin=4, delta_indices=None, seed=7):
    """Full residual sweep of the calculus on one disc series.

    Runs the bimodule suite and the d(psi) identity for delta functions,
    a polynomial, a linear function, and a constant.
    """
    rep = build_calculus(cfg)
    records = verify_bimodule(rep, margin, seed=seed)
    if delta_indices is None:
        delta_indices = (-3, 0, 2) if cfg.k else (0, 2, 5)
    psis = [(f"delta_{k}", SpectralElement.delta(cfg, (k,)))
            for k in delta_indices]
    psis.append(("poly", SpectralElement.middle(
        cfg, SpectralFn.poly({(2,): QScalar.one(), (1,): QScalar.q_power(1)}))))
    psis.append(("linear", SpectralElement.middle(
        cfg, SpectralFn.poly({(1,): QScalar.one()}))))
    psis.append(("const", SpectralElement.unit(cfg)))
    for name, psi in psis:
        records.append({"relation": f"d({name}) quotient",
                        "residual": verify_dpsi(psi, rep, margin)})
    return records
