"""Truncated matrix models of the representation series.

Each series (m, l, k) acts on l2 of the index lattice described in series.py.
The z_j act by weighted shifts,

  top j:        raises i_j,  amplitude q^(sum of top indices above j)
                             * (1 - q^(2(i_j+1)))^(1/2)
  v (l > 0):    multiplies by v q^(sum of top indices), lowering i_k if k > 0
  dead:         zero
  zline j = k:  lowers i_k,  amplitude q^(top sum) (1 + q^(-2(i_k-1)) A^2)^(1/2)
                             when l = 0, and q^(-i_k + 1 + top sum) A when l > 0
  nat j < k:    lowers i_j,  amplitude q^(-(i_{j+1}+..+i_k) + top sum)
                             * (q^(-2(i_j-1)) - 1)^(1/2) A

with A = q^(2 alpha), and z*_j is the literal matrix adjoint.  Truncating the
windows at the cutoff corrupts matrix entries near the truncated edges only,
so every numerical check here measures residuals column by column on the
interior states and reports the worst relative column norm.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .algebra import AlgElement, qp_eval
from .series import Basis, SeriesError, SpectrumGrid
from .spectral import ExactScalar, SpectralElement


def z_amplitude(cfg, j, idx):
    """(target index tuple, amplitude) for z_j on one basis state.

    Returns (None, 0.0) when the state is annihilated.  Targets outside the
    truncation window are reported as usual; the caller drops them.
    """
    n, k, l = cfg.n, cfg.k, cfg.l
    q = cfg.q
    b = cfg.block(j)
    if b == "dead":
        return None, 0.0
    s_top = sum(idx[n - cfg.m :]) if cfg.m else 0
    if b == "top":
        r = idx[j - 1] + 1
        out = list(idx)
        out[j - 1] = r
        amp = q ** sum(idx[j:]) * math.sqrt(1.0 - q ** (2 * r))
        return tuple(out), amp
    if b == "v":
        out = list(idx)
        if k > 0:
            out[k - 1] -= 1
        return tuple(out), (q ** s_top) * cfg.vphase
    A = q ** (2 * float(cfg.alpha))
    if b == "zline":
        i = idx[k - 1]
        out = list(idx)
        out[k - 1] = i - 1
        if l == 0:
            amp = q ** s_top * math.sqrt(1.0 + q ** (-2 * (i - 1)) * A * A)
        else:
            amp = q ** (-i + 1 + s_top) * A
        return tuple(out), amp
    # nat block; the lower edge is annihilated exactly
    i = idx[j - 1]
    if i <= 1:
        return None, 0.0
    out = list(idx)
    out[j - 1] = i - 1
    amp = q ** (-sum(idx[j:k]) + s_top) * math.sqrt(q ** (-2 * (i - 1)) - 1.0) * A
    return tuple(out), amp


class RepModel:
    """Truncated matrices of one series; build once, reuse everywhere."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.basis = Basis(cfg)
        self.grid = SpectrumGrid(cfg)
        size = self.basis.size
        self.Z = []
        for j in range(1, cfg.n + 1):
            M = sp.lil_matrix((size, size), dtype=complex)
            for p, idx in enumerate(self.basis.indices):
                tgt, amp = z_amplitude(cfg, j, idx)
                if tgt is None or amp == 0:
                    continue
                pos = self.basis.position.get(tgt)
                if pos is not None:
                    M[pos, p] = amp
            self.Z.append(M.tocsr())
        self.Zs = [M.conj().T.tocsr() for M in self.Z]
        self._q_diag = [
            np.array(
                [self.grid.coord_float(j, idx) for idx in self.basis.indices],
                dtype=complex,
            )
            for j in range(1, cfg.n + 1)
        ]

    @property
    def size(self):
        return self.basis.size

    def identity(self):
        return sp.identity(self.size, dtype=complex, format="csr")

    def q_diag(self, u):
        if u == self.cfg.n + 1:
            return np.ones(self.size, dtype=complex)
        return self._q_diag[u - 1]

    def Q_matrix(self, u):
        return sp.diags(self.q_diag(u), format="csr")

    def gamma_diag(self):
        """Diagonal of the trace weight |Q_1|^(-n) |Q_2| .. |Q_n| (l = 0)."""
        if self.cfg.l:
            raise SeriesError("the trace weight needs a series with l = 0")
        q = self.cfg.q
        vals = [
            q ** float(self.grid.weight_exponent(self.grid.point(idx)))
            for idx in self.basis.indices
        ]
        return np.array(vals, dtype=float)

    # -- evaluation of algebra and spectral elements --

    def _middle_diag(self, f):
        cfg = self.cfg
        if isinstance(f, dict):  # plain Q-polynomial
            coords = [self.grid.point_float(idx) for idx in self.basis.indices]
            return np.array(
                [qp_eval(f, c, cfg.q) for c in coords], dtype=complex
            )
        kind = f.kind
        if kind == "poly":
            return self._middle_diag(f.data)
        vals = np.zeros(self.size, dtype=complex)
        for p, idx in enumerate(self.basis.indices):
            pt = self.grid.point(idx)
            if kind == "finite":
                v = f.data.get(pt)
                if v is None:
                    continue
            else:
                v = f.data(pt)
            vals[p] = v.eval(cfg.q) if isinstance(v, ExactScalar) else v
        return vals

    def evaluate(self, f):
        """Matrix of an AlgElement or a SpectralElement on this model."""
        if isinstance(f, SpectralElement):
            if f.cfg != self.cfg:
                raise ValueError("element belongs to a different series")
            items = f.terms.items()
        elif isinstance(f, AlgElement):
            if f.n != self.cfg.n:
                raise ValueError("element has the wrong number of directions")
            items = f.terms.items()
        else:
            raise TypeError(f"cannot evaluate {type(f).__name__}")
        total = sp.csr_matrix((self.size, self.size), dtype=complex)
        for (I, J), mid in items:
            M = sp.diags(self._middle_diag(mid), format="csr")
            for j in range(self.cfg.n, 0, -1):
                for _ in range(I[j - 1]):
                    M = self.Z[j - 1] @ M
            for j in range(1, self.cfg.n + 1):
                tail = self.Zs[j - 1]
                for _ in range(J[j - 1]):
                    M = M @ tail
            total = total + M
        return total

    def interior(self, margin):
        return self.basis.interior_positions(margin)


@lru_cache(maxsize=None)
def rep_model(cfg):
    return RepModel(cfg)


@lru_cache(maxsize=None)
def expansion_matrices(cfg, j):
    """(rho, rho_inv, A, B) matrices for one direction of an l = 0 series."""
    from .uq import _A_elem, _B_elem, _rho_elem

    model = rep_model(cfg)
    rho = model.evaluate(_rho_elem(cfg, j, +1))
    rho_inv = model.evaluate(_rho_elem(cfg, j, -1))
    a = model.evaluate(_A_elem(cfg, j))
    b = model.evaluate(_B_elem(cfg, j))
    return rho, rho_inv, a, b


def expansion_action_parts(gen, M, cfg):
    """Signed summands of the expansion of gen > f, cancellation deferred.

    Residual checks need the parts separately: the summands carry diagonal
    factors that grow toward the truncation edge, and a relative residual
    has to be judged against their size, not against their difference.
    """
    rho, rho_inv, a, b = expansion_matrices(cfg, gen.j)
    if gen.kind == "K":
        return [rho @ M @ rho_inv]
    if gen.kind == "Kinv":
        return [rho_inv @ M @ rho]
    if gen.kind == "E":
        return [a @ M, -1.0 * (rho @ M @ rho_inv @ a)]
    q2 = cfg.q**2
    return [b @ M @ rho, -q2 * (M @ rho @ b)]


def expansion_action_matrix(gen, M, cfg):
    """Matrix of gen > f computed from the matrix of f via the expansion."""
    parts = expansion_action_parts(gen, M, cfg)
    return parts[0] if len(parts) == 1 else parts[0] + parts[1]


# ---------------------------------------------------------------------------
# residual measurement
# ---------------------------------------------------------------------------

def _col_norms(M):
    C = M.tocsc()
    return np.sqrt(np.asarray(C.multiply(C.conj()).sum(axis=0)).real).ravel()


def interior_residual(lhs, rhs, cols):
    """Worst relative column norm of lhs - rhs over the given columns.

    Either side may be a list of matrices summed together; the relative
    scale at each column is the largest column norm among all the parts
    (floored at 1), so a residual left by cancellation between large parts
    is judged against their size.
    """
    if not cols:
        return 0.0
    L = lhs if isinstance(lhs, (list, tuple)) else [lhs]
    R = rhs if isinstance(rhs, (list, tuple)) else [rhs]
    D = sum(L[1:], L[0]) - sum(R[1:], R[0])
    nd = _col_norms(D)
    scale = np.ones(D.shape[1])
    for part in (*L, *R):
        scale = np.maximum(scale, _col_norms(part))
    sel = np.asarray(cols, dtype=int)
    return float(np.max(nd[sel] / scale[sel]))


def verify_relations(cfg, margin=4, include_expansion=True):
    """Residuals of every defining relation on the truncated model.

    Returns records {"relation", "residual"}; the caller applies its
    tolerance.  Expansion operator relations are included for l = 0 series
    unless switched off.
    """
    model = rep_model(cfg)
    n, q = cfg.n, cfg.q
    Z, Zs = model.Z, model.Zs
    I = model.identity()
    cols = model.interior(margin)
    out = []

    def rec(name, lhs, rhs):
        out.append(
            {"relation": name, "residual": interior_residual(lhs, rhs, cols)}
        )

    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            rec(f"z{a} z{b} = q z{b} z{a}", Z[a - 1] @ Z[b - 1], q * (Z[b - 1] @ Z[a - 1]))
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b:
                rec(
                    f"z{b}* z{a} = q z{a} z{b}*",
                    Zs[b - 1] @ Z[a - 1],
                    q * (Z[a - 1] @ Zs[b - 1]),
                )
    for a in range(1, n):
        tails = [
            -(1 - q**2) * (Z[j - 1] @ Zs[j - 1]) for j in range(a + 1, n + 1)
        ]
        rec(
            f"z{a}* z{a} twisted commutation",
            Zs[a - 1] @ Z[a - 1],
            [q**2 * (Z[a - 1] @ Zs[a - 1]), *tails, (1 - q**2) * I],
        )
    rec(
        f"z{n}* z{n} twisted commutation",
        Zs[n - 1] @ Z[n - 1],
        [q**2 * (Z[n - 1] @ Zs[n - 1]), (1 - q**2) * I],
    )
    for u in range(1, n + 1):
        parts = [I] + [-(Z[j - 1] @ Zs[j - 1]) for j in range(u, n + 1)]
        rec(f"Q{u} diagonal", parts, model.Q_matrix(u))
    for u in range(1, n + 1):
        Qu = model.Q_matrix(u)
        for j in range(1, n + 1):
            fac = q**2 if j >= u else 1.0
            rec(f"Q{u} z{j} commutation", Qu @ Z[j - 1], fac * (Z[j - 1] @ Qu))
            rec(
                f"Q{u} z{j}* commutation",
                Qu @ Zs[j - 1],
                (1.0 / fac) * (Zs[j - 1] @ Qu),
            )
    if include_expansion and cfg.l == 0:
        out.extend(expansion_relation_records(cfg, margin))
    return out


def expansion_relation_records(cfg, margin=4):
    """Residuals of the expansion operator relations (l = 0 series)."""
    model = rep_model(cfg)
    n, q = cfg.n, cfg.q
    lam = q - 1.0 / q
    cols = model.interior(margin)
    R, Rinv, A, B = {}, {}, {}, {}
    for j in range(1, n + 1):
        R[j], Rinv[j], A[j], B[j] = expansion_matrices(cfg, j)
    out = []

    def rec(name, lhs, rhs):
        out.append(
            {"relation": name, "residual": interior_residual(lhs, rhs, cols)}
        )

    def a_cartan(i, j):
        if i == j:
            return 2
        return -1 if abs(i - j) == 1 else 0

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < j:
                rec(f"rho{i} rho{j} commute", R[i] @ R[j], R[j] @ R[i])
            aij = a_cartan(i, j)
            rec(f"rho{i} A{j} = q^{aij} A{j} rho{i}", R[i] @ A[j], q**aij * (A[j] @ R[i]))
            rec(
                f"rho{i} B{j} = q^{-aij} B{j} rho{i}",
                R[i] @ B[j],
                q ** (-aij) * (B[j] @ R[i]),
            )
            if i < j and aij == 0:
                rec(f"A{i} A{j} commute", A[i] @ A[j], A[j] @ A[i])
                rec(f"B{i} B{j} commute", B[i] @ B[j], B[j] @ B[i])
            if aij == -1:
                qq = q + 1.0 / q
                rec(
                    f"A Serre ({i},{j})",
                    A[i] @ A[i] @ A[j] + A[j] @ A[i] @ A[i],
                    qq * (A[i] @ A[j] @ A[i]),
                )
                rec(
                    f"B Serre ({i},{j})",
                    B[i] @ B[i] @ B[j] + B[j] @ B[i] @ B[i],
                    qq * (B[i] @ B[j] @ B[i]),
                )
            if i != j:
                rec(f"A{i} B{j} commute", A[i] @ B[j], B[j] @ A[i])
    for j in range(1, n):
        sgn = cfg.eps(j + 2) * cfg.eps(j)
        rec(
            f"[A{j}, B{j}] closes on rho{j}",
            A[j] @ B[j],
            [B[j] @ A[j], (sgn / lam) * R[j], (-1.0 / lam) * Rinv[j]],
        )
    rec(
        f"[A{n}, B{n}] closes on rho{n}",
        A[n] @ B[n],
        [B[n] @ A[n], (-1.0 / lam) * Rinv[n]],
    )
    return out


# ---------------------------------------------------------------------------
# elementary q-hyperbolic pairs
# ---------------------------------------------------------------------------

def build_qhyp(form, N, q, A=None, u=None):
    """Shift model of one solution of x x* - q^2 x* x = eps (1 - q^2).

    form "I":   eps = +1, x lowers i on [0, N], amplitude (1 - q^(2i))^(1/2)
    form "II":  eps = +1, x lowers i on [-N, N], amplitude (1 + q^(2i) A)^(1/2)
                with q^2 < A <= 1
    form "III": eps = +1, the unimodular scalar u
    form "-I":  eps = -1, x raises i on [1, N], amplitude (q^(-2i) - 1)^(1/2)

    Returns (x, eps, interior_cols(margin)).
    """
    if form == "III":
        if u is None or abs(abs(u) - 1.0) > 1e-14:
            raise ValueError("form III needs a unimodular scalar u")
        x = sp.csr_matrix(np.array([[u]], dtype=complex))
        return x, 1, lambda margin: [0]
    if form == "I":
        dim = N + 1
        M = sp.lil_matrix((dim, dim), dtype=complex)
        for i in range(1, dim):
            M[i - 1, i] = math.sqrt(1.0 - q ** (2 * i))
        return M.tocsr(), 1, lambda margin: list(range(0, dim - margin))
    if form == "II":
        if A is None or not (q**2 < A <= 1.0):
            raise ValueError("form II needs A in (q^2, 1]")
        span = list(range(-N, N + 1))
        pos = {i: p for p, i in enumerate(span)}
        M = sp.lil_matrix((len(span), len(span)), dtype=complex)
        for i in span:
            if i - 1 in pos:
                M[pos[i - 1], pos[i]] = math.sqrt(1.0 + q ** (2 * i) * A)
        cols = lambda margin: [pos[i] for i in span if -N + margin <= i <= N - margin]
        return M.tocsr(), 1, cols
    if form == "-I":
        span = list(range(1, N + 1))
        pos = {i: p for p, i in enumerate(span)}
        M = sp.lil_matrix((len(span), len(span)), dtype=complex)
        for i in span:
            if i + 1 in pos:
                M[pos[i + 1], pos[i]] = math.sqrt(q ** (-2 * i) - 1.0)
        cols = lambda margin: [pos[i] for i in span if i <= N - margin]
        return M.tocsr(), -1, cols
    raise ValueError(f"unknown form {form!r}")


def qhyp_residual(x, eps, cols, q):
    """Interior relative residual of x x* - q^2 x* x = eps (1 - q^2)."""
    xs = x.conj().T.tocsr()
    I = sp.identity(x.shape[0], dtype=complex, format="csr")
    return interior_residual(
        x @ xs, [q**2 * (xs @ x), eps * (1 - q**2) * I], cols
    )
