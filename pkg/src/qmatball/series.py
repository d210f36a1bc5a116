"""Series data for the irreducible representation family of the ball algebra.

A series is labeled (m, l, k) with m + l + k = n.  Basis vectors carry one
index per direction j:

    j in (n-m, n]   "top"    i_j in N_0   (window [0, N])
    j = n - m, l>0  "v"      no index; acts through the unit phase v
    k < j < n-m     "dead"   z_j acts as zero
    j = k, k>=1     "zline"  i_k in Z     (window [-N, N])
    1 <= j < k      "nat"    i_j in N     (window [1, N])

The joint spectrum of Q_1..Q_n on such a series is the grid

    t_j = q^(2(i_j+..+i_n))                          j > n-m
    t_j = 0                                          k < j <= n-m
    t_j = -q^(-2(i_j+..+i_k) + 2(top sum)) A^2       j <= k

with A = q^(2 alpha), alpha rational in [0, 1/2).  SpectrumGrid keeps those
values exactly, as coordinate keys 0 or (sign, e) standing for sign * q^e
with e a Fraction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction


class SeriesError(ValueError):
    """Invalid series data, or an operation unsupported on this series."""


@dataclass(frozen=True)
class SeriesConfig:
    n: int
    m: int
    l: int
    k: int
    alpha: Fraction = Fraction(0)
    vphase: complex = 1.0 + 0.0j
    q: float = 0.5
    cutoff: int = 12

    def __post_init__(self):
        if self.n < 1:
            raise SeriesError("n must be at least 1")
        if min(self.m, self.l, self.k) < 0 or self.m + self.l + self.k != self.n:
            raise SeriesError(
                f"series ({self.m},{self.l},{self.k}) must be nonnegative and sum to n={self.n}"
            )
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if not (0 <= self.alpha < Fraction(1, 2)):
            raise SeriesError("alpha must lie in [0, 1/2)")
        object.__setattr__(self, "vphase", complex(self.vphase))
        if self.l > 0 and abs(abs(self.vphase) - 1.0) > 1e-12:
            raise SeriesError("vphase must be a unit phase when l > 0")
        if not (0.0 < self.q < 1.0):
            raise SeriesError("q must lie in (0, 1)")
        if self.cutoff < 1:
            raise SeriesError("cutoff must be positive")

    # -- structure --

    def block(self, j):
        if j > self.n - self.m:
            return "top"
        if self.l > 0 and j == self.n - self.m:
            return "v"
        if j > self.k:
            return "dead"
        if j == self.k:
            return "zline"
        return "nat"

    def window(self, j):
        b = self.block(j)
        if b == "top":
            return (0, self.cutoff)
        if b == "zline":
            return (-self.cutoff, self.cutoff)
        if b == "nat":
            return (1, self.cutoff)
        return None

    def eps(self, j):
        """Sign epsilon_j: -1 on the indefinite directions, +1 otherwise."""
        return -1 if j <= self.k else +1

    def series_label(self):
        s = f"({self.m},{self.l},{self.k})"
        if self.k:
            s += f", alpha={self.alpha}"
        if self.l:
            s += f", v={self.vphase}"
        return s

    def replace(self, **kw):
        from dataclasses import replace

        return replace(self, **kw)


class Basis:
    """Flat enumeration of the truncated basis index tuples.

    Index tuples have length n; position j-1 holds i_j (0 for directions
    without an index).  Enumeration runs with i_n slowest.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        js, ranges = [], []
        for j in range(cfg.n, 0, -1):
            w = cfg.window(j)
            if w is not None:
                js.append(j)
                ranges.append(range(w[0], w[1] + 1))
        self.active_js = tuple(js)
        indices = []
        for combo in itertools.product(*ranges):
            idx = [0] * cfg.n
            for j, v in zip(js, combo):
                idx[j - 1] = v
            indices.append(tuple(idx))
        self.indices = indices
        self.position = {t: p for p, t in enumerate(indices)}
        self.size = len(indices)

    def is_interior(self, idx, margin):
        """True if idx sits at least `margin` away from every truncated edge.

        Lower edges of the N_0 and N windows are genuine spectral edges (the
        shift amplitudes vanish there exactly), so only upper edges and both
        ends of the Z window count.
        """
        cfg = self.cfg
        hi = cfg.cutoff - margin
        for j in self.active_js:
            v = idx[j - 1]
            if v > hi:
                return False
            if cfg.block(j) == "zline" and v < -cfg.cutoff + margin:
                return False
        return True

    def interior_positions(self, margin):
        return [p for p, idx in enumerate(self.indices) if self.is_interior(idx, margin)]


class SpectrumGrid:
    """Exact joint spectrum of Q_1..Q_n for one series."""

    def __init__(self, cfg):
        self.cfg = cfg

    def coord_key(self, j, idx):
        cfg = self.cfg
        b = cfg.block(j)
        if b == "top":
            s = sum(idx[j - 1 : cfg.n])
            return (1, Fraction(2 * s))
        if b in ("v", "dead"):
            return 0
        u = sum(idx[j - 1 : cfg.k])
        s_top = sum(idx[cfg.n - cfg.m : cfg.n])
        return (-1, Fraction(-2 * u + 2 * s_top) + 4 * cfg.alpha)

    def point(self, idx):
        return tuple(self.coord_key(j, idx) for j in range(1, self.cfg.n + 1))

    def coord_float(self, j, idx):
        key = self.coord_key(j, idx)
        if key == 0:
            return 0.0
        return key[0] * self.cfg.q ** float(key[1])

    def point_float(self, idx):
        return tuple(self.coord_float(j, idx) for j in range(1, self.cfg.n + 1))

    def attained(self, point):
        """Invert a spectral point to its basis index tuple, or None.

        Only meaningful for l = 0 series (elsewhere the v/dead directions make
        the inversion ill-posed).
        """
        cfg = self.cfg
        if cfg.l:
            raise SeriesError("attainment inversion needs a series with l = 0")
        n, m, k = cfg.n, cfg.m, cfg.k
        idx = [0] * n
        s_prev = 0
        for j in range(n, n - m, -1):
            key = point[j - 1]
            if key == 0 or key[0] != 1:
                return None
            half = key[1] / 2
            if half.denominator != 1:
                return None
            s_j = int(half)
            if s_j < s_prev:
                return None
            idx[j - 1] = s_j - s_prev
            s_prev = s_j
        s_top = s_prev
        u_prev = None
        for j in range(k, 0, -1):
            key = point[j - 1]
            if key == 0 or key[0] != -1:
                return None
            u2 = (2 * s_top + 4 * cfg.alpha - key[1]) / 2
            if u2.denominator != 1:
                return None
            u = int(u2)
            if j == k:
                idx[j - 1] = u
            else:
                i_j = u - u_prev
                if i_j < 1:
                    return None
                idx[j - 1] = i_j
            u_prev = u
        return tuple(idx)

    def weight_exponent(self, point):
        """Exponent w with weight = q^w, i.e. |t_1|^{-n} |t_2|..|t_n|.

        For n = 1 the weight is |t_1|^{-1}.  Requires all coordinates nonzero.
        """
        n = self.cfg.n
        powers = [-1] if n == 1 else [-n] + [1] * (n - 1)
        w = Fraction(0)
        for key, p in zip(point, powers):
            if key == 0:
                raise SeriesError("weight undefined at a zero coordinate")
            w += p * key[1]
        return w

    def sigma_description(self, j):
        cfg = self.cfg
        b = cfg.block(j)
        if b == "top":
            return "{q^(2s) : s in N_0} with closure point 0"
        if b in ("v", "dead"):
            return "{0}"
        a = 4 * cfg.alpha
        if b == "zline":
            return f"{{-q^(2u + {a}) : u in Z}} with closure points 0, -inf"
        return f"{{-q^(-2u + 2s + {a})}} along the nested index cone"


def iter_attained(cfg, radius):
    """All attained index tuples whose largest |i_j| equals `radius`."""
    ranges, js = [], []
    for j in range(cfg.n, 0, -1):
        b = cfg.block(j)
        if b == "top":
            js.append(j)
            ranges.append(range(0, radius + 1))
        elif b == "zline":
            js.append(j)
            ranges.append(range(-radius, radius + 1))
        elif b == "nat":
            js.append(j)
            ranges.append(range(1, radius + 1))
    for combo in itertools.product(*ranges):
        if max((abs(v) for v in combo), default=0) != radius:
            continue
        idx = [0] * cfg.n
        for j, v in zip(js, combo):
            idx[j - 1] = v
        yield tuple(idx)
