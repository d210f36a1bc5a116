"""Spectral grids and the function-coefficient algebra over them."""

import random
from fractions import Fraction

import pytest

from qmatball.algebra import AlgElement
from qmatball.scalars import QScalar
from qmatball.series import SeriesConfig, SeriesError, SpectrumGrid
from qmatball.spectral import (
    ExactScalar,
    SpectralElement,
    SpectralFn,
    SpectralKindError,
)

from test_algebra import random_element

qp = QScalar.q_power


def cfg_top(n=1, cutoff=12):
    return SeriesConfig(n=n, m=n, l=0, k=0, cutoff=cutoff)


def cfg_disc2(alpha=Fraction(3, 20), cutoff=12):
    return SeriesConfig(n=1, m=0, l=0, k=1, alpha=alpha, cutoff=cutoff)


def test_top_grid_coordinates():
    g = SpectrumGrid(cfg_top(1))
    assert g.coord_key(1, (0,)) == (1, Fraction(0))
    assert g.coord_key(1, (3,)) == (1, Fraction(6))
    assert g.coord_float(1, (3,)) == pytest.approx(0.5 ** 6)


def test_zline_grid_coordinates_carry_the_weight_offset():
    g = SpectrumGrid(cfg_disc2())
    sign, e = g.coord_key(1, (0,))
    assert sign == -1
    assert e == Fraction(3, 5)  # 4 * alpha
    sign, e = g.coord_key(1, (-2,))
    assert e == Fraction(3, 5) + 4


def test_nested_cone_coordinates_for_n_two():
    cfg = SeriesConfig(n=2, m=2, l=0, k=0)
    g = SpectrumGrid(cfg)
    # direction 2 sees only its own index, direction 1 the tail sum
    assert g.coord_key(2, (1, 2)) == (1, Fraction(4))
    assert g.coord_key(1, (1, 2)) == (1, Fraction(6))


def test_attained_inverts_points():
    for cfg in (cfg_top(1), cfg_top(2), cfg_disc2()):
        g = SpectrumGrid(cfg)
        rng = random.Random(3)
        for _ in range(15):
            idx = []
            for j in range(1, cfg.n + 1):
                b = cfg.block(j)
                if b == "top":
                    idx.append(rng.randint(0, 5))
                elif b == "zline":
                    idx.append(rng.randint(-4, 4))
                else:
                    idx.append(0)
            idx = tuple(idx)
            assert g.attained(g.point(idx)) == idx


def test_off_grid_point_is_not_attained():
    g = SpectrumGrid(cfg_top(2))
    # (1, q^2) would need i_1 = -1 in the nested cone
    pt = ((1, Fraction(0)), (1, Fraction(2)))
    assert g.attained(pt) is None


def test_delta_window_validation():
    cfg = cfg_top(1)
    SpectralElement.delta(cfg, (0,))
    with pytest.raises(ValueError):
        SpectralElement.delta(cfg, (-1,))
    vcfg = SeriesConfig(n=2, m=1, l=1, k=0)
    SpectralElement.delta(vcfg, (0, 0))
    with pytest.raises(ValueError):
        SpectralElement.delta(vcfg, (1, 0))
    nested = SeriesConfig(n=3, m=1, l=0, k=2, alpha=Fraction(1, 4))
    SpectralElement.delta(nested, (1, -2, 0))
    with pytest.raises(ValueError):
        SpectralElement.delta(nested, (0, -2, 0))


def test_from_alg_is_an_algebra_homomorphism():
    rng = random.Random(17)
    for cfg in (cfg_top(1), cfg_top(2), cfg_disc2()):
        n = cfg.n
        for _ in range(6):
            f = random_element(rng, n, terms=2, deg=2)
            g = random_element(rng, n, terms=2, deg=2)
            Ff = SpectralElement.from_alg(cfg, f)
            Fg = SpectralElement.from_alg(cfg, g)
            assert Ff * Fg == SpectralElement.from_alg(cfg, f * g)
            assert Ff + Fg == SpectralElement.from_alg(cfg, f + g)
            assert Ff.star() == SpectralElement.from_alg(cfg, f.star())


def test_z_moves_delta_support():
    # z delta_i z* is supported where delta_{i+1} sits, scaled by the
    # squared raising amplitude 1 - q^(2(i+1)).
    cfg = cfg_top(1)
    d1 = SpectralElement.delta(cfg, (1,))
    prod = SpectralElement.z(cfg, 1) * d1 * SpectralElement.zstar(cfg, 1)
    expect = SpectralElement.delta(cfg, (2,)).scale(
        QScalar.one() - qp(4)
    )
    assert prod == expect


def test_middle_polynomials_multiply_pointwise():
    cfg = cfg_top(1)
    p1 = SpectralElement.middle(cfg, SpectralFn.poly({(1,): QScalar.one()}))
    p2 = SpectralElement.middle(cfg, SpectralFn.poly({(2,): qp(1)}))
    out = p1 * p2
    assert out == SpectralElement.middle(
        cfg, SpectralFn.poly({(3,): qp(1)})
    )


def test_finite_times_poly_restricts_to_support():
    cfg = cfg_top(1)
    d = SpectralElement.delta(cfg, (2,))
    p = SpectralElement.middle(cfg, SpectralFn.poly({(1,): QScalar.one()}))
    prod = d * p
    # value of t at index 2 is q^4
    assert prod == d.scale(qp(4))


def test_mixed_kind_addition_is_rejected():
    cfg = cfg_top(1)
    d = SpectralElement.delta(cfg, (0,))
    p = SpectralElement.middle(cfg, SpectralFn.poly({(1,): QScalar.one()}))
    with pytest.raises(SpectralKindError):
        d + p


def test_exact_scalar_arithmetic_folds_half_integer_exponents():
    a = ExactScalar.q_power(Fraction(1, 3))
    b = ExactScalar.q_power(Fraction(2, 3))
    assert a * b == ExactScalar.q_power(1)
    assert (a * a * a) == ExactScalar.q_power(1)
    v = a.eval(0.5)
    assert abs(v - 0.5 ** (1 / 3)) < 1e-12


def test_series_label_validation():
    with pytest.raises((ValueError, SeriesError)):
        SeriesConfig(n=2, m=1, l=0, k=0)
