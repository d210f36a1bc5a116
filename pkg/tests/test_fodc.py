"""Commutator calculus on the disc: bimodule, Leibniz, and quotient checks."""

from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp

from qmatball.scalars import QScalar
from qmatball.series import SeriesConfig, SeriesError
from qmatball.spectral import (ExactScalar, SpectralElement, SpectralFn,
                               SpectralKindError)
from qmatball.fodc import (
    CalculusRep,
    build_calculus,
    d,
    q_derivative,
    spectral_q_derivative,
    verify_bimodule,
    verify_calculus,
    verify_dpsi,
)
from qmatball.representations import interior_residual


def disc1(cutoff=20):
    return SeriesConfig(n=1, m=1, l=0, k=0, cutoff=cutoff)


def disc2(cutoff=20):
    return SeriesConfig(n=1, m=0, l=0, k=1, alpha=Fraction(3, 20), cutoff=cutoff)


# ---------------------------------------------------------------------------
# the scalar difference quotient
# ---------------------------------------------------------------------------

def test_quotient_of_linear_function_is_one():
    cfg = disc1()
    out = q_derivative(SpectralFn.poly({(1,): QScalar.one()}), cfg)
    assert out.kind == "poly"
    assert set(out.data) == {(0,)}
    assert (out.data[(0,)] - QScalar.one()).is_zero()


def test_quotient_of_square_base_two():
    # (t^2 - (q^2 t)^2) / (t (1 - q^2)) = (1 + q^2) t.
    cfg = disc1()
    out = q_derivative(SpectralFn.poly({(2,): QScalar.one()}), cfg)
    expect = QScalar.one() + QScalar.q_power(2)
    assert set(out.data) == {(1,)}
    assert (out.data[(1,)] - expect).is_zero()


def test_quotient_of_square_base_one():
    # The classical q-derivative of t^2 is (1 + q) t.
    cfg = disc1()
    out = q_derivative(SpectralFn.poly({(2,): QScalar.one()}), cfg, base=1)
    expect = QScalar.one() + QScalar.q_power(1)
    assert (out.data[(1,)] - expect).is_zero()


def test_quotient_kills_constants():
    cfg = disc1()
    out = q_derivative(SpectralFn.poly({(0,): QScalar.q_power(2)}), cfg)
    assert out.data == {}


def test_quotient_of_point_mass_is_a_two_point_charge():
    # D(delta_{t0}) carries 1/(t0 (1-q^2)) at t0 and -q^2/(t0 (1-q^2))
    # one lattice step above it.
    cfg = disc1()
    inv = (QScalar.one() - QScalar.q_power(2)).invert()
    phi = SpectralFn.finite({((1, Fraction(2)),): ExactScalar.one()})
    out = q_derivative(phi, cfg)
    assert out.kind == "finite"
    assert set(out.data) == {((1, Fraction(2)),), ((1, Fraction(0)),)}
    at_t0 = out.data[((1, Fraction(2)),)]
    above = out.data[((1, Fraction(0)),)]
    assert (at_t0 - ExactScalar.q_power(-2).scale(inv)).is_zero()
    assert (above + ExactScalar.one().scale(inv)).is_zero()

    # pointwise float check at t0 = q^2
    q = cfg.q
    t0 = q**2
    assert complex(at_t0.eval(q)) == pytest.approx(1.0 / (t0 * (1 - q**2)))


def test_quotient_rejects_off_diagonal_blocks():
    cfg = disc1()
    with pytest.raises(SpectralKindError):
        spectral_q_derivative(SpectralElement.z(cfg, 1))


# ---------------------------------------------------------------------------
# the doubled representation
# ---------------------------------------------------------------------------

def test_calculus_needs_one_direction_and_no_v_block():
    with pytest.raises(SeriesError):
        build_calculus(SeriesConfig(n=2, m=2, l=0, k=0, cutoff=8))
    with pytest.raises(SeriesError):
        build_calculus(SeriesConfig(n=1, m=0, l=1, k=0, cutoff=8))


def test_one_form_blocks_carry_the_coordinate_diagonal():
    rep = build_calculus(disc1(cutoff=12))
    n = rep.dim
    Y = rep.Y.toarray()
    dz = rep.dz.toarray()
    dzs = rep.dzstar.toarray()
    assert np.allclose(dz[n:, :n], 1j * Y)
    assert not dz[:n, n:].any() and not dz[:n, :n].any()
    assert np.allclose(dzs[:n, n:], -1j * Y)
    assert not dzs[n:, :n].any() and not dzs[n:, n:].any()


def test_generator_matrix_is_symmetric_on_the_interior():
    for cfg in (disc1(cutoff=16), disc2(cutoff=16)):
        rep = build_calculus(cfg)
        cols = rep.interior(3)
        idx = np.asarray(cols)
        C = rep.C.tocsr()[idx][:, idx].toarray()
        assert np.max(np.abs(C - C.conj().T)) <= 1e-13


def test_derivative_of_coordinates_matches_the_one_forms():
    rep = build_calculus(disc1(cutoff=20))
    cols = rep.interior(4)
    res_z = interior_residual(rep.d(SpectralElement.z(rep.cfg, 1)),
                              rep.dz, cols)
    res_zs = interior_residual(rep.d(SpectralElement.zstar(rep.cfg, 1)),
                               rep.dzstar, cols)
    assert res_z <= 1e-13
    assert res_zs <= 1e-13


def test_derivative_is_linear():
    rep = build_calculus(disc1(cutoff=16))
    f = SpectralElement.delta(rep.cfg, (2,))
    g = SpectralElement.delta(rep.cfg, (0,)).scale(QScalar.q_power(1, 3))
    lhs = rep.d(f + g)
    rhs = rep.d(f) + rep.d(g)
    assert (lhs - rhs).count_nonzero() == 0

    p1 = SpectralElement.middle(rep.cfg, SpectralFn.poly({(1,): QScalar.one()}))
    p2 = SpectralElement.middle(rep.cfg, SpectralFn.poly({(2,): QScalar.one()}))
    lhs = rep.d(p1 + p2)
    rhs = rep.d(p1) + rep.d(p2)
    assert abs((lhs - rhs).toarray()).max() <= 1e-14


def test_module_level_d_delegates_to_the_representation():
    rep = build_calculus(disc1(cutoff=12))
    f = SpectralElement.delta(rep.cfg, (1,))
    assert (d(f, rep) - rep.d(f)).count_nonzero() == 0


def test_derivative_of_unit_vanishes_identically():
    for cfg in (disc1(cutoff=14), disc2(cutoff=14)):
        rep = build_calculus(cfg)
        assert rep.d(SpectralElement.unit(cfg)).count_nonzero() == 0


# ---------------------------------------------------------------------------
# the identity suites
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("cfg", [disc1(cutoff=20), disc2(cutoff=20)],
                         ids=["disc-I", "disc-II"])
def test_bimodule_and_leibniz_suite(cfg):
    rep = build_calculus(cfg)
    for rec in verify_bimodule(rep, margin=4):
        assert rec["residual"] <= 1e-12, (
            f"{rec['relation']}: {rec['residual']:.2e}"
        )


@pytest.mark.parametrize("cfg", [disc1(cutoff=20), disc2(cutoff=20)],
                         ids=["disc-I", "disc-II"])
def test_quotient_form_of_dpsi_for_point_masses(cfg):
    rep = build_calculus(cfg)
    indices = (-2, 0, 3) if cfg.k else (0, 2, 4)
    for k in indices:
        res = verify_dpsi(SpectralElement.delta(cfg, (k,)), rep, margin=4)
        assert res <= 1e-12, f"delta_{k}: {res:.2e}"


def test_quotient_form_of_dpsi_for_polynomials():
    rep = build_calculus(disc1(cutoff=20))
    psi = SpectralFn.poly({(2,): QScalar.one(), (1,): QScalar.q_power(1)})
    assert verify_dpsi(psi, rep, margin=4) <= 1e-12


def test_full_calculus_sweep_stays_exactly_flat():
    for cfg in (disc1(cutoff=18), disc2(cutoff=18)):
        for rec in verify_calculus(cfg, margin=4):
            assert rec["residual"] <= 1e-12, (
                f"{rec['relation']} on {cfg.series_label()}: "
                f"{rec['residual']:.2e}"
            )
