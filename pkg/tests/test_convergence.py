import numpy as np
import pytest

from henonskew.base import BaseDynamics, BaseSpace, BaseSystem, FrozenSequence, ParamSequence
from henonskew.convergence import (
    ConvergenceReport,
    CutoffSpec,
    PotentialSpec,
    cutoff_limit_probe,
    pullback_convergence,
    pullback_identity_check,
    rigidity_probe,
    theta_average_pullback,
)
from henonskew.errors import UnsupportedBase, ValidationError
from henonskew.family import quadratic_family
from henonskew.filtration import compute_radius
from henonskew.grids import SliceGrid, SliceSpec

U_FS = PotentialSpec("fubini-study")
U_LOG = PotentialSpec("log-plus")


def _grid(res=96, half=2.6):
    return SliceGrid.from_window(SliceSpec("x", 0j), (-half, half, -half, half), res)


def test_potential_values():
    u = PotentialSpec("fubini-study")
    assert u.eval_points(np.array([0j]), np.array([0j]))[0] == 0.0
    big = u.eval_lognorm(np.array([300.0]))[0]
    assert big == pytest.approx(300.0)
    v = PotentialSpec("smoothed-log", c=2.0)
    assert v.eval_points(np.array([0j]), np.array([0j]))[0] == pytest.approx(np.log(2.0))
    with pytest.raises(ValidationError):
        PotentialSpec("weird")


def test_pullback_matches_cauchy_tail(quad_fam, single_base, quad_flt):
    # u = log+ and a constant sequence: e_n is exactly the Green truncation gap
    seq = FrozenSequence(np.zeros(1, dtype=complex), cycle=True)
    rep = pullback_convergence(quad_fam, seq, U_LOG, _grid(64), n_max=10, tol=1e-8, flt=quad_flt, space=single_base.space)
    bounds = [quad_flt.tail_bound(n) for n in rep.depths]
    assert all(e <= b for e, b in zip(rep.errors, bounds))


def test_pullback_rate_fs(box_fam, two_letter_base):
    flt = compute_radius(box_fam, two_letter_base.space)
    seq = ParamSequence(two_letter_base.space, 99)
    rep = pullback_convergence(box_fam, seq, U_FS, _grid(), n_max=10, tol=1e-6, flt=flt, space=two_letter_base.space)
    assert rep.masked_fraction < 0.05
    for i in range(2, len(rep.errors) - 1):  # e_n / e_(n+1) >= d/2 from n = 3
        assert rep.errors[i] / rep.errors[i + 1] >= 1.0
    assert rep.monotone_from() is not None


def test_pullback_depth_zero_gap_finite(quad_fam, single_base, quad_flt):
    # sup |u - G| is finite on the window (both have unit log growth)
    seq = FrozenSequence(np.zeros(1, dtype=complex), cycle=True)
    rep = pullback_convergence(quad_fam, seq, U_FS, _grid(48), n_max=1, tol=1e-6, flt=quad_flt, space=single_base.space)
    assert np.isfinite(rep.errors[0])


def test_pullback_identity_exact(quad_fam, single_base, quad_flt):
    seq = FrozenSequence(np.zeros(1, dtype=complex), cycle=True)
    gap = pullback_identity_check(quad_fam, seq, _grid(32), U_FS, 8)
    assert gap < 1e-12


def test_fit_residual_pure_signal():
    depths = list(range(4, 13))
    errors = [3.0 * n * 2.0 ** -n for n in depths]
    rep = ConvergenceReport(depths, errors, 2, 0.0)
    assert rep.fit_a == pytest.approx(3.0)
    assert rep.residual_rel < 1e-12


def test_theta_constant_family_matches_pullback(quad_fam, single_base, quad_flt):
    space = BaseSpace("box", bounds=((-1.0, 1.0),))
    rep, floors = theta_average_pullback(quad_fam, space, U_FS, _grid(48), n_max=6, n_mc=4, seed=2, tol=1e-6, flt=quad_flt)
    seq = FrozenSequence(np.zeros(1, dtype=complex), cycle=True)
    direct = pullback_convergence(quad_fam, seq, U_FS, _grid(48), n_max=6, tol=1e-6, flt=quad_flt, space=single_base.space)
    np.testing.assert_allclose(rep.errors, direct.errors, rtol=1e-9, atol=1e-12)


def test_theta_two_letter_floor(box_fam, two_letter_base):
    flt = compute_radius(box_fam, two_letter_base.space)
    rep, floors = theta_average_pullback(
        box_fam, two_letter_base.space, U_FS, _grid(48), n_max=10, n_mc=24, seed=6, tol=1e-6, flt=flt
    )
    # errors decrease and end within a few noise floors
    assert rep.errors[0] > rep.errors[-1]
    assert rep.errors[-1] < 5 * max(floors[-1], 1e-12)


def test_rigidity_same_potential_zero(quad_fam, single_base, quad_flt):
    seq = FrozenSequence(np.zeros(1, dtype=complex), cycle=True)
    d = rigidity_probe(quad_fam, seq, U_FS, U_FS, _grid(48), 8, flt=quad_flt, space=single_base.space)
    assert d == 0.0


def test_rigidity_two_potentials_small(box_fam, two_letter_base):
    flt = compute_radius(box_fam, two_letter_base.space)
    seq = ParamSequence(two_letter_base.space, 4)
    d = rigidity_probe(box_fam, seq, U_LOG, U_FS, _grid(), 12, flt=flt, space=two_letter_base.space)
    assert d < 1e-2


def test_rigidity_distinguishes_sequences(box_fam, two_letter_base):
    flt = compute_radius(box_fam, two_letter_base.space)
    grid = _grid(64)
    a = np.full(20, 0.1, dtype=complex)
    b = np.full(20, -0.1, dtype=complex)
    fa = pullback_convergence(box_fam, FrozenSequence(a, cycle=True), U_FS, grid, 10, 1e-6, flt, space=two_letter_base.space)
    # limits along different fibers differ: compare the two depth-10 fields
    from henonskew.green import green_field_seq

    ga = green_field_seq(box_fam, FrozenSequence(a, cycle=True), grid, 1e-6, 200, flt, space=two_letter_base.space)
    gb = green_field_seq(box_fam, FrozenSequence(b, cycle=True), grid, 1e-6, 200, flt, space=two_letter_base.space)
    gap = np.abs(ga.values - gb.values).max()
    assert gap > 1e-2  # far above the pullback tolerance at depth 10
    assert fa.errors[-1] < gap / 10


def test_cutoff_probe_no_cutoff(quad_fam, single_base, quad_flt):
    rep = cutoff_limit_probe(
        quad_fam, single_base, 0.0, U_FS, CutoffSpec(None), _grid(96, half=quad_flt.R + 1), n_max=8, flt=quad_flt
    )
    assert rep.c_fit[-1] == pytest.approx(1.0, abs=0.05)
    assert rep.residuals[-1] < rep.residuals[0]
    assert rep.residuals[-1] < 0.05


def test_cutoff_probe_contraction_base():
    fam = quadratic_family(a=0.3, c="0.05*u")
    base = BaseSystem(BaseSpace("box", bounds=((-1.0, 1.0),)), BaseDynamics("contraction", c=0.5))
    flt = compute_radius(fam, base.space)
    rep = cutoff_limit_probe(
        fam, base, 0.8, U_FS, CutoffSpec(radius=2.0), _grid(96, half=flt.R + 1), n_max=9, flt=flt
    )
    # residual decreases until the cutoff fluctuation floor; c stays positive
    assert all(rep.residuals[i + 1] < rep.residuals[i] for i in range(4))
    assert rep.residuals[4] < 0.5 * rep.residuals[0]
    assert all(c > 0 for c in rep.c_fit)


def test_cutoff_probe_rejects_rotation(quad_fam, quad_flt):
    base = BaseSystem(BaseSpace("circle"), BaseDynamics("rotation", alpha=0.25))
    with pytest.raises(UnsupportedBase):
        cutoff_limit_probe(quad_fam, base, 0.0, U_FS, CutoffSpec(None), _grid(32), flt=quad_flt)


def test_rate_dominance(box_fam, two_letter_base):
    # e_n <= 1.5 * fitted_A * n * d^-n across the fitted window
    flt = compute_radius(box_fam, two_letter_base.space)
    seq = ParamSequence(two_letter_base.space, 99)
    rep = pullback_convergence(box_fam, seq, U_FS, _grid(128), n_max=12, tol=1e-6, flt=flt, space=two_letter_base.space)
    window = ConvergenceReport(rep.depths[3:], rep.errors[3:], 2, rep.masked_fraction)
    for n, e in zip(window.depths, window.errors):
        assert e <= 1.5 * window.fit_a * n * 2.0 ** -n
