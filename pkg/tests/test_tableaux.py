import numpy as np
import pytest

from torusflow import (DegenerateParameter, Tableau, UnknownTableau,
                       difference_matrices, ierk23, ierk35, ierk47, imex_euler,
                       in_pd_range, make_tableau, stability_report, validate)


def test_imex_euler_entries():
    t = imex_euler()
    assert t.s == 2
    assert np.allclose(t.c, [0.0, 1.0])
    assert t.A[1, 1] == 1.0
    assert t.A_hat[1, 0] == 1.0
    assert np.array_equal(t.b, t.A[-1])
    d = difference_matrices(t)
    assert d.DI.shape == (1, 1) and d.DI[0, 0] == 1.0 and d.DE[0, 0] == 1.0
    rep = stability_report(t)
    assert rep.lambda_I == 1.0 and rep.positive_definite


def test_ierk23_entries():
    t = ierk23(0.35)
    assert abs(t.A[2, 1] - 1.0 / 1.3) < 1e-15
    assert abs(t.A[2, 2] - 0.3 / 1.3) < 1e-15
    assert abs(t.A_hat[2, 1] - 1.0 / 0.7) < 1e-15
    assert abs(t.A_hat[2, 0] - (1.0 - 1.0 / 0.7)) < 1e-15


def test_ierk23_degenerate_diagonal():
    t = ierk23(0.5)
    assert t.A[2, 2] == 0.0  # last diagonal vanishes at c2 = 1/2


def test_ierk35_entries():
    t = ierk35(1.2)
    assert abs(t.A[4, 1] - (-76.4 / 147.0)) < 1e-15
    assert np.allclose(t.c, [0.0, 1.0, 0.5, 0.9, 1.0])
    assert np.abs(t.A.sum(axis=1) - t.c).max() < 1e-15
    assert np.abs(t.A_hat.sum(axis=1) - t.c).max() < 1e-15


def test_ierk47_entries():
    t = ierk47(0.0)
    assert abs(t.A_hat[3, 0] - 1557.0 / 4000.0) < 1e-16
    assert abs(t.A_hat[3, 1] - 243.0 / 4000.0) < 1e-16
    # row 4 of the explicit tableau sums to 9/20 for every parameter
    for x in (-5.0, 0.0, 2.0, 7.5):
        t = ierk47(x)
        assert abs(t.A_hat[3].sum() - 0.45) < 1e-13


def test_degenerate_parameters_raise():
    with pytest.raises(DegenerateParameter):
        ierk23(0.0)
    with pytest.raises(DegenerateParameter):
        ierk23(1.0)
    with pytest.raises(DegenerateParameter):
        ierk35(-47.0 / 132.0)


def test_validate_empty_across_families():
    params = {
        "ierk23": np.linspace(0.12, 0.43, 50),
        "ierk35": np.linspace(0.63, 2.1, 50),
        "ierk47": np.linspace(-10, 10, 50),
    }
    for name, grid in params.items():
        for p in grid:
            assert validate(make_tableau(name, p)) == []
    assert validate(imex_euler()) == []


def test_validate_catches_canopy_violation():
    t = ierk35(1.2)
    A_hat = t.A_hat.copy()
    A_hat[2, 1] += 1e-6
    bad = Tableau(t.s, t.c.copy(), t.A.copy(), A_hat, t.name, t.order, t.param)
    msgs = validate(bad)
    assert any("canopy" in m for m in msgs)


def test_difference_matrices_ierk23():
    c2 = 0.35
    d = difference_matrices(ierk23(c2))
    expect = np.array([
        [c2, 0.0],
        [(2 * c2**2 - 2 * c2 + 1) / (2 - 2 * c2), (1 - 2 * c2) / (2 - 2 * c2)],
    ])
    assert np.abs(d.DI - expect).max() < 1e-15


def test_difference_matrix_reconstruction():
    for t in (imex_euler(), ierk23(0.2), ierk35(1.2), ierk47(2.0)):
        d = difference_matrices(t)
        E = np.tril(np.ones((t.s - 1, t.s - 1)))
        assert np.abs(E @ d.DI - t.A[1:, 1:]).max() < 1e-15
        assert np.abs(E @ d.DE - t.A_hat[1:, :-1]).max() < 1e-15


@pytest.mark.parametrize("param,expect", [(0.3, True), (0.05, False), (0.2, True),
                                          (0.434174 + 1e-3, False), (1.2, True),
                                          (4.3, False)])
def test_pd_verdict_ierk23(param, expect):
    assert stability_report(ierk23(param)).positive_definite is expect


@pytest.mark.parametrize("param,expect", [(1.2, True), (0.5, False), (0.7, True),
                                          (2.2, False)])
def test_pd_verdict_ierk35(param, expect):
    assert stability_report(ierk35(param)).positive_definite is expect


def test_pd_verdict_ierk47_everywhere():
    for x in (-5.0, 0.0, 5.0):
        assert stability_report(ierk47(x)).positive_definite


def test_lambda_sign_flips_at_boundaries():
    for lo, hi in ((0.116337, 0.434174), (1.15161, 4.29788)):
        for b in (lo, hi):
            lam_m = stability_report(ierk23(b - 1e-3)).lambda_I
            lam_p = stability_report(ierk23(b + 1e-3)).lambda_I
            assert lam_m * lam_p < 0
    for b in (0.626214, 2.10996):
        lam_m = stability_report(ierk35(b - 1e-3)).lambda_I
        lam_p = stability_report(ierk35(b + 1e-3)).lambda_I
        assert lam_m * lam_p < 0


def test_sigmas_finite_on_admissible_grid():
    for p in np.linspace(0.13, 0.43, 60):
        rep = stability_report(ierk23(p))
        assert np.isfinite(rep.sigma_I) and np.isfinite(rep.sigma_E)
        assert rep.sigma_I >= rep.lambda_I
    for p in np.linspace(0.63, 2.1, 60):
        rep = stability_report(ierk35(p))
        assert np.isfinite(rep.sigma_I) and np.isfinite(rep.sigma_E)


def test_make_tableau_registry():
    assert make_tableau("ierk47", 2.0).param == 2.0
    assert make_tableau("imex_euler").s == 2
    assert make_tableau("ierk23").param == 0.35  # representative default
    with pytest.raises(UnknownTableau):
        make_tableau("rk4")


def test_in_pd_range():
    assert in_pd_range("ierk23", 0.2)
    assert not in_pd_range("ierk23", 0.05)
    assert in_pd_range("ierk47", -123.0)
    assert in_pd_range("imex_euler", None)
