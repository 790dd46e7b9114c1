import numpy as np
import pytest

from torusflow import (Field, GridSpec, NonZeroMean, convection, deriv_x,
                       deriv_y, enstrophy, h1_seminorm, inner, l2_norm,
                       laplacian, random_mean_free, solve_poisson, to_physical,
                       to_spectral, velocity)


@pytest.fixture(scope="module")
def grid():
    return GridSpec(32)


def random_field(grid, seed, mean_free=True):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((grid.M, grid.M))
    if mean_free:
        v -= v.mean()
    return Field.from_values(grid, v, mean_zero=mean_free)


def test_gridspec_rejects_bad_m():
    with pytest.raises(ValueError):
        GridSpec(7)
    with pytest.raises(ValueError):
        GridSpec(2)


def test_constant_field_is_pure_dc(grid):
    f = Field.from_values(grid, np.full((32, 32), 3.25))
    c = f.coeffs
    assert abs(c[0, 0] - 3.25) < 1e-14 * 3.25
    c = c.copy()
    c[0, 0] = 0
    assert np.abs(c).max() <= 1e-14 * 3.25


def test_single_mode_sin_x():
    g = GridSpec(8)
    f = Field.from_function(g, lambda X, Y: np.sin(X))
    c = f.coeffs.copy()
    # sin(x) = (e^{ix} - e^{-ix}) / 2i: conjugate pair at (l, m) = (+-1, 0)
    assert abs(c[1, 0] - (-0.5j)) < 1e-14
    assert abs(c[-1, 0] - 0.5j) < 1e-14
    c[1, 0] = c[-1, 0] = 0
    assert np.abs(c).max() < 1e-14


def test_round_trip_against_direct_dft():
    g = GridSpec(8)
    rng = np.random.default_rng(42)
    v = rng.standard_normal((8, 8))
    f = Field.from_values(g, v)
    # direct O(M^4) DFT oracle for the interpolation coefficients
    c_direct = np.zeros((8, 8), dtype=complex)
    for l in range(8):
        for m in range(8):
            acc = 0.0
            for i in range(8):
                for j in range(8):
                    acc += v[i, j] * np.exp(-1j * (l * g.X[i, j] + m * g.Y[i, j]))
            c_direct[l, m] = acc / 64
    assert np.abs(f.coeffs - c_direct).max() < 1e-12
    back = Field.from_coeffs(g, f.coeffs)
    assert np.abs(back.values - v).max() <= 1e-12 * np.abs(v).max()


def test_conjugate_symmetry(grid):
    f = random_field(grid, 1)
    c = f.coeffs
    M = grid.M
    for l, m in ((3, 5), (1, 0), (7, 9), (15, 2)):
        assert abs(c[l, m] - np.conj(c[(-l) % M, (-m) % M])) < 1e-14


def test_to_spectral_idempotent(grid):
    f = random_field(grid, 2)
    f2 = to_spectral(f)
    f3 = to_physical(to_spectral(f2))
    assert f3.coeffs is f2.coeffs or np.array_equal(f3.coeffs, f2.coeffs)


def test_deriv_sin(grid):
    f = Field.from_function(grid, lambda X, Y: np.sin(X))
    d = deriv_x(f)
    assert np.abs(d.values - np.cos(grid.X)).max() < 1e-12


def test_deriv_constant_is_zero(grid):
    f = Field.from_values(grid, np.full((32, 32), 2.0))
    assert np.abs(deriv_x(f).values).max() < 1e-14
    assert np.abs(deriv_y(f).values).max() < 1e-14


def test_deriv_y_analytic(grid):
    f = Field.from_function(grid, lambda X, Y: np.sin(3 * X) * np.cos(2 * Y))
    d = deriv_y(f)
    exact = -2.0 * np.sin(3 * grid.X) * np.sin(2 * grid.Y)
    assert np.abs(d.values - exact).max() < 1e-12


def test_deriv_real_output_with_nyquist_energy(grid):
    # odd-ball data with Nyquist content still maps to a real derivative
    f = Field.from_function(grid, lambda X, Y: np.cos(16 * X))
    d = deriv_x(f)
    assert np.abs(d.values).max() < 1e-12  # Nyquist first derivative zeroed


def test_laplacian_eigenfunction(grid):
    f = Field.from_function(grid, lambda X, Y: np.sin(X) * np.sin(Y))
    lap = laplacian(f)
    assert np.abs(lap.values + 2.0 * f.values).max() < 1e-12


def test_laplacian_constant_zero(grid):
    f = Field.from_values(grid, np.full((32, 32), 5.0))
    assert np.abs(laplacian(f).values).max() < 1e-13


def test_poisson_single_modes(grid):
    w = Field.from_function(grid, lambda X, Y: np.sin(X) * np.sin(Y))
    psi = solve_poisson(w)
    assert np.abs(psi.values - 0.5 * w.values).max() < 1e-13

    w3 = Field.from_function(grid, lambda X, Y: np.sin(3 * X))
    psi3 = solve_poisson(w3)
    assert np.abs(psi3.values - w3.values / 9.0).max() < 1e-13

    zero = Field.from_values(grid, np.zeros((32, 32)))
    assert np.abs(solve_poisson(zero).values).max() == 0.0


def test_poisson_rejects_mean(grid):
    w = Field.from_values(grid, np.ones((32, 32)))
    with pytest.raises(NonZeroMean):
        solve_poisson(w)


def test_poisson_laplacian_inverse(grid):
    for seed in range(3):
        f = random_field(grid, seed)
        back = solve_poisson(laplacian(f))
        assert np.abs(back.values + f.values).max() <= 1e-11 * np.abs(f.values).max()


def test_velocity_taylor_green(grid):
    psi = Field.from_function(grid, lambda X, Y: 0.5 * np.sin(X) * np.sin(Y))
    vel = velocity(psi)
    assert np.abs(vel.u.values - 0.5 * np.sin(grid.X) * np.cos(grid.Y)).max() < 1e-13
    assert np.abs(vel.v.values + 0.5 * np.cos(grid.X) * np.sin(grid.Y)).max() < 1e-13


def test_velocity_divergence_free(grid):
    for seed in range(5):
        psi = random_field(grid, 100 + seed)
        vel = velocity(psi)
        div = deriv_x(vel.u).values + deriv_y(vel.v).values
        assert np.abs(div).max() <= 1e-12 * max(1.0, np.abs(psi.values).max())


def test_convection_zero_velocity(grid):
    w = random_field(grid, 7)
    zero = Field.from_values(grid, np.zeros((32, 32)))
    from torusflow import VectorField

    c = convection(VectorField(zero, zero), w)
    assert np.abs(c.values).max() == 0.0


def test_convection_taylor_green_cancellation(grid):
    w = Field.from_function(grid, lambda X, Y: np.sin(X) * np.sin(Y))
    vel = velocity(solve_poisson(w))
    for form in ("skew", "advective"):
        c = convection(vel, w, form=form)
        assert np.abs(c.values).max() < 1e-12


def test_skew_orthogonality(grid):
    for seed in range(5):
        w = random_field(grid, 200 + seed)
        psi = random_field(grid, 300 + seed)
        vel = velocity(psi)
        c = convection(vel, w, form="skew")
        scale = l2_norm(c) * l2_norm(w)
        assert abs(inner(c, w)) <= 1e-12 * max(scale, 1e-30)


def test_norms_and_enstrophy(grid):
    w = Field.from_function(grid, lambda X, Y: np.sin(X) * np.sin(Y))
    assert abs(enstrophy(w) - np.pi**2) < 1e-12
    zero = Field.from_values(grid, np.zeros((32, 32)))
    assert l2_norm(zero) == 0.0
    for f_amp in (0.5, 2.0):
        w2 = Field.from_function(grid, lambda X, Y: f_amp * np.sin(X))
        assert abs(enstrophy(w2) - 2 * np.pi**2 * f_amp**2) < 1e-11


def test_h1_seminorm(grid):
    f = Field.from_function(grid, lambda X, Y: np.sin(X) * np.sin(Y))
    # |grad f|^2 integrates to 2 * pi^2
    assert abs(h1_seminorm(f) - np.sqrt(2 * np.pi**2)) < 1e-12


def test_parseval(grid):
    for seed in range(3):
        f = random_field(grid, 400 + seed, mean_free=False)
        phys = grid.h**2 * np.sum(f.values**2)
        spec = grid.L**2 * np.sum(np.abs(f.coeffs) ** 2)
        assert abs(phys - spec) <= 1e-12 * phys


def test_differentiation_exact_on_band_limited(grid):
    rng = np.random.default_rng(11)
    f = random_mean_free(grid, rng, band=10)
    # compare against mode-by-mode analytic derivative
    c = f.coeffs
    k = np.fft.fftfreq(grid.M, d=1.0 / grid.M)
    exact = np.zeros((grid.M, grid.M))
    for l in range(-10, 11):
        for m in range(-10, 11):
            exact += np.real(1j * l * c[l, m] * np.exp(1j * (l * grid.X + m * grid.Y)))
    assert np.abs(deriv_x(f).values - exact).max() < 1e-11


def test_fields_are_immutable(grid):
    f = random_field(grid, 12)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
    with pytest.raises(ValueError):
        f.coeffs[0, 0] = 1.0


def test_random_mean_free_band(grid):
    rng = np.random.default_rng(0)
    f = random_mean_free(grid, rng, band=5)
    c = f.coeffs
    assert abs(c[0, 0]) < 1e-13
    # no energy beyond the band
    mask = np.zeros((grid.M, grid.M), dtype=bool)
    for l in range(-5, 6):
        for m in range(-5, 6):
            mask[l, m] = True
    assert np.abs(c[~mask]).max() < 1e-14
    assert np.abs(np.imag(np.fft.ifft2(c))).max() < 1e-14
