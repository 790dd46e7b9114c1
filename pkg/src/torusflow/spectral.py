"""Fourier pseudo-spectral operators on the doubly periodic square.

Fields live on an M x M uniform grid over (0, L)^2 and carry two
representations: nodal values and pseudo-spectral (trigonometric
interpolation) coefficients.  Coefficients are stored in interpolation
units, i.e. value = sum_k  c_k * exp(i*kappa*(l*x + m*y)), which makes
Parseval read  h^2 * sum |v|^2 = L^2 * sum |c|^2.

All derivatives are taken spectrally; products are formed pointwise in
physical space (no dealiasing).  First derivatives zero the Nyquist
column so that real fields map to real fields; second derivatives keep
the full multiplier.
"""

from __future__ import annotations

import numpy as np

try:  # scipy's pocketfft has noticeably lower per-call overhead on small grids
    from scipy.fft import fft2 as _fft2, ifft2 as _ifft2
except ImportError:  # pragma: no cover - numpy fallback
    from numpy.fft import fft2 as _fft2, ifft2 as _ifft2


class NonZeroMean(ValueError):
    """Right-hand side of the Poisson solve carries a mean component."""


class GridSpec:
    """Uniform periodic grid with precomputed wavenumber multipliers."""

    def __init__(self, M: int, L: float = 2.0 * np.pi):
        if M % 2 != 0 or M < 4:
            raise ValueError(f"M must be even and >= 4, got {M}")
        self.M = int(M)
        self.L = float(L)
        self.h = self.L / self.M
        self.kappa = 2.0 * np.pi / self.L

        x = np.arange(self.M) * self.h
        self.X, self.Y = np.meshgrid(x, x, indexing="ij")

        # integer wavenumber indices in FFT order: 0..M/2-1, -M/2..-1
        k = np.fft.fftfreq(self.M, d=1.0 / self.M)
        lx = k[:, None]
        my = k[None, :]

        # first-derivative multipliers, Nyquist row/column zeroed
        k1 = k.copy()
        k1[self.M // 2] = 0.0
        self.ikx = 1j * self.kappa * k1[:, None] * np.ones((1, self.M))
        self.iky = 1j * self.kappa * np.ones((self.M, 1)) * k1[None, :]

        # Laplacian keeps full Nyquist multiplier
        self.lap = -(self.kappa**2) * (lx**2 + my**2)
        inv = np.zeros_like(self.lap)
        nz = self.lap != 0.0
        inv[nz] = -1.0 / self.lap[nz]
        self.poisson_inv = inv  # psi_hat = poisson_inv * omega_hat

        for a in (self.X, self.Y, self.ikx, self.iky, self.lap, self.poisson_inv):
            a.flags.writeable = False

    def __eq__(self, other):
        return isinstance(other, GridSpec) and self.M == other.M and self.L == other.L

    def __hash__(self):
        return hash((self.M, self.L))

    def __repr__(self):
        return f"GridSpec(M={self.M}, L={self.L})"

    def to_coeffs(self, values: np.ndarray) -> np.ndarray:
        """Nodal values -> interpolation coefficients."""
        return _fft2(values) / (self.M * self.M)

    def to_values(self, coeffs: np.ndarray) -> np.ndarray:
        """Interpolation coefficients -> real nodal values."""
        return np.real(_ifft2(coeffs)) * (self.M * self.M)

    def spectral_norm_l2(self, coeffs: np.ndarray) -> float:
        """Discrete L2 norm evaluated from coefficients (Parseval)."""
        return self.L * float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))


class Field:
    """Scalar grid function with lazily synchronized dual representation.

    Instances are value-immutable: operations return fresh fields, and the
    backing arrays are marked read-only.  Requesting a missing
    representation fills an internal cache; that is the only mutation.
    """

    __slots__ = ("grid", "mean_zero", "_values", "_coeffs")

    def __init__(self, grid: GridSpec, values=None, coeffs=None, mean_zero: bool = False):
        if values is None and coeffs is None:
            raise ValueError("Field needs at least one representation")
        self.grid = grid
        self.mean_zero = bool(mean_zero)
        shape = (grid.M, grid.M)
        if values is not None:
            values = np.asarray(values, dtype=np.float64)
            if values.shape != shape:
                raise ValueError(f"expected {shape} values, got {values.shape}")
            values = values.copy()
            values.flags.writeable = False
        if coeffs is not None:
            coeffs = np.asarray(coeffs, dtype=np.complex128)
            if coeffs.shape != shape:
                raise ValueError(f"expected {shape} coefficients, got {coeffs.shape}")
            coeffs = coeffs.copy()
            coeffs.flags.writeable = False
        self._values = values
        self._coeffs = coeffs

    @classmethod
    def from_values(cls, grid, values, mean_zero=False):
        return cls(grid, values=values, mean_zero=mean_zero)

    @classmethod
    def from_coeffs(cls, grid, coeffs, mean_zero=False):
        return cls(grid, coeffs=coeffs, mean_zero=mean_zero)

    @classmethod
    def from_function(cls, grid, fn, mean_zero=False):
        """Sample fn(X, Y) on the grid nodes."""
        return cls(grid, values=fn(grid.X, grid.Y), mean_zero=mean_zero)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = self.grid.to_values(self._coeffs)
            v.flags.writeable = False
            self._values = v
        return self._values

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            c = self.grid.to_coeffs(self._values)
            c.flags.writeable = False
            self._coeffs = c
        return self._coeffs

    def __repr__(self):
        return f"Field(grid={self.grid!r}, mean_zero={self.mean_zero})"


class VectorField:
    """Velocity pair (u, v) on a shared grid."""

    __slots__ = ("u", "v")

    def __init__(self, u: Field, v: Field):
        if u.grid != v.grid:
            raise ValueError("vector components must share one grid")
        self.u = u
        self.v = v

    @property
    def grid(self):
        return self.u.grid


def to_spectral(f: Field) -> Field:
    """Materialize the spectral representation; idempotent."""
    f.coeffs
    return f


def to_physical(f: Field) -> Field:
    """Materialize the physical representation; idempotent."""
    f.values
    return f


def deriv_x(f: Field) -> Field:
    return Field.from_coeffs(f.grid, f.grid.ikx * f.coeffs, mean_zero=True)


def deriv_y(f: Field) -> Field:
    return Field.from_coeffs(f.grid, f.grid.iky * f.coeffs, mean_zero=True)


def laplacian(f: Field) -> Field:
    return Field.from_coeffs(f.grid, f.grid.lap * f.coeffs, mean_zero=True)


def solve_poisson(omega: Field, tol: float = 1e-10) -> Field:
    """Return the zero-mean stream function psi with -lap(psi) = omega."""
    g = omega.grid
    c = omega.coeffs
    norm = g.spectral_norm_l2(c)
    if abs(c[0, 0]) > tol * max(norm, 1e-300):
        raise NonZeroMean(
            f"poisson right-hand side has mean mode {abs(c[0,0]):.3e} "
            f"(> {tol:g} * ||omega|| = {tol*norm:.3e})"
        )
    psi = g.poisson_inv * c
    return Field.from_coeffs(g, psi, mean_zero=True)


def velocity(psi: Field) -> VectorField:
    """u = d(psi)/dy, v = -d(psi)/dx; discretely divergence-free."""
    return VectorField(deriv_y(psi), Field.from_coeffs(psi.grid, -psi.grid.ikx * psi.coeffs, mean_zero=True))


def _reflected_conj(F: np.ndarray) -> np.ndarray:
    """conj(F(-k)) on the FFT index grid; equals the transform of the
    complex-conjugate signal."""
    return np.conj(np.roll(F[::-1, ::-1], 1, axis=(0, 1)))


def _pair_to_values(grid: GridSpec, c1, c2):
    """Inverse-transform two real fields in one complex FFT."""
    z = _ifft2(c1 + 1j * c2) * (grid.M * grid.M)
    return z.real.copy(), z.imag.copy()


def _convection_coeffs(grid: GridSpec, u, v, w_hat, form: str) -> np.ndarray:
    """Spectral coefficients of the convection term from physical (u, v).

    Skew form: 0.5*u.grad(w) + 0.5*div(u*w); advective form: u.grad(w).
    Products are pointwise, derivatives spectral, mean mode projected out.
    The two flux transforms share one complex FFT (real/imaginary packing).
    """
    w = grid.to_values(w_hat)
    wx, wy = _pair_to_values(grid, grid.ikx * w_hat, grid.iky * w_hat)
    adv = grid.to_coeffs(u * wx + v * wy)
    if form == "advective":
        out = adv
    elif form == "skew":
        P = _fft2(u * w + 1j * (v * w)) / (grid.M * grid.M)
        Q = _reflected_conj(P)
        flux_u = 0.5 * (P + Q)          # transform of u*w
        flux_v = -0.5j * (P - Q)        # transform of v*w
        out = 0.5 * adv + 0.5 * (grid.ikx * flux_u + grid.iky * flux_v)
    else:
        raise ValueError(f"unknown convection form {form!r}")
    out[0, 0] = 0.0
    return out


def convection(vel: VectorField, omega: Field, form: str = "skew") -> Field:
    """Discrete convection c_h(u, omega); skew form is L2-orthogonal to omega."""
    if vel.grid != omega.grid:
        raise ValueError("velocity and vorticity must share one grid")
    g = omega.grid
    out = _convection_coeffs(g, vel.u.values, vel.v.values, omega.coeffs, form)
    return Field.from_coeffs(g, out, mean_zero=True)


def inner(f: Field, g: Field) -> float:
    """Discrete L2 inner product h^2 * sum(f * g)."""
    if f.grid != g.grid:
        raise ValueError("fields must share one grid")
    return float(f.grid.h**2 * np.sum(f.values * g.values))


def l2_norm(f: Field) -> float:
    return float(np.sqrt(f.grid.h**2 * np.sum(f.values**2)))


def h1_seminorm(f: Field) -> float:
    return float(np.sqrt(l2_norm(deriv_x(f)) ** 2 + l2_norm(deriv_y(f)) ** 2))


def enstrophy(omega: Field) -> float:
    """Reported as ||omega||^2 (twice the classical enstrophy)."""
    return l2_norm(omega) ** 2


def random_mean_free(grid: GridSpec, rng: np.random.Generator, band: int | None = None,
                     amplitude: float = 1.0) -> Field:
    """Seeded random real field with zero mean, optionally band-limited.

    With band=b, only modes |l|,|m| <= b are populated (smooth data for
    decay experiments); otherwise white nodal noise minus its mean.
    """
    if band is None:
        v = rng.standard_normal((grid.M, grid.M))
        v -= v.mean()
        v *= amplitude / max(np.abs(v).max(), 1e-300)
        return Field.from_values(grid, v, mean_zero=True)
    if band >= grid.M // 2:
        raise ValueError("band must be below the Nyquist index")
    c = np.zeros((grid.M, grid.M), dtype=np.complex128)
    idx = list(range(-band, band + 1))
    for l in idx:
        for m in idx:
            if l == 0 and m == 0:
                continue
            c[l, m] = rng.standard_normal() + 1j * rng.standard_normal()
    # enforce conjugate symmetry so the field is real
    sym = np.zeros_like(c)
    for l in idx:
        for m in idx:
            sym[l, m] = 0.5 * (c[l, m] + np.conj(c[-l, -m]))
    f = Field.from_coeffs(grid, sym, mean_zero=True)
    v = f.values
    v = v * (amplitude / max(np.abs(v).max(), 1e-300))
    return Field.from_values(grid, v, mean_zero=True)
