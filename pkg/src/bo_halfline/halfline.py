"""Half-line and whole-line function spaces: grids, transforms, norms.

The half line carries a quadratically graded grid (dense near the boundary),
Laplace transforms assembled from exact piecewise-linear panel weights, and
the weighted norms used by the decay estimates.  The whole line carries an
FFT grid for the convolution/multiplier operators (Hilbert transform, the
free evolution group) and the Sobolev norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import wofz

# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class HalfLineGrid:
    """Nodes x_j = x_max (j/J)^2, j = 0..J: quadratic grading toward x = 0."""

    x_max: float = 40.0
    n: int = 256

    @cached_property
    def nodes(self) -> np.ndarray:
        j = np.arange(self.n + 1, dtype=float)
        return self.x_max * (j / self.n) ** 2

    @cached_property
    def quad_weights(self) -> np.ndarray:
        x = self.nodes
        w = np.zeros_like(x)
        dx = np.diff(x)
        w[:-1] += 0.5 * dx
        w[1:] += 0.5 * dx
        return w

    def integrate(self, values: np.ndarray) -> complex:
        return np.sum(values * self.quad_weights, axis=-1)

    def l2_norm(self, values: np.ndarray, weight: np.ndarray | None = None) -> float:
        density = np.abs(values) ** 2
        if weight is not None:
            density = density * weight
        return float(np.sqrt(np.real(self.integrate(density))))

    def weighted_norm(self, values: np.ndarray, r: float) -> float:
        """L^{2,r} norm with the Japanese bracket weight <x>^{2r}."""
        return self.l2_norm(values, (1.0 + self.nodes**2) ** r)


@dataclass(frozen=True)
class WholeLineGrid:
    """Uniform periodic FFT grid on [x0, x0 + n dx)."""

    n: int = 1 << 16
    dx: float = 0.0625
    x0: float = -256.0

    @cached_property
    def nodes(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @cached_property
    def xi(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def apply_multiplier(self, values: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
        return np.fft.ifft(multiplier * np.fft.fft(values))

    def index_of(self, x: float) -> int:
        return int(round((x - self.x0) / self.dx))

    def l2_norm(self, values: np.ndarray, weight: np.ndarray | None = None) -> float:
        density = np.abs(values) ** 2
        if weight is not None:
            density = density * weight
        return float(np.sqrt(self.dx * np.sum(density)))

    def weighted_norm(self, values: np.ndarray, r: float) -> float:
        return self.l2_norm(values, (1.0 + self.nodes**2) ** r)

    def sobolev_norm(self, values: np.ndarray, s: float) -> float:
        spec = np.fft.fft(values)
        mult = (1.0 + self.xi**2) ** (s / 2.0)
        return float(np.sqrt(self.dx / self.n) * np.linalg.norm(mult * spec))

    def z_norm(self, values: np.ndarray, s: float, r: float) -> float:
        """Z^{s,r} = H^s cap L^{2,r} norm (sum of the two pieces)."""
        return self.sobolev_norm(values, s) + self.weighted_norm(values, r)


@dataclass
class GridFunction:
    """Values on a half-line grid plus an extrapolated boundary value.

    The grid starts at x = 0, so values[0] is the trace; boundary_value_hint
    records the intended trace separately (useful when the stored samples come
    from an operator that is only evaluated for x > 0)."""

    grid: HalfLineGrid
    values: np.ndarray
    boundary_value_hint: float | None = None

    @property
    def trace(self) -> float:
        if self.boundary_value_hint is not None:
            return self.boundary_value_hint
        return float(np.real(self.values[0]))

    def l2_norm(self) -> float:
        return self.grid.l2_norm(self.values)


# ---------------------------------------------------------------------------
# truncated weight


@dataclass(frozen=True)
class TruncatedWeight:
    """Bounded substitute for <x>: equals sqrt(1+x^2) below N, the constant 2N
    above 3N, with a C^2 quintic blend in between.  Its slope stays <= 1, so
    commutators with the Hilbert transform remain uniformly bounded in N."""

    cutoff: float = 8.0

    def __call__(self, x) -> np.ndarray:
        x = np.abs(np.asarray(x, dtype=float))
        n = self.cutoff
        out = np.where(x <= n, np.hypot(1.0, x), 2.0 * n)
        mid = (x > n) & (x < 3.0 * n)
        if np.any(mid):
            out = np.array(out, dtype=float)
            out[mid] = self._blend(x[mid])
        return out

    def _blend(self, x: np.ndarray) -> np.ndarray:
        n = self.cutoff
        v0 = math.hypot(1.0, n)
        d0 = n / v0
        c0 = 1.0 / v0**3
        h = 2.0 * n
        t = (x - n) / h
        # quintic Hermite basis: value/slope/curvature at t=0, value 2N flat at t=1
        h00 = 1 - 10 * t**3 + 15 * t**4 - 6 * t**5
        h10 = t - 6 * t**3 + 8 * t**4 - 3 * t**5
        h20 = 0.5 * t**2 - 1.5 * t**3 + 1.5 * t**4 - 0.5 * t**5
        h01 = 10 * t**3 - 15 * t**4 + 6 * t**5
        return v0 * h00 + d0 * h * h10 + c0 * h * h * h20 + 2.0 * n * h01


def ap_characteristic(weight, n_cutoff: float, exponent: float = 2.0) -> float:
    """A_p characteristic of weight^exponent over dyadic intervals up to 16N.

    Returns sup_I avg_I(w^p) ^ {1/ (p-1)}-normalized pair product for p = 2:
    avg(w^2) * avg(w^-2)."""
    best = 0.0
    scale = 0.25
    while scale <= 16.0 * n_cutoff:
        left = -16.0 * n_cutoff
        while left < 16.0 * n_cutoff:
            x = np.linspace(left, left + scale, 65)
            wv = np.asarray(weight(x), dtype=float) ** exponent
            best = max(best, float(np.mean(wv) * np.mean(1.0 / wv)))
            left += scale
        scale *= 2.0
    return best


def convolution_decay(a: float, b: float, x_fit=(50.0, 800.0)) -> tuple[float, float]:
    """Measured vs predicted tail exponent of <x>^-a * <x>^-b.

    The product's tail is <x>^-delta with delta = min(a, b, a+b-1); returns
    (predicted, fitted) where fitted is a log-log slope over x in x_fit."""
    if a + b <= 1.0:
        raise ValueError("convolution_decay requires a + b > 1 (integrability)")
    grid = WholeLineGrid(n=1 << 17, dx=0.125, x0=-8192.0)
    x = grid.nodes
    fa = (1.0 + x * x) ** (-a / 2.0)
    fb = (1.0 + x * x) ** (-b / 2.0)
    conv = np.fft.ifft(np.fft.fft(np.fft.ifftshift(fa)) * np.fft.fft(np.fft.ifftshift(fb))).real
    conv = np.fft.fftshift(conv) * grid.dx
    lo, hi = (grid.index_of(x_fit[0]), grid.index_of(x_fit[1]))
    xs = x[lo:hi]
    ys = conv[lo:hi]
    slope = np.polyfit(np.log(xs), np.log(np.abs(ys)), 1)[0]
    return min(a, b, a + b - 1.0), float(-slope)


# ---------------------------------------------------------------------------
# Laplace transforms


def _filon_laplace_ab(beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact piecewise-linear panel weights for int_0^1 (1-t, t) e^{-beta t} dt."""
    beta = np.asarray(beta, dtype=complex)
    small = np.abs(beta) < 1.0e-4
    bs = np.where(small, 1.0, beta)  # avoid 0/0 in the exact branch
    with np.errstate(over="ignore", invalid="ignore"):
        eb = np.exp(-bs)
        a_exact = (bs - 1.0 + eb) / bs**2
        b_exact = (1.0 - (1.0 + bs) * eb) / bs**2
    a_series = 0.5 - beta / 6.0 + beta**2 / 24.0
    b_series = 0.5 - beta / 3.0 + beta**2 / 8.0
    return (np.where(small, a_series, a_exact),
            np.where(small, b_series, b_exact))


def laplace_matrix(z_values: np.ndarray, x_nodes: np.ndarray) -> np.ndarray:
    """Weights W with (W @ f) = int e^{-z x} f(x) dx for piecewise-linear f.

    Exact per panel for any complex z with Re z >= 0 (raises otherwise: the
    exponential factors overflow and the transform is not used there)."""
    z = np.atleast_1d(np.asarray(z_values, dtype=complex))
    if np.any(z.real < -1.0e-12 * (1.0 + np.abs(z))):
        raise ValueError("laplace_matrix requires Re z >= 0")
    x = np.asarray(x_nodes, dtype=float)
    h = np.diff(x)                                    # (nx-1,)
    beta = z[:, None] * h[None, :]                    # (nz, nx-1)
    wa, wb = _filon_laplace_ab(beta)
    front = h[None, :] * np.exp(-z[:, None] * x[None, :-1])
    out = np.zeros((z.size, x.size), dtype=complex)
    out[:, :-1] += front * wa
    out[:, 1:] += front * wb
    return out


def laplace_boundary(values: np.ndarray, z_values, x_nodes: np.ndarray):
    """Laplace transform of grid samples (piecewise-linear reconstruction)."""
    mat = laplace_matrix(np.atleast_1d(z_values), x_nodes)
    out = mat @ np.asarray(values, dtype=complex)
    return out if np.ndim(z_values) else complex(out[0])


# ---------------------------------------------------------------------------
# reference profiles with closed-form transforms


class Profile:
    """A named profile: samples plus its exact Laplace transform."""

    name: str

    def __call__(self, x):
        raise NotImplementedError

    def deriv(self, x):
        raise NotImplementedError

    def hat(self, z):
        raise NotImplementedError


class GaussBump(Profile):
    """psi(x) = amplitude * x exp(-x^2); hat via the scaled complementary
    error function (Faddeeva w), stable for Re z >= 0."""

    def __init__(self, amplitude: float = 1.0):
        self.amplitude = amplitude
        self.name = "gauss_bump"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * x * np.exp(-x * x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * (1.0 - 2.0 * x * x) * np.exp(-x * x)

    def hat(self, z):
        z = np.asarray(z, dtype=complex)
        return self.amplitude * (0.5 - 0.25 * math.sqrt(math.pi) * z * wofz(0.5j * z))


class PolyExp(Profile):
    """psi(x) = amplitude * x^2 exp(-x); hat(z) = 2 amplitude/(1+z)^3."""

    def __init__(self, amplitude: float = 1.0):
        self.amplitude = amplitude
        self.name = "poly_exp"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * x * x * np.exp(-x)

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * (2.0 * x - x * x) * np.exp(-x)

    def hat(self, z):
        z = np.asarray(z, dtype=complex)
        return 2.0 * self.amplitude / (1.0 + z) ** 3


class RampExp(Profile):
    """h(t) = amplitude * t exp(-t); hat(z) = amplitude/(1+z)^2."""

    def __init__(self, amplitude: float = 1.0):
        self.amplitude = amplitude
        self.name = "ramp_exp"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * t * np.exp(-t)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        return self.amplitude * (1.0 - t) * np.exp(-t)

    def hat(self, z):
        z = np.asarray(z, dtype=complex)
        return self.amplitude / (1.0 + z) ** 2


PROFILES = {"gauss_bump": GaussBump, "poly_exp": PolyExp, "ramp_exp": RampExp}


def make_profile(name: str, amplitude: float = 1.0) -> Profile:
    try:
        return PROFILES[name](amplitude)
    except KeyError:
        raise ValueError(f"unknown profile {name!r}") from None


# ---------------------------------------------------------------------------
# Hilbert transforms


def hilbert_whole_line(grid: WholeLineGrid, values: np.ndarray) -> np.ndarray:
    """PV int f(y)/(x-y) dy on the FFT grid: multiplier -i pi sgn(xi)."""
    mult = -1j * np.pi * np.sign(grid.xi)
    out = grid.apply_multiplier(values, mult)
    return out.real if np.isrealobj(values) else out


def hilbert_half_line(grid: WholeLineGrid, values: np.ndarray) -> np.ndarray:
    """PV int_0^infty psi(y)/(y-x) dy via the whole-line transform of the
    zero extension (the samples are assumed supported in x >= 0)."""
    return -hilbert_whole_line(grid, values)


def hilbert_half_line_direct(x: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Direct PV quadrature oracle on a uniform grid (diagonal excluded;
    midpoint rule pairs symmetric neighbours so the principal value is the
    plain sum with the singular node dropped)."""
    x = np.asarray(x, dtype=float)
    dx = x[1] - x[0]
    diff = x[None, :] - x[:, None]          # y - x
    with np.errstate(divide="ignore"):
        kernel = 1.0 / diff
    np.fill_diagonal(kernel, 0.0)
    return kernel @ values * dx


def dispersion_hilbert(grid: WholeLineGrid, values: np.ndarray) -> np.ndarray:
    """The equation's nonlocal operator: -(1/pi) * hilbert_half_line, i.e. the
    zero-extension restriction of the Fourier multiplier -i sgn(xi)."""
    return -hilbert_half_line(grid, values) / np.pi
