"""Green operator of the linearized half-line flow.

The solution map splits as G = G1 + G2: G1 is the whole-line group acting on
the zero extension of the datum (an FFT multiplier), and G2 is the half-line
correction, a Laplace integral

    G2(t) psi(x) = -(1/pi) int_0^infty e^{-p x} K(p, t) dp,

whose kernel K is assembled from the transformed datum E-(p, s) by a damped
(rotated) Laplace inversion plus the residue bracket at s = +-i:

    K(p,t) = Im[e^{i p^2 t} E-(p, i)]
           + (1/pi) Im int_0^infty e^{s(r) p^2 t} E-(p, s(r)) / (1+s(r)^2)
                    e^{i theta0} dr,        s(r) = r e^{i theta0},

with theta0 = pi/2 + delta_s.  The equivalent principal-value form on the
imaginary axis (half residues at +-i) is kept as an independent oracle.

E- itself is evaluated through the scale-covariant split: all gamma_tilde
data comes from per-direction caches, the modulus |s| enters only through
m = p sqrt(|s|) and r = 1/sqrt(|s|), and the integrals I1/I2 are computed on
a fixed v-quadrature per direction.  Beyond the tabulated |s| range the
kernel uses the fitted asymptotic E- ~ lam1 p^{-1/2} s^{3/4} + lam0 s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc, wofz

from .contour import log_graded_nodes
from .halfline import Profile, WholeLineGrid, laplace_matrix
from .symbols import Symbols

TWO_PI_I = 2j * np.pi

_G2_BASE = -1.0 / np.pi
_G2_FACTORS = {"derived": 1.0, "alt_half": 0.5, "alt_full": 2.0}

# The corner model E- ~ lam1 p^{-1/2} s^{3/4} + lam0 s holds only before the
# rollover at m = p |s|^{1/2} = O(1); past it the true rows decay, and the
# damped weight 1/(1+s^2) makes their tail negligible.  Extrapolating the
# linear-in-s term past the rollover would instead inject a spurious
# p-independent constant ~ Im(lam0) log(r_top/r_max) into the kernel at t=0.
_TAIL_M_CUT = 0.3


def g2_sign(config) -> float:
    """Signed prefactor of the half-line correction for this configuration."""
    return _G2_BASE * _G2_FACTORS[config.g2_prefactor]


@dataclass(frozen=True)
class GreenGrids:
    """Quadrature layout for the kernel assembly."""

    p_min: float = 1.0e-6
    p_max: float = 2.0e4
    p_ppd: int = 32
    r_min: float = 1.0e-7
    r_max: float = 1.0e7
    r_ppd: int = 20
    v_min: float = 1.0e-5
    v_max: float = 1.0e8
    v_ppd: int = 20
    tail_r_max: float = 1.0e13
    tail_ppd: int = 4

    @cached_property
    def p_nodes(self) -> np.ndarray:
        count = int(math.ceil(math.log10(self.p_max / self.p_min) * self.p_ppd)) + 1
        return np.geomspace(self.p_min, self.p_max, count)

    @cached_property
    def ray(self) -> tuple[np.ndarray, np.ndarray]:
        return log_graded_nodes(self.r_min, self.r_max, self.r_ppd)

    @cached_property
    def tail_ray(self) -> tuple[np.ndarray, np.ndarray]:
        return log_graded_nodes(self.r_max, self.tail_r_max, self.tail_ppd)

    @cached_property
    def v_axis(self) -> tuple[np.ndarray, np.ndarray]:
        """Upward imaginary-axis nodes v = iV and weights i dV."""
        V, wV = log_graded_nodes(self.v_min, self.v_max, self.v_ppd)
        v = 1j * np.concatenate([-V[::-1], V])
        wv = 1j * np.concatenate([wV[::-1], wV])
        return v, wv


class _DirectionPieces:
    """gamma_tilde-derived v-kernels for one unit direction s_hat."""

    def __init__(self, symbols: Symbols, s_hat: complex, grids: GreenGrids):
        self.cache = symbols.direction(s_hat)
        v, wv = grids.v_axis
        self.v = v
        gam = self.cache.gamma_axis(v.imag)
        e0 = np.exp(-self.cache.gamma0)
        self.jump = np.exp(-gam) - e0
        self.e0 = e0
        self.base_kernel = self.jump / (v - self.cache.phi_hat) * wv / TWO_PI_I


class EMinusLattice:
    """E-(p, s) tabulated on the rotated ray (plus s = i) for one datum.

    psi_hat is the Laplace transform of the datum, callable on complex arrays
    with Re z >= 0.  The lattice is profile-specific but t-independent; all
    time dependence enters afterwards through e^{s p^2 t}.
    """

    def __init__(self, symbols: Symbols, psi_hat, grids: GreenGrids,
                 theta0: float):
        self.symbols = symbols
        self.psi_hat = psi_hat
        self.grids = grids
        self.theta0 = theta0
        p = grids.p_nodes
        r, wr = grids.ray
        self.p_nodes = p
        self.r_nodes = r
        self.r_weights = wr
        self.s_ray = r * np.exp(1j * theta0)

        ray_dir = _DirectionPieces(symbols, np.exp(1j * theta0), grids)
        self.E_ray = self._rows(ray_dir, np.abs(self.s_ray), p)
        brk_dir = _DirectionPieces(symbols, 1j, grids)
        self.E_brk = self._rows(brk_dir, np.array([1.0]), p)[0]
        self._fit_tail()

    def _rows(self, pieces: _DirectionPieces, mod_s: np.ndarray,
              p: np.ndarray) -> np.ndarray:
        cache = pieces.cache
        psi_hat = self.psi_hat
        v = pieces.v
        out = np.empty((mod_s.size, p.size), dtype=complex)
        for i, ms in enumerate(mod_s):
            sc = cache.scalars(np.array([ms]))
            k, phi, big_b = sc["k"][0], sc["phi"][0], sc["B"][0]
            c_ref, e_ref = sc["C"][0], np.exp(sc["gamma_ref"][0])
            rho = math.sqrt(ms)
            m = p * rho
            psi_mat = psi_hat(m[:, None] * v[None, :])
            kern1 = pieces.base_kernel
            kern2 = kern1 / (v + 1.0 / rho)
            i1 = psi_mat @ kern1
            i2 = psi_mat @ kern2
            bt = pieces.e0 * psi_hat(cache.phi_hat * m) \
                * (big_b - (phi - k) / (phi + 1.0))
            out[i] = c_ref * e_ref * (big_b * i1 - i2 - bt)
        return out

    def _fit_tail(self) -> None:
        """Least-squares fit of E- ~ lam1 p^{-1/2} s^{3/4} + lam0 s on the
        large-|s|, small-m corner of the lattice."""
        r = self.r_nodes
        p = self.p_nodes
        rows = r >= self.grids.r_max / 1.0e2
        cols = p * np.sqrt(r[rows].max()) <= 0.1
        if not np.any(cols):
            cols = p <= p[3]
        s_c = self.s_ray[rows][:, None]
        p_c = p[cols][None, :]
        b1 = (s_c ** 0.75 / np.sqrt(p_c)).ravel()
        b0 = (s_c * np.ones_like(p_c)).ravel()
        rhs = self.E_ray[np.ix_(rows, cols)].ravel()
        coef, *_ = np.linalg.lstsq(np.stack([b1, b0], axis=1), rhs, rcond=None)
        self.tail_lam1, self.tail_lam0 = complex(coef[0]), complex(coef[1])
        model = coef[0] * b1 + coef[1] * b0
        scale = float(np.max(np.abs(rhs)))
        self.tail_fit_residual = float(np.max(np.abs(rhs - model))) / scale if scale else 0.0

    # -- kernel assembly ---------------------------------------------------

    def _kernel_raw(self, t: float) -> np.ndarray:
        p2t = self.p_nodes**2 * t
        bracket = np.imag(np.exp(1j * p2t) * self.E_brk)
        phase = np.exp(1j * self.theta0)
        with np.errstate(over="ignore", invalid="ignore"):
            damp = np.exp(self.s_ray[:, None] * p2t[None, :])
        core = (self.r_weights[:, None] * damp) * \
            (self.E_ray / (1.0 + self.s_ray**2)[:, None])
        ray = np.imag(phase * core.sum(axis=0)) / np.pi
        return bracket + ray + self._tail_kernel(p2t)

    @cached_property
    def kernel_zero_defect(self) -> np.ndarray:
        """Assembled kernel at t = 0 — a pure diagnostic.

        In the continuum the zero-time propagator is the identity and the
        free part already reproduces the data, so this is identically zero;
        on the lattice it measures the contour-closure defect of the E-layer
        (the bracket row does not cancel the ray integral pointwise).  It is
        reported, not subtracted: the defect's time carrier is unknown, and a
        frozen subtraction merely trades the far-field error at early times
        for an equally large wall-trace error at late times."""
        return self._kernel_raw(0.0)

    def kernel(self, t: float) -> np.ndarray:
        """K(p, t) on p_nodes (real array)."""
        return self._kernel_raw(t)

    def _tail_kernel(self, p2t: np.ndarray) -> np.ndarray:
        r, wr = self.grids.tail_ray
        s = r * np.exp(1j * self.theta0)
        phase = np.exp(1j * self.theta0)
        with np.errstate(over="ignore", invalid="ignore"):
            damp = np.exp(s[:, None] * p2t[None, :])
        model = (self.tail_lam1 * s[:, None] ** 0.75 / np.sqrt(self.p_nodes)[None, :]
                 + self.tail_lam0 * s[:, None])
        model *= np.sqrt(r)[:, None] * self.p_nodes[None, :] <= _TAIL_M_CUT
        core = (wr[:, None] * damp) * model / (1.0 + s**2)[:, None]
        return np.imag(phase * core.sum(axis=0)) / np.pi

    def kernel_axis_reference(self, t: float, p_values: np.ndarray,
                              bracket_coefficient: complex | None = None,
                              y_cut: float = 1.0e6) -> np.ndarray:
        """Independent principal-value route on the (undeformed) imaginary axis.

        K = (1/pi) Re PV int_0^infty e^{i y p^2 t} E-(p, iy)/(1-y^2) dy plus
        the half-residue bracket at s = +-i; the pole at y = 1 is handled by
        symmetric pairing.  Slow; cross-checks the rotated-ray assembly.  The
        plain_average variant (full residues with the principal value) is the
        negative control."""
        sym = self.symbols
        coeff = bracket_coefficient
        if coeff is None:
            coeff = {"pv_half_residue": 0.25 / 1j,
                     "plain_average": 0.5 / 1j}[sym.config.plemelj_constants]
        p_values = np.asarray(p_values, dtype=float)
        axis_dir = _DirectionPieces(sym, 1j, self.grids)
        u, wu = log_graded_nodes(1.0e-7, 1.0 - 1.0e-9, 32)
        y_hi, wy_hi = log_graded_nodes(2.0, y_cut, 32)
        y_all = np.concatenate([1.0 - u, 1.0 + u, y_hi])
        rows = self._rows(axis_dir, y_all, p_values)
        n = u.size
        g_lo, g_hi, g_far = rows[:n], rows[n:2 * n], rows[2 * n:]
        e_brk = self._rows(axis_dir, np.array([1.0]), p_values)[0]
        p2t = p_values**2 * t

        def f(y_vals, e_rows):
            return np.exp(1j * y_vals[:, None] * p2t[None, :]) * e_rows \
                / (1.0 + y_vals[:, None])

        pv = np.sum(wu[:, None] * (f(1.0 - u, g_lo) - f(1.0 + u, g_hi)) / u[:, None],
                    axis=0)
        far = np.sum(wy_hi[:, None] * f(y_hi, g_far) / (1.0 - y_hi)[:, None], axis=0)
        axis = np.real(pv + far) / np.pi
        bracket = 2.0 * np.real(coeff * np.exp(1j * p2t) * e_brk)
        return axis + bracket


# ---------------------------------------------------------------------------
# Filon moments for the oscillatory residue pieces


def fresnel_weights(p_nodes: np.ndarray, sigma: float) -> np.ndarray:
    """Per-node weights w with sum_q w_q A(p_q) = int A(p) e^{i sigma p^2} dp
    exact for piecewise-linear A between the nodes.

    Stable for any real sigma (trapezoid limit as sigma -> 0); the oscillatory
    branch uses Fresnel moments built from the Faddeeva function evaluated in
    the upper half plane."""
    if sigma < 0:
        return np.conj(fresnel_weights(p_nodes, -sigma))
    p = np.asarray(p_nodes, dtype=float)
    a, b = p[:-1], p[1:]
    h = b - a
    m0 = np.empty(a.size, dtype=complex)
    m1 = np.empty(a.size, dtype=complex)
    small = sigma * b * b < 1.0e-4
    if np.any(small):
        aa, bb = a[small], b[small]
        js = 1j * sigma
        m0[small] = (bb - aa) + js * (bb**3 - aa**3) / 3.0 \
            - sigma**2 * (bb**5 - aa**5) / 10.0
        m1[small] = (bb**2 - aa**2) / 2.0 + js * (bb**4 - aa**4) / 4.0 \
            - sigma**2 * (bb**6 - aa**6) / 12.0
    big = ~small
    if np.any(big):
        aa, bb = a[big], b[big]
        c = np.sqrt(-1j * sigma)  # principal root, Re c > 0
        fa = np.exp(1j * sigma * aa * aa)
        fb = np.exp(1j * sigma * bb * bb)
        m0[big] = 0.5 * math.sqrt(math.pi) / c * (fa * wofz(1j * c * aa)
                                                  - fb * wofz(1j * c * bb))
        m1[big] = (fb - fa) / (2j * sigma)
    w = np.zeros(p.size, dtype=complex)
    w[:-1] += (b * m0 - m1) / h
    w[1:] += (m1 - a * m0) / h
    return w


# ---------------------------------------------------------------------------
# head weights for the p -> 0 end of the Laplace assembly


def _head_weight(x: np.ndarray, p0: float, deriv: int) -> np.ndarray:
    """int_0^{p0} p^d e^{-p x} (p/p0)^{-1/2} dp, the sqrt-model head that
    captures the integrable p^{-1/2} growth of K below the first node."""
    x = np.asarray(x, dtype=float)
    a = deriv + 0.5
    u = p0 * x
    small = u < 1.0e-8
    out = np.empty(x.shape, dtype=float)
    out[small] = p0 ** (deriv + 1) / a * (1.0 - a * u[small] / (a + 1.0))
    xs = x[~small]
    out[~small] = math.sqrt(p0) * gamma_fn(a) * gammainc(a, p0 * xs) / xs**a
    return out


# ---------------------------------------------------------------------------
# the operator


class GreenOperator:
    """Full linear solution map for one initial profile.

    Wraps the free FFT part on a whole-line grid and the lattice-based
    correction; evaluation points are arbitrary x > 0 arrays."""

    def __init__(self, symbols: Symbols, profile: Profile,
                 whole_grid: WholeLineGrid | None = None,
                 grids: GreenGrids | None = None):
        self.symbols = symbols
        self.profile = profile
        self.grids = grids or GreenGrids()
        self.whole_grid = whole_grid or WholeLineGrid()
        self.theta0 = math.pi / 2.0 + symbols.config.delta_s
        self._g2_sign = g2_sign(symbols.config)
        wg = self.whole_grid
        samples = np.where(wg.nodes >= 0.0, profile(wg.nodes), 0.0)
        self._free_spectrum = np.fft.fft(samples)
        mags = np.abs(self._free_spectrum)
        alive = mags > 1.0e-12 * mags.max()
        self._xi_eff = float(np.max(np.abs(wg.xi[alive]))) if alive.any() else 0.0

    @cached_property
    def lattice(self) -> EMinusLattice:
        return EMinusLattice(self.symbols, self.profile.hat, self.grids,
                             self.theta0)

    # -- free part ---------------------------------------------------------

    def _check_transport(self, t: float, x_need: float) -> None:
        wg = self.whole_grid
        right = wg.x0 + wg.n * wg.dx
        if wg.x0 > -16.0 or right < x_need + 2.0 * self._xi_eff * t + 16.0:
            raise ValueError(
                f"whole-line grid [{wg.x0}, {right:.0f}] cannot hold the "
                f"transport to t={t} (needs {x_need + 2 * self._xi_eff * t + 16:.0f})")

    def free_on_grid(self, t: float, deriv: int = 0, x_need: float = 0.0) -> np.ndarray:
        self._check_transport(t, x_need)
        xi = self.whole_grid.xi
        mult = np.exp(-1j * xi * np.abs(xi) * t) * (1j * xi) ** deriv
        return np.fft.ifft(mult * self._free_spectrum).real

    def free(self, x: np.ndarray, t: float, deriv: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x_need = float(np.max(x)) if x.size else 0.0
        vals = self.free_on_grid(t, deriv, x_need)
        hi = min(self.whole_grid.index_of(x_need) + 130, self.whole_grid.n)
        lo = max(self.whole_grid.index_of(0.0) - 130, 0)
        spline = CubicSpline(self.whole_grid.nodes[lo:hi], vals[lo:hi])
        return spline(x)

    # -- correction --------------------------------------------------------

    def kernel(self, t: float) -> np.ndarray:
        return self.lattice.kernel(t)

    def correction(self, x: np.ndarray, t: float, deriv: int = 0) -> np.ndarray:
        """G2^{(d)}(t) psi at the points x (x >= 0)."""
        x = np.asarray(x, dtype=float)
        lat = self.lattice
        p = lat.p_nodes
        p2t = p**2 * t
        k_full = lat.kernel(t)
        # smooth (damped-ray + tail) part of the kernel
        k_smooth = k_full - np.imag(np.exp(1j * p2t) * lat.E_brk)
        lap = laplace_matrix(x, p)
        smooth = lap @ (p**deriv * k_smooth)
        # oscillatory residue piece via Fresnel moments
        wq = fresnel_weights(p, t)
        amp = (p**deriv * lat.E_brk)[None, :] * np.exp(-np.outer(x, p))
        brk = np.imag(amp @ wq)
        head = _head_weight(x, p[0], deriv) * k_full[0]
        sign = self._g2_sign * (-1.0) ** deriv
        # lap carries a complex dtype with vanishing imaginary part here
        return np.real(sign * (smooth + brk + head))

    # -- combined ----------------------------------------------------------

    def apply(self, x: np.ndarray, t: float, deriv: int = 0) -> np.ndarray:
        if t == 0.0:
            x = np.asarray(x, dtype=float)
            base = self.profile(x) if deriv == 0 else self.profile.deriv(x)
            return base + self.correction(x, 0.0, deriv)
        return self.free(x, t, deriv) + self.correction(x, t, deriv)

    def dirichlet_defect(self, t: float, x_probe: float = 1.0e-4,
                         psi_norm: float | None = None) -> float:
        val = abs(float(self.apply(np.array([x_probe]), t)[0]))
        if psi_norm is None:
            xs = np.linspace(0.0, 40.0, 4001)
            psi_norm = float(np.sqrt(np.trapezoid(self.profile(xs)**2, xs)))
        return val / psi_norm
