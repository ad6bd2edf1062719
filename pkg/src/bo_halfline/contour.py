"""Contour quadrature primitives: rays, axis samplings, Cauchy/Plemelj limits.

Everything downstream (symbol integrals, operator kernels) is built from two
node generators -- log-graded Gauss-Legendre panels along a ray, and a
two-sided sampling of the imaginary axis -- plus three classical operations:
the off-axis Cauchy transform, its one-sided boundary values, and principal
values with the singular point on the contour.  Principal values use symmetric
pairing about the singularity (the pole contributions of mirrored nodes cancel
exactly), with excision radius ``1e-6 * scale``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PV_EXCISION_FACTOR = 1.0e-6


@lru_cache(maxsize=64)
def _gl_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_nodes(edges: np.ndarray, points_per_panel: int = 10):
    """Gauss-Legendre nodes/weights on consecutive panels [edges[i], edges[i+1]]."""
    x, w = _gl_rule(points_per_panel)
    a = edges[:-1]
    b = edges[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def log_edges(r_min: float, r_max: float, points_per_decade: int,
              points_per_panel: int = 10) -> np.ndarray:
    """Panel edges geometrically spaced so the point density matches the knob."""
    decades = np.log10(r_max / r_min)
    n_panels = max(1, int(np.ceil(decades * points_per_decade / points_per_panel)))
    return r_min * (r_max / r_min) ** (np.arange(n_panels + 1) / n_panels)


def log_graded_nodes(r_min: float, r_max: float, points_per_decade: int,
                     points_per_panel: int = 10):
    edges = log_edges(r_min, r_max, points_per_decade, points_per_panel)
    return panel_nodes(edges, points_per_panel)


@dataclass(frozen=True)
class ContourRay:
    """One ray ``q = r e^{i angle}``, traversed outward (+1) or inward (-1)."""

    angle: float
    r_min: float = 1.0e-6
    r_max: float = 1.0e6
    points_per_decade: int = 24
    orientation: int = 1

    def nodes(self):
        """Nodes and dq-weights in traversal order."""
        r, wr = log_graded_nodes(self.r_min, self.r_max, self.points_per_decade)
        direction = np.exp(1j * self.angle)
        if self.orientation > 0:
            return r * direction, wr * direction
        return (r * direction)[::-1], (-wr * direction)[::-1]


@dataclass(frozen=True)
class Contour:
    """A chain of rays traversed in order; quadrature is the concatenated sum."""

    rays: tuple[ContourRay, ...]

    def nodes(self):
        qs, ws = zip(*(ray.nodes() for ray in self.rays))
        return np.concatenate(qs), np.concatenate(ws)

    def integrate(self, f) -> complex:
        q, w = self.nodes()
        return complex(np.sum(f(q) * w))


def symbol_contour(angle: float, r_min: float = 1.0e-6, r_max: float = 1.0e6,
                   points_per_decade: int = 24) -> Contour:
    """The keyhole-free chain: down-ray at -angle traversed inward, then the
    up-ray at +angle outward.  ``angle`` is measured from the positive real axis."""
    return Contour((
        ContourRay(-angle, r_min, r_max, points_per_decade, orientation=-1),
        ContourRay(+angle, r_min, r_max, points_per_decade, orientation=+1),
    ))


@dataclass(frozen=True)
class AxisSampling:
    """Two-sided sampling of the imaginary axis, graded about the origin.

    ``decay_exponent`` is the integrand's large-|q| power decay; the outer
    truncation radius is chosen adaptively so the discarded tail is below
    ``tail_tol`` (relative, for a unit-scale integrand), capped at 1e12*scale.
    """

    scale: float = 1.0
    decay_exponent: float = 2.0
    tail_tol: float = 1.0e-10
    r_min_factor: float = 1.0e-6
    points_per_decade: int = 24
    r_max_override: float | None = None

    @property
    def r_min(self) -> float:
        return self.scale * self.r_min_factor

    @property
    def r_max(self) -> float:
        if self.r_max_override is not None:
            return self.r_max_override
        if self.decay_exponent <= 1.0:
            raise ValueError("decay_exponent must exceed 1 for an adaptive tail")
        # Cap in log space: for decay exponents barely above 1 the adaptive
        # radius overflows a double long before the cap would apply.
        log_r = -math.log10(self.tail_tol) / (self.decay_exponent - 1.0)
        if log_r >= 12.0:
            return 1.0e12 * self.scale
        return self.scale * 10.0 ** log_r

    def nodes(self):
        """Nodes q = iy and dq-weights, traversal order -i*inf -> +i*inf."""
        r, wr = log_graded_nodes(self.r_min, self.r_max, self.points_per_decade)
        y = np.concatenate([-r[::-1], r])
        wy = np.concatenate([wr[::-1], wr])
        return 1j * y, 1j * wy


def _shifted_axis_nodes(center: float, u_min: float, u_max: float,
                        points_per_decade: int):
    """Symmetric log-graded nodes y = center +/- u on the axis, paired exactly."""
    r, wr = log_graded_nodes(u_min, u_max, points_per_decade)
    y = np.concatenate([center - r[::-1], center + r])
    wy = np.concatenate([wr[::-1], wr])
    return 1j * y, 1j * wy


def cauchy_transform(phi, z: complex, sampling: AxisSampling) -> complex:
    """(1/2 pi i) * integral over the upward imaginary axis of phi(q)/(q - z).

    ``z`` must sit off the axis; the quadrature grid is re-centered on Im z so
    the near-pole scale |Re z| is resolved, and the short symmetric gap across
    the center is patched with the analytic log term.
    """
    d = float(np.real(z))
    if d == 0.0:
        raise ValueError("cauchy_transform requires Re z != 0; use plemelj_limits")
    c = float(np.imag(z))
    u_min = abs(d) / 10.0
    u_max = max(sampling.r_max, 10.0 * abs(c) + sampling.scale)
    q, w = _shifted_axis_nodes(c, u_min, u_max, sampling.points_per_decade)
    total = np.sum(phi(q) * w / (q - z))
    # Analytic patch for the excised segment q = i(c-u_min) .. i(c+u_min):
    # the antiderivative log(q - z) changes by 2i atan(u_min / -d) along the
    # vertical segment (the endpoint moduli agree, and the continuous
    # argument increment never wraps).  A principal-log difference would add
    # a spurious full residue when the segment crosses the cut (Re z > 0).
    gap = phi(1j * c) * 2j * math.atan(u_min / -d)
    return complex((total + gap) / (2j * np.pi))


def plemelj_limits(phi, p: complex, sampling: AxisSampling):
    """One-sided boundary values (P_plus, P_minus) of the Cauchy transform at
    p on the imaginary axis; plus = limit from Re z < 0 (left of upward travel).

    Computed as principal value (pole-subtracted) plus/minus half the density.
    """
    c = float(np.imag(p))
    p = 1j * c
    u_min = sampling.scale * PV_EXCISION_FACTOR
    u_max = max(sampling.r_max, 10.0 * abs(c) + sampling.scale)
    q, w = _shifted_axis_nodes(c, u_min, u_max, sampling.points_per_decade)
    phi_p = phi(np.array([p]))[0]
    pv = np.sum((phi(q) - phi_p) * w / (q - p)) / (2j * np.pi)
    return complex(pv + 0.5 * phi_p), complex(pv - 0.5 * phi_p)


def pv_integral(f, singular_point: complex, sampling: AxisSampling) -> complex:
    """Principal value along the upward imaginary axis of f with one simple
    pole at ``singular_point`` (on the axis).  Symmetric pairing: mirrored
    nodes about the pole cancel its odd part exactly; excision radius is
    1e-6 * scale."""
    c = float(np.imag(singular_point))
    u_min = sampling.scale * PV_EXCISION_FACTOR
    u_max = max(sampling.r_max, 10.0 * abs(c) + sampling.scale)
    q, w = _shifted_axis_nodes(c, u_min, u_max, sampling.points_per_decade)
    return complex(np.sum(f(q) * w))


def winding_index(values: np.ndarray, closed: bool = False) -> float:
    """Total argument increment / 2 pi along an ordered sample of a non-vanishing
    function.  Consecutive jumps at or above pi mean the sampling cannot be
    unwrapped reliably and raise ValueError (refine the sampling instead)."""
    values = np.asarray(values)
    if np.any(values == 0) or not np.all(np.isfinite(values)):
        raise ValueError("winding_index requires finite nonzero samples")
    seq = values
    if closed:
        seq = np.concatenate([values, values[:1]])
    increments = np.angle(seq[1:] / seq[:-1])
    if np.any(np.abs(increments) >= np.pi * (1.0 - 1.0e-9)):
        raise ValueError("argument jump >= pi between samples; sampling too coarse")
    return float(np.sum(increments) / (2.0 * np.pi))
