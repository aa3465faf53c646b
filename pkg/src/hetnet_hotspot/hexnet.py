"""Hexagonal macro lattice: closed-form interference factor, the macro
degradation g(r) and a brute-force lattice-sum reference."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linkbudget import NetworkModel
from .numerics import hurwitz_zeta, invert_monotone, riemann_zeta

_W = np.exp(1j * np.pi / 3)


@functools.lru_cache(maxsize=64)
def omega(b: float) -> float:
    """Lattice constant 3^-b zeta(b) (zeta(b, 1/3) - zeta(b, 2/3)).

    Six times this is the sum of |c/delta|^(-2b) over all non-central sites.
    """
    b = float(b)
    if not b > 1:
        raise ValueError(f"omega requires b > 1, got {b}")
    return 3.0 ** -b * riemann_zeta(b) * (hurwitz_zeta(b, 1.0 / 3.0) - hurwitz_zeta(b, 2.0 / 3.0))


def interference_factor(r_km, model: NetworkModel):
    """Closed-form ratio of total interfering macro power to serving macro power at distance r."""
    b = model.b
    x = np.asarray(r_km, dtype=float) / model.delta_km
    if np.any(x < 0) or np.any(x >= 1):
        raise ValueError("interference_factor requires 0 <= r < delta")
    x2 = x * x
    f = 6.0 * x ** (2 * b) * ((1.0 + (1.0 - b) ** 2 * x2) / (1.0 - x2) ** (2 * b - 1)
                              + omega(b) - 1.0)
    return f if f.ndim else float(f)


def g(r_km, model: NetworkModel):
    """Inverse macro SINR without small cell: f(r) + (P_N/P) r^{2b}."""
    r = np.asarray(r_km, dtype=float)
    out = np.asarray(interference_factor(r, model)) + model.noise_to_macro * r ** (2 * model.b)
    return out if out.ndim else float(out)


def g_inverse(y: float, model: NetworkModel, full_output: bool = False):
    """Radius in [0, R] where g equals ``y``; clamped to R above g(R).

    With ``full_output`` returns ``(r, clamped)``.
    """
    if y < 0:
        raise ValueError("g_inverse requires y >= 0")
    return invert_monotone(lambda r: g(r, model), y, 0.0, model.cell_radius_km,
                           full_output=full_output)


@dataclass(frozen=True)
class HexLattice:
    """Macro sites ``u*delta + v*delta*e^{i pi/3}`` within ``ring_count`` hexagonal rings."""

    delta_km: float = 1.0
    ring_count: int = 30

    def __post_init__(self):
        if self.ring_count < 10:
            raise ValueError("ring_count must be >= 10")
        if not self.delta_km > 0:
            raise ValueError("delta_km must be positive")

    @property
    def sites(self) -> np.ndarray:
        return _sites(self.delta_km, self.ring_count)

    def tail_bound(self, r_km, b: float):
        """Continuum bound on the sum over sites beyond the last ring, in units of f.

        Excluded sites lie outside radius (K+1)*sqrt(3)/2*delta; their Voronoi
        cells start no closer than that minus the cell circumradius.
        """
        r = np.asarray(r_km, dtype=float)
        d = self.delta_km
        area = math.sqrt(3.0) / 2.0 * d * d
        inner = (self.ring_count + 1) * math.sqrt(3.0) / 2.0 * d - d / math.sqrt(3.0)
        u0 = inner - r
        s = 2.0 * math.pi / area * (u0 ** (2 - 2 * b) / (2 * b - 2) + r * u0 ** (1 - 2 * b) / (2 * b - 1))
        return s * r ** (2 * b)


@functools.lru_cache(maxsize=8)
def _sites(delta_km: float, ring_count: int) -> np.ndarray:
    k = np.arange(-ring_count, ring_count + 1)
    u, v = np.meshgrid(k, k, indexing="ij")
    u = u.ravel()
    v = v.ravel()
    ring = np.maximum(np.maximum(np.abs(u), np.abs(v)), np.abs(u + v))
    keep = (ring > 0) & (ring <= ring_count)
    sites = delta_km * (u[keep] + v[keep] * _W)
    sites.setflags(write=False)
    return sites


class LatticeSum(NamedTuple):
    value: np.ndarray | float
    tail_bound: np.ndarray | float


def lattice_sum_oracle(r_km, theta, lattice: HexLattice, b: float) -> LatticeSum:
    """Explicit interference factor at ``r e^{i theta}``: sum over truncated lattice of
    |m - c|^{-2b} divided by r^{-2b}. The truncation tail bound is reported alongside."""
    r, th = np.broadcast_arrays(np.asarray(r_km, dtype=float), np.asarray(theta, dtype=float))
    if np.any(r < 0) or np.any(r >= lattice.delta_km):
        raise ValueError("lattice_sum_oracle requires 0 <= r < delta")
    m = (r * np.exp(1j * th)).ravel()
    sites = lattice.sites
    total = np.empty(m.size)
    step = max(1, 2_000_000 // sites.size)
    for i in range(0, m.size, step):
        d2 = np.abs(m[i:i + step, None] - sites[None, :]) ** 2
        total[i:i + step] = np.sum(d2 ** -b, axis=1)
    value = (total * np.abs(m) ** (2 * b)).reshape(r.shape)
    tail = np.asarray(lattice.tail_bound(r, b))
    if value.ndim == 0:
        return LatticeSum(float(value), float(tail))
    return LatticeSum(value, tail)


def angular_mean_lattice_sum(r_km: float, lattice: HexLattice, b: float,
                             n_theta: int = 360) -> float:
    """Lattice sum averaged over uniform angles in one 60-degree sector (midpoint rule)."""
    th = (np.arange(n_theta) + 0.5) * (np.pi / 3) / n_theta
    return float(np.mean(lattice_sum_oracle(r_km, th, lattice, b).value))
