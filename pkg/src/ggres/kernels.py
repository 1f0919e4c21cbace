"""Closed-form resolvent kernels on the regular tree and the parabolic cylinder.

Both kernels are checked against the adjacency operator on finite
truncations, with residuals taken strictly inside the truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class KernelPole(ValueError):
    pass


def z_of(mu: complex) -> complex:
    return (mu + 1 / mu) / 2


@dataclass(frozen=True)
class TreeKernelParams:
    q: int
    mu: complex

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        mu = complex(self.mu)
        object.__setattr__(self, "mu", mu)
        if mu == 0 or abs(mu * mu - 1 / self.q) < 1e-300:
            raise KernelPole(f"tree kernel has a pole at mu = {mu}")


@dataclass(frozen=True)
class CuspKernelParams:
    q: int
    mu: complex

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        mu = complex(self.mu)
        object.__setattr__(self, "mu", mu)
        if mu == 0 or mu * mu == 1:
            raise KernelPole(f"cusp kernel has a pole at mu = {mu}")


def tree_kernel(p: TreeKernelParams, d: int) -> complex:
    """k(d) = -2 / (mu - 1/(q mu)) * (1/(mu sqrt q))**d."""
    if d < 0:
        raise ValueError("distance must be nonnegative")
    mu, q = p.mu, p.q
    return -2 / (mu - 1 / (q * mu)) * (1 / (mu * math.sqrt(q))) ** d


def cusp_kernel(p: CuspKernelParams, k1: int, k2: int) -> complex:
    """K(k1, k2) = -2 / (mu - 1/mu) * (sqrt(q)/mu)**|k1-k2| * q**min(k1, k2)."""
    mu, q = p.mu, p.q
    return -2 / (mu - 1 / mu) * (math.sqrt(q) / mu) ** abs(k1 - k2) * q ** min(k1, k2)


def tree_recurrence_residuals(p: TreeKernelParams, dmax: int = 50) -> tuple[float, float]:
    """Relative residuals of the two radial recurrences of the tree kernel.

    (i)  z k(0) + 1 = (q+1)/(2 sqrt q) k(1)
    (ii) z k(d) = (k(d-1) + q k(d+1)) / (2 sqrt q),  1 <= d <= dmax
    """
    q, sq, z = p.q, math.sqrt(p.q), z_of(p.mu)
    k = [tree_kernel(p, d) for d in range(dmax + 2)]
    r1 = abs(z * k[0] + 1 - (q + 1) / (2 * sq) * k[1]) / max(1.0, abs(k[0]))
    r2 = 0.0
    for d in range(1, dmax + 1):
        lhs = z * k[d]
        rhs = (k[d - 1] + q * k[d + 1]) / (2 * sq)
        r2 = max(r2, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return r1, r2


def verify_tree_identity(p: TreeKernelParams, depth: int) -> float:
    """Apply A/(2 sqrt q) - z to the column K(., o) on the depth-D ball.

    The column is radial, so the operator reduces to sphere-to-sphere
    weights: the root sees q+1 children, every other vertex one parent and q
    children.  Returns max |result - delta_o| over radii 0..D-1.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    q, sq, z = p.q, math.sqrt(p.q), z_of(p.mu)
    k = np.array([tree_kernel(p, d) for d in range(depth + 1)])
    res = np.empty(depth, dtype=complex)
    res[0] = (q + 1) * k[1] / (2 * sq) - z * k[0] - 1
    res[1:] = (k[:depth - 1] + q * k[2:depth + 1]) / (2 * sq) - z * k[1:depth]
    return float(np.max(np.abs(res)))


def cusp_relation_residual(p: CuspKernelParams, k1: int, k2: int) -> float:
    """Residual of  q^k2 delta(k1,k2) = (sqrt q/2) K(k1-1,k2) + K(k1+1,k2)/(2 sqrt q) - z K(k1,k2).

    Needs k1 >= 1 so that k1-1 is still on the cusp.
    """
    if k1 < 1:
        raise ValueError("k1 must be >= 1")
    q, sq, z = p.q, math.sqrt(p.q), z_of(p.mu)
    lhs = q ** k2 if k1 == k2 else 0.0
    rhs = sq / 2 * cusp_kernel(p, k1 - 1, k2) + cusp_kernel(p, k1 + 1, k2) / (2 * sq) \
        - z * cusp_kernel(p, k1, k2)
    scale = max(1.0, abs(cusp_kernel(p, k1, k2)), float(q ** k2))
    return abs(lhs - rhs) / scale


def cusp_relation_residual_right(p: CuspKernelParams, k1: int, k2: int) -> float:
    """The relation with the operator acting on the second argument.

    A is self-adjoint for nu(k) = q^-k, so the right identity reads
    (A - z) K(k1, .) = q^k1 delta_k1.  K is symmetric, hence this is the left
    relation at the swapped pair.
    """
    if k2 < 1:
        raise ValueError("k2 must be >= 1")
    return cusp_relation_residual(p, k2, k1)


def parabolic_lattice_residual(p: CuspKernelParams, source: int, depth: int) -> float:
    """Apply the cusp operator to the column K(., source) on levels 0..depth.

    Level 0 is the core vertex of the parabolic cylinder: its neighbors are
    one cusp vertex at level 1 and q funnel vertices whose radial values
    decay like (1/(sqrt q mu))**d.  Only levels strictly inside are checked.
    """
    q, sq, z = p.q, math.sqrt(p.q), z_of(p.mu)
    col = np.array([cusp_kernel(p, k, source) for k in range(depth + 1)])
    worst = 0.0
    for k in range(1, depth):
        val = (q * col[k - 1] + col[k + 1]) / (2 * sq) - z * col[k]
        target = q ** source if k == source else 0.0
        worst = max(worst, abs(val - target) / max(1.0, abs(col[k])))
    return worst


def weighted_norm_tail(p: TreeKernelParams, n_weight: int = 1, depth: int = 60) -> tuple[float, float]:
    """Weighted l2 norm of a tree kernel column with weight q^(-N d).

    Sphere d has (q+1) q^(d-1) vertices; the squared terms form a geometric
    series with ratio r = q^(1-2N) / (q |mu|^2).  Returns the truncated sum
    and a bound on the omitted tail (infinite when r >= 1).
    """
    q = p.q
    total = abs(tree_kernel(p, 0)) ** 2
    r = q ** (1 - 2 * n_weight) / (q * abs(p.mu) ** 2)
    term = 0.0
    for d in range(1, depth + 1):
        term = (q + 1) * q ** (d - 1) * abs(tree_kernel(p, d)) ** 2 * q ** (-2 * n_weight * d)
        total += term
    tail = term * r / (1 - r) if r < 1 else math.inf
    return total, tail
