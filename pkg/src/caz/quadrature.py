"""Adaptive quadrature over disk supports and the invariant measures.

Production integrals use a polar product rule on the support disk:
Gauss-Legendre in radius times the trapezoid rule in angle (spectrally
accurate for periodic integrands).  The grid is doubled until two successive
estimates agree to the requested relative tolerance, and every reported
integral has passed that n-versus-2n agreement check.

A masked tensor Gauss-Legendre rule on the bounding square is kept as an
independent cross-check; it converges far too slowly near the support circle
to serve as the production path (the integrand is only C^2 there), which is
why the polar rule replaced it.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def disk_rule(center: complex, radius: float, n_r: int, n_t: int):
    """Nodes (complex) and weights integrating f against planar Lebesgue measure."""
    x, w = _leggauss(n_r)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    wt = 2.0 * np.pi / n_t
    nodes = center + r[:, None] * np.exp(1j * theta)[None, :]
    weights = (wr * wt)[:, None] * np.ones((1, n_t))
    return nodes.ravel(), weights.ravel()


def integrate_disk(f, center: complex, radius: float, rel_tol: float = 1e-8,
                   n0: int = 24, max_doublings: int = 8) -> float:
    """Integral of f over the disk, accepted only after n/2n agreement."""
    n_r, n_t = n0, 2 * n0
    nodes, w = disk_rule(center, radius, n_r, n_t)
    prev = float(np.sum(f(nodes) * w))
    for _ in range(max_doublings):
        n_r, n_t = 2 * n_r, 2 * n_t
        nodes, w = disk_rule(center, radius, n_r, n_t)
        cur = float(np.sum(f(nodes) * w))
        scale = max(abs(cur), abs(prev), 1e-300)
        if abs(cur - prev) <= rel_tol * scale:
            return cur
        prev = cur
    raise QuadratureError(
        f"disk quadrature did not reach {rel_tol:g} relative agreement")


def integrate_square_masked(f, center: complex, half_width: float, n: int) -> float:
    """Tensor Gauss-Legendre on the bounding square (cross-check rule).

    The integrand must vanish outside its support; no masking correction is
    applied beyond that.
    """
    x, w = _leggauss(n)
    ax = half_width * x
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    W = half_width * half_width * np.outer(w, w)
    vals = f(center + X + 1j * Y)
    return float(np.sum(vals * W))


def integrate_radial_compactified(g, rel_tol: float = 1e-8, n0: int = 32,
                                  max_doublings: int = 8) -> float:
    """Integral over the whole plane of a radial g(|z|^2) d(m) via t = s/(1+s).

    Used for whole-sphere integrands: with s = |z|^2 the planar integral is
    pi * int_0^inf g(s) ds = pi * int_0^1 g(t/(1-t)) / (1-t)^2 dt.
    """
    n = n0
    x, w = _leggauss(n)
    t = 0.5 * (x + 1.0)
    prev = float(np.pi * np.sum(0.5 * w * g(t / (1 - t)) / (1 - t) ** 2))
    for _ in range(max_doublings):
        n *= 2
        x, w = _leggauss(n)
        t = 0.5 * (x + 1.0)
        cur = float(np.pi * np.sum(0.5 * w * g(t / (1 - t)) / (1 - t) ** 2))
        scale = max(abs(cur), abs(prev), 1e-300)
        if abs(cur - prev) <= rel_tol * scale:
            return cur
        prev = cur
    raise QuadratureError("compactified radial quadrature did not converge")
