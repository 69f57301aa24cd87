"""Coherent-state geometry: embeddings, projective distance, induced metrics.

Each model embeds its domain into projective Hilbert space along the
coefficient map; only the closed-form reproducing kernel

    elliptic:    <i(z), i(z')> = (1 + z conj(z'))^L
    flat:        <i(z), i(z')> = exp(L z conj(z'))
    hyperbolic:  <i(z), i(z')> = (1 - z conj(z'))^(-L)

is ever needed, so the infinite-dimensional vectors are never materialized
(truncated partial sums appear only in tests).  The projective distance
arccos |<x,y>| / (|x||y|) equals arccos |rho|, and for nearly coincident
points it is computed through a stable 1 - |rho| so the induced-metric
limit can be probed down to |dz| ~ 1e-4 without catastrophic cancellation.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .models import Family, ModelSpec


def embedding_inner_product(model: ModelSpec, z1, z2):
    """Closed-form coherent-state kernel; equals norm_psi(z)^2 on the diagonal."""
    model.require_in_domain(z1)
    model.require_in_domain(z2)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    L = model.intensity
    w = z1 * np.conj(z2)
    if model.family is Family.FLAT:
        return np.exp(L * w)
    if model.family is Family.ELLIPTIC:
        return np.exp(L * np.log((1.0 + w).astype(complex)))
    return np.exp(-L * np.log((1.0 - w).astype(complex)))


def fubini_study_distance(model: ModelSpec, z1, z2):
    """arccos |rho(z1, z2)|, in [0, pi/2].

    Implemented as 2 * arcsin(sqrt(u/2)) with u = 1 - |rho| built from
    expm1/log1p, exact also in the infinitesimal regime.
    """
    neg_log = model.neg_log_abs_rho(z1, z2)
    u = -np.expm1(-neg_log)
    return 2.0 * np.arcsin(np.sqrt(np.clip(u / 2.0, 0.0, 1.0)))


def invariant_line_element(model: ModelSpec, z):
    """Density of the invariant metric |dz| factor (1, spherical, or hyperbolic)."""
    a = np.abs(np.asarray(z, dtype=complex)) ** 2
    if model.family is Family.FLAT:
        return np.ones_like(a)
    if model.family is Family.ELLIPTIC:
        return 1.0 / (1.0 + a)
    return 1.0 / (1.0 - a)


def induced_metric_ratio(model: ModelSpec, z, dz) -> float:
    """Projective distance across a short chord over its invariant length.

    Tends to 1 as |dz| -> 0 with an O(|dz|^2) defect: the embedding is a
    homothety with ratio sqrt(L) onto the invariant metric.
    """
    dz = complex(dz)
    if dz == 0:
        raise ValueError("need a nonzero displacement")
    z = complex(z)
    dist = float(fubini_study_distance(model, z - dz / 2.0, z + dz / 2.0))
    ref = math.sqrt(model.intensity) * abs(dz) * float(invariant_line_element(model, z))
    return dist / ref


def edelman_kostlan_density(model: ModelSpec, z, rel_step: float = 1e-3) -> float:
    """Mean zero density from the log-scale Laplacian, (2 pi)^{-1} Lap log||psi||.

    Five-point stencils at steps h and h/2 are Richardson-combined (the h^2
    errors sit in ratio 4).  The step is proportional to the local
    injectivity scale so the hyperbolic boundary stays usable; underflow of
    that scale raises rather than returning garbage.
    """
    z = complex(z)
    model.require_in_domain(z)
    scale = float(invariant_line_element(model, z))
    h = rel_step / scale
    if model.family is Family.HYPERBOLIC:
        room = 1.0 - abs(z)
        h = min(h, 0.25 * room)
        if h < 1e-12:
            raise DomainError("stencil step underflows near the hyperbolic boundary")

    def lap_log_norm(step):
        pts = np.array([z + step, z - step, z + 1j * step, z - 1j * step, z])
        vals = model.log_norm_psi(pts)
        return (vals[0] + vals[1] + vals[2] + vals[3] - 4.0 * vals[4]) / step ** 2

    fine = lap_log_norm(h / 2.0)
    coarse = lap_log_norm(h)
    return float((4.0 * fine - coarse) / 3.0) / (2.0 * math.pi)


# --- coordinate correspondences ---------------------------------------------


def sphere_to_plane(x) -> complex:
    """Stereographic chart (x1 + i x2) / (1 - x0); the north pole is the
    point at infinity and is rejected."""
    x0, x1, x2 = (float(v) for v in x)
    if abs(x0 * x0 + x1 * x1 + x2 * x2 - 1.0) > 1e-9:
        raise DomainError("not a unit-sphere point")
    if abs(1.0 - x0) < 1e-12:
        raise DomainError("north pole maps to infinity")
    return (x1 + 1j * x2) / (1.0 - x0)


def plane_to_sphere(z) -> tuple:
    z = complex(z)
    a = abs(z) ** 2
    return ((a - 1.0) / (a + 1.0), 2.0 * z.real / (a + 1.0), 2.0 * z.imag / (a + 1.0))


def hyperboloid_to_disk(x) -> complex:
    """Chart (x1 + i x2) / (1 + x0) of the upper hyperboloid sheet."""
    x0, x1, x2 = (float(v) for v in x)
    if x0 <= 0 or abs(x0 * x0 - x1 * x1 - x2 * x2 - 1.0) > 1e-9:
        raise DomainError("not an upper-hyperboloid point")
    return (x1 + 1j * x2) / (1.0 + x0)


def disk_to_hyperboloid(z) -> tuple:
    z = complex(z)
    a = abs(z) ** 2
    if a >= 1.0:
        raise DomainError("point outside the unit disk")
    d = 1.0 - a
    return ((1.0 + a) / d, 2.0 * z.real / d, 2.0 * z.imag / d)
