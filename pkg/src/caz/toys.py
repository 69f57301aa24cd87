"""Three perturbed-lattice point processes contrasted with the flat zeroes.

All three share the mean (L/pi) * integral of h, but their smooth linear
statistics Z(h) = sum h(x / sqrt(L)) fluctuate on entirely different scales:

  thinned            Var = (L / 2 pi) ||h||^2          (grows with L)
  perturbed          Var = (c^2 / 2 pi) ||grad h||^2   (L-independent)
  cluster-scattered  Var = (3 c^4 / 16 pi L) ||lap h||^2  (decays like 1/L)

Only the three-point equiangular cluster reproduces the 1/L * ||lap h||^2
law of the flat model, and choosing c = 2 (pi kappa / 3)^(1/4) matches the
constant as well.  The cluster draws ONE Gaussian per lattice site and
scatters it along the three cube roots of unity: sharing eta across the
directions is what cancels the gradient term and produces the Laplacian
law; redrawing it per direction would silently degrade to the perturbed
model's law.  The two-direction variant fails because averaging a quadratic
form over n-th roots of unity recovers (1/4) * Lap Q(0) only for n >= 3.

Note the thinned-model prefactor: deleting lattice sites with probability
1/2 leaves Bernoulli variance 1/4 per site, and with site density 2/pi that
gives (L / 2 pi) ||h||^2.  (Monte Carlo pins the ratio at 1.00; the
often-quoted (L/pi) form double-counts the Bernoulli variance.)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .models import Family, ModelSpec
from .quadrature import integrate_disk
from .report import ExperimentReport
from .rng import ComplexGaussianStream
from .testfuncs import TestFunction
from .util import parallel_map
from .wick import kappa


class ToyVariant(str, enum.Enum):
    THINNED = "thinned"
    PERTURBED = "perturbed"
    CLUSTER_SCATTERED = "cluster-scattered"


_SPACING = {
    ToyVariant.THINNED: math.sqrt(math.pi / 2.0),
    ToyVariant.PERTURBED: math.sqrt(math.pi),
    ToyVariant.CLUSTER_SCATTERED: math.sqrt(3.0 * math.pi),
}


@dataclass(frozen=True)
class ToySpec:
    variant: ToyVariant
    L: float
    c: float = 0.0
    window_radius: float | None = None  # unscaled; default wraps sqrt(L)*support

    def __post_init__(self):
        object.__setattr__(self, "variant", ToyVariant(self.variant))
        if self.L <= 0:
            raise ValueError("scaling parameter L must be positive")
        if self.variant is not ToyVariant.THINNED and self.c <= 0:
            raise ValueError("scatter amplitude c must be positive")

    @property
    def lattice_spacing(self) -> float:
        return _SPACING[self.variant]


def matched_scatter_amplitude() -> float:
    """The c that makes the cluster model mimic the flat-zero variance law."""
    return 2.0 * (math.pi * kappa() / 3.0) ** 0.25


def _lattice_points(spacing: float, radius: float) -> np.ndarray:
    kmax = int(math.ceil(radius / spacing)) + 1
    k = spacing * np.arange(-kmax, kmax + 1)
    X, Y = np.meshgrid(k, k, indexing="ij")
    pts = (X + 1j * Y).ravel()
    return pts[np.abs(pts) <= radius]


def sample_toy(spec: ToySpec, stream: ComplexGaussianStream,
               window_radius: float) -> np.ndarray:
    """One realization inside the (unscaled) window.

    The lattice is enumerated over the window plus a margin of 6c + one
    cell, so scatter across the boundary is captured; Gaussian mass beyond
    6c contributes below 1e-8 relative.
    """
    margin = 6.0 * spec.c + spec.lattice_spacing
    sites = _lattice_points(spec.lattice_spacing, window_radius + margin)
    if spec.variant is ToyVariant.THINNED:
        keep = stream.draw_uniform(sites.size) < 0.5
        return sites[keep]
    eta = stream.draw(sites.size)
    if spec.variant is ToyVariant.PERTURBED:
        return sites + spec.c * eta
    phases = np.exp(2j * math.pi * np.arange(3) / 3.0)
    # one eta per cluster, scattered along the three directions
    return (sites[:, None] + spec.c * (eta[:, None] * phases[None, :])).ravel()


def toy_linear_statistic(points: np.ndarray, h: TestFunction, L: float) -> float:
    """sum h(x / sqrt(L)) over the realization."""
    vals = h.value(np.asarray(points, dtype=complex) / math.sqrt(L))
    return float(math.fsum(float(v) for v in vals))


_FLAT = ModelSpec(Family.FLAT, 1.0)


def _norm_sq(f, h: TestFunction) -> float:
    return integrate_disk(f, h.center, h.radius, rel_tol=1e-8)


def toy_expected_mean(spec: ToySpec, h: TestFunction) -> float:
    """All three variants share the flat-model mean (L/pi) * integral h."""
    value = integrate_disk(h.value, h.center, h.radius, rel_tol=1e-8)
    return spec.L / math.pi * value


def toy_variance_prediction(spec: ToySpec, h: TestFunction) -> float:
    if spec.variant is ToyVariant.THINNED:
        return spec.L / (2.0 * math.pi) * _norm_sq(lambda z: h.value(z) ** 2, h)
    if spec.variant is ToyVariant.PERTURBED:
        grad_sq = _norm_sq(lambda z: np.abs(h.gradient(z)) ** 2, h)
        return spec.c ** 2 / (2.0 * math.pi) * grad_sq
    lap_sq = _norm_sq(lambda z: h.laplacian(z) ** 2, h)
    return 3.0 * spec.c ** 4 / (16.0 * math.pi * spec.L) * lap_sq


@dataclass(frozen=True)
class _ToyPlan:
    spec: ToySpec
    h: TestFunction
    seed: int
    window_radius: float


def _toy_trial(args):
    plan, trial = args
    stream = ComplexGaussianStream(plan.seed, trial)
    pts = sample_toy(plan.spec, stream, plan.window_radius)
    z = toy_linear_statistic(pts, plan.h, plan.spec.L)
    return (z, pts.size)


def run_toy_experiment(spec: ToySpec, h: TestFunction, trials: int, seed: int,
                       *, workers=None, ks_threshold: float = 1.95,
                       header_extra: dict | None = None) -> ExperimentReport:
    """Monte Carlo trials of the toy linear statistic, reported like the
    field experiments (the variant is recorded in the header)."""
    if trials < 2:
        raise ConfigError("need at least two trials")
    window = spec.window_radius
    if window is None:
        window = math.sqrt(spec.L) * h.support_reach()
    elif window < math.sqrt(spec.L) * h.support_reach():
        raise DomainError("window does not cover the scaled support")
    plan = _ToyPlan(spec, h, int(seed), float(window))
    rows = parallel_map(_toy_trial, [(plan, t) for t in range(trials)], workers)
    z = np.array([r[0] for r in rows])
    counts = np.array([r[1] for r in rows], dtype=int)
    mean = toy_expected_mean(spec, h)
    var = toy_variance_prediction(spec, h)
    standardized = (z - mean) / math.sqrt(var)
    header = {
        "experiment": "toy",
        "variant": spec.variant.value,
        "L": spec.L,
        "c": spec.c,
        "h": h.describe(),
        "trials": int(trials),
        "seed": int(seed),
        "window_radius": float(window),
    }
    if header_extra:
        header.update(header_extra)
    return ExperimentReport(header, z, counts, np.ones(trials, dtype=bool),
                            mean, var, standardized=standardized,
                            ks_threshold=ks_threshold)


# --- the n-direction averaging identity -------------------------------------


def direction_average_identity(matrix, n: int, linear=0.0j, constant=0.0):
    """Average of a quadratic form over the n-th roots of unity vs its Laplacian.

    Q(z) = [x y] A [x y]^T + Re(conj(linear) z) + constant.  Linear terms
    cancel in the average for n >= 2 and the constant is removed, so the
    returned lhs is the pure quadratic average; rhs = (1/4) Lap Q(0)
    = trace(A) / 2.  They agree exactly for n >= 3; n = 2 exposes the
    defect (the reason two-point clusters cannot mimic the Laplacian law).
    """
    if n < 2:
        raise ValueError("need n >= 2 directions")
    A = np.asarray(matrix, dtype=float)
    if A.shape != (2, 2) or abs(A[0, 1] - A[1, 0]) > 1e-14:
        raise ValueError("the quadratic form needs a symmetric 2x2 matrix")
    pts = np.exp(2j * math.pi * np.arange(n) / n)
    xy = np.stack([pts.real, pts.imag], axis=1)
    quad = np.einsum("ki,ij,kj->k", xy, A, xy)
    lin = (np.conj(complex(linear)) * pts).real
    lhs = float(np.mean(quad + lin + constant) - constant)
    rhs = float(np.trace(A) / 2.0)
    return {"lhs": lhs, "rhs": rhs, "matches": bool(abs(lhs - rhs) < 1e-12)}
