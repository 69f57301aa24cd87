"""The three invariant Gaussian-analytic-function models.

A model is a symmetry family (elliptic / flat / hyperbolic) together with an
intensity ``L`` controlling the mean number of zeroes per unit invariant
area.  The random field is

    psi(z) = sum_k  zeta_k * f_k * z^k

with i.i.d. standard complex Gaussian ``zeta_k`` and deterministic magnitude
factors

    elliptic:    f_k = sqrt( L (L-1) ... (L-k+1) / k! ),  k = 0..L
    flat:        f_k = sqrt( L^k / k! )
    hyperbolic:  f_k = sqrt( L (L+1) ... (L+k-1) / k! )

The elliptic field is a degree-L polynomial on the sphere (L must be a
positive integer); the flat field is entire; the hyperbolic field is analytic
in the unit disk.  Factors are computed in log space (``gammaln``) so that
intensities up to ~1e4 do not overflow; ``sqrt(binom(L, k))`` alone would
overflow double precision near L ~ 1030.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, TruncationError
from .rng import ComplexGaussianStream


class Family(str, enum.Enum):
    ELLIPTIC = "elliptic"
    FLAT = "flat"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class ModelSpec:
    """Symmetry family plus intensity.

    The domain is the full sphere C+{inf} (elliptic), the plane (flat), or
    the open unit disk (hyperbolic).
    """

    family: Family
    intensity: float

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        L = self.intensity
        if not (L > 0):
            raise ValueError("intensity must be positive")
        if fam is Family.ELLIPTIC:
            if L != int(L):
                raise ValueError("elliptic intensity must be a positive integer")
            object.__setattr__(self, "intensity", float(int(L)))
        else:
            object.__setattr__(self, "intensity", float(L))

    @property
    def degree(self) -> int:
        """Exact polynomial degree (elliptic only)."""
        if self.family is not Family.ELLIPTIC:
            raise ValueError("only the elliptic field has a finite degree")
        return int(self.intensity)

    def domain_contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.family is Family.HYPERBOLIC:
            return np.abs(z) < 1.0
        return np.isfinite(z.real) & np.isfinite(z.imag)

    def require_in_domain(self, z) -> None:
        if not np.all(self.domain_contains(z)):
            raise DomainError(f"point outside the {self.family.value} domain")

    # -- deterministic coefficient factors -------------------------------

    def log_coefficient_factors(self, n: int) -> np.ndarray:
        """log f_k for k = 0..n (natural log of the magnitude factors)."""
        L = self.intensity
        k = np.arange(n + 1)
        if self.family is Family.ELLIPTIC:
            if n > int(L):
                raise ValueError("elliptic factors exist only for k <= L")
            return 0.5 * (gammaln(L + 1) - gammaln(L + 1 - k) - gammaln(k + 1.0))
        if self.family is Family.FLAT:
            return 0.5 * (k * math.log(L) - gammaln(k + 1.0))
        return 0.5 * (gammaln(L + k) - gammaln(L) - gammaln(k + 1.0))

    def coefficient_factors(self, n: int) -> np.ndarray:
        with np.errstate(under="ignore"):
            return np.exp(self.log_coefficient_factors(n))

    # -- pointwise field scale and covariance ----------------------------

    def norm_psi(self, z) -> np.ndarray:
        """Pointwise field scale ||psi(z)|| = sqrt(E |psi(z)|^2)."""
        self.require_in_domain(z)
        a = np.abs(np.asarray(z, dtype=complex)) ** 2
        L = self.intensity
        if self.family is Family.ELLIPTIC:
            return (1.0 + a) ** (L / 2.0)
        if self.family is Family.FLAT:
            return np.exp(L * a / 2.0)
        return (1.0 - a) ** (-L / 2.0)

    def log_norm_psi(self, z) -> np.ndarray:
        a = np.abs(np.asarray(z, dtype=complex)) ** 2
        L = self.intensity
        if self.family is Family.ELLIPTIC:
            return (L / 2.0) * np.log1p(a)
        if self.family is Family.FLAT:
            return L * a / 2.0
        return -(L / 2.0) * np.log1p(-a)

    def rho(self, z1, z2) -> np.ndarray:
        """Normalized covariance of the normalized field, rho(z,z) = 1.

        Principal branch for non-integer powers; every downstream formula
        depends on |rho| only, so the branch choice is observationally
        irrelevant.
        """
        self.require_in_domain(z1)
        self.require_in_domain(z2)
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        L = self.intensity
        if self.family is Family.FLAT:
            return np.exp(L * (z1 * np.conj(z2)) - L * (np.abs(z1) ** 2 + np.abs(z2) ** 2) / 2.0)
        if self.family is Family.ELLIPTIC:
            num = 1.0 + z1 * np.conj(z2)
            den = (1.0 + np.abs(z1) ** 2) * (1.0 + np.abs(z2) ** 2)
            return np.exp(L * np.log(num.astype(complex)) - (L / 2.0) * np.log(den))
        num = 1.0 - z1 * np.conj(z2)
        den = (1.0 - np.abs(z1) ** 2) * (1.0 - np.abs(z2) ** 2)
        return np.exp(-L * np.log(num.astype(complex)) + (L / 2.0) * np.log(den))

    def abs_rho(self, z1, z2) -> np.ndarray:
        """|rho(z1, z2)| evaluated without cancellation: exp of a stable log."""
        return np.exp(-self.neg_log_abs_rho(z1, z2))

    def neg_log_abs_rho(self, z1, z2) -> np.ndarray:
        """-log |rho(z1, z2)|, accurate also for nearly coincident points.

        For all three families  |rho| = exp((L/2) * log1p(-|z1-z2|^2 / B))
        with B the family's kernel denominator; the flat case is the formal
        limit and is handled directly.
        """
        self.require_in_domain(z1)
        self.require_in_domain(z2)
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        L = self.intensity
        d2 = np.abs(z1 - z2) ** 2
        if self.family is Family.FLAT:
            return L * d2 / 2.0
        if self.family is Family.ELLIPTIC:
            B = (1.0 + np.abs(z1) ** 2) * (1.0 + np.abs(z2) ** 2)
            return -(L / 2.0) * np.log1p(-d2 / B)
        B = np.abs(1.0 - z1 * np.conj(z2)) ** 2
        return (L / 2.0) * np.log1p(-d2 / B)

    def invariant_measure_density(self, z) -> np.ndarray:
        """Density of the invariant measure dm* against planar Lebesgue measure."""
        self.require_in_domain(z)
        a = np.abs(np.asarray(z, dtype=complex)) ** 2
        if self.family is Family.FLAT:
            return np.ones_like(a)
        if self.family is Family.ELLIPTIC:
            return (1.0 + a) ** -2.0
        return (1.0 - a) ** -2.0

    def invariant_laplacian_factor(self, z) -> np.ndarray:
        """Conformal factor turning the planar Laplacian into the invariant one."""
        self.require_in_domain(z)
        a = np.abs(np.asarray(z, dtype=complex)) ** 2
        if self.family is Family.FLAT:
            return np.ones_like(a)
        if self.family is Family.ELLIPTIC:
            return (1.0 + a) ** 2.0
        return (1.0 - a) ** 2.0


@dataclass(frozen=True)
class TruncationInfo:
    """Certificate for a truncated series: order, radius, RMS tail bound."""

    order: int
    radius: float
    tail_bound: float


@dataclass(frozen=True)
class GafSample:
    """One realization: the coefficient vector with factors multiplied in."""

    model: ModelSpec
    coefficients: np.ndarray
    truncation: TruncationInfo | None = None
    seed: int | None = None
    stream_index: int | None = None

    @property
    def exact(self) -> bool:
        return self.truncation is None

    def certified_radius(self) -> float:
        if self.truncation is not None:
            return self.truncation.radius
        return math.inf

    def evaluate(self, z) -> np.ndarray:
        """Horner evaluation of the stored polynomial.

        For truncated samples the result differs from the true random series
        by at most the stored RMS tail bound for |z| <= radius.
        """
        self.model.require_in_domain(z)
        z = np.asarray(z, dtype=complex)
        if self.truncation is not None and np.any(np.abs(z) > self.truncation.radius * (1 + 1e-12)):
            raise DomainError("evaluation outside the certified truncation radius")
        out = np.zeros_like(z)
        for c in self.coefficients[::-1]:
            out = out * z + c
        return out

    def evaluate_with_derivative(self, z) -> tuple[np.ndarray, np.ndarray]:
        self.model.require_in_domain(z)
        z = np.asarray(z, dtype=complex)
        p = np.zeros_like(z)
        dp = np.zeros_like(z)
        for c in self.coefficients[::-1]:
            dp = dp * z + p
            p = p * z + c
        return p, dp

    def normalized_field(self, z) -> np.ndarray:
        """psi(z) / ||psi(z)||; standard complex Gaussian at each fixed z."""
        return self.evaluate(z) / self.model.norm_psi(z)

    def to_json(self) -> str:
        tr = self.truncation
        obj = {
            "family": self.model.family.value,
            "L": self.model.intensity,
            "seed": self.seed,
            "stream": self.stream_index,
            "N": len(self.coefficients) - 1 if tr is None else tr.order,
            "R": None if tr is None else tr.radius,
            "tail_bound": None if tr is None else tr.tail_bound,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coefficients],
        }
        return json.dumps(obj)

    @staticmethod
    def from_json(text: str) -> "GafSample":
        obj = json.loads(text)
        model = ModelSpec(Family(obj["family"]), obj["L"])
        coeffs = np.array([complex(re, im) for re, im in obj["coefficients"]])
        tr = None
        if obj.get("R") is not None:
            tr = TruncationInfo(order=int(obj["N"]), radius=float(obj["R"]),
                                tail_bound=float(obj["tail_bound"]))
        return GafSample(model, coeffs, tr, obj.get("seed"), obj.get("stream"))


def sample_coefficients(model: ModelSpec, stream: ComplexGaussianStream,
                        truncation_order="exact") -> GafSample:
    """Draw one coefficient vector; deterministic given the stream key.

    Elliptic accepts only ``"exact"`` (the field is a degree-L polynomial);
    flat and hyperbolic require a finite truncation order >= 1, and the
    resulting sample carries the truncation certificate computed by
    :func:`caz.zeros.truncation_order` / :func:`truncation_tail_rms`.
    """
    if model.family is Family.ELLIPTIC:
        if truncation_order != "exact":
            raise TruncationError("the elliptic field is exact; pass truncation_order='exact'")
        n = model.degree
        zeta = stream.draw(n + 1)
        coeffs = zeta * model.coefficient_factors(n)
        return GafSample(model, coeffs, None, stream.seed, stream.stream_index)
    if truncation_order == "exact":
        raise TruncationError("flat/hyperbolic samples require a finite truncation order")
    n = int(truncation_order)
    if n < 0:
        raise TruncationError("truncation order must be >= 0")
    zeta = stream.draw(n + 1)
    coeffs = zeta * model.coefficient_factors(n)
    radius = _default_certificate_radius(model, n)
    tail = truncation_tail_rms(model, n, radius)
    info = TruncationInfo(order=n, radius=radius, tail_bound=tail)
    return GafSample(model, coeffs, info, stream.seed, stream.stream_index)


def sample_with_radius(model: ModelSpec, stream: ComplexGaussianStream,
                       radius: float, tol: float = 1e-8) -> GafSample:
    """Sample truncated so the RMS tail over |z| <= radius is below tol."""
    from .zeros import truncation_order  # local import to avoid a cycle

    n = truncation_order(model, radius, tol)
    zeta = stream.draw(n + 1)
    coeffs = zeta * model.coefficient_factors(n)
    info = TruncationInfo(order=n, radius=float(radius),
                          tail_bound=truncation_tail_rms(model, n, radius))
    return GafSample(model, coeffs, info, stream.seed, stream.stream_index)


def deterministic_sample(model: ModelSpec, raw_coefficients,
                         radius: float | None = None) -> GafSample:
    """Wrap an explicit coefficient vector (test vectors, serialized data)."""
    coeffs = np.asarray(raw_coefficients, dtype=complex)
    if model.family is Family.ELLIPTIC:
        if len(coeffs) != model.degree + 1:
            raise ValueError("elliptic coefficient vector must have length L+1")
        return GafSample(model, coeffs, None)
    n = len(coeffs) - 1
    r = float(radius) if radius is not None else _default_certificate_radius(model, n)
    info = TruncationInfo(order=n, radius=r, tail_bound=truncation_tail_rms(model, n, r))
    return GafSample(model, coeffs, info)


def _default_certificate_radius(model: ModelSpec, n: int) -> float:
    """Largest radius at which an order-n truncation keeps an RMS tail <= 1e-6."""
    lo, hi = 0.0, 1.0 if model.family is Family.HYPERBOLIC else math.sqrt((n + 1) / model.intensity) + 1.0
    for _ in range(80):
        mid = (lo + hi) / 2.0
        if truncation_tail_rms(model, n, mid) <= 1e-6:
            lo = mid
        else:
            hi = mid
    return lo


def truncation_tail_rms(model: ModelSpec, n: int, radius: float) -> float:
    """sqrt( sum_{k>n} f_k^2 radius^{2k} ), the RMS of the discarded tail.

    Summed in log space until terms are negligible; for the hyperbolic family
    the term ratio tends to radius^2 < 1 so the remainder is bounded by a
    geometric tail which is added on top.
    """
    if model.family is Family.ELLIPTIC:
        return 0.0
    if radius <= 0:
        return 0.0
    if model.family is Family.HYPERBOLIC and radius >= 1.0:
        return math.inf
    L = model.intensity
    logr2 = 2.0 * math.log(radius)
    total = 0.0
    k = n + 1
    # flat: log term = k log(L r^2) - lgamma(k+1); hyperbolic adds the rising factorial
    while True:
        if model.family is Family.FLAT:
            lt = k * (math.log(L) + logr2) - math.lgamma(k + 1.0)
            ratio = L * radius * radius / (k + 1.0)
        else:
            lt = (math.lgamma(L + k) - math.lgamma(L) - math.lgamma(k + 1.0)) + k * logr2
            ratio = (L + k) * radius * radius / (k + 1.0)
        t = math.exp(lt) if lt > -745.0 else 0.0
        total += t
        if ratio < 1.0 and t <= 1e-30 * max(total, 1e-300):
            # geometric bound on everything past k
            total += t * ratio / (1.0 - ratio) if ratio < 1.0 else 0.0
            break
        if k > n + 2_000_000:  # pragma: no cover - defensive
            break
        k += 1
    return math.sqrt(total)


# --- symmetry group ------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    """One symmetry of a family, parametrized as in the Moebius tables.

    elliptic:    z -> (a z + b) / (-conj(b) z + conj(a)),  |a|^2 + |b|^2 = 1
    flat:        z -> a z + b,                              |a| = 1
    hyperbolic:  z -> (a z + b) / ( conj(b) z + conj(a)),  |a|^2 - |b|^2 = 1
    """

    family: Family
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        a, b = complex(self.a), complex(self.b)
        if self.family is Family.ELLIPTIC:
            ok = abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) < 1e-9
        elif self.family is Family.FLAT:
            ok = abs(abs(a) - 1.0) < 1e-9
        else:
            ok = abs(abs(a) ** 2 - abs(b) ** 2 - 1.0) < 1e-9
        if not ok:
            raise ValueError(f"parameters violate the {self.family.value} group constraint")

    @staticmethod
    def identity(family: Family) -> "GroupElement":
        return GroupElement(family, 1.0 + 0.0j, 0.0j)

    def apply(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.family is Family.FLAT:
            return self.a * z + self.b
        if self.family is Family.ELLIPTIC:
            return (self.a * z + self.b) / (-np.conj(self.b) * z + np.conj(self.a))
        return (self.a * z + self.b) / (np.conj(self.b) * z + np.conj(self.a))


def phase_multiplier(model: ModelSpec, g: GroupElement, z) -> np.ndarray:
    """Unit-modulus u_g with rho(g z1, g z2) = u_g(z1) conj(u_g(z2)) rho(z1, z2).

    Flat elements have the closed form u_g(z) = exp(i L Im(a z conj(b))).
    For the other families u_g is defined through the kernel ratio
    rho(g z, g 0) / rho(z, 0), gauged so that u_g(0) = 1; for non-integer
    hyperbolic intensities the principal branch can wrap on extreme group
    elements, which only shifts u_g by a global phase.
    """
    if g.family is not model.family:
        raise ValueError("group element family does not match the model")
    z = np.asarray(z, dtype=complex)
    if model.family is Family.FLAT:
        return np.exp(1j * model.intensity * (g.a * z * np.conj(g.b)).imag)
    num = model.rho(g.apply(z), g.apply(np.zeros_like(z)))
    den = model.rho(z, np.zeros_like(z))
    u = num / den
    mag = np.abs(u)
    if np.any(mag == 0):
        raise DomainError("kernel ratio undefined at an antipodal pair")
    return u / mag
