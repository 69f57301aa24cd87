"""Locating the random zeroes and certifying the count.

The root finder is a vectorized Aberth-Ehrlich simultaneous iteration with
companion-matrix eigenvalues as a fallback (O(n^2) sweeps instead of an
O(n^3) eigendecomposition, comfortable up to degree ~10^3).  Truncated
flat/hyperbolic samples routinely own a handful of spurious far-out roots
whose moduli exceed what double-precision Horner evaluation can reach, so
the solver works in a rescaled variable ``y = z / sigma`` anchored to the
disk that actually needs certified roots; iterates escaping ``|y| > 4`` are
parked on that circle and reported as uncertified outer ring, which is
irrelevant because the winding-number certificate only speaks about the
requested disk.

Newton polishing and residuals are measured on the normalized field (the
raw field has an exp(L|z|^2/2)-scale dynamic range across the flat domain).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (CertificationError, DegenerateSampleError, DomainError,
                     TruncationError)
from .models import Family, GafSample, ModelSpec

_TWO_PI = 2.0 * np.pi


class RegionKind(str, enum.Enum):
    FULL_SPHERE = "full-sphere"
    DISK = "disk"


@dataclass(frozen=True)
class Region:
    center: complex
    radius: float
    kind: RegionKind = RegionKind.DISK

    def __post_init__(self):
        object.__setattr__(self, "kind", RegionKind(self.kind))
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.kind is RegionKind.DISK and not self.radius > 0:
            raise ValueError("disk region needs a positive radius")

    @staticmethod
    def full_sphere() -> "Region":
        return Region(0.0j, math.inf, RegionKind.FULL_SPHERE)

    def validate_for(self, model: ModelSpec) -> None:
        if self.kind is RegionKind.FULL_SPHERE:
            if model.family is not Family.ELLIPTIC:
                raise DomainError("full-sphere regions exist only for the elliptic family")
            return
        if model.family is Family.HYPERBOLIC:
            if self.center != 0 or not self.radius < 1.0:
                raise DomainError("hyperbolic regions must be disks about 0 with radius < 1")


@dataclass(frozen=True)
class Certificate:
    count: int
    matches: bool
    contour_radius: float
    integer_distance: float


@dataclass(frozen=True)
class ZeroSet:
    zeros: np.ndarray
    multiplicities: np.ndarray
    region: Region
    residuals: np.ndarray
    certificate: Certificate

    @property
    def total_count(self) -> int:
        return int(self.multiplicities.sum())

    @property
    def certified(self) -> bool:
        return bool(self.certificate.matches)

    def to_json(self) -> str:
        reg = {
            "kind": self.region.kind.value,
            "center": [self.region.center.real, self.region.center.imag],
            "radius": self.region.radius,
        }
        obj = {
            "region": reg,
            "count": self.total_count,
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "multiplicities": [int(m) for m in self.multiplicities],
            "residual_max": float(self.residuals.max()) if self.residuals.size else 0.0,
            "certified": self.certified,
        }
        return json.dumps(obj)


# --- truncation ----------------------------------------------------------


def truncation_order(model: ModelSpec, radius: float, tol: float,
                     hard_cap: int = 10 ** 6) -> int:
    """Smallest N with RMS tail sum_{k>N} f_k(R)^2 < tol^2 over |z| <= R.

    Makes the a.s.-convergent series operational: the bound holds uniformly
    on the disk because each term is monotone in |z|.
    """
    if model.family is Family.ELLIPTIC:
        return model.degree
    if tol <= 0:
        raise TruncationError("tolerance must be positive")
    if radius <= 0:
        raise TruncationError("radius must be positive")
    if model.family is Family.HYPERBOLIC and radius >= 1.0:
        raise TruncationError("hyperbolic truncation needs radius < 1")
    L = model.intensity
    logr2 = 2.0 * math.log(radius)
    tol2 = tol * tol
    terms = []
    k = 0
    total = 0.0
    while True:
        if model.family is Family.FLAT:
            lt = k * (math.log(L) + logr2) - math.lgamma(k + 1.0)
            ratio = L * radius * radius / (k + 1.0)
        else:
            lt = (math.lgamma(L + k) - math.lgamma(L) - math.lgamma(k + 1.0)) + k * logr2
            ratio = (L + k) * radius * radius / (k + 1.0)
        t = math.exp(lt) if lt > -745.0 else 0.0
        terms.append(t)
        total += t
        if ratio < 1.0 and (t <= 1e-3 * tol2 or t <= 1e-30 * max(total, 1e-300)):
            geom = t * ratio / (1.0 - ratio)
            if geom <= 1e-3 * tol2:
                break
        if k >= hard_cap:
            raise TruncationError(f"truncation order would exceed the hard cap {hard_cap}")
        k += 1
    tail = terms[-1] * ratio / (1.0 - ratio)
    for n in range(len(terms) - 1, -1, -1):
        tail += terms[n]
        if tail >= tol2:
            # tail(n-1) >= tol^2 while tail(n) passed on the previous step
            if n > hard_cap:
                raise TruncationError(f"truncation order would exceed the hard cap {hard_cap}")
            return n
    return 0


# --- scaled polynomial utilities ----------------------------------------


def _scaled_coefficients(coeffs: np.ndarray, sigma: float):
    """Coefficients of p(sigma*y) / e^tau with unit max magnitude.

    Trailing coefficients that underflow after scaling are trimmed: their
    contribution inside the working disk is below 1e-300 of the leading
    scale, far under every tolerance used here.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    mag = np.abs(coeffs)
    safe = np.where(mag > 0, mag, 1.0)
    logmag = np.where(mag > 0, np.log(safe), -np.inf)
    k = np.arange(len(coeffs))
    logscaled = np.where(mag > 0, logmag + k * math.log(sigma), -np.inf)
    tau = float(np.max(logscaled))
    with np.errstate(under="ignore"):
        c = (coeffs / safe) * np.exp(logscaled - tau)
    nz = np.nonzero(np.abs(c))[0]
    if nz.size == 0:
        raise DegenerateSampleError("all coefficients vanish after scaling")
    return c[: nz[-1] + 1], tau


def _horner_many(c: np.ndarray, y: np.ndarray):
    """Value, derivative and magnitude sum of the scaled polynomial."""
    p = np.full_like(y, c[-1])
    dp = np.zeros_like(y)
    s = np.full(y.shape, abs(c[-1]))
    ay = np.abs(y)
    for j in range(len(c) - 2, -1, -1):
        dp = dp * y + p
        p = p * y + c[j]
        s = s * ay + abs(c[j])
    return p, dp, s


def _bini_initial(cmag: np.ndarray) -> np.ndarray:
    """Start points on circles read off the upper hull of (k, log|c_k|)."""
    logmag = np.where(cmag > 0, np.log(np.where(cmag > 0, cmag, 1.0)), -np.inf)
    n = len(logmag) - 1
    hull = []
    for k in range(n + 1):
        if logmag[k] == -np.inf:
            continue
        while len(hull) >= 2:
            (k1, v1), (k2, v2) = hull[-2], hull[-1]
            if (logmag[k] - v1) * (k2 - k1) >= (v2 - v1) * (k - k1):
                hull.pop()
            else:
                break
        hull.append((k, logmag[k]))
    y = np.empty(n, dtype=complex)
    pos = 0
    golden = 2.399963229728653
    for seg, ((k1, v1), (k2, v2)) in enumerate(zip(hull[:-1], hull[1:])):
        m = k2 - k1
        r = math.exp((v1 - v2) / m)
        ang = _TWO_PI * np.arange(m) / m + golden * seg + 0.2
        y[pos:pos + m] = r * np.exp(1j * ang)
        pos += m
    return y


def _aberth_core(c: np.ndarray, y_cap: float, tol: float = 5e-14,
                 maxiter: int = 160):
    """Aberth-Ehrlich on a normalized polynomial; park escapees at |y|=y_cap.

    Returns (y, done, outer).  ``done`` marks converged iterates (small step
    or backward-stable residual |p| <= 8 eps sum|c_k||y|^k); ``outer`` marks
    iterates that left the working disk and were frozen on its boundary.
    """
    cmag = np.abs(c)
    n = len(c) - 1
    y = _bini_initial(cmag)
    ay = np.abs(y)
    y = np.where(ay > y_cap, y * (y_cap / np.maximum(ay, 1e-300)), y)
    eps = np.finfo(float).eps
    done = np.zeros(n, dtype=bool)
    outer = np.zeros(n, dtype=bool)
    for _ in range(maxiter):
        p, dp, s = _horner_many(c, y)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            newton = p / dp
            diff = y[:, None] - y[None, :]
            np.fill_diagonal(diff, 1.0)
            repulsion = (1.0 / diff).sum(axis=1) - 1.0
            corr = newton / (1.0 - newton * repulsion)
        corr = np.where(np.isfinite(corr), corr, 0.25 * (np.abs(y) + 0.05))
        cm = np.abs(corr)
        lim = 0.4 * (1.0 + np.abs(y))
        corr = corr * np.where(cm > lim, lim / np.maximum(cm, 1e-300), 1.0)
        active = ~done & ~outer
        y = y - np.where(active, corr, 0.0)
        ay = np.abs(y)
        escaped = active & (ay > y_cap)
        y = np.where(escaped, y * (y_cap / np.maximum(ay, 1e-300)), y)
        outer |= escaped
        small = np.abs(corr) < tol * (1.0 + np.abs(y))
        stable = np.abs(p) <= 8 * eps * s
        done |= active & (small | stable)
        if not (~done & ~outer).any():
            break
    return y, done, outer


def _roots_in_disk(coeffs: np.ndarray, work_radius: float):
    """All roots with |z| <= work_radius, reliable to machine precision.

    Roots beyond the working disk are reported as parked markers only.  If
    the simultaneous iteration leaves unconverged iterates, fall back to the
    companion-matrix eigenvalues of the rescaled polynomial.
    """
    sigma = 1.25 * work_radius
    c, _tau = _scaled_coefficients(coeffs, sigma)
    if len(c) < 2:
        return np.empty(0, dtype=complex)
    y, done, outer = _aberth_core(c, y_cap=4.0)
    if (~done & ~outer).any():
        y = np.roots(c[::-1])
        return sigma * y
    return sigma * y[done]


def _newton_polish(coeffs: np.ndarray, roots: np.ndarray, sigma: float,
                   rounds: int = 3) -> np.ndarray:
    c, _ = _scaled_coefficients(coeffs, sigma)
    y = roots / sigma
    for _ in range(rounds):
        p, dp, _s = _horner_many(c, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = p / dp
        step = np.where(np.isfinite(step), step, 0.0)
        y = y - step
    return sigma * y


def _normalized_residuals(sample: GafSample, roots: np.ndarray) -> np.ndarray:
    """|w_L| at the roots, evaluated through the rescaled representation."""
    if roots.size == 0:
        return np.zeros(0)
    sigma = max(float(np.max(np.abs(roots))), 1e-12)
    c, tau = _scaled_coefficients(sample.coefficients, sigma)
    p, _dp, _s = _horner_many(c, roots / sigma)
    log_w = np.log(np.maximum(np.abs(p), 1e-300)) + tau - sample.model.log_norm_psi(roots)
    return np.where(np.abs(p) == 0.0, 0.0, np.exp(log_w))


def _merge_multiplicities(roots: np.ndarray, spacing: float):
    """Merge numerically coincident roots (probability-zero event; the
    numerics still need a rule).  Returns (locations, multiplicities)."""
    if roots.size == 0:
        return roots, np.zeros(0, dtype=int)
    tol = 1e-9 * spacing
    order = np.lexsort((roots.imag, roots.real))
    sorted_roots = roots[order]
    locs = [sorted_roots[0]]
    mult = [1]
    for z in sorted_roots[1:]:
        if abs(z - locs[-1]) <= tol:
            locs[-1] = (locs[-1] * mult[-1] + z) / (mult[-1] + 1)
            mult[-1] += 1
        else:
            locs.append(z)
            mult.append(1)
    return np.array(locs), np.array(mult, dtype=int)


# --- winding-number counting ---------------------------------------------


def _contour_count_raw(coeffs: np.ndarray, center: complex, radius: float,
                       expected: int, max_nodes: int = 1 << 19):
    """(1/2 pi i) closed-circle integral of psi'/psi by the trapezoid rule.

    Node count starts at 64*(expected+1) and doubles until two successive
    estimates agree to 0.02; the trapezoid rule is spectrally accurate on
    periodic integrands so this converges fast once nodes resolve the
    nearest root.
    """
    sigma = 1.25 * (abs(center) + radius)
    c, _tau = _scaled_coefficients(coeffs, sigma)
    m = 64 * (max(int(expected), 0) + 1)
    m = max(256, 1 << int(math.ceil(math.log2(m))))
    prev = None
    while m <= max_nodes:
        theta = np.linspace(0.0, _TWO_PI, m, endpoint=False)
        z = center + radius * np.exp(1j * theta)
        p, dp, _s = _horner_many(c, z / sigma)
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = dp / p * ((z - center) / sigma)
        if not np.all(np.isfinite(integrand)):
            raise CertificationError("field vanishes on a contour node")
        est = float(np.mean(integrand).real)
        if prev is not None and abs(est - prev) < 0.02:
            return est
        prev = est
        m *= 2
    raise CertificationError("contour integral did not stabilize; root too close to the contour")


def count_zeros_argument_principle(sample: GafSample, region: Region):
    """Certified zero count inside the region's circle.

    Returns (count, distance) where distance is how far the raw contour
    integral sat from the returned integer; raw values farther than 0.1
    from any integer raise a contour-too-close error.
    """
    region.validate_for(sample.model)
    if region.kind is RegionKind.FULL_SPHERE:
        raise DomainError("winding-number counting needs a finite circle")
    if sample.truncation is not None:
        reach = abs(region.center) + region.radius
        if reach > sample.truncation.radius * (1 + 1e-9):
            raise DomainError("region exceeds the sample's certified radius")
    expected = sample.model.intensity * region.radius ** 2
    raw = _contour_count_raw(sample.coefficients, region.center, region.radius, int(expected))
    nearest = int(round(raw))
    dist = abs(raw - nearest)
    if dist > 0.1:
        raise CertificationError(
            f"contour integral {raw:.4f} is not near an integer; a root sits on the contour")
    return nearest, dist


# --- region / full-sphere drivers ----------------------------------------


def _pick_certification_radius(moduli: np.ndarray, radius: float, slack: float):
    """Radius in a root-modulus gap within [radius, radius*(1+slack)].

    Placing the certification circle mid-gap keeps every root away from the
    contour, so the trapezoid count stabilizes in one or two doublings.
    """
    lo, hi = radius, radius * (1.0 + slack)
    inside = np.sort(moduli[(moduli > lo) & (moduli < hi)])
    cand = np.concatenate(([lo], inside, [hi]))
    gaps = np.diff(cand)
    gi = int(np.argmax(gaps))
    return 0.5 * (cand[gi] + cand[gi + 1]), gaps[gi]


def find_zeros_in_region(sample: GafSample, region: Region,
                         max_retries: int = 5) -> ZeroSet:
    """All zeroes of the sample inside the region, with a count certificate.

    The returned region carries the certification radius actually used: the
    requested radius may be enlarged by up to 2% to place the contour in a
    gap between root moduli (test functions are supported strictly inside
    the requested disk, so the enlargement never changes a linear
    statistic).
    """
    region.validate_for(sample.model)
    if region.kind is RegionKind.FULL_SPHERE:
        return find_zeros_elliptic(sample)
    if sample.truncation is not None:
        reach = abs(region.center) + region.radius * 1.03
        if reach > sample.truncation.radius * (1 + 1e-9):
            raise DomainError("region (plus certification slack) exceeds the certified radius")

    work_radius = abs(region.center) + region.radius * 1.03
    all_roots = _roots_in_disk(sample.coefficients, work_radius)
    moduli = np.abs(all_roots - region.center)

    slack = 0.02
    last_err = None
    for _attempt in range(max_retries):
        r_cert, gap = _pick_certification_radius(moduli, region.radius, slack)
        inside = all_roots[np.abs(all_roots - region.center) <= r_cert]
        inside = _newton_polish(sample.coefficients, inside,
                                sigma=max(abs(region.center) + r_cert, 1e-12))
        spacing = r_cert / math.sqrt(inside.size + 1.0)
        locs, mult = _merge_multiplicities(inside, spacing)
        total = int(mult.sum())
        cert_region = Region(region.center, r_cert, RegionKind.DISK)
        try:
            count, dist = count_zeros_argument_principle(sample, cert_region)
        except CertificationError as err:
            last_err = err
            slack *= 1.6
            continue
        certificate = Certificate(count=count, matches=(count == total),
                                  contour_radius=r_cert, integer_distance=dist)
        if certificate.matches:
            residuals = _normalized_residuals(sample, locs)
            return ZeroSet(locs, mult, cert_region, residuals, certificate)
        last_err = CertificationError(
            f"located {total} roots but the contour counts {count} inside radius {r_cert:.6g}")
        slack *= 1.6
    raise last_err if last_err is not None else CertificationError("certification failed")


def find_zeros_elliptic(sample: GafSample) -> ZeroSet:
    """All L zeroes of an elliptic sample, certified against the degree.

    A leading coefficient at relative machine-zero would hide a zero at the
    antipode of the origin; that is a probability-zero event and is surfaced
    as an explicit degeneracy error rather than assigned a location.
    """
    model = sample.model
    if model.family is not Family.ELLIPTIC:
        raise DomainError("find_zeros_elliptic needs an elliptic sample")
    coeffs = sample.coefficients
    L = model.degree
    mag = np.abs(coeffs)
    if mag[-1] <= 1e-14 * mag.max():
        raise DegenerateSampleError(
            "leading coefficient vanishes to machine precision (zero at infinity)")

    roots = _elliptic_all_roots(coeffs)
    if roots.size != L:
        raise DegenerateSampleError(
            f"root finder returned {roots.size} roots for degree {L}")
    roots = _newton_polish(coeffs, roots, sigma=max(float(np.max(np.abs(roots))), 1.0))

    spacing = 1.0 / math.sqrt(L)
    locs, mult = _merge_multiplicities(roots, spacing)
    r_enclose = 1.5 * float(np.max(np.abs(locs))) + 1.0
    cert_region = Region(0.0j, r_enclose, RegionKind.DISK)
    count, dist = count_zeros_argument_principle(sample, cert_region)
    certificate = Certificate(count=count, matches=(count == int(mult.sum())),
                              contour_radius=r_enclose, integer_distance=dist)
    if not certificate.matches:
        raise CertificationError(
            f"elliptic census mismatch: located {int(mult.sum())}, contour says {count}")
    residuals = _normalized_residuals(sample, locs)
    return ZeroSet(locs, mult, Region.full_sphere(), residuals, certificate)


def _elliptic_all_roots(coeffs: np.ndarray) -> np.ndarray:
    """Every root of the elliptic polynomial.

    Direct simultaneous iteration when the rescaled coefficients stay inside
    double range; otherwise split the sphere: roots in the closed unit disk
    from p, roots outside from the reversed polynomial q(w) = w^L p(1/w)
    (the elliptic coefficient law is inversion-symmetric, so q is another
    sample of the same model).
    """
    mag = np.abs(coeffs)
    cmag = np.where(mag > 0, mag, np.min(mag[mag > 0]))
    y0 = _bini_initial(cmag)
    sigma = float(np.max(np.abs(y0)))
    k = np.arange(len(coeffs))
    span = np.log(cmag) + k * math.log(max(sigma, 1e-300))
    if span.max() - span.min() < 600.0:
        c, _tau = _scaled_coefficients(coeffs, sigma)
        y, done, outer = _aberth_core(c, y_cap=8.0)
        if not outer.any() and done.all():
            return sigma * y
        return sigma * np.roots(c[::-1])
    inner = _roots_in_disk(coeffs, 1.0)
    inner = inner[np.abs(inner) <= 1.0]
    outer_w = _roots_in_disk(coeffs[::-1], 1.0)
    outer_w = outer_w[np.abs(outer_w) < 1.0]
    outer_pts = 1.0 / outer_w[np.abs(outer_w) > 0]
    return np.concatenate([inner, outer_pts])
