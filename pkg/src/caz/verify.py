"""Tiered acceptance suite: the criteria the package must hold itself to.

Checks are grouped by cost:

  exact    deterministic combinatorics and closed-form identities, < 1 s
  fast-mc  quadrature constants, short Monte Carlo, geometry sweeps, minutes
  full-mc  the long Monte Carlo experiments behind the variance law and
           the normality verdict

Levels are cumulative.  Every check returns a result row with its measured
numbers so a failed gate shows what was measured, not just a flag.  The
same rows back both the command-line ``caz verify`` gate and the pytest
acceptance module.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .diagrams import (correlated_field_samples, count_diagrams,
                       cyclic_diagram, enumerate_diagrams,
                       enumerate_pair_partitions,
                       exact_moment_polynomial_functional,
                       irregular_bound_check, pair_partition_count)
from .geometry import (edelman_kostlan_density, embedding_inner_product,
                       fubini_study_distance, induced_metric_ratio,
                       invariant_line_element)
from .models import Family, GafSample, ModelSpec, TruncationInfo
from .report import variance_standard_error
from .rng import ComplexGaussianStream
from .stats import (expected_linear_statistic, run_normality_experiment)
from .testfuncs import TestFunction
from .toys import ToySpec, ToyVariant, matched_scatter_amplitude, \
    run_toy_experiment, toy_variance_prediction
from .util import parallel_map
from .wick import (kappa, kappa_partial, log_abs_gaussian_variance,
                   parseval_partial, parseval_tail, wick_log_coeff,
                   wick_log_coeff_pattern)
from .zeros import Region, find_zeros_in_region, truncation_order
from .models import truncation_tail_rms

LEVELS = ("exact", "fast-mc", "full-mc")

KAPPA_REGRESSION = 0.023914162251948  # pinned after the quadrature first produced it
ZETA3_16PI = 1.2020569031595943 / (16.0 * math.pi)


@dataclass
class CheckResult:
    check_id: str
    description: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0


def _result(check_id, description, passed, details, t0):
    return CheckResult(check_id, description, bool(passed), details,
                       time.perf_counter() - t0)


# --- AC-1: exact combinatorics --------------------------------------------


def check_ac1() -> CheckResult:
    t0 = time.perf_counter()
    details = {}
    ok = True
    for a in range(1, 6):
        cnt = count_diagrams((a, a))
        details[f"two_block_{a}"] = cnt
        ok &= cnt == math.factorial(a) ** 2
    for a in range(1, 4):
        ok &= len(enumerate_diagrams((a, a))) == math.factorial(a) ** 2
    for p in (2, 4, 6, 8):
        cnt = pair_partition_count(p)
        details[f"pairings_{p}"] = cnt
        expected = 1
        for m in range(p - 1, 0, -2):
            expected *= m
        ok &= cnt == expected == len(enumerate_pair_partitions(p))
    ok &= count_diagrams((1, 2)) == 0 and enumerate_diagrams((1, 2)) == []
    ok &= count_diagrams((3, 1, 1)) == 0 and enumerate_diagrams((3, 1, 1)) == []
    details["gamma_1_2"] = count_diagrams((1, 2))
    details["gamma_3_1_1"] = count_diagrams((3, 1, 1))
    return _result("AC-1", "matching counts, pairing counts, empty classes",
                   ok, details, t0)


# --- AC-2: chaos coefficients and kappa ------------------------------------


def check_ac2() -> CheckResult:
    t0 = time.perf_counter()
    worst = 0.0
    for a in range(1, 21):
        worst = max(worst, abs(wick_log_coeff(a) - wick_log_coeff_pattern(a)))
    var_quad = log_abs_gaussian_variance()
    parseval = parseval_partial(2000) + parseval_tail(2000)
    kap = kappa()
    partials = [kappa_partial(order) for order in (1, 2, 4, 8)]
    increasing = all(b > a for a, b in zip(partials, partials[1:]))
    details = {
        "coeff_worst_abs_err": worst,
        "parseval_sum": parseval,
        "log_variance_quadrature": var_quad,
        "parseval_defect": abs(parseval - var_quad),
        "kappa": kap,
        "kappa_vs_closed_form": abs(kap - ZETA3_16PI),
        "kappa_vs_regression": abs(kap - KAPPA_REGRESSION),
        "kappa_partials": partials,
        "kappa_lower_bound": 1.0 / (16.0 * math.pi),
    }
    ok = (worst <= 1e-10
          and abs(parseval - var_quad) <= 1e-8
          and abs(var_quad - math.pi ** 2 / 24.0) <= 1e-10
          and abs(kap - ZETA3_16PI) <= 1e-10
          and abs(kap - KAPPA_REGRESSION) <= 1e-12
          and increasing
          and partials[0] >= 1.0 / (16.0 * math.pi) - 1e-12)
    return _result("AC-2", "chaos coefficients, Parseval, kappa", ok, details, t0)


# --- shared Monte Carlo trial machinery -------------------------------------


@dataclass(frozen=True)
class _CountPlan:
    model: ModelSpec
    trunc: TruncationInfo
    region: Region
    count_radius: float
    seed: int


def _count_trial(args):
    plan, trial = args
    stream = ComplexGaussianStream(plan.seed, trial)
    zeta = stream.draw(plan.trunc.order + 1)
    coeffs = zeta * plan.model.coefficient_factors(plan.trunc.order)
    sample = GafSample(plan.model, coeffs, plan.trunc, plan.seed, trial)
    zs = find_zeros_in_region(sample, plan.region)
    inside = int(np.sum((np.abs(zs.zeros - 0.0) <= plan.count_radius)
                        * zs.multiplicities))
    return (inside, zs.certified)


def _disk_count_run(model, count_radius, trials, seed, workers):
    trunc_radius = count_radius * 1.3
    order = truncation_order(model, trunc_radius, 1e-8)
    trunc = TruncationInfo(order, trunc_radius,
                           truncation_tail_rms(model, order, trunc_radius))
    region = Region(0.0j, count_radius * 1.05)
    plan = _CountPlan(model, trunc, region, count_radius, seed)
    rows = parallel_map(_count_trial, [(plan, t) for t in range(trials)], workers)
    counts = np.array([r[0] for r in rows], dtype=float)
    certified = all(r[1] for r in rows)
    return counts, certified


# --- AC-3: fast Monte Carlo censuses ----------------------------------------


def check_ac3(seed: int = 20240, workers=None) -> CheckResult:
    t0 = time.perf_counter()
    h = TestFunction.bump(0.0j, 1.0, 3)
    rep = run_normality_experiment(ModelSpec(Family.ELLIPTIC, 20), h, 2000,
                                   seed, workers=workers)
    emp = rep.empirical()
    se = math.sqrt(emp["variance"] / rep.trials)
    mean_ok = abs(emp["mean"] - rep.predicted_mean) <= 3.0 * se
    census_ok = bool(np.all(rep.zero_counts == 20)) and bool(np.all(rep.certified))

    counts, certified = _disk_count_run(ModelSpec(Family.FLAT, 50.0), 1.0,
                                        2000, seed + 1, workers)
    target = 50.0 * 1.0 ** 2
    count_se = counts.std(ddof=1) / math.sqrt(counts.size)
    count_ok = abs(counts.mean() - target) <= 3.0 * count_se and certified
    details = {
        "elliptic_mean": emp["mean"], "elliptic_predicted": rep.predicted_mean,
        "elliptic_se": se, "elliptic_all_20": census_ok,
        "flat_count_mean": counts.mean(), "flat_count_target": target,
        "flat_count_se": count_se,
    }
    return _result("AC-3", "elliptic census and flat disk-count means",
                   mean_ok and census_ok and count_ok, details, t0)


# --- AC-4 / AC-5 / AC-8: the variance law experiments -----------------------


class SharedRuns:
    """Caches the expensive experiment reports the criteria share."""

    def __init__(self, seed: int = 20240, workers=None):
        self.seed = seed
        self.workers = workers
        self._cache = {}

    def flat_normality(self, L: float):
        key = ("flat", L)
        if key not in self._cache:
            h = TestFunction.bump(0.0j, 1.0, 3)
            self._cache[key] = run_normality_experiment(
                ModelSpec(Family.FLAT, L), h, 2000, self.seed + int(L),
                workers=self.workers)
        return self._cache[key]

    def toy(self, variant: ToyVariant, L: float, c: float):
        key = ("toy", variant, L, c)
        if key not in self._cache:
            h = TestFunction.bump(0.0j, 1.0, 3)
            spec = ToySpec(variant, L, c)
            self._cache[key] = run_toy_experiment(spec, h, 5000,
                                                  self.seed + 7,
                                                  workers=self.workers)
        return self._cache[key]


def check_ac4(shared: SharedRuns) -> CheckResult:
    t0 = time.perf_counter()
    rep = shared.flat_normality(100.0)
    emp = rep.empirical()
    std = rep.standardized_summary()
    ratio = emp["variance"] / rep.predicted_variance
    ks_scaled = rep.ks_scaled()
    skew_limit = 4.0 * math.sqrt(6.0 / rep.trials)
    details = {
        "variance_ratio": ratio,
        "ks_scaled": ks_scaled,
        "skewness": std["skewness"],
        "skew_limit": skew_limit,
        "mean": emp["mean"],
        "predicted_mean": rep.predicted_mean,
    }
    ok = (0.85 <= ratio <= 1.15 and ks_scaled < rep.ks_threshold
          and abs(std["skewness"]) < skew_limit)
    return _result("AC-4", "flat L=100 variance ratio, KS verdict, skewness",
                   ok, details, t0)


def check_ac5(shared: SharedRuns) -> CheckResult:
    t0 = time.perf_counter()
    v50 = shared.flat_normality(50.0).empirical()["variance"]
    v100 = shared.flat_normality(100.0).empirical()["variance"]
    ratio = v50 / v100
    ok = 1.7 <= ratio <= 2.3
    return _result("AC-5", "variance halves when L doubles (flat)", ok,
                   {"var_50": v50, "var_100": v100, "ratio": ratio}, t0)


def check_ac6(seed: int = 977) -> CheckResult:
    t0 = time.perf_counter()
    model = ModelSpec(Family.FLAT, 6.0)
    points = np.array([0.30 + 0.20j, -0.40 + 0.10j, 0.10 - 0.50j])
    theta = np.array([1.0, 0.8, 1.3])
    coeffs = [0.0, 0.5, -0.25]
    exact = {p: exact_moment_polynomial_functional(coeffs, p, points, theta, model)
             for p in (2, 3, 4)}

    draws = 10 ** 7
    chunk = 250_000
    stream = ComplexGaussianStream(seed, 0)
    mu = 1.0 / len(points)
    sums = {p: 0.0 for p in exact}
    sqsums = {p: 0.0 for p in exact}
    done = 0
    while done < draws:
        m = min(chunk, draws - done)
        w = correlated_field_samples(model, points, stream, m)
        s = np.abs(w) ** 2
        # phi(|w|) = c2 (s - 1) + (c4 / 2!) (s^2 - 4 s + 2)
        phi = coeffs[1] * (s - 1.0) + (coeffs[2] / 2.0) * (s * s - 4.0 * s + 2.0)
        z = (phi * theta[None, :]).sum(axis=1) * mu
        for p in exact:
            zp = z ** p
            sums[p] += float(zp.sum())
            sqsums[p] += float((zp * zp).sum())
        done += m
    details = {}
    ok = True
    for p in exact:
        mean = sums[p] / draws
        var = sqsums[p] / draws - mean * mean
        se = math.sqrt(max(var, 0.0) / draws)
        pull = abs(mean - exact[p]) / se if se > 0 else 0.0
        details[f"p{p}_exact"] = exact[p]
        details[f"p{p}_mc"] = mean
        details[f"p{p}_pull"] = pull
        ok &= pull <= 4.0
    return _result("AC-6", "diagram moments vs 1e7-draw Monte Carlo", ok,
                   details, t0)


def check_ac7(seed: int = 555) -> CheckResult:
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    details = {}
    ok = True
    cases = [
        (ModelSpec(Family.ELLIPTIC, 7), 2.0),
        (ModelSpec(Family.FLAT, 3.5), 2.0),
        (ModelSpec(Family.HYPERBOLIC, 2.5), 0.7),
    ]
    for model, span in cases:
        fam = model.family.value
        z = span * (rng.random(100) * np.exp(2j * np.pi * rng.random(100)))
        z2 = span * (rng.random(100) * np.exp(2j * np.pi * rng.random(100)))
        kernel_diag = embedding_inner_product(model, z, z)
        norm_sq = model.norm_psi(z) ** 2
        kerr = float(np.max(np.abs(kernel_diag - norm_sq) / norm_sq))
        dist = fubini_study_distance(model, z, z2)
        cos_err = float(np.max(np.abs(np.cos(dist) - model.abs_rho(z, z2))))
        details[f"{fam}_kernel_diag_err"] = kerr
        details[f"{fam}_cos_vs_rho_err"] = cos_err
        ok &= kerr <= 1e-12 and cos_err <= 1e-12

        # induced-metric convergence order via a log-log slope
        base = 0.3 + 0.2j if model.family is not Family.HYPERBOLIC else 0.3 + 0.2j
        steps = np.array([1e-2, 1e-3, 1e-4])
        devs = np.array([abs(induced_metric_ratio(model, base, s * (1 + 1j) / math.sqrt(2)) - 1.0)
                         for s in steps])
        slope = float(np.polyfit(np.log(steps), np.log(np.maximum(devs, 1e-300)), 1)[0])
        details[f"{fam}_metric_slope"] = slope
        ok &= slope >= 1.8

        zs = z[:20]
        dens = np.array([edelman_kostlan_density(model, w) for w in zs])
        ref = model.intensity / math.pi * model.invariant_measure_density(zs)
        derr = float(np.max(np.abs(dens / ref - 1.0)))
        details[f"{fam}_density_rel_err"] = derr
        ok &= derr <= 1e-6
    return _result("AC-7", "kernel, projective-distance, metric, density identities",
                   ok, details, t0)


def check_ac8(shared: SharedRuns) -> CheckResult:
    t0 = time.perf_counter()
    h = TestFunction.bump(0.0j, 1.0, 3)
    details = {}
    ok = True

    rep1 = shared.toy(ToyVariant.THINNED, 400.0, 0.0)
    r1 = rep1.empirical()["variance"] / rep1.predicted_variance
    details["thinned_ratio_400"] = r1
    ok &= 0.9 <= r1 <= 1.1

    rep2a = shared.toy(ToyVariant.PERTURBED, 200.0, 0.3)
    rep2b = shared.toy(ToyVariant.PERTURBED, 400.0, 0.3)
    r2a = rep2a.empirical()["variance"] / rep2a.predicted_variance
    r2b = rep2b.empirical()["variance"] / rep2b.predicted_variance
    details["perturbed_ratio_200"] = r2a
    details["perturbed_ratio_400"] = r2b
    se2 = math.hypot(variance_standard_error(rep2a.z_values),
                     variance_standard_error(rep2b.z_values))
    details["perturbed_L_equality_pull"] = abs(
        rep2a.empirical()["variance"] - rep2b.empirical()["variance"]) / se2
    ok &= 0.85 <= r2a <= 1.15 and 0.85 <= r2b <= 1.15
    ok &= details["perturbed_L_equality_pull"] <= 3.0

    c_star = matched_scatter_amplitude()
    rep3a = shared.toy(ToyVariant.CLUSTER_SCATTERED, 100.0, c_star)
    rep3b = shared.toy(ToyVariant.CLUSTER_SCATTERED, 400.0, c_star)
    v3a, v3b = (rep3a.empirical()["variance"], rep3b.empirical()["variance"])
    details["cluster_var_x_L_ratio"] = (v3a * 100.0) / (v3b * 400.0)
    ok &= 0.7 <= details["cluster_var_x_L_ratio"] <= 1.4

    flat = shared.flat_normality(100.0)
    vf = flat.empirical()["variance"]
    se = math.hypot(variance_standard_error(rep3a.z_values),
                    variance_standard_error(flat.z_values))
    details["matched_c"] = c_star
    details["cluster_var_100"] = v3a
    details["flat_var_100"] = vf
    details["match_pull"] = abs(v3a - vf) / se
    ok &= details["match_pull"] <= 3.0
    return _result("AC-8", "toy variance laws and the matched-amplitude mimicry",
                   ok, details, t0)


def check_ac9() -> CheckResult:
    t0 = time.perf_counter()
    d = cyclic_diagram(4)
    n = 24
    ax = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    pts = (X + 1j * Y).ravel()
    ratios = []
    for L in (10.0, 40.0, 160.0):
        out = irregular_bound_check(d, ModelSpec(Family.FLAT, L), pts)
        ratios.append(out["lhs"] / out["half_power_bound"])
    ok = ratios[0] > ratios[1] > ratios[2]
    return _result("AC-9", "irregular-diagram decay against the half-power bound",
                   ok, {"ratios": ratios}, t0)


def check_determinism(seed: int = 4242, workers=None) -> CheckResult:
    t0 = time.perf_counter()
    h = TestFunction.bump(0.0j, 1.0, 3)
    model = ModelSpec(Family.FLAT, 20.0)
    a = run_normality_experiment(model, h, 120, seed, workers=workers)
    b = run_normality_experiment(model, h, 120, seed, workers=1)
    same = a.to_json_bytes() == b.to_json_bytes()
    return _result("DET", "bit-identical reports across worker counts", same,
                   {"bytes": len(a.to_json_bytes())}, t0)


def run_level(level: str, seed: int = 20240, workers=None) -> list:
    """Cumulative tiers; returns one result row per criterion."""
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; pick from {LEVELS}")
    results = [check_ac1()]
    if level == "exact":
        return results
    results.append(check_ac2())
    results.append(check_ac3(seed, workers))
    results.append(check_ac7())
    results.append(check_ac9())
    results.append(check_determinism(seed + 99, workers))
    if level == "fast-mc":
        return results
    shared = SharedRuns(seed, workers)
    results.append(check_ac4(shared))
    results.append(check_ac5(shared))
    results.append(check_ac6())
    results.append(check_ac8(shared))
    results.sort(key=lambda r: r.check_id)
    return results
