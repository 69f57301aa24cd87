"""Experiment reports with bit-reproducible serialization.

Reports are rebuilt deterministically from (model, test function, trial
count, seed): trial values are stored in trial order, reductions use exact
compensated summation (math.fsum), JSON is emitted with sorted keys and
shortest-round-trip floats, and nothing time- or host-dependent enters the
payload.  Identical configuration therefore yields byte-identical files
regardless of worker count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA = "caz-report/1"


def moment_summary(values) -> dict:
    """Mean, variance, skewness, excess kurtosis via compensated sums."""
    x = [float(v) for v in values]
    n = len(x)
    if n < 2:
        raise ValueError("need at least two values")
    mean = math.fsum(x) / n
    d = [v - mean for v in x]
    m2 = math.fsum(v * v for v in d) / n
    m3 = math.fsum(v ** 3 for v in d) / n
    m4 = math.fsum(v ** 4 for v in d) / n
    var = math.fsum(v * v for v in d) / (n - 1)
    skew = m3 / m2 ** 1.5 if m2 > 0 else 0.0
    exkurt = m4 / (m2 * m2) - 3.0 if m2 > 0 else 0.0
    return {"mean": mean, "variance": var, "skewness": skew,
            "excess_kurtosis": exkurt, "m2": m2, "m4": m4}


def variance_standard_error(values) -> float:
    """Moment-based standard error of the sample variance."""
    s = moment_summary(values)
    n = len(values)
    v = (s["m4"] - (n - 3) / (n - 1) * s["m2"] ** 2) / n
    return math.sqrt(max(v, 0.0))


def ks_distance_normal(values) -> float:
    """Kolmogorov-Smirnov distance of the sample to the standard normal."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    cdf = 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))
    up = np.arange(1, n + 1) / n - cdf
    dn = cdf - np.arange(0, n) / n
    return float(max(up.max(), dn.max()))


@dataclass(frozen=True)
class ExperimentReport:
    header: dict
    z_values: np.ndarray
    zero_counts: np.ndarray
    certified: np.ndarray
    predicted_mean: float
    predicted_variance: float
    standardized: np.ndarray = field(repr=False, default=None)
    ks_threshold: float = 1.95

    @property
    def trials(self) -> int:
        return int(self.z_values.size)

    def empirical(self) -> dict:
        return moment_summary(self.z_values)

    def standardized_summary(self) -> dict:
        return moment_summary(self.standardized)

    def ks_distance(self) -> float:
        return ks_distance_normal(self.standardized)

    def ks_scaled(self) -> float:
        return self.ks_distance() * math.sqrt(self.trials)

    def verdict(self) -> bool:
        return self.ks_scaled() < self.ks_threshold

    def to_json_dict(self) -> dict:
        emp = self.empirical()
        std = self.standardized_summary()
        return {
            "schema": SCHEMA,
            "header": self.header,
            "predicted": {
                "mean": float(self.predicted_mean),
                "variance": float(self.predicted_variance),
            },
            "empirical": {
                "mean": emp["mean"],
                "variance": emp["variance"],
                "skewness": std["skewness"],
                "excess_kurtosis": std["excess_kurtosis"],
                "variance_ratio": (emp["variance"] / self.predicted_variance
                                   if self.predicted_variance > 0 else None),
            },
            "normality": {
                "ks_distance": self.ks_distance(),
                "ks_scaled": self.ks_scaled(),
                "threshold": self.ks_threshold,
                "verdict": self.verdict(),
            },
            "zeros": {
                "mean_count": (math.fsum(float(c) for c in self.zero_counts)
                               / max(self.trials, 1)),
                "all_certified": bool(np.all(self.certified)),
            },
        }

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_json_dict(), sort_keys=True,
                          separators=(",", ":")).encode()

    def write_json(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_json_bytes())
            fh.write(b"\n")

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("trial,Z,zero_count,certified\n")
            for t, (z, c, ok) in enumerate(zip(self.z_values, self.zero_counts,
                                               self.certified)):
                fh.write(f"{t},{float(z)!r},{int(c)},{bool(ok)}\n")
