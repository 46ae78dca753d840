"""Streaming moments, the ln ln n scaling fit and the hyperbolic secant law."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _st


@dataclass
class Welford:
    """Running mean and variance; :meth:`merge` combines two partial runs."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float) -> None:
        self.count += 1
        d = x - self.mean
        self.mean += d / self.count
        self.m2 += d * (x - self.mean)

    def extend(self, xs) -> "Welford":
        for x in xs:
            self.add(float(x))
        return self

    def merge(self, other: "Welford") -> "Welford":
        if other.count == 0:
            return Welford(self.count, self.mean, self.m2)
        if self.count == 0:
            return Welford(other.count, other.mean, other.m2)
        n = self.count + other.count
        d = other.mean - self.mean
        mean = self.mean + d * other.count / n
        m2 = self.m2 + other.m2 + d * d * self.count * other.count / n
        return Welford(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else float("nan")

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else float("nan")

    # normal-approximation intervals need a reasonable sample
    MIN_CI_SAMPLES = 30

    def ci(self, z: float = 1.959963984540054) -> tuple[float, float]:
        if self.count < self.MIN_CI_SAMPLES:
            return float("nan"), float("nan")
        h = z * self.stderr
        return self.mean - h, self.mean + h


@dataclass(frozen=True)
class ScalingFit:
    """``mean / n ~ a + b ln ln n`` by least squares."""

    a: float
    b: float
    residuals: tuple

    @property
    def b_in_units_of_reference(self) -> float:
        """``b`` divided by the asymptotic constant ``1 / 2 pi``."""
        return self.b * 2.0 * math.pi


def scaling_fit(n_values, means) -> ScalingFit:
    """Fit ``means[i] / n_values[i] = a + b ln ln n_values[i]``."""
    n = np.asarray(n_values, dtype=float)
    y = np.asarray(means, dtype=float) / n
    if len(n) < 3:
        raise ValueError("a scaling fit needs at least 3 values of n")
    x = np.log(np.log(n))
    design = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return ScalingFit(float(a), float(b), tuple((y - (a + b * x)).tolist()))


def power_fit(x, y) -> tuple[float, float]:
    """Exponent and prefactor of ``y ~ c x^p`` by least squares on logs."""
    p, logc = np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)
    return float(p), float(math.exp(logc))


def sech_cdf(x):
    """CDF ``(2 / pi) arctan(exp(pi x / 2))`` of the hyperbolic secant law."""
    x = np.asarray(x, dtype=float)
    return (2.0 / math.pi) * np.arctan(np.exp(0.5 * math.pi * x))


def ks_sech(sample) -> float:
    """Kolmogorov-Smirnov distance between a sample and the hyperbolic secant law."""
    sample = np.asarray(sample, dtype=float)
    if len(sample) == 0:
        raise ValueError("empty sample")
    return float(_st.kstest(sample, sech_cdf).statistic)
