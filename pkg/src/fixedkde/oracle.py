"""Binary64 reference pipeline and relative-error reports.

The same seven steps as ``plugin`` evaluated with platform floating point.
Both the full double sums and the symmetry-halved sums are computed with
``math.fsum`` (correctly rounded), so the two agree to a few ulps and the
reference itself carries no summation-order noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterable

import numpy as np

from .errors import DegenerateDataError, DomainError
from .plugin import BandwidthResult, Dataset, Strategy, bandwidth

SQRT_2PI = math.sqrt(2.0 * math.pi)
K6_AT_0 = -15.0 / SQRT_2PI
K4_AT_0 = 3.0 / SQRT_2PI
MU2 = 1.0
R_K = 1.0 / (2.0 * math.sqrt(math.pi))
PSI8_NS_STD = 105.0 / (32.0 * math.sqrt(math.pi))

STEP_FIELDS = BandwidthResult.FIELDS


@dataclass(frozen=True)
class OracleResult:
    n: int
    v_hat: float
    sigma_hat: float
    psi8: float
    g1: float
    psi6: float
    g2: float
    psi4: float
    h_std: float
    h_final: float
    psi6_naive: float
    psi4_naive: float

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def k6(x):
    x2 = np.square(x)
    return (((x2 - 15.0) * x2 + 45.0) * x2 - 15.0) * np.exp(-0.5 * x2) / SQRT_2PI


def k4(x):
    x2 = np.square(x)
    return ((x2 - 6.0) * x2 + 3.0) * np.exp(-0.5 * x2) / SQRT_2PI


def psi_sums(z: np.ndarray, g: float, kernel) -> tuple[float, float]:
    """(halved, naive) bracketed sums for one functional."""
    n = len(z)
    diffs = (z[:, None] - z[None, :]) / g
    terms = kernel(diffs)
    naive = math.fsum(terms.ravel())
    upper = terms[np.triu_indices(n, k=1)]
    halved = math.fsum([2.0 * math.fsum(upper), n * float(kernel(np.float64(0.0)))])
    return halved, naive


def variance_std(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    v = math.fsum(x * x) / (n - 1) - math.fsum(x) ** 2 / (n * (n - 1))
    if not v > 0.0:
        raise DegenerateDataError("sample variance is zero")
    return v, math.sqrt(v)


def oracle_bandwidth(data: Dataset | Iterable[float]) -> OracleResult:
    if not isinstance(data, Dataset):
        data = Dataset.of(data)
    x = np.asarray(data.values, dtype=np.float64)
    n = data.n

    v, sigma = variance_std(x)
    mu = math.fsum(x) / n
    z = (x - mu) / sigma

    psi8 = PSI8_NS_STD
    g1 = (-2.0 * K6_AT_0 / (MU2 * psi8 * n)) ** (1.0 / 9.0)
    p6, p6_naive = psi_sums(z, g1, k6)
    p6 /= n * n * g1**7
    p6_naive /= n * n * g1**7
    if not p6 < 0.0:
        raise DomainError(f"Psi6 estimate must be negative, got {p6}")
    g2 = (-2.0 * K4_AT_0 / (MU2 * p6 * n)) ** (1.0 / 7.0)
    p4, p4_naive = psi_sums(z, g2, k4)
    p4 /= n * n * g2**5
    p4_naive /= n * n * g2**5
    if not p4 > 0.0:
        raise DomainError(f"Psi4 estimate must be positive, got {p4}")
    h_std = (R_K / (MU2**2 * p4 * n)) ** 0.2
    return OracleResult(
        n=n,
        v_hat=v,
        sigma_hat=sigma,
        psi8=psi8,
        g1=g1,
        psi6=p6,
        g2=g2,
        psi4=p4,
        h_std=h_std,
        h_final=h_std * sigma,
        psi6_naive=p6_naive,
        psi4_naive=p4_naive,
    )


def delta_percent(method: float, ref: float) -> float:
    """|method - ref| / |ref| * 100."""
    return abs(method - ref) / abs(ref) * 100.0


def report(result: BandwidthResult | OracleResult, ref: OracleResult) -> dict:
    """Relative-error report of a pipeline result against the reference."""

    def value(name):
        v = getattr(result, name)
        return v if isinstance(v, float) else float(v)

    strategy = result.strategy.value if isinstance(result, BandwidthResult) else "oracle"
    per_step = {
        name: {
            "method": value(name),
            "ref": getattr(ref, name),
            "delta_percent": delta_percent(value(name), getattr(ref, name)),
        }
        for name in STEP_FIELDS
    }
    return {
        "n": ref.n,
        "strategy": strategy,
        "h_fixed": value("h_final"),
        "h_ref": ref.h_final,
        "delta_percent": per_step["h_final"]["delta_percent"],
        "per_step": per_step,
    }


def compare(data: Dataset | Iterable[float], strategy: Strategy | str = Strategy.FAST, **kw) -> dict:
    """Run the fixed-point pipeline and the reference and report |delta| in percent."""
    if not isinstance(data, Dataset):
        data = Dataset.of(data)
    return report(bandwidth(data, strategy, **kw), oracle_bandwidth(data))
