import math

import numpy as np
import pytest

from conftest import TOY, mixture_sample, normal_sample
from fixedkde.errors import DegenerateDataError
from fixedkde.oracle import (
    K4_AT_0,
    K6_AT_0,
    PSI8_NS_STD,
    R_K,
    compare,
    delta_percent,
    k4,
    k6,
    oracle_bandwidth,
    psi_sums,
    report,
)
from fixedkde.plugin import Dataset

EPS = np.finfo(float).eps


def hand_chain_two_points():
    """The whole selector for X = {-1, 1}, written out term by term."""
    n = 2
    v = 2.0  # (1 + 1)/1 - 0
    sigma = math.sqrt(v)
    d = 2 / sigma  # |z1 - z2|
    c = 1 / math.sqrt(2 * math.pi)
    k6_ = lambda x: (x**6 - 15 * x**4 + 45 * x**2 - 15) * math.exp(-x * x / 2) * c
    k4_ = lambda x: (x**4 - 6 * x**2 + 3) * math.exp(-x * x / 2) * c
    g1 = (2 * 15 * c / (105 / (32 * math.sqrt(math.pi)) * n)) ** (1 / 9)
    p6 = (2 * k6_(d / g1) + 2 * k6_(0)) / (n * n * g1**7)
    g2 = (-2 * 3 * c / (p6 * n)) ** (1 / 7)
    p4 = (2 * k4_(d / g2) + 2 * k4_(0)) / (n * n * g2**5)
    h = (1 / (2 * math.sqrt(math.pi)) / (p4 * n)) ** 0.2
    return dict(v_hat=v, sigma_hat=sigma, g1=g1, psi6=p6, g2=g2, psi4=p4, h_std=h, h_final=h * sigma)


def test_constants():
    assert K6_AT_0 == pytest.approx(-5.98413421, abs=1e-8)
    assert K4_AT_0 == pytest.approx(1.19682684, abs=1e-8)
    assert R_K == pytest.approx(0.28209479, abs=1e-8)
    assert PSI8_NS_STD == pytest.approx(1.851247, abs=1e-6)


def test_two_point_chain():
    res = oracle_bandwidth([-1.0, 1.0])
    for name, value in hand_chain_two_points().items():
        assert getattr(res, name) == pytest.approx(value, rel=1e-13), name


def test_toy_golden():
    res = oracle_bandwidth(TOY)
    assert res.h_final == pytest.approx(0.9614675932292334, rel=1e-12)
    assert res.v_hat == pytest.approx(1.3655357142857142, rel=1e-14)


@pytest.mark.parametrize("n", [8, 64, 256, 512])
def test_naive_and_halved_agree(n):
    res = oracle_bandwidth(normal_sample(n, n))
    assert abs(res.psi6 - res.psi6_naive) <= 10 * EPS * abs(res.psi6)
    assert abs(res.psi4 - res.psi4_naive) <= 10 * EPS * abs(res.psi4)


def test_psi_sums_symmetric_kernel():
    z = np.array([-0.5, 0.1, 0.9])
    halved, naive = psi_sums(z, 0.7, k4)
    assert halved == pytest.approx(naive, rel=1e-15)


@pytest.mark.parametrize("c", [0.5, 3.0, 10.0])
def test_scale_and_shift(c):
    data = mixture_sample(256, 4)
    x = np.array(data.values)
    base = oracle_bandwidth(data).h_final
    assert oracle_bandwidth(c * x).h_final == pytest.approx(c * base, rel=1e-12)
    assert oracle_bandwidth(x + c).h_final == pytest.approx(base, rel=1e-12)


def test_kernel_functions_vectorize():
    x = np.array([0.0, 1.0, -1.0])
    assert k6(x)[1] == k6(x)[2] == pytest.approx(16 * math.exp(-0.5) / math.sqrt(2 * math.pi))
    assert k4(x)[0] == pytest.approx(K4_AT_0)


def test_degenerate():
    with pytest.raises(DegenerateDataError):
        oracle_bandwidth([1.0, 1.0, 1.0])


def test_delta_percent():
    assert delta_percent(1.00004, 1.0) == pytest.approx(0.004)
    assert delta_percent(1.0, 1.0) == 0.0


def test_self_comparison_is_zero():
    ref = oracle_bandwidth(TOY)
    rep = report(ref, ref)
    assert rep["delta_percent"] == 0.0
    assert rep["strategy"] == "oracle"
    assert all(step["delta_percent"] == 0.0 for step in rep["per_step"].values())


@pytest.mark.parametrize("strategy", ["literal", "minimal", "fast"])
def test_compare_report(strategy):
    rep = compare(Dataset(TOY), strategy)
    assert set(rep) == {"n", "strategy", "h_fixed", "h_ref", "delta_percent", "per_step"}
    assert rep["strategy"] == strategy
    assert rep["delta_percent"] <= 0.004
    assert set(rep["per_step"]) >= {"psi6", "g2", "psi4", "h_final"}


def test_compare_normal_1024():
    rep = compare(normal_sample(1024, 9), "fast")
    assert rep["n"] == 1024
    assert rep["delta_percent"] <= 0.004
    assert max(s["delta_percent"] for s in rep["per_step"].values()) <= 0.004
