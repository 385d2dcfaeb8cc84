import numpy as np
import pytest
from hypothesis import settings

from fixedkde.plugin import Dataset

# first calls into compiled kernels include JIT time
settings.register_profile("default", deadline=None)
settings.load_profile("default")

TOY = (0.0, 1.0, 1.1, 1.5, 1.9, 2.8, 2.9, 3.5)
SIZES = (128, 256, 384, 512, 640, 768, 896, 1024)


def normal_sample(n, seed):
    return Dataset.of(np.random.default_rng(seed).standard_normal(n))


def mixture_sample(n, seed):
    """Three Gaussian components with random weights, centres and spreads."""
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.full(3, 2.0))
    means = rng.uniform(-4.0, 4.0, 3)
    sds = rng.uniform(0.4, 1.5, 3)
    comp = rng.choice(3, size=n, p=weights)
    return Dataset.of(rng.normal(means[comp], sds[comp]))


def suite():
    """Twenty datasets: ten normal and ten mixtures, sizes cycled over SIZES."""
    out = []
    for k in range(20):
        n = SIZES[k % len(SIZES)]
        make = normal_sample if k % 2 == 0 else mixture_sample
        out.append((f"{make.__name__.split('_')[0]}-{n}-{k}", make(n, 1000 + k)))
    return out


@pytest.fixture
def toy():
    return Dataset(TOY)


@pytest.fixture
def toy_file(tmp_path):
    p = tmp_path / "toy.txt"
    p.write_text("0\n1\n1.1\n1.5\n1.9\n2.8\n2.9\n3.5\n")
    return p
