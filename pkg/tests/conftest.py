import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_spd(rng, m, jitter=1.0):
    a = rng.standard_normal((m, m))
    return a @ a.T + jitter * np.eye(m)


def random_psd(rng, m, rank=None):
    rank = rank or m
    a = rng.standard_normal((m, rank))
    return a @ a.T


def principal_angles(f1, f2):
    """Angles between the column spans of two (possibly non-orthonormal) bases."""
    q1, _ = np.linalg.qr(f1)
    q2, _ = np.linalg.qr(f2)
    sv = np.linalg.svd(q1.T @ q2, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))
