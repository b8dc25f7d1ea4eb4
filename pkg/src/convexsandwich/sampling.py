"""Seeded sampling: uniform sphere directions and Haar subspaces.

Sample budgets are cut into fixed-size chunks, each with its own child of
``SeedSequence(seed)``, so the drawn values depend only on ``(seed, n)``
and never on how many workers evaluate the chunks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .bodies import Subspace
from .errors import InvalidArgument

CHUNK = 4096
THREADS_ENV = "CONVEXSANDWICH_THREADS"

_workers = None


def set_workers(n):
    """Pin the pool size; ``None`` falls back to the environment, then 1."""
    global _workers
    if n is not None and n < 1:
        raise InvalidArgument("worker count must be positive")
    _workers = n


def workers():
    if _workers is not None:
        return _workers
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env else 1


def parallel_map(fn, items, n_workers=None):
    """Ordered ``map``; results never depend on the worker count."""
    items = list(items)
    n_workers = workers() if n_workers is None else n_workers
    if n_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, items))


def seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InvalidArgument("seed must be a 64-bit unsigned integer")
    return np.random.SeedSequence(seed)


def child_seeds(seed, n):
    return seed_sequence(seed).spawn(n)


def rng_for(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed_sequence(seed))


def sphere_samples(dim, n, seed):
    """``n`` independent uniform unit vectors in ``R^dim`` (normalised Gaussians)."""
    n = int(n)
    chunks = child_seeds(seed, -(-n // CHUNK))
    sizes = [min(CHUNK, n - i * CHUNK) for i in range(len(chunks))]

    def draw(job):
        ss, size = job
        g = np.random.default_rng(ss).standard_normal((size, dim))
        return g / np.linalg.norm(g, axis=1, keepdims=True)

    parts = parallel_map(draw, zip(chunks, sizes))
    return np.vstack(parts) if parts else np.empty((0, dim))


def haar_subspace(d, m, seed):
    """Uniformly random ``m``-dimensional subspace of ``R^d``.

    QR of a ``d x m`` Gaussian matrix with the signs of ``R``'s diagonal
    folded into ``Q``, which makes the basis itself Haar distributed.
    """
    if not 1 <= m <= d:
        raise InvalidArgument("need 1 <= m <= d")
    g = rng_for(seed).standard_normal((d, m))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    return Subspace(q.T)
