"""Seeded test-instance generators.

All randomness comes from ``numpy.random.default_rng(seed)``, i.e. the PCG64
bit generator, whose streams are identical across platforms for a given seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ProblemInstance

__all__ = ["GenSpec", "gen_normal", "gen_blocky", "block_sizes", "generate", "derive_seed"]


@dataclass(frozen=True)
class GenSpec:
    n: int
    kind: str = "normal"
    blocks: int = 1
    noise: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.kind not in ("normal", "blocky"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "blocky" and not 1 <= self.blocks <= self.n:
            raise ValueError("need 1 <= blocks <= n")
        if self.noise < 0:
            raise ValueError("noise must be nonnegative")


def derive_seed(master: int, *keys: int) -> int:
    """Child seed for ``(master, *keys)`` via ``numpy.random.SeedSequence``."""
    return int(np.random.SeedSequence([int(master), *map(int, keys)]).generate_state(1)[0])


def gen_normal(n: int, seed: int) -> ProblemInstance:
    """Entries i.i.d. standard normal."""
    rng = np.random.default_rng(seed)
    return ProblemInstance(rng.standard_normal((n, n)))


def block_sizes(n: int, K: int) -> list[int]:
    base, extra = divmod(n, K)
    return [base + (1 if k < extra else 0) for k in range(K)]


def _random_doubly_stochastic(m: int, rng) -> np.ndarray:
    D = rng.uniform(0.5, 1.5, size=(m, m))
    for _ in range(10_000):
        D /= D.sum(axis=1, keepdims=True)
        D /= D.sum(axis=0, keepdims=True)
        if np.max(np.abs(D.sum(axis=1) - 1.0)) < 1e-15 * m:
            break
    return D


def gen_blocky(n: int, K: int, noise: float = 0.1, seed: int = 0, mu: float = 1.0) -> ProblemInstance:
    """Data whose projection tends to have ``K`` diagonal blocks.

    ``Xhat = blkdiag(D_1..D_K) - mu * (ones off the block mask) + noise * N(0, 1)``
    where each ``D_k`` is a random positive doubly stochastic matrix.
    """
    if not 1 <= K <= n:
        raise ValueError("need 1 <= K <= n")
    rng = np.random.default_rng(seed)
    Xhat = np.full((n, n), -mu)
    start = 0
    for m in block_sizes(n, K):
        Xhat[start:start + m, start:start + m] = _random_doubly_stochastic(m, rng)
        start += m
    if noise > 0:
        Xhat += noise * rng.standard_normal((n, n))
    return ProblemInstance(Xhat)


def generate(spec: GenSpec) -> ProblemInstance:
    if spec.kind == "normal":
        return gen_normal(spec.n, spec.seed)
    return gen_blocky(spec.n, spec.blocks, spec.noise, spec.seed)
