"""Monte Carlo evaluation of the original multidimensional integrals.

Samples are drawn in fixed-size chunks; chunk ``c`` of a run with seed ``s``
uses a Philox stream keyed by (s, c), so serial and threaded runs see the
same numbers. Chunk sums are combined in chunk order with ``math.fsum``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .moments import MomentIndex

CHUNK = 1 << 16
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def sigmas(self, target: float) -> float:
        """Distance from ``target`` in units of the standard error."""
        if self.stderr == 0:
            return 0.0 if self.mean == target else math.inf
        return abs(self.mean - float(target)) / self.stderr

    def to_dict(self, target: float | None = None) -> dict:
        out = {"mean": self.mean, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}
        if target is not None:
            out["target"] = float(target)
            out["sigmas"] = self.sigmas(target)
        return out


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    key = (int(seed) & _MASK64) | (int(chunk) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _exponentials(rng: np.random.Generator, rows: int, size: int) -> np.ndarray:
    # inverse CDF of Exp(1)
    return -np.log1p(-rng.random((rows, size)))


def _run(kernel: Callable[[np.random.Generator, int], np.ndarray], samples: int, seed: int,
         workers: int = 1) -> McEstimate:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)

    def one(c: int) -> tuple[int, float, float, float]:
        vals = kernel(chunk_generator(seed, c), sizes[c])
        mean = float(np.sum(vals)) / len(vals)
        m2 = float(np.sum((vals - mean) ** 2))
        return len(vals), float(np.sum(vals)), m2, mean

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(c) for c in range(len(sizes))]

    total = math.fsum(p[1] for p in parts)
    mean = total / samples
    m2 = math.fsum([p[2] for p in parts] + [p[0] * (p[3] - mean) ** 2 for p in parts])
    var = m2 / (samples - 1) if samples > 1 else 0.0
    return McEstimate(mean, math.sqrt(var / samples), samples, int(seed))


def mc_four(idx: MomentIndex, samples: int, seed: int, workers: int = 1) -> McEstimate:
    """a, b, c, d ~ Exp(1): average of (a+b+c+d)^s a^na b^nb c^nc d^nd / D^m."""
    na, nb, nc, nd = idx.exponents

    def kernel(rng, size):
        a, b, c, d = _exponentials(rng, 4, size)
        den = a * b * c + b * c * d + c * d * a + d * a * b
        val = a**na * b**nb * c**nc * d**nd / den**idx.m
        if idx.s:
            val = val * (a + b + c + d) ** idx.s
        return val

    return _run(kernel, samples, seed, workers)


def _simplex(rng: np.random.Generator, dim: int, size: int) -> np.ndarray:
    e = _exponentials(rng, dim, size)
    return e / e.sum(axis=0)


def mc_beta_law(beta: float, samples: int, seed: int, workers: int = 1) -> McEstimate:
    """The simplex integral over a+b+c+d = beta of d(a+c)(b+d)/D, volume beta^3/3!."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    volume = beta**3 / 6

    def kernel(rng, size):
        a, b, c, d = beta * _simplex(rng, 4, size)
        den = a * b * c + b * c * d + c * d * a + d * a * b
        return volume * d * (a + c) * (b + d) / den

    return _run(kernel, samples, seed, workers)


def cyclic_denominator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """sum_r a_r b_r prod_{i != r} (a_i + b_i) over rows of ``a`` and ``b``."""
    s = a + b
    n = a.shape[0]
    total = np.zeros(a.shape[1:])
    for r in range(n):
        term = a[r] * b[r]
        for i in range(n):
            if i != r:
                term = term * s[i]
        total = total + term
    return total


def mc_general(n: int, monomial_exponents: Sequence[int], samples: int, seed: int,
               workers: int = 1) -> McEstimate:
    """Unit simplex in (a1, b1, ..., an, bn): P / (a1 b1 (a2+b2)...(an+bn) + cyclic)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    exps = [int(e) for e in monomial_exponents]
    if len(exps) != 2 * n or min(exps) < 0:
        raise ValueError(f"need {2 * n} nonnegative exponents, got {monomial_exponents!r}")
    volume = 1 / math.factorial(2 * n - 1)

    def kernel(rng, size):
        x = _simplex(rng, 2 * n, size)
        num = np.ones(size)
        for row, e in zip(x, exps):
            if e:
                num = num * row**e
        return volume * num / cyclic_denominator(x[0::2], x[1::2])

    return _run(kernel, samples, seed, workers)


def mc_root(n: int, samples: int, seed: int, workers: int = 1) -> McEstimate:
    return mc_general(n, [0] * (2 * n), samples, seed, workers)


def stderr_scaling(run: Callable[[int, int], McEstimate], small: int, large: int, seed: int) -> dict:
    """Sample standard deviation at two sizes; a finite-variance estimator keeps the ratio near 1.

    ``run(samples, seed)`` returns an McEstimate. A ratio outside [1/1.5, 1.5]
    is flagged as heavy-tailed: the stderr then does not shrink like
    1/sqrt(samples) and the reported sigmas are optimistic.
    """
    a, b = run(small, seed), run(large, seed + 1)
    ratio = (a.stderr * math.sqrt(small)) / (b.stderr * math.sqrt(large))
    return {"ratio": ratio, "heavy_tail": not 1 / 1.5 <= ratio <= 1.5, "small": a, "large": b}
