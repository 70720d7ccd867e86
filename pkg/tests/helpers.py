"""Random positive warps and space-times shared by property and acceptance tests."""

from __future__ import annotations

import math

import numpy as np
from hypothesis import strategies as st

from multiwarp.jets import Affine, Const, Power, Product, Quotient, Sum, T, exp, sin, sqrt
from multiwarp.spacetime import FiberModel, FiberSpec, KasnerSpec, WarpedSpacetime

# filled by the acceptance checks, echoed in the terminal summary
ACCEPTANCE_LOG: list = []

# every generated warp is positive on this closed interval
INTERVAL = (0.5, 2.5)


def _leaf(rng):
    k = rng.integers(6)
    u = rng.uniform
    if k == 0:
        return Const(u(0.5, 3.0))
    if k == 1:
        return Power(Affine(T, u(0.2, 2.0), u(0.0, 1.0)), u(-2.0, 2.0))
    if k == 2:
        return exp(Affine(T, u(-1.0, 1.0), u(-1.0, 1.0)))
    if k == 3:
        amp = u(0.1, 0.9)
        return Affine(sin(Affine(T, u(0.3, 2.0), u(0.0, math.pi))), amp, u(1.0, 2.0))
    if k == 4:
        return sqrt(Affine(T, u(0.2, 2.0), u(0.1, 1.0)))
    a = u(0.2, 1.0)
    return exp(Affine(T, a, 0.0)) + exp(Affine(T, -a, 0.0))


def random_warp(rng, depth: int = 0):
    """A positive expression on ``INTERVAL`` built from leaves and positive-preserving combinators."""
    if depth >= 2 or rng.random() < 0.45:
        return _leaf(rng)
    k = rng.integers(4)
    a, b = random_warp(rng, depth + 1), random_warp(rng, depth + 1)
    if k == 0:
        return Product((a, b))
    if k == 1:
        return Sum((a, b))
    if k == 2:
        return Quotient(a, b)
    return Power(a, rng.uniform(-1.5, 1.5))


def random_fiber(rng, dim: int, with_model: bool = False) -> FiberSpec:
    if with_model:
        r = rng.uniform(0.5, 2.0)
        if dim == 1:
            model = FiberModel.circle(r) if rng.random() < 0.5 else FiberModel.flat(1)
        elif rng.random() < 0.3:
            model = FiberModel.flat(dim)
        else:
            model = FiberModel.sphere2(r) if dim == 2 else FiberModel.sphere3(r)
        return FiberSpec(dim, model=model)
    if dim == 1:
        return FiberSpec(1)
    return FiberSpec(dim, einstein_lambda=rng.uniform(-3.0, 3.0))


def random_spacetime(rng, max_fibers: int = 4, max_dim: int = 3, with_model: bool = False) -> WarpedSpacetime:
    m = int(rng.integers(1, max_fibers + 1))
    fibers = []
    for _ in range(m):
        dim = int(rng.integers(1, max_dim + 1))
        fibers.append((random_fiber(rng, dim, with_model), random_warp(rng)))
    return WarpedSpacetime(INTERVAL, tuple(fibers))


def random_kasner(rng, m=None, phi=None) -> KasnerSpec:
    """Admissible generalized Kasner data with Einstein fibers and a random positive ``phi``."""
    m = m or int(rng.integers(2, 5))
    dims = [int(rng.integers(1, 4)) for _ in range(m)]
    while True:
        p = [float(rng.uniform(-1.5, 1.5)) for _ in range(m)]
        z = sum(s * q for s, q in zip(dims, p))
        if abs(z) > 0.05 and all(abs(z - q) > 0.05 for q in p):
            break
    fibers = tuple(FiberSpec(1) if s == 1 else FiberSpec(s, einstein_lambda=float(rng.uniform(-2, 2)))
                   for s in dims)
    return KasnerSpec(phi=phi or random_warp(rng), exponents=tuple(p), fibers=fibers, interval=INTERVAL)


def grid(n: int = 16, interval=INTERVAL) -> np.ndarray:
    a, b = interval
    return np.linspace(a, b, n + 2)[1:-1]


def rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


# -- hypothesis wrappers: draw a seed, build with the numpy generators ---------------

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@st.composite
def warps(draw):
    return random_warp(np.random.default_rng(draw(seeds)))


@st.composite
def spacetimes(draw, with_model: bool = False, max_fibers: int = 4):
    return random_spacetime(np.random.default_rng(draw(seeds)), max_fibers=max_fibers, with_model=with_model)


@st.composite
def kasner_specs(draw):
    return random_kasner(np.random.default_rng(draw(seeds)))


points = st.floats(min_value=0.6, max_value=2.4, allow_nan=False)
