"""Seeded synthetic manifold generators and corruption operators.

All generators draw from numpy's PCG64 generator with an explicit 64-bit seed,
so identical specs produce bit-identical point sets within one numpy version.
Gaussian variates come from the generator's standard normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import PointSet

MOBIUS_DEFAULTS = dict(n=1200, half_twists=10, radius=1.0, width=0.2)

KINDS = ("mobius", "hypersphere", "cube", "swiss_roll", "subspace")


@dataclass(frozen=True)
class ManifoldSpec:
    """Which manifold to sample, its parameters, and the RNG seed.

    ``d`` is the intrinsic dimension for the hypersphere / cube / subspace
    kinds; ``ambient_dim`` applies to the subspace kind only. The Mobius
    parameters follow the band parametrization below.
    """

    kind: str
    n: int
    seed: int = 0
    d: int | None = None
    ambient_dim: int | None = None
    half_twists: int = MOBIUS_DEFAULTS["half_twists"]
    radius: float = MOBIUS_DEFAULTS["radius"]
    width: float = MOBIUS_DEFAULTS["width"]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown manifold kind {self.kind!r}, expected one of {KINDS}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kind in ("hypersphere", "cube", "subspace"):
            if self.d is None or self.d < 1:
                raise ValueError(f"{self.kind} needs intrinsic dimension d >= 1")
        if self.kind == "subspace":
            if self.ambient_dim is None or self.ambient_dim < self.d:
                raise ValueError("subspace needs ambient_dim >= d")
        if self.kind == "mobius":
            if self.half_twists < 1 or self.radius <= 0 or self.width <= 0:
                raise ValueError("mobius needs half_twists >= 1, radius > 0, width > 0")


@dataclass(frozen=True)
class CorruptionSpec:
    """Isometric re-embedding plus additive white Gaussian noise.

    ``target_dim`` of None keeps the source dimension (embedding skipped);
    ``noise_variance`` of 0 skips the noise stage.
    """

    noise_variance: float = 0.0
    target_dim: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.noise_variance < 0:
            raise ValueError(f"noise_variance must be >= 0, got {self.noise_variance}")


def random_orthonormal(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Matrix with orthonormal columns, drawn from a seeded Gaussian via QR.

    The QR sign ambiguity is fixed by making the diagonal of R positive, so
    the result is deterministic for a given generator state.
    """
    if cols > rows:
        raise ValueError(f"cannot fit {cols} orthonormal columns in {rows} rows")
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q * np.sign(np.diag(r))


def mobius_parametrized(n: int = MOBIUS_DEFAULTS["n"],
                        half_twists: int = MOBIUS_DEFAULTS["half_twists"],
                        radius: float = MOBIUS_DEFAULTS["radius"],
                        width: float = MOBIUS_DEFAULTS["width"],
                        seed: int = 0) -> tuple[PointSet, np.ndarray, np.ndarray]:
    """Sample a twisted Mobius band in R^3, returning the surface parameters too.

    The band with m half twists is
        x = (R + v cos(m u / 2)) cos u
        y = (R + v cos(m u / 2)) sin u
        z = v sin(m u / 2)
    with u uniform on [0, 2*pi) and v uniform on [-w, w]. Sampling is uniform
    in parameter space; the induced area distortion is small for w << R and
    is not corrected.
    """
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 2.0 * np.pi, n)
    v = rng.uniform(-width, width, n)
    half_angle = half_twists * u / 2.0
    ring = radius + v * np.cos(half_angle)
    pts = np.column_stack([ring * np.cos(u), ring * np.sin(u), v * np.sin(half_angle)])
    return PointSet(pts), u, v


def mobius(n: int = MOBIUS_DEFAULTS["n"], half_twists: int = MOBIUS_DEFAULTS["half_twists"],
           radius: float = MOBIUS_DEFAULTS["radius"], width: float = MOBIUS_DEFAULTS["width"],
           seed: int = 0) -> PointSet:
    """Twisted Mobius band in R^3 (see :func:`mobius_parametrized`)."""
    return mobius_parametrized(n, half_twists, radius, width, seed)[0]


def hypersphere(n: int, d: int, seed: int = 0) -> PointSet:
    """n points uniform on the unit d-sphere surface in R^(d+1)."""
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, d + 1))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return PointSet(pts)


def cube(n: int, d: int, seed: int = 0) -> PointSet:
    """n points uniform in the solid unit cube [0, 1]^d."""
    rng = np.random.default_rng(seed)
    return PointSet(rng.uniform(0.0, 1.0, (n, d)))


def swiss_roll(n: int, seed: int = 0) -> PointSet:
    """The classic 2-d swiss roll surface in R^3."""
    rng = np.random.default_rng(seed)
    t = 1.5 * np.pi * (1.0 + 2.0 * rng.uniform(0.0, 1.0, n))
    height = rng.uniform(0.0, 21.0, n)
    return PointSet(np.column_stack([t * np.cos(t), height, t * np.sin(t)]))


def subspace(n: int, d: int, ambient_dim: int, seed: int = 0) -> PointSet:
    """n points uniform in [-1, 1]^d, mapped onto a random d-flat in R^ambient_dim.

    The output covariance has exactly d nonzero eigenvalues.
    """
    if ambient_dim < d:
        raise ValueError(f"ambient_dim {ambient_dim} < intrinsic d {d}")
    rng = np.random.default_rng(seed)
    coords = rng.uniform(-1.0, 1.0, (n, d))
    basis = random_orthonormal(ambient_dim, d, rng)
    return PointSet(coords @ basis.T)


def generate(spec: ManifoldSpec) -> PointSet:
    """Sample the manifold described by ``spec``; deterministic given the seed."""
    if spec.kind == "mobius":
        return mobius(spec.n, spec.half_twists, spec.radius, spec.width, spec.seed)
    if spec.kind == "hypersphere":
        return hypersphere(spec.n, spec.d, spec.seed)
    if spec.kind == "cube":
        return cube(spec.n, spec.d, spec.seed)
    if spec.kind == "swiss_roll":
        return swiss_roll(spec.n, spec.seed)
    return subspace(spec.n, spec.d, spec.ambient_dim, spec.seed)


def corrupt(points: PointSet, spec: CorruptionSpec) -> PointSet:
    """Embed a point set isometrically into a higher dimension and add noise.

    Stage 1 applies a seeded random orthonormal map plus a translation into
    ``target_dim`` (skipped when target_dim equals the source dimension);
    stage 2 adds independent Gaussian noise of variance ``noise_variance`` to
    every coordinate (skipped when zero). Pairwise distances are preserved by
    stage 1.
    """
    target = spec.target_dim if spec.target_dim is not None else points.dim
    if target < points.dim:
        raise ValueError(f"target_dim {target} below source dimension {points.dim}")
    rng = np.random.default_rng(spec.seed)
    pts = points.points
    if target > points.dim:
        basis = random_orthonormal(target, points.dim, rng)
        offset = rng.standard_normal(target)
        pts = pts @ basis.T + offset
    if spec.noise_variance > 0:
        pts = pts + rng.normal(0.0, np.sqrt(spec.noise_variance), pts.shape)
    return PointSet(pts)
