"""Noise-variance estimation, spectrum denoising, and the ID criteria.

Additive white noise with variance sigma^2 shifts every covariance eigenvalue
by sigma^2 while leaving the principal directions unchanged. The filter here
locates where the cumulative variance ratio crosses a threshold P close to 1,
estimates the noise variance from the eigenvalues beyond that point, and
subtracts it before the dimension criteria are applied. Running the same
pipeline with the filter disabled gives the plain local-PCA (L-PCA) variant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import PointSet, Spectrum, covariance_spectrum


@dataclass(frozen=True)
class IdCriteria:
    """Thresholds for the dimension criteria and the noise filter.

    Parameters
    ----------
    alpha : float
        Spectral-gap threshold: the smallest d where the d-th denoised
        variance exceeds the (d+1)-th by more than this factor is accepted.
    beta : float
        Cumulative-variance threshold in (0, 1) for the fallback criterion.
    noise_p : float
        Cumulative ratio in (0, 1) that marks the start of the noise part of
        the spectrum.
    noise_pc_cap : int
        At most this many leading noise-part eigenvalues enter the noise
        variance estimate.
    filter_noise : bool
        True runs the full noise-filtered pipeline (C-PCA); False skips the
        filter entirely (L-PCA).
    """

    alpha: float = 10.0
    beta: float = 0.8
    noise_p: float = 0.95
    noise_pc_cap: int = 10
    filter_noise: bool = True

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError(f"alpha must be > 1, got {self.alpha}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        if not 0 < self.noise_p < 1:
            raise ValueError(f"noise_p must be in (0, 1), got {self.noise_p}")
        if self.noise_pc_cap < 1:
            raise ValueError(f"noise_pc_cap must be >= 1, got {self.noise_pc_cap}")


@dataclass(frozen=True)
class DenoisedSpectrum:
    """A spectrum together with the noise variance removed from it.

    ``noise_start`` is the 1-based index where the noise part of the raw
    spectrum begins, or None when the filter did not run (filter disabled or
    flat spectrum). ``variances`` holds max(eigenvalue - noise_var, 0).
    """

    raw: Spectrum
    noise_var: float
    noise_start: int | None
    variances: np.ndarray
    noise_dominated: bool = False

    def __post_init__(self):
        if self.noise_var < 0:
            raise ValueError("noise_var must be >= 0")
        if self.noise_start is not None and not 1 <= self.noise_start <= self.raw.m:
            raise ValueError(f"noise_start {self.noise_start} outside [1, {self.raw.m}]")
        object.__setattr__(self, "variances", np.asarray(self.variances, dtype=float))


@dataclass(frozen=True)
class LocalEstimate:
    """Dimension estimate for one cover subset."""

    subset_index: int
    spectrum: Spectrum
    denoised: DenoisedSpectrum
    local_id: int
    noise_var: float
    ratio_id: int | None
    pct_id: int

    @property
    def noise_dominated(self) -> bool:
        return self.denoised.noise_dominated


def locate_noise_start(eigenvalues, p: float) -> int | None:
    """Find the 1-based index r where the noise part of a spectrum begins.

    r is the unique index whose cumulative variance ratio first exceeds p;
    a prefix ratio exactly equal to p counts as not yet exceeded. Returns
    None for a flat (zero total variance) spectrum, where r is undefined.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    total = lam.sum()
    if total <= 0:
        return None
    crossed = np.nonzero(np.cumsum(lam) > p * total)[0]
    if crossed.size == 0:
        # Rounding pushed even the full sum below p * total; the tail is the
        # last entry by convention.
        return int(lam.size)
    return int(crossed[0]) + 1


def estimate_noise_variance(spectrum: Spectrum, criteria: IdCriteria) -> float:
    """Estimate the per-direction noise variance from the spectrum tail.

    Averages the eigenvalues at 1-based indices r .. r + min(cap, m - r + 1) - 1
    where r is the noise start. Returns 0 for flat spectra or when the filter
    is disabled.
    """
    if not criteria.filter_noise:
        return 0.0
    lam = spectrum.eigenvalues
    r = locate_noise_start(lam, criteria.noise_p)
    if r is None:
        return 0.0
    count = min(criteria.noise_pc_cap, lam.size - r + 1)
    return float(lam[r - 1 : r - 1 + count].mean())


def denoise(spectrum: Spectrum, noise_var: float, noise_start: int | None = None,
            noise_dominated: bool = False) -> DenoisedSpectrum:
    """Subtract the noise variance from every eigenvalue, clamping at zero."""
    if noise_var < 0:
        raise ValueError("noise_var must be >= 0")
    variances = np.maximum(spectrum.eigenvalues - noise_var, 0.0)
    return DenoisedSpectrum(
        raw=spectrum,
        noise_var=float(noise_var),
        noise_start=noise_start,
        variances=variances,
        noise_dominated=noise_dominated,
    )


def id_by_ratio(variances, alpha: float) -> int | None:
    """Spectral-gap criterion.

    Returns the smallest d in [1, m-1] such that variances[d-1] is positive
    and exceeds variances[d] by more than a factor alpha (a zero variances[d]
    under a positive variances[d-1] counts as an infinite ratio). Returns
    None when no d qualifies.
    """
    v = np.asarray(variances, dtype=float)
    for d in range(1, v.size):
        if v[d - 1] <= 0:
            return None  # descending: everything from here on is zero
        if v[d] == 0 or v[d - 1] / v[d] > alpha:
            return d
    return None


def id_by_variance_pct(variances, beta: float) -> int:
    """Cumulative-variance criterion.

    Returns the smallest d whose leading variances account for strictly more
    than the fraction beta of the total. A flat (all-zero) input returns 0.
    """
    v = np.asarray(variances, dtype=float)
    total = v.sum()
    if total <= 0:
        return 0
    crossed = np.nonzero(np.cumsum(v) > beta * total)[0]
    if crossed.size == 0:
        return int(v.size)
    return int(crossed[0]) + 1


def apply_criteria(spectrum: Spectrum, criteria: IdCriteria) -> tuple[DenoisedSpectrum, int, int | None, int]:
    """Run the (optional) noise filter and both criteria on a spectrum.

    Returns ``(denoised, estimated_id, ratio_id, pct_id)``. The spectral-gap
    criterion takes precedence when it is satisfied; the cumulative-variance
    criterion is the fallback and always produces an answer. A noise start of
    r = 1 means even the first eigenvalue exceeds the cumulative threshold;
    the estimate is still produced but flagged as noise-dominated.
    """
    if criteria.filter_noise:
        r = locate_noise_start(spectrum.eigenvalues, criteria.noise_p)
        sigma2 = estimate_noise_variance(spectrum, criteria)
        den = denoise(spectrum, sigma2, noise_start=r, noise_dominated=(r == 1))
    else:
        den = denoise(spectrum, 0.0, noise_start=None)
    ratio_id = id_by_ratio(den.variances, criteria.alpha)
    pct_id = id_by_variance_pct(den.variances, criteria.beta)
    estimated = ratio_id if ratio_id is not None else pct_id
    return den, estimated, ratio_id, pct_id


def local_id(points: PointSet, criteria: IdCriteria, subset_index: int = 0) -> LocalEstimate:
    """Estimate the dimension of one subset of points.

    Pipeline: covariance spectrum, then the noise filter (when enabled), then
    the criteria. A singleton subset has a flat spectrum and yields dimension
    0, which is a diagnostic outcome rather than an error.
    """
    spectrum = covariance_spectrum(points)
    den, estimated, ratio_id, pct_id = apply_criteria(spectrum, criteria)
    return LocalEstimate(
        subset_index=subset_index,
        spectrum=spectrum,
        denoised=den,
        local_id=estimated,
        noise_var=den.noise_var,
        ratio_id=ratio_id,
        pct_id=pct_id,
    )
