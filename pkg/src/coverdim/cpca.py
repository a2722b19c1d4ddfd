"""Cover-based PCA dimension estimation, batch and incremental.

Batch mode builds a cover of the data, runs the local spectrum pipeline on
every retained subset, and aggregates the local eigenvalues index-wise into a
global spectrum that goes through the same criteria. Incremental mode keeps
the cover geometry and per-subset spectra around so that new points can be
folded in one at a time: a point lands in the subset of its nearest center
(or is rejected as an outlier when it falls outside that subset's radius),
the subset spectrum is recomputed exactly, and the aggregated spectrum is
updated by the difference of the old and new local spectra.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .cover import NeighborhoodSpec, build_neighborhoods, minimum_cover
from .dataio import DataFormatError
from .linalg import PointSet, Spectrum, distance_matrix
from .spectra import DenoisedSpectrum, IdCriteria, LocalEstimate, apply_criteria, local_id

STATE_FORMAT = "coverdim-state"
STATE_VERSION = 1


@dataclass(frozen=True)
class GlobalEstimate:
    """Aggregated result of a batch run or of the current incremental state.

    ``aggregated`` is the index-wise sum of the descending local spectra
    (shorter spectra padded with zeros), ``global_id`` the integer estimate
    from running the criteria on it, and ``mean_local_id`` the average of the
    per-subset integer estimates, which is the real-valued figure usually
    plotted against the neighborhood size.
    """

    aggregated: np.ndarray
    global_id: int
    mean_local_id: float
    subset_count: int
    locals: tuple[LocalEstimate, ...]
    denoised: DenoisedSpectrum
    noise_var: float
    ratio_id: int | None
    pct_id: int

    def __post_init__(self):
        object.__setattr__(self, "aggregated", np.asarray(self.aggregated, dtype=float))
        object.__setattr__(self, "locals", tuple(self.locals))


@dataclass
class CpcaState:
    """Mutable state for incremental estimation.

    Holds full coordinates per retained subset (inserted points do not exist
    in any global index space), the fixed centers and radii from the initial
    cover, the latest per-subset estimates, and the aggregated spectrum. The
    radii are never updated by inserts; re-running the batch estimator is the
    remedy once the data drifts.
    """

    dim: int
    criteria: IdCriteria
    center_ids: list[int]
    radii: np.ndarray
    subsets: list[np.ndarray]
    local_estimates: list[LocalEstimate]
    aggregated: np.ndarray
    outlier_count: int = 0
    inserted_count: int = 0

    @property
    def subset_count(self) -> int:
        return len(self.subsets)

    @property
    def centers(self) -> np.ndarray:
        return np.array([coords[0] for coords in self.subsets])


def aggregate_spectra(spectra: list[np.ndarray]) -> np.ndarray:
    """Sum descending eigenvalue lists index-wise, zero-padding short ones."""
    length = max(s.size for s in spectra)
    agg = np.zeros(length)
    for s in spectra:
        agg[: s.size] += s
    return agg


def _global_from_locals(local_estimates, n: int, criteria: IdCriteria) -> GlobalEstimate:
    aggregated = aggregate_spectra([le.spectrum.eigenvalues for le in local_estimates])
    spectrum = Spectrum(aggregated, subset_size=n)
    den, estimated, ratio_id, pct_id = apply_criteria(spectrum, criteria)
    mean_local = float(np.mean([le.local_id for le in local_estimates]))
    return GlobalEstimate(
        aggregated=aggregated,
        global_id=estimated,
        mean_local_id=mean_local,
        subset_count=len(local_estimates),
        locals=tuple(local_estimates),
        denoised=den,
        noise_var=den.noise_var,
        ratio_id=ratio_id,
        pct_id=pct_id,
    )


def estimate_batch(points: PointSet, spec: NeighborhoodSpec,
                   criteria: IdCriteria = IdCriteria()) -> GlobalEstimate:
    """Estimate the intrinsic dimension of a full data set.

    Builds the cover, estimates the dimension of every retained subset, and
    aggregates. Deterministic for identical inputs.
    """
    dist = distance_matrix(points)
    neighborhoods = build_neighborhoods(dist, spec)
    cover = minimum_cover(neighborhoods, dist)
    local_estimates = [
        local_id(points.subset(nb.members), criteria, subset_index=nb.center)
        for nb in cover.subsets
    ]
    return _global_from_locals(local_estimates, points.n, criteria)


def init_incremental(points: PointSet, spec: NeighborhoodSpec,
                     criteria: IdCriteria = IdCriteria()) -> CpcaState:
    """Bootstrap incremental state from a seed data set via a batch run."""
    dist = distance_matrix(points)
    neighborhoods = build_neighborhoods(dist, spec)
    cover = minimum_cover(neighborhoods, dist)
    subsets = []
    local_estimates = []
    for nb in cover.subsets:
        coords = points.points[nb.members].copy()
        subsets.append(coords)
        local_estimates.append(local_id(PointSet(coords), criteria, subset_index=nb.center))
    aggregated = aggregate_spectra([le.spectrum.eigenvalues for le in local_estimates])
    return CpcaState(
        dim=points.dim,
        criteria=criteria,
        center_ids=[nb.center for nb in cover.subsets],
        radii=np.array([nb.radius for nb in cover.subsets]),
        subsets=subsets,
        local_estimates=local_estimates,
        aggregated=aggregated,
    )


def current_estimate(state: CpcaState) -> GlobalEstimate:
    """Assemble the GlobalEstimate for the state as it stands.

    The aggregated spectrum comes from the state (maintained by difference
    updates), not from a fresh re-aggregation.
    """
    n = sum(len(coords) for coords in state.subsets)
    spectrum = Spectrum(state.aggregated, subset_size=n)
    den, estimated, ratio_id, pct_id = apply_criteria(spectrum, state.criteria)
    mean_local = float(np.mean([le.local_id for le in state.local_estimates]))
    return GlobalEstimate(
        aggregated=state.aggregated.copy(),
        global_id=estimated,
        mean_local_id=mean_local,
        subset_count=state.subset_count,
        locals=tuple(state.local_estimates),
        denoised=den,
        noise_var=den.noise_var,
        ratio_id=ratio_id,
        pct_id=pct_id,
    )


def insert_point(state: CpcaState, x) -> tuple[GlobalEstimate, bool]:
    """Fold one new point into the state.

    The point joins the subset of its nearest center unless its distance to
    that center exceeds the subset radius, in which case it is counted as an
    outlier and the state is otherwise untouched. A point exactly on the
    boundary is accepted. On acceptance the subset spectrum is recomputed by
    a full local PCA and the aggregated spectrum updated by the difference.

    Returns ``(estimate, accepted)``; the state is modified in place.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != state.dim:
        raise DataFormatError(f"point has dimension {x.size}, state has {state.dim}")
    if not np.isfinite(x).all():
        raise DataFormatError("point contains NaN or Inf")

    center_dists = np.linalg.norm(state.centers - x, axis=1)
    q = int(np.argmin(center_dists))
    if center_dists[q] > state.radii[q]:
        state.outlier_count += 1
        return current_estimate(state), False

    old = state.local_estimates[q].spectrum.eigenvalues
    state.subsets[q] = np.vstack([state.subsets[q], x])
    new_estimate = local_id(PointSet(state.subsets[q]), state.criteria,
                            subset_index=state.center_ids[q])
    new = new_estimate.spectrum.eigenvalues

    length = max(state.aggregated.size, new.size)
    aggregated = np.zeros(length)
    aggregated[: state.aggregated.size] = state.aggregated
    aggregated[: new.size] += new
    aggregated[: old.size] -= old
    state.aggregated = aggregated
    state.local_estimates[q] = new_estimate
    state.inserted_count += 1
    return current_estimate(state), True


def verify_aggregated(state: CpcaState) -> float:
    """Max relative deviation between the state's aggregated spectrum and a
    from-scratch re-aggregation of the stored per-subset spectra."""
    fresh = aggregate_spectra([le.spectrum.eigenvalues for le in state.local_estimates])
    if fresh.size != state.aggregated.size:
        raise AssertionError("aggregated spectrum length drifted")
    scale = max(fresh.max(initial=0.0), 1e-300)
    return float(np.abs(fresh - state.aggregated).max() / scale)


def save_state(state: CpcaState, path: str) -> None:
    """Write the state to a JSON file, atomically (write temp then rename).

    The file stores the format header, ambient dimension, criteria, outlier
    and insert counters, the aggregated spectrum, and per subset the original
    center index, the center row position, the radius, and the full member
    coordinates. Per-subset spectra and estimates are recomputed on load,
    which is deterministic given identical coordinates; the aggregated
    spectrum is restored verbatim because incremental difference updates are
    allowed to drift from a fresh re-aggregation by float rounding.
    """
    doc = {
        "format": STATE_FORMAT,
        "version": STATE_VERSION,
        "dim": state.dim,
        "criteria": {
            "alpha": state.criteria.alpha,
            "beta": state.criteria.beta,
            "noise_p": state.criteria.noise_p,
            "noise_pc_cap": state.criteria.noise_pc_cap,
            "filter_noise": state.criteria.filter_noise,
        },
        "outlier_count": state.outlier_count,
        "inserted_count": state.inserted_count,
        "aggregated": state.aggregated.tolist(),
        "subsets": [
            {
                "center_id": int(cid),
                "center_row": 0,
                "radius": float(radius),
                "members": coords.tolist(),
            }
            for cid, radius, coords in zip(state.center_ids, state.radii, state.subsets)
        ],
    }
    tmp_path = f"{path}.tmp"
    with open(tmp_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    os.replace(tmp_path, path)


def load_state(path: str) -> CpcaState:
    """Load incremental state saved by :func:`save_state`.

    Raises DataFormatError on an unrecognized or corrupt file.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"state file {path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != STATE_FORMAT:
        raise DataFormatError(f"state file {path}: missing format header")
    if doc.get("version") != STATE_VERSION:
        raise DataFormatError(
            f"state file {path}: unsupported version {doc.get('version')!r}"
        )
    try:
        dim = int(doc["dim"])
        crit = doc["criteria"]
        criteria = IdCriteria(
            alpha=float(crit["alpha"]),
            beta=float(crit["beta"]),
            noise_p=float(crit["noise_p"]),
            noise_pc_cap=int(crit["noise_pc_cap"]),
            filter_noise=bool(crit["filter_noise"]),
        )
        center_ids = []
        radii = []
        subsets = []
        local_estimates = []
        for entry in doc["subsets"]:
            coords = np.asarray(entry["members"], dtype=float)
            if coords.ndim != 2 or coords.shape[1] != dim:
                raise DataFormatError(
                    f"state file {path}: subset coordinates have wrong shape {coords.shape}"
                )
            if entry.get("center_row", 0) != 0:
                raise DataFormatError(f"state file {path}: unexpected center row")
            center_ids.append(int(entry["center_id"]))
            radii.append(float(entry["radius"]))
            subsets.append(coords)
            local_estimates.append(
                local_id(PointSet(coords), criteria, subset_index=int(entry["center_id"]))
            )
        if not subsets:
            raise DataFormatError(f"state file {path}: no subsets")
        fresh = aggregate_spectra([le.spectrum.eigenvalues for le in local_estimates])
        aggregated = np.asarray(doc.get("aggregated", fresh.tolist()), dtype=float)
        if aggregated.shape != fresh.shape or (
            np.abs(aggregated - fresh).max() > 1e-9 * max(fresh.max(), 1e-300)
        ):
            raise DataFormatError(
                f"state file {path}: stored aggregated spectrum inconsistent with subsets"
            )
        return CpcaState(
            dim=dim,
            criteria=criteria,
            center_ids=center_ids,
            radii=np.array(radii),
            subsets=subsets,
            local_estimates=local_estimates,
            aggregated=aggregated,
            outlier_count=int(doc.get("outlier_count", 0)),
            inserted_count=int(doc.get("inserted_count", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataFormatError):
            raise
        raise DataFormatError(f"state file {path}: {exc}") from exc
