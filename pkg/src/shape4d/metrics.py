"""Structural figures of merit: energy profile and squared-distance spectrum."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import LabeledConstellation

__all__ = ["EnergyProfile", "SedSpectrum", "energy_profile", "sed_spectrum", "sed_histogram"]


@dataclass(frozen=True)
class EnergyProfile:
    """Per-symbol energies and their summary statistics.

    Attributes
    ----------
    symbol_energies : ndarray
        ``||s_i||**2`` for every point.
    papr_db : float
        ``10 log10(max / mean)`` of the symbol energies.
    variance : float
        ``E[(||S||**2 - Es)**2]`` under uniform signalling.
    levels : tuple of (float, int)
        Distinct energies (cluster means) with their multiplicities.
    """

    symbol_energies: np.ndarray
    papr_db: float
    variance: float
    levels: tuple

    @property
    def n_levels(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class SedSpectrum:
    """Squared Euclidean distances of all unordered pairs, binned.

    ``bins`` holds ``(sed, total_pairs, hd1_pairs)`` rows in ascending order,
    where ``hd1_pairs`` counts pairs whose labels differ in exactly one bit.
    """

    bins: tuple

    @property
    def msed(self) -> float:
        return self.bins[0][0]

    @property
    def msed_pairs(self) -> int:
        return self.bins[0][1]

    @property
    def total_pairs(self) -> int:
        return sum(b[1] for b in self.bins)


def _cluster(values: np.ndarray, tol: float, relative: bool):
    """Group sorted values; a new group starts when the gap to the previous exceeds tol."""
    order = np.sort(values)
    groups = [[order[0]]]
    for v in order[1:]:
        prev = groups[-1][-1]
        limit = tol * max(abs(prev), 1e-300) if relative else tol
        if v - prev > limit:
            groups.append([v])
        else:
            groups[-1].append(v)
    return groups


def energy_profile(c: LabeledConstellation, level_tol: float = 1e-6) -> EnergyProfile:
    """Energy statistics of ``c``; ``level_tol`` is relative."""
    e = c.energies
    es = float(e.mean())
    levels = tuple((float(np.mean(g)), len(g)) for g in _cluster(e, level_tol, relative=True))
    return EnergyProfile(
        symbol_energies=e,
        papr_db=float(10 * np.log10(e.max() / es)),
        variance=float(np.mean((e - es) ** 2)),
        levels=levels,
    )


def _pair_arrays(c: LabeledConstellation):
    iu, ju = np.triu_indices(c.M, 1)
    diff = c.points[iu] - c.points[ju]
    sed = np.einsum("ij,ij->i", diff, diff)
    hd = np.count_nonzero(c.labels[iu] != c.labels[ju], axis=1)
    return sed, hd


def sed_spectrum(c: LabeledConstellation, bin_tol: float = 1e-6) -> SedSpectrum:
    """Exact SED spectrum; distances within ``bin_tol`` (absolute) share a bin."""
    sed, hd = _pair_arrays(c)
    order = np.argsort(sed, kind="stable")
    sed, hd = sed[order], hd[order]
    # new bin wherever the gap to the previous sorted distance exceeds bin_tol
    starts = np.concatenate([[0], np.flatnonzero(np.diff(sed) > bin_tol) + 1])
    ends = np.concatenate([starts[1:], [len(sed)]])
    bins = tuple(
        (float(sed[a:b].mean()), int(b - a), int(np.count_nonzero(hd[a:b] == 1)))
        for a, b in zip(starts, ends)
    )
    return SedSpectrum(bins)


def sed_histogram(c: LabeledConstellation, width: float = 0.05):
    """Coarse display histogram of SEDs.

    Returns
    -------
    edges : ndarray
        Left bin edges.
    total : ndarray
        Pair counts per bin.
    hd1 : ndarray
        Pair counts per bin at Hamming distance one.
    """
    sed, hd = _pair_arrays(c)
    idx = np.floor(sed / width + 1e-9).astype(int)
    n = idx.max() + 1
    total = np.bincount(idx, minlength=n)
    hd1 = np.bincount(idx[hd == 1], minlength=n)
    keep = total > 0
    return np.arange(n)[keep] * width, total[keep], hd1[keep]
