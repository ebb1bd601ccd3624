"""Probabilistic amplitude shaping baselines: Maxwell-Boltzmann priors and CCDM rate loss."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .constellation import LabeledConstellation

__all__ = [
    "entropy_bits",
    "mb_distribution",
    "mb_distribution_for_entropy",
    "ccdm_composition",
    "ccdm_rate_loss",
    "log2_multinomial",
    "air_n",
    "pm_qam_priors",
    "ps_pm_qam",
]


def entropy_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def mb_distribution(amplitudes, nu: float) -> np.ndarray:
    """Maxwell-Boltzmann weights ``p_a ~ exp(-nu a**2)``."""
    a2 = np.asarray(amplitudes, dtype=float) ** 2
    w = np.exp(-nu * (a2 - a2.min()))
    return w / w.sum()


def mb_distribution_for_entropy(amplitudes, target_entropy: float, tol: float = 1e-12) -> np.ndarray:
    """Maxwell-Boltzmann distribution over ``amplitudes`` with entropy ``target_entropy`` bits.

    The rate parameter ``nu >= 0`` is found by bisection; entropy decreases
    monotonically in ``nu`` from ``log2(len(amplitudes))``.
    """
    amps = np.asarray(amplitudes, dtype=float)
    h_max = math.log2(len(amps))
    if not 0 < target_entropy <= h_max + 1e-12:
        raise ValueError(f"entropy {target_entropy} outside (0, {h_max}]")
    if target_entropy >= h_max - 1e-12:
        return np.full(len(amps), 1.0 / len(amps))
    a2 = amps**2
    if np.ptp(a2) == 0:
        raise ValueError("all amplitudes have equal energy; entropy cannot be reduced")
    lo, hi = 0.0, 1.0
    while entropy_bits(mb_distribution(amps, hi)) > target_entropy:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError(f"entropy {target_entropy} is not attainable")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if entropy_bits(mb_distribution(amps, mid)) > target_entropy:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * max(1.0, hi):
            break
    return mb_distribution(amps, 0.5 * (lo + hi))


def ccdm_composition(p, n: int) -> np.ndarray:
    """Integer composition of ``n`` approximating ``n * p`` by largest remainders.

    Ties in the fractional parts go to the lower index.
    """
    if n < 1:
        raise ValueError("blocklength must be at least 1")
    p = np.asarray(p, dtype=float)
    target = n * p
    comp = np.floor(target + 1e-12).astype(np.int64)
    short = n - int(comp.sum())
    frac = target - comp
    order = np.lexsort((np.arange(len(p)), -frac))
    comp[order[:short]] += 1
    return comp


def log2_multinomial(comp) -> float:
    comp = np.asarray(comp)
    n = int(comp.sum())
    return float((gammaln(n + 1) - np.sum(gammaln(comp + 1))) / np.log(2.0))


def ccdm_rate_loss(p, n: int, reference: str = "composition") -> float:
    """CCDM rate loss ``H(P_A) - k / n`` in bit per amplitude.

    ``k = floor(log2 multinomial(n; composition))``. With
    ``reference="composition"`` (default) ``H(P_A)`` is the entropy of the
    composition's empirical distribution; with ``reference="target"`` it is
    the entropy of ``p`` itself, so that ``n = 1`` returns ``H(p)``.
    """
    if reference not in ("composition", "target"):
        raise ValueError(f"unknown reference {reference!r}")
    comp = ccdm_composition(p, n)
    h = entropy_bits(comp / n) if reference == "composition" else entropy_bits(p)
    if np.count_nonzero(comp) <= 1:
        return h
    lm = log2_multinomial(comp)
    near = round(lm)
    k = near if abs(lm - near) < 1e-9 else math.floor(lm)
    return h - k / n


def air_n(gmi: float, n_dims: int, rloss: float) -> float:
    """Finite-blocklength rate ``gmi - n_dims * rloss``."""
    if rloss < 0:
        raise ValueError("rate loss must be nonnegative")
    return gmi - n_dims * rloss


def pm_qam_priors(c: LabeledConstellation, amp_probs) -> np.ndarray:
    """Product input distribution for a PM-QAM with uniform signs.

    ``amp_probs[i]`` is the probability of the ``i``-th smallest amplitude in
    every real dimension.
    """
    amp_probs = np.asarray(amp_probs, dtype=float)
    levels = np.unique(np.round(np.abs(c.points), 9))
    if len(levels) != len(amp_probs):
        raise ValueError(f"{len(levels)} amplitude levels but {len(amp_probs)} probabilities")
    idx = np.searchsorted(levels, np.round(np.abs(c.points), 9))
    p = np.prod(amp_probs[idx] / 2.0, axis=1)
    return p / p.sum()


def ps_pm_qam(c: LabeledConstellation, entropy_4d: float, Es: float = 2.0):
    """Maxwell-Boltzmann shaped PM-QAM with total entropy ``entropy_4d`` bit per symbol.

    Signs are uniform, so the amplitude entropy per real dimension is
    ``entropy_4d / N - 1``. The points are rescaled so that the mean energy
    under the shaped distribution equals ``Es``.

    Returns
    -------
    constellation : LabeledConstellation
    priors : ndarray
    amp_probs : ndarray
        Amplitude distribution per real dimension.
    """
    levels = np.unique(np.round(np.abs(c.points), 9))
    amp_probs = mb_distribution_for_entropy(levels, entropy_4d / c.N - 1.0)
    priors = pm_qam_priors(c, amp_probs)
    energy = float(priors @ c.energies)
    return c.scaled(np.sqrt(Es / energy)), priors, amp_probs
