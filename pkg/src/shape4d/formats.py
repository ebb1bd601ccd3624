"""Built-in modulation formats and the D4 lattice spherical-subset constructor.

Every built-in is returned normalized to ``Es = 2`` (unit energy per
polarization). Coordinates are ordered ``[XI, XQ, YI, YQ]`` for 4D formats.
"""
from __future__ import annotations

import itertools

import numpy as np

from .constellation import (
    FirstOrthantSeed,
    LabeledConstellation,
    expand_orthant_symmetric,
    labeling_matrix,
    normalize,
)

__all__ = [
    "BUILTIN_NAMES",
    "OS128_T",
    "builtin",
    "os128_seed",
    "qam16_seed",
    "pm16qam_seed",
    "pm_qam",
    "sp128_16qam",
    "apsk_2a8psk",
    "d4_points",
    "d4_shells",
    "d4_spherical_subset",
    "D4_CENTROIDS",
]

#: Four-decimal coordinates ``t1 < t2 < t3 < t4 < t5`` of 4D-OS128.
OS128_T = (0.2875, 0.3834, 0.4730, 1.1501, 1.2460)

# Seed rows as index tuples into OS128_T (0-based), with their 3 inner bits.
_OS128_SEED = (
    ((2, 2, 0, 0), (0, 1, 1)),
    ((1, 4, 2, 2), (0, 0, 1)),
    ((0, 0, 2, 2), (1, 1, 1)),
    ((2, 2, 4, 1), (1, 0, 1)),
    ((2, 2, 1, 4), (1, 1, 0)),
    ((2, 2, 3, 3), (1, 0, 0)),
    ((4, 1, 2, 2), (0, 1, 0)),
    ((3, 3, 2, 2), (0, 0, 0)),
)


def _gray_bits(n_bits: int) -> np.ndarray:
    """Reflected binary Gray code rows, shape ``(2**n_bits, n_bits)``."""
    k = np.arange(1 << n_bits)
    g = k ^ (k >> 1)
    shifts = np.arange(n_bits - 1, -1, -1)
    return ((g[:, None] >> shifts) & 1).astype(np.uint8)


def os128_seed(t=OS128_T) -> FirstOrthantSeed:
    """First-orthant seed of 4D-OS128 built from the five coordinate values ``t``."""
    t = np.asarray(t, dtype=float)
    pts = np.array([t[list(idx)] for idx, _ in _OS128_SEED])
    lab = np.array([bits for _, bits in _OS128_SEED], dtype=np.uint8)
    return FirstOrthantSeed(pts, lab)


def qam16_seed() -> FirstOrthantSeed:
    """First-quadrant seed of Gray 16QAM."""
    pts = np.array([[3, 3], [1, 3], [1, 1], [3, 1]], dtype=float)
    lab = np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8)
    return FirstOrthantSeed(pts, lab)


def pm16qam_seed() -> FirstOrthantSeed:
    """First-orthant seed of PM-16QAM: amplitude bit ``k`` is 1 iff ``|x_k| = 3``."""
    amp = labeling_matrix(4)
    return FirstOrthantSeed(1.0 + 2.0 * amp, amp)


def pm_qam(bits_per_dim: int) -> LabeledConstellation:
    """Gray PM-QAM with ``2**bits_per_dim`` levels per real dimension.

    Labels are the four sign bits followed by the per-dimension Gray-labeled
    amplitude bits (dimension-major). ``bits_per_dim = 1`` gives PM-QPSK.
    """
    q = bits_per_dim - 1
    n_amp = 1 << q
    amp_levels = 2.0 * np.arange(n_amp) + 1.0
    amp_bits = _gray_bits(q) if q else np.zeros((1, 0), np.uint8)
    rows = list(itertools.product(range(n_amp), repeat=4))
    pts = np.array([[amp_levels[i] for i in r] for r in rows])
    lab = np.array([np.concatenate([amp_bits[i] for i in r]) for r in rows], dtype=np.uint8)
    if q == 0:
        lab = np.zeros((1, 0), dtype=np.uint8)
    seed = FirstOrthantSeed(pts, lab)
    names = {1: "pm-qpsk", 2: "pm-16qam", 3: "pm-64qam"}
    return normalize(expand_orthant_symmetric(seed, names.get(bits_per_dim, "")))


def sp128_16qam() -> LabeledConstellation:
    """128-point set-partitioned PM-16QAM.

    The subset of PM-16QAM whose eight Gray label bits have even parity; the
    label is the first seven bits and the eighth (last amplitude bit) is
    their parity.
    """
    full = pm_qam(2)
    keep = np.sum(full.labels, axis=1) % 2 == 0
    return LabeledConstellation(full.points[keep], full.labels[keep, :7], "128sp-16qam")


def apsk_2a8psk(ring_ratio: float = 0.59, phase_offset: float = 0.0) -> LabeledConstellation:
    """Constant-modulus 7b4D two-ring 8PSK format.

    Each polarization carries Gray-labeled 8PSK (3 bits). One ring bit
    selects whether X sits on the inner ring and Y on the outer ring or the
    reverse, so every symbol has the same 4D energy.

    Parameters
    ----------
    ring_ratio : float
        Inner over outer radius ``r1 / r2``.
    phase_offset : float
        Extra phase (rad) applied to the polarization on the outer ring.
    """
    if not 0 < ring_ratio < 1:
        raise ValueError("ring_ratio must lie in (0, 1)")
    r2 = np.sqrt(2.0 / (1.0 + ring_ratio**2))
    r1 = ring_ratio * r2
    gray = _gray_bits(3)
    pts, lab = [], []
    for ring in (0, 1):
        ax, ay = (r1, r2) if ring == 0 else (r2, r1)
        ox, oy = (0.0, phase_offset) if ring == 0 else (phase_offset, 0.0)
        for px in range(8):
            for py in range(8):
                phx = px * np.pi / 4 + ox
                phy = py * np.pi / 4 + oy
                pts.append([ax * np.cos(phx), ax * np.sin(phx), ay * np.cos(phy), ay * np.sin(phy)])
                lab.append(np.concatenate([[ring], gray[px], gray[py]]))
    return LabeledConstellation(np.array(pts), np.array(lab, dtype=np.uint8), "7b4d-2a8psk")


# --------------------------------------------------------------------- D4 ---

#: Candidate centroids for the D4 spherical subset, tried in this order.
D4_CENTROIDS = (
    (0.0, 0.0, 0.0, 0.0),
    (1.0, 0.0, 0.0, 0.0),
    (0.5, 0.5, 0.5, 0.5),
    (0.5, 0.5, 0.0, 0.0),
    (0.5, 0.0, 0.0, 0.0),
    (0.25, 0.25, 0.25, 0.25),
)


def d4_points(radius: float, centroid=(0.0, 0.0, 0.0, 0.0)) -> np.ndarray:
    """D4 lattice points within ``radius`` of ``centroid``.

    Rows are sorted by squared distance to the centroid, ties broken
    lexicographically on the coordinates.
    """
    c = np.asarray(centroid, dtype=float)
    lo = np.floor(c - radius).astype(int)
    hi = np.ceil(c + radius).astype(int)
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 4)
    grid = grid[grid.sum(axis=1) % 2 == 0]
    d2 = np.sum((grid - c) ** 2, axis=1)
    grid, d2 = grid[d2 <= radius**2 + 1e-12], d2[d2 <= radius**2 + 1e-12]
    order = np.lexsort(tuple(grid[:, k] for k in range(3, -1, -1)) + (np.round(d2, 12),))
    return grid[order].astype(float)


def d4_shells(radius: float, centroid=(0.0, 0.0, 0.0, 0.0)) -> dict[float, np.ndarray]:
    """Group :func:`d4_points` into shells keyed by squared distance."""
    pts = d4_points(radius, centroid)
    d2 = np.round(np.sum((pts - np.asarray(centroid)) ** 2, axis=1), 9)
    return {float(r): pts[d2 == r] for r in np.unique(d2)}


def d4_spherical_subset(M: int, search_radius: float = 4.0, centroids=D4_CENTROIDS) -> LabeledConstellation:
    """Lowest-energy ``M``-point subset of D4 over a list of candidate centroids.

    For each centroid the ``M`` nearest lattice points are taken, re-centered
    on their mean, and the candidate with the smallest mean energy wins (the
    earliest centroid on ties). Labels are in natural binary order; labeling
    refinement is left to the optimizer.
    """
    if M < 2 or M & (M - 1):
        raise ValueError(f"M={M} must be a power of two >= 2")
    best, best_e = None, np.inf
    for c in centroids:
        pts = d4_points(search_radius, c)
        if len(pts) < M:
            raise ValueError(
                f"only {len(pts)} lattice points within radius {search_radius} of {c}"
            )
        sub = pts[:M] - pts[:M].mean(axis=0)
        e = float(np.mean(np.sum(sub**2, axis=1)))
        if e < best_e - 1e-12:
            best, best_e = sub, e
    m = int(np.log2(M))
    return normalize(LabeledConstellation(best, labeling_matrix(m), f"l4-{M}"))


# --------------------------------------------------------------- registry ---


def _os128() -> LabeledConstellation:
    return normalize(expand_orthant_symmetric(os128_seed(), "4d-os128"))


def _qam16() -> LabeledConstellation:
    return normalize(expand_orthant_symmetric(qam16_seed(), "16qam"))


def _qpsk() -> LabeledConstellation:
    seed = FirstOrthantSeed(np.ones((1, 2)), np.zeros((1, 0), np.uint8))
    return normalize(expand_orthant_symmetric(seed, "qpsk"))


_BUILDERS = {
    "4d-os128": _os128,
    "128sp-16qam": lambda: normalize(sp128_16qam()),
    "7b4d-2a8psk": lambda: normalize(apsk_2a8psk()),
    "pm-16qam": lambda: pm_qam(2),
    "pm-64qam": lambda: pm_qam(3),
    "pm-qpsk": lambda: pm_qam(1),
    "l4-128": lambda: d4_spherical_subset(128),
    "16qam": _qam16,
    "qpsk": _qpsk,
}

BUILTIN_NAMES = tuple(_BUILDERS)


def builtin(name: str) -> LabeledConstellation:
    """Return the built-in format ``name`` normalized to ``Es = 2``."""
    try:
        build = _BUILDERS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown format {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return build()
