"""Labeled multidimensional constellations and orthant-symmetric construction.

A labeled constellation is the pair of an ``M x N`` point matrix and an
``M x m`` binary label matrix with ``M = 2**m``. Orthant-symmetric (OS)
constellations are generated from a first-orthant seed by mirroring it into
all ``2**N`` orthants, with the first ``N`` label bits selecting the orthant.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LabeledConstellation",
    "FirstOrthantSeed",
    "MirrorSet",
    "SymmetryReport",
    "labeling_matrix",
    "mirror_matrices",
    "expand_orthant_symmetric",
    "extract_first_orthant",
    "is_orthant_symmetric",
    "first_orthant_points",
    "normalize",
]


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class LabeledConstellation:
    """Points ``(M, N)`` plus binary labels ``(M, m)``; immutable.

    Row ``i`` of ``labels`` is the bit label of row ``i`` of ``points``.
    """

    points: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        points = _frozen(self.points, float)
        labels = _frozen(self.labels, np.uint8)
        if points.ndim != 2 or labels.ndim != 2:
            raise ValueError("points and labels must be 2-D arrays")
        M, m = labels.shape
        if points.shape[0] != M:
            raise ValueError(f"{points.shape[0]} points but {M} labels")
        if not _is_power_of_two(M) or M != 1 << m:
            raise ValueError(f"M={M} is not 2**m with m={m}")
        if np.any(labels > 1):
            raise ValueError("labels must be binary")
        if len(np.unique(_bits_to_int(labels))) != M:
            raise ValueError("label rows must enumerate {0,1}^m exactly once")
        if len(np.unique(points, axis=0)) != M:
            raise ValueError("constellation contains duplicate points")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def M(self) -> int:
        return self.points.shape[0]

    @property
    def N(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.labels.shape[1]

    @property
    def energies(self) -> np.ndarray:
        return np.sum(self.points**2, axis=1)

    @property
    def mean_energy(self) -> float:
        return float(np.mean(self.energies))

    @property
    def label_ints(self) -> np.ndarray:
        """Labels as integers, first bit most significant."""
        return _bits_to_int(self.labels)

    def by_label(self) -> "LabeledConstellation":
        """Reorder rows so that row ``i`` carries the label whose integer is ``i``."""
        order = np.argsort(self.label_ints)
        return LabeledConstellation(self.points[order], self.labels[order], self.name)

    def map_bits(self, bits) -> np.ndarray:
        """Map an ``(n, m)`` bit matrix to the corresponding ``(n, N)`` points."""
        bits = np.asarray(bits)
        if bits.ndim != 2 or bits.shape[1] != self.m:
            raise ValueError(f"expected an (n, {self.m}) bit matrix")
        lookup = np.empty(self.M, dtype=int)
        lookup[self.label_ints] = np.arange(self.M)
        return self.points[lookup[_bits_to_int(bits)]]

    def with_points(self, points) -> "LabeledConstellation":
        return LabeledConstellation(points, self.labels, self.name)

    def with_labels(self, labels) -> "LabeledConstellation":
        return LabeledConstellation(self.points, labels, self.name)

    def scaled(self, factor: float) -> "LabeledConstellation":
        return self.with_points(self.points * factor)


@dataclass(frozen=True)
class FirstOrthantSeed:
    """Nonnegative seed points ``T`` and their order-``(m - N)`` labeling."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = _frozen(self.points, float)
        labels = _frozen(self.labels, np.uint8)
        if points.ndim != 2:
            raise ValueError("seed points must be a 2-D array")
        if labels.ndim == 1 and labels.size == 0:
            labels = _frozen(np.zeros((points.shape[0], 0)), np.uint8)
        q = labels.shape[1]
        if points.shape[0] != labels.shape[0] or points.shape[0] != 1 << q:
            raise ValueError(
                f"seed has {points.shape[0]} points; expected 2**{q} for its labeling"
            )
        if np.any(points < 0):
            raise ValueError("seed coordinates must be nonnegative")
        if len(np.unique(_bits_to_int(labels))) != labels.shape[0]:
            raise ValueError("seed labels must enumerate {0,1}^(m-N)")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def N(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.N + self.labels.shape[1]


@dataclass(frozen=True)
class MirrorSet:
    """The ``2**N`` diagonal sign matrices and the orthant label rows selecting them."""

    matrices: np.ndarray  # (2**N, N, N)
    orthant_labels: np.ndarray  # (2**N, N)

    @property
    def signs(self) -> np.ndarray:
        """Diagonals of the mirror matrices, shape ``(2**N, N)``."""
        return np.einsum("kii->ki", self.matrices)


@dataclass(frozen=True)
class SymmetryReport:
    seed: FirstOrthantSeed | None
    violation: str | None = None

    @property
    def is_symmetric(self) -> bool:
        return self.seed is not None


def _bits_to_int(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] == 0:
        return np.zeros(bits.shape[:-1], dtype=np.int64)
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def labeling_matrix(q: int, lsb_first: bool = False) -> np.ndarray:
    """All ``2**q`` binary rows of length ``q`` in natural binary order."""
    k = np.arange(1 << q)[:, None]
    shifts = np.arange(q) if lsb_first else np.arange(q - 1, -1, -1)
    return ((k >> shifts) & 1).astype(np.uint8)


def mirror_matrices(N: int) -> MirrorSet:
    """Mirror matrices ``diag((-1)**l_k1, ..., (-1)**l_kN)`` for ``k = 1..2**N``.

    Rows ``l_k`` count up with the first coordinate as the least significant
    bit, so for ``N = 2`` the order is ``diag(+,+), diag(-,+), diag(+,-),
    diag(-,-)``.
    """
    if not 1 <= N <= 16:
        raise ValueError(f"dimension N={N} outside 1..16")
    rows = labeling_matrix(N, lsb_first=True)
    signs = 1.0 - 2.0 * rows
    mats = np.zeros((1 << N, N, N))
    idx = np.arange(N)
    mats[:, idx, idx] = signs
    return MirrorSet(mats, rows)


def expand_orthant_symmetric(seed: FirstOrthantSeed, name: str = "") -> LabeledConstellation:
    """Mirror ``seed`` into every orthant: ``S_k = T H_k``, ``B_k = [l_k, L]``."""
    if np.any(seed.points <= 0):
        raise ValueError("seed coordinates must be strictly positive")
    mirrors = mirror_matrices(seed.N)
    n_seed = seed.points.shape[0]
    points = (mirrors.signs[:, None, :] * seed.points[None, :, :]).reshape(-1, seed.N)
    orthant_bits = np.repeat(mirrors.orthant_labels, n_seed, axis=0)
    inner_bits = np.tile(seed.labels, (1 << seed.N, 1))
    return LabeledConstellation(points, np.hstack([orthant_bits, inner_bits]), name)


def extract_first_orthant(c: LabeledConstellation) -> SymmetryReport:
    """Recover the first-orthant seed of an OS constellation.

    The first ``N`` label bits must be the orthant bits, with bit ``j`` equal
    to one exactly when coordinate ``j`` is negative. Non-OS input is not an
    error; the report names the first violated condition instead.
    """
    N, m = c.N, c.m
    if m < N:
        return SymmetryReport(None, f"m={m} is smaller than N={N}")
    pts, lab = c.points, c.labels
    if np.any(pts == 0):
        return SymmetryReport(None, "a point lies on an orthant boundary")
    neg = (pts < 0).astype(np.uint8)
    bad = np.flatnonzero(np.any(neg != lab[:, :N], axis=1))
    if bad.size:
        return SymmetryReport(
            None, f"orthant bits of row {bad[0]} do not match its sign pattern"
        )
    first = np.flatnonzero(~np.any(neg, axis=1))
    if first.size != 1 << (m - N):
        return SymmetryReport(
            None, f"first orthant holds {first.size} points, expected {1 << (m - N)}"
        )
    seed_pts, seed_lab = pts[first], lab[first, N:]
    lookup = {tuple(row): j for j, row in enumerate(seed_lab.tolist())}
    for i in range(c.M):
        j = lookup.get(tuple(lab[i, N:].tolist()))
        if j is None or not np.array_equal(np.abs(pts[i]), seed_pts[j]):
            return SymmetryReport(None, f"row {i} is not a mirror image of the seed")
    order = np.argsort(_bits_to_int(seed_lab), kind="stable")
    return SymmetryReport(FirstOrthantSeed(seed_pts[order], seed_lab[order]))


def is_orthant_symmetric(c: LabeledConstellation) -> bool:
    return extract_first_orthant(c).is_symmetric


def first_orthant_points(c: LabeledConstellation) -> FirstOrthantSeed:
    """Seed built from the points of ``c`` that lie in the all-positive orthant.

    Unlike :func:`extract_first_orthant` this does not require ``c`` to be OS;
    it is how a non-OS format (e.g. 128SP-16QAM) becomes an optimizer start.
    The inner labels are the bits after the first ``N``.
    """
    N = c.N
    first = np.flatnonzero(np.all(c.points > 0, axis=1))
    q = c.m - N
    if first.size != 1 << q:
        raise ValueError(
            f"first orthant holds {first.size} points; an OS seed needs {1 << q}"
        )
    inner = c.labels[first, N:]
    if len(np.unique(_bits_to_int(inner))) != first.size:
        # fall back to natural labeling when inner bits collide
        inner = labeling_matrix(q)
        return FirstOrthantSeed(c.points[first], inner)
    order = np.argsort(_bits_to_int(inner), kind="stable")
    return FirstOrthantSeed(c.points[first][order], inner[order])


def normalize(c: LabeledConstellation, Es: float = 2.0) -> LabeledConstellation:
    """Scale ``c`` uniformly so its mean squared norm equals ``Es``."""
    e = c.mean_energy
    if e <= 0:
        raise ValueError("cannot normalize an all-zero constellation")
    return c.scaled(np.sqrt(Es / e))
