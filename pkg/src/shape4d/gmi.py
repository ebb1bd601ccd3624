"""AWGN information rates: bit-wise LLRs, GMI and MI estimators.

SNR convention: ``SNR = Es_2D / N0`` with ``Es_2D = 1`` (the constellation is
normalized to ``Es = 2`` over two polarizations) and ``N0 = 2 sigma**2``,
so the noise variance per real dimension is ``1 / (2 * 10**(snr_db / 10))``.
LLRs are natural-log and clamped to ``[-LLR_CLAMP, LLR_CLAMP]``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constellation import LabeledConstellation

__all__ = [
    "LLR_CLAMP",
    "AwgnSpec",
    "LlrBatch",
    "RateReport",
    "awgn_llrs",
    "gmi_mc",
    "mutual_information",
    "gmi_quadrature_2d",
    "snr_for_rate",
    "chunk_rng",
    "default_threads",
]

LLR_CLAMP = 50.0
_LN2 = np.log(2.0)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SHAPE4D_THREADS", "1")))
    except ValueError:
        return 1


def chunk_rng(seed: int, chunk_idx: int) -> np.random.Generator:
    """Independent, order-free random stream for one chunk of work."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_idx,)))


@dataclass(frozen=True)
class AwgnSpec:
    """AWGN channel parameters.

    Parameters
    ----------
    snr_db : float
        ``Es_2D / N0`` in dB.
    noise_var : float, optional
        Overrides the noise variance per real dimension derived from ``snr_db``.
    probabilities : array_like, optional
        Input distribution over the constellation rows; uniform when omitted.
    es_2d : float
        Mean energy per two real dimensions used by the SNR convention.
    """

    snr_db: float = 10.0
    noise_var: float | None = None
    probabilities: np.ndarray | None = None
    es_2d: float = 1.0

    def __post_init__(self):
        if self.probabilities is not None:
            p = np.array(self.probabilities, dtype=float)
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
                raise ValueError("probabilities must be nonnegative and sum to 1")
            p.setflags(write=False)
            object.__setattr__(self, "probabilities", p)
        if self.noise_var is not None and not self.noise_var > 0:
            raise ValueError("noise variance must be positive")

    @property
    def sigma2(self) -> float:
        if self.noise_var is not None:
            return float(self.noise_var)
        return self.es_2d / (2.0 * 10 ** (self.snr_db / 10))

    def priors(self, M: int) -> np.ndarray:
        if self.probabilities is None:
            return np.full(M, 1.0 / M)
        if len(self.probabilities) != M:
            raise ValueError(f"{len(self.probabilities)} probabilities for {M} points")
        return np.asarray(self.probabilities)

    def entropy(self, M: int) -> float:
        p = self.priors(M)
        p = p[p > 0]
        return float(-np.sum(p * np.log2(p)))


@dataclass(frozen=True)
class LlrBatch:
    llrs: np.ndarray
    tx_bits: np.ndarray | None
    method: str
    spec: AwgnSpec


@dataclass(frozen=True)
class RateReport:
    """Monte-Carlo (or quadrature) rate estimate in bit per N-dimensional symbol."""

    gmi: float
    mi: float
    stderr: float
    mi_stderr: float
    n_samples: int
    method: str
    snr_db: float

    def as_row(self) -> dict:
        return {
            "snr_db": self.snr_db,
            "gmi": self.gmi,
            "mi": self.mi,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "method": self.method,
        }


def _metrics(y: np.ndarray, points: np.ndarray, log_prior: np.ndarray, sigma2: float):
    """Log-likelihood-plus-prior matrix ``(n, M)`` up to a per-row constant."""
    e = np.sum(points**2, axis=1)
    return (2.0 * (y @ points.T) - e[None, :]) / (2.0 * sigma2) + log_prior[None, :]


def _llrs_from_metrics(d: np.ndarray, labels: np.ndarray, method: str):
    """LLRs ``ln P(b=0|y) / P(b=1|y)`` plus the row maxima and normalized exponentials."""
    mx = d.max(axis=1, keepdims=True)
    if method == "maxlog":
        out = np.empty((d.shape[0], labels.shape[1]))
        for k in range(labels.shape[1]):
            ones = labels[:, k].astype(bool)
            out[:, k] = d[:, ~ones].max(axis=1) - d[:, ones].max(axis=1)
        p = np.exp(d - mx)
    elif method == "exact":
        p = np.exp(d - mx)
        bf = labels.astype(float)
        s1 = p @ bf
        s0 = p @ (1.0 - bf)
        with np.errstate(divide="ignore"):
            out = np.log(s0) - np.log(s1)
    else:
        raise ValueError(f"unknown LLR method {method!r}")
    return np.clip(out, -LLR_CLAMP, LLR_CLAMP), mx[:, 0], p


def awgn_llrs(c: LabeledConstellation, spec: AwgnSpec, rx, method: str = "exact", tx_bits=None) -> LlrBatch:
    """Bit-wise LLRs of received symbols ``rx`` (shape ``(n, N)``).

    Parameters
    ----------
    method : {"exact", "maxlog"}
        Exact log-sum-exp or the max-log approximation.
    """
    rx = np.atleast_2d(np.asarray(rx, dtype=float))
    if rx.shape[1] != c.N:
        raise ValueError(f"received symbols have {rx.shape[1]} dims, constellation {c.N}")
    with np.errstate(divide="ignore"):
        log_prior = np.log(spec.priors(c.M))
    d = _metrics(rx, c.points, log_prior, spec.sigma2)
    llr, _, _ = _llrs_from_metrics(d, c.labels, method)
    return LlrBatch(llr, None if tx_bits is None else np.asarray(tx_bits, np.uint8), method, spec)


def _chunk(c, spec, n, rng, method, log_prior, cdf):
    """Per-sample bit-metric loss and symbol-metric loss (bits) for one chunk."""
    if cdf is None:
        idx = rng.integers(c.M, size=n)
    else:
        idx = np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), c.M - 1)
    y = c.points[idx] + rng.standard_normal((n, c.N)) * np.sqrt(spec.sigma2)
    d = _metrics(y, c.points, log_prior, spec.sigma2)
    llr, mx, p = _llrs_from_metrics(d, c.labels, method)
    signed = np.where(c.labels[idx] == 0, -llr, llr)
    bit_loss = np.logaddexp(0.0, signed).sum(axis=1) / _LN2
    sym_loss = (np.log(p.sum(axis=1)) + mx - d[np.arange(n), idx]) / _LN2
    return bit_loss, sym_loss


def _estimate(c, spec, n_samples, seed, method, chunk_size, threads):
    if n_samples < 1000:
        raise ValueError("n_samples must be at least 1000")
    priors = spec.priors(c.M)
    with np.errstate(divide="ignore"):
        log_prior = np.log(priors)
    cdf = None if spec.probabilities is None else np.cumsum(priors)
    sizes = [chunk_size] * (n_samples // chunk_size)
    if n_samples % chunk_size:
        sizes.append(n_samples % chunk_size)

    def work(i):
        b, s = _chunk(c, spec, sizes[i], chunk_rng(seed, i), method, log_prior, cdf)
        return b.sum(), (b**2).sum(), s.sum(), (s**2).sum()

    threads = threads or default_threads()
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(i) for i in range(len(sizes))]
    tot = np.zeros(4)
    for part in parts:  # fixed chunk-index order
        tot += part
    n = n_samples
    h = spec.entropy(c.M)
    b_mean, s_mean = tot[0] / n, tot[2] / n
    b_se = np.sqrt(max(tot[1] / n - b_mean**2, 0.0) / n)
    s_se = np.sqrt(max(tot[3] / n - s_mean**2, 0.0) / n)
    return RateReport(float(h - b_mean), float(h - s_mean), float(b_se), float(s_se), n, method, spec.snr_db)


def gmi_mc(
    c: LabeledConstellation,
    spec: AwgnSpec,
    n_samples: int = 1_000_000,
    seed: int = 0,
    method: str = "exact",
    chunk_size: int = 50_000,
    threads: int | None = None,
) -> RateReport:
    """Monte-Carlo GMI of a bit-metric decoder over AWGN.

    The estimate is ``H(X) - sum_k E[log2(1 + exp(-(-1)**b_k * lambda_k))]``,
    which reduces to the usual ``m - ...`` for uniform input. Chunks draw from
    independent streams keyed by ``(seed, chunk index)`` and are reduced in
    index order, so the result does not depend on ``threads``. The MI of the
    same samples is reported alongside.
    """
    return _estimate(c, spec, n_samples, seed, method, chunk_size, threads)


def mutual_information(
    c: LabeledConstellation,
    spec: AwgnSpec,
    n_samples: int = 1_000_000,
    seed: int = 0,
    chunk_size: int = 50_000,
    threads: int | None = None,
) -> RateReport:
    """Monte-Carlo symbol-wise MI; shares the sample stream of :func:`gmi_mc`."""
    return _estimate(c, spec, n_samples, seed, "exact", chunk_size, threads)


# ------------------------------------------------------------ quadrature ---


def _product_factors(c: LabeledConstellation, priors: np.ndarray):
    """Split a 2D-product constellation into per-polarization factors.

    Returns a list of ``(points2d, labels2d, probs2d)`` or raises ``ValueError``.
    """
    if c.N % 2:
        raise ValueError("quadrature needs an even number of real dimensions")
    factors = []
    n_total = 1
    for d0 in range(0, c.N, 2):
        dims = [d0, d0 + 1]
        uniq, inv = np.unique(c.points[:, dims], axis=0, return_inverse=True)
        inv = inv.ravel()
        bits = []
        for k in range(c.m):
            col = c.labels[:, k]
            # bit k belongs to this factor if it is constant on each factor point
            lo = np.full(len(uniq), 2)
            hi = np.full(len(uniq), -1)
            np.minimum.at(lo, inv, col)
            np.maximum.at(hi, inv, col)
            if np.all(lo == hi):
                bits.append(k)
        lab = np.zeros((len(uniq), len(bits)), np.uint8)
        lab[inv] = c.labels[:, bits]
        prob = np.bincount(inv, weights=priors, minlength=len(uniq))
        factors.append((uniq, lab, prob, bits, inv))
        n_total *= len(uniq)
    used = sorted(k for f in factors for k in f[3])
    if n_total != c.M or used != list(range(c.m)):
        raise ValueError("constellation is not a Cartesian product of labeled 2D factors")
    joint = np.ones(c.M)
    for f in factors:
        joint *= f[2][f[4]]
    if not np.allclose(joint, priors, atol=1e-12):
        raise ValueError("input distribution does not factor across polarizations")
    return [(f[0], f[1], f[2]) for f in factors]


def gmi_quadrature_2d(c: LabeledConstellation, spec: AwgnSpec, nodes: int = 64) -> RateReport:
    """Deterministic GMI of a product of 2D constellations by Gauss-Hermite quadrature.

    Each 2D factor contributes ``H(X_f) - sum_k E[log2(1 + exp(-+lambda_k))]``
    evaluated with a ``nodes x nodes`` product rule; the factor rates add.
    MI is evaluated on the same grid.
    """
    priors = spec.priors(c.M)
    factors = _product_factors(c, priors)
    x, w = np.polynomial.hermite.hermgauss(nodes)
    sigma = np.sqrt(spec.sigma2)
    # integrate E_n[f(n)] for n ~ N(0, sigma^2 I_2)
    gx, gy = np.meshgrid(x, x, indexing="ij")
    noise = np.sqrt(2.0) * sigma * np.stack([gx.ravel(), gy.ravel()], axis=1)
    wts = (np.outer(w, w).ravel()) / np.pi
    gmi = mi = 0.0
    for pts, lab, prob in factors:
        with np.errstate(divide="ignore"):
            log_prior = np.log(prob)
        p_nz = prob[prob > 0]
        h = float(-np.sum(p_nz * np.log2(p_nz)))
        bit_loss = sym_loss = 0.0
        for j in np.flatnonzero(prob > 0):
            y = pts[j] + noise
            d = _metrics(y, pts, log_prior, spec.sigma2)
            llr, mx, p = _llrs_from_metrics(d, lab, "exact")
            signed = np.where(lab[j] == 0, -llr, llr)
            bl = np.logaddexp(0.0, signed).sum(axis=1) / _LN2
            sl = (np.log(p.sum(axis=1)) + mx - d[:, j]) / _LN2
            bit_loss += prob[j] * float(wts @ bl)
            sym_loss += prob[j] * float(wts @ sl)
        gmi += h - bit_loss
        mi += h - sym_loss
    return RateReport(float(gmi), float(mi), 0.0, 0.0, nodes * nodes, "quadrature", spec.snr_db)


def snr_for_rate(
    c: LabeledConstellation,
    target: float,
    lo_db: float = 0.0,
    hi_db: float = 20.0,
    n_samples: int = 1_000_000,
    seed: int = 0,
    method: str = "exact",
    rate: str = "gmi",
    tol_db: float = 1e-3,
    threads: int | None = None,
) -> float:
    """SNR (dB) at which the estimated ``rate`` ("gmi" or "mi") equals ``target``.

    Bisection with the same seed at every SNR, so the estimate is a smooth,
    increasing function of the SNR up to Monte-Carlo bias.
    """
    def f(s):
        r = gmi_mc(c, AwgnSpec(s), n_samples, seed, method, threads=threads)
        return (r.gmi if rate == "gmi" else r.mi) - target

    flo, fhi = f(lo_db), f(hi_db)
    if flo > 0 or fhi < 0:
        raise ValueError(f"target {target} not bracketed by [{lo_db}, {hi_db}] dB")
    while hi_db - lo_db > tol_db:
        mid = 0.5 * (lo_db + hi_db)
        if f(mid) < 0:
            lo_db = mid
        else:
            hi_db = mid
    return 0.5 * (lo_db + hi_db)
