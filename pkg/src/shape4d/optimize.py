"""GMI-maximizing constellation design.

Three derivative-free ascents share one evaluator that scores candidates on
a fixed batch of transmitted indices and noise (common random numbers), so
accept/reject decisions compare candidates on identical channel draws. The
batch is redrawn between passes.

* :func:`binary_switching` swaps pairs of labels (points fixed).
* :func:`optimize_os` moves first-orthant seed coordinates and swaps seed
  labels, keeping the constellation orthant symmetric.
* :func:`optimize_unconstrained` perturbs individual points (labels travel
  with their points).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constellation import (
    FirstOrthantSeed,
    LabeledConstellation,
    expand_orthant_symmetric,
    normalize,
)
from .gmi import LLR_CLAMP, AwgnSpec, chunk_rng

__all__ = [
    "OptimizerConfig",
    "TraceRow",
    "OptimizationTrace",
    "CrnEvaluator",
    "binary_switching",
    "optimize_os",
    "optimize_unconstrained",
]

_LN2 = np.log(2.0)
_TINY = 1e-300


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs shared by all ascents.

    Attributes
    ----------
    target_snr_db : float
        SNR at which the GMI is maximized.
    mc_samples : int
        Batch size of each common-random-number evaluation.
    max_iterations : int
        Number of passes (or perturbation steps for the unconstrained ascent).
    step : float
        Initial coordinate step, in units of the normalized constellation.
    decay : float
        Factor applied to the step after a pass without accepted moves.
    min_step : float
        The OS ascent stops once the step falls below this value.
    Es : float
        Power constraint.
    seed : int
        Root of every random stream used by the ascent.
    tol : float
        Smallest batch GMI gain (bits) that counts as an improvement.
    accept_sigma : float
        A coordinate move must also beat this many standard errors of the
        paired per-sample difference on the batch. Zero accepts any gain
        above ``tol``.
    """

    target_snr_db: float = 9.5
    mc_samples: int = 20_000
    max_iterations: int = 50
    step: float = 0.05
    decay: float = 0.5
    min_step: float = 2e-3
    Es: float = 2.0
    seed: int = 0
    tol: float = 1e-6
    accept_sigma: float = 0.0

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.decay < 1:
            raise ValueError("decay must lie in (0, 1)")

    @property
    def spec(self) -> AwgnSpec:
        return AwgnSpec(self.target_snr_db)


@dataclass(frozen=True)
class TraceRow:
    iter: int
    gmi: float
    stderr: float
    step: float
    accepted: int


@dataclass
class OptimizationTrace:
    rows: list = field(default_factory=list)
    final_constellation: LabeledConstellation | None = None
    final_seed: FirstOrthantSeed | None = None
    floor_hits: int = 0

    def to_csv(self) -> str:
        lines = ["iter,gmi,stderr,step,accepted"]
        for r in self.rows:
            lines.append(f"{r.iter},{r.gmi:.10f},{r.stderr:.10f},{r.step:.10g},{r.accepted}")
        return "\n".join(lines) + "\n"


class CrnEvaluator:
    """GMI of arbitrary candidates on one fixed batch of symbols and noise.

    Transmitted indices are stratified (each point sent ``n // M`` times) to
    remove sampling noise in the symbol mix. The unit-variance noise is scaled
    by the channel's sigma at evaluation time.
    """

    def __init__(self, M: int, N: int, spec: AwgnSpec, n: int, rng: np.random.Generator):
        reps = max(1, n // M)
        self.idx = np.repeat(np.arange(M), reps)
        self.noise = rng.standard_normal((len(self.idx), N)) * np.sqrt(spec.sigma2)
        self.sigma2 = spec.sigma2
        self.M = M

    @property
    def n(self) -> int:
        return len(self.idx)

    def _exp_metrics(self, points):
        y = points[self.idx] + self.noise
        e = np.sum(points**2, axis=1)
        d = (2.0 * (y @ points.T) - e[None, :]) / (2.0 * self.sigma2)
        d -= d.max(axis=1, keepdims=True)
        return np.exp(d)

    def per_sample_loss(self, points, labels):
        bf = labels.astype(float)
        p = self._exp_metrics(points)
        with np.errstate(divide="ignore"):
            llr = np.log(p @ (1.0 - bf)) - np.log(p @ bf)
        llr = np.clip(llr, -LLR_CLAMP, LLR_CLAMP)
        signed = np.where(labels[self.idx] == 0, -llr, llr)
        return np.logaddexp(0.0, signed) / _LN2  # (n, m)

    def sample_loss(self, points, labels) -> np.ndarray:
        """Bit-metric loss of every batch sample, shape ``(n,)``."""
        return self.per_sample_loss(points, labels).sum(axis=1)

    def gmi(self, points, labels) -> tuple[float, float]:
        loss = self.sample_loss(points, labels)
        return labels.shape[1] - float(loss.mean()), float(loss.std() / np.sqrt(len(loss)))

    def swap_state(self, points, labels) -> "_SwapState":
        return _SwapState(self, points, labels)


def _improves(base: np.ndarray, cand: np.ndarray, config: "OptimizerConfig") -> bool:
    """Paired comparison of per-sample losses on a common batch."""
    diff = base - cand
    gain = float(diff.mean())
    if gain <= config.tol:
        return False
    if config.accept_sigma <= 0:
        return True
    return gain > config.accept_sigma * float(diff.std()) / np.sqrt(len(diff))


class _SwapState:
    """Incremental bookkeeping for label swaps on a fixed batch.

    Keeps the per-sample sums ``S0 = p @ (1 - B)`` and ``S1 = p @ B`` so a swap
    of the labels of points ``a`` and ``b`` only touches the bit columns where
    the two labels differ.
    """

    def __init__(self, ev: CrnEvaluator, points, labels):
        self.ev = ev
        self.labels = np.array(labels, dtype=np.uint8)
        self.p = ev._exp_metrics(np.asarray(points, dtype=float))
        bf = self.labels.astype(float)
        self.S0 = self.p @ (1.0 - bf)
        self.S1 = self.p @ bf
        self.rows = [np.flatnonzero(ev.idx == k) for k in range(ev.M)]
        self.loss = self._loss(self.S0, self.S1, self.labels[ev.idx])

    @staticmethod
    def _loss(S0, S1, txbits):
        llr = np.log(np.maximum(S0, _TINY)) - np.log(np.maximum(S1, _TINY))
        llr = np.clip(llr, -LLR_CLAMP, LLR_CLAMP)
        return np.logaddexp(0.0, np.where(txbits == 0, -llr, llr)) / _LN2

    def _candidate(self, a, b):
        la, lb = self.labels[a], self.labels[b]
        cols = np.flatnonzero(la != lb)
        delta = (self.p[:, b] - self.p[:, a])[:, None]
        sgn = np.where(la[cols] == 0, 1.0, -1.0)[None, :]
        S0 = self.S0[:, cols] + sgn * delta
        S1 = self.S1[:, cols] - sgn * delta
        tx = self.labels[self.ev.idx][:, cols]
        tx[self.rows[a]] = lb[cols]
        tx[self.rows[b]] = la[cols]
        return cols, S0, S1, self._loss(S0, S1, tx)

    def swap_gain(self, a: int, b: int) -> float:
        cols, _, _, new = self._candidate(a, b)
        return float(self.loss[:, cols].sum() - new.sum()) / self.ev.n

    def commit(self, a: int, b: int) -> None:
        cols, S0, S1, new = self._candidate(a, b)
        self.S0[:, cols], self.S1[:, cols], self.loss[:, cols] = S0, S1, new
        self.labels[[a, b]] = self.labels[[b, a]]

    @property
    def gmi(self) -> float:
        return self.labels.shape[1] - float(self.loss.sum(axis=1).mean())


def binary_switching(
    c: LabeledConstellation, config: OptimizerConfig, spec: AwgnSpec | None = None
) -> tuple[LabeledConstellation, OptimizationTrace]:
    """Greedy pairwise label swapping.

    Each pass draws a fresh batch, scans pairs ``(a, b)`` with ``a < b`` in
    row-major order and accepts the first swap of each pair that raises the
    batch GMI by more than ``config.tol``. The ascent ends after a pass with
    no accepted swap or after ``config.max_iterations`` passes. Points never
    move.
    """
    spec = spec or config.spec
    labels = np.array(c.labels)
    trace = OptimizationTrace()
    for it in range(config.max_iterations):
        ev = CrnEvaluator(c.M, c.N, spec, config.mc_samples, chunk_rng(config.seed, it))
        state = ev.swap_state(c.points, labels)
        accepted = 0
        for a in range(c.M - 1):
            for b in range(a + 1, c.M):
                if state.swap_gain(a, b) > config.tol:
                    state.commit(a, b)
                    accepted += 1
        labels = state.labels.copy()
        g, se = ev.gmi(c.points, labels)
        trace.rows.append(TraceRow(it, g, se, 0.0, accepted))
        if accepted == 0:
            break
    out = c.with_labels(labels)
    trace.final_constellation = out
    return out, trace


def _seed_scale(points: np.ndarray, Es: float) -> np.ndarray:
    # mirroring preserves norms, so the OS mean energy is the seed mean energy
    return points * np.sqrt(Es / np.mean(np.sum(points**2, axis=1)))


def optimize_os(
    seed_init: FirstOrthantSeed, config: OptimizerConfig, spec: AwgnSpec | None = None
) -> tuple[FirstOrthantSeed, OptimizationTrace]:
    """Orthant-symmetric ascent over the first-orthant seed.

    A pass tries ``+step`` then ``-step`` on every seed coordinate (the first
    improving direction is kept), then every swap of two seed labels. Moves
    are scored on the expanded, renormalized constellation. Coordinates are
    floored at ``1e-4 * sqrt(Es / N)``. The step shrinks by ``config.decay``
    after a pass without accepted coordinate moves; the ascent stops when it
    drops below ``config.min_step``.
    """
    spec = spec or config.spec
    if np.any(seed_init.points <= 0):
        raise ValueError("seed coordinates must be strictly positive")
    N = seed_init.N
    eps = 1e-4 * np.sqrt(config.Es / N)
    pts = _seed_scale(np.array(seed_init.points), config.Es)
    lab = np.array(seed_init.labels)
    n_seed = len(pts)
    M = n_seed << N
    trace = OptimizationTrace()
    step = config.step

    def expand(p, l):
        return expand_orthant_symmetric(FirstOrthantSeed(p, l))

    for it in range(config.max_iterations):
        ev = CrnEvaluator(M, N, spec, config.mc_samples, chunk_rng(config.seed, it))
        c = expand(pts, lab)
        base = ev.sample_loss(c.points, c.labels)
        moves = 0
        for j in range(n_seed):
            for d in range(N):
                for sgn in (1.0, -1.0):
                    cand = pts.copy()
                    cand[j, d] += sgn * step
                    if cand[j, d] < eps:
                        cand[j, d] = eps
                        trace.floor_hits += 1
                    cand = _seed_scale(cand, config.Es)
                    cc = expand(cand, lab)
                    loss = ev.sample_loss(cc.points, cc.labels)
                    if _improves(base, loss, config):
                        pts, base = cand, loss
                        moves += 1
                        break
        swaps = 0
        for a in range(n_seed - 1):
            for b in range(a + 1, n_seed):
                cand = lab.copy()
                cand[[a, b]] = cand[[b, a]]
                cc = expand(pts, cand)
                loss = ev.sample_loss(cc.points, cc.labels)
                if _improves(base, loss, config):
                    lab, base = cand, loss
                    swaps += 1
        c = expand(pts, lab)
        g, se = ev.gmi(c.points, c.labels)
        trace.rows.append(TraceRow(it, g, se, step, moves + swaps))
        if moves == 0:
            step *= config.decay
            if step < config.min_step:
                break
    final = FirstOrthantSeed(pts, lab)
    trace.final_seed = final
    trace.final_constellation = normalize(expand(pts, lab), config.Es)
    return final, trace


def optimize_unconstrained(
    c_init: LabeledConstellation,
    config: OptimizerConfig,
    spec: AwgnSpec | None = None,
    pass_length: int | None = None,
) -> tuple[LabeledConstellation, OptimizationTrace]:
    """Perturbation ascent over all point coordinates with a fixed labeling.

    Iteration ``i`` moves point ``i mod M`` by a Gaussian step of size
    ``config.step`` per coordinate, renormalizes to ``Es`` and keeps the move
    if the batch GMI improves by more than ``config.tol``. The batch is
    redrawn every ``pass_length`` iterations (``M`` by default), and the step
    decays after a pass without accepted moves. ``config.max_iterations``
    counts perturbations.
    """
    spec = spec or config.spec
    c = normalize(c_init, config.Es)
    pts, labels = np.array(c.points), c.labels
    M, N = c.M, c.N
    pass_length = pass_length or M
    trace = OptimizationTrace()
    step = config.step
    rng = chunk_rng(config.seed, 1 << 20)
    ev = base = None
    accepted = 0
    for it in range(config.max_iterations):
        if it % pass_length == 0:
            if ev is not None:
                g, se = ev.gmi(pts, labels)
                trace.rows.append(TraceRow(it // pass_length - 1, g, se, step, accepted))
                if accepted == 0:
                    step *= config.decay
            ev = CrnEvaluator(M, N, spec, config.mc_samples, chunk_rng(config.seed, it // pass_length))
            base = ev.sample_loss(pts, labels)
            accepted = 0
        k = it % M
        cand = pts.copy()
        cand[k] += step * rng.standard_normal(N)
        cand *= np.sqrt(config.Es / np.mean(np.sum(cand**2, axis=1)))
        loss = ev.sample_loss(cand, labels)
        if _improves(base, loss, config):
            pts, base = cand, loss
            accepted += 1
    if ev is not None:
        g, se = ev.gmi(pts, labels)
        trace.rows.append(TraceRow((config.max_iterations - 1) // pass_length, g, se, step, accepted))
    out = LabeledConstellation(pts, labels, c_init.name)
    trace.final_constellation = out
    return out, trace
