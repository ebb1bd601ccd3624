"""Waveform-level building blocks: pulse shaping, WDM, split-step propagation, EDFA, DSP.

Waveforms are complex arrays of shape ``(2, n)`` (X and Y polarization) in
units of sqrt(W). Frequencies follow the ``numpy.fft`` convention and
physical quantities are SI internally.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import PLANCK, FiberParams

__all__ = [
    "PropagationError",
    "symbols_to_field",
    "field_to_symbols",
    "rrc_taps",
    "rrc_shape",
    "matched_filter",
    "channel_bins",
    "wdm_mux",
    "wdm_demux",
    "dispersion_response",
    "propagate_span",
    "edfa",
    "ls_block_scaling",
    "effective_snr",
]


class PropagationError(FloatingPointError):
    """Non-finite field during split-step integration."""

    def __init__(self, step: int, z_km: float):
        super().__init__(f"non-finite field after step {step} (z = {z_km:.3f} km)")
        self.step = step
        self.z_km = z_km


def symbols_to_field(symbols: np.ndarray) -> np.ndarray:
    """``(n, 4)`` real ``[XI, XQ, YI, YQ]`` rows to a ``(2, n)`` complex array."""
    s = np.asarray(symbols, dtype=float)
    return np.stack([s[:, 0] + 1j * s[:, 1], s[:, 2] + 1j * s[:, 3]])


def field_to_symbols(field: np.ndarray) -> np.ndarray:
    return np.stack([field[0].real, field[0].imag, field[1].real, field[1].imag], axis=1)


def rrc_taps(rolloff: float, sps: int, span: int) -> np.ndarray:
    """Root-raised-cosine impulse response over ``span`` symbols, unit energy.

    Raises
    ------
    ValueError
        If ``span < 16`` symbols or the rolloff is outside ``(0, 1]``.
    """
    if not 0 < rolloff <= 1:
        raise ValueError("rolloff must lie in (0, 1]")
    if span < 16:
        raise ValueError(f"filter span of {span} symbols is too short (minimum 16)")
    b = rolloff
    t = np.arange(-span * sps // 2, span * sps // 2 + 1) / sps
    h = np.empty_like(t)
    zero = np.isclose(t, 0.0)
    sing = np.isclose(np.abs(t), 1 / (4 * b))
    reg = ~(zero | sing)
    tr = t[reg]
    h[reg] = (np.sin(np.pi * tr * (1 - b)) + 4 * b * tr * np.cos(np.pi * tr * (1 + b))) / (
        np.pi * tr * (1 - (4 * b * tr) ** 2)
    )
    h[zero] = 1 - b + 4 * b / np.pi
    h[sing] = b / np.sqrt(2) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * b)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * b))
    )
    return h / np.sqrt(np.sum(h**2))


def _circular_filter(x: np.ndarray, taps: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    if len(taps) > n:
        raise ValueError("filter longer than the signal")
    kernel = np.zeros(n)
    half = len(taps) // 2
    kernel[: len(taps)] = taps
    kernel = np.roll(kernel, -half)  # zero-phase: tap centre at index 0
    return np.fft.ifft(np.fft.fft(x, axis=-1) * np.fft.fft(kernel), axis=-1)


def rrc_shape(field: np.ndarray, rolloff: float, sps: int, span: int = 64) -> np.ndarray:
    """Upsample symbols ``(2, n)`` by ``sps`` and RRC-filter them (circularly).

    With unit-energy taps the output carries ``1 / sps`` of the symbol energy
    per sample.
    """
    up = np.zeros((field.shape[0], field.shape[1] * sps), dtype=complex)
    up[:, ::sps] = field
    return _circular_filter(up, rrc_taps(rolloff, sps, span))


def matched_filter(wave: np.ndarray, rolloff: float, sps: int, span: int = 64) -> np.ndarray:
    """RRC matched filter followed by downsampling to one sample per symbol."""
    return _circular_filter(wave, rrc_taps(rolloff, sps, span))[:, ::sps]


def channel_bins(n_channels: int, spacing_hz: float, fs: float, n_samples: int) -> np.ndarray:
    """Integer FFT-bin offsets of each carrier relative to the centre channel."""
    df = fs / n_samples
    k = np.arange(n_channels) - n_channels // 2
    return np.round(k * spacing_hz / df).astype(int)


def wdm_mux(waves, spacing_hz: float, fs: float, bandwidth_hz: float | None = None) -> np.ndarray:
    """Frequency-shift each channel by an integer number of FFT bins and sum.

    Raises
    ------
    ValueError
        If an outer channel (with ``bandwidth_hz`` two-sided width) would
        cross the Nyquist edge.
    """
    waves = [np.asarray(w) for w in waves]
    n = waves[0].shape[-1]
    bins = channel_bins(len(waves), spacing_hz, fs, n)
    if bandwidth_hz is not None:
        edge = np.max(np.abs(bins)) * fs / n + bandwidth_hz / 2
        if edge > fs / 2:
            raise ValueError(f"aliasing: channel edge at {edge / 1e9:.2f} GHz exceeds fs/2 = {fs / 2e9:.2f} GHz")
    spec = np.zeros((waves[0].shape[0], n), dtype=complex)
    for w, b in zip(waves, bins):
        spec += np.roll(np.fft.fft(w, axis=-1), b, axis=-1)
    return np.fft.ifft(spec, axis=-1)


def wdm_demux(wave: np.ndarray, index: int, n_channels: int, spacing_hz: float, fs: float,
              bandwidth_hz: float | None = None) -> np.ndarray:
    """Bring channel ``index`` to baseband and keep ``|f| <= bandwidth_hz / 2``."""
    n = wave.shape[-1]
    b = channel_bins(n_channels, spacing_hz, fs, n)[index]
    spec = np.roll(np.fft.fft(wave, axis=-1), -b, axis=-1)
    if bandwidth_hz is not None:
        f = np.fft.fftfreq(n, 1 / fs)
        spec[:, np.abs(f) > bandwidth_hz / 2] = 0.0
    return np.fft.ifft(spec, axis=-1)


def dispersion_response(n: int, fs: float, beta2_s2_per_m: float, length_m: float) -> np.ndarray:
    """Lossless dispersion transfer function ``exp(j beta2 / 2 * w**2 * L)``."""
    w = 2 * np.pi * np.fft.fftfreq(n, 1 / fs)
    return np.exp(0.5j * beta2_s2_per_m * w**2 * length_m)


def propagate_span(wave: np.ndarray, fiber: FiberParams, fs: float, check_every: int = 50) -> np.ndarray:
    """Symmetric split-step integration of the Manakov equation over one span.

    Half linear steps (attenuation and dispersion) surround full nonlinear
    steps that rotate both polarizations by ``gamma * 8/9 * (|Ax|**2 + |Ay|**2)
    * L_w``. The power is sampled mid-step, so the weight
    ``L_w = 2 sinh(alpha dz / 2) / alpha`` is the effective length of the step
    referred to its midpoint; a continuous wave then accumulates exactly
    ``gamma * 8/9 * P0 * L_eff`` over a span. Consecutive half steps are merged.
    """
    n = wave.shape[-1]
    L = fiber.span_length_km * 1e3
    n_steps = max(1, int(round(fiber.span_length_km / fiber.step_size_km)))
    dz = L / n_steps
    alpha = fiber.alpha_per_km / 1e3
    beta2 = fiber.beta2_ps2_per_km * 1e-24 / 1e3
    gamma = fiber.gamma_per_w_km / 1e3 * 8.0 / 9.0
    w = 2 * np.pi * np.fft.fftfreq(n, 1 / fs)
    lin = -alpha / 2 + 0.5j * beta2 * w**2
    half = np.exp(lin * dz / 2)
    full = half * half
    leff = dz if alpha == 0 else 2.0 * np.sinh(alpha * dz / 2) / alpha
    spec = np.fft.fft(wave, axis=-1) * half
    for k in range(n_steps):
        a = np.fft.ifft(spec, axis=-1)
        if gamma:
            power = np.abs(a[0]) ** 2 + np.abs(a[1]) ** 2
            a = a * np.exp(1j * gamma * leff * power)
        spec = np.fft.fft(a, axis=-1) * (full if k < n_steps - 1 else half)
        if (k % check_every == 0 or k == n_steps - 1) and not np.all(np.isfinite(spec)):
            raise PropagationError(k, (k + 1) * dz / 1e3)
    return np.fft.ifft(spec, axis=-1)


def edfa(wave: np.ndarray, gain_db: float, noise_figure_db: float, fs: float, carrier_hz: float,
         rng: np.random.Generator | None) -> np.ndarray:
    """Amplify and add ASE.

    ASE is white and circularly symmetric in each polarization with
    one-sided PSD ``n_sp h f (G - 1)``. The population-inversion factor uses
    ``n_sp = NF / 2 * G / (G - 1)``, so the PSD is ``NF / 2 * h f * G``. The
    noise power per sample is that PSD times the simulation bandwidth ``fs``.
    Unity gain adds no noise, and so does ``rng=None``.
    """
    if gain_db < 0:
        raise ValueError("EDFA gain must be nonnegative")
    G = 10 ** (gain_db / 10)
    out = wave * np.sqrt(G)
    if G == 1.0 or rng is None:
        return out
    nf = 10 ** (noise_figure_db / 10)
    var = nf / 2 * PLANCK * carrier_hz * G * fs
    noise = rng.standard_normal(out.shape) + 1j * rng.standard_normal(out.shape)
    return out + noise * np.sqrt(var / 2)


def ls_block_scaling(rx: np.ndarray, tx: np.ndarray, block: int):
    """Per-block, per-polarization least-squares complex gain, divided out of ``rx``.

    Each block fits ``rx ~ h * tx`` with ``h = sum(conj(tx) rx) / sum(|tx|**2)``
    and returns ``rx / h``. Fitting the gain on the transmitted symbols keeps
    the recovered noise power unbiased; regressing ``tx`` on ``rx`` instead
    would shrink it and report ``1 + SNR``.

    Returns
    -------
    recovered : ndarray
        Scaled symbols ``(2, n)``.
    phase : ndarray
        Fitted channel phase ``angle(h)`` of every block, ``(2, n // block)``.
    """
    n = rx.shape[-1]
    if n % block:
        raise ValueError(f"block length {block} does not divide {n} symbols")
    r = rx.reshape(2, -1, block)
    t = tx.reshape(2, -1, block)
    h = np.sum(np.conj(t) * r, axis=-1) / np.sum(np.abs(t) ** 2, axis=-1)
    return (r / h[..., None]).reshape(2, n), np.angle(h)


def effective_snr(recovered: np.ndarray, tx: np.ndarray, Es: float = 2.0) -> tuple[float, float]:
    """``Es / E||e||**2`` in dB over 4D symbols and the noise variance per real dimension."""
    err = np.mean(np.sum(np.abs(recovered - tx) ** 2, axis=0))
    return float(10 * np.log10(Es / err)), float(err / 4)
