"""Fiber and link parameters with a JSON representation whose keys carry units."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace

import numpy as np
from scipy.constants import c as LIGHT_SPEED
from scipy.constants import h as PLANCK

__all__ = ["FiberParams", "LinkConfig", "load_config", "dump_config", "PLANCK", "LIGHT_SPEED"]


@dataclass(frozen=True)
class FiberParams:
    """Standard single-mode fiber span.

    Attributes
    ----------
    alpha_db_per_km : float
        Power attenuation.
    dispersion_ps_per_nm_km : float
        Chromatic dispersion parameter ``D``.
    gamma_per_w_km : float
        Nonlinear coefficient.
    span_length_km : float
    step_size_km : float
        Split-step length.
    wavelength_nm : float
        Carrier wavelength.
    """

    alpha_db_per_km: float = 0.21
    dispersion_ps_per_nm_km: float = 16.9
    gamma_per_w_km: float = 1.31
    span_length_km: float = 75.0
    step_size_km: float = 0.1
    wavelength_nm: float = 1550.0

    def __post_init__(self):
        for f in ("span_length_km", "step_size_km", "wavelength_nm"):
            if not getattr(self, f) > 0:
                raise ValueError(f"{f} must be positive")
        for f in ("alpha_db_per_km", "gamma_per_w_km", "dispersion_ps_per_nm_km"):
            if getattr(self, f) < 0:
                raise ValueError(f"{f} must be nonnegative")
        if self.step_size_km > self.span_length_km:
            raise ValueError("step size exceeds span length")

    @property
    def alpha_per_km(self) -> float:
        """Power attenuation in 1/km (linear units)."""
        return self.alpha_db_per_km / (10 * np.log10(np.e))

    @property
    def beta2_ps2_per_km(self) -> float:
        """Group-velocity dispersion ``-D lambda**2 / (2 pi c)``."""
        lam = self.wavelength_nm * 1e-9
        D = self.dispersion_ps_per_nm_km * 1e-6  # s/m^2
        return -D * lam**2 / (2 * np.pi * LIGHT_SPEED) * 1e24 * 1e3  # ps^2/km

    @property
    def span_loss_db(self) -> float:
        return self.alpha_db_per_km * self.span_length_km

    @property
    def carrier_hz(self) -> float:
        return LIGHT_SPEED / (self.wavelength_nm * 1e-9)


@dataclass(frozen=True)
class LinkConfig:
    """WDM link settings. ``samples_per_symbol = 0`` picks the smallest power of two that covers the band."""

    n_channels: int = 3
    symbol_rate_gbd: float = 41.79
    channel_spacing_ghz: float = 50.0
    rrc_rolloff: float = 0.1
    rrc_span_symbols: int = 64
    n_spans: int = 10
    launch_power_dbm: float = 0.0
    edfa_noise_figure_db: float = 5.0
    samples_per_symbol: int = 0
    n_symbols: int = 4096
    block_length: int = 1024
    seed: int = 0

    def __post_init__(self):
        if self.n_channels < 1:
            raise ValueError("at least one channel is required")
        if self.n_symbols < 1 or self.n_symbols & (self.n_symbols - 1):
            raise ValueError("n_symbols must be a power of two")
        if not 0 < self.rrc_rolloff <= 1:
            raise ValueError("rolloff must lie in (0, 1]")
        if self.n_spans < 0:
            raise ValueError("span count must be nonnegative")
        if self.samples_per_symbol and self.samples_per_symbol * self.symbol_rate_gbd < self.band_ghz:
            raise ValueError(
                f"sample rate {self.samples_per_symbol * self.symbol_rate_gbd:.2f} GHz "
                f"does not cover the {self.band_ghz:.2f} GHz WDM band"
            )

    @property
    def band_ghz(self) -> float:
        """Two-sided bandwidth spanned by all channels including roll-off."""
        return (self.n_channels - 1) * self.channel_spacing_ghz + (1 + self.rrc_rolloff) * self.symbol_rate_gbd

    @property
    def sps(self) -> int:
        if self.samples_per_symbol:
            return self.samples_per_symbol
        s = 1
        while s * self.symbol_rate_gbd < self.band_ghz:
            s *= 2
        return s

    @property
    def center_channel(self) -> int:
        return self.n_channels // 2

    @property
    def launch_power_w(self) -> float:
        return 1e-3 * 10 ** (self.launch_power_dbm / 10)

    @property
    def total_power_dbm(self) -> float:
        return self.launch_power_dbm + 10 * np.log10(self.n_channels)


_SECTIONS = {"fiber": FiberParams, "link": LinkConfig}


def dump_config(link: LinkConfig, fiber: FiberParams) -> str:
    return json.dumps({"fiber": asdict(fiber), "link": asdict(link)}, indent=2) + "\n"


def load_config(text: str) -> tuple[LinkConfig, FiberParams]:
    """Parse a JSON config with optional ``fiber`` and ``link`` sections.

    Unknown keys are rejected so unit typos do not pass silently.
    """
    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(raw) - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    out = {}
    for name, cls in _SECTIONS.items():
        sect = raw.get(name, {})
        allowed = {f.name for f in fields(cls)}
        bad = set(sect) - allowed
        if bad:
            raise ValueError(f"unknown {name} keys: {sorted(bad)}")
        out[name] = replace(cls(), **sect)
    return out["link"], out["fiber"]
