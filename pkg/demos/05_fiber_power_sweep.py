"""
Launch-power sweep over a short WDM link
========================================

Three channels at 50 GHz over 10 x 75 km of standard fiber. Too little
power and amplifier noise dominates; too much and Kerr nonlinearity does.
The full desk-scale link costs about 15 s per point, so this sweep uses
2 spans and a coarse step and finishes in seconds.
"""

from dataclasses import replace

from shape4d.fiber import FiberParams, LinkConfig, dump_config, power_sweep
from shape4d.formats import builtin

fiber = FiberParams(step_size_km=0.5)
link = LinkConfig(n_spans=2, n_symbols=2048, block_length=1024)

for name in ("4d-os128", "7b4d-2a8psk"):
    print(name)
    for p, r in power_sweep(link, fiber, builtin(name), [0.0, 4.0, 8.0, 12.0]):
        print(f"  {p:5.1f} dBm  eff. SNR {r.eff_snr_db:6.2f} dB  GMI {r.gmi:.4f}")

# The configuration round-trips through JSON for the CLI (--config).
print(dump_config(replace(link, launch_power_dbm=4.0), fiber))
