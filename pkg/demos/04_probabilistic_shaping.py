"""
Finite-length probabilistic shaping
===================================

A Maxwell-Boltzmann PM-16QAM carries 7 bit per 4D symbol like the
geometric formats, but a constant-composition matcher of length n loses
some rate. Short blocks lose enough to fall below 4D-OS128.
"""

from shape4d.formats import builtin
from shape4d.gmi import AwgnSpec, gmi_mc, gmi_quadrature_2d
from shape4d.ps import ccdm_composition, ccdm_rate_loss, ps_pm_qam

c, priors, amps = ps_pm_qam(builtin("pm-16qam"), 7.0)
print("amplitude distribution over {1, 3}:", amps.round(4))

snr = 9.6
gmi = gmi_quadrature_2d(c, AwgnSpec(snr, probabilities=priors)).gmi
os_gmi = gmi_mc(builtin("4d-os128"), AwgnSpec(snr), 200_000).gmi
print(f"at {snr} dB: shaped 16QAM GMI {gmi:.4f}, 4d-os128 GMI {os_gmi:.4f}")

# four amplitude dimensions per 4D symbol, each paying the rate loss
for n in (16, 32, 64, 128, 256):
    rl = ccdm_rate_loss(amps, n)
    print(f"n={n:4d} composition {ccdm_composition(amps, n)} loss {rl:.5f}  AIR {gmi - 4 * rl:.4f}")
