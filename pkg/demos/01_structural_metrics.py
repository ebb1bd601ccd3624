"""
Structure of the built-in 4D formats
====================================

Peak-to-average power, energy spread and minimum distances of the
shipped constellations, all normalized to Es = 2 per 4D symbol.
"""

from shape4d.formats import builtin
from shape4d.metrics import energy_profile, sed_spectrum

# The three 7-bit formats compete at the same spectral efficiency;
# PM-16QAM (8 bit) is the usual reference.
names = ["4d-os128", "128sp-16qam", "7b4d-2a8psk", "pm-16qam"]

print(f"{'format':14s} {'PAPR dB':>8s} {'var':>7s} {'levels':>6s} {'d2min':>7s} {'n_d':>5s}")
for name in names:
    c = builtin(name)
    # a loose level tolerance absorbs the 4-decimal rounding of the seed
    prof = energy_profile(c, level_tol=1e-3)
    spec = sed_spectrum(c)
    print(f"{name:14s} {prof.papr_db:8.3f} {prof.variance:7.4f} {prof.n_levels:6d} "
          f"{spec.msed:7.4f} {spec.msed_pairs:5d}")

# The orthant-symmetric format sits on only three energy shells.
for energy, count in energy_profile(builtin("4d-os128"), level_tol=1e-3).levels:
    print(f"  shell at {energy:.4f}: {count} points")
