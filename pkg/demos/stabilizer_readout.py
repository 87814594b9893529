"""Reading out a plaquette stabilizer through the double-dot interferometer.

The plaquette-mediated coupling replaces the single-island amplitude in the
four-state model; the two stabilizer values give flux patterns shifted by pi.
"""
import numpy as np

from majorana_dqd.analytic import current_closed_form, visibility_closed_form
from majorana_dqd.model import reference_params, stabilizer_effective_coupling

G = 0.01
t = 0.5  # island-island tunnelling, in units of E_C = 1
for dng in ((0, 0, 0, 0), (0.1, 0.1, 0, 0)):
    for Z in (1, -1):
        v = stabilizer_effective_coupling(0.3, 0.3, t, t, t, t, 1.0, dng=dng, Z=Z)
        p = reference_params(mediated=np.conj(v), lambda0=0.02)
        cur = [current_closed_form(p.replace(phi=phi)) for phi in np.linspace(0, 2 * np.pi, 5)]
        print(f"dn_g={dng} Z={Z:+d}: coupling {v:.3e}, V = {visibility_closed_form(p):.3f}, "
              f"I(phi)/Gamma = {np.round(np.array(cur) / G, 4)}")
