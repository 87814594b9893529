"""Visibility of the flux oscillation versus dephasing rate."""
import numpy as np

from majorana_dqd.analytic import visibility_closed_form, visibility_from_sweep, visibility_turnover
from majorana_dqd.model import reference_params

G = 0.01
gammas = np.linspace(0, 20 * G, 81)

print("V(gamma=0, delta=0) =", visibility_closed_form(reference_params()), " (4/41 =", 4 / 41, ")")
for d in (0.0, 0.5 * G, G, 1.5 * G, 2 * G, 3 * G):
    v = np.array([visibility_closed_form(reference_params(eps1=d, gamma=g)) for g in gammas])
    sweep = visibility_from_sweep(reference_params(eps1=d, gamma=4 * G))
    turn = visibility_turnover(reference_params(eps1=d))
    shape = "monotone" if np.all(np.diff(v) > 0) else f"minimum at {gammas[v.argmin()] / G:.2f} Gamma"
    print(f"delta = {d / G:3.1f} Gamma: {shape:24s} turnover formula {max(turn, 0) / G:.2f} Gamma; "
          f"sweep-closed form at gamma=4 Gamma: {sweep - visibility_closed_form(reference_params(eps1=d, gamma=4 * G)):.1e}")
