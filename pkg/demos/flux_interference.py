"""Flux dependence of the steady current for the two qubit states.

Compares the closed form, the four-state master equation and the
twelve-state model with the island charge states kept explicitly.
"""
import warnings

import numpy as np

from majorana_dqd.analytic import current_closed_form
from majorana_dqd.model import build_effective_model, build_full_model, reference_params
from majorana_dqd.redfield import PositivityWarning, solve

warnings.simplefilter("ignore", PositivityWarning)
G = 0.01

# %% Flux sweep at zero detuning
phis = np.linspace(0, 2 * np.pi, 9)
print(" phi/pi    z   closed form   4-state     12-state")
for z in (1, -1):
    for phi in phis:
        p = reference_params(phi=phi, z=z)
        i_cf = current_closed_form(p)
        i_4 = solve(build_effective_model(p)).current
        i_12 = solve(build_full_model(p)).current
        print(f"{phi / np.pi:6.3f}  {z:+d}   {i_cf / G:9.6f}   {i_4 / G:9.6f}   {i_12 / G:9.6f}")

# %% The two curves are the same pattern shifted by pi
p = reference_params(phi=0.3)
print("I(0.3, z=+1) - I(0.3 + pi, z=-1) =",
      current_closed_form(p) - current_closed_form(p.replace(phi=0.3 + np.pi, z=-1)))

# %% Detuning sharpens the pattern
for d in (0.0, G, 2 * G):
    cur = [current_closed_form(reference_params(phi=phi, eps1=d)) for phi in np.linspace(0, 2 * np.pi, 401)]
    print(f"delta = {d / G:g} Gamma: I ranges {min(cur) / G:.4f} .. {max(cur) / G:.4f} Gamma")
