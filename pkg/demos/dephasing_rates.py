"""Dephasing of the dot-1 level can raise the current when the dots are detuned."""
import numpy as np

from majorana_dqd.analytic import NoInteriorMaximum, current_closed_form, gamma_star, gamma_zero
from majorana_dqd.model import build_effective_model, reference_params
from majorana_dqd.redfield import solve

G = 0.01
gammas = np.linspace(0, 20 * G, 41)

for d in (0.0, G, 2 * G):
    p = reference_params(eps1=d)
    cur = [solve(build_effective_model(p.replace(gamma=g))).current for g in gammas]
    try:
        gs = f"{gamma_star(p) / G:g} Gamma"
    except NoInteriorMaximum:
        gs = "none"
    g0 = gamma_zero(p)
    print(f"delta = {d / G:g} Gamma: numeric argmax gamma = {gammas[np.argmax(cur)] / G:.1f} Gamma, "
          f"gamma* = {gs}, gamma0 = {g0 / G:g} Gamma")

p = reference_params(eps1=2 * G)
print("I(6 Gamma) - I(0) at delta = 2 Gamma:", current_closed_form(p.replace(gamma=6 * G)) - current_closed_form(p))
