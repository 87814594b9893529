"""Averaging over a uniformly spread dot-1 level lowers the current
but leaves the positions of the flux extrema unchanged."""
import numpy as np

from majorana_dqd.analytic import averaged_current, averaged_current_quadrature
from majorana_dqd.model import reference_params

G = 0.01
phis = np.linspace(0, 2 * np.pi, 129)

for D in (0.01 * G, G, 5 * G, 10 * G):
    cur = np.array([averaged_current(reference_params(phi=phi, Delta=D)) for phi in phis])
    check = averaged_current_quadrature(reference_params(phi=1.0, Delta=D))
    print(f"Delta = {D / G:5.2f} Gamma   mean I = {cur.mean() / G:.5f} Gamma   "
          f"argmax phi = {phis[cur.argmax()]:.4f}   argmin phi = {phis[cur.argmin()]:.4f}   "
          f"quad/arctan - 1 at phi=1: {check / averaged_current(reference_params(phi=1.0, Delta=D)) - 1:.1e}")
