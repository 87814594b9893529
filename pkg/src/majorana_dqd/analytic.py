"""Closed-form currents, characteristic dephasing rates and visibility.

These hold for the four-state effective model with large-bias leads.  Each
formula is written out term by term (no shared simplifications) so that the
numerical engine independently checks each one.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import effective_coupling

EQUAL_RATES_RTOL = 1e-12


class NoInteriorMaximum(ValueError):
    """The current has no maximum at positive dephasing rate."""


@dataclass(frozen=True)
class DerivedRates:
    delta: float
    Gamma_t: float  # Gamma1 + Gamma2 + gamma
    K: float  # Gamma_t**2 + 4 delta**2
    B: float  # 4|Omega|^2 (Gamma1 + Gamma2) + Gamma1 Gamma2 Gamma_t


def omega_sq(p):
    return abs(effective_coupling(p).Omega) ** 2


def derived_rates(p):
    G1, G2 = p.Gamma1, p.Gamma2
    Gt = G1 + G2 + p.gamma
    return DerivedRates(
        delta=p.delta,
        Gamma_t=Gt,
        K=Gt**2 + 4 * p.delta**2,
        B=4 * omega_sq(p) * (G1 + G2) + G1 * G2 * Gt,
    )


def current_coherent(p):
    """Steady current without dephasing (gamma ignored)."""
    G1, G2, O2, d = p.Gamma1, p.Gamma2, omega_sq(p), p.delta
    return 4 * G1 * G2 * (G1 + G2) * O2 / ((4 * O2 + G1 * G2) * (G1 + G2) ** 2 + 4 * G1 * G2 * d**2)


def current_closed_form(p):
    """Steady current with dot-1 level dephasing at rate p.gamma."""
    G1, G2, O2 = p.Gamma1, p.Gamma2, omega_sq(p)
    r = derived_rates(p)
    return 4 * O2 * G1 * G2 * r.Gamma_t / (r.B * r.Gamma_t + 4 * G1 * G2 * r.delta**2)


def populations(p):
    """Steady (rho_22, rho_44)."""
    G1, G2, O2 = p.Gamma1, p.Gamma2, omega_sq(p)
    r = derived_rates(p)
    rho22 = 4 * O2 * G1 * G2 * r.Gamma_t / ((r.B * r.Gamma_t + 4 * r.delta**2 * G1 * G2) * (G1 + G2))
    return rho22, G1 / G2 * rho22


def dcurrent_dgamma(p):
    G1, G2, O2 = p.Gamma1, p.Gamma2, omega_sq(p)
    r = derived_rates(p)
    return (4 * O2 * G1**2 * G2**2 * (4 * r.delta**2 - r.Gamma_t**2)
            / (r.B * r.Gamma_t + 4 * G1 * G2 * r.delta**2) ** 2)


def averaged_current(p):
    """Coherent current averaged over eps1' uniform on [eps1 - Delta, eps1 + Delta]."""
    if p.gamma != 0:
        raise ValueError("the level-averaged current is defined for gamma = 0")
    if p.Delta == 0:
        return current_coherent(p)
    G1, G2, O2, d, D = p.Gamma1, p.Gamma2, omega_sq(p), p.delta, p.Delta
    root = np.sqrt(G1 * G2 / (4 * O2 + G1 * G2))
    pref = G1 * G2 * O2 / (D * np.sqrt(G1 * G2 * (4 * O2 + G1 * G2)))
    return pref * (np.arctan(2 * root * (d + D) / (G1 + G2)) - np.arctan(2 * root * (d - D) / (G1 + G2)))


def averaged_current_quadrature(p, epsabs=1e-16, epsrel=1e-12):
    """Direct numerical average of current_coherent over the level window."""
    if p.Delta == 0:
        return current_coherent(p)

    def integrand(e1):
        return current_coherent(p.replace(eps1=e1, Delta=0.0))

    val, _ = integrate.quad(integrand, p.eps1 - p.Delta, p.eps1 + p.Delta,
                            epsabs=epsabs, epsrel=epsrel, limit=200)
    return val / (2 * p.Delta)


def _require_equal_rates(p):
    if not np.isclose(p.Gamma1, p.Gamma2, rtol=EQUAL_RATES_RTOL, atol=0):
        raise ValueError("this characteristic rate assumes Gamma1 == Gamma2")


def gamma_star(p):
    """Dephasing rate that maximizes the current, 2(|delta| - Gamma)."""
    _require_equal_rates(p)
    g = 2 * (abs(p.delta) - p.Gamma1)
    if g < 0:
        raise NoInteriorMaximum(f"no interior maximum: |delta| = {abs(p.delta):.3g} < Gamma")
    return g


def gamma_zero(p):
    """Nonzero dephasing rate whose current equals the gamma = 0 current.

    Only meaningful when positive.
    """
    S = p.Gamma1 + p.Gamma2
    return (4 * p.delta**2 - S**2) / S


def _loop_amplitudes(p):
    lam12 = effective_coupling(p).lambda12 if p.mediated is None else p.mediated
    return abs(p.lambda0), abs(lam12)


def visibility_closed_form(p):
    G1, G2 = p.Gamma1, p.Gamma2
    l0, l12 = _loop_amplitudes(p)
    if l0 * l12 == 0:
        return 0.0
    r = derived_rates(p)
    num = 2 * G1 * G2 * r.K * abs(l0 * l12)
    den = 4 * (G1 + G2) * r.Gamma_t * (l0**2 - l12**2) ** 2 + G1 * G2 * r.K * (l0**2 + l12**2)
    return num / den


def visibility_from_sweep(p, n=1001, current=current_closed_form):
    """(I_max - I_min)/(I_max + I_min) over an n-point phi grid on [0, 2 pi]."""
    vals = np.array([current(p.replace(phi=phi)) for phi in np.linspace(0, 2 * np.pi, n)])
    hi, lo = vals.max(), vals.min()
    return (hi - lo) / (hi + lo)


def visibility_turnover(p):
    """Dephasing rate of minimum visibility, 2|delta| - Gamma1 - Gamma2.

    A value <= 0 means visibility increases monotonically with gamma.
    """
    _require_equal_rates(p)
    return 2 * abs(p.delta) - p.Gamma1 - p.Gamma2
