"""Born-Markov-Redfield transport master equation for the central system.

The generator is

    drho/dt = -i[H, rho]
              - 1/2 sum_j ( [d_j^dag, D_j^- rho - rho D_j^+] + h.c. )
              + gamma ( s rho s^dag - 1/2 {s^dag s, rho} ),

with the lead-dressed operators built in the eigenbasis of H,

    (D_j^+-)_nm = Gamma_j f_j^+-(E_m - E_n) (d_j)_nm,   f^+ = f, f^- = 1 - f,

and the drain current  I = 1/2 Tr[(d_2^dag D_2^- - D_2^+ d_2^dag) rho + h.c.].
No secular approximation is made.
"""

import enum
import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit

from .linalg import (
    dagger,
    devectorize,
    hermitian_eigendecompose,
    left_superop,
    right_superop,
    sandwich_superop,
    solve_linear,
    vectorize,
)
from .model import ModelKind

log = logging.getLogger(__name__)

NULL_SPACE_TOL = 1e-9
STEADY_RESIDUAL_TOL = 1e-10
POSITIVITY_TOL = 1e-8
RK4_STABILITY = 0.1


class LeadMode(enum.Enum):
    GENERAL = "general"
    SOURCE = "source"  # large bias, f == 1
    DRAIN = "drain"  # large bias, f == 0


@dataclass(frozen=True)
class LeadSpec:
    Gamma: float
    mu: float = 0.0
    T: float = 0.0
    mode: LeadMode = LeadMode.GENERAL

    def __post_init__(self):
        if not self.Gamma > 0:
            raise ValueError("lead rate Gamma must be positive")
        if self.T < 0:
            raise ValueError("lead temperature must be non-negative")
        object.__setattr__(self, "mode", LeadMode(self.mode))

    def fermi(self, omega):
        omega = np.asarray(omega, dtype=float)
        if self.mode is LeadMode.SOURCE:
            return np.ones_like(omega)
        if self.mode is LeadMode.DRAIN:
            return np.zeros_like(omega)
        if self.T == 0:
            return np.where(omega < self.mu, 1.0, np.where(omega > self.mu, 0.0, 0.5))
        return expit(-(omega - self.mu) / self.T)


def large_bias_leads(p):
    return (LeadSpec(p.Gamma1, mode=LeadMode.SOURCE), LeadSpec(p.Gamma2, mode=LeadMode.DRAIN))


def window_leads(p, T=0.0):
    """Zero-temperature leads with mu_1 = +E_C/2 and mu_2 = -E_C/2.

    The bias window then holds every low-energy transition but excludes the
    charged-island states near E_C.
    """
    return (LeadSpec(p.Gamma1, mu=0.5 * p.E_C, T=T), LeadSpec(p.Gamma2, mu=-0.5 * p.E_C, T=T))


def default_leads(model):
    if model.kind is ModelKind.EFFECTIVE4:
        return large_bias_leads(model.params)
    return window_leads(model.params)


@dataclass(frozen=True)
class Dissipator:
    plus: np.ndarray
    minus: np.ndarray


def build_dissipator_operators(model, leads):
    """Return (Dissipator for lead 1, Dissipator for lead 2) in the model basis."""
    ops = (model.d1, model.d2)
    if all(lead.mode is not LeadMode.GENERAL for lead in leads):
        return tuple(
            Dissipator(plus=lead.Gamma * lead.fermi(0.0) * d, minus=lead.Gamma * (1 - lead.fermi(0.0)) * d)
            for lead, d in zip(leads, ops)
        )
    eig = hermitian_eigendecompose(model.H)
    v = eig.vectors
    # omega[n, m] = E_m - E_n
    omega = eig.values[None, :] - eig.values[:, None]
    out = []
    for lead, d in zip(leads, ops):
        d_eig = dagger(v) @ d @ v
        f = lead.fermi(omega)
        plus = v @ (lead.Gamma * f * d_eig) @ dagger(v)
        minus = v @ (lead.Gamma * (1.0 - f) * d_eig) @ dagger(v)
        out.append(Dissipator(plus=plus, minus=minus))
    return tuple(out)


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    components: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return int(round(np.sqrt(self.matrix.shape[0])))

    def apply(self, rho):
        return devectorize(self.matrix @ vectorize(rho))


def coherent_superop(H):
    return -1j * (left_superop(H) - right_superop(H))


def lead_superop(d, diss):
    """Superoperator of -1/2 ([d^dag, D^- rho - rho D^+] + h.c.)."""
    dd = dagger(d)
    dm, dp = diss.minus, diss.plus
    x = (left_superop(dd @ dm) - sandwich_superop(dm, dd)
         - sandwich_superop(dd, dp) + right_superop(dp @ dd))
    x_h = (right_superop(dagger(dm) @ d) - sandwich_superop(d, dagger(dm))
           - sandwich_superop(dagger(dp), d) + left_superop(d @ dagger(dp)))
    return -0.5 * (x + x_h)


def lindblad_superop(s):
    ss = dagger(s) @ s
    return sandwich_superop(s, dagger(s)) - 0.5 * (left_superop(ss) + right_superop(ss))


def build_liouvillian(model, leads=None, gamma=None, dephasing_operator=None):
    """Assemble the vectorized generator.

    ``gamma`` defaults to the model's dephasing rate and the dephasing
    operator to the dot-1 occupation d1^dag d1.
    """
    leads = default_leads(model) if leads is None else leads
    gamma = model.params.gamma if gamma is None else gamma
    if gamma < 0:
        raise ValueError("dephasing rate must be non-negative")
    s = model.number_operator(1) if dephasing_operator is None else dephasing_operator
    diss = build_dissipator_operators(model, leads)
    comps = {
        "coherent": coherent_superop(model.H),
        "lead1": lead_superop(model.d1, diss[0]),
        "lead2": lead_superop(model.d2, diss[1]),
        "dephasing": gamma * lindblad_superop(s),
    }
    return Liouvillian(matrix=sum(comps.values()), components=comps)


class SteadyStateError(RuntimeError):
    pass


class DegenerateSteadyStateError(SteadyStateError):
    def __init__(self, nullity):
        self.nullity = nullity
        super().__init__(
            f"Liouvillian null space has dimension {nullity}; the state space is disconnected "
            "and the steady state is not unique"
        )


class PositivityWarning(RuntimeWarning):
    pass


def trace_row(d):
    row = np.zeros(d * d, dtype=complex)
    row[:: d + 1] = 1.0
    return row


def null_space_dim(L, tol=NULL_SPACE_TOL):
    s = np.linalg.svd(L.matrix, compute_uv=False)
    return int(np.sum(s <= tol * s[0]))


def _finish_state(rho):
    rho = 0.5 * (rho + dagger(rho))
    rho = rho / np.trace(rho).real
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -POSITIVITY_TOL:
        warnings.warn(f"steady state has eigenvalue {lo:.3e} below zero", PositivityWarning, stacklevel=3)
    return rho


def steady_state(L, check_unique=True):
    """Null vector of L with unit trace, by a linear solve with one row replaced."""
    d = L.dim
    if check_unique:
        nullity = null_space_dim(L)
        if nullity > 1:
            raise DegenerateSteadyStateError(nullity)
    a = L.matrix.copy()
    a[0, :] = trace_row(d)
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    x = solve_linear(a, b)
    res = np.max(np.abs(L.matrix @ x))
    scale = np.max(np.abs(L.matrix))
    if res > STEADY_RESIDUAL_TOL * scale:
        raise SteadyStateError(f"steady-state residual {res:.3e} exceeds tolerance")
    return _finish_state(devectorize(x))


class StepSizeError(ValueError):
    pass


def rk4_step_matrix(L, dt):
    """Propagator of one classical RK4 step for the linear ODE v' = L v."""
    h = dt * L.matrix
    eye = np.eye(h.shape[0])
    h2 = h @ h
    return eye + h + h2 / 2 + h2 @ h / 6 + h2 @ h2 / 24


def _check_step(L, dt):
    scale = np.max(np.abs(L.matrix))
    if dt * scale > RK4_STABILITY:
        raise StepSizeError(
            f"dt * max|L| = {dt * scale:.3g} > {RK4_STABILITY}; use dt <= {RK4_STABILITY / scale:.3g}"
        )


def evolve(L, rho0, t_final, dt, every=1):
    """Fixed-step RK4 trajectory; returns (times, states) sampled every ``every`` steps."""
    _check_step(L, dt)
    n_steps = int(round(t_final / dt))
    m = rk4_step_matrix(L, dt)
    v = vectorize(np.asarray(rho0, dtype=complex))
    times, states = [0.0], [devectorize(v).copy()]
    for k in range(1, n_steps + 1):
        v = m @ v
        if k % every == 0 or k == n_steps:
            times.append(k * dt)
            states.append(devectorize(v).copy())
    return np.array(times), np.array(states)


def relax(L, rho0, dt, tol=1e-13, max_doublings=80):
    """Long-time RK4 limit from ``rho0``.

    Repeatedly squares the RK4 step propagator, so after k squarings the state
    is exactly 2**k RK4 steps further on.  Squaring also amplifies rounding on
    the unit eigenvalue, so iteration stops at ``tol`` or as soon as the
    doubling-to-doubling change starts growing again after falling below
    1e-8, returning the best iterate.
    """
    _check_step(L, dt)
    m = rk4_step_matrix(L, dt)
    v = vectorize(np.asarray(rho0, dtype=complex))
    last = np.inf
    for _ in range(max_doublings):
        m = m @ m
        w = m @ v
        change = np.max(np.abs(w - v))
        if change <= tol:
            return devectorize(w)
        if change > last and last < 1e-8:
            return devectorize(v)
        v, last = w, change
    raise SteadyStateError("RK4 propagation did not converge")


def current(model, leads, rho, diss=None):
    """Particle current into the drain (lead 2)."""
    diss = build_dissipator_operators(model, leads) if diss is None else diss
    d2 = model.d2
    op = dagger(d2) @ diss[1].minus - diss[1].plus @ dagger(d2)
    return float(np.real(np.trace(op @ rho)))


@dataclass
class Solution:
    model: object
    leads: tuple
    liouvillian: Liouvillian
    rho: np.ndarray
    current: float


def reachable_subspace(model):
    """Basis states connected to the island-ground states by H, d1 or d2.

    With the island decoupled (lambda1 = lambda2 = 0) the charged island
    states form separate blocks that would make the steady state
    non-unique; they are never populated from the ground block.
    """
    adj = (np.abs(model.H) + np.abs(model.d1) + np.abs(model.d2)) > 0
    adj = adj | adj.T
    seen = set(model.low_energy)
    frontier = list(seen)
    while frontier:
        k = frontier.pop()
        for j in np.flatnonzero(adj[k]):
            if j not in seen:
                seen.add(int(j))
                frontier.append(int(j))
    return tuple(sorted(seen))


def restrict(model, keep):
    if len(keep) == model.dim:
        return model
    ix = np.ix_(keep, keep)
    index = {k: i for i, k in enumerate(keep)}
    return replace(
        model,
        labels=tuple(model.labels[k] for k in keep),
        H=model.H[ix],
        d1=model.d1[ix],
        d2=model.d2[ix],
        low_energy=tuple(index[k] for k in model.low_energy),
    )


def solve(model, leads=None, gamma=None):
    """Steady state and drain current on the part of the basis reachable from the island ground."""
    model = restrict(model, reachable_subspace(model))
    leads = default_leads(model) if leads is None else leads
    L = build_liouvillian(model, leads, gamma=gamma)
    rho = steady_state(L)
    return Solution(model=model, leads=leads, liouvillian=L, rho=rho, current=current(model, leads, rho))
