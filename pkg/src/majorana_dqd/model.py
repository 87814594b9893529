"""Hamiltonians and dot operators for the double-dot interferometer.

Two constructions are provided:

* ``build_effective_model`` -- the four dot occupation states with the
  island integrated out into an effective dot-dot tunnel amplitude Omega.
* ``build_full_model`` -- the twelve states of one qubit sector: four dot
  states times the island ground state and its two charged excitations.

Fermion sign convention: modes are ordered (dot 1, dot 2, island fermion f_R)
and represented by Jordan-Wigner strings, so on the dot factor
``d1 = a (x) 1`` and ``d2 = sz (x) a`` with ``a = [[0, 1], [0, 0]]``.
The dot basis order is |00>, |01>, |10>, |11> where the first digit is dot 1.
"""

import enum
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import check_hermitian

VALIDITY_WARN_RATIO = 0.2

DOT_LABELS = ("00", "01", "10", "11")
ISLAND_LABELS = ("g", "e+", "e-")

_A = np.array([[0.0, 1.0], [0.0, 0.0]])
_SZ = np.diag([1.0, -1.0])
_I2 = np.eye(2)


class ModelKind(enum.Enum):
    EFFECTIVE4 = "effective4"
    FULL12 = "full12"


class ValidityWarning(UserWarning):
    """Island couplings are not small against the charging energy."""


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters, all energies in the same unit with hbar = 1.

    ``mediated`` optionally replaces ``z * lambda12`` (the island-mediated
    amplitude multiplying d2^dag d1), which is how stabilizer couplings are
    fed into the effective model.
    """

    Gamma1: float = 0.01
    Gamma2: float = 0.01
    lambda0: float = 0.01
    lambda1: float = 0.1
    lambda2: float = 0.1
    E_C: float = 1.0
    eps1: float = 0.0
    eps2: float = 0.0
    phi: float = 0.0
    z: int = 1
    gamma: float = 0.0
    Delta: float = 0.0
    mediated: complex | None = None
    validity_ratio: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.Gamma1 > 0 and self.Gamma2 > 0):
            raise ValueError("lead rates Gamma1, Gamma2 must be positive")
        if not self.E_C > 0:
            raise ValueError("charging energy E_C must be positive")
        if self.gamma < 0:
            raise ValueError("dephasing rate gamma must be non-negative")
        if self.Delta < 0:
            raise ValueError("level spread Delta must be non-negative")
        if self.z not in (1, -1):
            raise ValueError(f"z must be +1 or -1, got {self.z!r}")
        values = (self.Gamma1, self.Gamma2, self.lambda0, self.lambda1, self.lambda2,
                  self.E_C, self.eps1, self.eps2, self.phi, self.gamma, self.Delta)
        if not all(np.isfinite(values)):
            raise ValueError("parameters must be finite")
        ratio = max(abs(self.lambda1), abs(self.lambda2)) / self.E_C
        object.__setattr__(self, "validity_ratio", ratio)
        if ratio > VALIDITY_WARN_RATIO:
            warnings.warn(
                f"max(|lambda1|, |lambda2|)/E_C = {ratio:.3g} exceeds {VALIDITY_WARN_RATIO}; "
                "the effective coupling is unreliable",
                ValidityWarning,
                stacklevel=3,
            )

    @property
    def delta(self):
        """Dot detuning eps1 - eps2."""
        return self.eps1 - self.eps2

    def replace(self, **changes):
        return replace(self, **changes)

    @classmethod
    def in_units_of_gamma(cls, Gamma=0.01, **kw):
        """Build parameters with every energy given as a multiple of Gamma.

        ``phi`` and ``z`` are passed through unscaled.
        """
        scaled = {k: (v if k in ("phi", "z") or v is None else v * Gamma) for k, v in kw.items()}
        return cls(Gamma1=Gamma, Gamma2=Gamma, **scaled)


def reference_params(**changes):
    """Gamma1 = Gamma2 = 0.01, E_C = 100 Gamma, lambda0 = Gamma, lambda1 = lambda2 = 10 Gamma."""
    return ModelParams(**changes)


@dataclass(frozen=True)
class EffectiveCoupling:
    Omega: complex
    lambda12: complex


def island_amplitude(p):
    """2 lambda1 lambda2^* / E_C."""
    return 2.0 * p.lambda1 * np.conj(p.lambda2) / p.E_C


def effective_coupling(p):
    lam12 = complex(island_amplitude(p))
    mediated = p.z * lam12 if p.mediated is None else complex(p.mediated)
    omega = -p.lambda0 * np.exp(1j * p.phi) + mediated
    return EffectiveCoupling(Omega=complex(omega), lambda12=lam12)


@dataclass(frozen=True)
class HamiltonianModel:
    kind: ModelKind
    labels: tuple
    H: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    params: ModelParams
    # indices of the island-ground states (all states for the effective model)
    low_energy: tuple = ()

    @property
    def dim(self):
        return self.H.shape[0]

    def number_operator(self, dot):
        d = self.d1 if dot == 1 else self.d2
        return d.conj().T @ d


def jordan_wigner(n_modes):
    """Annihilation operators for ``n_modes`` fermionic modes, first mode leftmost."""
    ops = []
    for k in range(n_modes):
        factors = [_SZ] * k + [_A] + [_I2] * (n_modes - k - 1)
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        ops.append(op.astype(complex))
    return ops


def dot_operators():
    d1, d2 = jordan_wigner(2)
    return d1, d2


def build_effective_model(p):
    d1, d2 = dot_operators()
    n1 = d1.conj().T @ d1
    n2 = d2.conj().T @ d2
    omega = effective_coupling(p).Omega
    hop = omega * (d2.conj().T @ d1)
    H = p.eps1 * n1 + p.eps2 * n2 + hop + hop.conj().T
    check_hermitian(H)
    return HamiltonianModel(
        kind=ModelKind.EFFECTIVE4,
        labels=DOT_LABELS,
        H=H,
        d1=d1,
        d2=d2,
        params=p,
        low_energy=tuple(range(4)),
    )


def _island_states(z):
    """(n_R, island charge) for g, e+, e- in the given qubit sector."""
    n_ground = 0 if z == 1 else 1
    n_excited = 1 - n_ground
    return ((n_ground, 0), (n_excited, 1), (n_excited, -1))


def build_full_model(p, z=None):
    """Twelve-state model of one qubit sector (default: ``p.z``).

    Basis index is ``3 * dot + island`` with dot in DOT_LABELS order and island
    in ISLAND_LABELS order.  The island sits at the integer gate-charge
    symmetric point, so both charged states cost exactly E_C.
    """
    z = p.z if z is None else z
    if z not in (1, -1):
        raise ValueError(f"z must be +1 or -1, got {z!r}")
    d1, d2, f = jordan_wigner(3)
    eye8 = np.eye(8)
    g1 = f + f.conj().T
    g2 = 1j * (f.conj().T - f)

    # island charge register q in (-1, 0, +1), truncated at one excess charge
    raise_q = np.diag(np.ones(2), -1).astype(complex)
    eye3 = np.eye(3)
    charge = np.diag([-1.0, 0.0, 1.0])

    def up(op):
        return np.kron(op, eye3)

    D1, D2 = up(d1), up(d2)
    R = np.kron(eye8, raise_q)
    n1 = D1.conj().T @ D1
    n2 = D2.conj().T @ D2

    tunnel = p.lambda1 * D1 @ up(g1) @ R + 1j * p.lambda2 * D2 @ up(g2) @ R
    direct = -p.lambda0 * np.exp(1j * p.phi) * (D2.conj().T @ D1)
    H24 = (p.eps1 * n1 + p.eps2 * n2 + p.E_C * np.kron(eye8, charge @ charge)
           + tunnel + tunnel.conj().T + direct + direct.conj().T)

    keep, labels = [], []
    for dot, (n_a, n_b) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        for label, (n_r, q) in zip(ISLAND_LABELS, _island_states(z)):
            fock = 4 * n_a + 2 * n_b + n_r
            keep.append(3 * fock + (q + 1))
            labels.append(f"{DOT_LABELS[dot]},{label}")
    keep = np.array(keep)
    sub = np.ix_(keep, keep)

    H = H24[sub]
    check_hermitian(H)
    low = tuple(3 * k for k in range(4))
    return HamiltonianModel(
        kind=ModelKind.FULL12,
        labels=tuple(labels),
        H=H,
        d1=D1[sub],
        d2=D2[sub],
        params=p.replace(z=z),
        low_energy=low,
    )


def electron_number(model):
    """Diagonal of total electron number (dots plus island excess charge)."""
    n = np.real(np.diag(model.number_operator(1) + model.number_operator(2)))
    if model.kind is ModelKind.FULL12:
        n = n + np.tile([0, 1, -1], 4)
    return n


def build_model(p, kind):
    kind = ModelKind(kind)
    if kind is ModelKind.EFFECTIVE4:
        return build_effective_model(p)
    return build_full_model(p)


def stabilizer_effective_coupling(lambda1, lambda2, t12, t34, t56, t78, E_C, dng=(0.0, 0.0, 0.0, 0.0), Z=1):
    """Coefficient of d1^dag d2 mediated by a Majorana stabilizer plaquette.

    Returns alpha * (xi + conj(c) * Z) with

        alpha = -32 lambda1 lambda2^* / (5 t12^* E_C)
        xi    = 5 |t12|^2 eta / (16 E_C)
        c     = 5 t12 t34 t56 t78 / (16 E_C^3)

    and eta the charge-offset asymmetry of islands 1 and 2.  The effective
    model's Omega multiplies d2^dag d1, so pass ``conj`` of this value as
    ``ModelParams.mediated``.  Note that the enumerated shortcut sum
    (``perturbation.enumerate_shortcut``) is 16 eta / E_C^2, four times the
    normalization folded into xi here.
    """
    from .perturbation import code_coefficient, eta

    if t12 == 0:
        raise ValueError("t12 = 0 leaves alpha undefined")
    if not E_C > 0:
        raise ValueError("E_C must be positive")
    if Z not in (1, -1):
        raise ValueError("Z must be +1 or -1")
    dng = tuple(dng)
    if len(dng) != 4 or any(abs(x) >= 0.5 for x in dng):
        raise ValueError("need four charge offsets with |dn_g| < 1/2")
    alpha = -32 * lambda1 * np.conj(lambda2) / (5 * np.conj(t12) * E_C)
    xi = 5 * abs(t12) ** 2 / (16 * E_C) * eta(dng[0], dng[1])
    c = code_coefficient((t12, t34, t56, t78), E_C)
    return complex(alpha * (xi + np.conj(c) * Z))
