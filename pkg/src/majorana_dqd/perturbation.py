"""Tunnel-transfer sequences through Majorana islands and their energy denominators.

An electron (or, for the bare code loop, a charge fluctuation) is moved by a
product of segment operators.  Every ordering of the segments is one
perturbative sequence.  For each ordering we

* walk the operators right to left, tallying the excess charge on each
  island, and record the excitation energy of every intermediate state
  (sum of E_j^+ over islands holding an extra electron and E_j^- over islands
  missing one), with E_j^+- = (1 -+ 2 dn_j) E_C;
* normal-order the product of fermion operators (Majoranas and dot
  operators) with an explicit swap counter and gamma_i^2 = 1, giving the
  phase relative to the target's canonical operator.

Denominators are kept symbolic and evaluated in exact rational arithmetic
when the inputs are exact.
"""

import csv
import io
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# normal-order key: Majoranas first by index, then dot operators
_DOT_ORDER = {"d1+": 100, "d2+": 101, "d1": 102, "d2": 103}
_SYMBOL_RE = re.compile(r"^(?:g([1-8])|(d[12]\+?))$")


def _key(sym):
    if sym.startswith("g"):
        return int(sym[1:])
    return _DOT_ORDER[sym]


def _mode(sym):
    return sym.rstrip("+")


def normal_order(symbols):
    """Reorder a product of fermion operators into canonical order.

    Majoranas square to one; distinct operators anticommute.  Returns
    ``(sign, ordered_symbols)``.  A dot mode appearing twice is rejected,
    since its anticommutator would add a second operator string.
    """
    for s in symbols:
        if not _SYMBOL_RE.match(s):
            raise ValueError(f"unknown fermion symbol {s!r}")
    dots = [_mode(s) for s in symbols if s.startswith("d")]
    if len(dots) != len(set(dots)):
        raise ValueError("a dot mode appears more than once")
    ops = list(symbols)
    sign = 1
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(ops) - 1:
            a, b = ops[i], ops[i + 1]
            if a == b:  # Majorana squared
                del ops[i : i + 2]
                changed = True
                i = max(i - 1, 0)
                continue
            if _key(a) > _key(b):
                ops[i], ops[i + 1] = b, a
                sign = -sign
                changed = True
            i += 1
    return sign, tuple(ops)


@dataclass(frozen=True)
class Segment:
    name: str
    fermions: tuple
    charge: tuple  # ((island, +1 | -1), ...) applied when the segment acts


@dataclass(frozen=True)
class IslandChargeConfig:
    dng: tuple
    E_C: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "dng", tuple(self.dng))
        if not self.E_C > 0:
            raise ValueError("E_C must be positive")
        if any(abs(x) >= 0.5 for x in self.dng):
            raise ValueError("charge offsets must satisfy |dn_g| < 1/2")

    @property
    def n_islands(self):
        return len(self.dng)

    def energy(self, island, sign, exact=True):
        """E_j^+ (sign=+1) or E_j^- (sign=-1) for 1-based island j."""
        dn, ec = self.dng[island - 1], self.E_C
        if exact:
            dn, ec = Fraction(dn), Fraction(ec)
        return (1 - 2 * sign * dn) * ec


@dataclass(frozen=True)
class TransferSequence:
    ops: tuple
    # factors[k] is the excitation energy between ops[k] and ops[k+1]
    # (left-to-right), each a tuple of (island, +1 | -1) terms
    factors: tuple
    phase: complex  # operator product = phase * canonical operator

    @property
    def label(self):
        return " ".join(self.ops)

    def inverse_denominator(self, cfg, exact=True):
        prod = Fraction(1) if exact else 1.0
        for factor in self.factors:
            prod *= sum(cfg.energy(j, s, exact) for j, s in factor)
        return 1 / prod

    def symbolic(self, sign=1):
        return format_denominator(self.factors, sign)


def _term(j, s):
    return f"E{j}{'+' if s > 0 else '-'}"


def format_denominator(factors, sign=1):
    """e.g. ``-1/[(E1- + E2+)*E2+]``."""
    parts = []
    for factor in factors:
        terms = sorted(factor)
        text = " + ".join(_term(j, s) for j, s in terms)
        parts.append(f"({text})" if len(terms) > 1 else text)
    return f"{'-' if sign < 0 else ''}1/[{'*'.join(parts)}]"


_FACTOR_RE = re.compile(r"\(([^()]*)\)|(E\d[+-])")


def parse_denominator(text):
    """Inverse of format_denominator: returns (sign, factors)."""
    text = text.strip()
    sign = -1 if text.startswith("-") else 1
    body = text.lstrip("-")
    if not (body.startswith("1/[") and body.endswith("]")):
        raise ValueError(f"malformed denominator {text!r}")
    factors = []
    for chunk in body[3:-1].split("*"):
        terms = [t.strip() for t in chunk.strip().strip("()").split(" + ")]
        factors.append(tuple(sorted((int(t[1]), 1 if t[2] == "+" else -1) for t in terms)))
    return sign, tuple(factors)


def walk_charges(segments, n_islands):
    """Intermediate excitation factors for a left-to-right segment product.

    Segments act right to left; returns the factors in left-to-right order.
    """
    charge = [0] * (n_islands + 1)
    factors = []
    for seg in reversed(segments[1:]):
        for island, dq in seg.charge:
            charge[island] += dq
        if any(abs(q) > 1 for q in charge):
            raise ValueError("an island acquired more than one excess charge")
        factors.append(tuple(sorted((j, q) for j, q in enumerate(charge) if q != 0)))
    final = list(charge)
    for island, dq in segments[0].charge:
        final[island] += dq
    if any(final):
        raise ValueError("sequence does not return the islands to their initial charges")
    return tuple(reversed(factors))


def recursive_order(items):
    """Permutations with the last slot cycling from the end of ``items``.

    For [a, b, c]: abc, bac, acb, cab, bca, cba.  This reproduces the
    reference row order of the stabilizer-loop table.
    """
    if len(items) <= 1:
        yield tuple(items)
        return
    for k in range(len(items) - 1, -1, -1):
        rest = items[:k] + items[k + 1 :]
        for p in recursive_order(rest):
            yield p + (items[k],)


@dataclass(frozen=True)
class Target:
    name: str
    segments: dict
    base_order: tuple
    canonical: tuple  # (phase, fermion symbols)
    canonical_label: str
    n_islands: int
    explicit_order: tuple = ()

    def orderings(self):
        if self.explicit_order:
            return list(self.explicit_order)
        return list(recursive_order(self.base_order))


def _seg(name, fermions, *charge):
    return Segment(name, tuple(fermions), tuple(charge))


QUBIT = Target(
    name="qubit",
    segments={
        # lambda1 d1 gamma1: electron from dot 1 onto the island
        "P": _seg("P", ("d1", "g1"), (1, +1)),
        # -i lambda2^* gamma2 d2^dag: electron from the island onto dot 2
        "Q": _seg("Q", ("g2", "d2+"), (1, -1)),
    },
    base_order=("Q", "P"),
    canonical=(1j, ("g2", "g1", "d2+", "d1")),  # z d2^dag d1 with z = i g2 g1
    canonical_label="z d2† d1",
    n_islands=1,
)

SHORTCUT = Target(
    name="shortcut",
    segments={
        "L1": _seg("L1", ("d1+", "g1"), (1, -1)),
        "L2†": _seg("L2†", ("g2", "d2"), (2, +1)),
        "A12": _seg("A12", ("g1", "g2"), (1, +1), (2, -1)),
    },
    base_order=("L1", "A12", "L2†"),
    canonical=(1, ("d1+", "d2")),
    canonical_label="d1† d2",
    n_islands=2,
    explicit_order=(
        ("L1", "A12", "L2†"),
        ("A12", "L1", "L2†"),
        ("L2†", "A12", "L1"),
        ("A12", "L2†", "L1"),
        ("L1", "L2†", "A12"),
        ("L2†", "L1", "A12"),
    ),
)

# Majoranas (g8, g1), (g2, g3), (g4, g5), (g6, g7) sit on islands 1..4
_ISLAND_OF = {8: 1, 1: 1, 2: 2, 3: 2, 4: 3, 5: 3, 6: 4, 7: 4}


def _pair(m, n):
    """A_mn = g_m g_n e^{i(phi_m - phi_n)/2}: island of m gains, island of n loses."""
    return _seg(f"A{m}{n}", (f"g{m}", f"g{n}"), (_ISLAND_OF[m], +1), (_ISLAND_OF[n], -1))


CODE_LOOP = Target(
    name="code",
    segments={s.name: s for s in (_pair(1, 2), _pair(3, 4), _pair(5, 6), _pair(7, 8))},
    base_order=("A12", "A34", "A56", "A78"),
    canonical=(1, tuple(f"g{k}" for k in range(1, 9))),
    canonical_label="Z",
    n_islands=4,
)

STABILIZER_LOOP = Target(
    name="stabilizer",
    segments={
        "L1": _seg("L1", ("d1+", "g1"), (1, -1)),
        "L2†": _seg("L2†", ("g2", "d2"), (2, +1)),
        **{s.name: s for s in (_pair(8, 7), _pair(6, 5), _pair(4, 3))},
    },
    base_order=("L1", "A87", "A65", "A43", "L2†"),
    canonical=(1, tuple(f"g{k}" for k in range(1, 9)) + ("d1+", "d2")),
    canonical_label="Z d1† d2",
    n_islands=4,
)

TARGETS = {t.name: t for t in (QUBIT, SHORTCUT, CODE_LOOP, STABILIZER_LOOP)}


def sequence_phase(target, ops):
    symbols = [s for name in ops for s in target.segments[name].fermions]
    sign, ordered = normal_order(symbols)
    c_phase, c_symbols = target.canonical
    c_sign, c_ordered = normal_order(c_symbols)
    if ordered != c_ordered:
        raise ValueError(f"{' '.join(ops)} does not reduce to {target.canonical_label}")
    return sign / (c_phase * c_sign)


def enumerate_sequences(target):
    target = TARGETS[target] if isinstance(target, str) else target
    out = []
    for ops in target.orderings():
        segs = [target.segments[n] for n in ops]
        out.append(
            TransferSequence(
                ops=tuple(ops),
                factors=walk_charges(segs, target.n_islands),
                phase=complex(sequence_phase(target, ops)),
            )
        )
    return out


@dataclass
class Enumeration:
    target: str
    config: IslandChargeConfig
    sequences: list
    reference_phase: complex
    total: object  # sum of signed inverse denominators
    closed_form: object = None
    extra: dict = None

    def signed_values(self, exact=True):
        ref = self.reference_phase
        return [_real(s.phase / ref) * s.inverse_denominator(self.config, exact) for s in self.sequences]

    @property
    def passed(self):
        if self.closed_form is None:
            return None
        diff = abs(complex(self.total) - complex(self.closed_form))
        return bool(diff <= 1e-12 * max(1.0, abs(complex(self.closed_form))))


def _real(z):
    z = complex(z)
    if abs(z.imag) > 1e-12:
        raise ValueError(f"relative phase {z} is not real")
    return int(round(z.real))


def _summed(target, cfg, exact=True):
    seqs = enumerate_sequences(target)
    ref = seqs[0].phase
    total = sum(_real(s.phase / ref) * s.inverse_denominator(cfg, exact) for s in seqs)
    return seqs, ref, total


def shortcut_closed_form(cfg, exact=True):
    """(E1+ - E1-)(E2+ - E2-)/(E1+ E1- E2+ E2-) = 4 eta / E_C^2."""
    e = cfg.energy
    p1, m1, p2, m2 = e(1, 1, exact), e(1, -1, exact), e(2, 1, exact), e(2, -1, exact)
    return (p1 - m1) * (p2 - m2) / (p1 * m1 * p2 * m2)


def shortcut_eta_form(cfg):
    """4 eta / E_C^2 for islands 1 and 2; the enumerated shortcut sum is four times this."""
    return 4 * eta(cfg.dng[0], cfg.dng[1]) / cfg.E_C**2


def eta(dng1, dng2):
    """Charge-offset asymmetry parameter of the shortcut path."""
    return dng1 * dng2 / ((1 - 4 * dng1**2) * (1 - 4 * dng2**2))


def stabilizer_closed_form(cfg, exact=True):
    """16/E_C^4 prod_j 1/(1 - 4 dn_j^2)."""
    ec = Fraction(cfg.E_C) if exact else cfg.E_C
    val = 16 / ec**4
    for dn in cfg.dng:
        dn = Fraction(dn) if exact else dn
        val = val / (1 - 4 * dn**2)
    return val


def code_coefficient(ts, E_C):
    """c = 5/(16 E_C^3) prod t."""
    return 5 / (16 * E_C**3) * np.prod(ts)


def enumerate_qubit_2nd_order(lambda1, lambda2, E_C, dng=0.0):
    """Second-order island-mediated amplitude multiplying z d2^dag d1.

    Each sequence contributes coefficient * phase * (-1/E_intermediate); the
    coefficients are lambda1 for P and -i lambda2^* for Q.
    """
    cfg = IslandChargeConfig((dng,), E_C)
    coeff = {"P": lambda1, "Q": -1j * np.conj(lambda2)}
    seqs = enumerate_sequences(QUBIT)
    amp = 0j
    for s in seqs:
        c = np.prod([coeff[n] for n in s.ops])
        amp += c * s.phase * (-1) * float(s.inverse_denominator(cfg, exact=False))
    amp = complex(amp)
    return Enumeration(
        target="qubit",
        config=cfg,
        sequences=seqs,
        reference_phase=seqs[0].phase,
        total=amp,
        closed_form=complex(2 * lambda1 * np.conj(lambda2) / E_C) if dng == 0 else None,
        extra={"contributions": [complex(np.prod([coeff[n] for n in s.ops]) * s.phase
                                         * (-1) * float(s.inverse_denominator(cfg, exact=False)))
                                 for s in seqs]},
    )


def enumerate_shortcut(cfg, exact=True):
    seqs, ref, total = _summed(SHORTCUT, cfg, exact)
    return Enumeration("shortcut", cfg, seqs, ref, total, closed_form=shortcut_closed_form(cfg, exact))


def enumerate_code_loop(cfg, ts=(1.0, 1.0, 1.0, 1.0), exact=True):
    """All 24 fourth-order sequences around the bare plaquette.

    The returned ``extra['c']`` is (1/2)^4 * 2 * (raw sum) * prod t: each
    tunnel term carries t/2 and the reversed (Hermitian-conjugate) loop
    doubles the real part.
    """
    seqs, ref, total = _summed(CODE_LOOP, cfg, exact)
    partition = {}
    for s in seqs:
        v = s.inverse_denominator(cfg, exact)
        partition[v] = partition.get(v, 0) + 1
    c = 2 * float(total) * np.prod(ts) / 16
    enum = Enumeration("code", cfg, seqs, ref, total)
    enum.extra = {"partition": partition, "c": c, "c_closed_form": code_coefficient(ts, cfg.E_C)}
    if all(dn == 0 for dn in cfg.dng):
        ec = Fraction(cfg.E_C) if exact else cfg.E_C
        enum.closed_form = Fraction(5, 2) / ec**3 if exact else 2.5 / ec**3
    return enum


def enumerate_stabilizer_loop(cfg, exact=True):
    seqs, ref, total = _summed(STABILIZER_LOOP, cfg, exact)
    return Enumeration("stabilizer", cfg, seqs, ref, total, closed_form=stabilizer_closed_form(cfg, exact))


def enumerate_target(name, dng, E_C=1.0, **kw):
    if name == "qubit":
        return enumerate_qubit_2nd_order(kw.get("lambda1", 1.0), kw.get("lambda2", 1.0), E_C,
                                         dng=dng[0] if len(dng) else 0.0)
    cfg = IslandChargeConfig(tuple(dng), E_C)
    if name == "shortcut":
        return enumerate_shortcut(cfg)
    if name == "code":
        return enumerate_code_loop(cfg, ts=kw.get("ts", (1.0, 1.0, 1.0, 1.0)))
    if name == "stabilizer":
        return enumerate_stabilizer_loop(cfg)
    raise ValueError(f"unknown target {name!r}")


CSV_COLUMNS = ("index", "sequence", "denominator_symbolic", "denominator_value")


def sequence_rows(result):
    ref = result.reference_phase
    for k, s in enumerate(result.sequences, start=1):
        sign = _real(s.phase / ref)
        value = sign * float(s.inverse_denominator(result.config, exact=True))
        yield k, s.label, s.symbolic(sign), value


def emit_sequence_table(result, out=None):
    """Write the sequence table as CSV; returns the text.

    Signs are relative to the first row's operator product, which is recorded
    in a ``#`` line together with its phase against the canonical operator.
    Rows follow the explicit order of the target, or ``recursive_order``.
    """
    buf = io.StringIO()
    ref = complex(result.reference_phase)
    ref_txt = f"{ref.real:+g}" if abs(ref.imag) < 1e-15 else f"{ref:g}"
    target = TARGETS[result.target]
    buf.write(f"# target={result.target} dng={','.join(repr(float(x)) for x in result.config.dng)} "
              f"E_C={float(result.config.E_C)!r}\n")
    buf.write(f"# row-1 operator product = ({ref_txt}) * {target.canonical_label}\n")
    if target.explicit_order:
        buf.write("# row order: fixed reference order\n")
    else:
        buf.write("# row order: last slot cycles from the end of the base list (recursive_order)\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for k, label, sym, value in sequence_rows(result):
        w.writerow([k, label, sym, format(value, ".17g")])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


def parse_sequence_table(text):
    """Rows of an emitted table as (index, sequence, sign, factors, value)."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = []
    for rec in csv.DictReader(lines):
        sign, factors = parse_denominator(rec["denominator_symbolic"])
        rows.append((int(rec["index"]), rec["sequence"], sign, factors, float(rec["denominator_value"])))
    return rows


def relabel_islands(seq, mapping):
    return tuple(tuple(sorted((mapping.get(j, j), s) for j, s in f)) for f in seq.factors)


def all_orderings_count(target):
    target = TARGETS[target] if isinstance(target, str) else target
    return sum(1 for _ in itertools.permutations(target.base_order))
