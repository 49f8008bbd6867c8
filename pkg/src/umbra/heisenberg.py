"""Ladder-exponential group structure, checked without truncation lies.

Three layers share this module:

* order-by-order verification of the ladder-exponential identities
  (the representation's composition law and the operator reorder rule)
  as :class:`~umbra.formal.FormalOpSeries` comparisons;
* finite atomic kernels composed by twisted convolution, with the
  reorder phase kept as an exact rational exponent;
* the squared-ladder sl(2) triple (lower^2, raise^2, raise lower + 1/2)
  and a diagonal closure solver for generic ladder sequences.

Throughout, ``iota`` is fixed at 1: the reorder rule reads
exp(yL) exp(xR) = exp(xy) exp(xR) exp(yL), and the phase picked up when
atoms pass each other is exp(-x1*y2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import (
    CapMismatchError,
    CapShortfallError,
    LinearOp,
    ONE,
    ParameterError,
    ZERO,
    as_fraction,
    exp_nilpotent_matrix,
    exp_raising_matrix,
    format_rational,
    op_commutator,
)
from .formal import FormalOpSeries, MultiPoly, OpWordTable, series_first_difference
from .models import UmbralModel
from .reports import FAIL, PASS, VerificationReport
from .transforms import expand_in_basis


# ---------------------------------------------------------------------------
# formal representation and its identities
# ---------------------------------------------------------------------------

def _require_cap(m: UmbralModel, order: int, output_degree: int) -> None:
    need = output_degree + order
    if output_degree < 0 or m.n_max < need:
        raise CapShortfallError(
            f"formal order {order} with output index {output_degree} needs "
            f"a working cap of n_max = {need}; model {m.label()} has "
            f"n_max = {m.n_max}"
        )


def _pi_series(
    table: OpWordTable,
    params: tuple[str, ...],
    order: int,
    s_slot: int,
    x_slot: int,
    y_slot: int,
) -> FormalOpSeries:
    """exp(-s) exp(-y L) exp(-x R) expanded in the given parameter
    slots: the coefficient at s^a x^c y^b is (-1)^(a+b+c)/(a!b!c!)
    times the word L^b R^c."""
    out = FormalOpSeries(params, order, table.cap)
    nv = len(params)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            for c in range(order + 1 - a - b):
                idx = [0] * nv
                idx[s_slot] = a
                idx[x_slot] = c
                idx[y_slot] = b
                q = Fraction(
                    (-1) ** ((a + b + c) & 1),
                    math.factorial(a) * math.factorial(b) * math.factorial(c),
                )
                out.add_term(tuple(idx), q, table.low_then_high_word(b, c))
    return out


def heisenberg_rep_formal(m: UmbralModel, order: int) -> FormalOpSeries:
    """The group representation exp(-s) exp(-yL) exp(-xR) as a formal
    series in (s, x, y) with operator coefficients on the model's
    capped space.  Coefficient columns for basis indices up to
    n_max - order are truncation-exact."""
    _require_cap(m, order, 0)
    table = OpWordTable(m.lowering, m.raising, order)
    return _pi_series(table, ("s", "x", "y"), order, 0, 1, 2)


def _safe_columns(m: UmbralModel, output_degree: int) -> list[int]:
    return [m.degree_of_index(j) for j in range(output_degree + 1)]


def _formal_report(
    check: str,
    m: UmbralModel,
    order: int,
    output_degree: int,
    lhs: FormalOpSeries,
    rhs: FormalOpSeries,
) -> VerificationReport:
    cols = _safe_columns(m, output_degree)
    idx = series_first_difference(lhs, rhs, cols)
    params = {
        "order": order,
        "output_index": output_degree,
        "n_work": m.n_max,
    }
    if idx is None:
        return VerificationReport(
            check=check, model=m.label(), params=params,
            status=PASS, max_residual=ZERO,
        )
    a = lhs.materialize(idx)
    b = rhs.materialize(idx)
    worst = max(
        abs(Fraction(a.num[i][j], a.den) - Fraction(b.num[i][j], b.den))
        for j in cols
        for i in range(a.cap + 1)
    )
    powers = {name: k for name, k in zip(lhs.params, idx) if k}
    return VerificationReport(
        check=check, model=m.label(), params=params,
        status=FAIL, max_residual=worst,
        first_failure={"multi_index": powers},
    )


def group_law_check(
    m: UmbralModel, order: int, output_degree: int | None = None
) -> VerificationReport:
    """Compare pi(s1,x1,y1) pi(s2,x2,y2) against
    pi(s1+s2+x1*y2, x1+x2, y1+y2) coefficient by coefficient up to the
    given total order.  Both sides are exact on basis indices up to
    ``output_degree`` provided n_max >= output_degree + order."""
    if output_degree is None:
        output_degree = m.n_max - order
    _require_cap(m, order, output_degree)
    params = ("s1", "x1", "y1", "s2", "x2", "y2")
    table = OpWordTable(m.lowering, m.raising, order)

    left = _pi_series(table, params, order, 0, 1, 2)
    right_factor = _pi_series(table, params, order, 3, 4, 5)
    lhs = left.mul(right_factor, table.cache)

    # composite arguments: s -> s1+s2+x1*y2, y -> y1+y2, x -> x1+x2
    def var(slot: int) -> MultiPoly:
        return MultiPoly.variable(6, order, slot)

    u = var(0) + var(3) + var(1) * var(5)
    v = var(2) + var(5)
    w = var(1) + var(4)
    u_pows = [MultiPoly.constant(6, order, 1)]
    v_pows = [MultiPoly.constant(6, order, 1)]
    w_pows = [MultiPoly.constant(6, order, 1)]
    for _ in range(order):
        u_pows.append(u_pows[-1] * u)
        v_pows.append(v_pows[-1] * v)
        w_pows.append(w_pows[-1] * w)

    rhs = FormalOpSeries(params, order, table.cap)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            for c in range(order + 1 - a - b):
                base = Fraction(
                    (-1) ** ((a + b + c) & 1),
                    math.factorial(a) * math.factorial(b) * math.factorial(c),
                )
                word = table.low_then_high_word(b, c)
                scalar = u_pows[a] * v_pows[b] * w_pows[c]
                for idx, qs in scalar.terms.items():
                    rhs.add_term(idx, base * qs, word)

    return _formal_report("group-law", m, order, output_degree, lhs, rhs)


def _exp_ladder_series(
    pows: Sequence[LinearOp],
    params: tuple[str, ...],
    order: int,
    slots: Sequence[int],
) -> FormalOpSeries:
    """exp((sum of the slot parameters) * A) given the power table of
    A; one or two parameter slots."""
    out = FormalOpSeries(params, order, pows[0].cap)
    nv = len(params)
    for total in range(order + 1):
        op = pows[total]
        if len(slots) == 1:
            splits: Iterable[tuple[int, ...]] = [(total,)]
        else:
            splits = [(r, total - r) for r in range(total + 1)]
        for split in splits:
            idx = [0] * nv
            q = ONE
            for slot, r in zip(slots, split):
                idx[slot] = r
                q /= math.factorial(r)
            out.add_term(tuple(idx), q, op)
    return out


def _phase_series(
    ident: LinearOp,
    params: tuple[str, ...],
    order: int,
    x_slot: int,
    y_slot: int,
    sign: int,
) -> FormalOpSeries:
    """exp(sign * x * y) as a scalar series carried on the identity."""
    out = FormalOpSeries(params, order, ident.cap)
    for k in range(order // 2 + 1):
        idx = [0] * len(params)
        idx[x_slot] = k
        idx[y_slot] = k
        q = Fraction(sign ** (k & 1), math.factorial(k))
        out.add_term(tuple(idx), q, ident)
    return out


def weyl_relation_check(
    m: UmbralModel, order: int, output_degree: int | None = None
) -> VerificationReport:
    """exp(yL) exp(xR) = exp(xy) exp(xR) exp(yL), order by order.  At
    total order 2 this is exactly the commutation relation
    [L, R] = I."""
    if output_degree is None:
        output_degree = m.n_max - order
    _require_cap(m, order, output_degree)
    params = ("x", "y")
    table = OpWordTable(m.lowering, m.raising, order)

    lhs = FormalOpSeries(params, order, table.cap)
    for b in range(order + 1):
        for c in range(order + 1 - b):
            q = Fraction(1, math.factorial(b) * math.factorial(c))
            lhs.add_term((c, b), q, table.low_then_high_word(b, c))

    ident = LinearOp.identity(table.cap)
    phase = _phase_series(ident, params, order, 0, 1, +1)
    exp_r = _exp_ladder_series(table.high_pows, params, order, (0,))
    exp_l = _exp_ladder_series(table.low_pows, params, order, (1,))
    rhs = phase.mul(exp_r.mul(exp_l, table.cache), table.cache)

    return _formal_report("weyl-relation", m, order, output_degree, lhs, rhs)


def composition_check_formal(
    m: UmbralModel, order: int, output_degree: int | None = None
) -> VerificationReport:
    """Twisted-convolution composition with every atom position made a
    formal parameter: rep(k1) rep(k2) against rep(k1 twisted k2) for a
    pair of two-atom kernels with fixed rational coefficients.  The
    phase exp(-x_i y_j) appears on the right as a formal scalar
    series, so the comparison is exact order by order."""
    if output_degree is None:
        output_degree = m.n_max - order
    _require_cap(m, order, output_degree)
    params = ("x1", "y1", "x2", "y2", "x3", "y3", "x4", "y4")
    table = OpWordTable(m.lowering, m.raising, order)
    ident = LinearOp.identity(table.cap)

    coefs = {1: ONE, 2: Fraction(2, 3), 3: Fraction(3), 4: Fraction(1, 5)}

    def atom_series(i: int) -> FormalOpSeries:
        x_slot, y_slot = 2 * (i - 1), 2 * (i - 1) + 1
        out = FormalOpSeries(params, order, table.cap)
        for b in range(order + 1):
            for c in range(order + 1 - b):
                idx = [0] * 8
                idx[x_slot] = c
                idx[y_slot] = b
                q = coefs[i] / (math.factorial(b) * math.factorial(c))
                out.add_term(tuple(idx), q, table.low_then_high_word(b, c))
        return out

    k1 = atom_series(1) + atom_series(2)
    k2 = atom_series(3) + atom_series(4)
    lhs = k1.mul(k2, table.cache)

    rhs = FormalOpSeries(params, order, table.cap)
    for i in (1, 2):
        for j in (3, 4):
            xi, yi = 2 * (i - 1), 2 * (i - 1) + 1
            xj, yj = 2 * (j - 1), 2 * (j - 1) + 1
            phase = _phase_series(ident, params, order, xi, yj, -1)
            exp_l = _exp_ladder_series(table.low_pows, params, order, (yi, yj))
            exp_r = _exp_ladder_series(table.high_pows, params, order, (xi, xj))
            pair = phase.mul(exp_l.mul(exp_r, table.cache), table.cache)
            rhs = rhs + pair.scale(coefs[i] * coefs[j])

    return _formal_report(
        "twisted-composition", m, order, output_degree, lhs, rhs
    )


# ---------------------------------------------------------------------------
# discrete kernels and twisted convolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelAtom:
    """One weighted point mass: value = coef * exp(log_weight) placed
    at ladder parameters (x, y).  The exponent stays rational so kernel
    equality is decidable."""

    coef: Fraction
    log_weight: Fraction
    x: Fraction
    y: Fraction

    def _key(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.x, self.y, self.log_weight)


class DiscreteKernel:
    """Finite atomic kernel, canonicalized: atoms sharing
    (x, y, log_weight) are merged, zero coefficients dropped, order
    fixed by (x, y, log_weight)."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[KernelAtom] = ()):
        merged: dict[tuple, Fraction] = {}
        for a in atoms:
            k = a._key()
            merged[k] = merged.get(k, ZERO) + as_fraction(a.coef)
        self.atoms: tuple[KernelAtom, ...] = tuple(
            KernelAtom(coef=q, log_weight=k[2], x=k[0], y=k[1])
            for k, q in sorted(merged.items())
            if q
        )

    @classmethod
    def atom(
        cls,
        coef: Fraction | int | str,
        log_weight: Fraction | int | str = 0,
        x: Fraction | int | str = 0,
        y: Fraction | int | str = 0,
    ) -> "DiscreteKernel":
        return cls([KernelAtom(
            as_fraction(coef), as_fraction(log_weight),
            as_fraction(x), as_fraction(y),
        )])

    @classmethod
    def delta(cls) -> "DiscreteKernel":
        """Unit mass at the origin: the identity for the twisted
        product."""
        return cls.atom(1)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteKernel):
            return NotImplemented
        return self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)

    def __repr__(self) -> str:
        inner = ", ".join(
            f"({format_rational(a.coef)})e^{format_rational(a.log_weight)}"
            f"@({format_rational(a.x)},{format_rational(a.y)})"
            for a in self.atoms
        )
        return f"DiscreteKernel[{inner}]"

    def scale(self, q: Fraction | int) -> "DiscreteKernel":
        q = as_fraction(q)
        return DiscreteKernel(
            KernelAtom(a.coef * q, a.log_weight, a.x, a.y) for a in self.atoms
        )

    def __add__(self, other: "DiscreteKernel") -> "DiscreteKernel":
        return DiscreteKernel(list(self.atoms) + list(other.atoms))

    def to_obj(self) -> list[dict[str, str]]:
        return [
            {
                "coef": format_rational(a.coef),
                "log_weight": format_rational(a.log_weight),
                "x": format_rational(a.x),
                "y": format_rational(a.y),
            }
            for a in self.atoms
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)

    @classmethod
    def from_obj(cls, rows: Iterable[dict]) -> "DiscreteKernel":
        atoms = []
        for row in rows:
            try:
                atoms.append(KernelAtom(
                    as_fraction(row["coef"]),
                    as_fraction(row.get("log_weight", 0)),
                    as_fraction(row.get("x", 0)),
                    as_fraction(row.get("y", 0)),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParameterError(f"bad kernel atom {row!r}: {exc}") from exc
        return cls(atoms)

    @classmethod
    def from_json(cls, text: str) -> "DiscreteKernel":
        rows = json.loads(text)
        if not isinstance(rows, list):
            raise ParameterError("kernel JSON must be an array of atoms")
        return cls.from_obj(rows)


def twisted_convolve(k1: DiscreteKernel, k2: DiscreteKernel) -> DiscreteKernel:
    """Atom-by-atom product law: positions add, coefficients multiply,
    exponents add and pick up the reorder phase -x1*y2 from moving
    exp(x1 R) past exp(y2 L)."""
    out = []
    for a in k1:
        for b in k2:
            out.append(KernelAtom(
                coef=a.coef * b.coef,
                log_weight=a.log_weight + b.log_weight - a.x * b.y,
                x=a.x + b.x,
                y=a.y + b.y,
            ))
    return DiscreteKernel(out)


def twisted_convolve_check() -> VerificationReport:
    """Structural checks that need no model: the origin atom is a
    two-sided identity and a three-atom associativity instance holds
    with exponents compared exactly."""
    k1 = DiscreteKernel.atom(1, 0, 1, 0) + DiscreteKernel.atom("2/3", "1/2", 0, "1/3")
    k2 = DiscreteKernel.atom(3, 0, "1/2", 1)
    k3 = DiscreteKernel.atom("1/5", "-1/4", "2/7", "3/2")
    d = DiscreteKernel.delta()
    failures = []
    if twisted_convolve(k1, d) != k1 or twisted_convolve(d, k1) != k1:
        failures.append("identity")
    lhs = twisted_convolve(twisted_convolve(k1, k2), k3)
    rhs = twisted_convolve(k1, twisted_convolve(k2, k3))
    if lhs != rhs:
        failures.append("associativity")
    reorder = twisted_convolve(
        DiscreteKernel.atom(1, 0, 1, 0), DiscreteKernel.atom(1, 0, 0, 1)
    )
    if reorder != DiscreteKernel.atom(1, -1, 1, 1):
        failures.append("reorder-phase")
    return VerificationReport(
        check="twisted-convolution",
        model=None,
        params={"atoms": [len(k1), len(k2), len(k3)]},
        status=PASS if not failures else FAIL,
        max_residual=ZERO if not failures else None,
        first_failure=failures[0] if failures else None,
    )


@dataclass(frozen=True)
class KernelRep:
    """Operator of a discrete kernel, grouped by exponent: the sum of
    exp(log_weight) * op over the stored terms.  Kept in this split
    form because exp of a nonzero rational is irrational; the float
    view is taken only at report time."""

    terms: tuple[tuple[Fraction, LinearOp], ...]
    cap: int

    def linear_op(self) -> LinearOp:
        """Collapse to a single exact operator; only possible when no
        irrational weight is present."""
        if not self.terms:
            return LinearOp.zero(self.cap)
        if len(self.terms) == 1 and self.terms[0][0] == 0:
            return self.terms[0][1]
        raise ParameterError(
            "kernel carries irrational weights exp(p/q); "
            "use float_matrix() for a numeric view"
        )

    def float_matrix(self) -> list[list[float]]:
        n = self.cap + 1
        out = [[0.0] * n for _ in range(n)]
        for lw, op in self.terms:
            w = math.exp(lw)
            for i in range(n):
                row = op.num[i]
                for j in range(n):
                    if row[j]:
                        out[i][j] += w * row[j] / op.den
        return out

    @property
    def trunc_cols(self) -> frozenset[int]:
        cols: set[int] = set()
        for _, op in self.terms:
            cols |= op.trunc_cols
        return frozenset(cols)

    @property
    def truncated(self) -> bool:
        return bool(self.trunc_cols)


def rep_of_kernel(
    m: UmbralModel, k: DiscreteKernel, n_work: int | None = None
) -> KernelRep:
    """Sum of coef * exp(log_weight) * exp(yL) exp(xR) over atoms, on
    the model's capped space.  Any atom with x != 0 leaves every column
    truncation-marked (the raising exponential loses above-cap mass);
    lowering-only kernels are exact."""
    if n_work is not None and n_work != m.n_max:
        raise CapMismatchError(
            f"kernel representation requested at working cap {n_work} "
            f"but model {m.label()} is built at n_max = {m.n_max}"
        )
    groups: dict[Fraction, LinearOp] = {}
    for a in k:
        op = exp_nilpotent_matrix(m.lowering, a.y) @ exp_raising_matrix(m.raising, a.x)
        op = op.scale(a.coef)
        if a.log_weight in groups:
            groups[a.log_weight] = groups[a.log_weight] + op
        else:
            groups[a.log_weight] = op
    terms = tuple((lw, groups[lw]) for lw in sorted(groups))
    return KernelRep(terms=terms, cap=m.degree_cap)


# ---------------------------------------------------------------------------
# squared-ladder sl(2) structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sl2Structure:
    """Triple (lower2, raise2, z) with the bracket constants
    [lower2, raise2] = lam * z, [z, lower2] = lam_minus * lower2,
    [z, raise2] = lam_plus * raise2."""

    lower2: LinearOp
    raise2: LinearOp
    z: LinearOp
    lam: Fraction
    lam_minus: Fraction
    lam_plus: Fraction

    @property
    def constants(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.lam, self.lam_minus, self.lam_plus)


METAPLECTIC_CONSTANTS = (Fraction(4), Fraction(-2), Fraction(2))


def metaplectic(m: UmbralModel) -> Sl2Structure:
    """Squared ladders with z = raise lower + 1/2: the normalization
    makes [lower2, raise2] close onto 4z with no identity term, and the
    constants (4, -2, 2) are the same for every model with
    [lower, raise] = I."""
    l2 = m.lowering @ m.lowering
    r2 = m.raising @ m.raising
    z = (m.raising @ m.lowering) + LinearOp.identity(m.degree_cap).scale(Fraction(1, 2))
    lam, lam_minus, lam_plus = METAPLECTIC_CONSTANTS
    return Sl2Structure(
        lower2=l2, raise2=r2, z=z,
        lam=lam, lam_minus=lam_minus, lam_plus=lam_plus,
    )


def metaplectic_check(
    m: UmbralModel, max_degree: int | None = None
) -> list[VerificationReport]:
    """Verify all three brackets of the squared-ladder triple on every
    basis column of degree <= max_degree (default: everything the cap
    can certify, i.e. indices up to n_max - 2)."""
    s = metaplectic(m)
    cols = []
    for j in range(m.n_max - 1):
        d = m.degree_of_index(j)
        if max_degree is not None and d > max_degree:
            break
        cols.append(d)
    checks = [
        ("sl2-commutator", op_commutator(s.lower2, s.raise2), s.z.scale(s.lam)),
        ("sl2-z-lowering", op_commutator(s.z, s.lower2), s.lower2.scale(s.lam_minus)),
        ("sl2-z-raising", op_commutator(s.z, s.raise2), s.raise2.scale(s.lam_plus)),
    ]
    params = {
        "constants": [format_rational(q) for q in s.constants],
        "max_degree": max_degree if max_degree is not None else cols[-1] if cols else None,
    }
    out = []
    for name, lhs, rhs in checks:
        bad = lhs.equal_on_columns(rhs, cols)
        if bad is None:
            out.append(VerificationReport(
                check=name, model=m.label(), params=dict(params),
                status=PASS, max_residual=ZERO,
            ))
        else:
            worst = max(
                abs(Fraction(lhs.num[i][bad], lhs.den)
                    - Fraction(rhs.num[i][bad], rhs.den))
                for i in range(lhs.cap + 1)
            )
            out.append(VerificationReport(
                check=name, model=m.label(), params=dict(params),
                status=FAIL, max_residual=worst,
                first_failure={"degree": bad},
            ))
    return out


def metaplectic_sequences(
    m: UmbralModel,
) -> tuple[list[Fraction], list[Fraction], list[Fraction]]:
    """Diagonal data of the squared-ladder triple on the even-index
    sub-ladder q_k = p_{2k}: lower2 q_k = a_k q_{k-1},
    raise2 q_k = b_k q_{k+1}, z q_k = c_k q_k, extracted honestly by
    expanding the images in the model basis.  The top raising entry
    cannot be read off a capped space and is stored as 0; the closure
    solver never consults it."""
    s = metaplectic(m)
    top = m.n_max // 2
    a: list[Fraction] = []
    b: list[Fraction] = []
    c: list[Fraction] = []
    for k in range(top + 1):
        p = m.basis[2 * k]
        low = expand_in_basis(m, s.lower2.apply(p))
        diag = expand_in_basis(m, s.z.apply(p))
        for n, q in enumerate(low):
            if q and n != 2 * k - 2:
                raise ParameterError(
                    f"squared lowering is not diagonal on {m.label()}: "
                    f"index {2 * k} leaks onto {n}"
                )
        for n, q in enumerate(diag):
            if q and n != 2 * k:
                raise ParameterError(
                    f"z is not diagonal on {m.label()}: "
                    f"index {2 * k} leaks onto {n}"
                )
        a.append(low[2 * k - 2] if k else ZERO)
        c.append(diag[2 * k])
        if k < top:
            high = expand_in_basis(m, s.raise2.apply(p))
            for n, q in enumerate(high):
                if q and n != 2 * k + 2:
                    raise ParameterError(
                        f"squared raising is not diagonal on {m.label()}: "
                        f"index {2 * k} leaks onto {n}"
                    )
            b.append(high[2 * k + 2])
        else:
            b.append(ZERO)
    return a, b, c


@dataclass(frozen=True)
class Sl2LadderResult:
    """Outcome of the diagonal closure check for ladder sequences."""

    ok: bool
    lam: Fraction
    lam_minus: Fraction
    lam_plus: Fraction
    first_violation: tuple[str, int] | None
    structure: Sl2Structure | None

    @property
    def constants(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.lam, self.lam_minus, self.lam_plus)


def generic_sl2_ladder(
    a: Sequence[Fraction | int | str],
    b: Sequence[Fraction | int | str],
    c: Sequence[Fraction | int | str],
    n: int | None = None,
) -> Sl2LadderResult:
    """Given diagonal ladder data (lower p_n = a_n p_{n-1},
    raise p_n = b_n p_{n+1}, z p_n = c_n p_n), solve for the bracket
    constants from the first two index diagonals and verify closure at
    every n <= N-1.  Failures come back as a located report, not an
    exception.  The top entry b_N never enters the check (it would act
    on an index outside the space)."""
    fa = [as_fraction(q) for q in a]
    fb = [as_fraction(q) for q in b]
    fc = [as_fraction(q) for q in c]
    if not (len(fa) == len(fb) == len(fc)):
        raise ParameterError("ladder sequences must share a length")
    if len(fa) < 2:
        raise ParameterError("need sequences up to index 1 to solve for constants")
    top = len(fa) - 1
    if n is not None:
        if not 1 <= n <= top:
            raise ParameterError(f"index bound {n} outside 1..{top}")
        top = n
        fa, fb, fc = fa[: top + 1], fb[: top + 1], fc[: top + 1]

    def comm_diag(k: int) -> Fraction:
        # [lower2, raise2]-style diagonal at index k
        v = fb[k] * fa[k + 1]
        if k:
            v -= fa[k] * fb[k - 1]
        return v

    lam = ZERO
    for k in (0, 1):
        if k + 1 <= top and fc[k]:
            lam = comm_diag(k) / fc[k]
            break
    lam_minus = (fc[0] - fc[1]) if fa[1] else ZERO
    lam_plus = ZERO
    for k in (0, 1):
        if k + 1 <= top and fb[k]:
            lam_plus = fc[k + 1] - fc[k]
            break

    violation: tuple[str, int] | None = None
    if fa[0]:
        violation = ("lowering-bottom", 0)
    else:
        for k in range(top):
            if comm_diag(k) != lam * fc[k]:
                violation = ("commutator-diagonal", k)
                break
            if k >= 1 and fa[k] and fc[k - 1] - fc[k] != lam_minus:
                violation = ("z-lowering", k)
                break
            if fb[k] and fc[k + 1] - fc[k] != lam_plus:
                violation = ("z-raising", k)
                break

    structure = None
    if violation is None:
        lower = LinearOp.from_columns(
            top, lambda j: {j - 1: fa[j]} if j else {}
        )
        raiser = LinearOp.from_columns(
            top,
            lambda j: {j + 1: fb[j]} if j < top else {},
            trunc_cols=frozenset({top}),
        )
        diag = LinearOp.from_columns(top, lambda j: {j: fc[j]})
        structure = Sl2Structure(
            lower2=lower, raise2=raiser, z=diag,
            lam=lam, lam_minus=lam_minus, lam_plus=lam_plus,
        )
    return Sl2LadderResult(
        ok=violation is None,
        lam=lam, lam_minus=lam_minus, lam_plus=lam_plus,
        first_violation=violation,
        structure=structure,
    )


def sl2_closure_check(m: UmbralModel) -> VerificationReport:
    """Extract the even-index diagonal sequences from a model's squared
    ladders and confirm they close with the metaplectic constants."""
    a, b, c = metaplectic_sequences(m)
    res = generic_sl2_ladder(a, b, c)
    ok = res.ok and res.constants == METAPLECTIC_CONSTANTS
    ff = None
    if not res.ok:
        ff = {"bracket": res.first_violation[0], "index": res.first_violation[1]}
    elif not ok:
        ff = {"constants": [format_rational(q) for q in res.constants]}
    return VerificationReport(
        check="sl2-closure",
        model=m.label(),
        params={
            "indices": len(a) - 1,
            "constants": [format_rational(q) for q in res.constants],
        },
        status=PASS if ok else FAIL,
        max_residual=ZERO if ok else None,
        first_failure=ff,
    )
