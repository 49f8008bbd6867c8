"""Generalized translations and the binomial/character identities.

A model whose lowering operator commutes with shifts and whose vacuum
is evaluation at 0 has a basis of binomial type:

    p_n(t + y) = sum_{k<=n} p_{n-k}(y) p_k(t).

For models without that structure (heat, Bessel) the same series still
defines a generalized translation

    T^y f = sum_k p_k(y) L^k f,

which for the heat model collapses to the even averaging
(f(t+y) + f(t-y))/2 and in general satisfies the product (character)
property for the generating function F(lambda, t) = sum_k lambda^k p_k:
T_t^y F = F(lambda, y) F(lambda, t), order by order in lambda.

The two-variable identities here are checked on an exact dense
coefficient table in (t, y); no float ever enters.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .core import (
    CapMismatchError,
    ONE,
    ParameterError,
    Poly,
    ZERO,
    as_fraction,
)
from .models import UmbralModel
from .reports import FAIL, INCONCLUSIVE, PASS, VerificationReport


class BivariatePoly:
    """Dense table of a polynomial in (t, y): entry [i][j] multiplies
    t^i y^j.  Both variables share one degree cap."""

    __slots__ = ("table", "cap")

    def __init__(self, table: Sequence[Sequence[Fraction]], cap: int):
        if len(table) != cap + 1 or any(len(r) != cap + 1 for r in table):
            raise CapMismatchError("table shape does not match cap")
        self.table = tuple(tuple(row) for row in table)
        self.cap = cap

    @classmethod
    def zero(cls, cap: int) -> "BivariatePoly":
        n = cap + 1
        return cls([[ZERO] * n for _ in range(n)], cap)

    @classmethod
    def product(cls, in_t: Poly, in_y: Poly) -> "BivariatePoly":
        """in_t(t) * in_y(y)."""
        if in_t.cap != in_y.cap:
            raise CapMismatchError("caps differ")
        cap = in_t.cap
        rows = [
            [a * b for b in in_y.coeffs] if a else [ZERO] * (cap + 1)
            for a in in_t.coeffs
        ]
        return cls(rows, cap)

    @classmethod
    def from_shift(cls, p: Poly) -> "BivariatePoly":
        """p(t + y), expanded exactly (binomial theorem per monomial)."""
        import math

        cap = p.cap
        rows = [[ZERO] * (cap + 1) for _ in range(cap + 1)]
        for k, c in enumerate(p.coeffs):
            if not c:
                continue
            for i in range(k + 1):
                rows[i][k - i] += c * math.comb(k, i)
        return cls(rows, cap)

    def __add__(self, other: "BivariatePoly") -> "BivariatePoly":
        if self.cap != other.cap:
            raise CapMismatchError("caps differ")
        rows = [
            [a + b for a, b in zip(ra, rb)]
            for ra, rb in zip(self.table, other.table)
        ]
        return BivariatePoly(rows, self.cap)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BivariatePoly):
            return NotImplemented
        return self.cap == other.cap and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.table, self.cap))

    def first_difference(self, other: "BivariatePoly") -> tuple[int, int] | None:
        """Smallest (t-degree, y-degree) where the tables differ."""
        for i in range(self.cap + 1):
            for j in range(self.cap + 1):
                if self.table[i][j] != other.table[i][j]:
                    return (i, j)
        return None


def _require_cap(m: UmbralModel, n: int) -> None:
    if not 0 <= n <= m.n_max:
        raise CapMismatchError(
            f"basis index {n} outside 0..{m.n_max}"
        )


def binomial_check(m: UmbralModel, n: int) -> VerificationReport:
    """Exact two-variable check of p_n(t+y) = sum_k p_{n-k}(y) p_k(t).

    Preconditions (the binomial-type hypotheses): the lowering operator
    is shift-invariant and the vacuum is evaluation at 0.  A model that
    fails either gets a ParameterError naming the failed hypothesis --
    the Hermite model is shift-invariant but has the wrong vacuum.
    """
    _require_cap(m, n)
    if not m.shift_invariant:
        raise ParameterError(
            f"not binomial type: {m.label()} has no shift-invariant "
            "lowering operator"
        )
    if not m.vacuum_is_eval0():
        raise ParameterError(
            f"not binomial type: {m.label()} vacuum is not evaluation at 0"
        )
    lhs = BivariatePoly.from_shift(m.basis[n])
    rhs = BivariatePoly.zero(m.degree_cap)
    for k in range(n + 1):
        rhs = rhs + BivariatePoly.product(m.basis[k], m.basis[n - k])
    bad = lhs.first_difference(rhs)
    return VerificationReport(
        check="binomial",
        model=m.label(),
        params={"n": n},
        status=PASS if bad is None else FAIL,
        first_failure=bad,
    )


def generalized_translate(m: UmbralModel, y: Fraction | int, f: Poly) -> Poly:
    """T^y f = sum_k p_k(y) L^k f with exact rational y.

    The sum is finite: L^k f dies once k exceeds the index content of
    f.  Truncation flags on intermediate applications propagate."""
    y = as_fraction(y)
    m.check_in_space(f)
    if f.cap != m.degree_cap:
        raise CapMismatchError(
            f"input cap {f.cap} differs from model cap {m.degree_cap}"
        )
    acc = Poly.zero(m.degree_cap).with_flag(f.truncated)
    g = f
    for k in range(m.n_max + 1):
        w = m.basis[k].eval(y)
        if w:
            acc = acc + g.scale(w)
        g = m.lowering.apply(g)
        if g.is_zero() and not g.truncated:
            break
    else:
        if not (g.is_zero() and not g.truncated):
            # content survived past the basis range: cap too small
            raise CapMismatchError(
                "translation series did not terminate within the basis range"
            )
    return acc


def character_check(m: UmbralModel, order: int) -> VerificationReport:
    """Order-by-order check of the character property of
    F(lambda, t) = sum_k lambda^k p_k(t):

        T_t^y F = F(lambda, y) F(lambda, t).

    At lambda-order a the left side is sum_{k<=a} p_k(y) (L^k p_a)(t)
    with y kept symbolic, the right side sum_{i+j=a} p_i(y) p_j(t);
    both are exact tables in (t, y) and no cross-order cancellation is
    possible."""
    if order > m.n_max:
        raise CapMismatchError(
            f"order {order} exceeds the top basis index {m.n_max}"
        )
    bad = None
    tainted = False
    for a in range(order + 1):
        lhs = BivariatePoly.zero(m.degree_cap)
        g = m.basis[a]
        for k in range(a + 1):
            lhs = lhs + BivariatePoly.product(g, m.basis[k])
            tainted |= g.truncated
            g = m.lowering.apply(g)
        rhs = BivariatePoly.zero(m.degree_cap)
        for i in range(a + 1):
            rhs = rhs + BivariatePoly.product(m.basis[a - i], m.basis[i])
        diff = lhs.first_difference(rhs)
        if diff is not None:
            bad = (a, diff)
            break
    status = FAIL if bad is not None else (INCONCLUSIVE if tainted else PASS)
    return VerificationReport(
        check="character",
        model=m.label(),
        params={"order": order},
        status=status,
        first_failure=bad,
    )


def delsarte_eigen_check(m: UmbralModel, order: int) -> VerificationReport:
    """The two conditions tying the basis to its translation structure:
    L p_n = p_{n-1} and p_n(0) = delta_{0n} for n <= order.  Requires a
    vacuum equal to evaluation at 0 (otherwise the second condition is
    not the model's own normalization and the check refuses to run)."""
    if order > m.n_max:
        raise CapMismatchError(
            f"order {order} exceeds the top basis index {m.n_max}"
        )
    if not m.vacuum_is_eval0():
        raise ParameterError(
            f"{m.label()} vacuum is not evaluation at 0; the eigenfunction "
            "normalization p_n(0) = delta_0n does not apply"
        )
    bad = None
    for n in range(order + 1):
        want = ONE if n == 0 else ZERO
        if m.basis[n].eval(0) != want:
            bad = ("value-at-0", n)
            break
        g = m.apply_lowering(m.basis[n])
        expected = m.basis[n - 1] if n else Poly.zero(m.degree_cap)
        if g != expected:
            bad = ("lowering", n)
            break
    return VerificationReport(
        check="delsarte",
        model=m.label(),
        params={"order": order},
        status=PASS if bad is None else FAIL,
        first_failure=bad,
    )
