"""Catalog of umbral models.

A model packages a graded polynomial basis p_0..p_N together with the
ladder pair: a lowering operator with L p_n = p_{n-1}, L p_0 = 0, a
raising operator with R p_n = (n+1) p_{n+1}, the vacuum functional
l_0 with <l_0, p_n> = delta_{0n}, and the structure constant iota = 1
fixed once for the whole package, so that [R, L] = -I on the safe zone.

Catalog entries:

``monomial``          p_n = t^n/n!,            L = d/dt,      R = t*
``lower-factorial``   p_n = t(t-1)...(t-n+1)/n!, L = forward difference
``upper-factorial``   p_n = t(t+1)...(t+n-1)/n!, L = backward difference
``hermite``           p_n = He_n/n! (probabilists'), L = d/dt,
                      R = t* - d/dt; the vacuum is the dual row of the
                      basis matrix, *not* evaluation at 0
``heat``              p_n = t^{2n}/(2n)!,      L = d^2/dt^2,
                      R : t^{2n} -> t^{2n+2}/(2(2n+1))
``bessel`` (nu > 0)   q_n = t^{2n}/c_n with c_n = prod 2k(2k+nu-1),
                      L = B_nu = d^2/dt^2 + (nu/t) d/dt on even
                      polynomials, R : t^{2n} -> t^{2n+2}/(2(2n+nu+1))

The two even-parity models grade by basis index n <-> degree 2n and
live on the even subspace only; applying their operators to a
polynomial with odd-degree content raises DomainError (for the Bessel
lowering this is forced: B_nu t = nu/t is not a polynomial).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .core import (
    DEFAULT_DEGREE_CAP,
    CapMismatchError,
    DomainError,
    Functional,
    LinearOp,
    ONE,
    ParameterError,
    Poly,
    ZERO,
    as_fraction,
    format_rational,
)

IOTA = ONE  # structure constant of the Heisenberg relation, fixed package-wide

MODEL_NAMES = (
    "monomial",
    "lower-factorial",
    "upper-factorial",
    "hermite",
    "heat",
    "bessel",
)


class Parity(enum.Enum):
    ALL = "all"
    EVEN = "even"


@dataclass(frozen=True)
class UmbralModel:
    name: str
    n_max: int                    # top basis index
    degree_cap: int               # cap of the ambient polynomial space
    parity: Parity
    basis: tuple[Poly, ...]       # p_0 .. p_{n_max}
    lowering: LinearOp
    raising: LinearOp
    vacuum: Functional
    shift_invariant: bool
    nu: Fraction | None = None    # Bessel parameter, if any
    iota: Fraction = IOTA

    def label(self) -> str:
        if self.nu is not None:
            return f"{self.name}(nu={format_rational(self.nu)})"
        return self.name

    def degree_of_index(self, n: int) -> int:
        return 2 * n if self.parity is Parity.EVEN else n

    def check_in_space(self, f: Poly) -> None:
        """Raise DomainError if f lies outside the model's graded space
        (odd-degree content for the even-parity models)."""
        if self.parity is Parity.EVEN:
            for k in range(1, f.cap + 1, 2):
                if f.coeffs[k]:
                    raise DomainError(
                        f"{self.label()} lives on even polynomials; "
                        f"input has a nonzero t^{k} coefficient"
                    )

    def apply_lowering(self, f: Poly) -> Poly:
        self.check_in_space(f)
        return self.lowering.apply(f)

    def apply_raising(self, f: Poly) -> Poly:
        self.check_in_space(f)
        return self.raising.apply(f)

    def vacuum_is_eval0(self) -> bool:
        return self.vacuum == Functional.eval_at_zero(self.degree_cap)


def bessel_ladder_constants(nu: Fraction, count: int) -> list[Fraction]:
    """c_0 = 1, c_n = c_{n-1} * 2n(2n + nu - 1).

    These normalizations make B_nu t^{2n}/c_n = t^{2n-2}/c_{n-1}; they
    are the ground truth for both the exact Bessel model and the float
    Bessel-function series.
    """
    cs = [ONE]
    for n in range(1, count + 1):
        cs.append(cs[-1] * 2 * n * (2 * n + nu - 1))
    return cs


def _monomial_basis(n_max: int, cap: int) -> tuple[Poly, ...]:
    return tuple(
        Poly.monomial(n, cap, Fraction(1, math.factorial(n)))
        for n in range(n_max + 1)
    )


def _derivative_op(cap: int) -> LinearOp:
    return LinearOp.from_columns(
        cap, lambda j: {j - 1: Fraction(j)} if j >= 1 else {}
    )


def _mult_by_t_op(cap: int) -> LinearOp:
    return LinearOp.from_columns(
        cap,
        lambda j: {j + 1: ONE} if j < cap else {},
        trunc_cols=frozenset({cap}),
    )


def _shift_op(cap: int, y: Fraction) -> LinearOp:
    """f(t) -> f(t+y); exact, degree never grows."""
    def col(j: int) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        yp = ONE
        for i in range(j, -1, -1):
            out[i] = math.comb(j, i) * yp
            yp *= y
        return out
    return LinearOp.from_columns(cap, col)


def _dual_row0(basis: Sequence[Poly], cap: int, parity: Parity) -> Functional:
    """Row x with <x, p_n> = delta_{0n}, by triangular back-substitution
    along the model's grading."""
    degrees = [
        (2 * n if parity is Parity.EVEN else n) for n in range(len(basis))
    ]
    x = [ZERO] * (cap + 1)
    for n, p in enumerate(basis):
        d = degrees[n]
        lead = p.coeffs[d]
        if not lead:
            raise ParameterError(
                f"basis element {n} has zero leading coefficient"
            )
        acc = sum(
            (x[i] * c for i, c in enumerate(p.coeffs) if c and x[i]), ZERO
        )
        target = ONE if n == 0 else ZERO
        x[d] = (target - acc) / lead
    return Functional(x, cap)


def _raising_from_ladder(
    basis: Sequence[Poly], cap: int
) -> LinearOp:
    """Matrix R with R p_n = (n+1) p_{n+1}, built column by column by
    expanding each monomial in the basis (triangular solve).  The top
    basis element has no image inside the cap, so the top column is
    marked truncated."""
    n_max = len(basis) - 1
    grid = [[ZERO] * (cap + 1) for _ in range(cap + 1)]
    # gamma[j][n]: coefficient of p_n in t^j, filled j = 0..cap
    for j in range(cap + 1):
        residual = [ZERO] * (cap + 1)
        residual[j] = ONE
        image = [ZERO] * (cap + 1)
        for n in range(j, -1, -1):
            if n > n_max:
                raise CapMismatchError(
                    f"degree {j} exceeds top basis index {n_max}"
                )
            p = basis[n]
            g = residual[n] / p.coeffs[n]
            if g:
                for i, c in enumerate(p.coeffs):
                    if c:
                        residual[i] -= g * c
                if n < n_max:
                    q = basis[n + 1]
                    s = g * (n + 1)
                    for i, c in enumerate(q.coeffs):
                        if c:
                            image[i] += s * c
        for i in range(cap + 1):
            grid[i][j] = image[i]
    return LinearOp.from_entries(grid, trunc_cols=frozenset({cap}))


def build_monomials(n_max: int, cap: int | None = None) -> UmbralModel:
    """p_n = t^n/n!; L = d/dt, R = multiplication by t, vacuum = f(0)."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    cap = n_max if cap is None else cap
    if cap < n_max:
        raise CapMismatchError("degree cap below top basis index")
    return UmbralModel(
        name="monomial",
        n_max=n_max,
        degree_cap=cap,
        parity=Parity.ALL,
        basis=_monomial_basis(n_max, cap),
        lowering=_derivative_op(cap),
        raising=_mult_by_t_op(cap),
        vacuum=Functional.eval_at_zero(cap),
        shift_invariant=True,
    )


def _factorial_basis(n_max: int, cap: int, step: int) -> tuple[Poly, ...]:
    """p_{n+1} = p_n * (t - step*n)/(n+1); step=+1 falling, -1 rising."""
    basis = [Poly((ONE,), cap)]
    for n in range(n_max):
        factor = Poly([Fraction(-step * n), ONE], cap)
        basis.append((basis[-1] * factor).scale(Fraction(1, n + 1)))
    return tuple(basis)


def build_lower_factorial(n_max: int, cap: int | None = None) -> UmbralModel:
    """Falling-factorial basis t(t-1)...(t-n+1)/n!; the lowering
    operator is the forward difference f(t+1) - f(t)."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    cap = n_max if cap is None else cap
    if cap != n_max:
        raise CapMismatchError(
            "factorial models need the degree cap equal to the top basis "
            "index (the raising matrix is defined through the basis span)"
        )
    basis = _factorial_basis(n_max, cap, step=+1)
    lowering = _shift_op(cap, ONE) - LinearOp.identity(cap)
    return UmbralModel(
        name="lower-factorial",
        n_max=n_max,
        degree_cap=cap,
        parity=Parity.ALL,
        basis=basis,
        lowering=lowering,
        raising=_raising_from_ladder(basis, cap),
        vacuum=Functional.eval_at_zero(cap),
        shift_invariant=True,
    )


def build_upper_factorial(n_max: int, cap: int | None = None) -> UmbralModel:
    """Rising-factorial basis t(t+1)...(t+n-1)/n!; the lowering
    operator is the backward difference f(t) - f(t-1)."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    cap = n_max if cap is None else cap
    if cap != n_max:
        raise CapMismatchError(
            "factorial models need the degree cap equal to the top basis "
            "index (the raising matrix is defined through the basis span)"
        )
    basis = _factorial_basis(n_max, cap, step=-1)
    lowering = LinearOp.identity(cap) - _shift_op(cap, -ONE)
    return UmbralModel(
        name="upper-factorial",
        n_max=n_max,
        degree_cap=cap,
        parity=Parity.ALL,
        basis=basis,
        lowering=lowering,
        raising=_raising_from_ladder(basis, cap),
        vacuum=Functional.eval_at_zero(cap),
        shift_invariant=True,
    )


def build_hermite(n_max: int, cap: int | None = None) -> UmbralModel:
    """Probabilists' Hermite basis He_n/n!.

    This is an Appell family: the lowering operator is plain d/dt, the
    raising operator t* - d/dt.  Evaluation at 0 does *not* kill the
    higher basis elements (He_2(0) = -1), so the vacuum is the genuine
    dual row of the basis matrix.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    cap = n_max if cap is None else cap
    if cap < n_max:
        raise CapMismatchError("degree cap below top basis index")
    basis = [Poly((ONE,), cap), Poly((ZERO, ONE), cap)]
    # He_{n+1} = t He_n - n He_{n-1}  =>  p_{n+1} = (t p_n - p_{n-1})/(n+1)
    for n in range(1, n_max):
        t_pn = Poly([ZERO, ONE], cap) * basis[n]
        basis.append((t_pn - basis[n - 1]).scale(Fraction(1, n + 1)))
    basis = basis[: n_max + 1]
    lowering = _derivative_op(cap)
    raising = _mult_by_t_op(cap) - _derivative_op(cap)
    return UmbralModel(
        name="hermite",
        n_max=n_max,
        degree_cap=cap,
        parity=Parity.ALL,
        basis=tuple(basis),
        lowering=lowering,
        raising=raising,
        vacuum=_dual_row0(basis, cap, Parity.ALL),
        shift_invariant=True,
    )


def build_heat(n_max: int, cap: int | None = None) -> UmbralModel:
    """Even model p_n = t^{2n}/(2n)! with L = d^2/dt^2 and the raising
    operator t^{2n} -> t^{2n+2}/(2(2n+1)) (half the t-antiderivative of
    the multiplication t^{2n} -> t^{2n+1}).  Operators are stored on
    the even columns only; the odd columns are zero and unreachable."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    cap = 2 * n_max if cap is None else cap
    if cap < 2 * n_max:
        raise CapMismatchError("degree cap below top basis degree")
    basis = tuple(
        Poly.monomial(2 * n, cap, Fraction(1, math.factorial(2 * n)))
        for n in range(n_max + 1)
    )
    lowering = LinearOp.from_columns(
        cap,
        lambda j: {j - 2: Fraction(j * (j - 1))} if j % 2 == 0 and j >= 2 else {},
    )
    raising = LinearOp.from_columns(
        cap,
        lambda j: (
            {j + 2: Fraction(1, 2 * (j + 1))}
            if j % 2 == 0 and j + 2 <= cap
            else {}
        ),
        trunc_cols=frozenset(j for j in range(0, cap + 1, 2) if j + 2 > cap),
    )
    return UmbralModel(
        name="heat",
        n_max=n_max,
        degree_cap=cap,
        parity=Parity.EVEN,
        basis=basis,
        lowering=lowering,
        raising=raising,
        vacuum=Functional.eval_at_zero(cap),
        shift_invariant=False,
    )


def build_bessel(
    n_max: int, nu: Fraction | int | str, cap: int | None = None
) -> UmbralModel:
    """Even model q_n = t^{2n}/c_n, c_n = prod_{k<=n} 2k(2k+nu-1),
    lowered by the Bessel operator B_nu = d^2/dt^2 + (nu/t) d/dt and
    raised by t^{2n} -> t^{2n+2}/(2(2n+nu+1)).  Requires nu > 0."""
    nu = as_fraction(nu)
    if nu <= 0:
        raise ParameterError(f"bessel model needs nu > 0, got {format_rational(nu)}")
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    cap = 2 * n_max if cap is None else cap
    if cap < 2 * n_max:
        raise CapMismatchError("degree cap below top basis degree")
    cs = bessel_ladder_constants(nu, n_max)
    basis = tuple(
        Poly.monomial(2 * n, cap, 1 / cs[n]) for n in range(n_max + 1)
    )
    lowering = LinearOp.from_columns(
        cap,
        lambda j: (
            {j - 2: j * (j + nu - 1)} if j % 2 == 0 and j >= 2 else {}
        ),
    )
    raising = LinearOp.from_columns(
        cap,
        lambda j: (
            {j + 2: 1 / (2 * (j + nu + 1))}
            if j % 2 == 0 and j + 2 <= cap
            else {}
        ),
        trunc_cols=frozenset(j for j in range(0, cap + 1, 2) if j + 2 > cap),
    )
    return UmbralModel(
        name="bessel",
        n_max=n_max,
        degree_cap=cap,
        parity=Parity.EVEN,
        basis=basis,
        lowering=lowering,
        raising=raising,
        vacuum=Functional.eval_at_zero(cap),
        shift_invariant=False,
        nu=nu,
    )


def verify_model(m: UmbralModel) -> list["VerificationReport"]:
    """Exhaustive exact verification of the model axioms.

    Four sub-checks, each its own report:

    * ``ladder-lowering``: L p_0 = 0 and L p_n = p_{n-1} for all n
    * ``ladder-raising``:  R p_n = (n+1) p_{n+1} for n < n_max
    * ``vacuum``:          <l_0, p_n> = delta_{0n} for all n
    * ``commutator``:      [R, L] p_n = -iota p_n for n < n_max
      (the top index is excluded: there the raising already truncated)

    Zero tolerance; any truncation-tainted comparison downgrades the
    check to "inconclusive" rather than passing it.
    """
    from .reports import FAIL, INCONCLUSIVE, PASS, VerificationReport

    params: dict[str, object] = {"degree": m.n_max}
    if m.nu is not None:
        params["nu"] = m.nu
    out: list[VerificationReport] = []

    def report(check: str, first_bad, inconclusive: bool) -> None:
        status = PASS if first_bad is None else FAIL
        if inconclusive and status == PASS:
            status = INCONCLUSIVE
        out.append(
            VerificationReport(
                check=check,
                model=m.label(),
                params=dict(params),
                status=status,
                first_failure=first_bad,
            )
        )

    # ladder, lowering side
    bad = None
    tainted = False
    low0 = m.apply_lowering(m.basis[0])
    tainted |= low0.truncated
    if not low0.is_zero():
        bad = 0
    if bad is None:
        for n in range(1, m.n_max + 1):
            g = m.apply_lowering(m.basis[n])
            tainted |= g.truncated
            if g != m.basis[n - 1]:
                bad = n
                break
    report("ladder-lowering", bad, tainted)

    # ladder, raising side
    bad = None
    tainted = False
    for n in range(m.n_max):
        g = m.apply_raising(m.basis[n])
        tainted |= g.truncated
        if g != m.basis[n + 1].scale(n + 1):
            bad = n
            break
    report("ladder-raising", bad, tainted)

    # vacuum pairing
    bad = None
    for n in range(m.n_max + 1):
        want = ONE if n == 0 else ZERO
        if m.vacuum.pair(m.basis[n]) != want:
            bad = n
            break
    report("vacuum", bad, False)

    # commutator on the truncation-safe zone
    bad = None
    tainted = False
    comm = (m.raising @ m.lowering) - (m.lowering @ m.raising)
    for n in range(m.n_max):
        g = comm.apply(m.basis[n])
        tainted |= g.truncated
        if g != m.basis[n].scale(-m.iota):
            bad = n
            break
    report("commutator", bad, tainted)
    return out


def build_model(
    name: str,
    n_max: int,
    nu: Fraction | int | str | None = None,
    cap: int | None = None,
) -> UmbralModel:
    """Catalog dispatch by name; ``nu`` is required for (and only for)
    the bessel model."""
    if name == "bessel":
        if nu is None:
            raise ParameterError("bessel model requires --nu")
        return build_bessel(n_max, nu, cap)
    if nu is not None:
        raise ParameterError(f"model {name!r} takes no nu parameter")
    builders: dict[str, Callable[[int, int | None], UmbralModel]] = {
        "monomial": build_monomials,
        "lower-factorial": build_lower_factorial,
        "upper-factorial": build_upper_factorial,
        "hermite": build_hermite,
        "heat": build_heat,
    }
    if name not in builders:
        raise ParameterError(
            f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}"
        )
    return builders[name](n_max, cap)
