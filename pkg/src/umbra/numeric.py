"""Floating-point transforms tied to the singular second-order operator
B f = f'' + (nu/t) f', and residual checks of the relations that make
them transmutations.

The checks never differentiate under the integral sign: outer
derivatives are Richardson-extrapolated central differences over a
*fixed* quadrature rule, so the integration error varies smoothly with
the evaluation point and cancels in the difference quotients.  An
adaptive rule there would amplify its panel-boundary noise by 1/h^2.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

from .core import ParameterError, QuadratureError
from .quadrature import FIXED, QuadratureSpec, ScalarFn, integrate
from .reports import ResidualReport

_EXACT_SERIES_THRESHOLD = 25.0   # on lam * t^2; see little_bessel_j


def _as_exact(x: float) -> Fraction:
    # binary floats are dyadic rationals; this loses nothing
    return Fraction(x)


def little_bessel_j(nu: float | Fraction, lam: float, t: float) -> float:
    """Normalized Bessel-type oscillation: the entire series
    sum_n (-lam)^n t^(2n) / c_n with c_n = prod_{k<=n} 2k(2k+nu-1),
    i.e. the solution of B_nu j = -lam j with j(0) = 1, j'(0) = 0.
    For nu = 2 this telescopes to sin(sqrt(lam) t)/(sqrt(lam) t)."""
    return _bessel_series(nu, lam, t, 0)


def little_bessel_j_with_derivatives(
    nu: float | Fraction, lam: float, t: float
) -> tuple[float, float, float]:
    """(j, j', j'') by term-wise differentiation of the series; used to
    measure the defining ODE's residual without finite differences."""
    return (
        _bessel_series(nu, lam, t, 0),
        _bessel_series(nu, lam, t, 1),
        _bessel_series(nu, lam, t, 2),
    )


def _bessel_series(nu: float | Fraction, lam: float, t: float, deriv: int) -> float:
    if nu <= 0:
        raise ParameterError(f"need nu > 0, got {nu}")
    if t == 0.0:
        # j = 1 - lam t^2/c_1 + ..., c_1 = 2(nu+1)
        return (1.0, 0.0, -lam / (float(nu) + 1.0))[deriv]
    z = lam * t * t
    if abs(z) <= _EXACT_SERIES_THRESHOLD:
        return _bessel_series_float(float(nu), lam, t, deriv)
    return _bessel_series_exact(Fraction(nu), lam, t, deriv)


def _bessel_series_float(nu: float, lam: float, t: float, deriv: int) -> float:
    # term_n = (-lam)^n t^(2n) / c_n, with the derivative factor bolted on
    term = 1.0
    acc = 1.0 if deriv == 0 else 0.0
    n = 0
    while True:
        n += 1
        term *= -lam * t * t / (2 * n * (2 * n + nu - 1))
        if deriv == 0:
            piece = term
        elif deriv == 1:
            piece = term * (2 * n) / t
        else:
            piece = term * (2 * n) * (2 * n - 1) / (t * t)
        acc += piece
        if abs(term) <= 1e-18 * (1.0 + abs(acc)) and n > 2:
            return acc


def _bessel_series_exact(nu: Fraction, lam: float, t: float, deriv: int) -> float:
    """Exact-rational summation for large lam*t^2, where the float loop
    would lose most of its digits to cancellation (the terms peak near
    exp(sqrt(z)) while the sum is O(1)).  Only the final conversion
    rounds."""
    zl = _as_exact(lam)
    zt = _as_exact(t)
    z = zl * zt * zt
    term = Fraction(1)
    acc = Fraction(1) if deriv == 0 else Fraction(0)
    n = 0
    peak = math.isqrt(int(abs(z))) + 2
    while True:
        n += 1
        term *= -z / (2 * n * (2 * n + nu - 1))
        if deriv == 0:
            piece = term
        elif deriv == 1:
            piece = term * (2 * n) / zt
        else:
            piece = term * (2 * n) * (2 * n - 1) / (zt * zt)
        acc += piece
        if n > peak and abs(term) < Fraction(1, 10**25):
            return float(acc)


def poisson_constant(nu: float) -> float:
    """C(nu) = 2 Gamma((nu+1)/2) / (sqrt(pi) Gamma(nu/2)); normalizes
    the transform so constants map to themselves."""
    return 2.0 * math.gamma((nu + 1) / 2) / (math.sqrt(math.pi) * math.gamma(nu / 2))


def poisson_transform(
    nu: float, f: ScalarFn, x: float, q: QuadratureSpec | None = None
) -> float:
    """C(nu) * integral_0^(pi/2) (cos theta)^(nu-1) f(x sin theta)
    dtheta.  The sine substitution has already absorbed the endpoint
    singularity of the (x^2-t^2) kernel, but only for nu >= 1; smaller
    nu is refused rather than mis-integrated."""
    if nu < 1:
        raise ParameterError(
            f"poisson_transform supports nu >= 1 only, got {nu:g}"
        )
    if x <= 0:
        raise ParameterError(f"need x > 0, got {x:g}")
    if q is None:
        q = QuadratureSpec()

    def integrand(theta: float) -> float:
        c = math.cos(theta)
        return (c ** (nu - 1.0) if nu != 1 else 1.0) * f(x * math.sin(theta))

    return poisson_constant(nu) * integrate(integrand, 0.0, math.pi / 2, q)


def _richardson_d1(g: Callable[[float], float], x: float, h: float) -> float:
    coarse = (g(x + h) - g(x - h)) / (2 * h)
    fine = (g(x + h / 2) - g(x - h / 2)) / h
    return (4 * fine - coarse) / 3


def _richardson_d2(g: Callable[[float], float], x: float, h: float) -> float:
    gx = g(x)
    coarse = (g(x + h) - 2 * gx + g(x - h)) / (h * h)
    fine = (g(x + h / 2) - 2 * gx + g(x - h / 2)) / (h * h / 4)
    return (16 * fine - coarse) / 15


def singular_second_order(nu: float, f: ScalarFn) -> ScalarFn:
    """B f = f'' + (nu/t) f' from the declared analytic derivatives,
    with the regular value (1+nu) f''(0) at the origin (which needs
    f'(0) = 0, the caller's standing hypothesis)."""
    if f.dfn is None or f.d2fn is None:
        raise ParameterError(
            "applying the singular operator needs analytic dfn and d2fn"
        )

    def bf(t: float) -> float:
        if t == 0.0:
            return (1.0 + nu) * f.d2fn(0.0)
        return f.d2fn(t) + nu * f.dfn(t) / t

    return ScalarFn(
        fn=bf, decay=f.decay, a=f.a, b=f.b, rate=f.rate,
        growth_degree=f.growth_degree,
    )


def poisson_intertwining_check(
    nu: float,
    f: ScalarFn,
    grid: Sequence[float],
    q: QuadratureSpec | None = None,
    h: float = 1e-3,
    tol: float = 1e-6,
) -> ResidualReport:
    """Measure both candidate transmutation relations on a grid:

        r1(x) = P(B f)(x) - d^2/dx^2 [P f](x)
        r2(x) = B[P f](x) - P(f'')(x)

    and record which of them holds to the tolerance.  Derivatives in x
    are Richardson-extrapolated central differences over a fixed-rule
    P, so the quadrature error cancels in the quotients."""
    if q is None or q.rule != FIXED:
        q = QuadratureSpec(rule=FIXED, nodes=max(64, q.nodes if q else 0))
    if f.dfn is None or f.d2fn is None:
        raise ParameterError("intertwining check needs analytic dfn and d2fn")
    bf = singular_second_order(nu, f)
    f2 = ScalarFn(fn=f.d2fn, decay=f.decay, a=f.a, b=f.b, rate=f.rate,
                  growth_degree=f.growth_degree)

    cache: dict[float, float] = {}

    def pf(x: float) -> float:
        v = cache.get(x)
        if v is None:
            v = poisson_transform(nu, f, x, q)
            cache[x] = v
        return v

    r1s: list[float] = []
    r2s: list[float] = []
    for x in grid:
        d1 = _richardson_d1(pf, x, h)
        d2 = _richardson_d2(pf, x, h)
        r1s.append(abs(poisson_transform(nu, bf, x, q) - d2))
        r2s.append(abs(d2 + nu * d1 / x - poisson_transform(nu, f2, x, q)))
    m1 = max(r1s, default=0.0)
    m2 = max(r2s, default=0.0)
    if m1 <= tol and m2 <= tol:
        holding = "both"
    elif m2 <= tol:
        holding = "r2"
    elif m1 <= tol:
        holding = "r1"
    else:
        holding = "neither"
    return ResidualReport(
        check="poisson-intertwining",
        params={
            "nu": nu, "h": h, "tol": tol, "nodes": q.nodes,
            "r1": "P(Bf) - (Pf)''", "r2": "B(Pf) - P(f'')",
        },
        grid=list(grid),
        residuals={"r1": m1, "r2": m2},
        max_residual=min(m1, m2),
        direction_holding=holding,
    )


def _hankel_cutoff(nu: float, f: ScalarFn, q: QuadratureSpec) -> float:
    if q.tail_cutoff is not None:
        return q.tail_cutoff
    r = f.rate
    t = max(20.0 / r, 20.0)
    # the t^nu factor can push the nominal e^{-20} tail above tolerance;
    # grow until the crude bound 2 T^nu e^{-rT}/r clears abs_tol
    while 2.0 * t ** nu * math.exp(-r * t) / r > q.abs_tol:
        t *= 1.5
        if t > 1e4:
            raise QuadratureError(
                f"cannot meet tail bound {q.abs_tol:g} for rate {r:g}"
            )
    return t


def hankel_transform(
    nu: float, f: ScalarFn, lam: float, q: QuadratureSpec | None = None
) -> float:
    """integral_0^inf f(t) j_nu(lam, t) t^nu dt, truncated where the
    declared decay makes the tail negligible.  The kernel is this
    module's little_bessel_j at the same nu, which in classical
    notation is the normalized Bessel function of order (nu-1)/2; at
    nu = 2 the transform is the sine transform divided by sqrt(lam)."""
    if nu <= 0:
        raise ParameterError(f"hankel_transform needs nu > 0, got {nu:g}")
    if lam <= 0:
        raise ParameterError(f"need lam > 0, got {lam:g}")
    if q is None:
        q = QuadratureSpec()
    if f.decay == "compact":
        lo, hi = max(0.0, f.a), f.b
    elif f.decay == "exponential":
        lo, hi = 0.0, _hankel_cutoff(nu, f, q)
    else:
        raise ParameterError(
            "hankel_transform needs declared decay (compact or exponential)"
        )

    def integrand(t: float) -> float:
        return f(t) * little_bessel_j(nu, lam, t) * t ** nu

    return integrate(integrand, lo, hi, q)


def hankel_intertwining_check(
    nu: float,
    f: ScalarFn,
    lam_grid: Sequence[float],
    q: QuadratureSpec | None = None,
    tol: float = 1e-6,
) -> ResidualReport:
    """|H(B f)(lam) + lam H f(lam)| over the grid, for f smooth and
    supported away from 0 (so B f needs no regularization).  A pass
    means the transform really does turn the singular operator into
    multiplication by -lam."""
    if f.decay != "compact" or f.a is None or f.a <= 0:
        raise ParameterError(
            "hankel intertwining needs compact support inside (0, inf)"
        )
    if q is None:
        q = QuadratureSpec()
    bf = singular_second_order(nu, f)
    residuals: dict[str, float] = {}
    worst = 0.0
    for lam in lam_grid:
        r = abs(
            hankel_transform(nu, bf, lam, q)
            + lam * hankel_transform(nu, f, lam, q)
        )
        residuals[f"{lam:g}"] = r
        worst = max(worst, r)
    return ResidualReport(
        check="hankel-intertwining",
        params={"nu": nu, "tol": tol, "support": [f.a, f.b]},
        grid=list(lam_grid),
        residuals=residuals,
        max_residual=worst,
        direction_holding="holds" if worst <= tol else "fails",
    )


def _gaussian_cutoff(f: ScalarFn, u: float, q: QuadratureSpec) -> float:
    if q.tail_cutoff is not None:
        return q.tail_cutoff
    g = f.growth_degree if f.decay == "none" else 0
    t = max(1.0, 4.0 * math.sqrt(u), math.sqrt(16.0 * g * u))
    # for s >= t (and t^2 >= 16gu) the integrand is below
    # t^g e^{-s^2/8u} e^{-t^2/8u}, so the tail loses to this bound
    while t ** g * math.exp(-t * t / (8.0 * u)) * math.sqrt(8.0 * math.pi * u) > q.abs_tol:
        t *= 1.5
        if t > 1e6:
            raise QuadratureError(
                f"cannot meet Gaussian tail bound {q.abs_tol:g} at u={u:g}"
            )
    return t


def heat_covariant(
    f: ScalarFn, u: float, q: QuadratureSpec | None = None
) -> float:
    """(1/(2 sqrt(pi u))) integral f(s) exp(-s^2/4u) ds: smoothing by
    the heat kernel at time u.  Polynomially growing f is fine; the
    kernel picks the truncation point."""
    if u <= 0:
        raise ParameterError(f"need u > 0, got {u:g}")
    if q is None:
        q = QuadratureSpec()
    if f.decay == "compact":
        lo, hi = f.a, f.b
    else:
        t = _gaussian_cutoff(f, u, q)
        lo, hi = -t, t
    norm = 1.0 / (2.0 * math.sqrt(math.pi * u))

    def integrand(s: float) -> float:
        return f(s) * math.exp(-s * s / (4.0 * u))

    return norm * integrate(integrand, lo, hi, q)


def cosine_transform(
    f: ScalarFn, v: float, q: QuadratureSpec | None = None
) -> float:
    """integral f(t) cos(sqrt(v) t) dt over the whole line.  Nothing
    here damps the integrand, so undeclared decay is refused."""
    if v < 0:
        raise ParameterError(f"need v >= 0, got {v:g}")
    if q is None:
        q = QuadratureSpec()
    if f.decay == "compact":
        lo, hi = f.a, f.b
    elif f.decay == "exponential":
        t = q.tail_cutoff if q.tail_cutoff is not None else max(20.0 / f.rate, 20.0)
        lo, hi = -t, t
    else:
        raise ParameterError(
            "cosine_transform needs declared decay (compact or exponential)"
        )
    sv = math.sqrt(v)

    def integrand(t: float) -> float:
        return f(t) * math.cos(sv * t)

    return integrate(integrand, lo, hi, q)


# canned functions shared by the command line and the test suite

def _bump(t: float) -> float:
    if t <= 1.0 or t >= 2.0:
        return 0.0
    return (t - 1.0) ** 3 * (2.0 - t) ** 3


def _bump_d1(t: float) -> float:
    if t <= 1.0 or t >= 2.0:
        return 0.0
    return 3.0 * (t - 1.0) ** 2 * (2.0 - t) ** 2 * (3.0 - 2.0 * t)


def _bump_d2(t: float) -> float:
    if t <= 1.0 or t >= 2.0:
        return 0.0
    return 6.0 * (t - 1.0) * (2.0 - t) * (
        (2.0 - t) * (3.0 - 2.0 * t)
        - (t - 1.0) * (3.0 - 2.0 * t)
        - (t - 1.0) * (2.0 - t)
    )


CANNED_FNS: dict[str, ScalarFn] = {
    "one": ScalarFn(
        fn=lambda t: 1.0, decay="none",
        dfn=lambda t: 0.0, d2fn=lambda t: 0.0,
    ),
    "cos": ScalarFn(
        fn=math.cos, decay="none",
        dfn=lambda t: -math.sin(t), d2fn=lambda t: -math.cos(t),
    ),
    "exp": ScalarFn(
        fn=lambda t: math.exp(-t), decay="exponential", rate=1.0,
        dfn=lambda t: -math.exp(-t), d2fn=lambda t: math.exp(-t),
    ),
    "gauss": ScalarFn(
        fn=lambda t: math.exp(-t * t), decay="exponential", rate=1.0,
        dfn=lambda t: -2.0 * t * math.exp(-t * t),
        d2fn=lambda t: (4.0 * t * t - 2.0) * math.exp(-t * t),
    ),
    "bump": ScalarFn(
        fn=_bump, decay="compact", a=1.0, b=2.0,
        dfn=_bump_d1, d2fn=_bump_d2,
    ),
}


def canned_fn(name: str) -> ScalarFn:
    try:
        return CANNED_FNS[name]
    except KeyError:
        raise ParameterError(
            f"unknown function {name!r}; choose from {', '.join(sorted(CANNED_FNS))}"
        ) from None
