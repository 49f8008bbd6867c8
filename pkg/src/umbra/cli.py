"""Command-line front end.

Grammar: umbra <models|verify|w0|transmute|translate|bessel|heat|cosine|genfun>

Exact commands exchange rationals as "p/q" strings and polynomials as
comma-separated coefficient lists; numeric commands take decimal
floats.  Exit codes: 0 success/pass, 1 verification failure (or an
inconclusive result: a truncation-tainted check certifies nothing),
2 usage or parameter error, 3 numeric non-convergence.

UMBRA_DEFAULT_DEGREE overrides the default working degree of 32.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Sequence

from .core import (
    DEFAULT_DEGREE_CAP,
    ParameterError,
    Poly,
    QuadratureError,
    UmbraError,
    format_rational,
    parse_rational,
)
from .models import MODEL_NAMES, UmbralModel, build_model, verify_model
from .reports import (
    PASS,
    VerificationReport,
    reports_to_json,
    rows_to_csv,
    worst_status,
)
from . import heisenberg, numeric, transforms, translations
from .quadrature import QuadratureSpec

_EXIT_OK = 0
_EXIT_FAIL = 1
_EXIT_USAGE = 2
_EXIT_NUMERIC = 3

_MODEL_CHECKS = ("ladder", "lowering", "raising", "vacuum", "commutator")
_CHECKS = _MODEL_CHECKS + (
    "duals", "covariant", "genfun", "binomial", "character", "delsarte",
    "transmute", "group-law", "weyl", "composition", "twisted", "sl2",
    "metaplectic", "poisson-intertwining", "hankel-intertwining",
)


def _default_degree() -> int:
    raw = os.environ.get("UMBRA_DEFAULT_DEGREE")
    if raw is None:
        return DEFAULT_DEGREE_CAP
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(
            f"UMBRA_DEFAULT_DEGREE must be an integer, got {raw!r}"
        ) from None
    if n < 1:
        raise ParameterError("UMBRA_DEFAULT_DEGREE must be >= 1")
    return n


def _rational_flag(name: str, text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (UmbraError, ValueError) as exc:
        raise ParameterError(f"bad rational for {name}: {exc}") from None


def _float_flag(name: str, text: str) -> float:
    """Numeric commands accept either a decimal float or "p/q"."""
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return float(parse_rational(text))
    except (UmbraError, ValueError):
        raise ParameterError(
            f"bad numeric value for {name}: {text!r}"
        ) from None


def _parse_grid(text: str, flag: str) -> list[float]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if piece:
            out.append(_float_flag(flag, piece))
    if not out:
        raise ParameterError(f"{flag} needs at least one value")
    return out


def _parse_poly(text: str, cap: int) -> Poly:
    coeffs = []
    for k, piece in enumerate(text.split(",")):
        piece = piece.strip()
        coeffs.append(_rational_flag(f"--poly[{k}]", piece) if piece else Fraction(0))
    if len(coeffs) > cap + 1:
        raise ParameterError(
            f"polynomial has {len(coeffs)} coefficients but the working "
            f"degree is {cap}; raise --degree"
        )
    return Poly(coeffs, cap)


def _load_model(args: argparse.Namespace, attr: str = "model") -> UmbralModel:
    name = getattr(args, attr, None)
    if not name:
        flag = {"src": "--from", "to": "--to"}.get(attr, "--model")
        raise ParameterError(f"{flag} is required")
    nu = None
    nu_attr = f"{attr}_nu" if attr != "model" else "nu"
    raw_nu = getattr(args, nu_attr, None) or getattr(args, "nu", None)
    if raw_nu is not None:
        nu = _rational_flag("--nu", raw_nu)
    degree = args.degree if getattr(args, "degree", None) else _default_degree()
    return build_model(name, degree, nu=nu)


def _emit(args: argparse.Namespace, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _coeff_output(args: argparse.Namespace, poly: Poly, var: str) -> str:
    coeffs = [format_rational(c) for c in poly.coeffs]
    if args.format == "json":
        return json.dumps(
            {"variable": var, "coefficients": coeffs, "truncated": poly.truncated},
            sort_keys=True,
        )
    if args.format == "csv":
        return rows_to_csv(
            ("degree", "coefficient"),
            [(k, c) for k, c in enumerate(coeffs)],
        )
    top = max((k for k, c in enumerate(poly.coeffs) if c), default=0)
    return ", ".join(coeffs[: top + 1])


def _report_exit(reports: Sequence[VerificationReport]) -> int:
    worst = worst_status(reports)
    return _EXIT_OK if worst == PASS else _EXIT_FAIL


def _report_output(args: argparse.Namespace, reports: Sequence[VerificationReport]) -> str:
    if args.format == "json":
        if len(reports) == 1:
            return reports[0].to_json()
        return reports_to_json(reports)
    if args.format == "csv":
        return rows_to_csv(
            ("check", "model", "status", "max_residual", "first_failure"),
            [
                (r.check, r.model or "", r.status,
                 "" if r.max_residual is None else r.max_residual,
                 "" if r.first_failure is None else json.dumps(r.first_failure, sort_keys=True, default=str))
                for r in reports
            ],
        )
    lines = []
    for r in reports:
        extra = ""
        if r.max_residual is not None:
            extra = f"  max_residual={float(r.max_residual):.3e}"
        if r.first_failure is not None:
            extra += f"  at {r.first_failure}"
        lines.append(f"{r.check:28s} {(r.model or '-'):24s} {r.status}{extra}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_models(args: argparse.Namespace) -> int:
    rows = []
    for name in MODEL_NAMES:
        nu = Fraction(5, 2) if name == "bessel" else None
        m = build_model(name, 4, nu=nu)
        rows.append((
            name,
            m.parity.value,
            "yes" if m.shift_invariant else "no",
            "yes" if m.vacuum_is_eval0() else "no",
            "--nu p/q required" if name == "bessel" else "",
        ))
    if args.format == "json":
        _emit(args, json.dumps(
            [
                {"model": r[0], "parity": r[1], "shift_invariant": r[2],
                 "vacuum_is_eval0": r[3], "notes": r[4]}
                for r in rows
            ],
            sort_keys=True,
        ))
    elif args.format == "csv":
        _emit(args, rows_to_csv(
            ("model", "parity", "shift_invariant", "vacuum_is_eval0", "notes"),
            rows,
        ))
    else:
        _emit(args, "\n".join(
            f"{r[0]:16s} parity={r[1]:5s} shift_invariant={r[2]:3s} "
            f"vacuum_is_eval0={r[3]:3s} {r[4]}"
            for r in rows
        ))
    return _EXIT_OK


def _binomial_reports(m: UmbralModel, top: int) -> list[VerificationReport]:
    for n in range(top + 1):
        r = translations.binomial_check(m, n)
        if not r.passed:
            return [r]
    return [VerificationReport(
        check="binomial", model=m.label(),
        params={"n_max": top}, status=PASS,
    )]


def _formal_order(args: argparse.Namespace, default: int) -> int:
    return args.order if getattr(args, "order", None) else default


def _run_check(args: argparse.Namespace, check: str) -> list[VerificationReport]:
    if check in _MODEL_CHECKS:
        reports = verify_model(_load_model(args))
        if check == "ladder":
            return reports
        name = {"lowering": "ladder-lowering", "raising": "ladder-raising"}.get(check, check)
        return [r for r in reports if r.check == name]
    if check == "duals":
        return [transforms.biorthogonality_check(_load_model(args))]
    if check == "covariant":
        return [transforms.covariant_check(_load_model(args))]
    if check == "genfun":
        m = _load_model(args)
        return [transforms.generating_function(m, _formal_order(args, m.n_max)).report]
    if check == "binomial":
        m = _load_model(args)
        return _binomial_reports(m, _formal_order(args, m.n_max))
    if check == "character":
        return [translations.character_check(_load_model(args), _formal_order(args, 8))]
    if check == "delsarte":
        m = _load_model(args)
        return [translations.delsarte_eigen_check(m, _formal_order(args, m.n_max))]
    if check == "transmute":
        return [transforms.check_transmutation_intertwining(
            _load_model(args, "src"), _load_model(args, "to"),
        )]
    if check == "group-law":
        return [heisenberg.group_law_check(_load_model(args), _formal_order(args, 4))]
    if check == "weyl":
        return [heisenberg.weyl_relation_check(_load_model(args), _formal_order(args, 4))]
    if check == "composition":
        return [heisenberg.composition_check_formal(_load_model(args), _formal_order(args, 4))]
    if check == "twisted":
        return [heisenberg.twisted_convolve_check()]
    if check == "sl2":
        return [heisenberg.sl2_closure_check(_load_model(args))]
    if check == "metaplectic":
        return heisenberg.metaplectic_check(_load_model(args))
    raise ParameterError(f"unknown check {check!r}")


def _residual_check(args: argparse.Namespace, check: str) -> int:
    tol = args.tol if args.tol else 1e-6
    if check == "poisson-intertwining":
        nu = _float_flag("--nu", args.nu) if args.nu else 2.0
        f = numeric.canned_fn(args.fn or "cos")
        if args.grid:
            grid = _parse_grid(args.grid, "--grid")
        else:
            grid = [0.5 + k * 4.5 / 19 for k in range(20)]
        rep = numeric.poisson_intertwining_check(nu, f, grid, tol=tol)
        ok = rep.max_residual <= tol
    else:
        nu = _float_flag("--nu", args.nu) if args.nu else 2.0
        f = numeric.canned_fn(args.fn or "bump")
        grid = _parse_grid(args.grid, "--grid") if args.grid else [0.25, 1.0, 4.0]
        rep = numeric.hankel_intertwining_check(nu, f, grid, tol=tol)
        ok = rep.max_residual <= tol
    if args.format == "csv":
        _emit(args, rows_to_csv(
            ("check", "max_residual", "direction_holding"),
            [(rep.check, rep.max_residual, rep.direction_holding or "")],
        ))
    elif args.format == "plain":
        _emit(args, f"{rep.check}: max_residual={rep.max_residual:.3e} "
                    f"direction={rep.direction_holding}")
    else:
        _emit(args, rep.to_json())
    return _EXIT_OK if ok else _EXIT_FAIL


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.all:
        m = _load_model(args)
        reports = list(verify_model(m))
        reports.append(transforms.biorthogonality_check(m))
        reports.append(transforms.covariant_check(m))
        reports.append(transforms.generating_function(m, m.n_max).report)
        if m.shift_invariant and m.vacuum_is_eval0():
            reports.extend(_binomial_reports(m, m.n_max))
        reports.append(translations.character_check(m, _formal_order(args, 6)))
        if m.vacuum_is_eval0():
            reports.append(translations.delsarte_eigen_check(m, m.n_max))
        order = _formal_order(args, 4)
        reports.append(heisenberg.group_law_check(m, order))
        reports.append(heisenberg.weyl_relation_check(m, order))
        reports.append(heisenberg.composition_check_formal(m, order))
        reports.append(heisenberg.twisted_convolve_check())
        reports.append(heisenberg.sl2_closure_check(m))
        reports.extend(heisenberg.metaplectic_check(m))
        _emit(args, _report_output(args, reports))
        return _report_exit(reports)
    if not args.check:
        raise ParameterError("verify needs --check NAME or --all")
    if args.check in ("poisson-intertwining", "hankel-intertwining"):
        return _residual_check(args, args.check)
    reports = _run_check(args, args.check)
    _emit(args, _report_output(args, reports))
    return _report_exit(reports)


def _cmd_w0(args: argparse.Namespace) -> int:
    m = _load_model(args)
    if not args.poly:
        raise ParameterError("w0 needs --poly \"c0,c1,...\"")
    f = _parse_poly(args.poly, m.degree_cap)
    _emit(args, _coeff_output(args, transforms.covariant_w0(m, f), "u"))
    return _EXIT_OK


def _cmd_transmute(args: argparse.Namespace) -> int:
    src = _load_model(args, "src")
    dst = _load_model(args, "to")
    if not args.poly:
        raise ParameterError("transmute needs --poly \"c0,c1,...\"")
    f = _parse_poly(args.poly, src.degree_cap)
    _emit(args, _coeff_output(args, transforms.umbral_map(src, dst, f), "t"))
    return _EXIT_OK


def _cmd_translate(args: argparse.Namespace) -> int:
    m = _load_model(args)
    if not args.poly:
        raise ParameterError("translate needs --poly \"c0,c1,...\"")
    if args.y is None:
        raise ParameterError("translate needs --y p/q")
    y = _rational_flag("--y", args.y)
    f = _parse_poly(args.poly, m.degree_cap)
    _emit(args, _coeff_output(args, translations.generalized_translate(m, y, f), "t"))
    return _EXIT_OK


def _cmd_genfun(args: argparse.Namespace) -> int:
    m = _load_model(args)
    table = transforms.generating_function(m, _formal_order(args, min(8, m.n_max)))
    if args.format == "json":
        _emit(args, json.dumps(
            {
                "report": table.report.to_dict(),
                "rows": [[format_rational(c) for c in row] for row in table.table],
            },
            sort_keys=True, default=str,
        ))
    elif args.format == "plain":
        lines = [_report_output(args, [table.report])]
        for k, row in enumerate(table.table):
            top = max((j for j, c in enumerate(row) if c), default=0)
            lines.append(
                f"s^{k}: " + ", ".join(format_rational(c) for c in row[: top + 1])
            )
        _emit(args, "\n".join(lines))
    else:
        header = ["s_order"] + [f"t^{j}" for j in range(m.degree_cap + 1)]
        rows = [
            [k] + [format_rational(c) for c in row]
            for k, row in enumerate(table.table)
        ]
        _emit(args, rows_to_csv(header, rows))
    return _report_exit([table.report])


def _scalar_fn(args: argparse.Namespace) -> numeric.ScalarFn:
    if getattr(args, "poly", None):
        cap = args.degree if getattr(args, "degree", None) else _default_degree()
        p = _parse_poly(args.poly, cap)
        fs = [float(c) for c in p.coeffs]
        deg = max((k for k, c in enumerate(p.coeffs) if c), default=0)

        def fn(t: float) -> float:
            acc = 0.0
            for c in reversed(fs):
                acc = acc * t + c
            return acc

        return numeric.ScalarFn(fn=fn, decay="none", growth_degree=deg)
    return numeric.canned_fn(args.fn or "one")


def _value_output(args: argparse.Namespace, pairs: list[tuple[str, float, float]]) -> None:
    """pairs: (column name, argument, value)."""
    if len(pairs) == 1 and args.format != "csv":
        _, _, v = pairs[0]
        if args.format == "json":
            _emit(args, json.dumps({"value": v}))
        else:
            _emit(args, f"{v!r}")
        return
    name = pairs[0][0]
    if args.format == "json":
        _emit(args, json.dumps(
            [{name: a, "value": v} for _, a, v in pairs], sort_keys=True,
        ))
    else:
        _emit(args, rows_to_csv((name, "value"), [(a, v) for _, a, v in pairs]))


def _quad_spec(args: argparse.Namespace) -> QuadratureSpec:
    if getattr(args, "tol", None):
        return QuadratureSpec(abs_tol=args.tol, rel_tol=args.tol)
    return QuadratureSpec()


def _cmd_bessel(args: argparse.Namespace) -> int:
    q = _quad_spec(args)
    if args.mode == "j":
        nu = _float_flag("--nu", args.nu) if args.nu else 2.0
        lam = _float_flag("--lambda", args.lam) if args.lam else 1.0
        ts = _parse_grid(args.grid, "--grid") if args.grid else None
        if ts is None:
            if args.x is None:
                raise ParameterError("bessel j needs --x T or --grid")
            ts = [_float_flag("--x", args.x)]
        _value_output(args, [
            ("t", t, numeric.little_bessel_j(nu, lam, t)) for t in ts
        ])
        return _EXIT_OK
    if args.mode == "poisson":
        nu = _float_flag("--nu", args.nu) if args.nu else 2.0
        f = _scalar_fn(args)
        xs = _parse_grid(args.grid, "--grid") if args.grid else None
        if xs is None:
            if args.x is None:
                raise ParameterError("bessel poisson needs --x F or --grid")
            xs = [_float_flag("--x", args.x)]
        _value_output(args, [
            ("x", x, numeric.poisson_transform(nu, f, x, q)) for x in xs
        ])
        return _EXIT_OK
    if args.mode == "hankel":
        nu = _float_flag("--nu", args.nu) if args.nu else 2.0
        f = _scalar_fn(args)
        lams = _parse_grid(args.grid, "--grid") if args.grid else None
        if lams is None:
            if args.lam is None:
                raise ParameterError("bessel hankel needs --lambda F or --grid")
            lams = [_float_flag("--lambda", args.lam)]
        _value_output(args, [
            ("lambda", lam, numeric.hankel_transform(nu, f, lam, q)) for lam in lams
        ])
        return _EXIT_OK
    raise ParameterError(f"unknown bessel mode {args.mode!r}")


def _cmd_heat(args: argparse.Namespace) -> int:
    if args.mode != "covariant":
        raise ParameterError(f"unknown heat mode {args.mode!r}")
    q = _quad_spec(args)
    f = _scalar_fn(args)
    us = _parse_grid(args.grid, "--grid") if args.grid else None
    if us is None:
        if args.u is None:
            raise ParameterError("heat covariant needs --u F or --grid")
        us = [_float_flag("--u", args.u)]
    _value_output(args, [
        ("u", u, numeric.heat_covariant(f, u, q)) for u in us
    ])
    return _EXIT_OK


def _cmd_cosine(args: argparse.Namespace) -> int:
    q = _quad_spec(args)
    f = _scalar_fn(args)
    vs = _parse_grid(args.grid, "--grid") if args.grid else None
    if vs is None:
        if args.v is None:
            raise ParameterError("cosine needs --v F or --grid")
        vs = [_float_flag("--v", args.v)]
    _value_output(args, [
        ("v", v, numeric.cosine_transform(f, v, q)) for v in vs
    ])
    return _EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, *, model: bool = False) -> None:
    if model:
        p.add_argument("--model", choices=MODEL_NAMES)
        p.add_argument("--nu", help='Bessel parameter as "p/q"')
        p.add_argument("--degree", type=int, help="working basis-index cap")
    p.add_argument("--format", choices=("json", "csv", "plain"), default="plain")
    p.add_argument("--out", help="write output to this path instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="umbra",
        description="Exact ladder-operator calculus and its numeric transforms.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("models", help="list the model catalog")
    _add_common(p)

    p = sub.add_parser("verify", help="run verification checks")
    _add_common(p, model=True)
    p.add_argument("--check", choices=_CHECKS)
    p.add_argument("--all", action="store_true",
                   help="every check applicable to the model")
    p.add_argument("--order", type=int, help="formal order for series checks")
    p.add_argument("--tol", type=float, help="tolerance for residual checks")
    p.add_argument("--from", dest="src", choices=MODEL_NAMES,
                   help="source model for --check transmute")
    p.add_argument("--to", dest="to", choices=MODEL_NAMES)
    p.add_argument("--from-nu", dest="src_nu", help='source --nu as "p/q"')
    p.add_argument("--to-nu", dest="to_nu", help='target --nu as "p/q"')
    p.add_argument("--fn", help="canned function for numeric checks")
    p.add_argument("--grid", help="comma-separated evaluation points")

    p = sub.add_parser("w0", help="covariant transform of a polynomial")
    _add_common(p, model=True)
    p.add_argument("--poly", help='coefficients "c0,c1,..." as rationals')

    p = sub.add_parser("transmute", help="map a polynomial between models")
    _add_common(p)
    p.add_argument("--from", dest="src", choices=MODEL_NAMES, required=True)
    p.add_argument("--to", dest="to", choices=MODEL_NAMES, required=True)
    p.add_argument("--nu", help='Bessel parameter for either side, as "p/q"')
    p.add_argument("--from-nu", dest="src_nu")
    p.add_argument("--to-nu", dest="to_nu")
    p.add_argument("--degree", type=int)
    p.add_argument("--poly", help='coefficients "c0,c1,..." as rationals')

    p = sub.add_parser("translate", help="generalized translation of a polynomial")
    _add_common(p, model=True)
    p.add_argument("--y", help='translation step as "p/q"')
    p.add_argument("--poly", help='coefficients "c0,c1,..." as rationals')

    p = sub.add_parser("genfun", help="generating-function coefficient table")
    _add_common(p, model=True)
    p.add_argument("--order", type=int, help="series order in s")

    p = sub.add_parser("bessel", help="Bessel-type numeric transforms")
    p.add_argument("mode", choices=("j", "poisson", "hankel"))
    _add_common(p)
    p.add_argument("--nu", help="parameter (float or p/q)")
    p.add_argument("--lambda", dest="lam", help="spectral parameter")
    p.add_argument("--x", help="evaluation point")
    p.add_argument("--grid", help="comma-separated evaluation points")
    p.add_argument("--fn", help="canned function name")
    p.add_argument("--poly", help="polynomial input (rational coefficients)")
    p.add_argument("--degree", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("heat", help="heat-kernel covariant transform")
    p.add_argument("mode", choices=("covariant",))
    _add_common(p)
    p.add_argument("--u", help="diffusion time")
    p.add_argument("--grid", help="comma-separated u values")
    p.add_argument("--fn", help="canned function name")
    p.add_argument("--poly", help="polynomial input (rational coefficients)")
    p.add_argument("--degree", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("cosine", help="cosine transform")
    _add_common(p)
    p.add_argument("--v", help="frequency-squared parameter")
    p.add_argument("--grid", help="comma-separated v values")
    p.add_argument("--fn", help="canned function name")
    p.add_argument("--poly", help="polynomial input (rational coefficients)")
    p.add_argument("--degree", type=int)
    p.add_argument("--tol", type=float)

    return top


_DISPATCH = {
    "models": _cmd_models,
    "verify": _cmd_verify,
    "w0": _cmd_w0,
    "transmute": _cmd_transmute,
    "translate": _cmd_translate,
    "genfun": _cmd_genfun,
    "bessel": _cmd_bessel,
    "heat": _cmd_heat,
    "cosine": _cmd_cosine,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except QuadratureError as exc:
        print(f"umbra: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    except UmbraError as exc:
        print(f"umbra: {exc}", file=sys.stderr)
        return _EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
