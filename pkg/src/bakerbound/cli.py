"""Command-line surface.

Subcommands: certificate, epsilon-curve, corollary-curve, schedule,
witness, shidlovskii, pade, fit, verify.  Exit codes: 0 success, 1 usage
error, 2 domain/precondition error, 3 verification failure, 4 enumeration
cap exceeded.

Options may also come from a `key = value` config file (UTF-8, `#`
comments); explicit flags win over the file.  BB_PRECISION=f64|extended
overrides the precision mode.  All file output is UTF-8 with LF line
endings and dot decimal separators.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .engine import (
    AxiomParams,
    certificate,
    certificate_digits,
    corollary_bound,
    corollary_x0,
    epsilon,
    lower_bound,
)
from .errors import (
    CapExceededError,
    DomainError,
    FitRejectedError,
    SingularSystemError,
)
from .harness import (
    symmetric_height_grid,
    unbalanced_height_grid,
    verify_consistency,
)
from .pade import (
    BUILTIN_SYSTEMS,
    exp_system,
    fit_axioms,
    hermite_pade,
    table_from_json,
    table_to_json,
    validate_envelopes,
)
from .ring import FieldSpec
from .schedule import build_schedule, check_half
from .search import SearchBox, find_witness, shidlovskii_witness

PARAM_KEYS = ("m", "case", "a", "b", "c", "d", "b0", "b1", "b2", "b3",
              "e0", "e1", "e2", "e3", "Nmin")


@dataclass
class RunConfig:
    """Resolved run options shared by the subcommands."""

    precision: str = "f64"
    out: str | None = None
    cap: int = 10_000_000
    values: dict | None = None  # merged config-file entries


def _read_config(path: str) -> dict:
    vals = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(
                    f"{path}:{line_no}: expected 'key = value'"
                )
            key, val = (s.strip() for s in line.split("=", 1))
            vals[key] = val
    return vals


def _resolve(args, cfg: dict, key: str, conv, default=None):
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in cfg:
        return conv(cfg[key])
    return default


def _build_params(args, cfg: dict) -> AxiomParams:
    base: dict = {}
    pfile = _resolve(args, cfg, "params", str)
    if pfile:
        with open(pfile, encoding="utf-8") as fh:
            base = json.load(fh)
    def num(key, default=None):
        v = _resolve(args, cfg, key, float)
        if v is not None:
            return v
        return base.get(key, default)
    m = num("m")
    case = num("case")
    n_min = _resolve(args, cfg, "Nmin", int)
    if n_min is None:
        n_min = base.get("n_min", base.get("Nmin", 1))
    if m is None or case is None:
        raise DomainError("m and case are required (flags or --params)")
    a = num("a")
    c = num("c")
    if a is None or c is None:
        raise DomainError("a and c are required (flags or --params)")
    return AxiomParams(
        m=int(m), case=int(case), a=a, c=c,
        b=num("b", 0.0), d=num("d", 0.0),
        b0=num("b0", 0.0), b1=num("b1", 0.0),
        b2=num("b2", 0.0), b3=num("b3", 0.0),
        e0=num("e0", 0.0), e1=num("e1", 0.0),
        e2=num("e2", 0.0), e3=num("e3", 0.0),
        n_min=int(n_min),
    )


def _parse_theta(entries) -> tuple[complex, ...]:
    out = []
    for s in entries:
        parts = [p.strip() for p in s.split(",")]
        if len(parts) == 1:
            out.append(complex(float(parts[0]), 0.0))
        elif len(parts) == 2:
            out.append(complex(float(parts[0]), float(parts[1])))
        else:
            raise DomainError(f"cannot parse Theta entry {s!r}")
    return tuple(out)


def _parse_ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(","))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, out: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out)


def _precision(args, cfg: dict) -> str:
    env = os.environ.get("BB_PRECISION")
    mode = env or _resolve(args, cfg, "precision", str, "f64")
    if mode not in ("f64", "extended"):
        raise DomainError("precision must be f64 or extended")
    return mode


def _params_dict(p: AxiomParams) -> dict:
    return {
        "m": p.m, "case": p.case, "a": p.a, "b": p.b, "c": p.c, "d": p.d,
        "b0": p.b0, "b1": p.b1, "b2": p.b2, "b3": p.b3,
        "e0": p.e0, "e1": p.e1, "e2": p.e2, "e3": p.e3, "n_min": p.n_min,
    }


# -- subcommands --------------------------------------------------------


def _cmd_certificate(args, cfg) -> int:
    p = _build_params(args, cfg)
    cert = certificate(p)
    payload = {
        "params": _params_dict(p),
        "case": cert.case,
        "f": cert.f,
        "exponent": cert.exponent,
        "x": cert.x_threshold,
        "G": cert.h_min,
        "F": cert.prefactor,
        "log_F": cert.log_prefactor,
        "constants": cert.constants,
    }
    if _precision(args, cfg) == "extended":
        payload["digits30"] = certificate_digits(p, 30)
    if args.json:
        _emit_json(payload, args.out)
    else:
        lines = [f"case       {cert.case}",
                 f"f          {cert.f!r}",
                 f"exponent   {cert.exponent!r}",
                 f"x          {cert.x_threshold!r}",
                 f"G          {cert.h_min!r}",
                 f"F          {cert.prefactor!r}",
                 f"log F      {cert.log_prefactor!r}"]
        for k in sorted(cert.constants):
            lines.append(f"{k:<10} {cert.constants[k]!r}")
        if "digits30" in payload:
            lines.append("-- 30 significant digits --")
            for k in sorted(payload["digits30"]):
                lines.append(f"{k:<14} {payload['digits30'][k]}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _curve_grid(args, cfg, cert) -> list[float]:
    hmin = _resolve(args, cfg, "hmin", float, cert.h_min)
    hmax = _resolve(args, cfg, "hmax", float, None)
    points = int(_resolve(args, cfg, "points", int, 50))
    if hmax is None:
        raise DomainError("--hmax is required")
    if hmin < cert.h_min:
        raise DomainError("hmin below the admissibility threshold G")
    if hmax < hmin or points < 2:
        raise DomainError("need hmax >= hmin and points >= 2")
    ratio = (hmax / hmin) ** (1.0 / (points - 1))
    return [hmin * ratio**i for i in range(points)]


def _heights_for(cert, big_h: float) -> tuple[float, ...]:
    # symmetric real heights with prod(2m H_j) = H
    hj = big_h ** (1.0 / cert.m) / (2 * cert.m)
    return (hj,) * cert.m


def _cmd_epsilon_curve(args, cfg) -> int:
    p = _build_params(args, cfg)
    cert = certificate(p)
    rows = [("H", "epsilon", "bound")]
    for big_h in _curve_grid(args, cfg, cert):
        eps = epsilon(cert, big_h)
        bnd = lower_bound(cert, _heights_for(cert, big_h))
        rows.append((repr(big_h), repr(eps), repr(bnd)))
    _emit("\n".join(",".join(r) for r in rows) + "\n", args.out)
    return 0


def _cmd_corollary_curve(args, cfg) -> int:
    p = _build_params(args, cfg)
    cert = certificate(p)
    x0 = corollary_x0(cert)
    rows = [("H", "bound", "corollary")]
    for big_h in _curve_grid(args, cfg, cert):
        heights = _heights_for(cert, big_h)
        bnd = lower_bound(cert, heights)
        cor = corollary_bound(cert, heights, x0)
        rows.append((repr(big_h), repr(bnd), repr(cor)))
    _emit("\n".join(",".join(r) for r in rows) + "\n", args.out)
    return 0


def _cmd_schedule(args, cfg) -> int:
    p = _build_params(args, cfg)
    heights = _parse_ints(_resolve(args, cfg, "H", str))
    sched = build_schedule(p, heights)
    ok, total = check_half(p, heights, sched)
    _emit_json({
        "S": sched.s_total,
        "B": list(sched.freqs),
        "s": list(sched.parts),
        "sigma": list(sched.sigma),
        "N_used": sched.n_used,
        "half_sum": total,
        "half_ok": ok,
    }, args.out)
    return 0


def _cmd_witness(args, cfg) -> int:
    spec = FieldSpec(int(_resolve(args, cfg, "D", int, 1)))
    theta = _parse_theta(args.theta or
                         str(cfg.get("theta", "")).split(";"))
    heights = _parse_ints(_resolve(args, cfg, "H", str))
    box = SearchBox(theta=theta, heights=heights, spec=spec)
    cap = int(_resolve(args, cfg, "cap", int, 10_000_000))
    wit = find_witness(
        box, cap=cap, extended=_precision(args, cfg) == "extended"
    )
    _emit_json({
        "D": spec.D,
        "theta": [[t.real, t.imag] for t in theta],
        "heights": list(heights),
        "beta": [[b.u, b.v] for b in wit.beta],
        "value": wit.value,
        "radius": wit.radius,
    }, args.out)
    return 0


def _cmd_shidlovskii(args, cfg) -> int:
    theta = _parse_theta(args.theta or
                         str(cfg.get("theta", "")).split(";"))
    h = int(_resolve(args, cfg, "H", int))
    cap = int(_resolve(args, cfg, "cap", int, 10_000_000))
    wit = shidlovskii_witness(theta, h, cap=cap)
    _emit_json({
        "theta": [[t.real, t.imag] for t in theta],
        "H": h,
        "beta": [[b.u, b.v] for b in wit.beta],
        "value": wit.value,
        "radius": wit.radius,
    }, args.out)
    return 0


def _make_system(args, cfg):
    name = _resolve(args, cfg, "system", str)
    if name not in BUILTIN_SYSTEMS:
        raise DomainError(
            f"unknown system {name!r}; choose from "
            f"{sorted(BUILTIN_SYSTEMS)}"
        )
    z0 = Fraction(_resolve(args, cfg, "z0", str, "1/2"))
    m = int(_resolve(args, cfg, "m", int, 1))
    if name == "exp":
        return exp_system(z0, m)
    if m != 1:
        raise DomainError(f"system {name!r} is univariate (m = 1)")
    return BUILTIN_SYSTEMS[name](z0)


def _cmd_pade(args, cfg) -> int:
    sys_ = _make_system(args, cfg)
    nbar = _parse_ints(_resolve(args, cfg, "n", str))
    spec = FieldSpec(int(_resolve(args, cfg, "D", int, 1)))
    cap = int(_resolve(args, cfg, "ncap", int, 40))
    table = hermite_pade(sys_, nbar, spec=spec, n_cap=cap)
    _emit_json(table_to_json(table), args.out)
    return 0


def _cmd_fit(args, cfg) -> int:
    tables = []
    for path in args.tables:
        with open(path, encoding="utf-8") as fh:
            tables.append(table_from_json(json.load(fh)))
    case = int(_resolve(args, cfg, "case", int))
    max_rms = float(_resolve(args, cfg, "max-rms", float, 5.0))
    fit = fit_axioms(tables, case, max_rms=max_rms)
    _emit_json({
        "params": _params_dict(fit.params),
        "q_rms": fit.q_rms,
        "r_rms": fit.r_rms,
        "q_slack": fit.q_slack,
        "r_slack": fit.r_slack,
        "n_samples": fit.n_samples,
        "notes": list(fit.notes),
    }, args.out)
    return 0


def _report_csv(report) -> str:
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["H", "heights", "status", "bound", "oracle", "margin",
                "S", "n_requested", "half_sum", "cross_upper", "cross_ok",
                "note"])
    for r in report.rows:
        w.writerow([
            repr(r.combined),
            " ".join(str(h) for h in r.heights),
            r.status,
            "" if r.bound is None else repr(r.bound),
            "" if r.oracle is None else repr(r.oracle),
            "" if r.margin is None else repr(r.margin),
            "" if r.s_total is None else repr(r.s_total),
            "" if r.n_requested is None else
            " ".join(str(n) for n in r.n_requested),
            "" if r.half_sum is None else repr(r.half_sum),
            "" if r.cross_upper is None else repr(r.cross_upper),
            "" if r.cross_ok is None else str(r.cross_ok).lower(),
            r.note,
        ])
    return buf.getvalue()


def _report_json(report) -> dict:
    return {
        "params": _params_dict(report.params),
        "certificate": {
            "f": report.cert.f,
            "exponent": report.cert.exponent,
            "x": report.cert.x_threshold,
            "G": report.cert.h_min,
            "log_F": report.cert.log_prefactor,
            "constants": report.cert.constants,
        },
        "passes": report.passes,
        "warnings": report.warnings,
        "failures": report.failures,
        "rows": [
            {
                "H": r.combined,
                "heights": list(r.heights),
                "status": r.status,
                "note": r.note,
                "bound": r.bound,
                "log_bound": r.log_bound,
                "oracle": r.oracle,
                "margin": r.margin,
                "S": r.s_total,
                "sigma": None if r.sigma is None else list(r.sigma),
                "n_requested": None if r.n_requested is None
                else list(r.n_requested),
                "half_sum": r.half_sum,
                "cross_upper": r.cross_upper,
                "cross_ok": r.cross_ok,
                "G_k": None if r.g_values is None
                else [list(g) for g in r.g_values],
                "witness": None if r.witness is None
                else [list(b) for b in r.witness],
            }
            for r in report.rows
        ],
    }


def _cmd_verify(args, cfg) -> int:
    spec = FieldSpec(int(_resolve(args, cfg, "D", int, 1)))
    n_max = int(_resolve(args, cfg, "n-max", int, 12))
    sys_ = _make_system(args, cfg)
    m = sys_.m
    nbars = [(n,) * m for n in range(1, max(2, n_max // m) + 1)]
    if m >= 2:
        nbars += [(n,) + (1,) * (m - 1)
                  for n in range(2, max(2, n_max - m + 2))]
    nbars = [nb for nb in nbars if sum(nb) <= n_max]
    tables = [hermite_pade(sys_, nb, spec=spec, n_cap=n_max)
              for nb in nbars]

    pfile = _resolve(args, cfg, "params", str)
    if pfile:
        p = _build_params(args, cfg)
    else:
        case = int(_resolve(args, cfg, "case", int))
        p = fit_axioms(tables, case).params

    bad = [t.nbar for t in tables if not validate_envelopes(t, p).ok
           and sum(t.nbar) >= p.n_min]
    if bad:
        raise DomainError(f"envelopes do not hold on tables {bad}")

    cert = certificate(p)
    height_max = int(_resolve(args, cfg, "height-max", int, 100))
    points = int(_resolve(args, cfg, "grid-points", int, 8))
    if args.unbalanced:
        grid = unbalanced_height_grid(cert, height_max, points)
    else:
        grid = symmetric_height_grid(cert, height_max, points)
    cap = int(_resolve(args, cfg, "cap", int, 10_000_000))
    workers = int(_resolve(args, cfg, "workers", int, 1))
    report = verify_consistency(
        p, tables, tables[0].thetas, grid, spec=spec, cap=cap,
        workers=workers,
    )

    for r in report.rows:
        line = f"H={r.combined:.6g} [{r.status}]"
        if r.bound is not None:
            line += f" bound={r.bound:.6g} oracle={r.oracle:.6g}"
        if r.note:
            line += f"  ({r.note})"
        print(line)
    print(f"passes={report.passes} warnings={report.warnings} "
          f"failures={report.failures}")

    out = args.out or _resolve(args, cfg, "out", str)
    if out:
        with open(out + ".csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_report_csv(report))
        with open(out + ".json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_report_json(report), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.ok else 3


# -- dispatch ------------------------------------------------------------


def _add_param_flags(sp) -> None:
    for key in PARAM_KEYS:
        if key in ("m", "case", "Nmin"):
            sp.add_argument(f"--{key}", type=int)
        else:
            sp.add_argument(f"--{key}", type=float)
    sp.add_argument("--params", help="JSON file with the parameter record")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bakerbound",
        description="Explicit lower-bound certificates for linear forms "
                    "over imaginary quadratic integer rings.",
    )
    ap.add_argument("--config", help="key = value option file")
    ap.add_argument("--precision", choices=["f64", "extended"])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("certificate", help="compute bound constants")
    _add_param_flags(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_certificate)

    for name, fn in (("epsilon-curve", _cmd_epsilon_curve),
                     ("corollary-curve", _cmd_corollary_curve)):
        sp = sub.add_parser(name, help=f"CSV {name.replace('-', ' ')}")
        _add_param_flags(sp)
        sp.add_argument("--hmin", type=float)
        sp.add_argument("--hmax", type=float)
        sp.add_argument("--points", type=int)
        sp.add_argument("--out")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("schedule", help="tuned index vector as JSON")
    _add_param_flags(sp)
    sp.add_argument("--H", help="comma-separated heights H_1..H_m")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_schedule)

    sp = sub.add_parser("witness", help="small-value witness search")
    sp.add_argument("--D", type=int)
    sp.add_argument("--theta", action="append",
                    help="decimal 're' or 're,im'; repeat per component")
    sp.add_argument("--H", help="comma-separated heights")
    sp.add_argument("--cap", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_witness)

    sp = sub.add_parser("shidlovskii", help="rational-integer box search")
    sp.add_argument("--theta", action="append")
    sp.add_argument("--H", type=int)
    sp.add_argument("--cap", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_shidlovskii)

    sp = sub.add_parser("pade", help="simultaneous approximation table")
    sp.add_argument("--system")
    sp.add_argument("--z0")
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", help="comma-separated index vector")
    sp.add_argument("--D", type=int)
    sp.add_argument("--ncap", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_pade)

    sp = sub.add_parser("fit", help="fit envelope constants from tables")
    sp.add_argument("--tables", nargs="+", required=True)
    sp.add_argument("--case", type=int)
    sp.add_argument("--max-rms", type=float, dest="max_rms")
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_fit)

    sp = sub.add_parser("verify", help="end-to-end consistency report")
    _add_param_flags(sp)
    sp.add_argument("--system")
    sp.add_argument("--z0")
    sp.add_argument("--D", type=int)
    sp.add_argument("--n-max", type=int, dest="n_max")
    sp.add_argument("--height-max", type=int, dest="height_max")
    sp.add_argument("--grid-points", type=int, dest="grid_points")
    sp.add_argument("--unbalanced", action="store_true")
    sp.add_argument("--cap", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_verify)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    cfg = {}
    if args.config:
        try:
            cfg = _read_config(args.config)
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 1
        except DomainError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    try:
        return args.fn(args, cfg)
    except (DomainError, FitRejectedError, SingularSystemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except AssertionError as exc:
        print(f"verification defect: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
