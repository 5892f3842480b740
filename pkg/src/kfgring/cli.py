"""Command-line front end: ``spectrum``, ``wavefunction`` and ``verify``.

Exit codes: 0 success, 1 computational failure, 2 usage error.  Numbers are
written in full double precision (``%.16e``) so CSV output round-trips
through the JSON records losslessly.  ``KFG_THREADS`` caps the number of
worker threads used for sweeps over quantum numbers.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .angular import solve_angular, theta_wavefunction
from .coupled import solve_combined_all
from .errors import DomainError, KFGError, NoBoundState
from .levels import EnergyLevel
from .nu_radial import radial_eigenfunction, radial_tail_cutoff
from .oracle import refine_ode_energy, shoot_radial
from .potential import CouplingCase, PotentialSpec
from .special import integrate
from .susy import factorize, ground_state, remainder_flatness, solve_cd, solve_susy_energies

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SPECTRUM_COLUMNS = ("n_r", "N", "m", "case", "route", "E", "lambda", "residual", "bound_flag", "error")

THRESHOLDS = {
    "nu_susy": 1e-11,
    "nu_oracle": 1e-6,
    "defect": 1e-8,
    "flatness": 1e-9,
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".16e")
    return str(x)


def parse_range(text: str) -> range:
    """'A..B' (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B or an integer, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return range(lo, hi + 1)


def parse_case(text: str) -> CouplingCase:
    try:
        return CouplingCase.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def thread_count() -> int:
    raw = os.environ.get("KFG_THREADS")
    cap = os.cpu_count() or 1
    if raw is None:
        return cap
    try:
        return max(1, min(int(raw), cap))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- arguments

def _spec_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--spec", help="JSON file with PotentialSpec fields (flags override)")
    for name in ("M", "V0", "S0", "delta", "beta", "C0"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--beta-prime", dest="beta_prime", type=float)
    p.add_argument("--case", type=parse_case, default=None, help="VneqS, VeqS or VeqmS (aliases V=S, V=-S)")
    p.add_argument("--tol", type=float, default=1e-10, help="self-consistency tolerance on E")
    p.add_argument("--freeze-lambda", action="store_true", help="evaluate the angular eigenvalue at E = M")
    p.add_argument("--use-exact-centrifugal", action="store_true",
                   help="solve the radial problem with 1/r^2 by the ODE oracle")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    return p


def build_parser() -> argparse.ArgumentParser:
    parent = _spec_parent()
    parser = argparse.ArgumentParser(prog="kfgring", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", parents=[parent], help="energy table over quantum numbers")
    sp.add_argument("--nr", type=parse_range, default=range(0, 1))
    sp.add_argument("--N", type=parse_range, default=range(0, 1))
    sp.add_argument("--m", type=parse_range, default=range(0, 1))
    sp.add_argument("--route", choices=("NU", "SUSY", "oracle"), default="NU")
    sp.add_argument("--branch", choices=("auto", "positive", "negative", "all"), default="auto")

    wp = sub.add_parser("wavefunction", parents=[parent], help="sample a radial or angular eigenfunction")
    wp.add_argument("--nr", type=int, default=0)
    wp.add_argument("--N", type=int, default=0)
    wp.add_argument("--m", type=int, default=0)
    wp.add_argument("--branch", choices=("auto", "positive", "negative"), default="auto")
    wp.add_argument("--grid", choices=("r", "theta"), default="r")
    wp.add_argument("--points", type=int, default=200)
    wp.add_argument("--r-max", dest="r_max", type=float, default=None)
    wp.add_argument("--check-norm", action="store_true")
    wp.add_argument("--overlay-susy", action="store_true", help="add the SUSY ground state and the ratio (n_r = 0)")

    vp = sub.add_parser("verify", parents=[parent], help="cross-check the NU, SUSY and oracle routes")
    vp.add_argument("--nr", type=parse_range, default=range(0, 3))
    vp.add_argument("--N", type=parse_range, default=range(0, 2))
    vp.add_argument("--m", type=parse_range, default=range(0, 1))
    vp.add_argument("--delta-scan", dest="delta_scan", type=parse_float_list, default=None,
                    help="comma-separated deltas; V0/delta and S0/delta are held fixed")
    return parser


def load_spec(args) -> tuple[PotentialSpec, CouplingCase]:
    data: dict = {}
    case = None
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read spec file: {exc}") from None
        if "case" in data:
            case = CouplingCase.parse(data.pop("case"))
    for name in ("M", "V0", "S0", "delta", "beta", "beta_prime", "C0"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if args.case is not None:
        case = args.case
    case = case or CouplingCase.VneqS
    try:
        spec = PotentialSpec.from_dict(data).for_case(case)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    return spec, case


def open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# ---------------------------------------------------------------- spectrum

@dataclass
class SpectrumJob:
    spec: PotentialSpec
    case: CouplingCase
    n_r: int
    N: int
    m: int
    route: str
    branch: str
    tol: float
    freeze: bool
    exact: bool


@dataclass
class SpectrumResult:
    rows: list[dict] = field(default_factory=list)
    failed: bool = False


def _reroute(job: SpectrumJob, level: EnergyLevel) -> EnergyLevel:
    if job.route == "SUSY":
        roots = [lv for lv in solve_susy_energies(job.spec, job.n_r, level.lam, job.case) if lv.bound]
        if not roots:
            raise NoBoundState("SUSY residual has no bound root at this eta")
        best = min(roots, key=lambda lv: abs(lv.E - level.E))
        best.N, best.m = job.N, job.m
        return best
    if job.route == "oracle" or job.exact:
        E = refine_ode_energy(job.spec, level.E, level.lam, use_approx=not job.exact)
        defect, nodes = shoot_radial(job.spec, E, level.lam, use_approx=not job.exact)
        flags = ["bound"] if nodes == job.n_r else [f"node-mismatch:{nodes}"]
        return EnergyLevel(E=E, n_r=job.n_r, lam=level.lam, case=job.case, route="oracle",
                           residual=defect, flags=flags, N=job.N, m=job.m)
    return level


def spectrum_job(job: SpectrumJob) -> SpectrumResult:
    base = {"n_r": job.n_r, "N": job.N, "m": job.m, "case": job.case.value,
            "route": "oracle" if job.exact else job.route}
    try:
        levels = solve_combined_all(job.spec, job.n_r, job.N, job.m, job.case, job.tol,
                                    freeze_lambda=job.freeze)
        if job.branch == "positive":
            levels = [lv for lv in levels if lv.E > 0]
        elif job.branch == "negative":
            levels = [lv for lv in levels if lv.E < 0]
        elif job.branch == "auto" and levels:
            levels = [max(levels, key=lambda lv: lv.E)]
        rows = []
        for lv in levels:
            out = _reroute(job, lv)
            rows.append({**base, "route": out.route, "E": out.E, "lambda": out.lam, "residual": out.residual,
                         "bound_flag": ",".join(out.flags), "error": ""})
        return SpectrumResult(rows)
    except NoBoundState:
        return SpectrumResult([])
    except KFGError as exc:
        row = {**base, "E": None, "lambda": None, "residual": None, "bound_flag": "error",
               "error": f"{type(exc).__name__}: {exc}"}
        return SpectrumResult([row], failed=True)


def write_rows(rows, columns, fmt_name, fh):
    if fmt_name == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row.get(c)) for c in columns])
    else:
        for row in rows:
            fh.write(json.dumps({c: row.get(c) for c in columns}) + "\n")


def cmd_spectrum(args) -> int:
    spec, case = load_spec(args)
    jobs = [
        SpectrumJob(spec, case, n_r, N, m, args.route, args.branch, args.tol, args.freeze_lambda,
                    args.use_exact_centrifugal)
        for n_r in args.nr for N in args.N for m in args.m
    ]
    results = parallel_map(spectrum_job, jobs)
    rows = [row for res in results for row in res.rows]
    fh, close = open_out(args.out)
    try:
        write_rows(rows, SPECTRUM_COLUMNS, args.format, fh)
    finally:
        if close:
            fh.close()
    failures = [res for res in results if res.failed]
    for res in failures:
        print(f"error: {res.rows[0]['error']}", file=sys.stderr)
    if failures and len(failures) == len(results):
        return EXIT_FAIL
    return EXIT_OK


def read_spectrum_csv(text: str) -> list[EnergyLevel]:
    """Parse ``spectrum`` CSV output back into EnergyLevel records (error rows skipped)."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        if row["error"]:
            continue
        out.append(EnergyLevel.from_dict({
            "E": float(row["E"]), "n_r": int(row["n_r"]), "lambda": float(row["lambda"]), "case": row["case"],
            "route": row["route"], "residual": float(row["residual"]), "flags": row["bound_flag"].split(","),
            "N": int(row["N"]), "m": int(row["m"]),
        }))
    return out


# ---------------------------------------------------------------- wavefunction

def _pick_level(spec, case, args) -> EnergyLevel:
    levels = solve_combined_all(spec, args.nr, args.N, args.m, case, args.tol, freeze_lambda=args.freeze_lambda)
    levels = [lv for lv in levels if lv.bound]
    if args.branch == "positive":
        levels = [lv for lv in levels if lv.E > 0]
    elif args.branch == "negative":
        levels = [lv for lv in levels if lv.E < 0]
    if not levels:
        raise NoBoundState(f"no bound level for n_r={args.nr}, N={args.N}, m={args.m}")
    return max(levels, key=lambda lv: lv.E)


def cmd_wavefunction(args) -> int:
    spec, case = load_spec(args)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    level = _pick_level(spec, case, args)
    rows: list[dict] = []
    norm = None
    if args.grid == "r":
        chi = radial_eigenfunction(spec, level)
        r_max = args.r_max or radial_tail_cutoff(chi.sqrt_c, chi.K, chi.n_r, spec.delta) / 4.0
        r = np.linspace(r_max / args.points, r_max, args.points)
        values = chi(r)
        columns = ["r", "chi"]
        extra = {}
        if args.overlay_susy:
            if args.nr != 0:
                raise UsageError("--overlay-susy needs --nr 0")
            gs = ground_state(solve_cd(spec, level.E, level.lam, case))
            susy = gs(r)
            extra = {"chi_susy": susy, "ratio": susy / values}
            columns += ["chi_susy", "ratio"]
        for i in range(len(r)):
            rows.append({"r": r[i], "chi": values[i], **{k: v[i] for k, v in extra.items()}})
        if args.check_norm:
            norm = chi.norm_integral()
    else:
        sol = solve_angular(spec, level.E, args.m, args.N)
        theta = (np.arange(args.points) + 0.5) * math.pi / args.points
        values = theta_wavefunction(sol, args.N, theta)
        columns = ["theta", "Theta"]
        rows = [{"theta": t, "Theta": v} for t, v in zip(theta, values)]
        if args.check_norm:
            norm = integrate(lambda t: theta_wavefunction(sol, args.N, t) ** 2 * np.sin(t), 0.0, math.pi)
    fh, close = open_out(args.out)
    try:
        write_rows(rows, columns, args.format, fh)
        if norm is not None:
            if args.format == "csv":
                fh.write(f"# norm,{fmt(norm)}\n")
            else:
                fh.write(json.dumps({"norm": norm}) + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------- verify

def _verify_level(item):
    spec, case, level = item
    lam = level.lam
    susy = [lv for lv in solve_susy_energies(spec, level.n_r, lam, case) if lv.bound]
    d_susy = min((abs(lv.E - level.E) for lv in susy), default=math.inf)
    E_or = refine_ode_energy(spec, level.E, lam)
    defect, nodes = shoot_radial(spec, level.E, lam)
    fac = factorize(spec, level.E, lam, case)
    radii = np.linspace(0.05 / spec.delta, 10.0 / spec.delta, 100)
    flat = max(remainder_flatness(fac, i, radii) for i in range(3))
    return {
        "n_r": level.n_r, "N": level.N, "m": level.m, "E": level.E,
        "nu_susy": d_susy, "nu_oracle": abs(E_or - level.E), "defect": abs(defect),
        "flatness": flat, "nodes": nodes,
    }


def delta_scan_table(spec: PotentialSpec, case: CouplingCase, n_r: int, N: int, m: int, deltas, tol: float):
    """|E_exact - E_NU| per delta with V0/delta and S0/delta fixed, for C0 as given and C0 = 0."""
    rows = []
    for delta in deltas:
        scaled = spec.with_(delta=delta, V0=spec.V0 * delta / spec.delta, S0=spec.S0 * delta / spec.delta)
        row = {"delta": delta}
        for label, c0 in (("err", scaled.C0), ("err_C0_0", 0.0)):
            variant = scaled.with_(C0=c0)
            levels = [lv for lv in solve_combined_all(variant, n_r, N, m, case, tol) if lv.bound]
            if not levels:
                raise NoBoundState(f"no bound level at delta = {delta}")
            lv = max(levels, key=lambda x: x.E)
            exact = refine_ode_energy(variant, lv.E, lv.lam, use_approx=False)
            row[label] = abs(exact - lv.E)
            if label == "err":
                row["E_NU"], row["E_exact"] = lv.E, exact
        rows.append(row)
    return rows


def cmd_verify(args) -> int:
    spec, case = load_spec(args)
    out, close = open_out(args.out)
    try:
        return _verify(spec, case, args, out)
    finally:
        if close:
            out.close()


def _verify(spec, case, args, out) -> int:
    tuples = [(n_r, N, m) for n_r in args.nr for N in args.N for m in args.m]

    def converge(t):
        try:
            return [lv for lv in solve_combined_all(spec, *t, case, args.tol, freeze_lambda=args.freeze_lambda)
                    if lv.bound]
        except NoBoundState:
            return []

    levels = [lv for group in parallel_map(converge, tuples) for lv in group]
    report: dict = {"spec": spec.to_dict(), "case": case.value, "levels": len(levels)}
    failures = []
    if not levels:
        report["note"] = "no bound states"
    else:
        checks = parallel_map(_verify_level, [(spec, case, lv) for lv in levels])
        for key in THRESHOLDS:
            report[f"max_{key}"] = max(c[key] for c in checks)
        report["node_agreement"] = all(c["nodes"] == c["n_r"] for c in checks)
        for c in checks:
            bad = [k for k, lim in THRESHOLDS.items() if not c[k] < lim]
            if c["nodes"] != c["n_r"]:
                bad.append("nodes")
            if bad:
                failures.append({"failed": bad, **c})
    if args.delta_scan and levels:
        n_r, N, m = levels[0].n_r, levels[0].N, levels[0].m
        table = delta_scan_table(spec, case, n_r, N, m, sorted(args.delta_scan, reverse=True), args.tol)
        errs = [row["err"] for row in table]
        report["delta_scan"] = table
        report["delta_scan_monotone"] = all(b < a for a, b in zip(errs, errs[1:]))
        if not report["delta_scan_monotone"]:
            failures.append({"failed": ["delta_scan"], "errors": errs})
    report["pass"] = not failures
    if args.format == "jsonl":
        out.write(json.dumps({**report, "failures": failures}) + "\n")
    else:
        _print_report(report, failures, out)
    return EXIT_OK if not failures else EXIT_FAIL


def _print_report(report, failures, out):
    p = lambda *a: print(*a, file=out)  # noqa: E731
    p(f"case: {report['case']}  spec: {json.dumps(report['spec'])}")
    if "note" in report:
        p(report["note"])
    p(f"levels checked: {report['levels']}")
    for key, lim in THRESHOLDS.items():
        name = f"max_{key}"
        if name in report:
            p(f"{name}: {fmt(report[name])}  (limit {lim:.0e})")
    if "node_agreement" in report:
        p(f"node_agreement: {report['node_agreement']}")
    if "delta_scan" in report:
        p("delta,E_NU,E_exact,err,err_C0_0")
        for row in report["delta_scan"]:
            p(",".join(fmt(row[k]) for k in ("delta", "E_NU", "E_exact", "err", "err_C0_0")))
        p(f"delta_scan_monotone: {report['delta_scan_monotone']}")
    for f in failures:
        p("FAIL " + json.dumps(f))
    p("PASS" if report["pass"] else "FAIL")


# ---------------------------------------------------------------- entry

COMMANDS = {"spectrum": cmd_spectrum, "wavefunction": cmd_wavefunction, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KFGError, DomainError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def run() -> None:
    sys.exit(main())
