"""Command line entry point: ``turan --spec problem.json`` and ``turan --selftest``.

Exit codes: 0 success, 1 self-test failure, 2 invalid problem file,
3 exact arithmetic resource limit.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from . import acceptance, construct
from . import geometry as geo
from . import lp as _lp
from . import solver
from .indexset import IndexSet
from .trigpoly import CosinePolynomial, write_samples_csv

log = logging.getLogger("turan")

EXIT_OK, EXIT_FAIL, EXIT_SPEC, EXIT_RESOURCE = 0, 1, 2, 3


class SpecError(Exception):
    def __init__(self, message: str, **where):
        super().__init__(message)
        self.where = where


def load_schema(name: str) -> dict:
    text = resources.files("turan").joinpath("schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def parse_spec(text: str) -> dict:
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    validator = jsonschema.Draft202012Validator(load_schema("problem_spec"))
    errors = sorted(validator.iter_errors(spec), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SpecError(f"{path}: {err.message}", path=path)
    return spec


def _config(spec: dict, arithmetic: str | None) -> solver.SolverConfig:
    raw = spec.get("solver_cfg", {})
    cfg = solver.SolverConfig()
    if "N_trunc" in raw:
        cfg.n_trunc = raw["N_trunc"]
    if "m_grid" in raw:
        cfg.m_grid = raw["m_grid"]
    if "N_samples" in raw:
        cfg.n_samples = raw["N_samples"]
    cfg.arithmetic = arithmetic or raw.get("arithmetic")
    return cfg


def _domain(spec: dict, space: str | None = None) -> geo.Domain:
    obj = dict(spec["domain"])
    if space is not None:
        obj.setdefault("space", space)
    return geo.Domain.from_json(obj)


def _h_json(H) -> dict | None:
    if H is None:
        return None
    out = H.to_json()
    out["description"] = H.describe()
    return out


def _base_report(mode: str, cfg: solver.SolverConfig) -> dict:
    return {
        "mode": mode,
        "value": None,
        "H": None,
        "orbit": None,
        "witness_polynomial": None,
        "certificates": [],
        "warnings": [],
        "solver_cfg": cfg.to_json(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def _fill(report: dict, enc: solver.Enclosure) -> None:
    report["value"] = enc.value_json()
    report["H"] = _h_json(enc.H)
    report["witness_polynomial"] = enc.lower_witness.to_json() if enc.lower_witness is not None else None
    report["certificates"] = enc.certificates
    report["warnings"] = list(enc.warnings)


def _finite(x: float) -> float | None:
    return x if x == x and abs(x) != float("inf") else None


def run_space(spec, cfg, csv_path):
    dom = _domain(spec, geo.EUCLIDEAN)
    if dom.space != geo.EUCLIDEAN:
        raise SpecError("mode 'space' needs a euclidean domain")
    z = geo.Point.from_json(spec["point"])
    enc = solver.pointwise_space(dom, z, cfg if "solver_cfg" in spec else None)
    report = _base_report("space", cfg)
    _fill(report, enc)
    if csv_path and enc.lower_witness is not None:
        write_samples_csv(enc.lower_witness, csv_path)
    return report


def run_torus(spec, cfg, csv_path):
    dom = _domain(spec, geo.TORUS)
    if dom.space != geo.TORUS:
        raise SpecError("mode 'torus' needs a torus domain")
    z = geo.Point.from_json(spec["point"])
    H = IndexSet.from_json(spec["index_set"]) if "index_set" in spec else None
    enc = solver.pointwise_torus(dom, z, cfg, spec.get("n_max", 256), H)
    report = _base_report("torus", cfg)
    _fill(report, enc)
    report["orbit"] = geo.orbit(z).label() if (z.is_exact or z.irrational) else "infinite"
    if csv_path and enc.lower_witness is not None:
        write_samples_csv(enc.lower_witness, csv_path)
    return report


def run_solve_h(spec, cfg, csv_path):
    H = IndexSet.from_json(spec["index_set"])
    report = _base_report("solve-h", cfg)
    if "m" in spec:
        m = spec["m"]
        sol = solver.solve_discrete(H, m, cfg.arithmetic)
        report["orbit"] = f"finite:{m}"
        report["H"] = _h_json(H)
        if sol.unbounded:
            d = sol.degenerate
            report["value"] = {"lower": None, "upper": None, "status": solver.UNBOUNDED}
            report["certificates"] = [{"kind": "Degenerate", "residue": d.residue, "witness": d.witness, "modulus": d.modulus}]
        else:
            value = {"lower": sol.value, "upper": sol.value, "status": solver.EXACT}
            if sol.exact is not None:
                value["exact"] = f"{sol.exact.numerator}/{sol.exact.denominator}"
            report["value"] = value
            report["witness_polynomial"] = sol.witness.to_json()
            report["certificates"] = [{"kind": "GridExact", "m": m, "arithmetic": "rational" if sol.exact is not None else "float"}]
            if csv_path:
                write_samples_csv(sol.witness, csv_path)
        return report
    enc = solver.bracket_M(H, cfg)
    cf = solver.closed_form(H)
    if cf is not None:
        enc.certificates.append({"kind": "ClosedForm", "name": cf.name, "expression": str(cf.value), "value": float(cf)})
    _fill(report, enc)
    if csv_path and enc.lower_witness is not None:
        write_samples_csv(enc.lower_witness, csv_path)
    return report


def run_construct(spec, cfg, csv_path):
    dom = _domain(spec, geo.EUCLIDEAN)
    z = geo.Point.from_json(spec["point"])
    if "phi" in spec:
        phi = CosinePolynomial.from_json(spec["phi"])
        enc = None
    else:
        if dom.space == geo.TORUS:
            enc = solver.pointwise_torus(dom, z, cfg)
        else:
            enc = solver.pointwise_space(dom, z, cfg if "solver_cfg" in spec else None, use_closed_form=False)
        if enc.lower_witness is None:
            raise SpecError(f"no witness polynomial for a {enc.status} problem")
        phi = enc.lower_witness
    fn = construct.build_extremal_function(dom, z, phi, spec.get("eps"))
    check = construct.verify_function(fn)
    report = _base_report("construct", cfg)
    if enc is not None:
        report["H"] = _h_json(enc.H)
        report["warnings"] = list(enc.warnings)
    value = fn.lam / 2
    report["value"] = {"lower": value, "upper": value, "status": solver.EXACT if check["passed"] else solver.BRACKET}
    report["witness_polynomial"] = phi.to_json()
    report["certificates"] = [{"kind": "Construction", "passed": check["passed"]}]
    report["details"] = {"function": fn.to_json(), "checks": check["checks"]}
    if not check["passed"]:
        report["warnings"].append("constructed function failed verification")
    if csv_path:
        construct.write_section_csv(fn, csv_path)
    return report


def run_delta(spec, cfg, csv_path):
    n, K = spec["n"], spec["K"]
    cfg_delta = cfg if "solver_cfg" in spec else solver.SolverConfig(n_trunc=K)
    res = solver.delta_search(n, K, cfg_delta)
    report = _base_report("delta", cfg_delta)
    _fill(report, res.enclosure)
    report["H"] = _h_json(IndexSet.finite(res.best_H))
    report["details"] = {
        "n": n,
        "K": K,
        "best_H": list(res.best_H),
        "envelope_ok": res.envelope_ok,
        "envelope": 1 - 0.5 / (n + 1) ** 2,
        "candidates": len(res.candidates),
    }
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["H", "lower", "upper"])
            for H, enc in res.candidates:
                w.writerow([" ".join(map(str, H)), f"{enc.lower:.17g}", f"{enc.upper:.17g}"])
    return report


def run_limit_scan(spec, cfg, csv_path):
    dom = _domain(spec, geo.EUCLIDEAN)
    z = geo.Point.from_json(spec["point"])
    scan = solver.limit_scan(dom, z, spec["N_list"], cfg)
    report = _base_report("limit-scan", cfg)
    _fill(report, scan.space)
    rows = []
    for r in scan.rows:
        rows.append(
            {
                "N": r.N,
                "alpha": f"{r.alpha.numerator}/{r.alpha.denominator}",
                "value": r.enclosure.value_json(),
                "H": _h_json(r.enclosure.H),
            }
        )
    report["details"] = {"rows": rows}
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", "alpha", "lower", "upper", "status"])
            for r in scan.rows:
                e = r.enclosure
                w.writerow([r.N, f"{r.alpha}", f"{e.lower:.17g}", f"{e.upper:.17g}", e.status])
    return report


RUNNERS = {
    "space": run_space,
    "torus": run_torus,
    "solve-h": run_solve_h,
    "construct": run_construct,
    "delta": run_delta,
    "limit-scan": run_limit_scan,
}


def run(spec: dict, arithmetic: str | None = None, csv_path: str | None = None) -> dict:
    """Solve one problem and return its report (schema-checked)."""
    cfg = _config(spec, arithmetic)
    csv_path = csv_path or spec.get("outputs", {}).get("csv_path")
    try:
        report = RUNNERS[spec["mode"]](spec, cfg, csv_path)
    except (geo.GeometryError, construct.ConstructionError) as exc:
        raise SpecError(str(exc)) from exc
    value = report["value"]
    for key in ("lower", "upper"):
        if value.get(key) is not None:
            value[key] = _finite(value[key])
    jsonschema.validate(report, load_schema("report"))
    return report


def comparable(report: dict) -> dict:
    """The report without its timestamp, for golden-file comparisons."""
    return {k: v for k, v in report.items() if k != "timestamp"}


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def selftest(corrupt: bool = False, echo=print) -> int:
    table = acceptance.corrupted_closed_forms() if corrupt else None
    rows = acceptance.run_all(table, echo=echo)
    passed = sum(r.passed for r in rows)
    echo(f"{passed}/{len(rows)} acceptance criteria passed")
    return EXIT_OK if passed == len(rows) else EXIT_FAIL


def _error(message: str, **where) -> None:
    print(json.dumps({"error": message, **where}), file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="turan", description="Extremal values of positive definite functions at a point.")
    ap.add_argument("--spec", metavar="FILE", help="problem file (JSON)")
    ap.add_argument("--out", metavar="FILE", help="report destination (default: outputs.report_path or stdout)")
    ap.add_argument("--csv", metavar="FILE", help="write sampled data as CSV")
    ap.add_argument("--arithmetic", choices=["float", "rational"], help="override solver_cfg.arithmetic")
    ap.add_argument("--selftest", action="store_true", help="run the acceptance table")
    ap.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    ap.add_argument("--corrupt-closed-forms", action="store_true", help=argparse.SUPPRESS)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.selftest:
        return selftest(args.corrupt_closed_forms)
    if not args.spec:
        _error("either --spec or --selftest is required")
        return EXIT_SPEC
    try:
        text = Path(args.spec).read_text()
    except OSError as exc:
        _error(f"cannot read spec: {exc}")
        return EXIT_SPEC
    try:
        spec = parse_spec(text)
        log.info("solving %s problem", spec["mode"])
        report = run(spec, args.arithmetic, args.csv)
    except SpecError as exc:
        _error(str(exc), **exc.where)
        return EXIT_SPEC
    except _lp.ResourceLimit as exc:
        _error(f"resource limit: {exc}")
        return EXIT_RESOURCE
    except ValueError as exc:
        _error(str(exc))
        return EXIT_SPEC
    out = args.out or spec.get("outputs", {}).get("report_path")
    text = dumps(report)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
