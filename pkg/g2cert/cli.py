#!/usr/bin/env python3
"""g2cert command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial

from g2cert.errors import CertificateInvariantViolation, G2CertError

logger = logging.getLogger(__name__)

EXIT_FAIL = 1
EXIT_USAGE = 2


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _open_catalog(args):
    from dataclasses import replace

    from g2cert.catalog import load_catalog
    from g2cert.config import load_settings, resolve_database_dir

    settings = load_settings()
    if getattr(args, "strict", False):
        settings = replace(settings, strict_checksums=True)
    return load_catalog(resolve_database_dir(settings, getattr(args, "db", None)), settings)


def _param(args) -> Fraction | None:
    from g2cert.parsing import parse_rational

    return None if getattr(args, "param", None) is None else parse_rational(args.param)


def _jobs(args, catalog) -> int:
    return args.jobs or catalog.settings.jobs


def _claimed(record) -> str:
    return record.status if record.method is None else f"{record.status}:{record.method.value}"


def _emit(report, args) -> None:
    from g2cert.report import format_table

    if getattr(args, "json", False):
        print(report.to_json(canonical=args.canonical))
    else:
        print(format_table(report))


# --- verification and obstruction, one record at a time ---

def verify_entry(catalog, name: str, param: Fraction | None = None, cert_file: str | None = None):
    """Run the purely coclosed check for one certificate and report it."""
    from g2cert.exterior import format_form
    from g2cert.g2 import check_purely_coclosed
    from g2cert.parsing import parse_form
    from g2cert.report import EXTERNAL_CITATION, MISMATCH, PURE_VERIFIED, ReportEntry

    record = catalog.record(name)
    start = time.perf_counter()
    g = catalog.algebra(name, param)
    if cert_file:
        cert_record = _certificate_from_file(name, cert_file)
    else:
        cert_record = catalog.certificate_for(name, param)
    if cert_record.cited:
        return ReportEntry(
            name=name,
            status_claimed=_claimed(record),
            status_verified=EXTERNAL_CITATION,
            parameter=None if param is None else str(param),
            certificate=cert_record.label,
            detail=cert_record.cited,
            seconds=time.perf_counter() - start,
        )
    cert = cert_record.instantiate(g.n, param)
    result = check_purely_coclosed(g, cert)

    detail = list(result.diagnostics)
    ok = result.passed
    construction = result.construction
    if ok and cert_record.expect_psi_plus:
        expected = parse_form(cert_record.expect_psi_plus, g.n, param)
        if construction.psi_plus != expected:
            ok = False
            detail.append(f"psi_plus {format_form(construction.psi_plus)} != expected {format_form(expected)}")
    if ok and cert_record.expected_metric() is not None:
        if construction.metric != cert_record.expected_metric():
            ok = False
            detail.append("metric differs from the expected rows")

    return ReportEntry(
        name=name,
        status_claimed=_claimed(record),
        status_verified=PURE_VERIFIED if ok else MISMATCH,
        parameter=None if param is None else str(param),
        flags=result.flags(),
        lambda_value=None if result.lambda_num is None else str(result.lambda_num),
        certificate=cert_record.label,
        detail="; ".join(detail),
        seconds=time.perf_counter() - start,
    )


def obstruct_entry(catalog, name: str, method=None, cert_file: str | None = None, jobs: int = 1):
    """Verify a pinned or supplied obstruction certificate, else search for one."""
    from g2cert.obstructions import Method, search_obstruction, verify_obstruction
    from g2cert.report import MISMATCH, OBSTRUCTED_VERIFIED, ReportEntry

    record = catalog.record(name)
    start = time.perf_counter()
    g = catalog.algebra(name)
    settings = catalog.settings
    method = Method(method) if method else record.method

    cert = None
    if cert_file:
        cert = _obstruction_from_file(name, cert_file).certificate(g, settings)
    elif name in catalog.obstructions and method in (None, catalog.obstructions[name].method):
        cert = catalog.obstructions[name].certificate(g, settings)
    if cert is None:
        cert = search_obstruction(g, method, settings, jobs)

    verified = cert is not None and verify_obstruction(g, cert, settings)
    if cert is None:
        detail = "no obstruction found"
        if record.status == "pure":
            detail += " (algebra admits coclosed structures)"
    elif not verified:
        detail = "certificate does not verify"
    else:
        detail = ""
    return ReportEntry(
        name=name,
        status_claimed=_claimed(record),
        status_verified=OBSTRUCTED_VERIFIED if verified else MISMATCH,
        method=None if cert is None else cert.method.value,
        certificate=None if cert is None else cert.describe(),
        detail=detail,
        seconds=time.perf_counter() - start,
    )


def classify_record(catalog, name: str, search: bool = False):
    """Entries (and search entries) for one record, driven by its status."""
    from g2cert.catalog import NO_COCLOSED, PURE
    from g2cert.report import EXTERNAL_CITATION, MISMATCH, ReportEntry

    record = catalog.record(name)
    entries, searches = [], []

    def failed(exc, param=None):
        return ReportEntry(
            name=name, status_claimed=_claimed(record), status_verified=MISMATCH,
            parameter=None if param is None else str(param), detail=f"{type(exc).__name__}: {exc}",
        )

    try:
        catalog.lookup(name)
    except G2CertError as exc:
        return [failed(exc)], []

    if record.status == PURE:
        params = catalog.samples(name) if record.is_family else (None,)
        for param in params:
            try:
                entries.append(verify_entry(catalog, name, param))
            except G2CertError as exc:
                entries.append(failed(exc, param))
    elif record.status == NO_COCLOSED:
        try:
            entries.append(obstruct_entry(catalog, name))
        except G2CertError as exc:
            entries.append(failed(exc))
    else:
        entries.append(ReportEntry(
            name=name, status_claimed=_claimed(record), status_verified=EXTERNAL_CITATION,
            detail="non-existence rests on an external result",
        ))
        if search:
            try:
                found = obstruct_entry(catalog, name)
            except G2CertError as exc:
                found = failed(exc)
            found.detail = found.detail or f"found {found.method} certificate"
            searches.append(found)
    return entries, searches


def select_records(catalog, step: int | None = None, decomposable: bool = False, everything: bool = False) -> list[str]:
    """Names in catalog order; --step picks indecomposable records unless --decomposable is set."""
    names = []
    for name, record in catalog.algebras.items():
        if everything:
            names.append(name)
            continue
        if decomposable and not record.decomposable:
            continue
        if not decomposable and record.decomposable:
            continue
        if step is not None and record.step != step:
            continue
        names.append(name)
    return names


def classify(catalog, names: list[str], search: bool = False, jobs: int = 1):
    from g2cert.report import RunReport

    report = RunReport(command="classify")
    work = partial(classify_record, catalog, search=search)
    if jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, names))
    else:
        results = [work(name) for name in names]
    for entries, searches in results:
        report.entries.extend(entries)
        report.searches.extend(searches)
    return report


# --- certificate files ---

def _load_yaml(path: str) -> dict:
    import yaml

    from g2cert.errors import BadCertificate

    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise BadCertificate(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise BadCertificate(f"{path}: expected a mapping")
    return {str(k): v for k, v in data.items()}


def _certificate_from_file(name: str, path: str):
    from g2cert.catalog import CertificateRecord
    from g2cert.errors import BadCertificate

    data = _load_yaml(path)
    missing = {"omega", "psi", "eta"} - data.keys()
    if missing:
        raise BadCertificate(f"{path}: missing {sorted(missing)}")
    return CertificateRecord(
        algebra=name, regime=None,
        omega=str(data["omega"]), psi_minus=str(data["psi"]), eta=str(data["eta"]),
        X=str(data["X"]) if data.get("X") else None,
    )


def _obstruction_from_file(name: str, path: str):
    from g2cert.catalog import ObstructionRecord
    from g2cert.errors import BadCertificate
    from g2cert.obstructions import Method

    data = _load_yaml(path)
    try:
        method = Method(str(data.pop("method")))
    except (KeyError, ValueError) as exc:
        raise BadCertificate(f"{path}: method must be one of {[m.value for m in Method]}") from exc
    fields = {k: ",".join(map(str, v)) if isinstance(v, list) else str(v) for k, v in data.items()}
    return ObstructionRecord(name=name, method=method, fields=fields)


# --- commands ---

def cmd_verify(args):
    """Check a stored (or supplied) certificate: SU(3) data, conditions (1)-(3), positivity."""
    from g2cert.catalog import NO_COCLOSED, PURE
    from g2cert.report import EXTERNAL_CITATION, ReportEntry, RunReport

    catalog = _open_catalog(args)
    record, param = catalog.resolve(args.name, _param(args))
    report = RunReport(command="verify")

    if record.status != PURE and not args.cert:
        if record.status == NO_COCLOSED:
            print(f"{record.name} has no certificate: it admits no coclosed G2-structure "
                  f"(run 'g2cert obstruct {record.name}')")
            sys.exit(EXIT_FAIL)
        report.add(ReportEntry(
            name=record.name, status_claimed=_claimed(record), status_verified=EXTERNAL_CITATION,
            detail="no certificate; non-existence rests on an external result",
        ))
        _emit(report, args)
        return

    if record.is_family and param is None:
        print(f"{record.name} is a family; give --param (samples: "
              f"{', '.join(str(v) for v in catalog.samples(record.name))})", file=sys.stderr)
        sys.exit(EXIT_USAGE)

    catalog.lookup(record.name)
    entry = verify_entry(catalog, record.name, param, args.cert)
    report.add(entry)
    if args.json:
        print(report.to_json(canonical=args.canonical))
    else:
        print(f"{entry.label}  certificate {entry.certificate}")
        for flag, value in entry.flags.items():
            print(f"  {flag:<13} {'yes' if value else 'no'}")
        if entry.lambda_value is not None:
            print(f"  lambda        {entry.lambda_value}")
        if entry.detail:
            print(f"  {entry.detail}")
        verdicts = {"PURE_VERIFIED": "PASS", EXTERNAL_CITATION: EXTERNAL_CITATION}
        print(verdicts.get(entry.status_verified, "FAIL"))
    if report.exit_status:
        sys.exit(EXIT_FAIL)


def cmd_obstruct(args):
    """Verify or search for an obstruction certificate."""
    from g2cert.report import RunReport

    catalog = _open_catalog(args)
    record, param = catalog.resolve(args.name, _param(args))
    if record.is_family:
        print(f"{record.name} is a family; obstructions are recorded per member", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    catalog.lookup(record.name)
    entry = obstruct_entry(catalog, record.name, args.method, args.cert, _jobs(args, catalog))
    report = RunReport(command="obstruct", entries=[entry])
    if args.json:
        print(report.to_json(canonical=args.canonical))
    elif entry.certificate:
        state = "verified" if entry.status_verified == "OBSTRUCTED_VERIFIED" else "NOT verified"
        print(f"{record.name}: {entry.method} certificate {state}")
        print(f"  {entry.certificate}")
    else:
        print(f"{record.name}: {entry.detail}")
    if report.exit_status:
        sys.exit(EXIT_FAIL)


def cmd_classify(args):
    """Run every record in scope through verify-or-obstruct per its status."""
    from g2cert.report import export_report

    catalog = _open_catalog(args)
    if not (args.step or args.decomposable or args.all):
        print("Choose a scope: --step k, --decomposable or --all", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    names = select_records(catalog, args.step, args.decomposable, args.all)
    report = classify(catalog, names, search=args.search_external, jobs=_jobs(args, catalog))
    if args.output:
        export_report(report, args.format, args.output, canonical=args.canonical)
    _emit(report, args)
    if report.exit_status:
        sys.exit(EXIT_FAIL)


def cmd_cohomology(args):
    """Lie algebra cohomology: one degree, or all Betti numbers."""
    from g2cert.exterior import format_form
    from g2cert.lie_ce import betti_numbers, cohomology_representatives

    catalog = _open_catalog(args)
    record, param = catalog.resolve(args.name, _param(args))
    g = catalog.algebra(record.name, param)
    label = g.name

    if args.all_degrees:
        betti = betti_numbers(g)
        duality = all(betti[k] == betti[g.n - k] for k in range(g.n + 1))
        if args.json:
            print(json.dumps({"algebra": label, "betti": betti, "poincare_duality": duality}, indent=2))
        else:
            print(f"{label}: betti numbers {' '.join(map(str, betti))}")
            print(f"  Poincare duality {'holds' if duality else 'FAILS'}")
        if not duality:
            sys.exit(EXIT_FAIL)
        return

    if args.degree is None:
        print("Give --degree k or --all-degrees", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    if not 0 <= args.degree <= g.n:
        print(f"degree must be between 0 and {g.n}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    reps = cohomology_representatives(g, args.degree)
    if args.json:
        print(json.dumps({
            "algebra": label,
            "degree": args.degree,
            "dim": len(reps),
            "representatives": [format_form(r) for r in reps],
        }, indent=2))
        return
    print(f"dim H^{args.degree}({label}) = {len(reps)}")
    for r in reps:
        print(f"  {format_form(r)}")


def cmd_list(args):
    """List records with their statuses."""
    catalog = _open_catalog(args)
    if args.family:
        families = catalog.families()
        if args.json:
            print(json.dumps([{
                "name": r.name,
                "structure": r.structure,
                "constraint": str(r.constraint) if r.constraint else None,
                "regimes": [str(c.regime) for c in catalog.certificates.get(r.name, []) if c.regime],
                "samples": [str(v) for v in catalog.samples(r.name)],
            } for r in families], indent=2))
            return
        for r in families:
            regimes = [str(c.regime) for c in catalog.certificates.get(r.name, []) if c.regime]
            print(f"{r.name:<10} {r.structure}")
            print(f"  constraint: {r.constraint or 'none'}")
            if regimes:
                print(f"  regimes:    {' | '.join(regimes)}")
            print(f"  samples:    {', '.join(str(v) for v in catalog.samples(r.name))}")
        return

    scoped = args.step is not None or args.decomposable
    names = select_records(catalog, args.step, args.decomposable, everything=not scoped)
    records = [catalog.algebras[n] for n in names]
    if args.status:
        records = [r for r in records if r.status == args.status]
    if args.json:
        print(json.dumps([{
            "name": r.name,
            "step": r.step,
            "decomposable": r.decomposable,
            "structure": r.structure,
            "status": r.status,
            "method": r.method.value if r.method else None,
        } for r in records], indent=2))
        return
    for r in records:
        method = f" ({r.method.value})" if r.method else ""
        print(f"{r.name:<10} step {r.step}  {r.structure:<36} {r.status}{method}")
    census = catalog.census()
    if not args.status and not scoped:
        print()
        print("Census (indecomposable): " + ", ".join(f"{k}: {v['total']}" for k, v in sorted(census.items())))


def main(argv: list[str] | None = None):
    from g2cert.catalog import STATUSES
    from g2cert.obstructions import Method

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--db", default=None, help="Database directory (G2CERT_DB overrides)")
    common.add_argument("--json", action="store_true", help="Output as JSON")
    common.add_argument("--canonical", action="store_true", help="Omit timings from JSON output")
    common.add_argument("--strict", action="store_true", help="Fail on a missing or stale .db checksum")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes (default: config jobs)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = argparse.ArgumentParser(
        prog="g2cert",
        description="Exact verification of purely coclosed G2-structures on nilpotent Lie algebras",
    )
    sub = parser.add_subparsers(dest="command", metavar="<command>")

    # verify
    p_verify = sub.add_parser("verify", parents=[common], help="Verify a purely coclosed certificate")
    p_verify.add_argument("name", help="Algebra name, e.g. 37B or 147E")
    p_verify.add_argument("--param", default=None, help="Family parameter as p/q")
    p_verify.add_argument("--cert", default=None, help="YAML file with omega, psi, eta (and X)")
    p_verify.set_defaults(func=cmd_verify)

    # obstruct
    p_obstruct = sub.add_parser("obstruct", parents=[common], help="Verify or find an obstruction")
    p_obstruct.add_argument("name", help="Algebra name")
    p_obstruct.add_argument("--param", default=None, help="Family parameter as p/q")
    p_obstruct.add_argument("--method", choices=[m.value for m in Method], default=None)
    p_obstruct.add_argument("--cert", default=None, help="YAML obstruction certificate to check")
    p_obstruct.set_defaults(func=cmd_obstruct)

    # classify
    p_classify = sub.add_parser("classify", parents=[common], help="Reproduce the classification")
    p_classify.add_argument("--step", type=int, choices=[2, 3, 4], default=None,
                            help="Indecomposable algebras of this step")
    p_classify.add_argument("--decomposable", action="store_true", help="Decomposable algebras")
    p_classify.add_argument("--all", action="store_true", help="Every record")
    p_classify.add_argument("--search-external", action="store_true",
                            help="Also search obstructions for externally cited negatives")
    p_classify.add_argument("--output", default=None, help="Export the report to this file")
    p_classify.add_argument("--format", choices=["json", "csv"], default="json")
    p_classify.set_defaults(func=cmd_classify)

    # cohomology
    p_coh = sub.add_parser("cohomology", parents=[common], help="Chevalley-Eilenberg cohomology")
    p_coh.add_argument("name", help="Algebra name")
    p_coh.add_argument("--param", default=None, help="Family parameter as p/q")
    p_coh.add_argument("--degree", type=int, default=None)
    p_coh.add_argument("--all-degrees", action="store_true", help="Betti numbers and Poincare duality")
    p_coh.set_defaults(func=cmd_cohomology)

    # list
    p_list = sub.add_parser("list", parents=[common], help="List database records")
    p_list.add_argument("--step", type=int, default=None)
    p_list.add_argument("--decomposable", action="store_true")
    p_list.add_argument("--status", choices=list(STATUSES), default=None)
    p_list.add_argument("--family", action="store_true", help="Families with regimes and samples")
    p_list.set_defaults(func=cmd_list)

    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return

    _setup_logging(args.verbose)
    try:
        args.func(args)
    except CertificateInvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(EXIT_FAIL)
    except G2CertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
