"""Command-line front end: ``jetchar <task> [--config PATH] ...``.

Records are JSON objects, one per line, with sorted keys, so that identical
configs and seeds give byte-identical output.  Exit codes: 0 success,
2 configuration error, 3 certification or computation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor

from . import config as config_mod
from .acceptance import AcceptanceSuite, SuiteConfig, Tracker, random_module, witt_law_checks
from .characters import (
    build_theta,
    crystal,
    order0_certificate,
    rank2_closed_forms,
    splitting_data,
    xn_basis,
)
from .drinfeld import (
    Certificate,
    DrinfeldModule,
    check_iphi,
    check_kernel_char_linear,
    check_latfrob_linear,
    default_theta_bound,
    kernel_action_coeffs,
    psi,
    psi_by_iteration,
    theta_iso,
)
from .errors import CaseNotCovered, ConfigError, JetCharError
from .local import INF, LocalRing
from .twisted import AdditivePoly
from .witt import PolyCarrier, WittVector, fv_minus_vf_form, universal_polys_by_ghost, witt_mul

EXIT_OK, EXIT_CONFIG, EXIT_FAILED = 0, 2, 3


# ---------------------------------------------------------------- encoding

def enc(x, limit: int):
    """Encode an element, never beyond its known precision nor the requested N."""
    if x is None:
        return None
    return x.with_prec(min(x.prec, limit)).encode()


def _prec(p):
    return None if p == INF else p


def _certs(certs) -> list:
    return [c.as_record() for c in certs]


def _module_record(cfg, E: DrinfeldModule) -> dict:
    return {"a": [enc(x, E.ring.cap) for x in E.a], "rank": E.rank}


def build_module(cfg, ring: LocalRing | None = None) -> DrinfeldModule:
    ring = ring or cfg.ring()
    return DrinfeldModule(ring, cfg.module_elements(ring), cfg.base_poly)


# ---------------------------------------------------------------- tasks

def task_witt_check(cfg) -> dict:
    max_n = cfg.max_order or 3
    R = LocalRing(cfg.spec, cfg.precision)
    tr = Tracker()
    witt_law_checks(R, random.Random(cfg.seed), 200, max_n, tr)
    exact = R.exact_ring()
    for n in range(1, max_n + 1):
        C = PolyCarrier(exact, 2 * n + 2)
        x = WittVector(C, tuple(C.var(i) for i in range(n + 1)))
        y = WittVector(C, tuple(C.var(n + 1 + i) for i in range(n + 1)))
        same = all(a == b for a, b in zip(witt_mul(x, y).comps, universal_polys_by_ghost(cfg.spec, n)))
        tr.check(same, f"universal product n={n}")
    fv = fv_minus_vf_form(cfg.spec, min(max_n, 3))
    return {"task": "witt-check", "config": cfg.summary(), "cases": tr.cases,
            "failures": len(tr.failures), "first_failures": tr.failures[:5],
            "fv_minus_vf": [x.encode() for x in fv], "passed": not tr.failures}


def task_jet_check(cfg) -> dict:
    E = build_module(cfg)
    R = E.ring
    top = max(2, cfg.max_order or 3)
    certs = []
    bound = default_theta_bound(E)
    th = theta_iso(E, 1, bound)
    lhs = th.compose(AdditivePoly.from_list(R, kernel_action_coeffs(E, 1)), bound)
    diff = (lhs - th.scale(R.pi())).truncate(bound)
    ok = diff.is_zero() and (th.coeff(0) - R.one()).is_zero() and all(
        th.coeff(i).vbound() >= min(i, th.coeff(i).prec) for i in range(bound + 1))
    certs.append(Certificate("theta-linearization", 1, ok, diff.min_prec(), f"degree bound {bound}"))
    for n in range(2, top + 1):
        certs.append(check_iphi(E, n))
        certs.append(check_latfrob_linear(E, n))
    for i in range(1, top + 1):
        P = psi(E, i, top)
        certs.append(check_kernel_char_linear(E, P))
        d = P - psi_by_iteration(E, i, top)
        certs.append(Certificate("psi-two-constructions", i, d.is_zero(), d.min_prec()))
    rep = order0_certificate(E, max(cfg.degree_bound, 6 * E.rank))
    certs.append(Certificate("order0-blowup", 0, rep.passed, INF,
                             json.dumps(rep.blowup_degrees, sort_keys=True)))
    return {"task": "jet-check", "config": cfg.summary(), "module": _module_record(cfg, E),
            "theta_bound": bound, "certificates": _certs(certs),
            "passed": all(c.passed for c in certs)}


def _character_fields(cfg, data) -> dict:
    N = cfg.precision
    return {
        "m": data.m,
        "lambda": [enc(x, N) for x in data.lambda_],
        "gamma": enc(data.gamma, N),
        "gamma_precision": _prec(min(data.gamma_precision, N)) if data.gamma is not None else None,
        "Dg": enc(data.Dg, N),
        "canonical_lift": data.canonical_lift,
    }


def task_characters(cfg) -> dict:
    E = build_module(cfg)
    data = splitting_data(E, max(cfg.max_order or E.rank, E.rank))
    theta, data = build_theta(E, data)
    top = max(cfg.max_order or data.m, data.m)
    basis = xn_basis(E, top, data)
    certs = list(data.certificates) + list(theta.certificates)
    for ch in basis[1:]:
        certs.extend(ch.certificates)
    rec = {"task": "characters", "config": cfg.summary(), "module": _module_record(cfg, E)}
    rec.update(_character_fields(cfg, data))
    rec["theta_mu"] = [enc(x, cfg.precision) for x in theta.mu]
    rec["basis_orders"] = [ch.order for ch in basis]
    rec["certificates"] = _certs(certs)
    rec["passed"] = all(c.passed for c in certs)
    return rec


def _closed_form_record(E, data, N) -> dict | None:
    if E.rank != 2:
        return None
    cf = rank2_closed_forms(E, strict=False)
    F = E.ring.field
    out = {"case": cf.case, "lambda1": None if cf.lambda1 is None else F.encode(cf.lambda1),
           "gamma": None if cf.gamma is None else cf.gamma.encode()}
    if data.m == 2 and cf.lambda1 is not None:
        out["lambda1_match"] = data.lambda_[0].residue() == cf.lambda1
        out["gamma_match"] = None if cf.gamma is None else data.gamma.agrees_to(cf.gamma, 2)
    return out


def crystal_record(cfg, E: DrinfeldModule) -> dict:
    N = cfg.precision
    data = crystal(E)
    rec = {"task": "crystal", "config": cfg.summary(), "module": _module_record(cfg, E)}
    rec.update(_character_fields(cfg, data))
    rec["Gamma"] = [[enc(x, N) for x in row] for row in data.Gamma]
    rec["Gamma0"] = None if data.Gamma0 is None else [[enc(x, N) for x in row] for row in data.Gamma0]
    rec["del_psi"] = [[enc(c, N) for c in cls.coords] for cls in data.del_psi]
    rec["certificates"] = _certs(data.certificates)
    rec["closed_forms"] = _closed_form_record(E, data, N)
    rec["passed"] = data.all_passed()
    return rec


def task_crystal(cfg) -> dict:
    return crystal_record(cfg, build_module(cfg))


def _sweep_one(args) -> dict:
    doc, a_enc, index = args
    cfg = config_mod.build(doc)
    R = cfg.ring()
    E = DrinfeldModule(R, [R.decode(x) for x in a_enc], cfg.base_poly)
    try:
        rec = crystal_record(cfg, E)
    except JetCharError as exc:
        rec = {"task": "crystal", "config": cfg.summary(), "module": _module_record(cfg, E),
               "error": f"{type(exc).__name__}: {exc}", "passed": False}
    rec["task"] = "sweep"
    rec["index"] = index
    return rec


def task_sweep(cfg) -> list[dict]:
    sw = cfg.sweep
    rng = random.Random(cfg.seed)
    R = cfg.ring()
    a1 = {"any": None, "unit": True, "nonunit": False}[sw["a1"]]
    jobs = []
    for i in range(sw["count"]):
        E = random_module(R, sw["rank"], rng, a1)
        jobs.append((cfg.raw, [x.encode() for x in E.a], i))
    if sw.get("jobs", 1) > 1:
        with ProcessPoolExecutor(max_workers=sw["jobs"]) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


CSV_FIELDS = ["index", "rank", "m", "canonical_lift", "lambda_residues", "gamma_valuation",
              "gamma_precision", "closed_lambda1_match", "closed_gamma_match", "passed"]


def sweep_csv(records: list[dict], cfg) -> str:
    R = cfg.ring()
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in records:
        row = {"index": rec["index"], "rank": rec["module"]["rank"], "passed": rec["passed"]}
        if "error" not in rec:
            lam = [R.decode(x) for x in rec["lambda"]]
            gamma = R.decode(rec["gamma"])
            cf = rec.get("closed_forms") or {}
            row.update({
                "m": rec["m"], "canonical_lift": rec["canonical_lift"],
                "lambda_residues": ";".join(R.field.encode(x.residue()) for x in lam),
                "gamma_valuation": "inf" if gamma.is_zero() else gamma.valuation(),
                "gamma_precision": rec["gamma_precision"],
                "closed_lambda1_match": cf.get("lambda1_match", ""),
                "closed_gamma_match": "" if cf.get("gamma_match") is None else cf["gamma_match"],
            })
        w.writerow(row)
    return buf.getvalue()


def task_selftest(cfg, stream) -> list[dict]:
    suite = AcceptanceSuite(SuiteConfig(seed=cfg.seed, precision=cfg.precision, pad=cfg.pad))
    results = suite.run_all(report=lambda r: print(r.line(), file=stream, flush=True))
    passed = sum(r.passed for r in results)
    print(f"selftest: {passed}/{len(results)} criteria passed", file=stream)
    return [{"task": "selftest", "criterion": r.number, "name": r.name, "passed": r.passed,
             "cases": r.cases, "failures": len(r.failures),
             "first_failure": r.failures[0] if r.failures else None} for r in results]


# ---------------------------------------------------------------- presentation

def _fmt(e: dict | None) -> str:
    if e is None:
        return "-"
    coeffs = e["c"]
    parts = []
    for k, c in enumerate(coeffs):
        if c.strip("0"):
            exp = e["v"] + k
            parts.append(f"[{c}]" + ("" if exp == 0 else "π" if exp == 1 else f"π^{exp}"))
    body = " + ".join(parts) or "0"
    return body + ("" if e["prec"] is None else f" + O(π^{e['prec']})")


def pretty(rec: dict) -> str:
    lines = []
    task = rec["task"]
    if task in ("crystal", "characters", "sweep"):
        head = f"{task}" + (f" #{rec['index']}" if "index" in rec else "")
        lines.append(f"{head}: rank {rec['module']['rank']}")
        if "error" in rec:
            lines.append(f"  error: {rec['error']}")
        else:
            lines.append(f"  splitting order m = {rec['m']}" + ("  (canonical lift)" if rec["canonical_lift"] else ""))
            for i, x in enumerate(rec["lambda"], start=1):
                lines.append(f"  λ_{i} = {_fmt(x)}")
            lines.append(f"  γ = {_fmt(rec['gamma'])}")
            for row in rec.get("Gamma") or []:
                lines.append("  Γ | " + " | ".join(_fmt(x) for x in row))
            cf = rec.get("closed_forms")
            if cf:
                lines.append(f"  closed forms ({cf['case']}): λ_1 ≡ {cf['lambda1']}, "
                             f"match λ_1={cf.get('lambda1_match')} γ={cf.get('gamma_match')}")
    elif task == "selftest":
        lines.append(f"criterion {rec['criterion']:2d} {rec['name']}: "
                     f"{'PASS' if rec['passed'] else 'FAIL'}")
    else:
        lines.append(f"{task}: {'PASS' if rec['passed'] else 'FAIL'}")
    for c in rec.get("certificates", []):
        mark = "ok " if c["passed"] else "BAD"
        lines.append(f"  [{mark}] {c['name']} (order {c['order']}, precision {c['precision']})")
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML run configuration")
    common.add_argument("--out", metavar="PATH", help="write JSON-lines records here")
    common.add_argument("--seed", type=int, metavar="U64", help="random seed")
    common.add_argument("--pretty", action="store_true", help="print a readable summary")
    common.add_argument("--max-order", type=int, metavar="n", help="largest jet order")
    common.add_argument("--precision", type=int, metavar="N", help="reported precision N")
    common.add_argument("--pad", type=int, metavar="k", help="extra internal precision")
    parser = argparse.ArgumentParser(prog="jetchar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="task", required=True)
    for task in config_mod.TASKS:
        sub.add_parser(task, parents=[common])
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = _parser().parse_args(argv)
    overrides = {"task": args.task, "seed": args.seed, "precision.N": args.precision,
                 "precision.pad": args.pad, "precision.max_order": args.max_order,
                 "output.path": args.out}
    try:
        cfg = config_mod.load(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    try:
        if cfg.task == "selftest":
            records = task_selftest(cfg, stdout)
        elif cfg.task == "sweep":
            records = task_sweep(cfg)
        else:
            fn = {"witt-check": task_witt_check, "jet-check": task_jet_check,
                  "characters": task_characters, "crystal": task_crystal}[cfg.task]
            records = [fn(cfg)]
    except ConfigError as exc:
        print(f"config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except CaseNotCovered as exc:
        print(f"not covered: {exc}", file=stderr)
        return EXIT_FAILED
    except JetCharError as exc:
        print(f"computation failed ({type(exc).__name__}): {exc}", file=stderr)
        return EXIT_FAILED

    text = "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in records)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif cfg.task != "selftest" and not args.pretty:
        stdout.write(text)
    if cfg.task == "sweep":
        csv_path = cfg.csv or (cfg.out.rsplit(".", 1)[0] + ".csv" if cfg.out else None)
        if csv_path:
            with open(csv_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(sweep_csv(records, cfg))
    if args.pretty and cfg.task != "selftest":
        for r in records:
            print(pretty(r), file=stdout)
    failed = [r for r in records if not r["passed"]]
    for r in failed:
        names = [c["name"] for c in r.get("certificates", []) if not c["passed"]]
        what = ", ".join(names) or r.get("error") or r.get("name") or "check failed"
        print(f"certification failed: {what}", file=stderr)
    return EXIT_FAILED if failed else EXIT_OK


def main() -> None:
    sys.exit(run())
