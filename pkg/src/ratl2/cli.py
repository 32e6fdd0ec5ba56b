"""Command line driver: ``ratl2 solve | verify | criterion | report``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
non-convergence (partial output is still written).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cauchy import TargetFunction, target_from_json, target_to_json
from .certify import (
    AsymptoticsReport,
    CriterionReport,
    SignedMeasureSamples,
    check_comparison_criterion,
    comparison_interpolant,
    pole_diagnostics,
    verify_strong_asymptotics,
)
from .config import DEFAULT, Tolerances, with_overrides
from .critical import CriticalPointRecord, multi_start
from .errors import ConditioningWarning, Ratl2Error

log = logging.getLogger("ratl2")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
MAX_DEGREE = 64


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    target: TargetFunction
    degrees: list
    starts: int = 20
    seed: int = 0
    tolerances: Tolerances = DEFAULT
    outputs: Path = Path("out")
    contour_radius: float = 2.0
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def hash(self) -> str:
        doc = {k: v for k, v in self.raw.items() if k != "outputs"}
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _degrees(value) -> list:
    if isinstance(value, dict):
        lo, hi = int(value.get("min", 1)), int(value["max"])
        out = list(range(lo, hi + 1))
    elif isinstance(value, int):
        out = [value]
    else:
        out = sorted({int(d) for d in value})
    if not out:
        raise UsageError("degrees: at least one degree required")
    if min(out) < 1 or max(out) > MAX_DEGREE:
        raise UsageError(f"degrees: values must lie in 1..{MAX_DEGREE}")
    return out


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from exc
    for key in ("target", "degrees"):
        if key not in raw:
            raise UsageError(f"config: missing field {key!r}")
    try:
        tol = with_overrides(raw.get("tolerances"))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"tolerances: {exc}") from exc
    try:
        target = target_from_json(raw["target"], tol)
    except (Ratl2Error, ValueError, KeyError) as exc:
        raise UsageError(f"target: {exc}") from exc
    starts = int(raw.get("starts", 20))
    if starts < 1:
        raise UsageError("starts: must be >= 1")
    seed = int(raw.get("seed", 0))
    if not 0 <= seed < 2**64:
        raise UsageError("seed: must be a 64-bit unsigned integer")
    base = Path(path).resolve().parent
    out = Path(raw.get("outputs", "out"))
    return ExperimentConfig(target, _degrees(raw["degrees"]), starts, seed, tol,
                            out if out.is_absolute() else base / out,
                            float(raw.get("contour_radius", 2.0)), raw)


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("RATL2_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# commands


def cmd_solve(cfg: ExperimentConfig) -> int:
    t0 = time.perf_counter()
    degrees, failed = {}, False
    for n in cfg.degrees:
        res = multi_start(cfg.target, n, cfg.starts, seed=cfg.seed, tol=cfg.tolerances, workers=_workers())
        failed |= bool(res.failures)
        degrees[str(n)] = {
            "records": [r.to_json() for r in res.records],
            "assignment": [None if a is None else int(a) for a in res.assignment],
            "failures": [[int(i), str(msg)] for i, msg in res.failures],
            "converged_fraction": res.converged_fraction,
            "index_audit": res.index_audit,
        }
        log.info("degree %d: %d distinct critical point(s), %d failure(s)", n, len(res.records), len(res.failures))
    run = {
        "config_hash": cfg.hash,
        "config": cfg.raw,
        "tool_version": __version__,
        "degrees": degrees,
        "wall_time": round(time.perf_counter() - t0, 3),
    }
    path = cfg.outputs / "runs" / f"{cfg.hash}.json"
    atomic_write(path, _dump(run))
    print(path)
    return EXIT_NUMERIC if failed else EXIT_OK


def load_run(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"run file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"run file is not valid JSON: {exc}") from exc


def best_records(run: dict) -> dict:
    """Lowest-value representative per degree."""
    out = {}
    for key, entry in run.get("degrees", {}).items():
        recs = [CriticalPointRecord.from_json(d) for d in entry.get("records", [])]
        if recs:
            out[int(key)] = min(recs, key=lambda r: r.value)
    return dict(sorted(out.items()))


def cmd_verify(cfg: ExperimentConfig, run_path) -> int:
    recs = best_records(load_run(run_path))
    if len(recs) < 2:
        raise UsageError("need ≥ 2 degrees in the run file")
    F = cfg.target
    a, b = F.interval
    asym = verify_strong_asymptotics(F, list(recs.values()), contour=cfg.contour_radius, tol=cfg.tolerances)
    m = F.rational.degree
    poles = pole_diagnostics(list(recs.values()), a, b, exclude=m)
    out = cfg.outputs
    atomic_write(out / "asymptotics.csv", asym.to_csv())
    atomic_write(out / "poles.csv", poles.to_csv())
    atomic_write(out / "verify.json", _dump({"asymptotics": asym.to_json(), "poles": poles.to_json()}))
    print(out / "asymptotics.csv")
    print(out / "poles.csv")
    return EXIT_OK


def cmd_criterion(cfg: ExperimentConfig, run_path, nu_path=None, self_check: bool = False) -> int:
    recs = best_records(load_run(run_path))
    F = cfg.target
    a, b = F.interval
    nu = None
    if nu_path is not None:
        try:
            nu = SignedMeasureSamples.from_json(json.loads(Path(nu_path).read_text()))
        except FileNotFoundError as exc:
            raise UsageError(f"nu file not found: {nu_path}") from exc
    rows = ["n,min_ratio,winding,passed"]
    reports = []
    status = EXIT_OK
    for n, rec in recs.items():
        if not rec.irreducible:
            log.warning("degree %d: reducible record skipped", n)
            rows.append(f"{n},nan,,skipped-reducible")
            continue
        try:
            Pi = rec if self_check else comparison_interpolant(F, rec, nu, tol=cfg.tolerances)
            rep = check_comparison_criterion(F, rec, Pi, tol=cfg.tolerances)
        except Ratl2Error as exc:
            log.warning("degree %d: %s", n, exc)
            rows.append(f"{n},nan,,error")
            status = EXIT_NUMERIC
            continue
        reports.append(rep)
        rows.append(CriterionReport.csv([rep]).splitlines()[1])
    out = cfg.outputs
    atomic_write(out / "criterion.csv", "\n".join(rows) + "\n")
    atomic_write(out / "criterion.json", _dump({"reports": [r.to_json() for r in reports]}))
    print(out / "criterion.csv")
    return status


def cmd_report(run_path, outdir) -> int:
    run = load_run(run_path)
    out = Path(outdir)
    pole_rows = ["n,index,re,im"]
    value_rows = ["n,distinct,value,grad_norm,morse_index,irreducible,converged_fraction"]
    for key in sorted(run.get("degrees", {}), key=int):
        entry = run["degrees"][key]
        recs = [CriticalPointRecord.from_json(d) for d in entry.get("records", [])]
        for j, rec in enumerate(sorted(recs, key=lambda r: r.value)):
            for p in rec.poles:
                pole_rows.append(f"{key},{j},{float(p.real)!r},{float(p.imag)!r}")
            mi = "" if rec.morse_index is None else str(rec.morse_index)
            value_rows.append(f"{key},{len(recs)},{rec.value!r},{rec.grad_norm!r},{mi},"
                              f"{str(rec.irreducible).lower()},{entry.get('converged_fraction', 0.0)!r}")
    atomic_write(out / "pole_locations.csv", "\n".join(pole_rows) + "\n")
    atomic_write(out / "critical_values.csv", "\n".join(value_rows) + "\n")
    summary = {"config_hash": run.get("config_hash"),
               "distinct_per_degree": {k: len(v.get("records", [])) for k, v in run.get("degrees", {}).items()}}
    atomic_write(out / "summary.json", _dump(summary))
    print(out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ratl2", description="Critical points of L2 rational approximation "
                                "to Cauchy transforms and their certification.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="multi-start critical point search")
    s.add_argument("-c", "--config", required=True)
    v = sub.add_parser("verify", help="strong asymptotics and pole diagnostics")
    v.add_argument("-c", "--config", required=True)
    v.add_argument("-r", "--run", required=True)
    c = sub.add_parser("criterion", help="comparison criterion per degree")
    c.add_argument("-c", "--config", required=True)
    c.add_argument("-r", "--run", required=True)
    c.add_argument("--nu", help="signed measure JSON (default: twice the arcsine distribution)")
    c.add_argument("--self-check", action="store_true", help="use L_q/q itself as the comparison interpolant")
    r = sub.add_parser("report", help="plot-ready tables from a run file")
    r.add_argument("-r", "--run", required=True)
    r.add_argument("-o", "--out", required=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    warnings.simplefilter("ignore", ConditioningWarning)
    np.seterr(all="ignore")
    try:
        if args.command == "report":
            return cmd_report(args.run, args.out)
        cfg = load_config(args.config)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.run)
        return cmd_criterion(cfg, args.run, args.nu, args.self_check)
    except UsageError as exc:
        print(f"ratl2: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Ratl2Error as exc:
        print(f"ratl2: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
