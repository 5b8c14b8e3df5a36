"""Config validation and job execution."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import registry as R
from .errors import ConfigError, PFuncError
from .grid import Field2
from .report import REPORT_SCHEMA, CheckReport, dumps

EXPECT_OUTCOMES = ("pass", "fail")
_JOB_KEYS = {"jobId", "equation", "pfunction", "fixture", "grid", "bc", "solver", "params", "checks",
             "outputs", "note"}


@dataclass
class CheckSpec:
    id: str
    tol: Optional[float] = None
    expect: str = "pass"
    note: Optional[str] = None


@dataclass
class JobSpec:
    job_id: str
    equation: Optional[str]
    pfunction: Optional[str]
    fixture: str
    checks: list
    grid: Optional[dict] = None
    bc: object = None
    solver: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    report_path: Optional[str] = None
    field_dump_dir: Optional[str] = None


def _where(text: str, needle: str) -> Optional[int]:
    """1-based line of the first occurrence of ``needle`` in the raw config text."""
    k = text.find(needle)
    return None if k < 0 else text.count("\n", 0, k) + 1


def parse_config(text: str) -> list:
    """Parse and validate a run config; raises ConfigError before any work happens."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("jobs"), list) or not doc["jobs"]:
        raise ConfigError("config must be an object with a non-empty 'jobs' list", field="jobs")
    jobs, seen = [], set()
    for n, raw in enumerate(doc["jobs"]):
        path = f"jobs[{n}]"
        if not isinstance(raw, dict):
            raise ConfigError("job must be an object", field=path)
        unknown = sorted(set(raw) - _JOB_KEYS)
        if unknown:
            raise ConfigError(f"unknown job keys {unknown}", field=path, line=_where(text, f'"{unknown[0]}"'))
        jid = raw.get("jobId")
        if not isinstance(jid, str) or not jid:
            raise ConfigError("jobId must be a non-empty string", field=f"{path}.jobId")
        if jid in seen:
            raise ConfigError(f"duplicate jobId {jid!r}", field=f"{path}.jobId", line=_where(text, f'"{jid}"'))
        seen.add(jid)
        for key, table in (("equation", R.EQUATIONS), ("pfunction", R.PFUNCTIONS), ("fixture", R.FIXTURES)):
            val = raw.get(key)
            if val is None and key != "fixture":
                continue
            if val not in table:
                raise ConfigError(f"unknown {key} id {val!r}", field=f"{path}.{key}",
                                  line=_where(text, f'"{val}"') if isinstance(val, str) else None)
        checks = []
        if not isinstance(raw.get("checks"), list) or not raw["checks"]:
            raise ConfigError("checks must be a non-empty list", field=f"{path}.checks")
        for k, c in enumerate(raw["checks"]):
            cpath = f"{path}.checks[{k}]"
            if isinstance(c, str):
                c = {"id": c}
            if not isinstance(c, dict) or c.get("id") not in R.CHECKS:
                cid = c.get("id") if isinstance(c, dict) else c
                raise ConfigError(f"unknown check id {cid!r}", field=cpath,
                                  line=_where(text, f'"{cid}"') if isinstance(cid, str) else None)
            tol = c.get("tol")
            if tol is not None and not (isinstance(tol, (int, float)) and tol > 0):
                raise ConfigError("tol must be a positive number", field=f"{cpath}.tol")
            expect = c.get("expect", "pass")
            if not isinstance(expect, str) or not (expect in EXPECT_OUTCOMES or expect[:1].isupper()):
                raise ConfigError("expect must be 'pass', 'fail' or an error code", field=f"{cpath}.expect")
            checks.append(CheckSpec(c["id"], None if tol is None else float(tol), expect, c.get("note")))
        outputs = raw.get("outputs") or {}
        jobs.append(JobSpec(jid, raw.get("equation"), raw.get("pfunction"), raw["fixture"], checks,
                            raw.get("grid"), raw.get("bc"), raw.get("solver") or {}, raw.get("params") or {},
                            outputs.get("reportPath"), outputs.get("fieldDumpDir")))
    return jobs


_RECORDED = (PFuncError, ValueError, ArithmeticError)


def _error_report(check_id: str, exc: Exception) -> CheckReport:
    err = exc.to_dict() if isinstance(exc, PFuncError) else {"error": type(exc).__name__, "message": str(exc)}
    return CheckReport(check_id, False, float("nan"), None, float("nan"), "ge", error=err)


def build_context(job: JobSpec) -> R.JobContext:
    eq = R.EQUATIONS[job.equation].build() if job.equation else None
    pspec = R.PFUNCTIONS[job.pfunction].build() if job.pfunction else None
    return R.JobContext(job.job_id, job.equation, eq, job.pfunction, pspec, job.fixture, job.params,
                        job.grid, job.bc, job.solver)


def prepare(job: JobSpec) -> R.JobContext:
    ctx = build_context(job)
    ctx.target, ctx.telemetry = R.FIXTURES[job.fixture].make(ctx)
    return ctx


def _met(rep: CheckReport, expect: str) -> bool:
    if expect == "pass":
        return rep.error is None and rep.passed
    if expect == "fail":
        return rep.error is None and not rep.passed
    return rep.error is not None and rep.error.get("error") == expect


def run_job(job: JobSpec) -> tuple:
    """Execute one job; returns (report dict, all expectations met)."""
    t0 = time.perf_counter()
    reports, ok = [], True
    try:
        ctx = prepare(job)
        setup_error = None
    except _RECORDED as exc:
        ctx, setup_error = None, exc
    for c in job.checks:
        if setup_error is not None:
            rep = _error_report(c.id, setup_error)
        else:
            try:
                rep = R.CHECKS[c.id].run(ctx, c.tol)
            except _RECORDED as exc:
                rep = _error_report(c.id, exc)
        met = _met(rep, c.expect)
        if not rep.vacuous:
            ok = ok and met
        d = rep.to_dict()
        d["id"] = c.id
        d["expect"] = c.expect
        d["met"] = met
        if c.note:
            d["note"] = c.note
        reports.append(d)
    out = {
        "schema": REPORT_SCHEMA,
        "jobId": job.job_id,
        "equation": job.equation,
        "pfunction": job.pfunction,
        "fixture": job.fixture,
        "solverTelemetry": None if ctx is None else ctx.telemetry,
        "checks": reports,
        "pass": ok,
        "wallTimeMs": round((time.perf_counter() - t0) * 1000.0, 3),
    }
    return out, ok, ctx


def run_config(text: str, base_dir: Path, out_dir: Optional[Path] = None, log=print) -> int:
    """Run every job in declared order and write one JSON report per job. Returns the exit status."""
    jobs = parse_config(text)
    status = 0
    for job in jobs:
        report, ok, ctx = run_job(job)
        path = Path(job.report_path) if job.report_path else Path(f"{job.job_id}.json")
        if not path.is_absolute():
            path = (out_dir or base_dir) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(report) + "\n")
        if job.field_dump_dir and ctx is not None and isinstance(ctx.target, Field2):
            ddir = Path(job.field_dump_dir)
            ddir = ddir if ddir.is_absolute() else (out_dir or base_dir) / ddir
            ddir.mkdir(parents=True, exist_ok=True)
            (ddir / f"{job.job_id}__u.csv").write_text(ctx.target.to_csv())
        log(f"{'ok  ' if ok else 'FAIL'} {job.job_id} -> {path}")
        if not ok:
            status = 1
    return status


def dump_field(text: str, job_id: str, check_id: str, out_dir: Path) -> Path:
    jobs = {j.job_id: j for j in parse_config(text)}
    if job_id not in jobs:
        raise ConfigError(f"no job {job_id!r} in config", field="jobId")
    job = jobs[job_id]
    if check_id not in {c.id for c in job.checks}:
        raise ConfigError(f"job {job_id!r} does not run check {check_id!r}", field="checks")
    ctx = prepare(job)
    dump = R.CHECKS[check_id].dump
    fld = dump(ctx) if dump is not None else ctx.target
    if not isinstance(fld, Field2):
        raise ConfigError(f"check {check_id!r} on fixture {job.fixture!r} has no 2D field to dump")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{job_id}__{check_id}.csv"
    path.write_text(fld.to_csv())
    return path
