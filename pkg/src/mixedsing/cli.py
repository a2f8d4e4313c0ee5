"""Command-line front end: JSON job in, JSON or text report out.

    mixedsing <analysis> --input job.json [--diagram d.json] [--seed N] [--tol-cert X]
              [--strict] [--format json|text] [--out report.json] [--csv-dir DIR]

Exit codes: 0 pass, 1 fail (witness in the report), 2 inconclusive, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .classes import GammaInnError, check_semi, gamma_inn, semi_passes
from .deform import (DEFAULT_EPSILONS, DEFAULT_RADII, DeformationFamily, candidate_weights, classify_deformation,
                     coalescing_probe, conclusions, milnor_radius_probe)
from .link2 import LinkError, check_nice, link_invariants, make_convenient, nested_link
from .newton_geom import CFaceDiagram, GeometryError, Region, build_Dv, diagram_from_functionals, newton_boundary_of
from .nondegen import CheckConfig, PreconditionError, check_innd_2var, check_map
from .poly_core import MIXED, REAL, ParseError, PolynomialMap, as_fraction, fmt_rational, parse_mixed, support

ANALYSES = ("support", "diagram", "knd", "sknd", "iknd", "siknd", "innd", "semi", "gamma-inn", "dv",
            "deform", "nice", "link", "make-convenient")
EXIT = {"pass": 0, "fail": 1, "inconclusive": 2}
INPUT_ERROR = 3

# short quotations used as citation anchors per analysis
CITATIONS = {
    "knd": "for every strictly positive weight vector",
    "sknd": "for every strictly positive weight vector",
    "iknd": "for every inner face",
    "siknd": "for every inner face",
    "innd": "Inner Newton non-degenerate (INND)",
    "semi": "is SWH (resp. SRWH) of weight-type",
    "gamma-inn": "$D'+(\\R_{\\geq 0})^{2} \\subseteq D+(\\R_{\\geq 0})^{2}$",
    "dv": "there exists a unique inner face",
    "nice": "$V({f_{\\Delta}})\\cap (\\C^*)^{2}=\\emptyset$",
    "link": "$\\mathbf{L}(K_1,K_2)$ for the link",
    "make-convenient": "convenient KND mixed polynomial function",
}
THEOREM_CITATIONS = {
    "no-coalescing": "weak no coalescing of critical points",
    "inner-link-constancy": "the map $f_D$ is KND",
    "convenient-knd": "is convenient and KND",
    "semi-weighted": "is SWH (resp. SRWH) of weight-type",
    "inner-diagram": "link-constant along some neighborhood",
    "low-codimension": "weak no coalescing of critical points",
    "uniform-radius": "transversal to $\\rho^{-1}(\\epsilon)$",
}


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- config

TOLERANCE_KEYS = ("tol_w", "tol_cert", "starts", "max_iter", "zero_face_vacuous")
LINK_DEFAULTS = {"epsilon_scale": 0.1, "samples": 4096, "per_strand": 1024}


@dataclass(frozen=True)
class JobConfig:
    analysis: str
    map: tuple[str, ...]
    n: int
    kind: str = MIXED
    diagrams: tuple | None = None          # per component: tuple of functionals, each a tuple of "p/q"
    weight: tuple[int, ...] | None = None
    v: tuple[str, ...] | None = None
    deformation: dict | None = None
    link: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    strict: bool = False

    @classmethod
    def from_json(cls, data: Any, analysis: str | None = None) -> "JobConfig":
        if not isinstance(data, dict):
            raise InputError("config must be a JSON object")
        known = {f.name for f in fields(cls)} | {"polynomial"}
        extra = sorted(set(data) - known)
        if extra:
            raise InputError(f"unknown config keys: {extra}")
        analysis = analysis or data.get("analysis")
        if analysis not in ANALYSES:
            raise InputError(f"analysis must be one of {list(ANALYSES)}, got {analysis!r}")
        if "analysis" in data and data["analysis"] != analysis:
            raise InputError(f"analysis {data['analysis']!r} in config conflicts with command {analysis!r}")
        comps = data.get("map", data.get("polynomial"))
        if isinstance(comps, str):
            comps = [comps]
        if not isinstance(comps, list) or not comps or not all(isinstance(c, str) for c in comps):
            raise InputError("map: expected a polynomial string or a nonempty list of them")
        n = data.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise InputError("n: expected a positive integer")
        kind = data.get("kind", MIXED)
        if kind not in (MIXED, REAL):
            raise InputError("kind: expected 'mixed' or 'real'")
        diagrams = data.get("diagrams")
        if diagrams is not None:
            diagrams = _norm_diagrams(diagrams, n)
        weight = data.get("weight")
        if weight is not None:
            if not isinstance(weight, list) or len(weight) != n or not all(isinstance(x, int) and x > 0 for x in weight):
                raise InputError(f"weight: expected {n} positive integers")
            weight = tuple(weight)
        v = data.get("v")
        if v is not None:
            if not isinstance(v, list) or len(v) != n:
                raise InputError(f"v: expected {n} rationals")
            v = tuple(_rat(x, "v") for x in v)
        deformation = data.get("deformation")
        if deformation is not None:
            deformation = _norm_deformation(deformation, len(comps))
        elif analysis == "deform":
            raise InputError("deform: a 'deformation' block with 'theta' is required")
        link = dict(data.get("link") or {})
        bad = sorted(set(link) - set(LINK_DEFAULTS))
        if bad:
            raise InputError(f"link: unknown keys {bad}")
        link = {k: type(d)(link.get(k, d)) for k, d in LINK_DEFAULTS.items()}
        tol = dict(data.get("tolerances") or {})
        bad = sorted(set(tol) - set(TOLERANCE_KEYS))
        if bad:
            raise InputError(f"tolerances: unknown keys {bad}")
        base = CheckConfig()
        try:
            tol = {k: type(getattr(base, k))(tol.get(k, getattr(base, k))) for k in TOLERANCE_KEYS}
        except (TypeError, ValueError) as exc:
            raise InputError(f"tolerances: {exc}") from exc
        seed = data.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise InputError("seed: expected a nonnegative integer")
        return cls(analysis, tuple(comps), n, kind, diagrams, weight, v, deformation, link, tol, seed,
                   bool(data.get("strict", False)))

    def check_config(self) -> CheckConfig:
        base = CheckConfig()
        kw = {k: self.tolerances[k] for k in TOLERANCE_KEYS if k in self.tolerances}
        threads = int(os.environ.get("TOOL_THREADS", "1") or 1)
        return replace(base, seed=self.seed, threads=max(1, threads), **kw)

    def as_json(self) -> dict:
        out = asdict(self)
        out["map"] = list(self.map)
        if self.diagrams is not None:
            out["diagrams"] = [[list(l) for l in D] for D in self.diagrams]
        out["weight"] = list(self.weight) if self.weight is not None else None
        out["v"] = list(self.v) if self.v is not None else None
        return out


def _rat(x, where: str) -> str:
    try:
        return fmt_rational(as_fraction(x if not isinstance(x, float) else Fraction(x).limit_denominator(10**12)))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: bad rational {x!r}") from exc


def _norm_diagrams(diagrams, n: int) -> tuple:
    if not isinstance(diagrams, list) or not diagrams:
        raise InputError("diagrams: expected a list (one functional list per component)")
    out = []
    for j, D in enumerate(diagrams):
        if not isinstance(D, list) or not D:
            raise InputError(f"diagrams[{j}]: expected a nonempty list of functionals")
        Ls = []
        for k, l in enumerate(D):
            if not isinstance(l, list) or len(l) != n:
                raise InputError(f"diagrams[{j}][{k}]: expected {n} rationals")
            Ls.append(tuple(_rat(x, f"diagrams[{j}][{k}]") for x in l))
        out.append(tuple(Ls))
    return tuple(out)


def _norm_deformation(block, p: int) -> dict:
    if not isinstance(block, dict):
        raise InputError("deformation: expected an object")
    bad = sorted(set(block) - {"theta", "epsilon_kind", "epsilons", "radii", "probe"})
    if bad:
        raise InputError(f"deformation: unknown keys {bad}")
    theta = block.get("theta")
    if isinstance(theta, str):
        theta = [theta]
    if not isinstance(theta, list) or len(theta) != p or not all(isinstance(t, str) for t in theta):
        raise InputError(f"deformation.theta: expected {p} strings (one per component)")
    ek = block.get("epsilon_kind", REAL)
    if ek not in (REAL, "complex"):
        raise InputError("deformation.epsilon_kind: expected 'real' or 'complex'")
    eps = [float(x) for x in block.get("epsilons", DEFAULT_EPSILONS)]
    radii = [float(x) for x in block.get("radii", DEFAULT_RADII)]
    return {"theta": theta, "epsilon_kind": ek, "epsilons": eps, "radii": radii, "probe": bool(block.get("probe", False))}


# ---------------------------------------------------------------- serialization helpers

def clean(x):
    """JSON-safe, deterministic form of nested results."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return clean(x.tolist())
    if x is None or isinstance(x, str):
        return x
    if hasattr(x, "as_json"):
        return clean(x.as_json())
    return str(x)


def region_json(D: Region) -> dict:
    out = {"vertices": [[fmt_rational(c) for c in v] for v in D.vertices],
           "compact_faces": [f.as_json() for f in D.compact_facets],
           "principal_weights": [list(w) for w in D.principal_weights()],
           "convenient": D.convenient}
    if isinstance(D, CFaceDiagram):
        out["functionals"] = [[fmt_rational(c) for c in l.w] for l in D.functionals]
    return out


def _status_of(overall: str, strict: bool) -> str:
    return "fail" if strict and overall == "inconclusive" else overall


# ---------------------------------------------------------------- dispatch

def _parse_map(job: JobConfig) -> PolynomialMap:
    comps = []
    for j, text in enumerate(job.map):
        try:
            f = parse_mixed(text, job.n, job.kind)
        except ParseError as exc:
            raise InputError(f"map[{j}]: {exc}") from exc
        except ValueError as exc:
            raise InputError(f"map[{j}]: {exc}") from exc
        comps.append(f)
    return PolynomialMap(tuple(comps))


def _diagrams(job: JobConfig):
    if job.diagrams is None:
        return None
    try:
        return [diagram_from_functionals([tuple(Fraction(x) for x in l) for l in D]) for D in job.diagrams]
    except GeometryError as exc:
        raise InputError(f"diagrams: {exc}") from exc


def _single(fmap: PolynomialMap, what: str):
    if fmap.p != 1 or fmap.n != 2:
        raise InputError(f"{what} needs one polynomial in two variables")
    return fmap[0]


def _report_result(rep) -> tuple[str, dict]:
    return rep.overall, rep.as_json()


def run(job: JobConfig, csv_dir: str | None = None) -> tuple[dict, int]:
    """Run a job; returns the report and the exit code."""
    cfg = job.check_config()
    fmap = _parse_map(job)
    a = job.analysis
    cites = [CITATIONS[a]] if a in CITATIONS else []
    result: dict = {}
    try:
        if a == "support":
            status = "pass"
            result = {"supports": [sorted([fmt_rational(c) for c in p] for p in support(f)) for f in fmap]}
        elif a == "diagram":
            status = "pass"
            result = {"newton_boundaries": [region_json(newton_boundary_of(f)) for f in fmap]}
            Ds = _diagrams(job)
            if Ds:
                result["diagrams"] = [region_json(D) for D in Ds]
        elif a in ("knd", "sknd", "iknd", "siknd"):
            status, result = _report_result(check_map(fmap, a.upper(), _diagrams(job), cfg))
        elif a == "innd":
            status, result = _report_result(check_innd_2var(_single(fmap, "innd"), False, cfg))
        elif a == "semi":
            ws = [job.weight] if job.weight else _semi_candidates(fmap)
            reps = [check_semi(fmap, w, cfg) for w in ws]
            result = {"candidates": [list(w) for w in ws], "reports": [r.as_json() for r in reps]}
            ok = [r for r in reps if semi_passes(r)]
            status = ("pass" if any(r.overall == "pass" for r in ok) else "inconclusive" if ok else "fail")
        elif a == "gamma-inn":
            gi = gamma_inn(_single(fmap, "gamma-inn"), cfg)
            status = "pass" if gi.maximal else "inconclusive"
            result = {"diagram": region_json(gi.diagram), "principal_weights": [list(w) for w in gi.principal],
                      "maximal": gi.maximal, "alternatives": [region_json(D) for D in gi.alternatives],
                      "candidates": gi.candidates, "ikdn": gi.report.as_json() if gi.report else None}
        elif a == "dv":
            if fmap.p != 1 or fmap.n != 3:
                raise InputError("dv needs one polynomial in three variables")
            r = build_Dv(fmap[0], [Fraction(x) for x in job.v] if job.v else None)
            rep = check_map(fmap, "IKND", [r.diagram], cfg)
            status = "fail" if not r.axis_ok else rep.overall
            result = {"diagram": region_json(r.diagram), "v": [fmt_rational(x) for x in r.v],
                      "nonconvenient": list(r.nonconvenient), "hypotheses_ok": r.hypotheses_ok, "notes": list(r.notes),
                      "axis_ok": r.axis_ok,
                      "axis_violations": [{"face": x.face.as_json(), "I": sorted(x.I), "weight": list(x.weight)}
                                          for x in r.axis_violations],
                      "fills": [{"axis": x.i, "threshold": fmt_rational(x.threshold),
                                 "upper": fmt_rational(x.upper) if x.upper is not None else None,
                                 "v": fmt_rational(x.v), "unique": x.unique, "axis_ok": x.axis_ok,
                                 "fill_weight": [fmt_rational(c) for c in x.fill_weight]} for x in r.fills],
                      "ikdn": rep.as_json()}
        elif a == "deform":
            status, result, cites = _deform(job, fmap, cfg)
        elif a == "nice":
            f = _single(fmap, "nice")
            Ds = _diagrams(job)
            rep = check_nice(f, Ds[0] if Ds else None)
            status = "pass" if rep.nice else "fail"
            result = rep.as_json()
        elif a == "link":
            f = _single(fmap, "link")
            Ds = _diagrams(job)
            desc = nested_link(f, cfg, Ds[0] if Ds else None, job.link["samples"])
            inv = link_invariants(desc, job.link["epsilon_scale"], job.link["per_strand"])
            status = "inconclusive" if inv["undersampled"] else "pass"
            result = {"descriptor": desc.as_json(), "invariants": inv}
            if csv_dir:
                _dump_csv(desc, csv_dir)
        elif a == "make-convenient":
            steps = make_convenient(_single(fmap, "make-convenient"), cfg)
            status = "pass"
            result = {"steps": [s.as_json() for s in steps], "final": steps[-1].polynomial.to_text()}
        else:  # pragma: no cover - guarded by JobConfig
            raise InputError(f"unknown analysis {a}")
    except (GammaInnError, LinkError, PreconditionError, GeometryError) as exc:
        if isinstance(exc, InputError):
            raise
        status, result = "fail", {"error": type(exc).__name__, "message": str(exc)}
    status = _status_of(status, job.strict)
    code = EXIT[status]
    report = {"tool": "mixedsing", "version": __version__, "analysis": a, "status": status, "exit_code": code,
              "seed": job.seed, "config": job.as_json(), "citations": cites, "result": result}
    return clean(report), code


def _semi_candidates(fmap: PolynomialMap) -> list[tuple[int, ...]]:
    ws = candidate_weights(fmap)
    if not ws:
        raise PreconditionError("no candidate weight; pass 'weight' in the config")
    return ws


def _deform(job: JobConfig, fmap: PolynomialMap, cfg: CheckConfig):
    d = job.deformation
    try:
        fam = DeformationFamily.parse(list(job.map), d["theta"], job.n, job.kind, d["epsilon_kind"])
    except ParseError as exc:
        raise InputError(f"deformation.theta: {exc}") from exc
    probe = None
    out: dict = {}
    if d["probe"]:
        probe = milnor_radius_probe(fam, d["epsilons"], d["radii"], cfg)
        out["milnor_radius_probe"] = probe
        out["coalescing_probe"] = coalescing_probe(fam, d["epsilons"], d["radii"], cfg)
    reps = classify_deformation(fam, cfg, _diagrams(job), job.weight, probe)
    concl = conclusions(reps)
    out.update(family=fam.as_json(), theorems=[r.as_json() for r in reps], conclusions=concl)
    found = [c for r in reps for c in r.conclusions]
    status = ("pass" if any(c.status == "certified" for c in found) else "inconclusive" if found else "fail")
    cites = sorted({THEOREM_CITATIONS[r.theorem] for r in reps if r.conclusions})
    return status, out, cites


def _dump_csv(desc, csv_dir: str) -> None:
    Path(csv_dir).mkdir(parents=True, exist_ok=True)
    for p in desc.pieces:
        with open(Path(csv_dir) / f"{p.piece.name}.csv", "w", newline="", encoding="utf-8") as fh:
            p.curve.to_csv(fh)


# ---------------------------------------------------------------- rendering

def render(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    lines = [f"mixedsing {report['version']}  analysis={report['analysis']}  seed={report['seed']}",
             f"status: {report['status']} (exit {report['exit_code']})"]
    for c in report["citations"]:
        lines.append(f"cite: \"{c}\"")
    res = report["result"]
    if "error" in res:
        lines.append(f"error: {res['error']}: {res['message']}")
    for ob in res.get("obligations", []):
        v = ob["verdict"]
        extra = f"  samples={v['samples']} min_residual={v['min_residual']}" if "samples" in v else ""
        wit = f"  witness={v['witness']['point']}" if "witness" in v else ""
        lines.append(f"  {ob['label']} I={ob['I']} {ob['mode']}: {v['status']}{extra}{wit}")
    for th in res.get("theorems", []):
        lines.append(f"  [{th['theorem']}] {th['anchor']}")
        for h in th["hypotheses"]:
            lines.append(f"    {h['status']:<12} {h['name']}")
        for c in th["conclusions"]:
            lines.append(f"    => {c['kind']} ({c['scope']}, {c['status']})  cite: \"{THEOREM_CITATIONS[th['theorem']]}\"")
    if "invariants" in res:
        inv = res["invariants"]
        lines.append(f"  components={inv['components']} braids={inv['braids']} linking={inv['linking_matrix']}")
        lines.append(f"  component braids={inv['component_braids']} residual={inv['residual']:.2e}")
    if "steps" in res:
        for s in res["steps"]:
            lines.append(f"  {s['label']}: {s['polynomial']}")
    if not any(k in res for k in ("obligations", "theorems", "invariants", "steps", "error")):
        lines.append(json.dumps(res, sort_keys=True, indent=2, ensure_ascii=False))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _write_atomic(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".mixedsing-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path: str, what: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixedsing", description="Newton non-degeneracy, deformation and link checks.")
    ap.add_argument("analysis", choices=ANALYSES)
    ap.add_argument("--input", required=True, help="job JSON file, or - for stdin")
    ap.add_argument("--diagram", help="JSON file with a 'diagrams' list (overrides the job's)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol-cert", type=float)
    ap.add_argument("--strict", action="store_true", help="treat inconclusive as fail")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--csv-dir", help="dump traced strands as CSV (link analysis)")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = _load_json(args.input, "input")
        if not isinstance(data, dict):
            raise InputError("input: expected a JSON object")
        if args.diagram:
            dd = _load_json(args.diagram, "diagram")
            data["diagrams"] = dd.get("diagrams") if isinstance(dd, dict) else dd
        if args.seed is not None:
            data["seed"] = args.seed
        if args.tol_cert is not None:
            data.setdefault("tolerances", {})
            data["tolerances"] = dict(data["tolerances"], tol_cert=args.tol_cert)
        if args.strict:
            data["strict"] = True
        job = JobConfig.from_json(data, args.analysis)
        report, code = run(job, args.csv_dir)
    except InputError as exc:
        report = {"tool": "mixedsing", "version": __version__, "analysis": args.analysis, "status": "input-error",
                  "exit_code": INPUT_ERROR, "error": str(exc)}
        code = INPUT_ERROR
    out = render(report, args.format) if "result" in report else (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()
    if args.out:
        _write_atomic(args.out, out)
    else:
        sys.stdout.buffer.write(out)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
