"""JSON job files: parsing, name resolution and dispatch to the pipelines.

A job declares named objects (rings, maps, derivations, algebras, D-structures,
hypersurfaces, correspondences) and one task.  Running it yields a report whose
``status`` is one of ``found``, ``none``, ``refused`` or ``error``.
"""

from __future__ import annotations

import json
from types import SimpleNamespace
from dataclasses import dataclass, field
from typing import Any

from .differential import Derivation
from .doperators import (
    DRingStructure,
    TensorElement,
    FiniteAlgebra,
    difference_algebra,
    dual_numbers,
    is_totally_invariant_d_ideal,
    prop55_check,
    truncated,
)
from .errors import HypothesisRefused, InvkitError, ParseError
from .factor import is_certified_irreducible
from .fields import field_from_spec
from .invariants import search_common_invariant
from .polynomial import PolyRing
from .pipelines import (
    DynamicalSystem,
    SelfCorrespondence,
    cantat_search,
    corr_invariant_check,
    dvariety_search,
    frobenius_demo,
    jouanolou_search,
    totally_invariant_check,
)
from .rational import RationalFunction
from .varieties import (
    Hypersurface,
    PresentedRing,
    RationalMap,
    compare_pullbacks,
    proper_transform,
    pullback_divisor,
    scheme_inverse_image,
    set_inverse_closure,
)

__all__ = ["JobError", "Job", "parse_job", "run_job", "Report", "EXIT_CODES", "TASKS"]

TASKS = (
    "check-invariant",
    "pullback",
    "transform",
    "compare",
    "search-invariant",
    "search-integral",
    "d-check",
    "demo-frobenius",
)

EXIT_CODES = {"found": 0, "none": 2, "error": 3, "refused": 4}

STANDING_ASSUMPTIONS = [
    "multiplicative independence is decided modulo nonzero constants of the base field, not modulo its algebraic closure",
    "the base field is assumed relatively algebraically closed in the fraction field of the chart",
]


class JobError(InvkitError):
    """Schema, grammar or name-resolution failure, located by a JSON path."""

    def __init__(self, message: str, path: str = "", position: int | None = None):
        self.path = path
        self.position = position
        where = f" at {path}" if path else ""
        super().__init__(f"{message}{where}")


@dataclass
class Job:
    rings: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    derivations: dict = field(default_factory=dict)
    algebras: dict = field(default_factory=dict)
    dstructures: dict = field(default_factory=dict)
    hypersurfaces: dict = field(default_factory=dict)
    correspondences: dict = field(default_factory=dict)
    task: str = ""
    args: dict = field(default_factory=dict)
    assumptions: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)


@dataclass
class Report:
    task: dict
    status: str
    result: dict = field(default_factory=dict)
    certificate: dict | None = None
    diagnostics: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    error: dict | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> dict:
        out = {
            "task": self.task,
            "status": self.status,
            "result": self.result,
            "diagnostics": self.diagnostics,
            "assumptions": sorted(set(self.assumptions)),
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.error is not None:
            out["error"] = self.error
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# parsing


def _expect(obj, kind, path):
    if not isinstance(obj, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise JobError(f"expected {names}, got {type(obj).__name__}", path)
    return obj


def _lookup(table: dict, name, kind: str, path: str):
    if not isinstance(name, str) or name not in table:
        raise JobError(f"unknown {kind} {name!r}", path)
    return table[name]


def _expr(ring: PresentedRing, text, path: str):
    if isinstance(text, (int,)) and not isinstance(text, bool):
        text = str(text)
    _expect(text, str, path)
    try:
        return ring.poly.parse(text)
    except ParseError as exc:
        raise JobError(f"grammar error: {exc}", path, exc.position) from None


def _rational(ring: PresentedRing, obj, path: str) -> RationalFunction:
    if isinstance(obj, dict):
        num = _expr(ring, obj.get("num", "0"), path + ".num")
        den = _expr(ring, obj.get("den", "1"), path + ".den")
        if den.is_zero():
            raise JobError("zero denominator", path + ".den")
        return RationalFunction(num, den)
    return RationalFunction(_expr(ring, obj, path))


def _section(raw: dict, key: str) -> dict:
    sec = raw.get(key, {})
    return _expect(sec, dict, key)


def _build(path: str, fn):
    try:
        return fn()
    except JobError:
        raise
    except (InvkitError, ValueError, TypeError, KeyError, IndexError) as exc:
        raise JobError(str(exc), path) from None


def _parse_ring(name, spec, path):
    _expect(spec, dict, path)
    try:
        fld = field_from_spec(_expect(spec.get("field", "QQ"), str, path + ".field"))
    except InvkitError as exc:
        raise JobError(str(exc), path + ".field") from None
    variables = _expect(spec.get("vars"), list, path + ".vars")
    if not variables or not all(isinstance(v, str) for v in variables):
        raise JobError("vars must be a nonempty list of names", path + ".vars")
    probe = SimpleNamespace(poly=_build(path + ".vars", lambda: PolyRing(fld, variables)))
    rels = [_expr(probe, r, f"{path}.relations[{i}]") for i, r in enumerate(_expect(spec.get("relations", []), list, path + ".relations"))]
    inv = [_expr(probe, r, f"{path}.invert[{i}]") for i, r in enumerate(_expect(spec.get("invert", []), list, path + ".invert"))]
    return _build(path, lambda: PresentedRing(fld, variables, rels, inv, name=name))


def _parse_algebra(spec, path, fld):
    _expect(spec, dict, path)
    preset = spec.get("preset")
    if preset is not None:
        if preset == "dual":
            return _build(path, lambda: dual_numbers(fld))
        if preset == "truncated":
            return _build(path, lambda: truncated(int(spec.get("order", 2)), fld))
        if preset == "difference":
            return _build(path, lambda: difference_algebra(fld, int(spec.get("copies", 2))))
        raise JobError(f"unknown algebra preset {preset!r}", path + ".preset")
    dim = _expect(spec.get("dimension"), int, path + ".dimension")
    table = _expect(spec.get("table"), list, path + ".table")
    unit = spec.get("unit", [1] + [0] * (dim - 1))
    projections = _expect(spec.get("projections"), list, path + ".projections")
    if len(table) != dim:
        raise JobError("table must have one row per basis element", path + ".table")
    return _build(path, lambda: FiniteAlgebra(fld, table, unit, projections, name=spec.get("name", "B")))


def parse_job(data: bytes | str | dict) -> Job:
    """Parse and fully resolve a job; raises :class:`JobError` with a location."""
    if isinstance(data, dict):
        raw = data
    else:
        if isinstance(data, bytes):
            try:
                data = data.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise JobError(f"job file is not UTF-8: {exc}") from None
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as exc:
            raise JobError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    _expect(raw, dict, "$")
    job = Job(raw=raw)
    task = raw.get("task")
    if task not in TASKS:
        raise JobError(f"task must be one of {', '.join(TASKS)}; got {task!r}", "task")
    job.task = task
    job.args = _expect(raw.get("args", {}), dict, "args")

    for name, spec in _section(raw, "rings").items():
        job.rings[name] = _parse_ring(name, spec, f"rings.{name}")

    for name, spec in _section(raw, "maps").items():
        path = f"maps.{name}"
        _expect(spec, dict, path)
        src = _lookup(job.rings, spec.get("source"), "ring", path + ".source")
        tgt = _lookup(job.rings, spec.get("target"), "ring", path + ".target")
        images = _expect(spec.get("images"), list, path + ".images")
        imgs = [_rational(src, im, f"{path}.images[{i}]") for i, im in enumerate(images)]
        job.maps[name] = _build(path, lambda: RationalMap(src, tgt, imgs))

    for name, spec in _section(raw, "derivations").items():
        path = f"derivations.{name}"
        _expect(spec, dict, path)
        ring = _lookup(job.rings, spec.get("ring"), "ring", path + ".ring")
        images = _expect(spec.get("images"), list, path + ".images")
        imgs = [_rational(ring, im, f"{path}.images[{i}]") for i, im in enumerate(images)]
        job.derivations[name] = _build(path, lambda: Derivation(ring, imgs))

    for name, spec in _section(raw, "algebras").items():
        path = f"algebras.{name}"
        try:
            fld = field_from_spec(spec.get("field", "QQ")) if isinstance(spec, dict) else None
        except InvkitError as exc:
            raise JobError(str(exc), path + ".field") from None
        job.algebras[name] = _parse_algebra(spec, path, fld)

    for name, spec in _section(raw, "dstructures").items():
        path = f"dstructures.{name}"
        _expect(spec, dict, path)
        ring = _lookup(job.rings, spec.get("ring"), "ring", path + ".ring")
        alg = _lookup(job.algebras, spec.get("algebra"), "algebra", path + ".algebra")
        if alg.field != ring.field:
            raise JobError("algebra and ring have different fields", path)
        e_images = _expect(spec.get("e_images"), list, path + ".e_images")
        imgs = []
        for i, im in enumerate(e_images):
            _expect(im, list, f"{path}.e_images[{i}]")
            imgs.append([_rational(ring, c, f"{path}.e_images[{i}][{k}]") for k, c in enumerate(im)])
        job.dstructures[name] = _build(
            path, lambda: DRingStructure(ring, alg, [TensorElement(alg, c) for c in imgs])
        )

    for name, spec in _section(raw, "hypersurfaces").items():
        path = f"hypersurfaces.{name}"
        _expect(spec, dict, path)
        ring = _lookup(job.rings, spec.get("ring"), "ring", path + ".ring")
        factors = [_expr(ring, f, f"{path}.factors[{i}]") for i, f in enumerate(_expect(spec.get("factors"), list, path + ".factors"))]
        flags = spec.get("irreducible")
        if flags is None:
            flags = [is_certified_irreducible(f) for f in factors]
        else:
            _expect(flags, list, path + ".irreducible")
            for f, b in zip(factors, flags):
                if b and not is_certified_irreducible(f):
                    job.assumptions.append(f"irreducibility of {f} in {name} is asserted, not certified")
        job.hypersurfaces[name] = _build(path, lambda: Hypersurface(ring, factors, flags))

    for name, spec in _section(raw, "correspondences").items():
        path = f"correspondences.{name}"
        _expect(spec, dict, path)
        ring = _lookup(job.rings, spec.get("ring"), "ring", path + ".ring")
        if "graph_of" in spec:
            phi = _lookup(job.maps, spec["graph_of"], "map", path + ".graph_of")
            job.correspondences[name] = _build(path, lambda: SelfCorrespondence.graph(phi))
        else:
            rels = _expect(spec.get("relations"), list, path + ".relations")
            job.correspondences[name] = _build(
                path, lambda: SelfCorrespondence(ring, rels, finite_to_finite=bool(spec.get("finite_to_finite", False)))
            )
        job.assumptions.append(f"correspondence {name} is assumed irreducible (prime graph ideal)")
    return job


# ---------------------------------------------------------------------------
# dispatch


def _witnesses(job: Job, key: str = "witnesses") -> list[Hypersurface]:
    names = _expect(job.args.get(key, []), list, f"args.{key}")
    return [_lookup(job.hypersurfaces, n, "hypersurface", f"args.{key}[{i}]") for i, n in enumerate(names)]


def _map_and_h(job: Job):
    phi = _lookup(job.maps, job.args.get("map"), "map", "args.map")
    H = _lookup(job.hypersurfaces, job.args.get("hypersurface"), "hypersurface", "args.hypersurface")
    return phi, H


def _outcome(report: Report, outcome) -> Report:
    report.diagnostics.extend(outcome.diagnostics)
    if outcome.pruned:
        report.diagnostics.append({"stage": "pruning", "pruned": outcome.pruned})
    if outcome.certificate is not None and outcome.certificate.verified:
        report.status = "found"
        report.certificate = outcome.certificate.to_json()
    else:
        report.status = "none"
    return report


def _task_check_invariant(job: Job, report: Report):
    H = _lookup(job.hypersurfaces, job.args.get("hypersurface"), "hypersurface", "args.hypersurface")
    if "correspondence" in job.args:
        c = _lookup(job.correspondences, job.args["correspondence"], "correspondence", "args.correspondence")
        p1, p2 = c.projections
        ok = corr_invariant_check(c, H)
        report.result = {
            "transforms": [proper_transform(p1, H).to_json(), proper_transform(p2, H).to_json()],
            "invariant": ok,
        }
    else:
        phi = _lookup(job.maps, job.args.get("map"), "map", "args.map")
        t = proper_transform(phi, H)
        ok = totally_invariant_check(DynamicalSystem(phi), H)
        report.result = {"transform": t.to_json(), "invariant": ok}
    report.status = "found" if ok else "none"


def _task_pullback(job: Job, report: Report):
    phi, H = _map_and_h(job)
    scheme = scheme_inverse_image(phi, H)
    closure = set_inverse_closure(phi, H)
    report.result = {
        "scheme": scheme.basis_strings(),
        "set_closure": closure.to_json(),
        "divisor": pullback_divisor(phi, H).to_json(),
    }
    report.status = "found"


def _task_transform(job: Job, report: Report):
    phi, H = _map_and_h(job)
    t = proper_transform(phi, H)
    report.result = {"transform": t.to_json(), "empty": t.is_empty()}
    report.status = "none" if t.is_empty() else "found"


def _task_compare(job: Job, report: Report):
    phi, H = _map_and_h(job)
    c = compare_pullbacks(phi, H)
    report.result = c.to_json()
    report.status = "found" if c.agree else "none"


def _task_search_invariant(job: Job, report: Report):
    args = job.args
    ws = _witnesses(job)
    if "dstructure" in args:
        D = _lookup(job.dstructures, args["dstructure"], "dstructure", "args.dstructure")
        report.assumptions.append("associated endomorphisms are assumed injective")
        if not ws:
            report.status = "none"
            report.diagnostics.append({"stage": "input", "message": "no witnesses"})
            return
        _outcome(report, dvariety_search(D, ws))
    elif "maps" in args:
        names = _expect(args["maps"], list, "args.maps")
        if len(names) != 2:
            raise JobError("maps must name exactly two maps", "args.maps")
        f1 = _lookup(job.maps, names[0], "map", "args.maps[0]")
        f2 = _lookup(job.maps, names[1], "map", "args.maps[1]")
        _outcome(report, search_common_invariant([(f1, f2)], ws, f1.target))
    else:
        phi = _lookup(job.maps, args.get("map"), "map", "args.map")
        report.assumptions.append("generic fibres are assumed geometrically irreducible")
        _outcome(report, cantat_search(DynamicalSystem(phi), ws))


def _task_search_integral(job: Job, report: Report):
    delta = _lookup(job.derivations, job.args.get("derivation"), "derivation", "args.derivation")
    ws = _witnesses(job)
    _outcome(report, jouanolou_search(delta.ring, delta, ws))


def _task_d_check(job: Job, report: Report):
    D = _lookup(job.dstructures, job.args.get("dstructure"), "dstructure", "args.dstructure")
    if "hypersurface" in job.args:
        H = _lookup(job.hypersurfaces, job.args["hypersurface"], "hypersurface", "args.hypersurface")
        gens = [H.generator]
    else:
        gens_raw = _expect(job.args.get("ideal", []), list, "args.ideal")
        gens = [_expr(D.ring, g, f"args.ideal[{i}]") for i, g in enumerate(gens_raw)]
    a = is_totally_invariant_d_ideal(D, gens)
    b = prop55_check(D, gens)
    report.result = {"totally_invariant": a, "tensor_criterion": b, "ideal": [str(g) for g in gens]}
    if a != b:
        report.diagnostics.append({"stage": "consistency", "message": "operator and tensor criteria disagree"})
    report.status = "found" if a and b else "none"


def _task_demo_frobenius(job: Job, report: Report):
    p = job.args.get("p")
    if not isinstance(p, int) or isinstance(p, bool):
        raise JobError("p must be an integer", "args.p")
    try:
        demo = frobenius_demo(p)
    except InvkitError as exc:
        raise JobError(str(exc), "args.p") from None
    report.result = demo
    report.status = demo["cantat"]["status"]
    if report.status == "refused":
        report.diagnostics.append({"stage": "hypothesis", "message": demo["cantat"]["reason"]})


_CLAIMS = {
    "check-invariant": "the hypersurface is totally invariant",
    "pullback": "pullback computed",
    "transform": "the proper transform is nonempty",
    "compare": "the scheme-theoretic inverse image equals the proper transform",
    "d-check": "the ideal is a totally invariant D-ideal",
}

_DISPATCH = {
    "check-invariant": _task_check_invariant,
    "pullback": _task_pullback,
    "transform": _task_transform,
    "compare": _task_compare,
    "search-invariant": _task_search_invariant,
    "search-integral": _task_search_integral,
    "d-check": _task_d_check,
    "demo-frobenius": _task_demo_frobenius,
}


def _echo(raw: Any) -> dict:
    if isinstance(raw, dict):
        return {"name": raw.get("task"), "args": raw.get("args", {})}
    return {"name": None, "args": {}}


def _error(report: Report, exc: Exception, kind: str) -> Report:
    report.status = "error"
    info = {"type": kind, "message": str(exc)}
    path = getattr(exc, "path", None)
    if path:
        info["path"] = path
    pos = getattr(exc, "position", None)
    if pos is not None:
        info["position"] = pos
    details = getattr(exc, "details", None)
    if details:
        info["details"] = details
    report.error = info
    return report


def run_job(job: Job | bytes | str | dict) -> Report:
    """Run a job; never raises, every failure becomes a status."""
    raw = job.raw if isinstance(job, Job) else None
    if not isinstance(job, Job):
        try:
            raw = json.loads(job) if isinstance(job, (bytes, str)) else job
        except (json.JSONDecodeError, UnicodeDecodeError):
            raw = None
    report = Report(task=_echo(raw), status="error")
    try:
        if not isinstance(job, Job):
            job = parse_job(job)
        report.assumptions.extend(job.assumptions)
        if job.task.startswith("search"):
            report.assumptions.extend(STANDING_ASSUMPTIONS)
        _DISPATCH[job.task](job, report)
        if report.status == "found" and report.certificate is None:
            # boolean tasks: the claim was decided exactly, the result holds the evidence
            report.certificate = {"kind": job.task, "verified": True, "claim": _CLAIMS[job.task]}
    except JobError as exc:
        return _error(report, exc, "input")
    except HypothesisRefused as exc:
        report.status = "refused"
        report.error = None
        report.diagnostics.append({"stage": "hypothesis", "message": str(exc), "details": exc.details or {}})
    except InvkitError as exc:
        return _error(report, exc, type(exc).__name__)
    except (ValueError, TypeError, ZeroDivisionError, KeyError, IndexError, RecursionError) as exc:
        return _error(report, exc, type(exc).__name__)
    return report
