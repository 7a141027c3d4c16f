"""Run configured verification tasks and assemble a VerificationReport."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from . import __version__
from . import errors as E
from .cohomology import (
    UNDETERMINED,
    ct_crosscheck,
    full_unit_index,
    invariant_level,
    norm_image_level,
    prime_cyclic_subgroups,
)
from .config import LawSpec, ScenarioConfig
from .elliptic import (
    GOOD,
    WeierstrassCurve,
    check_isomorphism,
    norm_surjectivity_certificate,
    reduction_sequence_check,
    reduction_type,
    residue_group,
)
from .finite_field import FqDescriptor
from .formal_groups import (
    FormalGroupLaw,
    fgl_verify_axioms,
    hazewinkel_residual,
    lubin_tate_residual,
    make_law,
)
from .galois import galois_group
from .ramification import classify_ramification, herbrand_phi, ramification_filtration
from .tower import build_tower

TOOL = "localct"
ALL_PASS = "all-pass"
FAILED = "failures"

# tower -> ramification -> laws -> cohomology -> elliptic
ORDER = (
    "ramification",
    "formal-axioms",
    "invariant-levels",
    "norm-levels",
    "cohomology",
    "unit-index",
    "hazewinkel",
    "elliptic-certificates",
)

FORMULA_TAGS = {
    "units": "units-ct-theorem",
    "formal": "formal-ct-theorem",
    "invariants": "invariant-level-formula",
    "norm": "norm-level-ceil-phi",
    "unit-index": "unit-index-equals-e",
}

_CODES = {
    E.PrecisionLoss: "PRECISION-LOSS",
    E.NoConvergence: "NO-CONVERGENCE",
    E.DivideByZero: "DIVIDE-BY-ZERO",
    E.ConstructionError: "CONSTRUCTION",
    E.NotGalois: "NOT-GALOIS",
    E.BadHint: "BAD-HINT",
    E.ComposeError: "COMPOSE",
    E.BadFrobeniusLift: "BAD-FROBENIUS-LIFT",
    E.TooLarge: "TOO-LARGE",
    E.Unstable: "UNSTABLE",
    E.InternalInconsistency: "INTERNAL-INCONSISTENCY",
    E.SingularCurve: "SINGULAR-CURVE",
    E.LiftFailure: "LIFT-FAILURE",
    E.ParseError: "PARSE",
}


def error_code(exc: Exception) -> str:
    for cls in type(exc).__mro__:
        if cls in _CODES:
            return _CODES[cls]
    return "ERROR"


@dataclass
class TaskRecord:
    task: str
    status: str  # "pass" or "fail"
    results: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self, timing: bool = True) -> dict:
        d = {"task": self.task, "status": self.status, "results": self.results, "failures": self.failures}
        if timing:
            d["seconds"] = self.seconds
        return d


@dataclass
class VerificationReport:
    version: str
    precision: int
    seed: int
    tower: dict | None = None
    group_order: int | None = None
    tasks: list = field(default_factory=list)
    setup_failures: list = field(default_factory=list)
    tool: str = TOOL

    @property
    def failures(self) -> list:
        out = list(self.setup_failures)
        for t in self.tasks:
            out.extend(t.failures)
        return out

    @property
    def verdict(self) -> str:
        return ALL_PASS if not self.failures else FAILED

    @property
    def all_pass(self) -> bool:
        return self.verdict == ALL_PASS

    def task(self, name: str) -> TaskRecord:
        for t in self.tasks:
            if t.task == name:
                return t
        raise KeyError(name)

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "tool": self.tool,
            "version": self.version,
            "precision": self.precision,
            "seed": self.seed,
            "verdict": self.verdict,
            "tower": self.tower,
            "group_order": self.group_order,
            "setup_failures": self.setup_failures,
            "tasks": [t.to_dict(timing) for t in self.tasks],
            "failures": self.failures,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        tasks = [
            TaskRecord(t["task"], t["status"], t["results"], t["failures"], t.get("seconds", 0.0))
            for t in d["tasks"]
        ]
        return cls(
            d["version"], d["precision"], d["seed"], d.get("tower"), d.get("group_order"),
            tasks, d.get("setup_failures", []), d.get("tool", TOOL),
        )


# -- helpers --------------------------------------------------------------------------

def _failure(task: str, message: str, **where) -> dict:
    rec = {"task": task}
    rec.update({k: v for k, v in where.items() if v is not None})
    rec["message"] = message
    return rec


def build_law(spec: LawSpec, p: int, D: int) -> FormalGroupLaw | None:
    if spec.kind == "units":
        return None
    if spec.kind == "lubin-tate":
        return make_law("lubin-tate", D, p=p, pi=spec.pi, f=spec.f)
    if spec.kind == "elliptic":
        return make_law("elliptic", D, a=spec.a)
    return make_law(spec.kind, D)


def law_label(spec: LawSpec) -> str:
    if spec.kind == "lubin-tate":
        return f"lubin-tate(pi={spec.pi}, f={spec.f})"
    if spec.kind == "elliptic":
        return f"elliptic(a={spec.a})"
    return spec.kind


def random_point(tower, rng: random.Random, level: int = 1, digits: int = 8):
    """Random element of P_L^level with coefficients below p^digits (independent of N)."""
    num = [rng.randrange(tower.p**digits) for _ in range(tower.degree)]
    x = tower.element(num) * tower.pi_power(level)
    if x.valuation() == level:
        return x
    return x + tower.pi_power(level)


def _strip(obj):
    """Drop precision bookkeeping before comparing runs at two precisions."""
    if isinstance(obj, dict):
        return {k: _strip(v) for k, v in obj.items() if k not in ("precision", "seconds")}
    if isinstance(obj, list):
        return [_strip(v) for v in obj]
    return obj


class _Context:
    def __init__(self, cfg: ScenarioConfig, N: int):
        self.cfg = cfg
        ts = cfg.tower
        self.tower = build_tower(ts.p, ts.u, ts.e_poly, N)
        self.table = galois_group(self.tower, ts.hints)
        self.ram = ramification_filtration(self.table)
        self.laws = [(s, law_label(s), build_law(s, ts.p, cfg.degree_cap)) for s in cfg.laws]

    @property
    def totally_ramified_prime_cyclic(self) -> bool:
        G = frozenset(range(self.table.order))
        k = self.table.order
        prime = k > 1 and all(k % d for d in range(2, k))
        return self.tower.f == 1 and prime and self.table.is_cyclic(G)


# -- tasks ---------------------------------------------------------------------------------

def _task_ramification(ctx: _Context, rec: TaskRecord):
    ram = ctx.ram
    data = ram.to_json()
    data["record"] = "filtration"
    rec.results.append(data)
    for H in ctx.table.subgroups():
        if len(H) in (1, ctx.table.order):
            continue
        rH = ramification_filtration(ctx.table, H)
        rec.results.append({"record": "subgroup", "subgroup": sorted(H), "g": list(rH.g), "classification": classify_ramification(rH)})
        for i in range(len(ram.g)):
            inter = ram.members(i) & H
            if inter != rH.members(i):
                rec.failures.append(_failure(rec.task, "lower numbering does not restrict to the subgroup", subgroup=sorted(H), n=i))
    phi, psi = ram.phi, ram.psi
    checks = {"phi_sum_matches_integral": True, "phi_psi_identity": True, "psi_integral": True, "phi_le_id_le_psi": True}
    abelian = _abelian(ctx.table)
    for n in range(-1, 21):
        if herbrand_phi(ram, n) != phi(n):
            checks["phi_sum_matches_integral"] = False
        if phi(psi(n)) != n or psi(phi(n)) != n:
            checks["phi_psi_identity"] = False
        if not phi(n) <= n <= psi(n):
            checks["phi_le_id_le_psi"] = False
        if abelian and psi(n).denominator != 1:
            checks["psi_integral"] = False
    checks["abelian"] = abelian
    checks["record"] = "herbrand"
    rec.results.append(checks)
    for k, ok in checks.items():
        if ok is False and k != "abelian":
            rec.failures.append(_failure(rec.task, f"Herbrand check {k} failed"))


def _task_formal_axioms(ctx: _Context, rec: TaskRecord):
    for spec, label, law in ctx.laws:
        if law is None:
            continue
        rep = fgl_verify_axioms(law, ctx.cfg.degree_cap)
        out = {"law": label, **rep.to_json()}
        if spec.kind == "lubin-tate":
            res = lubin_tate_residual(law)
            out["frobenius_intertwined"] = res.is_zero()
            if not res.is_zero():
                rec.failures.append(_failure(rec.task, "law does not commute with its Frobenius series", law=label))
        rec.results.append(out)
        if not rep.passed:
            rec.failures.append(_failure(rec.task, f"axiom check failed at {rep.first_failure}", law=label))


def _abelian(table) -> bool:
    c = table.compose
    return all(c[a][b] == c[b][a] for a in range(table.order) for b in range(table.order))


def _subgroups_for_levels(ctx: _Context):
    G = frozenset(range(ctx.table.order))
    out = [G]
    for H in prime_cyclic_subgroups(ctx.table):
        if H != G:
            out.append(H)
    return out


def _task_invariant_levels(ctx: _Context, rec: TaskRecord):
    for spec, label, law in ctx.laws:
        for H in _subgroups_for_levels(ctx):
            for n in ctx.cfg.levels:
                r = invariant_level(ctx.table, law, n, H=H, budget=ctx.cfg.budget)
                out = {"law": label, "subgroup": sorted(H), "formula_tag": FORMULA_TAGS["invariants"], **r.to_json()}
                out["crosscheck"] = "pass" if r.agrees and r.stabilized else "fail"
                rec.results.append(out)
                if out["crosscheck"] == "fail":
                    rec.failures.append(_failure(rec.task, f"fixed-point level {r.brute} differs from formula {r.formula}", law=label, subgroup=sorted(H), n=n))


def _task_norm_levels(ctx: _Context, rec: TaskRecord):
    checkable = ctx.totally_ramified_prime_cyclic
    for spec, label, law in ctx.laws:
        for n in ctx.cfg.levels:
            r = norm_image_level(ctx.table, law, n, m_K=_norm_truncation(ctx, n))
            out = {"law": label, "formula_tag": FORMULA_TAGS["norm"], **r.to_json()}
            ok = r.stabilized
            if checkable and r.expected_level is not None:
                ok = ok and r.level == r.expected_level
                out["crosscheck"] = "pass" if ok else "fail"
            else:
                out["crosscheck"] = "pass" if ok else "fail"
                out["formula_tag"] = UNDETERMINED
            rec.results.append(out)
            if not ok:
                rec.failures.append(_failure(rec.task, f"norm image level {r.level} expected {r.expected_level}", law=label, n=n))


def _norm_truncation(ctx: _Context, n: int) -> int:
    import math

    from .cohomology import invariant_level_formula

    a = invariant_level_formula(n, ctx.ram.g0)
    need = max(math.ceil(herbrand_phi(ctx.ram, n)), a) + 2
    return max(ctx.cfg.norm_truncation, need)


def _task_cohomology(ctx: _Context, rec: TaskRecord):
    for spec, label, law in ctx.laws:
        tag = FORMULA_TAGS["units"] if law is None else FORMULA_TAGS["formal"]
        for n in ctx.cfg.levels:
            try:
                checks = ct_crosscheck(ctx.table, law, n, m=ctx.cfg.truncation, budget=ctx.cfg.budget)
            except E.Unstable as exc:
                rec.failures.append(_failure(rec.task, f"UNSTABLE: {exc}", law=label, n=n))
                continue
            for c in checks:
                out = c.to_json()
                out["law"] = label
                out["formula_tag"] = tag if c.verdict != UNDETERMINED else UNDETERMINED
                h = c.quotient.herbrand
                h2 = c.quotient_next.herbrand
                out["herbrand_quotient"] = str(h)
                rec.results.append(out)
                if h != 1 or h2 != 1:
                    rec.failures.append(_failure(rec.task, f"Herbrand quotient {h} of a finite module is not 1", law=label, subgroup=list(c.subgroup), n=n))
                if not c.passed:
                    rec.failures.append(_failure(
                        rec.task,
                        f"INTERNAL-INCONSISTENCY: verdict {c.verdict} but brute force is {out['brute_force']}"
                        + ("" if c.stabilized else " (unstabilized)"),
                        law=label, subgroup=list(c.subgroup), n=n,
                    ))


def _task_unit_index(ctx: _Context, rec: TaskRecord):
    G = frozenset(range(ctx.table.order))
    abelian = _abelian(ctx.table)
    r = full_unit_index(ctx.table, m_K=8)
    out = {"formula_tag": FORMULA_TAGS["unit-index"], "expected": ctx.ram.g0, **r.to_json()}
    ok = r.stabilized and (not abelian or r.index == ctx.ram.g0)
    out["crosscheck"] = "pass" if ok else "fail"
    rec.results.append(out)
    if not ok:
        rec.failures.append(_failure(rec.task, f"unit index {r.index} expected {ctx.ram.g0}"))


def _task_hazewinkel(ctx: _Context, rec: TaskRecord, rng: random.Random):
    samples = ctx.cfg.hazewinkel_samples
    for spec, label, law in ctx.laws:
        if law is None:
            continue
        bad = 0
        worst = None
        for i in range(samples):
            x = random_point(ctx.tower, rng)
            rep = hazewinkel_residual(ctx.table, law, x, e_H=ctx.ram.g0)
            if not rep.holds:
                bad += 1
                if worst is None:
                    worst = {"sample": i, **rep.to_json()}
                    worst["v_residual"] = str(worst["v_residual"])
                    worst["v_norm"] = str(worst["v_norm"])
                    worst["v_trace_ideal"] = str(worst["v_trace_ideal"])
        rec.results.append({"law": label, "samples": samples, "failures": bad, "first_failure": worst})
        if bad:
            rec.failures.append(_failure(rec.task, f"{bad} of {samples} points violate the congruence", law=label))


def _task_elliptic(ctx: _Context, rec: TaskRecord, seed: int):
    cs = ctx.cfg.curve
    curve = WeierstrassCurve.from_list(cs.a, minimal=cs.minimal, component_order=cs.component_order)
    t = ctx.tower
    rtype = reduction_type(curve, t.p)
    Gk = residue_group(curve, FqDescriptor.prime_field(t.p), budget=ctx.cfg.budget)
    G = residue_group(curve, t.residue_field, budget=ctx.cfg.budget)
    out = {"curve": curve.describe(), "reduction": rtype, "base_points": Gk.order, "residue_points": G.order}
    out["isomorphism_ok"] = check_isomorphism(G)
    if not out["isomorphism_ok"]:
        rec.failures.append(_failure(rec.task, "explicit isomorphism of the residue group failed"))
    lifts = reduction_sequence_check(t, curve, seed=seed)
    out["reduction_sequence"] = lifts.to_json()
    if not lifts.passed:
        rec.failures.append(_failure(rec.task, "reduction does not lift every residue point"))
    if t.e == 1 and t.f > 1:
        cert = norm_surjectivity_certificate(ctx.table, curve, n=1, seed=seed)
        cj = cert.to_json()
        out["certificate"] = cj
        out["residue_h0_order"] = cert.h0
        out["residue_hminus1_order"] = cert.hminus1
        if rtype == GOOD:
            if not cert.passed:
                rec.failures.append(_failure(rec.task, f"norm surjectivity certificate failed: {cert.witness}"))
            if cert.h0 != 1 or cert.hminus1 != 1:
                rec.failures.append(_failure(rec.task, "residue group cohomology does not vanish"))
    else:
        out["certificate"] = UNDETERMINED
    rec.results.append(out)


def _run_tasks(cfg: ScenarioConfig, N: int, rng_seed: int, timing: bool = True):
    ctx = _Context(cfg, N)
    rng = random.Random(rng_seed)
    records = []
    wanted = [t for t in ORDER if t in cfg.tasks]
    for name in wanted:
        rec = TaskRecord(name, "pass")
        start = time.perf_counter()
        try:
            if name == "ramification":
                _task_ramification(ctx, rec)
            elif name == "formal-axioms":
                _task_formal_axioms(ctx, rec)
            elif name == "invariant-levels":
                _task_invariant_levels(ctx, rec)
            elif name == "norm-levels":
                _task_norm_levels(ctx, rec)
            elif name == "cohomology":
                _task_cohomology(ctx, rec)
            elif name == "unit-index":
                _task_unit_index(ctx, rec)
            elif name == "hazewinkel":
                _task_hazewinkel(ctx, rec, rng)
            elif name == "elliptic-certificates":
                _task_elliptic(ctx, rec, rng_seed)
        except E.LocalCTError as exc:
            rec.failures.append(_failure(name, f"{error_code(exc)}: {exc}"))
        rec.seconds = round(time.perf_counter() - start, 4) if timing else 0.0
        if rec.failures:
            rec.status = "fail"
        records.append(rec)
    return ctx, records


def run_suite(cfg: ScenarioConfig, confirm_precision: bool = True) -> VerificationReport:
    """Execute the configured tasks; with ``confirm_precision`` everything is redone at N+8."""
    report = VerificationReport(__version__, cfg.precision, cfg.seed)
    if not cfg.tasks:
        if cfg.tower is not None:
            report.tower = dict(p=cfg.tower.p, u=list(cfg.tower.u), e_poly=list(cfg.tower.e_poly))
        return report
    try:
        ctx, records = _run_tasks(cfg, cfg.precision, cfg.seed)
    except E.LocalCTError as exc:
        report.setup_failures.append(_failure("tower", f"{error_code(exc)}: {exc}"))
        return report
    report.tower = ctx.tower.describe()
    report.group_order = ctx.table.order
    report.tasks = records
    if confirm_precision:
        try:
            _, again = _run_tasks(cfg, cfg.precision + 8, cfg.seed, timing=False)
        except E.LocalCTError as exc:
            report.setup_failures.append(_failure("tower", f"PRECISION-LOSS: rerun at N+8 failed: {error_code(exc)}: {exc}"))
            return report
        for a, b in zip(records, again):
            if _strip(a.to_dict(False)) != _strip(b.to_dict(False)):
                a.failures.append(_failure(a.task, f"PRECISION-LOSS: results change between N={cfg.precision} and N={cfg.precision + 8}"))
                a.status = "fail"
    return report


# -- output ------------------------------------------------------------------------------

def _text(r: VerificationReport) -> str:
    lines = [f"{r.tool} {r.version}  precision={r.precision}  seed={r.seed}  verdict={r.verdict}"]
    if r.tower:
        lines.append(f"tower: p={r.tower['p']} u={r.tower['u']} e_poly={r.tower['e_poly']} |G|={r.group_order}")
    for t in r.tasks:
        lines.append(f"[{t.status.upper()}] {t.task}: {len(t.results)} records, {len(t.failures)} failures, {t.seconds:.2f}s")
        for res in t.results:
            if "verdict" in res:
                lines.append(
                    f"    {res.get('law', '')} n={res['n']} H={res['subgroup']} m={res['m']} "
                    f"|H0|={res['h0_order']} |H-1|={res['hminus1_order']} verdict={res['verdict']} crosscheck={res['crosscheck']}"
                )
    for f in r.failures:
        where = " ".join(f"{k}={f[k]}" for k in ("law", "subgroup", "n") if k in f)
        lines.append(f"FAIL {f['task']} {where}: {f['message']}")
    return "\n".join(lines) + "\n"


def emit_report(r: VerificationReport, format: str = "json", timing: bool = True) -> str:
    if format == "json":
        return json.dumps(r.to_dict(timing), indent=2, sort_keys=True) + "\n"
    if format == "text":
        return _text(r)
    raise ValueError(f"unknown report format {format!r}")


def parse_report(text: str) -> VerificationReport:
    return VerificationReport.from_dict(json.loads(text))


def write_report(r: VerificationReport, path, format: str = "json") -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(emit_report(r, format))
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
