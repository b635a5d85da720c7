"""Seeded case suites with self-verifying JSON reports.

A suite config names cases; each case runs one operation with its budgets
and a seed derived from the suite seed.  The report embeds a certificate per
case, and :func:`verify` re-checks every certificate from the report alone,
without repeating any search.
"""
from __future__ import annotations

import copy
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import arcs, cones, ellis, families, residues, trees, wreath
from .groups import FiniteGroup, is_homomorphism, standard_groups, table_is_group

FORMAT = "ellis-lab-report/1"
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
BUDGET_KEYS = ("window", "depth", "radius", "denominator", "n_max", "count", "per_group", "samples",
               "width", "max_size", "span", "battery")


class ConfigError(ValueError):
    pass


class MalformedCertificate(ValueError):
    pass


def dumps(data: Any) -> str:
    """The one serialisation used for reports, so equal reports are equal bytes."""
    return json.dumps(data, sort_keys=True, indent=1) + "\n"


def case_seed(seed: int, name: str) -> int:
    return random.Random(f"{seed}:{name}").getrandbits(63)


# -- configs ------------------------------------------------------------------------


@dataclass(frozen=True)
class Case:
    name: str
    op: str
    params: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)  # role -> parsed JSON


@dataclass(frozen=True)
class SuiteConfig:
    seed: int
    cases: tuple[Case, ...]

    @classmethod
    def from_json(cls, data: Any, root: Path | str = ".") -> SuiteConfig:
        root = Path(root)
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        seed = data.get("seed", 0)
        if not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed must be an integer in [0, 2^64)")
        cases = []
        names = set()
        for i, c in enumerate(data.get("cases", [])):
            if not isinstance(c, dict) or "op" not in c:
                raise ConfigError(f"case {i} needs an op")
            name = c.get("name", f"case-{i}")
            if name in names:
                raise ConfigError(f"duplicate case name {name!r}")
            names.add(name)
            if c["op"] not in OPS:
                raise ConfigError(f"case {name!r}: unknown op {c['op']!r}")
            params = dict(c.get("params", {}))
            for key in BUDGET_KEYS:
                if key in params and (not isinstance(params[key], int) or params[key] <= 0):
                    raise ConfigError(f"case {name!r}: budget {key} must be a positive integer")
            inputs = {}
            for role, rel in c.get("inputs", {}).items():
                path = root / rel
                try:
                    inputs[role] = json.loads(path.read_text())
                except FileNotFoundError:
                    raise ConfigError(f"case {name!r}: missing input {path}") from None
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"case {name!r}: {path} does not parse: {exc}") from None
            cases.append(Case(name, c["op"], params, inputs))
        return cls(seed, tuple(cases))

    @classmethod
    def from_file(cls, path: Path | str, seed: int | None = None) -> SuiteConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"no config at {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} does not parse: {exc}") from None
        if seed is not None and isinstance(data, dict):
            data = {**data, "seed": seed}
        return cls.from_json(data, path.parent)


# -- running ------------------------------------------------------------------------


@dataclass
class Report:
    data: dict
    timings: dict[str, float]

    def to_json(self, timings: bool = False) -> dict:
        if not timings:
            return self.data
        return {**self.data, "timing": {k: round(v, 3) for k, v in self.timings.items()}}

    def dumps(self, timings: bool = False) -> str:
        return dumps(self.to_json(timings))

    @property
    def ok(self) -> bool:
        return self.data["summary"][FAIL] == 0


def _run_case(case: Case, seed: int) -> tuple[dict, float]:
    runner = OPS[case.op][0]
    s = case_seed(seed, case.name)
    start = time.perf_counter()
    verdict, cert = runner(case.params, case.inputs, s)
    out = {"name": case.name, "op": case.op, "params": case.params, "seed": s,
           "verdict": verdict, "certificate": cert}
    # round-trip so the in-memory report equals the serialised one
    return json.loads(json.dumps(out)), time.perf_counter() - start


def run_suite(config: SuiteConfig, jobs: int = 1) -> Report:
    """Run every case; results keep config order whatever ``jobs`` is."""
    if jobs > 1 and len(config.cases) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_case, config.cases, [config.seed] * len(config.cases)))
    else:
        results = [_run_case(c, config.seed) for c in config.cases]
    cases = [r for r, _ in results]
    summary = {v: sum(c["verdict"] == v for c in cases) for v in (PASS, FAIL, INCONCLUSIVE)}
    data = {"format": FORMAT, "seed": config.seed, "cases": cases, "summary": summary}
    return Report(data, {c["name"]: t for c, (_, t) in zip(cases, results)})


def verify_cases(report: dict) -> dict[str, bool]:
    """Per-case result of re-checking the certificate and its verdict."""
    if not isinstance(report, dict) or report.get("format") != FORMAT or not isinstance(report.get("cases"), list):
        raise MalformedCertificate("not a suite report")
    out = {}
    for c in report["cases"]:
        try:
            op, verdict, cert, params = c["op"], c["verdict"], c["certificate"], c["params"]
        except (KeyError, TypeError):
            raise MalformedCertificate("case without op, verdict, params or certificate") from None
        if op not in OPS:
            raise MalformedCertificate(f"unknown op {op!r}")
        try:
            expect = OPS[op][1](params, cert)
        except MalformedCertificate:
            raise
        except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
            raise MalformedCertificate(f"case {c.get('name')!r}: {exc!r}") from None
        out[c.get("name", "")] = expect is not None and expect == verdict
    return out


def verify(report: dict) -> bool:
    """True iff every certificate re-checks and every verdict and the summary agree with it."""
    per_case = verify_cases(report)
    cases = report["cases"]
    summary = {v: sum(c["verdict"] == v for c in cases) for v in (PASS, FAIL, INCONCLUSIVE)}
    return all(per_case.values()) and report.get("summary") == summary


# -- finite Ellis battery ---------------------------------------------------------


def _ellis_battery(params, inputs, seed):
    groups = _groups_from(inputs.get("groups"))
    r = ellis.battery(groups, params.get("per_group", 50), seed, certificates=True)
    cert = {
        "groups": {name: [list(row) for row in g.table] for name, g in groups.items()},
        "per_group": params.get("per_group", 50),
        "failures": r["failures"],
        "cases": r["certificates"],
    }
    return (PASS if not r["failures"] else FAIL), cert


def _groups_from(data) -> dict[str, FiniteGroup]:
    if data is None:
        return standard_groups()
    return {g["name"]: FiniteGroup.from_json(g) for g in data}


def _check_ellis_battery(params, cert):
    groups = {name: FiniteGroup(t) for name, t in cert["groups"].items()}
    cases = cert["cases"]
    if len(cases) != cert["per_group"] * len(groups):
        return None
    failed = {(f["group"], f["index"]) for f in cert["failures"]}
    for c in cases:
        if not ellis.verify_ellis_certificate(groups[c["group"]], c["certificate"]):
            return None
    return PASS if not failed else FAIL


# -- residue sets -------------------------------------------------------------------------


def _union_of_dyadic_shells(n: int, chain) -> residues.PfSet:
    """The union over k < n of 2^(2k+1)(2Z+1)."""
    out = residues.PfSet.empty(chain)
    for k in range(n):
        out = out | residues.PfSet.residue_class(2 ** (2 * k + 1), 2 ** (2 * k + 2), chain)
    return out


def _a0_evidence(params, inputs, seed):
    window = params.get("window", 4096)
    a = residues.a0(params.get("depth", 24))
    rows = []
    ok = True
    for n in range(1, params.get("n_max", 8) + 1):
        b = a & a.translate(4**n)
        shells = bool(b.equals(_union_of_dyadic_shells(n, a.chain)))
        per = b.periods_in(-window, window)
        want = [t for t in range(-window, window + 1) if t % 4**n == 0]
        row = {"n": n, "set": b.to_json(), "equals_shells": shells, "period": b.period(),
               "periods_match": per == want, "period_count": len(per)}
        ok &= shells and per == want and row["period"] == 4**n
        rows.append(row)
    return (PASS if ok else FAIL), {"window": window, "rows": rows}


def _check_a0_evidence(params, cert):
    window = cert["window"]
    a = residues.a0(params.get("depth", 24))
    ok = len(cert["rows"]) == params.get("n_max", 8)
    for i, row in enumerate(cert["rows"]):
        n = row["n"]
        b = residues.PfSet.from_json(row["set"])
        if n != i + 1 or not b.equals(a & a.translate(4**n)):
            return None
        shells = bool(b.equals(_union_of_dyadic_shells(n, a.chain)))
        if shells != row["equals_shells"] or b.period() != row["period"]:
            return None
        count = 2 * (window // row["period"]) + 1
        if row["periods_match"] != (row["period"] == 4**n) or row["period_count"] != count:
            return None
        ok &= shells and row["periods_match"] and row["period"] == 4**n
    return PASS if ok else FAIL


def local_battery(radius: int, max_size: int, count: int, seed: int) -> list[tuple[int, ...]]:
    """``count`` distinct sets U in [-radius, radius], spread over sizes 1..max_size."""
    out: list[tuple[int, ...]] = []
    left = count
    for size in range(1, max_size + 1):
        quota = left // (max_size - size + 1)
        got = residues.bucket_battery(size, radius, quota, seed)
        out += got
        left -= len(got)
    return out


def _local_periodicity(params, inputs, seed):
    radius, max_size, count = params.get("radius", 64), params.get("max_size", 3), params.get("count", 500)
    a = residues.a0(params.get("depth", 24))
    rows = []
    verdict = PASS
    for u in local_battery(radius, max_size, count, seed):
        p = residues.per_set(a, u)
        cert = residues.genericity_certificate(p)
        n = residues.valuation_coset_exponent(u)
        contained = p.contains_coset(2**n, 2 ** (n + 1))
        rows.append({"u": list(u), "exponent": n, "coset_contained": contained, "certificate": cert.to_json()})
        if cert.verdict == residues.INCONCLUSIVE and verdict == PASS:
            verdict = INCONCLUSIVE
        if cert.verdict == residues.NOT_GENERIC or not contained:
            verdict = FAIL
    return verdict, {"radius": radius, "max_size": max_size, "count": count, "rows": rows}


def _check_local_periodicity(params, cert):
    radius, rows = cert["radius"], cert["rows"]
    if len(rows) != cert["count"] or len({tuple(r["u"]) for r in rows}) != len(rows):
        return None
    a = residues.a0(params.get("depth", 24))
    verdict = PASS
    for r in rows:
        u = r["u"]
        if not 1 <= len(u) <= cert["max_size"] or any(abs(x) > radius for x in u):
            return None
        g = residues.GenericityCertificate.from_json(r["certificate"])
        p = residues.per_set(a, u)
        n = residues.valuation_coset_exponent(u)
        if r["exponent"] != n or not residues.verify_certificate(p, g):
            return None
        if p.contains_coset(2**n, 2 ** (n + 1)) != r["coset_contained"]:
            return None
        if g.verdict == residues.INCONCLUSIVE and verdict == PASS:
            verdict = INCONCLUSIVE
        if g.verdict == residues.NOT_GENERIC or not r["coset_contained"]:
            verdict = FAIL
    return verdict


# -- coset trees -------------------------------------------------------------------------


def dyadic_oracle(k: int, bits: list[int]) -> int:
    """Value 0, 1, 0, ... by the first binary digit where k leaves the branch."""
    for n, b in enumerate(bits):
        if (k >> n) & 1 != b:
            return n % 2
    raise ValueError(f"{k} lies on the branch")


def _tree_battery(inputs, count, seed) -> list[trees.CosetTree]:
    named = [trees.CosetTree.from_json(t) for t in inputs.get("trees", {}).get("battery", [])]
    rng = random.Random(seed)
    return [trees.random_tree(rng) for _ in range(max(0, count - len(named)))] + named


def _tree_transformations(params, inputs, seed):
    window = params.get("window", 128)
    data = inputs.get("trees", {})
    dyadic = trees.CosetTree.from_json(data["dyadic"])
    ternary = trees.CosetTree.from_json(data["ternary"])
    bits = data["dyadic_bits"]
    dyadic_ok = all(dyadic.evaluate(k) == dyadic_oracle(k, bits) for k in range(-window, window + 1))
    battery = []
    ok = dyadic_ok
    for t in _tree_battery(inputs, params.get("battery", 20), seed):
        lin, red = trees.linearize(t), trees.reduce(t)
        row = {"tree": t.to_json(), "linear": lin.to_json(), "reduced": red.to_json()}
        row["agree"] = _tree_row_agrees(t, lin, red, window)
        ok &= row["agree"]
        battery.append(row)
    red3 = trees.reduce(ternary)
    period2 = _period_two(ternary, red3, window)
    ok &= period2
    cert = {"window": window, "dyadic": {"tree": data["dyadic"], "bits": bits, "matches": dyadic_ok},
            "battery": battery, "ternary": {"tree": data["ternary"], "reduced": red3.to_json(), "period_two": period2}}
    return (PASS if ok else FAIL), cert


def _tree_row_agrees(t, lin, red, window) -> bool:
    if t.validate() or lin.validate() or red.validate():
        return False
    if not lin.is_linear() or not trees.is_irreducible(red):
        return False
    for k in range(-window, window + 1):
        v = t.try_evaluate(k)
        if v is not None and not lin.evaluate(k) == red.evaluate(k) == v:
            return False
    return True


def _period_two(ternary, red, window) -> bool:
    if red.validate() or not trees.is_irreducible(red):
        return False
    vals = [red.evaluate(k) for k in range(-window, window + 1)]
    if vals != [k % 2 for k in range(-window, window + 1)]:
        return False
    return all(ternary.evaluate(k) == k % 2 for k in range(-window, window + 1))


def _check_tree_transformations(params, cert):
    window = cert["window"]
    d = cert["dyadic"]
    dyadic = trees.CosetTree.from_json(d["tree"])
    if dyadic.validate():
        return None
    matches = all(dyadic.evaluate(k) == dyadic_oracle(k, d["bits"]) for k in range(-window, window + 1))
    if matches != d["matches"] or len(cert["battery"]) != params.get("battery", 20):
        return None
    ok = matches
    for row in cert["battery"]:
        t, lin, red = (trees.CosetTree.from_json(row[k]) for k in ("tree", "linear", "reduced"))
        if _tree_row_agrees(t, lin, red, window) != row["agree"]:
            return None
        ok &= row["agree"]
    tern = cert["ternary"]
    p2 = _period_two(trees.CosetTree.from_json(tern["tree"]), trees.CosetTree.from_json(tern["reduced"]), window)
    if p2 != tern["period_two"]:
        return None
    return PASS if ok and p2 else FAIL


def _tree_validate(params, inputs, seed):
    t = trees.CosetTree.from_json(inputs["tree"])
    violations = [str(v) for v in t.validate(params.get("window", 4096))]
    return (FAIL if violations else PASS), {"tree": inputs["tree"], "violations": violations}


def _check_tree_validate(params, cert):
    t = trees.CosetTree.from_json(cert["tree"])
    violations = [str(v) for v in t.validate(params.get("window", 4096))]
    if violations != cert["violations"]:
        return None
    return FAIL if violations else PASS


# -- pattern families -----------------------------------------------------------------


def _chi_even(k: int) -> int:
    return int(k % 2 == 0)


def _chi_a0(k: int) -> int:
    return 0 if k == 0 else residues.v2(k) % 2


def _family_entries_ok(fam: families.PatternFamily, entries: list[dict], size_cap: int, span_cap: int) -> bool:
    """Each entry's k works and k - 1 does not, and the entries are all the cofinal patterns."""
    cands = families.candidates(fam, size_cap, span_cap)
    if [e["eta"] for e in entries] != [c.to_json() for c in cands]:
        return False
    for e, eta in zip(entries, cands):
        k = e["translates"]
        if k <= 0:
            return False
        if families.min_translates(fam, eta, k)[0] != k:
            return False
        if e["points"] != len(families.translate_set(eta.canonical().dom, k)):
            return False
    return True


def _tables(entries: list[dict]) -> tuple[dict, dict]:
    table: dict[str, int] = {}
    points: dict[str, int] = {}
    for e in entries:
        size = str(len(e["eta"]))
        table[size] = max(table.get(size, 0), e["translates"])
        points[size] = max(points.get(size, 0), e["points"])
    return table, points


def _families_round_trip(params, inputs, seed):
    span = params.get("span", 8)
    r_even, r_a0 = params.get("radius_even", 32), params.get("radius", 64)
    even = families.content(families.window_source(_chi_even, r_even), 2)
    usg = families.family_usg_check(even, (1, 2), span_cap=span)
    periods = families.family_periods(even)
    a0 = families.content(families.window_source(_chi_a0, r_a0), 3, span=span)
    a0_usg = families.family_usg_check(a0, (1, 2, 3), span_cap=span)
    even_ok = usg["passed"] and usg["report"].passed and max(usg["table"].values()) <= 2
    periods_ok = periods == [t for t in range(-(r_even // 2), r_even // 2 + 1) if t % 2 == 0]
    a0_ok = a0_usg["report"].passed and a0_usg["strictly_growing"]
    cert = {
        "even": {"radius": r_even, "span": span, "entries": usg["report"].entries,
                 "table": {str(k): v for k, v in usg["table"].items()}, "periods": periods,
                 "bounded_by_two": even_ok, "periods_are_even": periods_ok},
        "a0": {"radius": r_a0, "span": span, "entries": a0_usg["report"].entries,
               "table": {str(k): v for k, v in a0_usg["table"].items()},
               "strictly_growing": a0_usg["strictly_growing"]},
    }
    return (PASS if even_ok and periods_ok and a0_ok else FAIL), cert


def _check_families_round_trip(params, cert):
    ev, a = cert["even"], cert["a0"]
    even = families.content(families.window_source(_chi_even, ev["radius"]), 2)
    if not _family_entries_ok(even, ev["entries"], 2, ev["span"]):
        return None
    table, _ = _tables(ev["entries"])
    if table != ev["table"] or ev["bounded_by_two"] != (max(table.values(), default=0) <= 2):
        return None
    if families.family_periods(even) != ev["periods"]:
        return None
    half = ev["radius"] // 2
    if ev["periods_are_even"] != (ev["periods"] == [t for t in range(-half, half + 1) if t % 2 == 0]):
        return None
    fam = families.content(families.window_source(_chi_a0, a["radius"]), 3, span=a["span"])
    if not _family_entries_ok(fam, a["entries"], 3, a["span"]):
        return None
    table, _ = _tables(a["entries"])
    if table != a["table"]:
        return None
    vals = [table.get(str(b)) for b in (1, 2, 3)]
    growing = all(x is not None and y is not None and x < y for x, y in zip(vals, vals[1:]))
    if growing != a["strictly_growing"]:
        return None
    return PASS if ev["bounded_by_two"] and ev["periods_are_even"] and growing else FAIL


# -- wreath envelope -------------------------------------------------------------------


def _wreath_groups(inputs) -> list[FiniteGroup]:
    data = inputs.get("groups")
    if data is None:
        from .groups import cyclic, symmetric
        return [cyclic(2), cyclic(3), cyclic(4), symmetric(3)]
    return [FiniteGroup.from_json(g) for g in data]


def _wreath_ellis(params, inputs, seed):
    width = params.get("width", 8)
    exhaustive_up_to = params.get("exhaustive_order", 2)
    rows = []
    ok = True
    for g in _wreath_groups(inputs):
        flow = wreath.WreathFlow(g)
        elems = flow.ellis_group(wreath.TailPoint.constant(g.identity))
        t = flow.ellis_group_table()
        laws = wreath.law_report(g, width, exhaustive=g.order <= exhaustive_up_to,
                                 samples=params.get("samples", 200), seed=seed)
        rows.append({"group": g.to_json(), "elements": [e.to_json() for e in elems], "table": t["table"],
                     "isomorphism": t["isomorphism"], "laws": laws})
        ok &= t["isomorphic"] and laws["ok"]
    return (PASS if ok else FAIL), {"width": width, "exhaustive_order": exhaustive_up_to, "rows": rows}


def _check_wreath_ellis(params, cert):
    width = cert["width"]
    ok = True
    for row in cert["rows"]:
        g = FiniteGroup.from_json(row["group"])
        flow = wreath.WreathFlow(g)
        elems = [wreath.elem_from_json(e) for e in row["elements"]]
        table, iso = row["table"], row["isomorphism"]
        if len(elems) != len(table) or len(set(elems)) != len(elems):
            return None
        if not all(isinstance(e, wreath.Limit) for e in elems):
            return None
        index = {e: i for i, e in enumerate(elems)}
        if any(index.get(flow.compose(a, b)) != table[i][j]
               for i, a in enumerate(elems) for j, b in enumerate(elems)):
            return None
        if not table_is_group(table):
            return None
        good_iso = (isinstance(iso, list) and sorted(iso) == list(range(g.order))
                    and is_homomorphism(table, g.table, iso))
        laws = row["laws"]
        if laws["ok"] != (not any(laws["failures"].values())):
            return None
        if g.order <= cert["exhaustive_order"] and laws["bases"] != g.order ** (width + 1):
            return None
        ok &= good_iso and laws["ok"]
    return PASS if ok else FAIL


# -- free-group cones ---------------------------------------------------------------------


def _cones_two_generic(params, inputs, seed):
    radius = params.get("radius", 8)
    bat = cones.certificate_battery(params.get("count", 30), seed, radius)
    hand = []
    for entry in inputs.get("hand", []):
        a = cones.parse(entry["word"])
        b = cones.normalize(cones.basic_intersection([a], []))
        c = cones.two_generic_certificate(b, radius)
        hand.append({"word": entry["word"], "set": b.to_json(), "certificate": c.to_json(),
                     "exponent": cones.trailing_y_exponent(a)})
    ok = bat["ok"] and all(h["certificate"]["verified"] and h["certificate"]["n"] == abs(h["exponent"]) + 1
                           for h in hand)
    return (PASS if ok else FAIL), {"radius": radius, "battery": bat["cases"], "hand": hand}


def _check_cone_certificate(b: cones.ConeSet, c: dict, radius: int) -> bool:
    n = c["n"]
    if c["radius"] != radius or not b.member(()) or n < 0:
        return False
    if n == 0:
        return b.is_everything() and c["verified"]
    if not cones.contains_set(b, cones.y_cones(n)) or (n > 1 and cones.contains_set(b, cones.y_cones(n - 1))):
        return False
    shift = cones.parse(c["shift"])
    if shift != cones.power((cones.Y,), 2 * n - 1):
        return False
    ok, checked = cones.verify_cover(b, shift, radius)
    return ok == c["verified"] and checked == c["checked"] == cones.ball_size(radius)


def _check_cones_two_generic(params, cert):
    radius = cert["radius"]
    if len(cert["battery"]) != params.get("count", 30):
        return None
    ok = True
    for case in cert["battery"]:
        pos = [cones.parse(w) for w in case["positive"]]
        neg = [cones.parse(w) for w in case["negative"]]
        b = cones.ConeSet.from_json(case["set"])
        if b != cones.normalize(cones.basic_intersection(pos, neg)):
            return None
        if not _check_cone_certificate(b, case["certificate"], radius):
            return None
        if case["bound"] != cones.exponent_bound(pos, neg):
            return None
        ok &= case["certificate"]["verified"] and case["certificate"]["n"] <= case["bound"]
    for h in cert["hand"]:
        a = cones.parse(h["word"])
        b = cones.ConeSet.from_json(h["set"])
        if b != cones.normalize(cones.basic_intersection([a], [])):
            return None
        if not _check_cone_certificate(b, h["certificate"], radius):
            return None
        if h["exponent"] != cones.trailing_y_exponent(a):
            return None
        ok &= h["certificate"]["verified"] and h["certificate"]["n"] == abs(h["exponent"]) + 1
    return PASS if ok else FAIL


# -- circle regular opens --------------------------------------------------------------------


def _arcs_ro(params, inputs, seed):
    denom = params.get("denominator", 8)
    sweep = arcs.law_sweep(denom)
    tidy = arcs.tidy_round_trip(denom)
    circle = arcs.ellis_circle(params.get("ellis_denominator", 12))
    for r in (sweep, circle):
        r.pop("seconds", None)
    sweep.pop("backend", None)
    ok = sweep["ok"] and tidy["ok"] and circle["ok"]
    return (PASS if ok else FAIL), {"sweep": sweep, "tidy": tidy, "circle": circle,
                                    "spot_checks": params.get("samples", 200)}


def _laws_hold(x: arcs.ArcSet, y: arcs.ArcSet, z: arcs.ArcSet) -> bool:
    j, m, p = arcs.join, arcs.meet, arcs.perp
    return (j(x, y) == j(y, x) and m(x, y) == m(y, x)
            and j(j(x, y), z) == j(x, j(y, z)) and m(m(x, y), z) == m(x, m(y, z))
            and m(x, j(y, z)) == j(m(x, y), m(x, z)) and j(x, m(y, z)) == m(j(x, y), j(x, z))
            and j(x, m(x, y)) == x and m(x, j(x, y)) == x
            and j(x, p(x)) == arcs.ArcSet.full() and m(x, p(x)) == arcs.ArcSet.empty()
            and p(p(x)) == x)


def _check_arcs_ro(params, cert):
    sweep, tidy, circle = cert["sweep"], cert["tidy"], cert["circle"]
    singles = arcs.one_arc_sets(sweep["denominator"])
    if sweep["arcs"] != len(singles) or sweep["triples"] != len(singles) ** 3:
        return None
    if set(sweep["failures"]) != set(arcs.kernels.LAWS):
        return None
    if sweep["ok"] != (not any(sweep["failures"].values())):
        return None
    rng = random.Random(f"spot:{sweep['denominator']}")
    sets = [arcs.ArcSet.open(a, b) for a, b in singles]
    spot = all(_laws_hold(*(rng.choice(sets) for _ in range(3))) for _ in range(cert["spot_checks"]))
    if sweep["ok"] and not spot:
        return None
    tidy_counts = ("rho_after_d_plus", "rho_after_d_minus", "d_plus_after_rho", "not_half_open")
    if tidy["ok"] != all(tidy[k] == 0 for k in tidy_counts):
        return None
    tables_ok = True
    for m_str, t in circle["cyclic_tables"].items():
        m = int(m_str)
        table = t["table"]
        expect = [[(i + j) % m for j in range(m)] for i in range(m)]
        if t["table_ok"] != (table == expect) or len(table) != m:
            return None
        # spot-check a few entries against the germ definition
        for _ in range(min(4, m * m)):
            i, j = rng.randrange(m), rng.randrange(m)
            k = table[i][j]
            if not 0 <= k < m:
                return None
            p, q, target = (arcs.CircleType(Fraction(v, m)) for v in (i, j, k))
            if not all(arcs.star_holds(p, q, a) == target.holds(a) for a in arcs.probe_family(target.point, m)):
                return None
        tables_ok &= t["table_ok"] and t["isomorphic"]
    if sorted(map(int, circle["cyclic_tables"])) != list(range(1, circle["denominator"] + 1)):
        return None
    circle_ok = (not circle["mismatches"] and circle["plus_closed"] and circle["minus_lands_in_minus"]
                 and circle["identity"] and tables_ok)
    if circle_ok != circle["ok"]:
        return None
    return PASS if sweep["ok"] and tidy["ok"] and circle_ok else FAIL


OPS: dict[str, tuple[Callable, Callable]] = {
    "ellis.battery": (_ellis_battery, _check_ellis_battery),
    "zset.a0_evidence": (_a0_evidence, _check_a0_evidence),
    "zset.local_periodicity": (_local_periodicity, _check_local_periodicity),
    "tree.transformations": (_tree_transformations, _check_tree_transformations),
    "tree.validate": (_tree_validate, _check_tree_validate),
    "family.round_trip": (_families_round_trip, _check_families_round_trip),
    "wreath.ellis_group": (_wreath_ellis, _check_wreath_ellis),
    "cones.two_generic": (_cones_two_generic, _check_cones_two_generic),
    "arcs.ro_algebra": (_arcs_ro, _check_arcs_ro),
}


# -- mutation fuzzing ---------------------------------------------------------------------


def _case(report: dict, op: str) -> dict:
    for c in report["cases"]:
        if c["op"] == op:
            return c
    raise LookupError(op)


def _swap_rows(table: list[list[int]]) -> None:
    table[0], table[-1] = table[-1], table[0]


def _bump_entry(table: list[list[int]]) -> None:
    n = len(table)
    table[-1][-1] = (table[-1][-1] + 1) % n


def _m_ellis_table(r):
    _bump_entry(_case(r, "ellis.battery")["certificate"]["cases"][-1]["certificate"]["ellis_table"])


def _m_ellis_iso(r):
    cert = next(c["certificate"] for c in _case(r, "ellis.battery")["certificate"]["cases"]
                if len(c["certificate"]["iso"]) > 1)
    # the identity can no longer go to the identity
    cert["iso"][0], cert["iso"][1] = cert["iso"][1], cert["iso"][0]


def _m_shell_period(r):
    _case(r, "zset.a0_evidence")["certificate"]["rows"][2]["period"] *= 2


def _m_witness_translate(r):
    row = next(x for x in _case(r, "zset.local_periodicity")["certificate"]["rows"]
               if len(x["certificate"]["translates"]) > 1)
    row["certificate"]["translates"].pop()


def _m_witness_coset(r):
    row = _case(r, "zset.local_periodicity")["certificate"]["rows"][7]
    row["exponent"] += 2


def _m_tree_leaf(r):
    tree = _case(r, "tree.transformations")["certificate"]["battery"][0]["reduced"]
    node = tree
    while "children" in node:
        node = node["children"][0]
    node["value"] = 1 - node["value"]


def _m_family_period(r):
    _case(r, "family.round_trip")["certificate"]["even"]["periods"].append(1)


def _m_wreath_table(r):
    _swap_rows(_case(r, "wreath.ellis_group")["certificate"]["rows"][-1]["table"])


def _m_cone_exponent(r):
    _case(r, "cones.two_generic")["certificate"]["battery"][3]["certificate"]["n"] += 1


def _m_circle_table(r):
    tables = _case(r, "arcs.ro_algebra")["certificate"]["circle"]["cyclic_tables"]
    m = max(map(int, tables))
    table = tables[str(m)]["table"]
    table[1][m - 2] = (table[1][m - 2] + 1) % m


def _m_verdict(r):
    c = r["cases"][0]
    c["verdict"] = FAIL if c["verdict"] == PASS else PASS


MUTATIONS: dict[str, Callable[[dict], None]] = {
    "ellis_table_entry": _m_ellis_table,
    "ellis_isomorphism": _m_ellis_iso,
    "shell_period": _m_shell_period,
    "witness_translate": _m_witness_translate,
    "witness_coset": _m_witness_coset,
    "tree_leaf_value": _m_tree_leaf,
    "family_period": _m_family_period,
    "wreath_table_rows": _m_wreath_table,
    "cone_exponent": _m_cone_exponent,
    "circle_table_entry": _m_circle_table,
    "flipped_verdict": _m_verdict,
}


def mutate(report: dict, name: str) -> dict:
    """A deep copy of ``report`` with one certificate tampered by ``MUTATIONS[name]``."""
    out = copy.deepcopy(report)
    MUTATIONS[name](out)
    return out
