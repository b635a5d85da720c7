"""The ``ellis-lab`` command line.

Every command builds a JSON-serialisable result.  With ``--json`` it is
printed as JSON; otherwise a short human-readable view is derived from it.
Commands whose result carries a failed verdict exit with status 1.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import arcs, cones, ellis, families, residues, suite, trees, wreath
from .groups import FiniteGroup

FAILED = 1
BAD_INPUT = 2


class Ctx:
    def __init__(self, as_json: bool, seed: int, jobs: int):
        self.as_json = as_json
        self.seed = seed
        self.jobs = jobs


def _load(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise click.ClickException(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise click.ClickException(f"{path} is not JSON: {exc}") from None


def _emit(ctx: Ctx, result: dict, ok: bool = True, lines: list[str] | None = None) -> None:
    if ctx.as_json:
        click.echo(json.dumps(result, sort_keys=True, indent=1))
    else:
        for line in lines if lines is not None else _summary(result):
            click.echo(line)
    if not ok:
        sys.exit(FAILED)


def _summary(result: dict) -> list[str]:
    out = []
    for k, v in result.items():
        text = json.dumps(v)
        out.append(f"{k}: {text if len(text) <= 100 else text[:97] + '...'}")
    return out


@click.group()
@click.option("--json", "as_json", is_flag=True, help="Print results as JSON.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for every random choice.")
@click.option("--jobs", type=click.IntRange(1), default=1, show_default=True, help="Worker processes for suites.")
@click.pass_context
def main(ctx, as_json, seed, jobs):
    """Finite and windowed models of Ellis groups, generic sets and their certificates."""
    ctx.obj = Ctx(as_json, seed, jobs)


def _json_flag(f):
    """Accept ``--json`` after the subcommand as well as before it."""

    def callback(ctx, param, value):
        if value:
            ctx.find_object(Ctx).as_json = True

    return click.option("--json", "as_json_local", is_flag=True, expose_value=False, callback=callback,
                        help="Print results as JSON.")(f)


# -- zset --------------------------------------------------------------------------


def _pfset(path: str, depth: int | None) -> residues.PfSet:
    data = _load(path)
    named = data.get("named") if isinstance(data, dict) else None
    if named is not None:
        makers = {"a0": residues.a0, "a1": residues.a1}
        if named not in makers:
            raise click.ClickException(f"unknown named set {named!r}; use a0 or a1")
        return makers[named](depth or 24)
    try:
        return residues.PfSet.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise click.ClickException(f"bad set file: {exc}") from None


def _points(text: str) -> list[int]:
    try:
        return sorted({int(x) for x in text.split(",") if x.strip()})
    except ValueError:
        raise click.BadParameter("expected comma-separated integers") from None


@main.group()
def zset():
    """Exactly represented subsets of Z."""


def _zset_options(f):
    f = click.option("--depth", type=click.IntRange(1), default=None, help="Chain depth for named sets.")(f)
    f = click.option("--window", type=click.IntRange(1), default=256, show_default=True)(f)
    f = click.option("--set", "set_file", required=True, type=click.Path(), help="PfSet JSON file.")(f)
    return _json_flag(f)


@zset.command("member")
@_zset_options
@click.pass_obj
def zset_member(ctx, set_file, window, depth):
    """Members of the set in [-W, W]; deferred points are listed apart."""
    s = _pfset(set_file, depth)
    vals = s.window(-window, window)
    members = [k for k, v in zip(range(-window, window + 1), vals) if v == 1]
    unresolved = [k for k, v in zip(range(-window, window + 1), vals) if v is None]
    _emit(ctx, {"window": window, "members": members, "unresolved": unresolved})


@zset.command("per")
@_zset_options
@click.option("--u", "u_text", required=True, help="The finite set U, comma separated.")
@click.pass_obj
def zset_per(ctx, set_file, window, depth, u_text):
    """The U-periods of the set and their genericity certificate."""
    s = _pfset(set_file, depth)
    p = residues.per_set(s, _points(u_text))
    cert = residues.genericity_certificate(p)
    _emit(ctx, {"per_set": p.to_json(), "certificate": cert.to_json(), "verified": residues.verify_certificate(p, cert)})


@zset.command("generic")
@_zset_options
@click.pass_obj
def zset_generic(ctx, set_file, window, depth):
    """Genericity certificate for the set itself."""
    s = _pfset(set_file, depth)
    cert = residues.genericity_certificate(s)
    ok = residues.verify_certificate(s, cert)
    _emit(ctx, {"certificate": cert.to_json(), "verified": ok}, ok and cert.verdict != residues.NOT_GENERIC)


@zset.command("sg-report")
@_zset_options
@click.option("--max-size", type=click.IntRange(1), default=3, show_default=True)
@click.option("--samples", type=click.IntRange(1), default=40, show_default=True)
@click.pass_obj
def zset_sg_report(ctx, set_file, window, depth, max_size, samples):
    """Local periodicity on a seeded battery of U inside [-W, W]."""
    s = _pfset(set_file, depth)
    battery = [u for size in range(1, max_size + 1)
               for u in residues.bucket_battery(size, window, samples, ctx.seed)]
    rep = residues.strong_genericity_report(s, battery)
    result = {**rep.to_json(), "budget": {"window": window, "max_size": max_size, "samples": samples,
                                          "seed": ctx.seed}}
    _emit(ctx, result, rep.locally_periodic,
          [f"{len(rep.entries)} sets U checked; locally periodic on the battery: {rep.locally_periodic}"])


@zset.command("usg-probe")
@_zset_options
@click.option("--buckets", default="1,2,3", show_default=True, help="Sizes of U, comma separated.")
@click.option("--samples", type=click.IntRange(1), default=40, show_default=True)
@click.pass_obj
def zset_usg_probe(ctx, set_file, window, depth, buckets, samples):
    """Witness counts per |U| bucket, as evidence about uniformity."""
    s = _pfset(set_file, depth)
    _emit(ctx, residues.usg_probe(s, _points(buckets), window, samples, ctx.seed))


# -- tree ---------------------------------------------------------------------------------


@main.group()
def tree():
    """Valued trees of cosets."""


def _tree(path: str) -> trees.CosetTree:
    try:
        return trees.CosetTree.from_json(_load(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise click.ClickException(f"bad tree file: {exc}") from None


def _tree_options(f):
    f = click.option("--tree", "tree_file", required=True, type=click.Path(), help="Tree JSON file.")(f)
    return _json_flag(f)


@tree.command("validate")
@_tree_options
@click.option("--window", type=click.IntRange(1), default=4096, show_default=True)
@click.pass_obj
def tree_validate(ctx, tree_file, window):
    """Check the tree axioms on [-W, W] and list any violations."""
    t = _tree(tree_file)
    violations = [str(v) for v in t.validate(window)]
    _emit(ctx, {"valid": not violations, "violations": violations}, not violations,
          violations or ["valid"])


@tree.command("eval")
@_tree_options
@click.option("--window", type=click.IntRange(1), default=128, show_default=True)
@click.pass_obj
def tree_eval(ctx, tree_file, window):
    """The founded function on [-W, W]; points on an infinite branch give null."""
    t = _tree(tree_file)
    vals = {str(k): t.try_evaluate(k) for k in range(-window, window + 1)}
    _emit(ctx, {"window": window, "values": vals},
          lines=["".join("." if v is None else str(v) for v in vals.values())])


@tree.command("linearize")
@_tree_options
@click.pass_obj
def tree_linearize(ctx, tree_file):
    """An equivalent tree whose subgroup depends only on depth."""
    _emit(ctx, trees.linearize(_tree(tree_file)).to_json())


@tree.command("reduce")
@_tree_options
@click.pass_obj
def tree_reduce(ctx, tree_file):
    """Collapse subtrees with constant leaf values."""
    _emit(ctx, trees.reduce(_tree(tree_file)).to_json())


@tree.command("chain")
@_tree_options
@click.option("--depth", type=click.IntRange(1), default=8, show_default=True)
@click.pass_obj
def tree_chain(ctx, tree_file, depth):
    """Bounded evidence of non-periodicity along an infinite branch."""
    t = _tree(tree_file)
    try:
        ev = trees.nonperiodicity_chain(t, depth)
    except (trees.ChainExhausted, trees.DepthBudgetExceeded) as exc:
        _emit(ctx, {"verdict": "inconclusive", "reason": str(exc), "depth": depth})
        return
    ok = trees.verify_chain(t, ev)
    _emit(ctx, {"verdict": "chain", "depth": depth, "evidence": ev.to_json(), "verified": ok}, ok)


# -- ellis --------------------------------------------------------------------------------


@main.group("ellis")
def ellis_group():
    """Ellis semigroups of finite group algebras."""


def _group(path: str) -> FiniteGroup:
    try:
        return FiniteGroup.from_json(_load(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise click.ClickException(f"bad group file: {exc}") from None


@ellis_group.command("finite")
@click.option("--group", "group_file", required=True, type=click.Path(), help="Group JSON file.")
@click.option("--seeds", "seeds_file", required=True, type=click.Path(), help="List of seed subsets.")
@click.option("--two-sided", is_flag=True, help="Close under right translations too.")
@_json_flag
@click.pass_obj
def ellis_finite(ctx, group_file, seeds_file, two_sided):
    """Every finite-scale check for the algebra generated by the seeds."""
    g = _group(group_file)
    seeds = _load(seeds_file)
    if not isinstance(seeds, list) or any(not isinstance(s, (list, int)) for s in seeds):
        raise click.ClickException("seeds must be a list of element lists")
    checks, cert = ellis.finite_case(g, seeds, two_sided)
    ok = all(checks.values()) and ellis.verify_ellis_certificate(g, cert)
    _emit(ctx, {"checks": checks, "certificate": cert, "ok": ok}, ok,
          [f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items()])


# -- family -----------------------------------------------------------------------------


@main.group()
def family():
    """Families of finite partial patterns on Z."""


def _family(path: str) -> families.PatternFamily:
    try:
        return families.PatternFamily.from_json(_load(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise click.ClickException(f"bad family file: {exc}") from None


def _family_options(f):
    f = click.option("--family", "family_file", required=True, type=click.Path(), help="Family JSON file.")(f)
    return _json_flag(f)


@family.command("check")
@_family_options
@click.option("--size-cap", type=click.IntRange(1), default=2, show_default=True)
@click.option("--span-cap", type=click.IntRange(1), default=8, show_default=True)
@click.pass_obj
def family_check(ctx, family_file, size_cap, span_cap):
    """Strong genericity check with a witness for every pattern in budget."""
    rep = families.family_sg_check(_family(family_file), size_cap, span_cap)
    _emit(ctx, rep.to_json(), rep.passed)


@family.command("usg")
@_family_options
@click.option("--buckets", default="1,2", show_default=True)
@click.option("--span-cap", type=click.IntRange(1), default=8, show_default=True)
@click.pass_obj
def family_usg(ctx, family_file, buckets, span_cap):
    """Translate counts per pattern-size bucket, to test uniformity."""
    r = families.family_usg_check(_family(family_file), _points(buckets), span_cap)
    result = {**r, "report": r["report"].to_json()}
    result["table"] = {str(k): v for k, v in r["table"].items()}
    result["point_table"] = {str(k): v for k, v in r["point_table"].items()}
    _emit(ctx, result, r["passed"])


@family.command("periods")
@_family_options
@click.option("--bound", type=click.IntRange(1), default=None)
@click.pass_obj
def family_periods_cmd(ctx, family_file, bound):
    """Shifts that preserve the family within the bound."""
    _emit(ctx, {"periods": families.family_periods(_family(family_file), bound)})


@family.command("limit")
@_family_options
@click.option("--window", type=click.IntRange(1), default=12, show_default=True)
@click.option("--cap", type=click.IntRange(1), default=3, show_default=True)
@click.pass_obj
def family_limit(ctx, family_file, window, cap):
    """Search for a limit point of the family and verify it."""
    fam = _family(family_file)
    try:
        lp = families.limit_point(fam, window, cap)
    except families.NoLimitPointWithinBudget as exc:
        _emit(ctx, {"verdict": "inconclusive", "reason": str(exc)})
        return
    _emit(ctx, {**lp.to_json(), "verified": families.verify_limit_point(fam, lp)})


@family.command("content")
@click.option("--source", "source_file", required=True, type=click.Path(),
              help='JSON {"lo": L, "bits": [...]} of a windowed assignment.')
@click.option("--bound", type=click.IntRange(1), default=2, show_default=True)
@click.option("--span", type=click.IntRange(1), default=None)
@_json_flag
@click.pass_obj
def family_content(ctx, source_file, bound, span):
    """The content family of a windowed 0/1 assignment."""
    d = _load(source_file)
    try:
        src = families.PartialPattern.interval(int(d["lo"]), [int(b) for b in d["bits"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise click.ClickException(f"bad source file: {exc}") from None
    fam = families.content(src, bound, span)
    _emit(ctx, fam.to_json(), lines=[f"{len(fam.members)} patterns, radius {fam.radius}"])


# -- wreath --------------------------------------------------------------------------------


@main.group("wreath")
def wreath_group():
    """The enveloping semigroup of the finitary wreath flow."""


@wreath_group.command("table")
@click.option("--group", "group_file", required=True, type=click.Path(), help="Group JSON file.")
@_json_flag
@click.pass_obj
def wreath_table(ctx, group_file):
    """The Ellis group composition table and whether it is isomorphic to the group."""
    g = _group(group_file)
    r = wreath.WreathFlow(g).ellis_group_table()
    lines = [" ".join(map(str, row)) for row in r["table"]] + [f"isomorphic: {r['isomorphic']}"]
    _emit(ctx, r, r["isomorphic"], lines)


# -- cones ------------------------------------------------------------------------------------


@main.group("cones")
def cones_group():
    """Boolean combinations of cones in the free group on x, y."""


@cones_group.command("cert")
@click.option("--expr", "expr_file", required=True, type=click.Path(), help="Expression JSON file.")
@click.option("--radius", type=click.IntRange(0), default=8, show_default=True)
@click.option("--budget", type=click.IntRange(1), default=64, show_default=True, help="Word-length budget.")
@_json_flag
@click.pass_obj
def cones_cert(ctx, expr_file, radius, budget):
    """Normal form of an expression and its 2-genericity certificate."""
    expr = _load(expr_file)
    try:
        b = cones.normalize(expr, budget)
    except cones.DepthBudgetExceeded as exc:
        _emit(ctx, {"verdict": "inconclusive", "reason": str(exc), "budget": budget})
        return
    except (KeyError, ValueError, TypeError) as exc:
        raise click.ClickException(f"bad expression: {exc}") from None
    try:
        cert = cones.two_generic_certificate(b, radius)
    except cones.NotApplicable as exc:
        _emit(ctx, {"set": b.to_json(), "verdict": "not-applicable", "reason": str(exc)})
        return
    result = {"set": b.to_json(), "normal_form": str(b), "certificate": cert.to_json()}
    _emit(ctx, result, cert.verified,
          [f"set: {b}", f"n = {cert.n}, shift = {cones.show(cert.shift) or 'e'}, "
                        f"cover verified on {cert.checked} words: {cert.verified}"])


# -- arcs ----------------------------------------------------------------------------------------


@main.group("arcs")
def arcs_group():
    """Regular open sets of the circle."""


@arcs_group.command("ellis")
@click.option("--denom", type=click.IntRange(1), default=12, show_default=True)
@_json_flag
@click.pass_obj
def arcs_ellis(ctx, denom):
    """Star products of rotation types against rotation addition."""
    r = arcs.ellis_circle(denom)
    r.pop("seconds", None)
    _emit(ctx, r, r["ok"], [f"rotations up to 1/{denom}: {r['rotations']}, mismatches: {len(r['mismatches'])}",
                            f"ok: {r['ok']}"])


@arcs_group.command("laws")
@click.option("--denom", type=click.IntRange(1), default=4, show_default=True)
@_json_flag
@click.pass_obj
def arcs_laws(ctx, denom):
    """Boolean-algebra laws on all triples of one-arc regular open sets."""
    r = arcs.law_sweep(denom)
    r.pop("seconds", None)
    _emit(ctx, r, r["ok"], [f"{r['triples']} triples of {r['arcs']} arcs, failures: {sum(r['failures'].values())}"])


# -- suite --------------------------------------------------------------------------------------


@main.group("suite")
def suite_group():
    """Run configured case suites and verify their reports."""


@suite_group.command("run")
@click.option("--config", "config_file", required=True, type=click.Path(), help="Suite config JSON.")
@click.option("--out", "out_file", type=click.Path(), default=None, help="Write the report here.")
@click.option("--timings", is_flag=True, help="Add wall times (the report is then not byte-stable).")
@_json_flag
@click.pass_context
def suite_run(click_ctx, config_file, out_file, timings):
    """Run a suite; exit 0 iff no case fails."""
    ctx = click_ctx.find_object(Ctx)
    # the config seed wins unless --seed was given explicitly
    seed = ctx.seed if _seed_given(click_ctx) else None
    try:
        cfg = suite.SuiteConfig.from_file(config_file, seed)
    except suite.ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(BAD_INPUT)
    report = suite.run_suite(cfg, ctx.jobs)
    text = report.dumps(timings)
    if out_file:
        Path(out_file).write_text(text)
    if ctx.as_json and not out_file:
        click.echo(text, nl=False)
    else:
        for c in report.data["cases"]:
            click.echo(f"{c['verdict'].upper():<12} {c['name']}")
        s = report.data["summary"]
        click.echo(f"pass {s['pass']}, fail {s['fail']}, inconclusive {s['inconclusive']}")
    if not report.ok:
        sys.exit(FAILED)


def _seed_given(click_ctx) -> bool:
    src = click_ctx.find_root().get_parameter_source("seed")
    return src is not None and src.name == "COMMANDLINE"


@suite_group.command("verify")
@click.option("--report", "report_file", required=True, type=click.Path(), help="Report JSON.")
@_json_flag
@click.pass_obj
def suite_verify(ctx, report_file):
    """Re-check every certificate in a report; exit 0 iff all hold."""
    data = _load(report_file)
    try:
        per_case = suite.verify_cases(data)
        ok = suite.verify(data)
    except suite.MalformedCertificate as exc:
        _emit(ctx, {"verified": False, "error": str(exc)}, False, [f"malformed: {exc}"])
        return
    _emit(ctx, {"verified": ok, "cases": per_case}, ok,
          [f"{'ok' if v else 'REJECTED':<9} {k}" for k, v in per_case.items()] + [f"verified: {ok}"])


if __name__ == "__main__":
    main()
