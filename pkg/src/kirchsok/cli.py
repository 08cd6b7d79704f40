"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 a verification failed, 3 a Gröbner
budget ran out.  ``KIRCHSOK_MAX_PAIRS``, ``KIRCHSOK_MAX_TERMS`` and
``KIRCHSOK_MAX_BITS`` override the default Gröbner budgets.
"""

from __future__ import annotations

import json
import os
import random
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from . import __version__
from .groebner import (DEFAULT_MAX_BITS, DEFAULT_MAX_PAIRS, DEFAULT_MAX_TERMS, BudgetExceeded, MonomialOrder,
                       buchberger, sample_admissible)
from .polyring import StructuralError, default_ring, parse, to_rational

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_BUDGET = 0, 1, 2, 3
WEIGHT_KEYS = ("alpha", "beta", "l0", "l1", "l2", "l3", "s30")


class VerificationFailed(Exception):
    pass


@dataclass
class RunConfig:
    fmt: str = "text"
    seed: int = 0
    budget: dict = field(default_factory=dict)

    @classmethod
    def from_env(cls, fmt: str, seed: int | None) -> "RunConfig":
        from .report import DEFAULT_SEED

        budget = {"max_pairs": DEFAULT_MAX_PAIRS, "max_terms": DEFAULT_MAX_TERMS, "max_bits": DEFAULT_MAX_BITS}
        for key, env in (("max_pairs", "KIRCHSOK_MAX_PAIRS"), ("max_terms", "KIRCHSOK_MAX_TERMS"),
                         ("max_bits", "KIRCHSOK_MAX_BITS")):
            if os.environ.get(env):
                try:
                    budget[key] = int(os.environ[env])
                except ValueError:
                    raise click.UsageError(f"{env} must be an integer") from None
        return cls(fmt, DEFAULT_SEED if seed is None else seed, budget)


def parse_assignments(text: str | None, allowed=WEIGHT_KEYS, exact: bool = True) -> dict:
    """``a=1,b=-1/2`` to a dict; unknown keys are rejected."""
    out = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise click.BadParameter(f"expected name=value, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        if allowed is not None and k not in allowed:
            raise click.BadParameter(f"unknown key {k!r}; allowed: {', '.join(allowed)}")
        if k in out:
            raise click.BadParameter(f"{k} given twice")
        try:
            out[k] = to_rational(v) if exact else float(v)
        except (ValueError, ZeroDivisionError):
            if not exact:
                raise click.BadParameter(f"{k}: {v!r} is not a number") from None
            try:
                out[k] = float(v)
            except ValueError:
                raise click.BadParameter(f"{k}: {v!r} is not a number") from None
    return out


def _emit(cfg: RunConfig, payload: dict, text: str) -> None:
    if cfg.fmt == "json":
        click.echo(json.dumps(payload, indent=2, default=str))
    else:
        click.echo(text)


@click.group()
@click.version_option(__version__, prog_name="kirchsok")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--seed", type=int, default=None, help="Random seed (a fixed default keeps runs reproducible).")
@click.pass_context
def cli(ctx, fmt, seed):
    """Stationary motions of the Kirchhoff equations in Sokolov's case."""
    ctx.obj = RunConfig.from_env(fmt, seed)


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


@cli.group()
def model():
    """Vector fields, integrals and stationary systems."""


def _system(name: str):
    from .kirchhoff import build_full_model, build_reduced_model

    return build_full_model() if name == "full" else build_reduced_model()


@model.command("dump")
@click.option("--system", type=click.Choice(["full", "reduced"]), default="reduced", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default=None)
@click.pass_obj
def model_dump(cfg: RunConfig, system, fmt):
    """Print the equations and first integrals."""
    f, ints = _system(system)
    fmt = fmt or cfg.fmt
    payload = {"system": system, "variables": list(f.variables),
               "equations": {v: str(f[v]) for v in f.variables},
               "integrals": {I.name: str(I.expression) for I in ints}}
    lines = [f"d{v}/dt = {f[v]}" for v in f.variables]
    lines += [f"{I.name} = {I.expression}" for I in ints]
    _emit(RunConfig(fmt), payload, "\n".join(lines))


@model.command("stationary")
@click.option("--params", default=None, help="Fix weights, e.g. alpha=1,l0=2.")
@click.pass_obj
def model_stationary(cfg: RunConfig, params):
    """Gradient of K and the system left after eliminating r3."""
    from .kirchhoff import REDUCED_VARIABLES, DegeneratePencil, IntegralCombination, eliminated_system, \
        stationary_system

    p = parse_assignments(params, ("alpha", "l0", "l1", "l2", "l3"))
    K = IntegralCombination.at(**p)
    grads = stationary_system(K)
    try:
        E = eliminated_system(K)
    except DegeneratePencil as e:
        raise VerificationFailed(str(e)) from None
    payload = {"K": str(K.expression), "gradient": {v: str(g) for v, g in zip(REDUCED_VARIABLES, grads)},
               "r3": str(E.r3), "eliminated": [str(e) for e in E], "cleared_by": str(E.denominator)}
    text = [f"dK/d{v} = {g}" for v, g in zip(REDUCED_VARIABLES, grads)]
    text.append(f"r3 = {E.r3}")
    text += [f"E{i + 1} = {e}" for i, e in enumerate(E)]
    _emit(cfg, payload, "\n".join(text))


# ---------------------------------------------------------------------------
# gb
# ---------------------------------------------------------------------------


def _read_generators(path: str, ring) -> list:
    text = open(path).read() if path != "-" else sys.stdin.read()
    lines = [ln for ln in text.splitlines() if not ln.lstrip().startswith("#")]
    chunks = "\n".join(lines).replace(";", "\n\n").split("\n\n")
    out = []
    for c in chunks:
        c = " ".join(c.split())
        if c:
            out.append(parse(c, ring))
    return out


@cli.command("gb")
@click.option("--input", "input_path", required=True, type=click.Path(allow_dash=True),
              help="Generators in the polynomial grammar, separated by blank lines or ';'.")
@click.option("--order", type=click.Choice(["lex", "grevlex"]), default="lex", show_default=True)
@click.option("--vars", "ranking", default="r1,r2,s2,s1,s3", show_default=True,
              help="Variable ranking, largest first.")
@click.option("--specialize", default=None,
              help="seed=N for a random admissible weight point, or explicit name=value pairs.")
@click.option("--output", default=None, type=click.Path(), help="Write the basis here instead of stdout.")
@click.pass_obj
def gb(cfg: RunConfig, input_path, order, ranking, specialize, output):
    """Reduced Gröbner basis of a generator file."""
    ring = default_ring()
    gens = _read_generators(input_path, ring)
    point = {}
    if specialize:
        if specialize.strip().startswith("seed="):
            point = sample_admissible(random.Random(int(specialize.split("=", 1)[1])))
        else:
            point = parse_assignments(specialize, None)
        gens = [g.substitute(point) for g in gens]
    names = [v.strip() for v in ranking.split(",") if v.strip()]
    used = set().union(*(g.variables() for g in gens)) if gens else set()
    extra = sorted(used - set(names), key=ring.index.get)
    if extra:
        raise click.UsageError(f"generators use variables outside --vars: {', '.join(extra)}")
    mo = MonomialOrder.lex(*names) if order == "lex" else MonomialOrder.grevlex(*names)
    basis = buchberger(gens, mo, **cfg.budget)
    text = basis.to_text().replace("\n", "\n;\n")
    summary = dict(basis.summary(), seconds=round(basis.stats.elapsed, 4),
                   specialization={k: str(v) for k, v in point.items()})
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
        click.echo(json.dumps(summary))
    else:
        click.echo("=== basis ===")
        click.echo(text)
        click.echo("=== summary ===")
        click.echo(json.dumps(summary))


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@cli.command("verify")
@click.option("--family", required=True, help="Catalog name; 'list' prints the catalog.")
@click.option("--params", default=None, help="Fix weights, e.g. l0=1,l1=1,alpha=1.")
@click.option("--samples", default=10, show_default=True, help="Samples for parametric families.")
@click.pass_obj
def verify(cfg: RunConfig, family, params, samples):
    """Stationarity (and invariance) certificate for a catalog family."""
    from .kirchhoff import IntegralCombination
    from .manifolds import catalog, check_invariance, check_stationarity

    cat = catalog()
    if family == "list":
        rows = {n: {"kind": s.kind, "available": s.available, "description": s.description}
                for n, s in cat.items()}
        _emit(cfg, rows, "\n".join(f"{n:38s} {s.kind:10s} {'' if s.available else '(unavailable)'}"
                                   for n, s in cat.items()))
        return
    if family not in cat:
        raise click.UsageError(f"unknown family {family!r}; try --family list")
    spec = cat[family]
    p = parse_assignments(params, ("alpha", "l0", "l1", "l2", "l3"))
    K = IntegralCombination.at(**p)
    rep = check_stationarity(spec, K, samples=samples, seed=cfg.seed)
    payload = {"stationarity": rep.to_json()}
    text = [f"family {family} ({spec.kind}): stationarity {'PASS' if rep.passed else 'FAIL'} via {rep.method}"]
    text += [f"  {c}" for c in rep.certificates]
    if rep.max_residual is not None:
        text.append(f"  max residual {float(rep.max_residual):.3e} over {rep.samples} samples")
    if rep.note:
        text.append(f"  note: {rep.note}")
    ok = rep.passed
    if spec.kind == "implicit" and spec.available:
        inv = check_invariance(spec)
        payload["invariance"] = inv.to_json()
        text.append(f"invariance {'PASS' if inv.passed else 'FAIL'}")
        text += [f"  {c}" for c in inv.certificates]
        ok = ok and inv.passed
    _emit(cfg, payload, "\n".join(text))
    if not ok:
        raise VerificationFailed(family)


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------


def _stability_record(target: str, p: dict, point: dict | None) -> dict:
    from .stability import (cylinder_equilibrium, fullspace_linearization, reduced_1d_stability,
                            sylvester, zero_solution_stability)

    if target == "zero":
        v = zero_solution_stability({k: x for k, x in p.items() if k != "beta"})
        spec = fullspace_linearization({k: 0 for k in ("s1", "s2", "s3", "r1", "r2", "r3")},
                                       {"alpha": p.get("alpha", 1)})
        j = v.to_json()
        return {"verdict": j["verdict"], "witnesses": j["witnesses"], "minors": j["minors"],
                "max_re": spec.max_re, "note": v.note}
    if target == "framed-line":
        from .report import framed_line_forms

        need = {"alpha", "l0", "l1", "l3", "s30"}
        if need - set(p):
            raise click.UsageError(f"framed-line needs {', '.join(sorted(need))}")
        *_, sub = framed_line_forms()
        v = sylvester(sub, {k: p[k] for k in need})
        j = v.to_json()
        return {"verdict": j["verdict"], "witnesses": j["witnesses"], "minors": j["minors"], "max_re": None,
                "note": "second variation restricted to the integral level sets"}
    if target == "reduced-cylinder":
        need = {"alpha", "l0", "l1", "l3"}
        if need - set(p):
            raise click.UsageError(f"reduced-cylinder needs {', '.join(sorted(need))}")
        q = {k: p[k] for k in need}
        v = reduced_1d_stability(q)[0]
        spec = fullspace_linearization(cylinder_equilibrium(q), q)
        return {"verdict": v.verdict, "witnesses": {"equilibrium": str(v.equilibrium)},
                "minors": [str(v.coefficient)], "max_re": spec.max_re,
                "note": "reduced flow on the cylinder versus the whole space"}
    if target == "point":
        if not point:
            raise click.UsageError("--target point needs --point s1=..,r3=..")
        spec = fullspace_linearization(point, {"alpha": p.get("alpha", 1)})
        return {"verdict": "unstable" if spec.unstable else "no first-approximation instability",
                "witnesses": {"roots": [[r.real, r.imag] for r in spec.roots]}, "minors": [],
                "max_re": spec.max_re, "note": "linearization of the reduced field"}
    raise click.UsageError(f"unknown target {target!r}")


def _sweep(spec: str | None):
    if not spec:
        return None, [None]
    try:
        name, rng = spec.split("=", 1)
        lo, hi, n = rng.split(":")
        n = int(n)
        lo_q, hi_q = to_rational(lo), to_rational(hi)
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter("--sweep wants name=lo:hi:n") from None
    if n < 1:
        raise click.BadParameter("--sweep needs n >= 1")
    if name not in WEIGHT_KEYS:
        raise click.BadParameter(f"unknown sweep parameter {name!r}")
    vals = [lo_q] if n == 1 else [lo_q + (hi_q - lo_q) * k / (n - 1) for k in range(n)]
    return name, vals


@cli.command("stability")
@click.option("--target", type=click.Choice(["zero", "framed-line", "reduced-cylinder", "point"]), required=True)
@click.option("--params", default=None, help="e.g. l0=1,l1=1,l2=-2,l3=0,alpha=1")
@click.option("--point", default=None, help="State for --target point, e.g. s1=0,s2=1,...")
@click.option("--sweep", default=None, help="name=lo:hi:n, evaluated on n equally spaced values.")
@click.pass_obj
def stability(cfg: RunConfig, target, params, point, sweep):
    """Stability verdicts as JSON records."""
    p = parse_assignments(params)
    x = parse_assignments(point, ("s1", "s2", "s3", "r1", "r2", "r3")) if point else None
    name, values = _sweep(sweep)
    records = []
    for v in values:
        q = dict(p)
        if name is not None:
            q[name] = v
        rec = {"target": target, "params": {k: str(val) for k, val in q.items()}}
        try:
            rec.update(_stability_record(target, q, x))
        except (ValueError, ZeroDivisionError) as e:
            rec.update({"verdict": "undefined", "witnesses": {"error": str(e)}, "minors": [], "max_re": None})
        records.append(rec)
    text = []
    for r in records:
        mr = "" if r["max_re"] is None else f"  max_re={float(r['max_re']):.6g}"
        text.append(f"{target} {','.join(f'{k}={v}' for k, v in r['params'].items())}: {r['verdict']}{mr}")
        if r["minors"]:
            text.append("  minors: " + ", ".join(str(m) for m in r["minors"]))
    _emit(cfg, records if len(records) > 1 else records[0], "\n".join(text))


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


@cli.command("simulate")
@click.option("--system", type=click.Choice(["full", "reduced"]), default="reduced", show_default=True)
@click.option("--x0", required=True, help="Comma list of the six initial values in variable order.")
@click.option("--params", default=None, help="alpha (and beta for the full system).")
@click.option("--t-end", type=float, default=10.0, show_default=True)
@click.option("--step", type=float, default=1e-3, show_default=True)
@click.option("--adaptive", is_flag=True, help="Embedded Dormand-Prince 8(5,3) instead of fixed-step RK4.")
@click.option("--monitor", "monitors", default="integrals",
              help="Comma list of 'integrals' and 'manifold=<name>'.")
@click.option("--save-every", type=int, default=10, show_default=True)
@click.option("--csv", "csv_path", default=None, type=click.Path(), help="CSV destination (default stdout).")
@click.option("--report", "report_path", default=None, type=click.Path(), help="JSON drift report destination.")
@click.pass_obj
def simulate(cfg: RunConfig, system, x0, params, t_end, step, adaptive, monitors, save_every, csv_path,
             report_path):
    """Integrate a system and monitor integrals and manifold residuals."""
    from .manifolds import catalog
    from .numerics import compile_polynomials, integrate, monitor

    f, ints = _system(system)
    try:
        start = [float(s) for s in x0.split(",")]
    except ValueError:
        raise click.BadParameter("--x0 must be a comma list of numbers") from None
    if len(start) != len(f.variables):
        raise click.BadParameter(f"--x0 needs {len(f.variables)} values ({', '.join(f.variables)})")
    allowed = ("alpha", "beta") if system == "full" else ("alpha",)
    p = {k: float(v) for k, v in parse_assignments(params, allowed).items()}
    for k in allowed:
        p.setdefault(k, 0.0 if k == "beta" else 1.0)
    use_ints, mans = [], []
    cat = catalog()
    for m in (s.strip() for s in monitors.split(",") if s.strip()):
        if m == "integrals":
            use_ints = list(ints)
        elif m.startswith("manifold="):
            name = m.split("=", 1)[1]
            if name not in cat:
                raise click.BadParameter(f"unknown manifold {name!r}")
            if system != "reduced":
                raise click.BadParameter("manifold monitors need --system reduced")
            mans.append(cat[name])
        else:
            raise click.BadParameter(f"unknown monitor {m!r}")
    tr = integrate(f, start, t_end, params=p, step=step, adaptive=adaptive, save_every=save_every)
    rep = monitor(tr, use_ints, mans, params=p)
    extra = {}
    for I in use_ints:
        fn = compile_polynomials([I.expression], tr.variables, p)
        vals = np.array([fn(x)[0] for x in tr.states])
        extra[f"drift_{I.name}"] = vals - vals[0]
    csv = tr.to_csv(extra)
    payload = {"system": system, "params": p, "t_end": t_end, "step": step, "method": tr.method,
               "samples": len(tr.times), **rep.to_json()}
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(csv)
    if report_path:
        with open(report_path, "w") as fh:
            json.dump(payload, fh, indent=2)
    if not csv_path:
        click.echo("=== trajectory ===")
        click.echo(csv, nl=False)
        click.echo("=== drift ===")
        click.echo(json.dumps(payload))
    else:
        _emit(cfg, payload, "\n".join(
            [f"{k}: relative drift {d['relative']:.3e}" for k, d in rep.integrals.items()]
            + [f"{k}: max residual {v:.3e}" for k, v in rep.manifolds.items()]))


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------


@cli.command("reproduce")
@click.option("--only", default=None, help="Comma list of blocks: model,stationary,gb,families,jacobian,"
                                           "stability,simulation.")
@click.option("--output", default=None, type=click.Path(), help="Write the JSON report here as well.")
@click.option("--figures", default=None, type=click.Path(), help="Directory for PNG figures.")
@click.option("--quiet", is_flag=True, help="Only the final JSON report.")
@click.pass_obj
def reproduce(cfg: RunConfig, only, output, figures, quiet):
    """Run every check and emit one JSON report; nonzero exit iff a gating item fails."""
    from .report import BLOCKS, run

    blocks = [b.strip() for b in only.split(",")] if only else None
    for b in blocks or ():
        if b not in BLOCKS:
            raise click.BadParameter(f"unknown block {b!r}; choose from {', '.join(BLOCKS)}")

    def progress(item):
        if not quiet:
            mark = "PASS" if item.passed else ("FAIL" if item.gating else "NOTE")
            click.echo(f"[{mark}] {item.block}: {item.name} ({item.seconds:.2f}s)", err=True)

    rep = run(blocks, seed=cfg.seed, figures=figures, progress=progress, budget=cfg.budget)
    payload = rep.to_json()
    if output:
        with open(output, "w") as fh:
            json.dump(payload, fh, indent=2)
    click.echo("=== report ===")
    click.echo(json.dumps(payload, indent=2))
    if not rep.passed:
        raise VerificationFailed("reproduce")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="kirchsok", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except VerificationFailed as e:
        click.echo(f"verification failed: {e}", err=True)
        return EXIT_FAILED
    except BudgetExceeded as e:
        click.echo(f"budget exhausted: {e}", err=True)
        return EXIT_BUDGET
    except (StructuralError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
