#! /usr/bin/env python
"""
odolab CLI interface.

Every subcommand reads its inputs (elements and clopen sets as inline JSON or
JSON files), computes exactly, and writes one report in JSON or CSV. Exit
codes: 0 on success, 1 on invalid input or usage, 2 on I/O failure.
"""

import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import click
from pydantic import ValidationError

from . import __version__
from .core.adic import format_exact
from .core.concentration import exact_profile, levy_table, mc_profile
from .core.decompose import (
    ball_certificate,
    belinskaya_decompose,
    disjoint_support_3coloring,
    involution_triple_decompose,
    split_equal_norm,
)
from .core.element import cocycle_entropy, identity, metric as element_metric
from .core.errors import NotBijectiveError, OdolabError
from .core.genlab import (
    ConstructionSchedule,
    assemble_and_recover,
    build_generators,
    check_schedule,
    greedy_approximate,
)
from .core.runconfig import RunConfig
from .core.towers import (
    conj_distortion,
    enumerate_generating_involutions,
    kac_check,
    induced,
    rho_embed,
    rokhlin_tower,
    zn_distortion,
    zn_embedding,
)
from .loader import parse_clopen, parse_element, parse_permutation
from .reports import Report, write_report
from .utils.env import configure_logging, set_level_cap


class OdolabGroup(click.Group):
    """Click group mapping every failure onto the 0/1/2 exit contract."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
            code = rv if isinstance(rv, int) else 0
        except click.FileError as e:
            e.show()
            code = 2
        except click.ClickException as e:
            e.show()
            code = 1
        except click.Abort:
            click.echo("Aborted!", err=True)
            code = 1
        except OSError as e:
            click.echo(f"I/O Error: {e}", err=True)
            code = 2
        except json.JSONDecodeError as e:
            click.echo(
                f"Error: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                err=True,
            )
            code = 1
        except NotBijectiveError as e:
            listed = ", ".join(str(w) for w in e.residues)
            click.echo(f"Validation Error: {e} (colliding residues: {listed})", err=True)
            code = 1
        except (OdolabError, ValidationError, ValueError) as e:
            click.echo(f"Validation Error: {e}", err=True)
            code = 1
        if standalone_mode:
            sys.exit(code)
        return code


def common_options(f: Callable) -> Callable:
    """Options shared by every subcommand; unset flags keep config-file values."""
    options = [
        click.option("--base", type=int, default=None, help="Odometer base q (default 2)"),
        click.option("--level-cap", type=int, default=None, help="Largest level materialized (default 24)"),
        click.option("--seed", type=int, default=None, help="Random seed (default 0)"),
        click.option("--samples", type=int, default=None, help="Monte Carlo samples (default 10000)"),
        click.option("--budget", type=int, default=None, help="Greedy step budget (default 8)"),
        click.option("--out", type=click.Path(path_type=Path), default=None, help="Report path (default stdout)"),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None, help="Report format (default json)"),
        click.option("--config", "config_file", type=click.Path(path_type=Path), default=None, help="YAML run configuration"),
        click.option("-v", "--verbose", count=True, help="Increase log verbosity (-v, -vv)"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _run_config(subcommand: str, common: Dict[str, Any]) -> RunConfig:
    config_file = common.pop("config_file", None)
    verbose = common.pop("verbose", 0)
    configure_logging(verbose)
    config = RunConfig.from_file(config_file) if config_file else RunConfig()
    config = _apply_overrides(
        config,
        subcommand=subcommand,
        base=common.get("base"),
        level_cap=common.get("level_cap"),
        seed=common.get("seed"),
        samples=common.get("samples"),
        budget=common.get("budget"),
        out=common.get("out"),
        format=common.get("fmt"),
    )
    set_level_cap(config.level_cap)
    if verbose:
        click.echo(f"Running {subcommand} with base {config.base}", err=True)
    return config


def _apply_overrides(config: RunConfig, **overrides: Any) -> RunConfig:
    """Apply non-None overrides to a RunConfig."""
    return config.with_overrides(**overrides)


def _emit(config: RunConfig, results: Dict[str, Any], rows: Optional[List[Dict[str, Any]]] = None) -> int:
    report = Report(
        subcommand=config.subcommand or "",
        config=config.to_dict(),
        results=results,
        rows=rows or [],
    )
    text = write_report(report, config.format, config.out)
    if config.out is None:
        click.echo(text, nl=False)
    else:
        click.echo(f"Report saved to: {config.out}", err=True)
    return 0


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}")


@click.group(cls=OdolabGroup, context_settings=dict(help_option_names=["-h", "--help"]))
@click.version_option(version=__version__, prog_name="odolab")
def cli():
    """odolab - exact computations in the topological full group of the q-adic odometer.

    Examples:\n
        `odolab metric T id --kind d1` # L1 distance between the odometer and the identity\n
        `odolab kac '{"base":2,"level":2,"classes":[0,2]}'` # Return-time integral of a clopen set\n
        `odolab check-schedule --standard --count 3` # Integer check of the construction schedule\n

    Elements are given as inline JSON, a JSON file path, or the shorthands `id` and `T`.
    Run subcommands with `odolab <subcommand> --help` for more information.
    """
    pass


# ----------------------------------------------------------------------------
# Element queries
# ----------------------------------------------------------------------------


@cli.command()
@click.argument("left")
@click.argument("right")
@click.option("--kind", type=click.Choice(["d1", "du", "linf", "dp"]), default="d1", show_default=True)
@click.option("--p", "p", type=float, default=None, help="Exponent for --kind dp")
@common_options
def metric(left: str, right: str, kind: str, p: Optional[float], **common):
    """Distance between two elements (exact except dp with p > 1)."""
    config = _run_config("metric", common)
    u = parse_element(left, config.base)
    v = parse_element(right, config.base)
    value = element_metric(u, v, kind, p)  # type: ignore[arg-type]
    exact = not isinstance(value, float)
    results = {
        "kind": kind,
        "p": p,
        "value": format_exact(value) if exact else value,
        "exact": exact,
    }
    return _emit(config, results, [results])


@cli.command()
@click.argument("left")
@click.argument("right")
@common_options
def compose(left: str, right: str, **common):
    """Composition LEFT ∘ RIGHT (RIGHT applied first)."""
    config = _run_config("compose", common)
    u = parse_element(left, config.base)
    v = parse_element(right, config.base)
    w = u.compose(v)
    one = identity(w.base)
    results = {
        "result": w,
        "index": w.index(),
        "norm": element_metric(one, w, "d1"),
        "entropy": cocycle_entropy(w),
    }
    row = {"index": w.index(), "norm": results["norm"], "level": w.level, "entropy": results["entropy"]}
    return _emit(config, results, [row])


@cli.command()
@click.argument("element")
@click.option(
    "--kind",
    type=click.Choice(["belinskaya", "coloring", "triple", "split", "ball"]),
    default="belinskaya",
    show_default=True,
)
@click.option("--parts", type=int, default=2, show_default=True, help="Factors for split/ball")
@click.option("--depth", type=int, default=None, help="Refinement depth for split/ball (default level+4)")
@common_options
def decompose(element: str, kind: str, parts: int, depth: Optional[int], **common):
    """Structural decompositions of an element."""
    config = _run_config("decompose", common)
    u = parse_element(element, config.base)
    depth = u.level + 4 if depth is None else depth
    results: Dict[str, Any] = {"kind": kind, "input": u}
    rows: List[Dict[str, Any]] = []
    if kind == "belinskaya":
        split = belinskaya_decompose(u)
        results.update(split.to_dict())
        one = identity(u.base)
        rows = [
            {"part": name, "norm": element_metric(one, getattr(split, name), "d1")}
            for name in ("negative", "periodic", "positive")
        ]
    elif kind == "coloring":
        colours = disjoint_support_3coloring(u)
        results["classes"] = list(colours)
        rows = [{"colour": i + 1, "measure": c.measure()} for i, c in enumerate(colours)]
    elif kind == "triple":
        triple = involution_triple_decompose(u)
        results.update(triple.to_dict())
        one = identity(u.base)
        rows = [
            {"involution": name, "norm": element_metric(one, getattr(triple, name), "d1")}
            for name in ("u1", "u2", "u3")
        ]
    elif kind == "split":
        split_parts = split_equal_norm(u, parts, depth)
        results.update(
            parts=list(split_parts.parts),
            norms=list(split_parts.norms),
            tolerance=split_parts.tolerance,
            depth=split_parts.depth,
            exact=split_parts.exact,
        )
        rows = [{"part": i, "norm": n} for i, n in enumerate(split_parts.norms)]
    else:
        certificate = ball_certificate(u, parts, depth)
        results.update(certificate.model_dump())
        rows = [
            {
                "parts": certificate.parts,
                "radius": certificate.radius,
                "bound": certificate.bound,
                "certified": certificate.certified,
            }
        ]
    return _emit(config, results, rows)


# ----------------------------------------------------------------------------
# Towers
# ----------------------------------------------------------------------------


@cli.command()
@click.argument("clopen")
@common_options
def kac(clopen: str, **common):
    """Return-time integral and induced map of a nonempty clopen set."""
    config = _run_config("kac", common)
    a = parse_clopen(clopen)
    integral = kac_check(a)
    times, t_a = induced(a)
    results = {"integral": integral, "element": t_a, "return_times": times}
    rows = [{"class": w, "return_time": t} for w, t in sorted(times.items())]
    return _emit(config, results, rows)


@cli.command()
@click.argument("clopen")
@click.option("--perm", default=None, help="Permutation JSON {\"images\": [...]} to embed")
@common_options
def tower(clopen: str, perm: Optional[str], **common):
    """Rokhlin tower over a clopen base, optionally embedding a permutation."""
    config = _run_config("tower", common)
    tower = rokhlin_tower(parse_clopen(clopen))
    results: Dict[str, Any] = {"tower": tower.to_dict()}
    if perm is not None:
        sigma = parse_permutation(perm)
        embedded = rho_embed(tower, sigma)
        results["embedded"] = embedded
        results["order"] = embedded.periodicity()
    rows = [{"floor": i, "set": json.dumps(s.to_dict())} for i, s in enumerate(tower.levels)]
    return _emit(config, results, rows)


@cli.command()
@click.option("--m-min", type=int, default=2, show_default=True)
@click.option("--m-max", type=int, default=10, show_default=True)
@click.option("--width", type=int, default=None, help="Width n (default q^m - 1)")
@common_options
def distortion(m_min: int, m_max: int, width: Optional[int], **common):
    """Conjugation distortion by induced transformations, one row per level m."""
    config = _run_config("distortion", common)
    rows = []
    for m in range(m_min, m_max + 1):
        n = config.base**m - 1 if width is None else width
        report = conj_distortion(config.base, m, n)
        rows.append({"m": m, "width": n, "ratio": report.ratio, "linf": report.linf})
    return _emit(config, {"cases": rows}, rows)


@cli.command("zn-embed")
@click.argument("clopen")
@click.option("--rank", type=int, default=1, show_default=True)
@click.option("--max-l1", type=int, default=4, show_default=True)
@common_options
def zn_embed(clopen: str, rank: int, max_l1: int, **common):
    """Commuting elements spanning a quasi-isometric copy of Z^rank."""
    config = _run_config("zn-embed", common)
    a = parse_clopen(clopen)
    generators = zn_embedding(rank, a)
    report = zn_distortion(rank, a, max_l1)
    rows = [
        {"exponents": " ".join(map(str, e)), "l1": l1, "d1": d} for e, l1, d in report.rows
    ]
    results = {"generators": generators, "c1": report.c1, "c2": report.c2}
    return _emit(config, results, rows)


# ----------------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------------


@cli.command()
@click.option("--primes", default="2,3,5", show_default=True, help="Comma-separated cycle lengths")
@click.option("--levels", default="2,4,7", show_default=True, help="Comma-separated tower levels")
@common_options
def construct(primes: str, levels: str, **common):
    """Build prime cycles, disjointify them and tabulate recovery residuals."""
    config = _run_config("construct", common)
    report = build_generators(_int_list(primes), _int_list(levels), config.base)
    rows = [row for table in report.recovery for row in table.to_rows()]
    return _emit(config, report.to_dict(), rows)


@cli.command()
@click.argument("elements", nargs=-1, required=True)
@click.option("--index", "n", type=int, default=0, show_default=True)
@common_options
def recover(elements: Sequence[str], n: int, **common):
    """Recover element INDEX as a power of the product of disjoint periodic ELEMENTS."""
    config = _run_config("recover", common)
    vs = [parse_element(e, config.base) for e in elements]
    table = assemble_and_recover(vs, n)
    results = {
        "n": n,
        "crt_exponent": str(table.crt_exponent),
        "crt_residual": table.crt_residual,
    }
    return _emit(config, results, table.to_rows())


@cli.command("check-schedule")
@click.option(
    "--standard",
    "--paper",
    "standard",
    is_flag=True,
    help="Use primes 2,3,5,... with k_n = 4^(n 2^n + 2^n)",
)
@click.option("--count", type=int, default=None, help="Indices to check (default all)")
@click.option("--primes", default=None, help="Comma-separated primes")
@click.option("--levels", default=None, help="Comma-separated levels")
@click.option("--deltas", default=None, help="Comma-separated tolerances, e.g. 1/2,1/4")
@click.option("--max-bits", type=int, default=1 << 26, show_default=True)
@common_options
def check_schedule_cmd(
    standard: bool,
    count: Optional[int],
    primes: Optional[str],
    levels: Optional[str],
    deltas: Optional[str],
    max_bits: int,
    **common,
):
    """Integer-only check of a construction schedule."""
    config = _run_config("check-schedule", common)
    if standard:
        schedule = ConstructionSchedule.standard(count if count is not None else 3, config.base)
    elif primes and levels:
        schedule = ConstructionSchedule(
            base=config.base,
            primes=tuple(_int_list(primes)),
            levels=tuple(_int_list(levels)),
            deltas=tuple(d for d in deltas.split(",")) if deltas else None,
        )
    else:
        raise click.UsageError("give --standard or both --primes and --levels")
    report = check_schedule(schedule, count, max_bits=max_bits)
    results = {
        "passed": len(report.passed()),
        "failed": len(report.failed()),
        "entries": report.to_rows(),
    }
    return _emit(config, results, report.to_rows())


@cli.command()
@click.argument("target")
@click.option("--max-level", type=int, default=2, show_default=True, help="Generating involutions up to this level")
@common_options
def approximate(target: str, max_level: int, **common):
    """Greedy word in generating involutions approaching TARGET in d1."""
    config = _run_config("approximate", common)
    u = parse_element(target, config.base)
    generators = enumerate_generating_involutions(config.base, max_level)
    result = greedy_approximate(u, generators, config.budget)
    results = {
        "steps": [f"{side}{j}" for side, j in result.steps],
        "residual": result.residual,
        "index_gap": result.index_gap,
        "generators": len(generators),
    }
    rows = [{"step": i, "residual": r} for i, r in enumerate(result.trace)]
    return _emit(config, results, rows)


# ----------------------------------------------------------------------------
# Concentration
# ----------------------------------------------------------------------------


@cli.command()
@click.option("--n", "sizes", default="6", show_default=True, help="Comma-separated sizes n")
@click.option("--metric", "perm_metric", type=click.Choice(["l1", "hamming"]), default="l1", show_default=True)
@click.option("--functional", type=click.Choice(["identity", "fixed"]), default="identity", show_default=True)
@click.option("--exact", is_flag=True, help="Enumerate S_n instead of sampling (n <= 8)")
@click.option("--epsilons", default=None, help="Comma-separated grid, e.g. 1/10,1/5")
@click.option("--streams", type=int, default=1, show_default=True)
@click.option("--workers", type=int, default=None)
@common_options
def concentration(
    sizes: str,
    perm_metric: str,
    functional: str,
    exact: bool,
    epsilons: Optional[str],
    streams: int,
    workers: Optional[int],
    **common,
):
    """Concentration profiles alpha(eps) of distance functionals on S_n."""
    config = _run_config("concentration", common)
    grid = epsilons.split(",") if epsilons else None
    ns = _int_list(sizes)
    profiles = []
    if exact:
        for n in ns:
            profiles.append(
                exact_profile(n, perm_metric, functional, seed=config.seed, epsilons=grid)  # type: ignore[arg-type]
            )
    elif grid is not None and len(grid) == 1 and len(ns) > 1 and functional == "identity":
        # one epsilon across several sizes
        profiles = levy_table(ns, perm_metric, grid[0], config.samples, config.seed, workers)  # type: ignore[arg-type]
    else:
        for n in ns:
            profiles.append(
                mc_profile(
                    n,
                    perm_metric,  # type: ignore[arg-type]
                    functional,  # type: ignore[arg-type]
                    samples=config.samples,
                    seed=config.seed,
                    epsilons=grid,
                    streams=streams,
                    workers=workers,
                )
            )
    rows = [row for profile in profiles for row in profile.to_rows()]
    results = {
        "profiles": [
            {"n": p.n, "median": p.median, "samples": p.samples} for p in profiles
        ],
        "note": "evidence for distance functionals only; not a test of the Levy property",
    }
    return _emit(config, results, rows)


if __name__ == "__main__":
    cli()
