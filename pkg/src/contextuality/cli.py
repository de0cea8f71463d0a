"""Command-line front end.

Exit codes: 0 for success or a noncontextual verdict, 1 for a contextual
verdict (or sweep disagreements), 2 for any error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .behavior import Behavior, BehaviorError, is_nondisturbing
from .coupling import CouplingError, CouplingPolicy
from .extension import extend
from .io import InputError, dump, load_behavior, load_scenario
from .lp import DEFAULT_EPS
from .ncycle import CycleCorrelators, closed_form_quantifiers, correlators, cycle_order, extended_criterion, \
    traditional_criterion
from .polytope import DEFAULT_CAP, VertexCapError, extended_system, is_extended_noncontextual, is_noncontextual
from .quantifiers import CLI_NAMES, quantify
from .sampling import NondisturbingSampler, dirichlet_behavior, disturb
from .scenario import ScenarioError

EXIT_OK, EXIT_CONTEXTUAL, EXIT_ERROR = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    exact: bool = False
    eps: float = DEFAULT_EPS
    cap: int = DEFAULT_CAP
    seed: int = 0
    fmt: str = "json"

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError(f"--eps must be positive, got {self.eps}")
        if self.cap < 1:
            raise ValueError(f"--cap must be at least 1, got {self.cap}")


def _num(v: Any):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _emit(obj: Any, cfg: RunConfig, out) -> None:
    if cfg.fmt == "json":
        out.write(dump(obj))
    else:
        out.write(_table(obj))


def _table(obj: Any, indent: str = "") -> str:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{indent}{k}:")
                lines.append(_table(v, indent + "  ").rstrip("\n"))
            else:
                lines.append(f"{indent}{k}: {v}")
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            lines.append(indent + ", ".join(str(v) for v in obj))
        else:
            for i, v in enumerate(obj):
                lines.append(f"{indent}[{i}]")
                lines.append(_table(v, indent + "  ").rstrip("\n"))
    else:
        lines.append(f"{indent}{obj}")
    return "\n".join(lines) + "\n"


def _nd_report(b: Behavior) -> dict[str, Any]:
    r = is_nondisturbing(b)
    loc = None
    if r.location is not None:
        i, j, shared = r.location
        loc = {"contexts": [i, j], "measurements": list(shared)}
    return {"nondisturbing": bool(r.nondisturbing), "max_violation": r.max_violation, "location": loc}


def cmd_validate(args, cfg: RunConfig, out) -> int:
    s = load_scenario(args.scenario)
    report: dict[str, Any] = {"scenario": {"valid": True, "measurements": len(s.measurements),
                                           "contexts": len(s.contexts), "outcomes": len(s.outcomes)}}
    if args.behavior:
        b = load_behavior(args.behavior, exact=cfg.exact)
        if b.scenario != s:
            raise InputError(f"{args.behavior}: behavior scenario differs from {args.scenario}", "behavior",
                             {"file": str(args.behavior), "field": "scenario"})
        report["behavior"] = {"valid": True, **_nd_report(b)}
    _emit(report, cfg, out)
    return EXIT_OK


def cmd_extend(args, cfg: RunConfig, out) -> int:
    _emit(extend(load_scenario(args.scenario)).to_dict(), cfg, out)
    return EXIT_OK


def _cycle_section(b: Behavior, cfg: RunConfig) -> dict[str, Any] | None:
    if cycle_order(b.scenario) is None:
        return None
    c = correlators(b.as_exact() if cfg.exact else b)
    return extended_criterion(c, cfg.eps).to_dict()


def cmd_check(args, cfg: RunConfig, out) -> int:
    b = load_behavior(args.behavior, exact=cfg.exact)
    if args.extended:
        v = is_extended_noncontextual(b, CouplingPolicy(args.policy), exact=cfg.exact, eps=cfg.eps, cap=cfg.cap)
    else:
        v = is_noncontextual(b, exact=cfg.exact, eps=cfg.eps, cap=cfg.cap)
    report = {"test": "extended" if args.extended else "traditional",
              "policy": args.policy if args.extended else None, **v.to_dict(witness=not args.no_witness)}
    if args.extended:
        cyc = _cycle_section(b, cfg)
        if cyc is not None:
            report["closed_form"] = cyc
    _emit(report, cfg, out)
    return EXIT_OK if v.noncontextual else EXIT_CONTEXTUAL


def _measures(text: str) -> list:
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in names if t not in CLI_NAMES]
    if bad:
        raise InputError(f"unknown measure(s) {bad}; choose from {sorted(CLI_NAMES)}", "usage")
    return [CLI_NAMES[t] for t in names]


def cmd_quantify(args, cfg: RunConfig, out) -> int:
    b = load_behavior(args.behavior, exact=cfg.exact)
    reports = quantify(b, _measures(args.measures), extended=args.extended, policy=CouplingPolicy(args.policy),
                       exact=cfg.exact, eps=cfg.eps, cap=cfg.cap)
    _emit([r.to_dict(witness=args.witness) for r in reports], cfg, out)
    return EXIT_OK


def _values(text: str, exact: bool) -> list:
    parts = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return [Fraction(p) if exact else float(Fraction(p)) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number list {text!r}: {exc}", "usage") from exc


def cmd_ncycle(args, cfg: RunConfig, out) -> int:
    pair = _values(args.pair, cfg.exact)
    singles = _values(args.singles, cfg.exact) if args.singles else [0] * args.n
    try:
        c = CycleCorrelators.from_flat(args.n, pair, singles)
    except ValueError as exc:
        raise InputError(str(exc), "correlators") from exc
    ext = extended_criterion(c, cfg.eps)
    report: dict[str, Any] = {
        "n": c.n,
        "coupling_terms": [_num(v) for v in c.coupling_terms()],
        "extended_vector": [_num(v) for v in c.extended_vector()],
        "extended": ext.to_dict(),
        "traditional": traditional_criterion(c, cfg.eps).to_dict() if c.nondisturbing else None,
        "closed_form": {k: _num(v) for k, v in closed_form_quantifiers(c).items()},
    }
    _emit(report, cfg, out)
    return EXIT_OK if ext.noncontextual else EXIT_CONTEXTUAL


def cmd_random(args, cfg: RunConfig, out) -> int:
    s = load_scenario(args.scenario)
    if args.count < 0:
        raise InputError("--count must be nonnegative", "usage")
    rng = np.random.default_rng(cfg.seed)
    is_cycle = cycle_order(s) is not None
    report: dict[str, Any] = {"scenario_measurements": len(s.measurements), "count": args.count, "seed": cfg.seed,
                              "disturbance": args.disturbance, "sampler": args.sampler, "cycle": is_cycle}
    if args.count == 0:
        report["samples"] = 0
        _emit(report, cfg, out)
        return EXIT_OK
    sampler = NondisturbingSampler.build(s, rng, cap=cfg.cap) if args.sampler == "nondisturbing" else None
    system = extended_system(s, cfg.cap)
    tally = {"nondisturbing": 0, "traditional_contextual": 0, "extended_contextual": 0, "boundary": 0}
    agree = {"lp_vs_closed_form": [0, 0], "extended_vs_traditional_when_nondisturbing": [0, 0]}
    disagreements: list[int] = []
    for idx in range(args.count):
        b = sampler.sample(rng) if sampler is not None else dirichlet_behavior(s, rng)
        b = disturb(b, args.disturbance, rng)
        if cfg.exact:
            b = b.as_exact()
        nd = is_nondisturbing(b, tol=0).nondisturbing
        ext = is_extended_noncontextual(b, exact=cfg.exact, eps=cfg.eps, system=system)
        trad = is_noncontextual(b, exact=cfg.exact, eps=cfg.eps, cap=cfg.cap)
        tally["nondisturbing"] += nd
        tally["traditional_contextual"] += not trad.noncontextual
        tally["extended_contextual"] += not ext.noncontextual
        tally["boundary"] += ext.boundary
        ok = True
        if is_cycle:
            crit = extended_criterion(correlators(b), cfg.eps)
            if crit.boundary or ext.boundary:
                crit = extended_criterion(correlators(b.as_exact()))
                ext = is_extended_noncontextual(b, exact=True, system=system)
            same = crit.noncontextual == ext.noncontextual
            agree["lp_vs_closed_form"][0] += same
            agree["lp_vs_closed_form"][1] += 1
            ok &= same
        if nd:
            same = trad.noncontextual == ext.noncontextual
            agree["extended_vs_traditional_when_nondisturbing"][0] += same
            agree["extended_vs_traditional_when_nondisturbing"][1] += 1
            ok &= same
        if not ok:
            disagreements.append(idx)
    report["samples"] = args.count
    report.update(tally)
    report["agreement"] = {k: {"agree": a, "total": t, "rate": (a / t if t else None)} for k, (a, t) in agree.items()}
    report["disagreements"] = disagreements
    _emit(report, cfg, out)
    return EXIT_CONTEXTUAL if disagreements else EXIT_OK


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--mode", choices=["float", "exact"], default=d("float"), help="arithmetic for the LP kernel")
    p.add_argument("--eps", type=float, default=d(DEFAULT_EPS), help="float tolerance on LP residuals")
    p.add_argument("--cap", type=int, default=d(DEFAULT_CAP), help="largest vertex count to enumerate")
    p.add_argument("--seed", type=int, default=d(0), help="random seed")
    p.add_argument("--format", choices=["json", "table"], default=d("json"), dest="fmt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contextuality",
                                     description="Decide and quantify contextuality of behaviors.")
    parser.add_argument("--version", action="version", version=__version__)
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        _global_options(p, suppress=True)
        return p

    p = add("validate", "validate a scenario and optionally a behavior on it")
    p.add_argument("scenario")
    p.add_argument("behavior", nargs="?")
    p.set_defaults(func=cmd_validate)

    p = add("extend", "print the extended scenario")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_extend)

    p = add("check", "decide noncontextuality (exit 0) or contextuality (exit 1)")
    p.add_argument("behavior")
    p.add_argument("--extended", action="store_true", help="use the extended (coupling) notion")
    p.add_argument("--policy", choices=[c.value for c in CouplingPolicy], default="maximal")
    p.add_argument("--no-witness", action="store_true", help="omit witness and certificate vectors")
    p.set_defaults(func=cmd_check)

    p = add("quantify", "evaluate contextuality quantifiers")
    p.add_argument("behavior")
    p.add_argument("--measures", default="cf,neg,l1u,l1max,l1tot,mu,m")
    p.add_argument("--extended", action="store_true", help="evaluate distances on the extended behavior")
    p.add_argument("--policy", choices=[c.value for c in CouplingPolicy], default="maximal")
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_quantify)

    p = add("ncycle", "closed-form n-cycle criterion from correlators")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pair", required=True, help="comma-separated pair correlators")
    p.add_argument("--singles", help="n or 2n comma-separated expectations (use --singles=-1,... for a leading minus)")
    p.set_defaults(func=cmd_ncycle)

    p = add("random", "seeded sweep comparing decision paths")
    p.add_argument("scenario")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--disturbance", type=float, default=0.0)
    p.add_argument("--sampler", choices=["nondisturbing", "dirichlet"], default="nondisturbing")
    p.set_defaults(func=cmd_random)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        cfg = RunConfig(args.mode == "exact", args.eps, args.cap, args.seed, args.fmt)
        return args.func(args, cfg, out)
    except InputError as exc:
        out.write(dump({"error": exc.to_dict()}))
    except (ScenarioError, BehaviorError) as exc:
        out.write(dump({"error": {"kind": "invalid", "message": str(exc),
                                  "violations": [{"kind": k, "detail": d} for k, d in exc.violations]}}))
    except VertexCapError as exc:
        out.write(dump({"error": {"kind": "cap", "message": str(exc), "required": exc.required, "cap": exc.cap}}))
    except CouplingError as exc:
        out.write(dump({"error": {"kind": "coupling", "message": str(exc)}}))
    except ValueError as exc:
        out.write(dump({"error": {"kind": "usage", "message": str(exc)}}))
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
