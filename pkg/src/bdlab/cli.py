"""Command-line front end.  Every subcommand writes a JSON report (stdout, or --out)
and exits nonzero when an exact check fails."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import bd_core, bmt, reports, schedule, selfdet, stages, suites, xnr
from . import witnesses as W
from .bd_core import BASE, BlockVector, StageError


@dataclass
class RunConfig:
    schedule: dict = field(default_factory=lambda: schedule.t1().to_config())
    coding: str = "toy"
    upto: int = 4
    suites: list = field(default_factory=lambda: ["all"])
    out: str | None = None
    registry: str | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


class CliError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read {path}: {e}") from None


def _stage(args, cfg: RunConfig):
    """The stage a command acts on: --stage FILE, or the micro stage."""
    ws = schedule.schedule_from_config(cfg.schedule)
    if getattr(args, "stage", None):
        space = getattr(args, "space", None) or "bmt"
        st = (xnr.new_xnr_stage(ws, xnr.CodingRegistry(cfg.coding), bmt.NThresholds("toy")) if space == "xnr"
              else bmt.new_bmt_stage(ws, bmt.NThresholds("toy")))
        try:
            with open(args.stage) as fh:
                bd_core.load_into(st, fh.read())
        except OSError as e:
            raise CliError(f"cannot read {args.stage}: {e}") from None
        return st
    return stages.micro_stage(ws=ws)


def _resolve(st, name: str) -> str:
    if name == "base":
        return BASE.id
    if name.startswith("canonical:"):
        return bmt.canonical_ageone(st, int(name.split(":", 1)[1])).id
    if name not in st:
        raise CliError(f"unknown node {name}")
    return name


def _spec(data: dict) -> selfdet.SubsetSpec:
    tag = data.get("tag", "subset")
    if "ids" in data:
        return selfdet.SubsetSpec.from_ids(tag, data["ids"])
    named = {"full": selfdet.SubsetSpec.full, "canonical": stages.canonical_spec, "xnr": stages.xnr_gamma_spec}
    if tag in named:
        return named[tag]()
    if tag.startswith("ranks<="):
        return stages.rank_closed_spec(int(tag[7:]))
    raise CliError(f"subset file needs 'ids' or a known tag, got {tag!r}")


# ---------------------------------------------------------------- commands

def cmd_schedule(args, cfg):
    ws = schedule.schedule_from_config(cfg.schedule)
    r = schedule.validate_strict(ws, args.depth)
    r["pass"] = r["ok"]
    return r


def cmd_stage(args, cfg):
    ws = schedule.schedule_from_config(cfg.schedule)
    if args.space == "bmt":
        mr = min(args.upto, 4)
        st = stages.micro_stage(stages.MicroConfig(max_rank=mr, extend_to=args.upto), ws)
    else:
        st = stages.t1_scripted_stage(args.upto)
    if args.dump:
        with open(args.dump, "w") as fh:
            fh.write(bd_core.dump_stage(st))
    trace = xnr.xnr_trace(st)
    return {"space": args.space, "nodes": len(st), "max_rank": st.max_rank(),
            "per_rank": {str(r): len(st.by_rank[r]) for r in st.ranks()},
            "trace": trace, "pass": True}


def cmd_coord(args, cfg):
    st = _stage(args, cfg)
    g, x = _resolve(st, args.gamma), _resolve(st, args.xi)
    v = bd_core.coordinate(st, g, x)
    print(bd_core.fstr(v))
    return {"gamma": g, "xi": x, "value": v, "pass": True}


def cmd_norm(args, cfg):
    st = _stage(args, cfg)
    data = _load_json(args.vector)
    coeffs = data.get("coeffs", data)
    x = BlockVector.of(st, {_resolve(st, k): bd_core.frac(v) for k, v in coeffs.items()})
    Q = args.upto if args.upto is not None else st.max_rank()
    lo, hi = bd_core.horizon_norm(st, x, Q)
    print(f"({bd_core.fstr(lo)}, {bd_core.fstr(hi)})")
    return {"Q": Q, "lower": lo, "upper": hi, "pass": True}


def cmd_selfdet(args, cfg):
    st = _stage(args, cfg)
    spec = _spec(_load_json(args.subset))
    Q = args.upto if args.upto is not None else st.max_rank()
    r = selfdet.check_self_determined(st, spec, Q)
    r["pass"] = r["agree"]
    return r


def cmd_quotient(args, cfg):
    st = _stage(args, cfg)
    spec = _spec(_load_json(args.subset))
    Q = args.upto if args.upto is not None else st.max_rank()
    qs = selfdet.quotient_stage(st, spec, Q)
    if args.dump:
        with open(args.dump, "w") as fh:
            fh.write(bd_core.dump_stage(qs))
    return {"tag": spec.tag, "Q": Q, "S": qs.S, "nodes": len(qs), "pass": True}


def cmd_witness(args, cfg):
    st, reg = stages.witness_stage(cfg.coding, cfg.registry)
    kind = args.kind
    if kind == "ris":
        return suites.ris(args.C or 16)
    if kind == "exactpair":
        p = W.build_exact_pair(st, reg, args.j, 8, args.theta, args.C or 3584)
        return {"gamma": p.gamma, "x": p.x, "j": p.j, "theta": p.theta, "groups": p.groups,
                "checks": p.checks, "rho": W.rho_interval(st, p, Fraction(args.theta, 2)), "pass": p.exact}
    fams = ["X", "Y"] * (args.length // 2) + ["X"] * (args.length % 2)
    ds = W.build_dependent_sequence(st, reg, args.length, args.theta, args.C or 3584, fams)
    if kind == "depseq":
        return {"weights": [st.node(g).j for g in ds.gammas], "gammas": ds.gammas, "xs": ds.xs,
                "clauses": W.dependent_clause_checks(st, ds),
                "pass": all(r["pass"] for r in W.dependent_clause_checks(st, ds))}
    if kind == "blowup":
        return W.blowup_witness(st, reg, ds)
    return W.hi_witness(st, reg, ds)


def cmd_verify(args, cfg):
    if args.suite == "all":
        return suites.run_all(cfg.seed, args.upto or 4)
    if args.suite == "section1":
        return suites.section1(args.upto or 4, cfg.seed)
    if args.suite == "l1":
        return suites.l1(cfg.seed)
    return suites.SUITES[args.suite]()


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="RunConfig JSON file", default=argparse.SUPPRESS)
    common.add_argument("--out", help="write the JSON report here", default=argparse.SUPPRESS)
    common.add_argument("--registry", help="append-only coding registry file", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--coding", choices=["toy", "strict"], default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="bdlab", parents=[common],
                                description="Finite-stage verification of BD-type constructions.")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda name, **kw: _add(name, parents=[common], **kw)

    s = sub.add_parser("schedule")
    s.add_argument("action", choices=["validate"])
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(func=cmd_schedule)

    s = sub.add_parser("stage")
    s.add_argument("action", choices=["build"])
    s.add_argument("--space", choices=["bmt", "xnr"], default="bmt")
    s.add_argument("--upto", type=int, default=6)
    s.add_argument("--dump", help="write the stage as JSON lines")
    s.set_defaults(func=cmd_stage)

    for name, func in (("coord", cmd_coord), ("norm", cmd_norm)):
        s = sub.add_parser(name)
        s.add_argument("--stage", help="stage file (JSON lines); default: the micro stage")
        s.add_argument("--space", choices=["bmt", "xnr"])
        if name == "coord":
            s.add_argument("--gamma", required=True)
            s.add_argument("--xi", required=True)
        else:
            s.add_argument("--vector", required=True)
            s.add_argument("--upto", type=int)
        s.set_defaults(func=func)

    for name, func in (("selfdet", cmd_selfdet), ("quotient", cmd_quotient)):
        s = sub.add_parser(name)
        s.add_argument("action", choices=["check"] if name == "selfdet" else ["build"])
        s.add_argument("--subset", required=True)
        s.add_argument("--stage")
        s.add_argument("--space", choices=["bmt", "xnr"])
        s.add_argument("--upto", type=int)
        if name == "quotient":
            s.add_argument("--dump")
        s.set_defaults(func=func)

    s = sub.add_parser("witness")
    s.add_argument("kind", choices=["ris", "exactpair", "depseq", "blowup", "hi"])
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--length", type=int, default=4)
    s.add_argument("--theta", type=int, default=1)
    s.add_argument("--C", type=int)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("verify")
    s.add_argument("suite", choices=["section1", "mt", "ris", "depseq", "c0sm", "analysis", "l1", "all"])
    s.add_argument("--upto", type=int)
    s.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_dict(_load_json(args.config)) if getattr(args, "config", None) else RunConfig()
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for k in ("out", "registry", "seed", "coding"):
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, v)
    try:
        result = args.func(args, cfg)
    except (CliError, StageError, bmt.AverageError, xnr.CodingError, W.WitnessError,
            schedule.ScheduleError, selfdet.SelfDetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    name = " ".join(str(getattr(args, k)) for k in ("command", "action", "suite", "kind") if getattr(args, k, None))
    shown = {k: v for k, v in cfg.to_dict().items() if k != "out"}
    report = reports.envelope(name, shown, result)
    text = reports.write(cfg.out, report)
    if not cfg.out and args.command not in ("coord", "norm"):
        sys.stdout.write(text)
    return 0 if report["pass"] else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
