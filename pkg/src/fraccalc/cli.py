"""Command-line front end: frac-int, verify, sweep, probe and norm.

Exit codes: 0 success, 2 usage error, 3 invariant violation, 4 check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .corpus import AnalyticFunction, parse_function, sample
from .derivative import (check_caputo_duality, check_ftc, check_marchaud_equiv,
                         check_representability)
from .grid import Grid, GridFunction, Interval, frac_order, write_csv
from .inequalities import (check_critical_power, check_embedding_catalogue, check_hardy,
                           check_higher_order, check_l1_bound, check_linf_bound, check_power_rule,
                           check_sobolev_action, check_weak_lp_embedding, check_weak_type)
from .integral import (OracleError, Side, check_duality, check_reflection, check_semigroup,
                       frac_int, sweep_s_to_0)
from .measures import (BVFunction, RadonMeasure, bv_corpus, check_atom_detection,
                       check_bv_embedding, check_bv_sup_bound, check_ftc_bv, check_measure_duality,
                       check_weak_type_measure, frac_int_measure, hat_panel, sweep_rows_csv,
                       sweep_s_to_1)
from .norms import (NormReport, gagliardo_seminorm, hardy_quotient, holder_seminorm, lp_norm,
                    rl_sobolev_norm, weak_lp_quasinorm)
from .probes import PROBES, probe_csv, run_probe
from .report import VerificationReport, Verdict

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_FAIL = 0, 2, 3, 4

TO1_DEFAULT = (0.5, 0.7, 0.9, 0.95, 0.99)
TO0_DEFAULT = (0.5, 0.1, 0.01, 0.001)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- campaign configuration --------------------------------------------------------------

@dataclass
class CampaignConfig:
    """Settings shared by every check in a ``verify`` run.

    Read from JSON or from ``key = value`` lines (``#`` starts a comment, lists
    are comma separated).  Keys: a, b, ladder, s_values, p_values, corpus,
    checks, output_dir, seed.
    """

    a: float = 0.0
    b: float = 1.0
    ladder: list = field(default_factory=lambda: [256, 1024, 4096])
    s_values: list = field(default_factory=lambda: [0.5])
    p_values: list = field(default_factory=lambda: [1.0])
    corpus: list = field(default_factory=lambda: ["cosine"])
    checks: list = field(default_factory=list)
    output_dir: str | None = None
    seed: int = 0

    _LISTS = {"ladder": int, "s_values": float, "p_values": float, "corpus": str, "checks": str}

    def __post_init__(self):
        self.ladder = [int(n) for n in self.ladder]
        if not self.ladder or any(n < 8 for n in self.ladder):
            raise UsageError("ladder needs grid sizes >= 8")
        if any(m <= n for n, m in zip(self.ladder, self.ladder[1:])):
            raise UsageError("ladder must be strictly increasing")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s) {unknown}; valid: {', '.join(CHECKS)}")
        if not self.a < self.b:
            raise UsageError("need a < b")

    @property
    def interval(self) -> Interval:
        return Interval(float(self.a), float(self.b))

    def functions(self) -> list[AnalyticFunction]:
        return [_parse_fn(t, self.interval) for t in self.corpus]

    @classmethod
    def load(cls, path: str | os.PathLike) -> "CampaignConfig":
        text = Path(path).read_text(encoding="utf-8")
        try:
            raw = json.loads(text)
        except json.JSONDecodeError:
            raw = cls._parse_kv(text)
        if not isinstance(raw, dict):
            raise UsageError("config must be a mapping")
        known = {"a", "b", "ladder", "s_values", "p_values", "corpus", "checks", "output_dir", "seed"}
        extra = set(raw) - known
        if extra:
            raise UsageError(f"unknown config keys: {sorted(extra)}")
        return cls(**raw)

    @classmethod
    def _parse_kv(cls, text: str) -> dict:
        out = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line {lineno}: expected key = value")
            key, val = (p.strip() for p in line.split("=", 1))
            if key in cls._LISTS:
                conv = cls._LISTS[key]
                out[key] = [conv(v.strip()) for v in val.split(",") if v.strip()]
            elif key in ("a", "b"):
                out[key] = float(val)
            elif key == "seed":
                out[key] = int(val)
            else:
                out[key] = val
        return out


def _parse_fn(spec: str, interval: Interval) -> AnalyticFunction:
    try:
        return parse_function(spec, interval)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad function spec {spec!r}: {exc}") from exc


# -- check registry ------------------------------------------------------------------------

Task = Callable[[], VerificationReport]


@dataclass(frozen=True)
class _Bubble:
    """4 (x-a)(b-x)/L^2, a test function vanishing at both ends."""

    interval: Interval

    @property
    def label(self) -> str:
        return "bubble"

    def __call__(self, grid: Grid) -> GridFunction:
        x, iv = grid.nodes, self.interval
        return GridFunction(grid, 4.0 * (x - iv.a) * (iv.b - x) / iv.length ** 2)


def _each(cfg, fn):
    return [lambda f=f, s=s: fn(f, s) for f in cfg.functions() for s in cfg.s_values]


def _measure_source(f: AnalyticFunction):
    iv = f.interval
    t = iv.a + 0.3 * iv.length

    def make(g: Grid) -> RadonMeasure:
        return RadonMeasure(sample(f, g), ((t, 1.0),), f"{f.label}+delta", (), iv)

    return make


def _sobolev_tasks(cfg):
    tasks = []
    for tag in ("linear", "power:3", "sine"):
        f = _parse_fn(tag, cfg.interval)
        for s in cfg.s_values:
            for p in cfg.p_values:
                if s * p < 1:
                    tasks.append(lambda f=f, s=s, p=p: check_sobolev_action(f, s, p))
    return tasks


def _to1_tasks(cfg):
    iv = cfg.interval
    members = [_bv_from_spec("jump:0.5", iv), _bv_from_spec("constant:1", iv)]
    return [lambda u=u: sweep_s_to_1(u, hat_panel(iv), TO1_DEFAULT) for u in members]


CHECKS: dict[str, Callable[[CampaignConfig], list[Task]]] = {
    "semigroup": lambda c: _each(c, lambda f, s: check_semigroup(f, s, 0.5 * s, c.ladder)),
    "reflection": lambda c: _each(c, lambda f, s: check_reflection(f, s, c.ladder)),
    "duality": lambda c: _each(c, lambda f, s: check_duality(f, _parse_fn("sine", c.interval), s, c.ladder)),
    "measure-duality": lambda c: _each(c, lambda f, s: check_measure_duality(
        _measure_source(f), _parse_fn("sine", c.interval), s, c.ladder, c.interval, f"{f.label}+delta")),
    "caputo-duality": lambda c: _each(c, lambda f, s: check_caputo_duality(f, _Bubble(c.interval), s, c.ladder)),
    "ftc": lambda c: _each(c, lambda f, s: check_ftc(f, s, c.ladder)),
    "marchaud": lambda c: _each(c, lambda f, s: check_marchaud_equiv(f, s, c.ladder)),
    "representability": lambda c: [lambda f=f, s=s, p=p: check_representability(f, s, p, c.ladder)
                                    for f in c.functions() for s in c.s_values for p in c.p_values],
    "critical-power": lambda c: [lambda s=s: check_critical_power(s, c.ladder) for s in c.s_values],
    "power-rule": lambda c: [lambda m=m, s=s: check_power_rule(m, s) for m, s in ((1.0, 0.5), (2.0, 0.3), (1.5, 0.7))],
    "l1-bound": lambda c: [lambda: check_l1_bound(seeds=range(c.seed, c.seed + 20))],
    "linf-bound": lambda c: [lambda: check_linf_bound(seeds=range(c.seed, c.seed + 20))],
    "weak-type": lambda c: [lambda s=s: check_weak_type(s, ladder=c.ladder) for s in c.s_values],
    "weak-type-measure": lambda c: [lambda s=s: check_weak_type_measure(
        c.interval.a + 0.5 * c.interval.length, s, c.ladder, c.interval) for s in c.s_values],
    "bv-embedding": lambda c: [lambda u=u, s=s: check_bv_embedding(u, s) for u in bv_corpus(c.interval) for s in c.s_values],
    "bv-sup-bound": lambda c: [lambda u=u: check_bv_sup_bound(u) for u in bv_corpus(c.interval)],
    "ftc-bv": lambda c: [lambda s=s: check_ftc_bv(AnalyticFunction.make("shifted-critical", 0.25, 0.75, 0.5), s)
                         for s in c.s_values],
    "atom-detection": lambda c: [check_atom_detection],
    "s-to-0": lambda c: [lambda f=f: sweep_s_to_0(f, TO0_DEFAULT) for f in c.functions()],
    "s-to-1": _to1_tasks,
    "sobolev-action": _sobolev_tasks,
    "higher-order": lambda c: [check_higher_order],
    "hardy": lambda c: [lambda s=s: check_hardy(s, 1.0, c.ladder) for s in c.s_values],
    "weak-lp-embedding": lambda c: [check_weak_lp_embedding],
    "embedding-catalogue": lambda c: [lambda s=s: check_embedding_catalogue(s, c.ladder) for s in c.s_values],
}

# checks whose verdict rests on an explicit constant; without --strict-constants only finiteness is asserted
CONSTANT_CHECKS = frozenset({"l1-bound", "linf-bound", "bv-embedding", "sobolev-action", "weak-lp-embedding"})


def _relax(report: VerificationReport) -> VerificationReport:
    finite = all(math.isfinite(e) for e in report.errors)
    report.details = {**report.details, "constant_verdict": report.verdict.value, "constant_asserted": False}
    report.verdict = Verdict.PASS if finite else Verdict.FAIL
    return report


def thread_count() -> int:
    raw = os.environ.get("FRACCALC_THREADS")
    if raw is None or raw == "":
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"FRACCALC_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"FRACCALC_THREADS must be a positive integer, got {raw!r}")
    return n


def run_campaign(cfg: CampaignConfig, strict: bool = False, threads: int | None = None) -> list[tuple[str, VerificationReport]]:
    """Run every configured check; results come back in config order whatever the thread count."""
    jobs = [(name, task) for name in cfg.checks for task in CHECKS[name](cfg)]
    threads = threads or thread_count()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(task) for _, task in jobs]
        reports = [f.result() for f in futures]
    out = []
    for (name, _), rep in zip(jobs, reports):
        out.append((name, rep if strict or name not in CONSTANT_CHECKS else _relax(rep)))
    return out


def campaign_json(results, strict: bool) -> str:
    doc = {
        "strict_constants": strict,
        "ok": all(r.ok for _, r in results),
        "reports": [{"check": name, **r.to_dict()} for name, r in results],
    }
    return json.dumps(doc, indent=2) + "\n"


def campaign_csv(results) -> str:
    lines = ["check,identity,verdict,final_error"]
    for name, r in results:
        last = f"{r.errors[-1]:.17g}" if r.errors else ""
        lines.append(f"{name},{r.identity},{r.verdict.value},{last}")
    return "\n".join(lines) + "\n"


def _write(path: str | os.PathLike, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# -- subcommands ------------------------------------------------------------------------------

def _lenient_json(text: str):
    """JSON, also accepting bare object keys as in {atoms:[{t:0.5,w:1}]}."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    quoted = re.sub(r'([{,]\s*)([A-Za-z_]\w*)\s*:', r'\1"\2":', text)
    try:
        return json.loads(quoted)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse --measure: {exc}") from exc


def cmd_frac_int(args) -> int:
    if args.fn is None and args.measure is None:
        raise UsageError("frac-int needs --fn and/or --measure")
    if args.n < 1:
        raise ValueError("--n must be positive")
    s = frac_order(args.s)
    side = Side.parse(args.side)
    iv = Interval(args.a, args.b)
    g = Grid(iv, args.n)
    out = GridFunction.zeros(g)
    if args.fn is not None:
        out = frac_int(sample(_parse_fn(args.fn, iv), g), s, side)
    if args.measure is not None:
        if side is not Side.LEFT:
            raise UsageError("--measure supports --side left only")
        raw = _lenient_json(args.measure)
        atoms = tuple((float(a["t"]), float(a["w"])) for a in raw.get("atoms", []))
        m = RadonMeasure(None, atoms, "cli", (), iv)
        im = frac_int_measure(m, s, g)
        out = im if args.fn is None else GridFunction(g, out.values + im.values, flags={**out.flags, **im.flags})
    text = write_csv(out)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.list:
        sys.stdout.write("checks:\n" + "".join(f"  {c}\n" for c in CHECKS))
        sys.stdout.write("probes:\n" + "".join(f"  {c}\n" for c in PROBES))
        return EXIT_OK
    cfg = CampaignConfig.load(args.config) if args.config else CampaignConfig()
    names = [c for spec in (args.check or []) for c in spec.split(",") if c]
    if names:
        cfg.checks = names
    if args.fn:
        cfg.corpus = list(args.fn)
    cfg.__post_init__()
    if not cfg.checks:
        raise UsageError(f"no checks selected; valid: {', '.join(CHECKS)}")
    results = run_campaign(cfg, strict=args.strict_constants)
    text = campaign_json(results, args.strict_constants)
    if cfg.output_dir:
        _write(Path(cfg.output_dir) / "reports.json", text)
        _write(Path(cfg.output_dir) / "summary.csv", campaign_csv(results))
    sys.stdout.write(text)
    return EXIT_OK if all(r.ok for _, r in results) else EXIT_FAIL


def _bv_from_spec(spec: str, iv: Interval) -> BVFunction:
    """BV data for the s -> 1 sweep: ``jump:c`` or a tag with an explicit distributional derivative."""
    parts = spec.split(":")
    tag, params = parts[0], [float(p) for p in parts[1:]]
    if tag == "jump":
        if len(params) != 1:
            raise UsageError("jump takes one parameter, the jump location")
        return BVFunction(jumps=((params[0], 1.0),), interval=iv, label=spec)
    if tag == "zero":
        return BVFunction(interval=iv, label=spec)
    if tag == "constant":
        return BVFunction(params[0] if params else 1.0, interval=iv, label=spec)
    if tag == "linear":
        return BVFunction(ac_slope=AnalyticFunction.make("constant", 1.0, interval=iv), interval=iv, label=spec)
    if tag == "indicator":
        c, d = params
        return BVFunction(jumps=((c, 1.0), (d, -1.0)), interval=iv, label=spec)
    if tag == "cantor":
        return BVFunction(cantor_stage=int(params[0]), interval=iv, label=spec)
    if tag == "sine":
        slope = AnalyticFunction.make("cosine", interval=iv)
        return BVFunction(math.sin(iv.a), ac_slope=slope, interval=iv, label=spec)
    raise UsageError(f"no BV representation for {spec!r}; use jump:c, zero, constant, linear, indicator, cantor or sine")


def cmd_sweep(args) -> int:
    iv = Interval(args.a, args.b)
    if args.direction == "to1":
        s_list = args.s_list or list(TO1_DEFAULT)
        rep = sweep_s_to_1(_bv_from_spec(args.fn, iv), hat_panel(iv), s_list, n_min=args.n or 256)
    else:
        s_list = args.s_list or list(TO0_DEFAULT)
        rep = sweep_s_to_0(_parse_fn(args.fn, iv), s_list, n=args.n or 4096)
    if args.out:
        _write(args.out, sweep_rows_csv(rep))
    sys.stdout.write(rep.to_json())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_probe(args) -> int:
    if args.case not in PROBES:
        raise UsageError(f"unknown case {args.case!r}; valid: {', '.join(PROBES)}")
    kw = {}
    if args.s is not None:
        kw["s"] = args.s
    if args.beta is not None:
        if args.case != "emb-p1-sharp":
            raise UsageError("--beta applies to emb-p1-sharp only")
        kw["beta"] = args.beta
    rep = run_probe(args.case, **kw)
    if args.out:
        _write(args.out, probe_csv(rep))
    sys.stdout.write(rep.to_json())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_norm(args) -> int:
    iv = Interval(args.a, args.b)
    u = sample(_parse_fn(args.fn, iv), Grid(iv, args.n))
    try:
        if args.kind == "gagliardo":
            rep = gagliardo_seminorm(u, frac_order(args.s), args.p)
        elif args.kind == "rl-sobolev":
            rep = rl_sobolev_norm(u, frac_order(args.s), args.p)
        else:
            if args.kind == "lp":
                val, params = lp_norm(u, args.p), {"p": args.p}
            elif args.kind == "weak-lp":
                val, params = weak_lp_quasinorm(u, args.p), {"p": args.p}
            elif args.kind == "holder":
                if args.beta is None:
                    raise UsageError("holder needs --beta")
                val, params = holder_seminorm(u, args.beta), {"beta": args.beta}
            else:
                val, params = hardy_quotient(u, frac_order(args.s), args.p), {"s": args.s, "p": args.p}
            rep = NormReport(args.kind, {"fn": args.fn, "n": args.n, **params}, val)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(rep.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fraccalc", description="Fractional integrals and derivatives on uniform grids.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def interval_args(q):
        q.add_argument("--a", type=float, default=0.0)
        q.add_argument("--b", type=float, default=1.0)

    q = sub.add_parser("frac-int", help="fractional integral of a corpus function or measure, as CSV")
    interval_args(q)
    q.add_argument("--n", type=int, default=1024)
    q.add_argument("--s", type=float, required=True)
    q.add_argument("--side", default="left", choices=["left", "right"])
    q.add_argument("--fn", help="tag:params, e.g. constant:1 or critical-power:0.5")
    q.add_argument("--measure", help="atoms as JSON, e.g. {atoms:[{t:0.5,w:1}]}")
    q.add_argument("--out")
    q.set_defaults(func=cmd_frac_int)

    q = sub.add_parser("verify", help="run verification checks")
    q.add_argument("--check", action="append", help="check name (repeatable or comma separated)")
    q.add_argument("--config", help="JSON or key = value campaign file")
    q.add_argument("--fn", action="append", help="override the corpus (repeatable)")
    q.add_argument("--list", action="store_true", help="list checks and probe cases")
    q.add_argument("--strict-constants", action="store_true", help="also assert explicit constants")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("sweep", help="s -> 0 or s -> 1 sweeps")
    interval_args(q)
    q.add_argument("--direction", required=True, choices=["to0", "to1"])
    q.add_argument("--fn", required=True)
    q.add_argument("--s-list", type=float, nargs="+")
    q.add_argument("--n", type=int)
    q.add_argument("--out", help="CSV s,value,target,gap")
    q.set_defaults(func=cmd_sweep)

    q = sub.add_parser("probe", help="divergence probes and counterexamples")
    q.add_argument("--case", required=True)
    q.add_argument("--s", type=float)
    q.add_argument("--beta", type=float)
    q.add_argument("--out", help="ladder CSV")
    q.set_defaults(func=cmd_probe)

    q = sub.add_parser("norm", help="norms and seminorms of a corpus function")
    interval_args(q)
    q.add_argument("--kind", required=True, choices=["lp", "weak-lp", "gagliardo", "holder", "rl-sobolev", "hardy"])
    q.add_argument("--fn", required=True)
    q.add_argument("--p", type=float, default=1.0)
    q.add_argument("--s", type=float, default=0.5)
    q.add_argument("--beta", type=float)
    q.add_argument("--n", type=int, default=4096)
    q.set_defaults(func=cmd_norm)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required: frac-int, verify, sweep, probe or norm")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OracleError, ArithmeticError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
