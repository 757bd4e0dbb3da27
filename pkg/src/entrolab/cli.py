"""Command-line front end: build, analyze, sweep, verify.

Exit codes: 0 success, 1 failing verify suite, 2 schema violations in a
config/description file, 3 parameter or invariant violations.  Output files
are written atomically (temp file + rename), so no partial files survive an
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__, kernels
from .constructions import ParameterError, build_construction, describe
from .entropy import EntropyReport, devaney_report
from .graph import GraphError
from .markov import InvariantError
from .textio import ExperimentConfig, SchemaError, dump_system, parse_config
from .verify import run_suite


def _write_atomic(path: str, data: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".entrolab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(data: str, out: str | None):
    if out:
        _write_atomic(out, data)
    else:
        sys.stdout.write(data)


def _load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _frac_str(x) -> str:
    return str(Fraction(x))


def _report_dict(rep: EntropyReport, provenance: dict) -> dict:
    freq = {"value": _frac_str(rep.frequency.value),
            "witness": [rep.labels[i] for i in rep.frequency.witness],
            "kept": sorted(rep.kept)}
    d = {
        "provenance": provenance,
        "system": {"name": rep.name,
                   "meta": {k: (_frac_str(v) if isinstance(v, Fraction) else v)
                            for k, v in rep.meta.items() if k != "kept_names"},
                   "pieces": rep.labels,
                   "stretch_profile": {k: _frac_str(v) for k, v in rep.profile.items()}},
        "transition": {"matrix": rep.matrix, "covering": rep.covering,
                       "irreducible": rep.irreducible, "period": rep.period,
                       "primitive": rep.primitive,
                       "expansion_margin": rep.expansion_margin},
        "entropy": {"perron_entropy": rep.perron_entropy,
                    "perron_error": rep.perron_error,
                    "lipschitz_bound": rep.lipschitz_bound,
                    "piecewise_bound": rep.piecewise_bound,
                    "piecewise_bound_single_factor": rep.piecewise_bound_single_factor,
                    "outside_frequency": freq},
        "classification": rep.classification,
        "classification_note": rep.classification_note,
        "periodic_certificates": [
            {"piece": c.piece, "point": repr(c.point), "period": c.period,
             "radius": _frac_str(c.distance_bound)} for c in rep.certificates],
    }
    if rep.bowen is not None:
        d["bowen"] = {
            "estimate": rep.bowen.estimate,
            "flat": rep.bowen.flat,
            "params": rep.bowen.params,
            "per_eps": [{"eps": _frac_str(x.eps), "refine": x.refine,
                         "ns": x.ns, "grid_sizes": x.grid_sizes,
                         "counts": x.counts, "slope": x.slope,
                         "residual": x.residual,
                         "fit_range": list(x.fit_range)} for x in rep.bowen.per_eps],
        }
    return d


def _provenance(cfg_echo: dict) -> dict:
    return {"schema": "entrolab-report v1", "version": __version__,
            "kernel": kernels.IMPL, "config": cfg_echo}


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {"kind": cfg.kind,
            "params": {k: (_frac_str(v) if isinstance(v, Fraction) else v)
                       for k, v in cfg.params.items()},
            "eps": [_frac_str(e) for e in cfg.eps_list] if cfg.eps_list else None,
            "nmax": cfg.n_max, "grid": _frac_str(cfg.grid),
            "budget": cfg.budget, "analyses": list(cfg.analyses),
            "kept": cfg.kept, "resolution": _frac_str(cfg.resolution)}


def cmd_build(args) -> int:
    cfg = _load_config(args.config)
    f = cfg.build_system()
    text = dump_system(f)
    text += "\n# " + describe(f).replace("\n", "\n# ") + "\n"
    _emit(text, args.out)
    return 0


def cmd_analyze(args) -> int:
    cfg = _load_config(args.config)
    f = cfg.build_system()
    kept = None
    if cfg.kept:
        kept = [f.splitting.piece_index(nm) for nm in cfg.kept]
    rep = devaney_report(
        f, eps_list=cfg.eps_list, n_max=cfg.n_max, budget=cfg.budget,
        run_bowen="bowen" in cfg.analyses, classify="classify" in cfg.analyses,
        resolution=cfg.resolution, targets_per_piece=cfg.targets, kept=kept)
    data = json.dumps(_report_dict(rep, _provenance(_config_echo(cfg))),
                      sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.counts_out:
        if rep.bowen is None:
            raise ParameterError("--counts-out needs the bowen analysis enabled")
        rows = ["eps,n,grid_size,count"]
        rows += ["%s,%d,%d,%d" % (_frac_str(eps), n, gs, c)
                 for eps, n, gs, c in rep.bowen.count_table()]
        _write_atomic(args.counts_out, "\n".join(rows) + "\n")
    _emit(data, args.out)
    return 0


_SWEEP_PARAM = {"tent": "k", "star_devaney": "k", "star_exact": "k",
                "star_minimal": "n", "free_arc_cycle": "k",
                "arr_example": "n", "two_piece_swap": "m"}

_CSV_HEADER = ("param,pieces,exact,perron_entropy,perron_error,lipschitz_bound,"
               "piecewise_bound,piecewise_bound_single_factor,outside_frequency,"
               "max_stretch,bowen_estimate")


def _sweep_row(kind: str, value: int, extra: dict, with_bowen: bool,
               eps_list, n_max, budget) -> str:
    params = dict(extra)
    params[_SWEEP_PARAM[kind]] = value
    f = build_construction(kind, **params)
    rep = devaney_report(f, eps_list=eps_list, n_max=n_max, budget=budget,
                         run_bowen=with_bowen, classify=False)
    exact = "true" if rep.primitive else "false"
    bowen = repr(rep.bowen.estimate) if rep.bowen is not None else ""
    return ",".join([
        str(value), str(len(rep.labels)), exact,
        repr(rep.perron_entropy), repr(rep.perron_error),
        repr(rep.lipschitz_bound), repr(rep.piecewise_bound),
        repr(rep.piecewise_bound_single_factor),
        _frac_str(rep.frequency.value),
        _frac_str(max(rep.profile.values())), bowen])


def cmd_sweep(args) -> int:
    if args.config:
        cfg = _load_config(args.config)
        kind = cfg.kind
        if cfg.sweep_range is None:
            raise SchemaError("sweep config needs a 'range' key")
        lo, hi = cfg.sweep_range
        extra = {k: v for k, v in cfg.params.items() if k != _SWEEP_PARAM[kind]}
        eps_list, n_max, budget = cfg.eps_list, cfg.n_max, cfg.budget
        with_bowen = "bowen" in cfg.analyses and args.bowen
    else:
        kind = args.kind
        if kind not in _SWEEP_PARAM:
            raise ParameterError("unknown construction kind %r" % kind)
        lo, hi = _parse_range(args.range)
        extra = {}
        if args.m is not None:
            extra["m"] = args.m
        if args.exact:
            extra["exact"] = True
        if args.shape:
            extra["shape"] = args.shape
        eps_list, n_max, budget = None, None, 60_000
        with_bowen = args.bowen
    values = list(range(lo, hi + 1))
    workers = max(1, int(os.environ.get("ENTROLAB_THREADS", "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(
                lambda v: _sweep_row(kind, v, extra, with_bowen, eps_list,
                                     n_max, budget), values))
    else:
        rows = [_sweep_row(kind, v, extra, with_bowen, eps_list, n_max, budget)
                for v in values]
    data = _CSV_HEADER + "\n" + "\n".join(rows) + "\n"
    _emit(data, args.out)
    return 0


def _parse_range(text: str) -> tuple[int, int]:
    if ".." not in text:
        raise ParameterError("range must look like 2..32")
    a, b = text.split("..", 1)
    lo, hi = int(a), int(b)
    if hi < lo:
        raise ParameterError("empty range %s" % text)
    return lo, hi


def cmd_verify(args) -> int:
    ok = run_suite(args.suite)
    return 0 if ok else 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="entrolab",
        description="piecewise-Lipschitz Markov dynamics on metric graphs")
    sub = ap.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="elaborate a system description")
    b.add_argument("--config", required=True)
    b.add_argument("--out")
    b.set_defaults(fn=cmd_build)

    a = sub.add_parser("analyze", help="full JSON report for one system")
    a.add_argument("--config", required=True)
    a.add_argument("--out")
    a.add_argument("--counts-out",
                   help="also write the per-(eps, n) separated-count table as CSV")
    a.set_defaults(fn=cmd_analyze)

    s = sub.add_parser("sweep", help="CSV over a parameter range")
    s.add_argument("--config")
    s.add_argument("--kind")
    s.add_argument("--range", help="inclusive range like 2..32")
    s.add_argument("--m", type=int)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--shape")
    s.add_argument("--bowen", action="store_true",
                   help="also run the (slow) separated-set estimate per row")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)

    v = sub.add_parser("verify", help="run a named invariant suite")
    v.add_argument("--suite", default="all")
    v.set_defaults(fn=cmd_verify)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print("schema error: %s" % exc, file=sys.stderr)
        return 2
    except (GraphError, InvariantError, ParameterError) as exc:
        print("invalid system: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
