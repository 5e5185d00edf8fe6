"""``splitmoment`` command-line entry point.

Exit codes: 0 success, 1 a selftest check failed, 2 invalid input or config.
"""

import argparse
import json
import math
import sys
import warnings
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .errors import CapacityError, DomainError
from .config import RunConfig, default_cache_path, load_config
from .lcentral import AFEConfig, LValueCache, l_half_afe, l_half_oracle, make_char
from .moment import (
    compare,
    compute_constants,
    empirical_moment,
    enumerate_family,
    main_term_polynomial,
    nonvanishing_scan,
    printed_polynomial,
)
from .quadfield import QuadraticField
from .reporting import RunManifest, atomic_write, export_plotdata, report_csv, report_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--field-d", type=int, dest="field_d")
    common.add_argument("--engine", choices=("afe", "oracle"))
    common.add_argument("--eps-tail", type=float, dest="eps_tail")
    common.add_argument("--workers", type=int, dest="worker_count")
    common.add_argument("--cache", dest="cache_path", help="L-value cache file")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the cache")
    common.add_argument("--output", dest="output_path", help="report directory")
    common.add_argument("--prime-cutoff", type=int, dest="prime_cutoff")
    common.add_argument("--Q", type=float, nargs="+", dest="Q_ladder", metavar="Q")

    p = argparse.ArgumentParser(prog="splitmoment", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("family", parents=[common], help="list family conductors up to X")
    f.add_argument("--X", type=int, dest="X")
    lv = sub.add_parser("lvalue", parents=[common], help="L(1/2, chi_q) by both engines")
    lv.add_argument("q", type=int, nargs="+")
    sub.add_parser("moment", parents=[common], help="empirical weighted moment")
    sub.add_parser("predict", parents=[common], help="constants and predicted main term")
    sub.add_parser("compare", parents=[common], help="write CSV/JSON comparison report")
    sc = sub.add_parser("scan", parents=[common], help="non-vanishing scan up to X")
    sc.add_argument("--X", type=int, dest="X")
    sc.add_argument("--threshold", type=float)
    st = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    st.add_argument("--only", type=int, nargs="+", help="check numbers to run")
    return p


_OVERRIDES = ("field_d", "engine", "eps_tail", "worker_count", "cache_path", "output_path",
              "prime_cutoff", "Q_ladder", "X", "threshold")


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config)
    kw = {k: getattr(args, k, None) for k in _OVERRIDES}
    if kw["Q_ladder"] is not None:
        kw["Q_ladder"] = tuple(kw["Q_ladder"])
    return cfg.with_overrides(**kw)


def _cache(cfg: RunConfig, args):
    if args.no_cache:
        return None
    return LValueCache(default_cache_path(cfg), cfg.field_d, cfg.eps_tail)


def _constants(cfg: RunConfig, K, manifest: RunManifest):
    with manifest.step("constants"):
        c = compute_constants(K, cfg.weight_spec(), prime_cutoff=cfg.prime_cutoff, k_max=cfg.k_max)
    if c.deriv_richardson_gap > 1e-6:
        manifest.warnings.append(f"C_K'(1) step sensitivity {c.deriv_richardson_gap:.1e}")
    return c


def cmd_family(cfg, args, out):
    K = QuadraticField(cfg.field_d)
    fam = enumerate_family(K, cfg.X)
    print(f"# {K}: {len(fam)} conductors q <= {cfg.X}", file=out)
    for q, w in zip(fam.q.tolist(), fam.omega.tolist()):
        print(f"{q} {w}", file=out)
    return EXIT_OK


def cmd_lvalue(cfg, args, out):
    acfg = AFEConfig(cfg.eps_tail)
    chars = [make_char(q) for q in args.q]
    print("q,afe,oracle,abs_diff", file=out)
    for q, chi in zip(args.q, chars):
        a = l_half_afe(chi, acfg)
        try:
            o = l_half_oracle(chi)
        except CapacityError:
            o = math.nan
        print(f"{q},{a!r},{o!r},{abs(a - o)!r}", file=out)
    return EXIT_OK


def cmd_moment(cfg, args, out):
    K = QuadraticField(cfg.field_d)
    cache = _cache(cfg, args)
    acfg = AFEConfig(cfg.eps_tail)
    print("Q,M_emp", file=out)
    for Q in cfg.Q_ladder:
        m = empirical_moment(K, Q, cfg.weight_spec(), cfg.engine, cache, acfg, cfg.worker_count)
        print(f"{Q!r},{m!r}", file=out)
    if cache is not None:
        cache.flush()
    return EXIT_OK


def cmd_predict(cfg, args, out):
    K = QuadraticField(cfg.field_d)
    manifest = RunManifest(cfg.config_hash())
    c = _constants(cfg, K, manifest)
    poly = main_term_polynomial(K, c)
    print(json.dumps({"constants": c.to_dict(), "polynomial": poly.to_dict()}, indent=2), file=out)
    pp, pm = printed_polynomial(c)
    print("# printed closed form minus residue (per parity, square pole):", file=out)
    for name, printed, res in (("+", pp, poly.square_plus), ("-", pm, poly.square_minus)):
        print(
            f"#  P{name}: slope diff {printed.slope - res.slope:+.6e}, "
            f"intercept diff {printed.intercept - res.intercept:+.6e}",
            file=out,
        )
    print("Q,M_pred,M_pred_square_only", file=out)
    for Q in cfg.Q_ladder:
        L = math.log(Q)
        print(f"{Q!r},{Q * poly.total(L)!r},{Q * poly.square_total(L)!r}", file=out)
    for w in manifest.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(cfg, args, out):
    K = QuadraticField(cfg.field_d)
    manifest = RunManifest(cfg.config_hash())
    c = _constants(cfg, K, manifest)
    cache = _cache(cfg, args)
    with manifest.step("moments"):
        rep = compare(K, cfg.Q_ladder, cfg.weight_spec(), cfg.engine, c,
                      AFEConfig(cfg.eps_tail), cfg.worker_count, cache)
    if cache is not None:
        cache.flush()
    outdir = Path(cfg.output_path)
    cutoffs = {"prime_cutoff": cfg.prime_cutoff, "k_max": cfg.k_max, "eps_tail": cfg.eps_tail}
    atomic_write(outdir / "compare.csv", report_csv(rep))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        export_plotdata(rep, outdir)
    manifest.warnings.extend(str(w.message) for w in caught)
    atomic_write(outdir / "compare.json", report_json(rep, manifest, cfg.to_dict(), cutoffs))
    out.write(report_csv(rep))
    print(f"# wrote {outdir / 'compare.csv'} and {outdir / 'compare.json'}", file=out)
    return EXIT_OK


def cmd_scan(cfg, args, out):
    K = QuadraticField(cfg.field_d)
    manifest = RunManifest(cfg.config_hash())
    with manifest.step("scan"):
        res = nonvanishing_scan(K, cfg.X, cfg.engine, cfg.threshold,
                                AFEConfig(cfg.eps_tail), cfg.worker_count)
    if res.witnesses:
        manifest.warnings.append(f"{len(res.witnesses)} members at or below threshold")
    payload = {"scan": asdict(res), "provenance": {"manifest": manifest.to_dict(), "config": cfg.to_dict()}}
    atomic_write(Path(cfg.output_path) / "scan.json", json.dumps(payload, indent=2, sort_keys=True))
    print(
        f"{res.nonzero_count}/{res.family_size} with |L| > {res.threshold:g}; "
        f"min |L| = {res.min_abs_value:.6e} at q = {res.argmin_q}",
        file=out,
    )
    for q, v in res.witnesses:
        print(f"witness q={q} L={v!r}", file=out)
    return EXIT_OK


def cmd_selftest(cfg, args, out):
    from .checks import run_all

    results = []
    for r in run_all(set(args.only) if args.only else None):
        print(r.line(), file=out, flush=True)
        results.append(r)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed", file=out)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "family": cmd_family,
    "lvalue": cmd_lvalue,
    "moment": cmd_moment,
    "predict": cmd_predict,
    "compare": cmd_compare,
    "scan": cmd_scan,
    "selftest": cmd_selftest,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = _build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args, out)
    except (DomainError, CapacityError, FileNotFoundError, json.JSONDecodeError, TypeError) as exc:
        print(f"splitmoment: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
