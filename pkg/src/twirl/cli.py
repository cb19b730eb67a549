"""Batch driver: config parsing, pipeline orchestration, table and report
emission, and the self-test runner.

Config files are INI-style:

    [field]
    p = 5
    e = 1
    eisenstein = -5,1
    precision = 16

    [pipeline]
    regime = odd
    k_max = 6
    depth_m = 3
    b_window = 12
    gamma_depth = 5
    unit_depth = 2
    workers = 1

    [output]
    format = json

    [selftest]
    seed = 7

Exit codes: 0 success, 2 honest-truncation failure (TailNonzero or
NoStabilization), 1 any other error.  TWIRL_OUTPUT_DIR overrides output
directories; no other environment variables are read.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

from .errors import NoStabilization, TailNonzero, TwirlError
from .integrator import (
    TruncationSpec,
    assemble_coefficients,
    coefficient_A_B,
    orbit_weight_integral,
    rg_term,
)
from .localfield import make_field, parse_elem, square_class_reps
from .matlattice import Mat, delta_vector, orthogonal_form
from .residue import residue_report
from .supercuspidal import CuspidalData, support_scan
from .twisted import TorusElem, norm_preimage, twisted_discriminant
from .weights import WeightQuery, weight_closed, weight_oracle


@dataclass
class RunConfig:
    ctx: object
    regime: str
    trunc: TruncationSpec
    out_format: str
    out_path: str | None
    seed: int

    @staticmethod
    def load(path: str) -> "RunConfig":
        cp = configparser.ConfigParser()
        with open(path) as fh:
            cp.read_file(fh)
        f = cp["field"]
        ctx = make_field(
            int(f["p"]),
            int(f["e"]),
            tuple(int(c) for c in f["eisenstein"].split(",")),
            int(f["precision"]),
        )
        pl = cp["pipeline"] if cp.has_section("pipeline") else {}
        regime = pl.get("regime", "odd" if ctx.p != 2 else "even")
        if regime == "even" and not (ctx.p == 2 and ctx.e >= 2):
            raise TwirlError("even regime requires p = 2 with ramification >= 2")
        trunc = TruncationSpec(
            depth_m=int(pl.get("depth_m", 3)),
            b_window=int(pl.get("b_window", 12)),
            e_window=int(pl.get("e_window", 8)),
            gamma_depth=int(pl.get("gamma_depth", 5)),
            k_max=int(pl.get("k_max", 8)),
            unit_depth=int(pl.get("unit_depth", 2)),
            dedup=pl.get("dedup", "true").lower() != "false",
            workers=int(pl.get("workers", 1)),
        )
        if trunc.k_max < 0 or trunc.gamma_depth < 1 or trunc.b_window < 1:
            raise TwirlError("pipeline windows must be positive")
        out = cp["output"] if cp.has_section("output") else {}
        fmt = out.get("format", "json")
        path_out = out.get("path")
        if path_out and os.environ.get("TWIRL_OUTPUT_DIR"):
            path_out = os.path.join(os.environ["TWIRL_OUTPUT_DIR"],
                                    os.path.basename(path_out))
        seed = int(cp["selftest"].get("seed", 7)) if cp.has_section("selftest") else 7
        return RunConfig(ctx, regime, trunc, fmt, path_out, seed)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _coeff_csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    p = table.values[0].p
    header = ["k"] + [f"coord{i}" for i in range(p - 1)] + ["q_half_power"]
    w.writerow(header)
    for k in table.ks:
        v = table.values[k]
        w.writerow([k] + [str(c) for c in v.coords] + [0])
    return buf.getvalue()


def cmd_wfactor(cfg: RunConfig, args) -> int:
    import random

    rng = random.Random(cfg.seed)
    ctx = cfg.ctx
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "delta_vector", "closed", "oracle", "match"])
    n, rank = 2, 1
    for _ in range(args.count):
        g = Mat.random(ctx, n, rng)
        k = rng.randrange(-2, 4)
        q = WeightQuery(g, k, rank)
        closed = weight_closed(q)
        oracle = weight_oracle(q)
        w.writerow([k, " ".join(str(d) for d in delta_vector(g, rank)),
                    closed, oracle, int(closed == oracle)])
    # the pinned k < 0 identity row
    q = WeightQuery(Mat.identity(ctx, n), -1, rank)
    w.writerow([-1, "0", weight_closed(q), weight_oracle(q), 1])
    _emit(buf.getvalue(), args.out or cfg.out_path)
    return 0


def cmd_dtwist(cfg: RunConfig, args) -> int:
    ctx = cfg.ctx
    form = orthogonal_form(ctx, 2)
    alpha = parse_elem(ctx, args.alpha)
    gamma = TorusElem(alpha)
    s = norm_preimage(gamma, form)
    rep = twisted_discriminant(s.inverse(), form)
    out = rep.to_json()
    out["alpha"] = args.alpha
    _emit(_json_dump(out), args.out or cfg.out_path)
    return 0


def cmd_support_scan(cfg: RunConfig, args) -> int:
    ctx = cfg.ctx
    form = orthogonal_form(ctx, 2)
    data = CuspidalData(ctx)
    alpha = parse_elem(ctx, args.alpha)
    rep = support_scan(data, form, TorusElem(alpha), depth=args.depth)
    _emit(_json_dump(rep.to_json()), args.out or cfg.out_path)
    return 0


def cmd_psik(cfg: RunConfig, args) -> int:
    ctx = cfg.ctx
    form = orthogonal_form(ctx, 2)
    data = CuspidalData(ctx)
    alpha = parse_elem(ctx, args.alpha)
    ks = range(0, cfg.trunc.k_max + 1)
    table, _ = orbit_weight_integral(data, form, TorusElem(alpha), ks,
                                     cfg.trunc)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    p = ctx.p
    w.writerow(["k"] + [f"coord{i}" for i in range(p - 1)] + ["q_half_power"])
    for k in ks:
        w.writerow([k] + [str(c) for c in table[k].coords] + [0])
    _emit(buf.getvalue(), args.out or cfg.out_path)
    return 0


def cmd_coeffs(cfg: RunConfig, args) -> int:
    data = CuspidalData(cfg.ctx)
    form = orthogonal_form(cfg.ctx, 2)
    table = assemble_coefficients(data, form, cfg.trunc)
    if cfg.out_format == "csv":
        _emit(_coeff_csv(table), args.out or cfg.out_path)
    else:
        _emit(_json_dump(table.to_json()), args.out or cfg.out_path)
    return 0


def cmd_rg_term(cfg: RunConfig, args) -> int:
    data = CuspidalData(cfg.ctx)
    form = orthogonal_form(cfg.ctx, 2)
    val = rg_term(data, form, cfg.trunc)
    scs = square_class_reps(cfg.ctx)
    out = {
        "rg": val.to_json(),
        "unit_square_classes": scs.card_units,
        "note": "c_k = (4k+1) * 2 * |O^x/(O^x)^2| * rg in the factorized regime",
    }
    _emit(_json_dump(out), args.out or cfg.out_path)
    return 0


def cmd_residue(cfg: RunConfig, args) -> int:
    data = CuspidalData(cfg.ctx)
    form = orthogonal_form(cfg.ctx, 2)
    table = assemble_coefficients(data, form, cfg.trunc)
    coeffs = [table.values[k] for k in table.ks]
    rep = residue_report(coeffs, n=2, q=cfg.ctx.q)
    out = rep.to_json()
    out["metadata"] = table.metadata
    if cfg.ctx.p == 2 and cfg.ctx.e >= 2:
        a, b, incs = coefficient_A_B(data, form, cfg.trunc)
        out["weight_only_constants"] = {
            "A": str(a),
            "B": str(b),
            "per_e_increments": [[e, str(ai), str(bi)] for e, ai, bi in incs],
        }
    _emit(_json_dump(out), args.out or cfg.out_path)
    return 0


def cmd_selftest(cfg: RunConfig | None, args) -> int:
    from . import selftest

    results = selftest.run_all(fast=args.fast, seed=args.seed)
    width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name:<{width}}  {r.detail}")
        ok = ok and r.passed
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if ok else 1


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twirl",
                                 description="weight factors, twisted orbital "
                                             "integrals, and residue series "
                                             "over ramified p-adic fields")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_config=True):
        sp = sub.add_parser(name)
        if needs_config:
            sp.add_argument("--config", required=True)
        sp.add_argument("--out")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("wfactor", cmd_wfactor)
    sp.add_argument("--count", type=int, default=20)
    sp = add("dtwist", cmd_dtwist)
    sp.add_argument("--alpha", required=True)
    sp = add("support-scan", cmd_support_scan)
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--depth", type=int, default=6)
    sp = add("psik", cmd_psik)
    sp.add_argument("--alpha", required=True)
    add("coeffs", cmd_coeffs)
    add("rg-term", cmd_rg_term)
    add("residue", cmd_residue)
    sp = sub.add_parser("selftest")
    sp.add_argument("--fast", action="store_true")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--config")
    sp.set_defaults(fn=cmd_selftest, selftest=True)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if getattr(args, "selftest", False):
            return cmd_selftest(None, args)
        cfg = RunConfig.load(args.config)
        return args.fn(cfg, args)
    except (TailNonzero, NoStabilization) as exc:
        print(f"truncation failure: {exc}", file=sys.stderr)
        return 2
    except TwirlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
