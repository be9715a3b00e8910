"""Command-line front door.

Subcommands: enumerate, ltable, growth, rd-profile, kesten, verify.
Artifacts are deterministic given (config, seed): ids fix the ordering,
floats are printed with 12 significant digits, and the resolved config
(defaults included) plus the seed are echoed into every JSON report.

Exit codes: 0 success / definite verdict; 1 invariant failure in verify;
2 usage error; 3 cap hit or inconclusive verdict (partial artifacts are
still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .cosets import Caps, CapExceeded, enumerate_ball
from .errors import HeckeError, NotRelativelyUnimodular
from .growth import GROWTH_DEFAULTS, classify_growth, growth_series
from .groups import HeckePair, catalog_labels, get_pair, load_pair_spec
from .lengths import characteristic_length, word_length
from .rd import RD_DEFAULTS, kesten_diagnostic, rd_profile
from .verify import run_verification

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

CONFIG_DEFAULTS = {
    "caps.max_cosets": 2_000_000,
    "caps.max_orbit": 100_000,
    "seed": 0,
    **GROWTH_DEFAULTS,
    **RD_DEFAULTS,
}


def _coerce(key: str, raw: str):
    default = CONFIG_DEFAULTS[key]
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def load_config(path: str | None, overrides: list[str]) -> dict:
    """Resolved run config: defaults, then the key=value file, then --set
    overrides.  Unknown keys are usage errors."""
    cfg = dict(CONFIG_DEFAULTS)

    def apply(key: str, raw: str, origin: str):
        key = key.strip()
        if key not in cfg:
            raise HeckeError(f"unknown config key {key!r} ({origin})")
        cfg[key] = _coerce(key, raw.strip())

    if path:
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise HeckeError(f"bad config line {line!r}")
                key, _, raw = line.partition("=")
                apply(key, raw, path)
    for item in overrides or []:
        if "=" not in item:
            raise HeckeError(f"--set needs key=value, got {item!r}")
        key, _, raw = item.partition("=")
        apply(key, raw, "--set")
    return cfg


def _round_floats(obj):
    """12 significant digits everywhere, so artifacts are byte-stable."""
    if isinstance(obj, float):
        return float(format(obj, ".12g"))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(path: str, obj: dict) -> None:
    text = json.dumps(_round_floats(obj), sort_keys=True, indent=1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".12g") if isinstance(v, float) else v
                         for v in row])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())


def _slug(label: str) -> str:
    return label.replace(":", "-")


def _resolve_pair(args) -> HeckePair:
    if getattr(args, "pair_spec", None):
        return load_pair_spec(args.pair_spec)
    if not args.pair:
        raise HeckeError("--pair or --pair-spec is required")
    return get_pair(args.pair)


def _caps(cfg: dict) -> Caps:
    return Caps(int(cfg["caps.max_cosets"]), int(cfg["caps.max_orbit"]))


def _threads() -> int:
    raw = os.environ.get("HECKE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _report_head(pair: HeckePair, cfg: dict, args) -> dict:
    return {
        "pair": pair.describe(),
        "seed": int(cfg["seed"]),
        "threads": _threads(),
        "config": {k: cfg[k] for k in sorted(cfg)},
        "command": args.command,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args, cfg) -> int:
    pair = _resolve_pair(args)
    store = enumerate_ball(pair, args.rmax, _caps(cfg))
    snap = store.snapshot(compute_classes=not args.no_classes)
    out = _report_head(pair, cfg, args)
    out["snapshot"] = snap
    path = os.path.join(args.out, f"enumerate_{_slug(pair.label)}.json")
    write_json(path, out)
    print(f"wrote {path}: {len(store)} cosets, "
          f"{len(store.dcs)} double cosets")
    return EXIT_OK


def cmd_ltable(args, cfg) -> int:
    pair = _resolve_pair(args)
    store = enumerate_ball(pair, args.rmax, _caps(cfg))
    lw = word_length(store)
    try:
        lc = characteristic_length(pair, store)
    except NotRelativelyUnimodular:
        lc = None
    rows = []
    for d in store.classes_in_ball(args.rmax):
        rows.append([
            d,
            pair.render(store.reps[store.dcs[d].rep_cid]),
            store.class_L(d),
            store.class_R(d),
            str(store.class_delta(d)),
            str(lw.values.get(d, "")),
            format(lc.values[d], ".12g") if lc is not None else "NA",
        ])
    base = os.path.join(args.out, f"ltable_{_slug(pair.label)}")
    write_csv(base + ".csv",
              ["dc_id", "rep", "L", "R", "delta", "l_word", "l_char"], rows)
    report = _report_head(pair, cfg, args)
    report["classes"] = [
        {"dc_id": r[0], "rep": r[1], "L": r[2], "R": r[3], "delta": r[4],
         "l_word": r[5], "l_char": r[6]} for r in rows]
    report["characteristic_length_available"] = lc is not None
    write_json(base + ".json", report)
    print(f"wrote {base}.csv ({len(rows)} classes)")
    return EXIT_OK


def cmd_growth(args, cfg) -> int:
    pair = _resolve_pair(args)
    store = enumerate_ball(pair, args.rmax, _caps(cfg))
    series = growth_series(store, args.rmax)
    verdict = classify_growth(series,
                              delta=float(cfg["growth.delta"]),
                              tail_fraction=float(cfg["growth.tail_fraction"]),
                              min_r2=float(cfg["growth.min_r2"]))
    base = os.path.join(args.out, f"growth_{_slug(pair.label)}")
    write_csv(base + ".csv", ["r", "ball", "shell"], series.as_rows())
    report = _report_head(pair, cfg, args)
    report["series"] = {"radii": series.radii, "ball": series.ball,
                        "shell": series.shell, "kind": series.kind}
    report["verdict"] = verdict.as_dict()
    report["verdict"]["label"] = "empirical"
    write_json(base + ".json", report)
    print(f"wrote {base}.json: {verdict.kind} "
          f"(alpha={verdict.alpha}, beta={verdict.beta})")
    return EXIT_OK if verdict.kind != "inconclusive" else EXIT_INCONCLUSIVE


def cmd_rd_profile(args, cfg) -> int:
    pair = _resolve_pair(args)
    store = enumerate_ball(pair, args.rmax, _caps(cfg))
    rd_cfg = {k: v for k, v in cfg.items() if k in RD_DEFAULTS}
    profile = rd_profile(pair, store, None, args.rmax, config=rd_cfg,
                         seed=int(cfg["seed"]), threads=_threads())
    base = os.path.join(args.out, f"rd_profile_{_slug(pair.label)}")
    report = _report_head(pair, cfg, args)
    report["profile"] = profile.as_dict()
    write_json(base + ".json", report)
    write_csv(base + ".csv", ["r", "best_ratio", "witness"],
              [[r, v, w] for r, v, w in profile.best])
    print(f"wrote {base}.json: verdict {profile.verdict}")
    if profile.verdict == "inconclusive" or profile.partial:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_kesten(args, cfg) -> int:
    pair = _resolve_pair(args)
    store = enumerate_ball(pair, args.rmax, _caps(cfg))
    rd_cfg = {k: v for k, v in cfg.items() if k in RD_DEFAULTS}
    report_obj = kesten_diagnostic(pair, store, None, None, config=rd_cfg)
    base = os.path.join(args.out, f"kesten_{_slug(pair.label)}")
    report = _report_head(pair, cfg, args)
    report["kesten"] = report_obj.as_dict()
    write_json(base + ".json", report)
    print(f"wrote {base}.json: index "
          f"{report_obj.amenability_index:.6f} ({report_obj.hint})")
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    checks = run_verification(include_golden=not args.no_golden)
    n_bad = 0
    for c in checks:
        status = "PASS" if c.ok else "FAIL"
        line = f"{status} {c.name}"
        if c.detail and not c.ok:
            line += f": {c.detail}"
        print(line)
        n_bad += 0 if c.ok else 1
    report = {
        "command": "verify",
        "config": {k: cfg[k] for k in sorted(cfg)},
        "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail}
                   for c in checks],
        "failures": n_bad,
    }
    write_json(os.path.join(args.out, "verify_report.json"), report)
    print(f"{len(checks) - n_bad}/{len(checks)} checks passed")
    return EXIT_OK if n_bad == 0 else EXIT_INVARIANT


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hecke",
        description="Exact coset enumeration, Hecke-algebra arithmetic and "
                    "growth/RD diagnostics for discrete Hecke pairs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_pair=True):
        if needs_pair:
            p.add_argument("--pair", help="catalog label, e.g. " +
                           ", ".join(catalog_labels()))
            p.add_argument("--pair-spec",
                           help="custom pair spec file (key=value lines)")
        p.add_argument("--rmax", type=int, default=4,
                       help="enumeration radius (default 4)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed recorded in artifacts (default from config)")
        p.add_argument("--max-cosets", type=int, default=None)
        p.add_argument("--max-orbit", type=int, default=None)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE", help="override one config key")
        p.add_argument("--out", default="hecke-out",
                       help="output directory (default hecke-out)")

    p = sub.add_parser("enumerate", help="enumerate a ball and snapshot it")
    common(p)
    p.add_argument("--no-classes", action="store_true",
                   help="skip double-coset computation in the snapshot")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("ltable", help="per-class L/R/delta/length table")
    common(p)
    p.set_defaults(func=cmd_ltable)

    p = sub.add_parser("growth", help="ball/shell counts and growth verdict")
    common(p)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("rd-profile", help="norm-ratio profile and RD verdict")
    common(p)
    p.set_defaults(func=cmd_rd_profile)

    p = sub.add_parser("kesten", help="amenability index diagnostic")
    common(p)
    p.set_defaults(func=cmd_kesten)

    p = sub.add_parser("verify", help="oracle equivalence, invariants and "
                                      "golden snapshots")
    common(p, needs_pair=False)
    p.add_argument("--no-golden", action="store_true",
                   help="skip golden snapshot comparison")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if getattr(args, "max_cosets", None) is not None:
            cfg["caps.max_cosets"] = args.max_cosets
        if getattr(args, "max_orbit", None) is not None:
            cfg["caps.max_orbit"] = args.max_orbit
        os.makedirs(args.out, exist_ok=True)
        return args.func(args, cfg)
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except HeckeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
