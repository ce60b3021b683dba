"""Configuration-driven experiment runner.

Subcommands:

    grigwalk run <config.json>     run one experiment from a JSON config
    grigwalk verify <preset>       run a named built-in preset with assertions
    grigwalk report <dir> [...]    aggregate manifests into a summary table

Configs are schema-validated JSON; every run writes its outputs plus a
manifest (config hash, package version, wall time, file list) into the output
directory.  Identical config + seed reproduces byte-identical CSV/JSON/DOT
bodies.  Exit code 0 iff every assertion in the run passed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .boundary import Ray, SchreierGraph, apply, export_graph, rho1, rho_pair
from .chains import escape_csv, escape_profile
from .core import first_group, make_group
from .measures import (
    FiniteMeasure,
    MixtureMeasure,
    kaimanovich_measure,
    nu_gamma,
    ops_for_group,
    ops_for_tuple,
    product_switch_measure,
    torsion_product_measure,
    uniform_generator_measure,
)
from .renorm import laziness_split, renormalize
from .subst import (
    min_stabilizer_word_length,
    section_identity_check,
    verify_distinct_inverted_orbit,
    w_n,
)
from .walks import WalkConfig, simulate
from .wreath import GroupAction

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["version", "kind", "seed"],
    "properties": {
        "version": {"const": 1},
        "kind": {
            "enum": ["walk", "exact-series", "renorm", "centered", "substitution", "schreier"]
        },
        "seed": {"type": "integer"},
        "omega": {"type": "string", "pattern": "^[012]+$"},
        "measure": {"type": "string"},
        "gamma": {"type": "number", "exclusiveMinimum": 1, "exclusiveMaximum": 2},
        "i_max": {"type": "integer", "minimum": 1},
        "horizon": {"type": "integer", "minimum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 0},
        "n_max": {"type": "integer", "minimum": 1},
        "radii": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "budget": {"type": "integer", "minimum": 0},
        "cutoff": {"type": "integer", "minimum": 1},
        "max_len": {"type": "integer", "minimum": 1},
        "out_dir": {"type": "string"},
    },
    "additionalProperties": False,
}


def validate_config(config: dict) -> None:
    import jsonschema

    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/" + "/".join(str(p) for p in exc.absolute_path)
        raise SystemExit(f"config error at {path}: {exc.message}")


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _measure_from_name(name: str, spec, config):
    G2 = spec
    if name == "kaimanovich":
        return "single", kaimanovich_measure(spec)
    if name == "uniform":
        return "single", uniform_generator_measure(spec)
    if name == "torsion-product":
        return "product", torsion_product_measure(spec, G2)
    if name == "switch-product":
        return "product", product_switch_measure(spec, G2)
    if name == "mixture":
        base = product_switch_measure(spec, G2)
        nu = nu_gamma(config.get("gamma", 1.5), i_max=config.get("i_max", 300))
        return "product", MixtureMeasure(nu, base)
    raise SystemExit(f"unknown measure name {name!r}")


def _write(out_dir: Path, name: str, text: str, files: list) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    files.append(name)


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def run_config(config: dict, out_dir: Path) -> dict:
    """Dispatch a validated config; returns the manifest dict."""
    validate_config(config)
    t0 = time.time()
    files: list[str] = []
    assertions: list[tuple[str, bool]] = []
    spec = make_group(config.get("omega", "012"))
    kind = config["kind"]
    seed = config["seed"]

    if kind == "schreier":
        budget = config.get("budget", 25)
        graph = SchreierGraph([rho1()], apply)
        graph.explore(spec.generators(), budget)
        _write(out_dir, "schreier.dot", export_graph(graph, "dot"), files)
        _write(out_dir, "schreier.csv", export_graph(graph, "csv"), files)
        assertions.append(("window-nonempty", len(graph.points) > 0))

    elif kind == "substitution":
        n = config.get("n", 6)
        ok, delta = verify_distinct_inverted_orbit(w_n(n)["word"])
        sect = all(section_identity_check(k) for k in range(1, min(n, 6) + 1))
        stab = min_stabilizer_word_length(config.get("max_len", 9))
        verdict = {
            "claim": "inverted orbit of w_n has |w_n|+1 points",
            "n": n,
            "verified": bool(ok),
            "delta": delta,
            "section_identity_ok": bool(sect),
            "min_stabilizer_length": stab["min_length"],
            "witnesses": stab["witnesses"],
        }
        _write(out_dir, "substitution.json", json_text(verdict), files)
        assertions.append(("inverted-orbit-distinct", bool(ok)))
        assertions.append(("section-identity", bool(sect)))

    elif kind == "renorm":
        mu = kaimanovich_measure(spec)
        res = renormalize(mu, spec, config.get("cutoff", 40))
        split = laziness_split(res, kaimanovich_measure(spec.shift()))
        verdict = {
            "tv_gap_at_half": split["gap_half"],
            "alpha_best": split["alpha_best"],
            "tail": res.tail,
            "stopping": {str(k): v for k, v in sorted(res.stopping.items())},
        }
        _write(out_dir, "renorm.json", json_text(verdict), files)
        assertions.append(("renorm-identity", split["gap_half"] <= res.tail + 1e-9))

    elif kind == "centered":
        radii = config.get("radii", [8, 16, 32])
        mu = torsion_product_measure(spec, spec)
        action = GroupAction("product", [spec, spec], rho_pair())
        prof = escape_profile(mu, action, radii, order_cap=16)
        _write(out_dir, "escape.csv", escape_csv(prof), files)
        _write(
            out_dir,
            "centered.json",
            json_text({"trend_q": prof["trend_q"], "trend_q0": prof["trend_q0"], "rows": prof["rows"]}),
            files,
        )
        assertions.append(("trends-agree", prof["trend_q"] == prof["trend_q0"]))

    elif kind in ("walk", "exact-series"):
        name = config.get("measure", "torsion-product")
        arity, measure = _measure_from_name(name, spec, config)
        if arity == "single":
            action = GroupAction("single", [spec], rho1())
        else:
            action = GroupAction("product", [spec, spec], rho_pair())
        horizon = config.get("horizon", 1000)
        trials = config.get("trials", 200)
        if isinstance(measure, MixtureMeasure):
            wc = WalkConfig(action=action, measure_kind="mixture", measure=measure,
                            horizon=horizon, trials=trials, seed=seed)
        else:
            wc = WalkConfig(action=action, measure_kind="finite", measure=measure,
                            horizon=horizon, trials=trials, seed=seed)
        bundle = simulate(wc)
        for key in ("return_freq", "survival", "delta_mean", "delta_over_n"):
            _write(out_dir, f"{key}.csv", bundle[key].to_csv(), files)
        dn = bundle["delta_over_n"].mean
        assertions.append(("delta-over-n-monotone", bool(np.all(np.diff(dn) <= 1e-9))))

    manifest = {
        "config": config,
        "config_hash": config_hash(config),
        "version": __version__,
        "wall_seconds": round(time.time() - t0, 3),
        "files": sorted(files),
        "assertions": {name: bool(ok) for name, ok in assertions},
        "passed": all(ok for _, ok in assertions),
    }
    (out_dir / "manifest.json").write_text(json_text(manifest))
    return manifest


PRESETS = {
    "sec3-inverted-orbit": {
        "version": 1, "kind": "walk", "seed": 7, "measure": "torsion-product",
        "horizon": 1000, "trials": 200,
    },
    "sec4-transience": {
        "version": 1, "kind": "walk", "seed": 11, "measure": "mixture",
        "gamma": 1.5, "i_max": 300, "horizon": 1000, "trials": 200,
    },
    "sec5-centered": {
        "version": 1, "kind": "centered", "seed": 0, "radii": [8, 16, 32],
    },
    "sec6-renorm": {
        "version": 1, "kind": "renorm", "seed": 0, "cutoff": 40,
    },
    "sec7-substitution": {
        "version": 1, "kind": "substitution", "seed": 0, "n": 6, "max_len": 9,
    },
    "schreier-window": {
        "version": 1, "kind": "schreier", "seed": 0, "budget": 25,
    },
}


def cmd_run(args) -> int:
    config = json.loads(Path(args.config).read_text())
    out_dir = Path(config.get("out_dir", args.out or "runs") )
    manifest = run_config({k: v for k, v in config.items() if k != "out_dir"}, out_dir)
    print(json_text(manifest), end="")
    return 0 if manifest["passed"] else 1


def cmd_verify(args) -> int:
    if args.preset not in PRESETS:
        print(f"unknown preset {args.preset!r}; available: {', '.join(sorted(PRESETS))}")
        return 2
    out_dir = Path(args.out or f"runs/{args.preset}")
    manifest = run_config(dict(PRESETS[args.preset]), out_dir)
    for name, ok in manifest["assertions"].items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return 0 if manifest["passed"] else 1


def cmd_report(args) -> int:
    rows = []
    for d in args.dirs:
        mpath = Path(d) / "manifest.json"
        if not mpath.exists():
            print(f"missing manifest: {mpath}")
            return 2
        m = json.loads(mpath.read_text())
        rows.append((d, m["config_hash"], m["passed"], m["wall_seconds"]))
    print(f"{'directory':<32} {'config':<18} {'passed':<7} seconds")
    for d, h, p, s in rows:
        print(f"{d:<32} {h:<18} {str(p):<7} {s}")
    return 0 if all(p for _, _, p, _ in rows) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="grigwalk", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)
    p_run = sub.add_parser("run", help="run a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None)
    p_ver = sub.add_parser("verify", help="run a named preset")
    p_ver.add_argument("preset")
    p_ver.add_argument("--out", default=None)
    p_rep = sub.add_parser("report", help="summarize run manifests")
    p_rep.add_argument("dirs", nargs="+")
    args = parser.parse_args(argv)
    if args.cmd == "run":
        return cmd_run(args)
    if args.cmd == "verify":
        return cmd_verify(args)
    return cmd_report(args)


if __name__ == "__main__":
    sys.exit(main())
