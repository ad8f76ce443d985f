"""Command-line driver: experiment orchestration and artifact emission.

Every subcommand reads a JSON config (overridable by flags), writes its
artifacts under the output directory, and prints a machine-readable
summary to stdout.  Summaries are deterministic for a fixed seed: keys
are sorted, floats go through a fixed-precision formatter, and nothing
time- or path-dependent is emitted.  Module errors surface as a
structured JSON diagnostic on stderr with a nonzero exit status.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOL, FlagFlowsError
from .devmaps import (
    LeafPoint,
    _random_positive_triple,
    covering_checks,
    geodesic_realization,
    omega_membership,
    phi_tan_minus,
    phi_tan_plus,
    phi_tr,
    psi_k,
    type_classifier,
)
from .flows import (
    cocycle,
    decay_experiment,
    flow_orbit,
    flow_period,
    period_spectrum,
    reference_flow,
)
from .limitcurve import (
    boundary_regularity_estimate,
    build_convex_domain,
    frenet_checks,
    fuchsian_curve,
    sample_boundary,
)
from .render import render_scene, scene_boundary, scene_dev_image
from .reps import (
    bulge_deform,
    fuchsian_genus2,
    jordan_projection,
    root_length,
    sym_power,
)
from .words import enumerate_conjugacy_classes

SCHEMA_VERSION = 1

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "genus": 2,
    "n": 3,
    "bulge": 0.0,
    "word_ball": 3,
    "seed": 0,
    "outdir": "out",
}


# ---------------------------------------------------------------------------
# config and summary plumbing


def load_config(args) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported config schema version {version}")
        cfg.update(data)
    for key in ("genus", "n", "bulge", "word_ball", "seed", "outdir"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            cfg[key] = value
    if cfg["genus"] != 2:
        raise ValueError("only genus 2 is wired up")
    return cfg


def _clean(obj):
    """Recursively NaN-guard and canonicalize a summary tree."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError("non-finite number in summary")
        return float(f"{v:.12g}")
    return obj


def _guard_finite(obj):
    """NaN guard without rounding, for full-precision data artifacts."""
    if isinstance(obj, dict):
        return {str(k): _guard_finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_guard_finite(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError("non-finite number in artifact")
        return v
    return obj


def write_json_artifact(cfg: dict, name: str, data: dict) -> None:
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / name).write_text(
        json.dumps(_guard_finite(data), sort_keys=True, indent=2) + "\n"
    )


def emit_summary(cfg: dict, name: str, summary: dict) -> None:
    text = json.dumps(_clean(summary), sort_keys=True, indent=2) + "\n"
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / f"{name}_summary.json").write_text(text)
    sys.stdout.write(text)


def write_csv(cfg: dict, name: str, header, rows) -> None:
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / name, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            out = []
            for v in row:
                if isinstance(v, (float, np.floating)):
                    if not math.isfinite(v):
                        raise ValueError(f"non-finite value in {name}")
                    out.append(f"{float(v):.12g}")
                else:
                    out.append(v)
            writer.writerow(out)


# ---------------------------------------------------------------------------
# shared builders


def build_rep(cfg: dict):
    """(rep, reference) from a config; reference is the Fuchsian SL2 rep."""
    reference = fuchsian_genus2()
    n = int(cfg["n"])
    if n == 2:
        rep = reference
    else:
        rep = sym_power(reference, n)
    s = float(cfg.get("bulge", 0.0))
    if s != 0.0:
        rep = bulge_deform(rep, s)
    return rep, reference


def build_curve(cfg: dict):
    rep, reference = build_rep(cfg)
    if float(cfg.get("bulge", 0.0)) == 0.0 and int(cfg["n"]) != 2:
        # Fuchsian limit curves have a closed form; prefer the exact
        # evaluator over eigenflag sampling
        return fuchsian_curve(reference, int(cfg["n"]))
    return sample_boundary(rep, reference, int(cfg["word_ball"]))


def _axis_thetas(reference, word):
    """(attracting, repelling) boundary parameters of a word's axis."""
    from .reps import theta_of_vector

    m = reference.matrix(word)
    if abs(np.trace(m)) <= 2.0:
        raise ValueError("word image is not hyperbolic in the reference")
    vals, vecs = np.linalg.eig(m)
    order = np.argsort(-np.abs(vals))
    return (theta_of_vector(vecs[:, order[0]].real),
            theta_of_vector(vecs[:, order[1]].real))


def _positive_roots(n: int):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _parse_alpha(text: str):
    i, j = (int(t) for t in text.split(","))
    return (i, j)


_MAP_TABLE = {
    "tr": phi_tr,
    "tan+": phi_tan_plus,
    "tan-": phi_tan_minus,
    "psi1": lambda c, p: psi_k(c, p, 1),
    "psi2": lambda c, p: psi_k(c, p, 2),
    "psi3": lambda c, p: psi_k(c, p, 3),
    "psi4": lambda c, p: psi_k(c, p, 4),
}


# ---------------------------------------------------------------------------
# subcommands


def cmd_build_rep(cfg, args):
    rep, reference = build_rep(cfg)
    write_json_artifact(cfg, "rep.json", rep.to_dict())
    relator = rep.matrix(rep.presentation.relator())
    dist = min(np.linalg.norm(relator - np.eye(rep.n)),
               np.linalg.norm(relator + np.eye(rep.n)))
    rep.check_loxodromy(2)
    emit_summary(cfg, "build_rep", {
        "genus": cfg["genus"],
        "n": rep.n,
        "bulge": float(cfg.get("bulge", 0.0)),
        "relator_distance": dist,
        "loxodromy_depth2_ok": True,
    })
    return 0


def cmd_sample_curve(cfg, args):
    curve = build_curve(cfg)
    write_json_artifact(cfg, "curve.json", curve.to_dict())
    summary = {
        "num_samples": len(curve),
        "n": curve.n,
        "word_ball": int(cfg["word_ball"]),
        "interp_error": curve.interp_error,
        "has_chart": curve.chart is not None,
    }
    if curve.chart is not None:
        pts = curve.chart_points()
        write_csv(cfg, "curve.csv", ["theta", "chart_x", "chart_y"],
                  [(t, p[0], p[1]) for t, p in zip(curve.thetas, pts)])
    emit_summary(cfg, "sample_curve", summary)
    return 0


def cmd_frenet_check(cfg, args):
    curve = build_curve(cfg)
    report = frenet_checks(curve)
    ok = report.general_position_ok and report.osculation_ok
    emit_summary(cfg, "frenet_check", {
        "min_triple_singular_value": report.min_triple_singular_value,
        "max_osculation_defect": report.max_osculation_defect,
        "general_position_ok": report.general_position_ok,
        "osculation_ok": report.osculation_ok,
        "passed": ok,
    })
    return 0 if ok else 1


def cmd_dev_image(cfg, args):
    curve = build_curve(cfg)
    x, z = float(args.x), float(args.z)
    num = int(args.num)
    arc = (z - x) % (2 * math.pi)
    rows = []
    if args.map.startswith("alpha:"):
        i, j = _parse_alpha(args.map.split(":", 1)[1])
        header = ["y"] + [f"p{k}" for k in range(curve.n)]
        for k in range(1, num + 1):
            y = (x + arc * k / (num + 1)) % (2 * math.pi)
            pt = geodesic_realization(curve, i, j, LeafPoint(x, y, z))
            rows.append([y] + list(pt.vector))
    else:
        if args.map not in _MAP_TABLE:
            raise ValueError(f"unknown map {args.map!r}")
        fn = _MAP_TABLE[args.map]
        header = ["y"] + [f"p{k}" for k in range(curve.n)] \
            + [f"line{k}" for k in range(curve.n)]
        for k in range(1, num + 1):
            y = (x + arc * k / (num + 1)) % (2 * math.pi)
            f = fn(curve, LeafPoint(x, y, z))
            from .projective import dual
            rows.append([y] + list(f.point.vector) + list(dual(f.line).vector))
    write_csv(cfg, "dev_image.csv", header, rows)
    emit_summary(cfg, "dev_image", {
        "map": args.map, "x": x, "z": z, "count": len(rows),
    })
    return 0


def cmd_flow(cfg, args):
    curve = build_curve(cfg)
    alpha = _parse_alpha(args.alpha)
    word = curve.rep.presentation.parse_word(args.word)
    x, z = _axis_thetas(curve.reference, word)
    y0 = (x + ((z - x) % (2 * math.pi)) / 2) % (2 * math.pi)
    record = flow_orbit(curve, alpha, LeafPoint(x, y0, z),
                        float(args.t_max), int(args.steps))
    write_csv(cfg, "flow_orbit.csv",
              ["t", "y"] + [f"p{k}" for k in range(curve.n)],
              [[t, y] + list(img.vector) for t, y, img in record.samples])
    period = flow_period(curve, alpha, word)
    jd = jordan_projection(curve.rep.matrix(word),
                           curve.rep.matrix(word.inverse()))
    want = root_length(jd, alpha[0], alpha[1])
    emit_summary(cfg, "flow", {
        "alpha": list(alpha),
        "word": args.word,
        "t_max": float(args.t_max),
        "steps": int(args.steps),
        "period": period,
        "root_length": want,
        "rel_error": abs(period - want) / max(abs(want), 1e-30),
    })
    return 0


def cmd_periods(cfg, args):
    curve = build_curve(cfg)
    roots = [_parse_alpha(args.alpha)] if args.alpha else _positive_roots(curve.n)
    words = enumerate_conjugacy_classes(curve.rep.presentation, int(args.max_len))
    spectrum = period_spectrum(curve, words, roots)
    rows = []
    worst = 0.0
    for w in words:
        jd = jordan_projection(curve.rep.matrix(w), curve.rep.matrix(w.inverse()))
        for (i, j) in roots:
            period = spectrum[w][(i, j)]
            want = root_length(jd, i, j)
            rel = abs(period - want) / max(abs(want), 1e-30)
            worst = max(worst, rel)
            rows.append([curve.rep.presentation.format_word(w), i, j,
                         period, want, rel])
    write_csv(cfg, "periods.csv",
              ["word", "i", "j", "flow_period", "root_length", "rel_error"], rows)
    ok = worst < 1e-6
    emit_summary(cfg, "periods", {
        "max_len": int(args.max_len),
        "roots": [list(r) for r in roots],
        "num_words": len(words),
        "worst_rel_error": worst,
        "passed": ok,
    })
    return 0 if ok else 1


def cmd_decay(cfg, args):
    curve = build_curve(cfg)
    # leaf nearly aligned with the stable-leaf base point keeps the
    # measured distance one-signed along the orbit
    p = LeafPoint(0.5, 0.7, 3.9)
    slope, samples = decay_experiment(curve, p, 3.5,
                                      float(args.t_max), int(args.steps))
    write_csv(cfg, "decay.csv", ["t", "stable_leaf_distance"], samples)
    summary = {"slope": slope, "t_max": float(args.t_max)}
    if float(cfg.get("bulge", 0.0)) == 0.0:
        summary["expected_slope"] = -1.0
        summary["passed"] = abs(slope + 1.0) < 0.05
    else:
        _, beta_hat = boundary_regularity_estimate(curve)
        bound = -1.0 / (beta_hat - 1.0) - 0.1
        summary["beta_hat"] = beta_hat
        summary["slope_lower_bound"] = bound
        summary["passed"] = slope >= bound
    emit_summary(cfg, "decay", summary)
    return 0 if summary["passed"] else 1


def cmd_render(cfg, args):
    curve = build_curve(cfg)
    figure = args.figure
    if figure == "boundary":
        scene = scene_boundary(curve)
    elif figure.startswith("dev-"):
        scene = scene_dev_image(curve, figure[4:], 0.5, 3.6)
    else:
        raise ValueError(f"unknown figure {figure!r}")
    svg, clipped = render_scene(scene)
    outdir = Path(cfg["outdir"])
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / f"{figure}.svg").write_text(svg)
    emit_summary(cfg, "render", {
        "figure": figure,
        "clipped_points": clipped,
        "layers": len(scene.layers),
    })
    return 0


def cmd_verify_all(cfg, args):
    checks = {}
    seed = int(cfg["seed"])
    rng = np.random.default_rng(seed)
    curve = build_curve(cfg)
    n = curve.n

    report = frenet_checks(curve)
    checks["frenet"] = {
        "passed": report.general_position_ok and report.osculation_ok,
        "min_triple_singular_value": report.min_triple_singular_value,
        "max_osculation_defect": report.max_osculation_defect,
    }

    domain = build_convex_domain(curve)
    checks["convex_domain"] = {
        "passed": domain.is_convex() and domain.tangents_support(),
        "is_convex": domain.is_convex(),
        "tangents_support": domain.tangents_support(),
    }

    cov = covering_checks(curve, num_points=20, seed=seed)
    cov_tol = 1e-6 if curve.exact_eval is not None else 1e-3
    checks["covering"] = {
        "passed": cov.two_sheet_max_error < cov_tol,
        "two_sheet_max_error": cov.two_sheet_max_error,
        "tolerance": cov_tol,
    }

    expected = {"tr": "2", "tan+": "2", "tan-": "2",
                "psi1": "1", "psi2": "1", "psi3": "3", "psi4": "3"}
    miscount = 0
    trials = 0
    for name, fn in _MAP_TABLE.items():
        for _ in range(5):
            p = _random_positive_triple(rng)
            got = omega_membership(curve, fn(curve, p))
            trials += 1
            if got != expected[name]:
                miscount += 1
    checks["membership"] = {"passed": miscount == 0,
                            "trials": trials, "misclassified": miscount}

    class_ok = True
    for name, want in (("tr", "transverse"), ("tan+", "tangent_plus"),
                       ("tan-", "tangent_minus")):
        p = _random_positive_triple(rng, spread=0.8)
        arc = (p.z - p.x) % (2 * math.pi)
        samples = [
            _MAP_TABLE[name](curve, LeafPoint(p.x, (p.x + arc * k / 17) % (2 * math.pi), p.z))
            for k in range(1, 17)
        ]
        class_ok = class_ok and type_classifier(samples, curve, p.x, p.z) == want
    checks["type_classifier"] = {"passed": class_ok}

    words = enumerate_conjugacy_classes(curve.rep.presentation, 4)
    spectrum = period_spectrum(curve, words, _positive_roots(n))
    worst = 0.0
    for w in words:
        jd = jordan_projection(curve.rep.matrix(w), curve.rep.matrix(w.inverse()))
        for root in _positive_roots(n):
            want = root_length(jd, root[0], root[1])
            rel = abs(spectrum[w][root] - want) / max(abs(want), 1e-30)
            worst = max(worst, rel)
    checks["periods"] = {"passed": worst < 1e-6,
                         "num_words": len(words), "worst_rel_error": worst}

    worst_cocycle = 0.0
    alpha = (1, 2)
    for _ in range(20):
        p = _random_positive_triple(rng)
        s, t = rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)
        moved = LeafPoint(p.x, reference_flow(curve.reference, p.x, p.z, p.y, s), p.z)
        err = abs(cocycle(curve, alpha, p, s + t)
                  - cocycle(curve, alpha, moved, t) - cocycle(curve, alpha, p, s))
        worst_cocycle = max(worst_cocycle, err)
    checks["cocycle"] = {"passed": worst_cocycle < 1e-7,
                         "worst_identity_error": worst_cocycle}

    slope, _ = decay_experiment(curve, LeafPoint(0.5, 0.7, 3.9), 3.5, 5.0, 20)
    if float(cfg.get("bulge", 0.0)) == 0.0:
        decay_ok = abs(slope + 1.0) < 0.05
        checks["decay"] = {"passed": decay_ok, "slope": slope,
                           "expected_slope": -1.0}
    else:
        _, beta_hat = boundary_regularity_estimate(curve)
        bound = -1.0 / (beta_hat - 1.0) - 0.1
        checks["decay"] = {"passed": slope >= bound, "slope": slope,
                           "slope_lower_bound": bound}

    svg, clipped = render_scene(scene_dev_image(curve, "tan+", 0.5, 3.6))
    checks["render"] = {"passed": svg.startswith("<svg") and svg.endswith("</svg>"),
                        "clipped_points": clipped}

    ok = all(c["passed"] for c in checks.values())
    emit_summary(cfg, "verify_all", {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "n": n,
        "bulge": float(cfg.get("bulge", 0.0)),
        "checks": checks,
        "passed": ok,
    })
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# entry point


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagflows",
        description="Limit curves, developing maps, and refraction flows "
                    "of Hitchin representations.",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--genus", type=int)
    parser.add_argument("--n", type=int)
    parser.add_argument("--bulge", type=float)
    parser.add_argument("--word-ball", type=int, dest="word_ball")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--outdir")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("build-rep")
    sub.add_parser("sample-curve")
    sub.add_parser("frenet-check")

    p = sub.add_parser("dev-image")
    p.add_argument("--map", required=True,
                   help="tr|tan+|tan-|psi1..4|alpha:i,j")
    p.add_argument("--x", type=float, default=0.5)
    p.add_argument("--z", type=float, default=3.6)
    p.add_argument("--num", type=int, default=64)

    p = sub.add_parser("flow")
    p.add_argument("--alpha", required=True, help="i,j")
    p.add_argument("--word", required=True, help='e.g. "a1 b1"')
    p.add_argument("--t-max", type=float, default=5.0, dest="t_max")
    p.add_argument("--steps", type=int, default=50)

    p = sub.add_parser("periods")
    p.add_argument("--alpha", help="i,j (default: all positive roots)")
    p.add_argument("--max-len", type=int, default=4, dest="max_len")

    p = sub.add_parser("decay")
    p.add_argument("--t-max", type=float, default=5.0, dest="t_max")
    p.add_argument("--steps", type=int, default=20)

    p = sub.add_parser("render")
    p.add_argument("--figure", required=True,
                   help="boundary|dev-tr|dev-tan+|dev-tan-|dev-psi1..4")

    sub.add_parser("verify-all")
    return parser


_HANDLERS = {
    "build-rep": cmd_build_rep,
    "sample-curve": cmd_sample_curve,
    "frenet-check": cmd_frenet_check,
    "dev-image": cmd_dev_image,
    "flow": cmd_flow,
    "periods": cmd_periods,
    "decay": cmd_decay,
    "render": cmd_render,
    "verify-all": cmd_verify_all,
}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return _HANDLERS[args.subcommand](cfg, args)
    except (FlagFlowsError, ValueError, OSError) as exc:
        diagnostic = {
            "error": {
                "type": type(exc).__name__,
                "message": str(exc),
                "subcommand": args.subcommand,
            }
        }
        sys.stderr.write(json.dumps(diagnostic, sort_keys=True, indent=2) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
