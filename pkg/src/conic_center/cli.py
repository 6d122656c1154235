"""Command-line front end: single-shot estimation, ellipse fitting and
experiment sweeps.

Exit codes: 0 success, 2 domain error (non-concentric inputs, degenerate
fits, ...), 3 input error (parse failures, invalid config).
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

import numpy as np

from .concentric import FITTED_TOL, concentric_center_ratio
from .conic import ConicMatrix, EllipseGeom, conic_to_ellipse, ellipse_to_conic
from .errors import ConicCenterError, NotConcentric
from .eyesim import EyeScene, FitConfig, records_to_csv, run_camera_sweep, run_pupil_size_sweep
from .fitting import BoundarySample, fit_ellipse

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_INPUT = 3

_BUNDLED_CONFIGS = {
    "default-camera": "camera_sweep.json",
    "default-pupil": "pupil_size_sweep.json",
}


class InputError(Exception):
    pass


def default_config_text(name: str) -> str:
    """Contents of a bundled sweep config ('default-camera' or 'default-pupil')."""
    return (resources.files("conic_center") / "configs"
            / _BUNDLED_CONFIGS[name]).read_text()


def conic_from_json_dict(obj) -> ConicMatrix:
    """Accepts either an ellipse object {cx, cy, a, b, theta} or a conic
    object {matrix: 3x3}."""
    if not isinstance(obj, dict):
        raise InputError("expected a JSON object")
    if "matrix" in obj:
        try:
            return ConicMatrix(np.asarray(obj["matrix"], dtype=float))
        except (ValueError, TypeError, ConicCenterError) as exc:
            raise InputError(f"bad conic matrix: {exc}") from None
    try:
        e = EllipseGeom(float(obj["cx"]), float(obj["cy"]),
                        float(obj["a"]), float(obj["b"]),
                        float(obj.get("theta", 0.0)))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"bad ellipse object: {exc}") from None
    return ellipse_to_conic(e)


def ellipse_to_json_dict(e: EllipseGeom) -> dict:
    return {"cx": e.cx, "cy": e.cy, "a": e.a, "b": e.b, "theta": e.theta}


def _load_json(path: str):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _conic_area(q: ConicMatrix) -> float:
    e = conic_to_ellipse(q)
    return e.area


def cmd_estimate(args) -> int:
    inner = conic_from_json_dict(_load_json(args.inner))
    outer = conic_from_json_dict(_load_json(args.outer))
    inner_input = "first"
    if args.auto_order:
        try:
            if _conic_area(inner) > _conic_area(outer):
                inner, outer = outer, inner
                inner_input = "second"
        except ConicCenterError as exc:
            print(f"error: input is not an ellipse: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
    try:
        res = concentric_center_ratio(inner, outer, args.tol)
    except NotConcentric as exc:
        print(f"error: not concentric (concentricity={exc.concentricity:.6g}): {exc}",
              file=sys.stderr)
        return EXIT_DOMAIN
    except ConicCenterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out = res.to_json_dict()
    out["inner_input"] = inner_input
    print(json.dumps(out))
    print(f"concentricity: {res.concentricity:.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_fit(args) -> int:
    try:
        pts = np.loadtxt(args.points, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InputError(f"{args.points}: {exc}") from None
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InputError(f"{args.points}: expected two columns x,y")
    if len(pts) < 6:
        raise InputError(f"{args.points}: need at least 6 points")
    try:
        e = fit_ellipse(BoundarySample(pts, source="csv"))
    except ConicCenterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(json.dumps(ellipse_to_json_dict(e)))
    return EXIT_OK


def _parse_sweep_config(cfg: dict):
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    mode = cfg.get("mode")
    if mode not in ("camera", "pupil_size"):
        raise InputError("config 'mode' must be 'camera' or 'pupil_size'")
    try:
        scene = EyeScene(**{k: tuple(v) if isinstance(v, list) else v
                            for k, v in cfg.get("scene", {}).items()})
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad scene config: {exc}") from None
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int):
        raise InputError("seed must be an integer")
    fit_cfg = cfg.get("fit", {})
    try:
        occ = fit_cfg.get("occlusion")
        fit = FitConfig(n_points=int(fit_cfg.get("n_points", 100)),
                        noise_sigma=float(fit_cfg.get("noise_sigma", 0.5)),
                        occlusion=tuple(occ) if occ is not None else None,
                        fit_conics=bool(fit_cfg.get("fit_conics", False)))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad fit config: {exc}") from None
    if fit.noise_sigma < 0:
        raise InputError("noise_sigma must be non-negative")
    return mode, scene, seed, fit


def cmd_sweep(args) -> int:
    if args.config in _BUNDLED_CONFIGS:
        cfg = json.loads(default_config_text(args.config))
    else:
        cfg = _load_json(args.config)
    mode, scene, seed, fit = _parse_sweep_config(cfg)
    if mode == "camera":
        phi = cfg.get("phi_deg")
        theta = cfg.get("theta_deg")
        if not phi or not theta:
            raise InputError("camera mode needs non-empty phi_deg and theta_deg lists")
        records = run_camera_sweep(scene, phi, theta, seed=seed, fit=fit)
    else:
        radii = cfg.get("pupil_radii_mm")
        n_targets = cfg.get("n_targets", 36)
        if not radii:
            raise InputError("pupil_size mode needs a non-empty pupil_radii_mm list")
        if not isinstance(n_targets, int) or n_targets < 1:
            raise InputError("n_targets must be a positive integer")
        kwargs = {}
        if "target_circle_radius_mm" in cfg:
            kwargs["target_circle_radius"] = float(cfg["target_circle_radius_mm"])
        if "target_circle_center_mm" in cfg:
            kwargs["target_circle_center"] = tuple(cfg["target_circle_center_mm"])
        records = run_pupil_size_sweep(scene, radii, n_targets,
                                       seed=seed, fit=fit, **kwargs)
    with open(args.out, "w", newline="") as f:
        records_to_csv(records, f)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="conic-center",
        description="Projected center and radii ratio of concentric circles "
                    "observed as two ellipses.")
    sub = p.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="center/ratio from two ellipse or conic JSON files")
    est.add_argument("--inner", required=True, help="inner conic (ellipse or conic JSON)")
    est.add_argument("--outer", required=True, help="outer conic (ellipse or conic JSON)")
    est.add_argument("--tol", type=float, default=FITTED_TOL,
                     help="concentricity tolerance (default %(default)s, "
                          "suited to fitted conics)")
    est.add_argument("--no-auto-order", dest="auto_order", action="store_false",
                     help="trust the given inner/outer order instead of "
                          "reordering by area")
    est.set_defaults(func=cmd_estimate)

    fit = sub.add_parser("fit", help="least-squares ellipse fit of x,y points from CSV")
    fit.add_argument("--points", required=True, help="CSV file with header x,y")
    fit.set_defaults(func=cmd_fit)

    sw = sub.add_parser("sweep", help="run an experiment sweep to CSV")
    sw.add_argument("--config", required=True,
                    help="sweep config JSON path, or 'default-camera' / 'default-pupil'")
    sw.add_argument("--out", required=True, help="output CSV path")
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tol", 1.0) <= 0:
        print("error: tolerance must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConicCenterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
