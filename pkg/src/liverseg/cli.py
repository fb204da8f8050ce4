"""Command line entry points.

Exit codes: 0 success, 2 input/config problem, 3 pipeline could not derive
markers. All file output goes through write-temp-then-rename.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from .features import WaveletKind, extract_features
from .image import (
    BinaryImage,
    GrayImage8,
    PgmParseError,
    RgbImage,
    atomic_write_bytes,
    read_pgm,
    write_pgm,
    write_ppm,
)
from .enhance import histogram, otsu_threshold
from .morphology import Connectivity
from .phantom import Ellipse, PhantomConfig, Tumor, evaluate, generate_phantom
from .watershed import MarkerError, PipelineConfig, TumorPolicy, region_stats, segment

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


@dataclass
class CliConfig:
    """Flat view of every tunable: pipeline knobs, feature settings and
    phantom geometry. Loadable from a JSON file, overridable by flags."""

    se_radius: int = 5
    connectivity: int = 8
    min_marker_area: int = 20
    fg_shrink_radius: int = 1
    tumor_policy: str = "max_mean_contrast"
    wavelet: str = "haar"
    levels: int = 2
    width: int = 256
    height: int = 256
    background_mean: float = 30.0
    organ_mean: float = 120.0
    organ: dict | None = None
    tumors: list | None = None
    noise_sigma: float = 8.0
    seed: int = 1

    @classmethod
    def load(cls, path: str | None) -> "CliConfig":
        cfg = cls()
        if path is None:
            return cfg
        with open(path, "rb") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        known = {f.name for f in fields(cls)}
        for key, val in raw.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r} in {path}")
            setattr(cfg, key, val)
        return cfg

    def apply_flags(self, args: argparse.Namespace) -> None:
        for f in fields(self):
            v = getattr(args, f.name, None)
            if v is not None:
                setattr(self, f.name, v)

    def pipeline(self) -> PipelineConfig:
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity}")
        try:
            policy = TumorPolicy(self.tumor_policy)
        except ValueError:
            raise ValueError(
                f"tumor_policy must be one of "
                f"{[p.value for p in TumorPolicy]}, got {self.tumor_policy!r}"
            ) from None
        return PipelineConfig(
            se_radius=int(self.se_radius),
            connectivity=Connectivity(self.connectivity),
            min_marker_area=int(self.min_marker_area),
            fg_shrink_radius=int(self.fg_shrink_radius),
            tumor_policy=policy,
        )

    def wavelet_kind(self) -> WaveletKind:
        try:
            return WaveletKind(self.wavelet)
        except ValueError:
            raise ValueError(
                f"wavelet must be one of {[w.value for w in WaveletKind]}, "
                f"got {self.wavelet!r}"
            ) from None

    def phantom(self, overrides: dict | None = None) -> PhantomConfig:
        params = {
            "width": self.width,
            "height": self.height,
            "background_mean": self.background_mean,
            "organ_mean": self.organ_mean,
            "organ": self.organ,
            "tumors": self.tumors,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }
        if overrides:
            unknown = set(overrides) - set(params)
            if unknown:
                raise ValueError(f"unknown phantom keys: {sorted(unknown)}")
            params.update(overrides)
        return _phantom_from_dict(params)


def _ellipse_from_dict(d: dict) -> Ellipse:
    return Ellipse(
        cx=float(d["cx"]),
        cy=float(d["cy"]),
        a=float(d["a"]),
        b=float(d["b"]),
        theta=float(d.get("theta", 0.0)),
    )


def _phantom_from_dict(params: dict) -> PhantomConfig:
    w = int(params["width"])
    h = int(params["height"])
    organ = params.get("organ")
    if organ is None:
        organ_e = Ellipse(w / 2.0, h / 2.0, 0.352 * w, 0.234 * h)
    else:
        organ_e = _ellipse_from_dict(organ)
    tumors = params.get("tumors")
    if tumors is None:
        # default lesion sits off-center inside the organ
        te = Ellipse(
            organ_e.cx + 0.28 * organ_e.a,
            organ_e.cy + 0.25 * organ_e.b,
            14.0 * w / 256.0,
            10.0 * h / 256.0,
        )
        tumor_t = (Tumor(te, float(params["organ_mean"]) + 40.0),)
    else:
        tumor_t = tuple(
            Tumor(_ellipse_from_dict(t), float(t["mean"])) for t in tumors
        )
    return PhantomConfig(
        width=w,
        height=h,
        organ=organ_e,
        background_mean=float(params["background_mean"]),
        organ_mean=float(params["organ_mean"]),
        tumors=tumor_t,
        noise_sigma=float(params["noise_sigma"]),
        seed=int(params["seed"]),
    )


def _write_json(path: str, payload: dict) -> None:
    body = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    atomic_write_bytes(path, body.encode("utf-8"))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_segment(args: argparse.Namespace) -> int:
    cfg = CliConfig.load(args.config)
    cfg.apply_flags(args)
    pipeline_cfg = cfg.pipeline()
    wavelet = cfg.wavelet_kind()
    img = read_pgm(args.input)

    res = segment(img, pipeline_cfg)
    os.makedirs(args.out, exist_ok=True)
    for name, stage in res.stages:
        if isinstance(stage, RgbImage):
            write_ppm(stage, os.path.join(args.out, f"{name}.ppm"))
        else:
            write_pgm(stage, os.path.join(args.out, f"{name}.pgm"))

    stats = region_stats(img, res.labels)
    summary = {
        "regions": res.labels.num_labels,
        "tumor_label": res.tumor_label,
        "degenerate": res.degenerate,
        "config": {
            "se_radius": pipeline_cfg.se_radius,
            "connectivity": pipeline_cfg.connectivity.value,
            "min_marker_area": pipeline_cfg.min_marker_area,
            "fg_shrink_radius": pipeline_cfg.fg_shrink_radius,
            "tumor_policy": pipeline_cfg.tumor_policy.value,
            "wavelet": wavelet.value,
            "levels": int(cfg.levels),
        },
        "region_stats": [
            {
                "label": s.label,
                "area": s.area,
                "mean": s.mean,
                "centroid": list(s.centroid),
                "touches_border": s.touches_border,
            }
            for s in stats
        ],
    }
    _write_json(os.path.join(args.out, "summary.json"), summary)

    if res.tumor_label is not None:
        mask = BinaryImage(res.labels.data == res.tumor_label)
        fv = extract_features(img, mask, wavelet, int(cfg.levels))
        _write_json(
            os.path.join(args.out, "features.json"),
            fv.to_json_dict(res.tumor_label),
        )
    return EXIT_OK


def cmd_otsu(args: argparse.Namespace) -> int:
    img = read_pgm(args.input)
    res = otsu_threshold(histogram(img))
    print(
        f"threshold={res.threshold} variance={res.between_class_variance!r} "
        f"degenerate={str(res.degenerate).lower()}"
    )
    return EXIT_OK


def cmd_phantom(args: argparse.Namespace) -> int:
    cfg = CliConfig.load(args.config)
    cfg.apply_flags(args)
    if args.sigma is not None:
        cfg.noise_sigma = args.sigma
    pcfg = cfg.phantom()
    img, gt = generate_phantom(pcfg)
    if gt.labels.num_labels > 255:
        raise ValueError("too many ground-truth labels for an 8-bit dump")
    write_pgm(img, f"{args.out}.pgm")
    write_pgm(GrayImage8(gt.labels.data.astype(np.uint8)), f"{args.out}_gt.pgm")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = CliConfig.load(args.config)
    cfg.apply_flags(args)
    with open(args.batch, "rb") as fh:
        batch = json.load(fh)
    if not isinstance(batch, list) or not batch:
        raise ValueError(f"batch file {args.batch} must hold a non-empty JSON array")
    phantoms = []
    for i, entry in enumerate(batch):
        if not isinstance(entry, dict):
            raise ValueError(f"batch entry {i} is not a JSON object")
        phantoms.append(cfg.phantom(overrides=entry))
    report = evaluate(phantoms, cfg.pipeline())
    _write_json(args.out, report)
    print(f"mean_dice={report['mean_dice']} min_dice={report['min_dice']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument wiring


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--se-radius", type=int, help="smoothing disk radius")
    p.add_argument("--connectivity", type=int, choices=(4, 8), help="pixel adjacency")
    p.add_argument("--min-marker-area", type=int, help="smallest kept foreground marker")
    p.add_argument("--fg-shrink-radius", type=int, help="marker erosion radius")
    p.add_argument(
        "--tumor-policy",
        choices=[t.value for t in TumorPolicy],
        dest="tumor_policy",
        help="how to pick the tumor among interior regions",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="liverseg",
        description="Marker-controlled watershed segmentation toolbox",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("segment", help="segment one PGM image, dump all stages")
    ps.add_argument("input", help="input PGM (P5 or P2)")
    ps.add_argument("--out", required=True, help="output directory")
    _add_pipeline_flags(ps)
    ps.add_argument("--wavelet", choices=[w.value for w in WaveletKind], help="feature wavelet")
    ps.add_argument("--levels", type=int, help="wavelet decomposition levels")
    ps.set_defaults(fn=cmd_segment)

    po = sub.add_parser("otsu", help="print the Otsu threshold of a PGM image")
    po.add_argument("input", help="input PGM (P5 or P2)")
    po.set_defaults(fn=cmd_otsu)

    pp = sub.add_parser("phantom", help="write a synthetic phantom and its labels")
    pp.add_argument("--out", required=True, help="output prefix (<prefix>.pgm, <prefix>_gt.pgm)")
    pp.add_argument("--config", help="JSON config file")
    pp.add_argument("--seed", type=int, help="phantom seed")
    pp.add_argument("--sigma", type=float, help="noise standard deviation")
    pp.add_argument("--width", type=int, help="phantom width")
    pp.add_argument("--height", type=int, help="phantom height")
    pp.set_defaults(fn=cmd_phantom)

    pe = sub.add_parser("eval", help="segment a batch of phantoms and write a report")
    pe.add_argument("batch", help="JSON array of phantom configs")
    pe.add_argument("--out", required=True, help="report JSON path")
    _add_pipeline_flags(pe)
    pe.set_defaults(fn=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except MarkerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (PgmParseError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # keep the exit-code contract: nothing but 0/2/3
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
