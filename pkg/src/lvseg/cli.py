"""Command-line front end over the library.

Subcommands: phantom (synthetic clip to a directory), detect-anchors,
segment, eval, defaults (emit the tuned params.json), serve (HTTP facade).

Exit codes: 0 success; 2 bad arguments (argparse); 3 missing or malformed
input file; 4 a pipeline stage failed (message names the stage).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .errors import LvSegError, StageError
from .evaluation import GroundTruth, PhantomSpec, evaluate_clip, generate_phantom, write_report
from .imgcore import load_clip, save_clip
from .pipeline import PipelineConfig, SegmentationResult, detect_anchors, segment_clip

EXIT_OK = 0
EXIT_IO = 3
EXIT_STAGE = 4


def _fail_io(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_IO


def _fail_stage(e: LvSegError) -> int:
    if isinstance(e, StageError):
        print(f"error: stage {e.stage} failed: {e}", file=sys.stderr)
    else:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
    return EXIT_STAGE


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "params", None):
        path = Path(args.params)
        if not path.is_file():
            raise FileNotFoundError(f"params file not found: {path}")
        cfg = PipelineConfig.load(path)
    else:
        cfg = PipelineConfig()
    if getattr(args, "anchor_frame", None) is not None:
        cfg.anchor_frame = args.anchor_frame
    if getattr(args, "no_snake", False):
        cfg.run_snake = False
    ov_path = getattr(args, "override_anchors", None)
    if ov_path:
        path = Path(ov_path)
        if not path.is_file():
            raise FileNotFoundError(f"override anchors file not found: {path}")
        ov = json.loads(path.read_text())
        anchors = ov.get("anchors", ov)
        cfg.overrides = {
            k: list(map(float, v))
            for k, v in anchors.items()
            if k in ("septal", "lateral", "apex")
        }
    return cfg


def cmd_phantom(args: argparse.Namespace) -> int:
    kwargs = {}
    if args.spec:
        path = Path(args.spec)
        if not path.is_file():
            return _fail_io(f"phantom spec file not found: {path}")
        kwargs = json.loads(path.read_text())
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.sigma is not None:
        kwargs["speckle_sigma"] = args.sigma
    try:
        spec = PhantomSpec(**kwargs)
    except (TypeError, LvSegError) as e:
        return _fail_io(f"invalid phantom spec: {e}")
    clip, gt = generate_phantom(spec)
    out = Path(args.out)
    save_clip(clip, out, fmt=args.format)
    gt.save(out / "ground_truth.json")
    (out / "phantom_spec.json").write_text(
        json.dumps(dataclasses.asdict(spec), indent=2) + "\n"
    )
    print(out / "clip.json")
    return EXIT_OK


def cmd_detect_anchors(args: argparse.Namespace) -> int:
    try:
        cfg = _load_config(args)
        clip = load_clip(args.clip)
    except (FileNotFoundError, KeyError, json.JSONDecodeError, ValueError) as e:
        return _fail_io(str(e))
    try:
        anchors = detect_anchors(clip, cfg)
    except LvSegError as e:
        return _fail_stage(e)
    doc = {
        "frame_index": anchors.frame_index,
        "anchors": {
            "septal": list(anchors.septal),
            "lateral": list(anchors.lateral),
            "apex": list(anchors.apex),
            "provenance": dict(anchors.provenance),
        },
    }
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    print(args.out)
    return EXIT_OK


def cmd_segment(args: argparse.Namespace) -> int:
    try:
        cfg = _load_config(args)
        clip = load_clip(args.clip)
    except (FileNotFoundError, KeyError, json.JSONDecodeError, ValueError) as e:
        return _fail_io(str(e))
    try:
        result = segment_clip(clip, cfg)
    except LvSegError as e:
        return _fail_stage(e)
    result.save(args.out)
    print(args.out)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    try:
        result = SegmentationResult.load(args.result)
        gt = GroundTruth.load(args.truth)
    except (FileNotFoundError, KeyError, json.JSONDecodeError) as e:
        return _fail_io(str(e))
    try:
        report = evaluate_clip(result, gt)
    except LvSegError as e:
        return _fail_stage(e)
    write_report(report, args.out, args.csv)
    print(f"mean_pct_error {report['mean_pct_error']:.6f}")
    return EXIT_OK


def cmd_defaults(args: argparse.Namespace) -> int:
    cfg = PipelineConfig()
    text = json.dumps(cfg.to_params_dict(), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(clip_root=args.clip_root)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lvseg",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a synthetic clip with ground truth")
    p.add_argument("--out", required=True, help="output clip directory")
    p.add_argument("--spec", help="JSON file of phantom spec fields")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--sigma", type=float, help="speckle sigma override")
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("detect-anchors", help="detect valve corners and apex")
    p.add_argument("--clip", required=True, help="clip directory with clip.json")
    p.add_argument("--params", help="params.json")
    p.add_argument("--out", required=True, help="output anchors.json")
    p.add_argument("--anchor-frame", type=int, default=None)
    p.add_argument("--override-anchors", help="anchors.json with manual points")
    p.set_defaults(func=cmd_detect_anchors)

    p = sub.add_parser("segment", help="run the full pipeline on a clip")
    p.add_argument("--clip", required=True, help="clip directory with clip.json")
    p.add_argument("--params", help="params.json")
    p.add_argument("--out", required=True, help="output segmentation.json")
    p.add_argument("--anchor-frame", type=int, default=None)
    p.add_argument("--override-anchors", help="anchors.json with manual points")
    p.add_argument("--no-snake", action="store_true", help="skip refinement")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="score a segmentation against ground truth")
    p.add_argument("--result", required=True, help="segmentation.json")
    p.add_argument("--truth", required=True, help="ground_truth.json")
    p.add_argument("--out", required=True, help="output report.json")
    p.add_argument("--csv", help="optional per-frame CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("defaults", help="emit the tuned default params.json")
    p.add_argument("--out", help="write here instead of stdout")
    p.set_defaults(func=cmd_defaults)

    p = sub.add_parser("serve", help="run the local review HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--clip-root", default=".", help="directory clip paths resolve against")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
