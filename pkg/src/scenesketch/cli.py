"""Command-line entry points.

Exit codes: 0 success, 1 usage error, 2 data or processing error. Reports go
to stdout unless --out is given; all logging goes to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import EmptySketch, SceneSketchError
from .evaluate import (
    DEFAULT_IOU_THRESHOLD,
    DEFAULT_TIE_EPSILON,
    evaluate_plans,
    normalize_opa_batch,
    project_topdown,
)
from .generation import GenerateRequest, GeneratorKind, encode_sketch, generate
from .persistence import export_obj, load_scene, load_sketch, sketch_to_obj
from .server import DEFAULT_PORT, GenerationServer, build_http_app

logger = logging.getLogger(__name__)

DEFAULT_TUBE_RADIUS = 0.005  # meters; matches the UI preview default
DEFAULT_TUBE_SIDES = 8

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2 by default; this project
    reserves 2 for data errors, so remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_port() -> int:
    env = os.environ.get("HOLME_PORT")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            logger.warning("ignoring non-integer HOLME_PORT=%r", env)
    return DEFAULT_PORT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scenesketch",
                     description="3D sketch-mapping toolkit: generation server, "
                                 "scene evaluation, and format conversion")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the generation server")
    serve.add_argument("--port", type=int, default=None,
                       help=f"TCP port (default: HOLME_PORT or {DEFAULT_PORT})")
    serve.add_argument("--generator", choices=["tubes", "hull"], default="tubes",
                       help="generator used when a request names none")
    serve.add_argument("--ws-port", type=int, default=None,
                       help="HTTP/WebSocket port (default: TCP port + 1)")

    ev = sub.add_parser("eval", help="score a reconstructed scene against ground truth")
    ev.add_argument("--sketch", help="reconstructed scene JSON")
    ev.add_argument("--truth", help="ground-truth scene JSON")
    ev.add_argument("--batch", help="directory with sketch/ and truth/ subdirectories")
    ev.add_argument("--iou-threshold", type=float, default=DEFAULT_IOU_THRESHOLD)
    ev.add_argument("--tie-epsilon", type=float, default=DEFAULT_TIE_EPSILON)
    ev.add_argument("--out", help="write the JSON report here instead of stdout")

    conv = sub.add_parser("convert", help="render a stroke file as tube meshes in OBJ")
    conv.add_argument("--in", dest="input", required=True, help="sketch JSON file")
    conv.add_argument("--out", required=True, help="output OBJ file")
    conv.add_argument("--tube-radius", type=float, default=DEFAULT_TUBE_RADIUS)
    conv.add_argument("--sides", type=int, default=DEFAULT_TUBE_SIDES)

    gen = sub.add_parser("generate", help="generate object variants offline")
    gen.add_argument("--sketch", required=True, help="sketch JSON file")
    gen.add_argument("--generator", choices=["tubes", "hull"], default="tubes")
    gen.add_argument("--variants", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output directory for variant OBJs")
    return parser


def _write_report(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_serve(args) -> int:
    port = args.port if args.port is not None else _default_port()
    ws_port = args.ws_port if args.ws_port is not None else port + 1
    generator_default = GeneratorKind(args.generator)

    server = GenerationServer(port=port, generator_default=generator_default)
    server.start()

    static_dir = Path.cwd() / "frontend" / "dist"
    app = build_http_app(generator_default=generator_default,
                         static_dir=static_dir if static_dir.is_dir() else None)
    import uvicorn

    config = uvicorn.Config(app, host="0.0.0.0", port=ws_port,
                            log_level="warning", access_log=False)
    http_server = uvicorn.Server(config)
    logger.info("ws endpoint at ws://0.0.0.0:%d/ws", ws_port)
    try:
        http_server.run()
    except (OSError, SystemExit) as exc:
        print(f"scenesketch serve: ws port bind failed: {exc}", file=sys.stderr)
        server.stop()
        return EXIT_DATA
    finally:
        server.stop()
    return EXIT_OK


def _eval_single(sketch_path: str, truth_path: str, tau: float, tie_eps: float) -> dict:
    sketch_scene = load_scene(Path(sketch_path).read_bytes())
    truth_scene = load_scene(Path(truth_path).read_bytes())
    report = evaluate_plans(project_topdown(sketch_scene), project_topdown(truth_scene),
                            tau=tau, tie_epsilon=tie_eps)
    report.flags.append("opa_raw_single_scene")
    return report.to_json_dict()


def cmd_eval(args) -> int:
    if args.batch is None and (args.sketch is None or args.truth is None):
        print("scenesketch eval: need --sketch and --truth, or --batch",
              file=sys.stderr)
        return EXIT_USAGE
    if args.batch is not None and (args.sketch or args.truth):
        print("scenesketch eval: --batch excludes --sketch/--truth", file=sys.stderr)
        return EXIT_USAGE

    if args.batch is None:
        doc = _eval_single(args.sketch, args.truth, args.iou_threshold,
                           args.tie_epsilon)
        _write_report(doc, args.out)
        return EXIT_OK

    root = Path(args.batch)
    sketch_dir, truth_dir = root / "sketch", root / "truth"
    if not sketch_dir.is_dir() or not truth_dir.is_dir():
        print(f"scenesketch eval: {root} must contain sketch/ and truth/",
              file=sys.stderr)
        return EXIT_DATA
    names = sorted(p.name for p in sketch_dir.iterdir() if p.suffix == ".json")
    if not names:
        print("scenesketch eval: batch directory has no scene files", file=sys.stderr)
        return EXIT_DATA
    reports = []
    for name in names:
        truth_path = truth_dir / name
        if not truth_path.exists():
            print(f"scenesketch eval: no ground truth for {name}", file=sys.stderr)
            return EXIT_DATA
        sketch_scene = load_scene((sketch_dir / name).read_bytes())
        truth_scene = load_scene(truth_path.read_bytes())
        report = evaluate_plans(project_topdown(sketch_scene),
                                project_topdown(truth_scene),
                                tau=args.iou_threshold,
                                tie_epsilon=args.tie_epsilon)
        reports.append((name, report))
    normalize_opa_batch([r.opa for _, r in reports])
    doc = {
        "scenes": [{"name": name, **report.to_json_dict()} for name, report in reports],
        "flags": ["opa_normalized_across_batch"],
    }
    _write_report(doc, args.out)
    return EXIT_OK


def cmd_convert(args) -> int:
    sketch = load_sketch(Path(args.input).read_bytes())
    if not sketch.strokes:
        raise EmptySketch("sketch has no strokes to convert")
    if args.tube_radius <= 0 or args.sides < 3:
        print("scenesketch convert: radius must be > 0 and sides >= 3",
              file=sys.stderr)
        return EXIT_USAGE
    Path(args.out).write_bytes(sketch_to_obj(sketch, args.tube_radius, args.sides))
    return EXIT_OK


def cmd_generate(args) -> int:
    sketch = load_sketch(Path(args.sketch).read_bytes())
    encoding = encode_sketch(sketch)
    try:
        request = GenerateRequest(
            request_id="cli",
            encoding=encoding,
            generator=GeneratorKind(args.generator),
            variants=args.variants,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"scenesketch generate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    response = generate(request)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for k, mesh in enumerate(response.meshes):
        (out_dir / f"variant_{k}.obj").write_bytes(export_obj(mesh))
    logger.info("wrote %d variants to %s", len(response.meshes), out_dir)
    return EXIT_OK


_COMMANDS = {
    "serve": cmd_serve,
    "eval": cmd_eval,
    "convert": cmd_convert,
    "generate": cmd_generate,
}


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"scenesketch: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_DATA
    except SceneSketchError as exc:
        print(f"scenesketch: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
