"""Command line for running the service and the training entry points.

Environment variables supply defaults that flags override:
``SIDECAR_DEVICE``, ``SIDECAR_ONE_STAGE`` (one-stage checkpoint dir),
``SIDECAR_CHECKER`` (checker checkpoint dir).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acu-sidecar")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8764)
    serve.add_argument("--mode", default="stub", choices=["stub", "model"])
    serve.add_argument("--one-stage-checkpoint",
                       default=os.environ.get("SIDECAR_ONE_STAGE"))
    serve.add_argument("--checker-checkpoint",
                       default=os.environ.get("SIDECAR_CHECKER"))
    serve.add_argument("--device", default=os.environ.get("SIDECAR_DEVICE", "cpu"))
    serve.set_defaults(func=cmd_serve)

    train = sub.add_parser("train-one-stage",
                           help="fit the one-stage scorer on corpus shards")
    train.add_argument("--corpus", nargs="+", required=True,
                       help="JSONL shard path(s)")
    train.add_argument("--out", required=True, help="checkpoint directory")
    train.add_argument("--epochs", type=int, default=None)
    train.add_argument("--lr", type=float, default=None)
    train.add_argument("--seed", type=int, default=None)
    train.set_defaults(func=cmd_train_one_stage)

    tune = sub.add_parser("fine-tune-checker",
                          help="fit the checker on gold unit labels")
    tune.add_argument("--data", required=True,
                      help="JSONL of {premise, hypothesis, context?, label}")
    tune.add_argument("--out", required=True, help="checkpoint directory")
    tune.add_argument("--template", default="standard",
                      choices=["standard", "contextual"])
    tune.add_argument("--epochs", type=int, default=None)
    tune.add_argument("--seed", type=int, default=None)
    tune.set_defaults(func=cmd_fine_tune_checker)

    return parser


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    app = create_app(ServiceConfig(mode=args.mode,
                                   one_stage_checkpoint=args.one_stage_checkpoint,
                                   checker_checkpoint=args.checker_checkpoint,
                                   device=args.device))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_train_one_stage(args) -> int:
    from .onestage import OneStageConfig, save_one_stage, train_one_stage

    overrides = {k: v for k, v in
                 [("epochs", args.epochs), ("lr", args.lr), ("seed", args.seed)]
                 if v is not None}
    config = OneStageConfig(**overrides)
    result = train_one_stage(list(args.corpus), config)
    out = save_one_stage(result.model, args.out)
    print(f"best val MSE {result.best_val_mse:.5f} "
          f"(mean-predictor baseline {result.baseline_val_mse:.5f}); "
          f"checkpoint at {out}")
    return 0


def cmd_fine_tune_checker(args) -> int:
    from .checker import CheckerConfig, fine_tune_checker, save_checker

    examples = []
    with open(args.data, "r", encoding="utf-8") as f:
        for line in f:
            if line.strip():
                examples.append(json.loads(line))
    overrides = {k: v for k, v in
                 [("epochs", args.epochs), ("seed", args.seed)]
                 if v is not None}
    config = CheckerConfig(template=args.template, **overrides)
    result = fine_tune_checker(examples, config)
    out = save_checker(result.model, args.out)
    print(f"best val accuracy {result.best_val_accuracy:.3f}; "
          f"checkpoint at {out}")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
