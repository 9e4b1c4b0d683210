"""``pnel`` command line: build-index, train, link, eval, ablate, gradcheck, profile.

Every command takes ``--config run.json``.  Values resolve in this order:
command-line flag, config file, ``PNEL_SEED`` (seed only), built-in default.
``--toy`` fills any unset data path with the bundled toy fixture.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

from . import __version__
from .evaluation import ablation_sweep, ablation_table, profile_k
from .featurizer import AblationMask, featurize_question, load_dataset
from .kg_store import StoreError, build_label_index, load_entities
from .pipeline import (
    Pipeline,
    Settings,
    build_episodes,
    evaluate,
    link_question,
    load_resources,
    toy_path,
)
from .pointer_net import (
    CheckpointError,
    ModelConfig,
    decode,
    fit_normalization,
    grad_check,
    init_model,
    load_checkpoint,
    make_episode,
    save_checkpoint,
    train,
)

log = logging.getLogger("pnel")

EXIT_OK = 0
EXIT_MISSING = 2
EXIT_NO_EPISODES = 3
EXIT_GRADCHECK = 4
EXIT_USAGE = 64


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    entities: str | None = None
    vectors: str | None = None
    train: str | None = None
    test: str | None = None
    index: str | None = None
    checkpoint: str | None = None
    history: str | None = None
    output: str | None = None
    skip_list: str | None = None
    top_l: int = 50
    k1: float = 1.2
    b: float = 0.75
    hidden: int = 64
    attention_dim: int = 32
    lr: float = 0.001
    epochs: int = 50
    seed: int = 7
    init_scale: float = 0.08
    weight_decay: float = 0.0
    decoder_feed: str = "input"
    max_output: int = 100
    ablate: tuple[str, ...] = ()
    k_values: tuple[int, ...] = (10, 20, 30, 40, 50)
    repeats: int = 1
    threshold: float = 1e-3
    format: str = "json"
    verbose: bool = False
    toy: bool = False

    def settings(self) -> Settings:
        return Settings(top_l=self.top_l, hidden=self.hidden, attention_dim=self.attention_dim,
                        lr=self.lr, epochs=self.epochs, seed=self.seed,
                        init_scale=self.init_scale, weight_decay=self.weight_decay,
                        decoder_feed=self.decoder_feed, max_output=self.max_output)

    def mask(self) -> AblationMask:
        for group in self.ablate:
            if group not in AblationMask.group_names():
                raise CommandError(f"unknown feature group {group!r}; choose from "
                                   f"{', '.join(AblationMask.group_names())}", EXIT_USAGE)
        return AblationMask(**{g: False for g in self.ablate})


_TOY_FILES = {"entities": "entities.jsonl", "vectors": "vectors.txt",
              "train": "train.jsonl", "test": "test.jsonl"}


def resolve_config(flags: dict, config_file: str | None, env: dict | None = None) -> RunConfig:
    """Merge flag values over the config file over defaults."""
    env = os.environ if env is None else env
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}
    if config_file is not None:
        path = Path(config_file)
        if not path.is_file():
            raise CommandError(f"config file not found: {config_file}", EXIT_MISSING)
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CommandError(f"config file {config_file} is not valid JSON: {exc}", EXIT_USAGE) from exc
        if not isinstance(loaded, dict):
            raise CommandError("config file must hold a JSON object", EXIT_USAGE)
        loaded = {k.replace("-", "_"): v for k, v in loaded.items()}
        unknown = sorted(set(loaded) - known)
        if unknown:
            raise CommandError(f"unknown config keys: {', '.join(unknown)}", EXIT_USAGE)
        values.update(loaded)
    if "seed" not in values and "PNEL_SEED" in env and "seed" not in flags:
        try:
            values["seed"] = int(env["PNEL_SEED"])
        except ValueError as exc:
            raise CommandError(f"PNEL_SEED must be an integer, got {env['PNEL_SEED']!r}", EXIT_USAGE) from exc
    values.update({k: v for k, v in flags.items() if k in known})
    for key in ("ablate", "k_values"):
        if key in values:
            values[key] = tuple(values[key])
    cfg = RunConfig(**values)
    if cfg.toy:
        for key, name in _TOY_FILES.items():
            if getattr(cfg, key) is None:
                setattr(cfg, key, str(toy_path(name)))
    return cfg


def _require(cfg: RunConfig, *names: str) -> None:
    for name in names:
        value = getattr(cfg, name)
        if value is None:
            raise CommandError(f"no {name} file given (use --{name.replace('_', '-')} or --toy)", EXIT_USAGE)
        if not Path(value).is_file():
            label = "dataset" if name in ("train", "test") else name.replace("_", " ")
            raise CommandError(f"{label} file not found: {value}", EXIT_MISSING)


def _resources(cfg: RunConfig):
    _require(cfg, "entities", "vectors")
    return load_resources(cfg.entities, cfg.vectors, cfg.index, cfg.k1, cfg.b)


def _emit(cfg: RunConfig, text: str) -> None:
    print(text)
    if cfg.output:
        Path(cfg.output).write_text(text + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands


def cmd_build_index(cfg: RunConfig) -> int:
    _require(cfg, "entities")
    if cfg.index is None:
        raise CommandError("no index output path given (use --index)", EXIT_USAGE)
    index = build_label_index(load_entities(cfg.entities), cfg.k1, cfg.b)
    index.save(cfg.index)
    print(f"n_docs={index.n_docs} avgdl={index.avgdl:.6f} terms={len(index.postings)} -> {cfg.index}")
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    _require(cfg, "train")
    if cfg.checkpoint is None:
        raise CommandError("no checkpoint output path given (use --checkpoint)", EXIT_USAGE)
    res = _resources(cfg)
    records = load_dataset(cfg.train, cfg.skip_list)
    mask = cfg.mask()
    episodes = build_episodes(res, records, cfg.top_l, mask)
    usable = [ep for ep in episodes if ep.usable]
    log.info("%d usable / %d unusable training episodes", len(usable), len(episodes) - len(usable))
    if not usable:
        raise CommandError("no usable training episodes (no gold entity among the candidates)",
                           EXIT_NO_EPISODES)
    model = init_model(cfg.settings().model_config(res.layout.width))
    fit_normalization(model, usable)
    model, history = train(model, usable, cfg.epochs)
    save_checkpoint(model, cfg.checkpoint)
    history_path = Path(cfg.history) if cfg.history else Path(cfg.checkpoint).with_suffix(".history.json")
    history_path.write_text(json.dumps({"epoch_loss": history.epoch_loss}, indent=2) + "\n",
                            encoding="utf-8")
    final = f"{history.epoch_loss[-1]:.6f}" if history.epoch_loss else "n/a"
    print(f"trained {len(history.epoch_loss)} epochs on {len(usable)} episodes, "
          f"final loss {final}; checkpoint {cfg.checkpoint}, history {history_path}")
    return EXIT_OK


def _load_model(cfg: RunConfig, input_dim: int):
    if cfg.checkpoint is None:
        raise CommandError("no checkpoint given (use --checkpoint)", EXIT_USAGE)
    if not Path(cfg.checkpoint).is_file():
        raise CommandError(f"checkpoint file not found: {cfg.checkpoint}", EXIT_MISSING)
    return load_checkpoint(cfg.checkpoint, input_dim=input_dim)


def cmd_link(cfg: RunConfig, question: str) -> int:
    res = _resources(cfg)
    model = _load_model(cfg, res.layout.width)
    ep = featurize_question(res, question, cfg.top_l, mask=cfg.mask())
    seen: set[str] = set()
    for j in decode(model, ep):
        cand = ep.candidates[j]
        if cand.entity_id in seen:
            continue
        seen.add(cand.entity_id)
        if cfg.verbose:
            anchor = ep.tokens[cand.anchor_index].surface
            print(f"{cand.entity_id}\tanchor={anchor!r}\ttile={cand.tile_text!r}\trank={cand.search_rank}")
        else:
            print(cand.entity_id)
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    _require(cfg, "test")
    res = _resources(cfg)
    model = _load_model(cfg, res.layout.width)
    episodes = build_episodes(res, load_dataset(cfg.test, cfg.skip_list), cfg.top_l, cfg.mask())
    report = evaluate(model, episodes)
    _emit(cfg, report.table() if cfg.format == "table" else report.to_json())
    return EXIT_OK


def cmd_ablate(cfg: RunConfig) -> int:
    _require(cfg, "train", "test")
    res = _resources(cfg)
    pipe = Pipeline(res, load_dataset(cfg.train, cfg.skip_list), load_dataset(cfg.test, cfg.skip_list),
                    cfg.settings())
    rows = ablation_sweep(pipe.run)
    if cfg.format == "table":
        _emit(cfg, ablation_table(rows))
    else:
        _emit(cfg, json.dumps([{"removed": list(r.removed), "f1": r.f1} for r in rows], indent=2))
    return EXIT_OK


def cmd_gradcheck(cfg: RunConfig) -> int:
    import numpy as np

    small = ModelConfig.small(seed=cfg.seed, decoder_feed=cfg.decoder_feed)
    rng = np.random.default_rng(cfg.seed)
    episode = make_episode(rng.normal(size=(small.max_input, small.input_dim)), [1, 4])
    err = grad_check(small, episode)
    print(f"max relative error {err:.3e} (threshold {cfg.threshold:.0e})")
    return EXIT_OK if err < cfg.threshold else EXIT_GRADCHECK


def cmd_profile(cfg: RunConfig) -> int:
    _require(cfg, "test")
    res = _resources(cfg)
    model = _load_model(cfg, res.layout.width)
    dataset = load_dataset(cfg.test, cfg.skip_list)
    mask = cfg.mask()
    rows = profile_k(lambda q, k: link_question(res, model, q, k, mask), dataset,
                     list(cfg.k_values), cfg.repeats)
    if cfg.format == "table":
        from .evaluation import format_table

        _emit(cfg, format_table([("K", "seconds", "F1")] +
                                [(r.k, f"{r.mean_seconds:.6f}", f"{r.f1:.3f}") for r in rows]))
    else:
        _emit(cfg, json.dumps([asdict(r) for r in rows], indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with EX_USAGE (64) instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv(kind):
    def parse(text: str):
        try:
            return tuple(kind(part) for part in text.split(",") if part)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


S = argparse.SUPPRESS


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("inputs")
    g.add_argument("--config", default=None, help="JSON file of option values")
    g.add_argument("--toy", action="store_true", default=S, help="use the bundled toy fixture for unset paths")
    g.add_argument("--entities", default=S, help="entity JSONL file")
    g.add_argument("--vectors", default=S, help="word vector text file")
    g.add_argument("--index", default=S, help="serialized label index (built in memory if absent)")
    g.add_argument("--skip-list", dest="skip_list", default=S, help="file of question ids to drop")
    g.add_argument("--log-level", default="INFO", help="logging level (default INFO)")
    s = p.add_argument_group("search")
    s.add_argument("--top-l", "--k", dest="top_l", type=int, default=S,
                   help="candidates per n-gram tile (default 50)")
    s.add_argument("--k1", type=float, default=S, help="BM25 k1 (default 1.2)")
    s.add_argument("--b", type=float, default=S, help="BM25 b (default 0.75)")
    s.add_argument("--ablate", type=_csv(str), default=S,
                   help="comma-separated feature groups to zero out")


def _model_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--hidden", type=int, default=S, help="LSTM hidden size (default 64)")
    g.add_argument("--attention-dim", dest="attention_dim", type=int, default=S, help="default 32")
    g.add_argument("--lr", type=float, default=S, help="Adam learning rate (default 0.001)")
    g.add_argument("--epochs", type=int, default=S, help="training epochs (default 50)")
    g.add_argument("--seed", type=int, default=S, help="RNG seed (default PNEL_SEED, else 7)")
    g.add_argument("--init-scale", dest="init_scale", type=float, default=S, help="uniform init bound")
    g.add_argument("--weight-decay", dest="weight_decay", type=float, default=S,
                   help="decoupled weight decay (default 0)")
    g.add_argument("--decoder-feed", dest="decoder_feed", choices=["input", "encoder"], default=S)
    g.add_argument("--max-output", dest="max_output", type=int, default=S, help="decode step cap")


def _fmt(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["json", "table"], default=S, help="report format (default json)")
    p.add_argument("--output", default=S, help="also write the report here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pnel", description="Pointer-network entity linking over a label index.")
    parser.add_argument("--version", action="version", version=f"pnel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-index", help="build and save the BM25 label index")
    _common(p)

    p = sub.add_parser("train", help="train a model and write checkpoint + loss history")
    _common(p)
    _model_args(p)
    p.add_argument("--train", default=S, help="training dataset JSONL")
    p.add_argument("--checkpoint", default=S, help="checkpoint output path")
    p.add_argument("--history", default=S, help="loss history JSON (default <checkpoint>.history.json)")

    p = sub.add_parser("link", help="link one question")
    _common(p)
    p.add_argument("question")
    p.add_argument("--checkpoint", default=S, help="trained checkpoint")
    p.add_argument("--verbose", "-v", action="store_true", default=S,
                   help="show which token and search hit produced each entity")

    p = sub.add_parser("eval", help="score a dataset")
    _common(p)
    _fmt(p)
    p.add_argument("--test", default=S, help="evaluation dataset JSONL")
    p.add_argument("--checkpoint", default=S, help="trained checkpoint")

    p = sub.add_parser("ablate", help="retrain with each feature group removed")
    _common(p)
    _model_args(p)
    _fmt(p)
    p.add_argument("--train", default=S, help="training dataset JSONL")
    p.add_argument("--test", default=S, help="evaluation dataset JSONL")

    p = sub.add_parser("gradcheck", help="finite-difference check of the tiny model")
    p.add_argument("--config", default=None, help="JSON file of option values")
    p.add_argument("--seed", type=int, default=S, help="RNG seed")
    p.add_argument("--decoder-feed", dest="decoder_feed", choices=["input", "encoder"], default=S)
    p.add_argument("--threshold", type=float, default=S, help="max relative error (default 1e-3)")
    p.add_argument("--log-level", default="INFO")

    p = sub.add_parser("profile", help="link time and F1 per candidate count K")
    _common(p)
    _fmt(p)
    p.add_argument("--test", default=S, help="dataset JSONL")
    p.add_argument("--checkpoint", default=S, help="trained checkpoint")
    p.add_argument("--k-values", dest="k_values", type=_csv(int), default=S,
                   help="comma-separated K values (default 10,20,30,40,50)")
    p.add_argument("--repeats", type=int, default=S, help="keep the fastest of this many passes")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    logging.basicConfig(level=getattr(logging, str(args.pop("log_level")).upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    command = args.pop("command")
    config_file = args.pop("config")
    question = args.pop("question", None)
    try:
        cfg = resolve_config(args, config_file)
        if command == "build-index":
            return cmd_build_index(cfg)
        if command == "train":
            return cmd_train(cfg)
        if command == "link":
            return cmd_link(cfg, question)
        if command == "eval":
            return cmd_eval(cfg)
        if command == "ablate":
            return cmd_ablate(cfg)
        if command == "gradcheck":
            return cmd_gradcheck(cfg)
        return cmd_profile(cfg)
    except CommandError as exc:
        print(f"pnel {command}: {exc}", file=sys.stderr)
        return exc.code
    except (StoreError, CheckpointError, ValueError) as exc:
        print(f"pnel {command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
