"""Command line entry point: ``python -m app.cli <command> ...``

Exit codes: 0 success, 1 runtime failure, 2 invalid input or missing artifact.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .config import (
    DEFAULT_DEMOS_PATH,
    RunConfig,
    TrainConfig,
    config_keys,
    load_run_config,
    load_train_config,
    settings,
)
from .data import load_dataset, load_pseudo_data, load_run, save_pseudo_data, save_run
from .errors import DatasetError, MissingArtifactError, RRRError, RunAborted
from .llm import ChatClient, Demonstrations, RateLimiter
from .mock import MockPageSource, MockReader, MockSearchEngine
from .models import Bm25Params, PipelineMode, RetrievalMode, TaskKind
from .pipeline import PipelineComponents, collect_pseudo_data, make_env, run_dataset
from .policy import RewriterPolicy, Vocab, load_checkpoint, save_checkpoint
from .report import format_table, render_report, summary_table
from .retrieval import PageFetcher, Retriever, SearchClient
from .rl import reproduction_rate, train_ppo, train_warmup
from .utils import RetryPolicy

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _keys_epilog(*models) -> str:
    keys = [key for model in models for key in config_keys(model)]
    return "config keys (key=value file):\n  " + "\n  ".join(keys)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrr", description="Rewrite-retrieve-read question answering toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, *models) -> argparse.ArgumentParser:
        sub = commands.add_parser(
            name,
            help=help_text,
            description=help_text,
            epilog=_keys_epilog(*models),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        sub.add_argument("--config", type=Path, help="Flat key=value config file")
        sub.add_argument("--seed", type=int, help="Overrides the config seed")
        return sub

    def dataset_args(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--dataset", type=Path, required=True, help="JSONL dataset")
        sub.add_argument(
            "--kind", choices=[kind.value for kind in TaskKind], default=TaskKind.OPEN_QA.value, help="Task kind"
        )

    eval_cmd = command("eval", "Run one pipeline configuration over a dataset", RunConfig)
    dataset_args(eval_cmd)
    eval_cmd.add_argument("--mode", choices=[mode.value for mode in PipelineMode], required=True)
    eval_cmd.add_argument("--retrieval", choices=[mode.value for mode in RetrievalMode], help="Overrides retrieval_mode")
    eval_cmd.add_argument("--checkpoint", type=Path, help="Trained rewriter checkpoint (trained_rewriter mode)")
    eval_cmd.add_argument("--out", type=Path, required=True, help="Run directory for report.json and predictions.jsonl")

    pseudo_cmd = command("collect-pseudo", "Collect pseudo pairs with the frozen LLM rewriter", RunConfig)
    dataset_args(pseudo_cmd)
    pseudo_cmd.add_argument("--out", type=Path, required=True, help="Pseudo data JSONL")

    warmup_cmd = command("warmup", "Supervised warm-up of the trainable rewriter", TrainConfig)
    warmup_cmd.add_argument("--pseudo", type=Path, required=True, help="Pseudo data JSONL")
    warmup_cmd.add_argument("--out", type=Path, required=True, help="Checkpoint to write")

    ppo_cmd = command("ppo-train", "Reinforcement learning of the rewriter against the pipeline", RunConfig, TrainConfig)
    dataset_args(ppo_cmd)
    ppo_cmd.add_argument("--init", type=Path, required=True, help="Warm-up checkpoint")
    ppo_cmd.add_argument("--out", type=Path, required=True, help="Checkpoint to write; the log goes to <out>.log.jsonl")

    report_cmd = commands.add_parser("report", help="Side-by-side table of run directories")
    report_cmd.add_argument("--runs", type=Path, nargs="+", required=True, help="Run directories written by eval")
    return parser


def _run_config(args) -> RunConfig:
    config = load_run_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if getattr(args, "retrieval", None):
        updates["retrieval_mode"] = RetrievalMode(args.retrieval)
    return config.model_copy(update=updates) if updates else config


def _train_config(args) -> TrainConfig:
    config = load_train_config(args.config)
    return config.model_copy(update={"seed": args.seed}) if args.seed is not None else config


def build_components(config: RunConfig, mode: Optional[PipelineMode] = None, checkpoint=None) -> PipelineComponents:
    """Wire live or mock backends from the run config"""
    retry = RetryPolicy(max_retries=config.max_retries, backoff_base=config.backoff_base)
    engine = MockSearchEngine.from_file(config.mock_index) if config.mock_index else None

    retriever = None
    if mode is None or mode.retrieves:
        if engine is not None:
            search, pages = engine, MockPageSource(engine.index)
        else:
            search = SearchClient(
                settings.SEARCH_ENDPOINT,
                api_key=settings.SEARCH_API_KEY,
                api_key_header=settings.SEARCH_API_KEY_HEADER,
                timeout=config.request_timeout,
                retry=retry,
            )
            pages = PageFetcher(max_bytes=config.page_max_bytes, timeout=config.request_timeout)
        retriever = Retriever(
            search,
            pages,
            mode=config.retrieval_mode,
            top_k=config.top_k,
            bm25=Bm25Params(
                k1=config.bm25_k1,
                b=config.bm25_b,
                chunk_size=config.chunk_size,
                chunk_stride=config.chunk_stride,
                keep_top=config.keep_top,
            ),
            fetch_parallelism=config.fetch_parallelism,
            politeness_delay=config.politeness_delay,
        )

    live_llm = None

    def chat_backend(mock_path: Optional[str]):
        nonlocal live_llm
        if mock_path:
            return MockReader.from_file(mock_path)
        if live_llm is None:
            live_llm = ChatClient(
                settings.LLM_ENDPOINT,
                api_key=settings.LLM_API_KEY,
                timeout=config.request_timeout,
                retry=retry,
                rate_limiter=RateLimiter(config.rate_limit_per_second),
            )
        return live_llm

    policy = None
    if mode is PipelineMode.TRAINED_REWRITER:
        checkpoint = checkpoint or config.checkpoint
        if not checkpoint:
            raise ValueError("trained_rewriter needs --checkpoint or a checkpoint config key")
        policy = load_checkpoint(checkpoint)

    return PipelineComponents(
        reader=chat_backend(config.mock_reader),
        config=config,
        retriever=retriever,
        rewriter_llm=chat_backend(config.mock_rewriter) if mode is PipelineMode.FROZEN_REWRITER else None,
        policy=policy,
        demos=Demonstrations.load(config.demos_path or DEFAULT_DEMOS_PATH),
    )


def cmd_eval(args) -> int:
    config = _run_config(args)
    mode = PipelineMode(args.mode)
    dataset = load_dataset(args.dataset, TaskKind(args.kind))
    components = build_components(config, mode, checkpoint=args.checkpoint)
    try:
        report = run_dataset(dataset, mode, components, dataset_id=args.dataset.stem)
    except RunAborted as e:
        if e.partial_report is not None:
            save_run(e.partial_report, args.out)
        raise
    save_run(report, args.out)
    print(format_table(summary_table(report)))
    return EXIT_OK


def cmd_collect_pseudo(args) -> int:
    config = _run_config(args)
    dataset = load_dataset(args.dataset, TaskKind(args.kind))
    components = build_components(config, PipelineMode.FROZEN_REWRITER)
    pairs = collect_pseudo_data(dataset, components)
    save_pseudo_data(pairs, args.out)
    print(f"{len(pairs)} pseudo pairs from {len(dataset)} samples written to {args.out}")
    return EXIT_OK


def cmd_warmup(args) -> int:
    cfg = _train_config(args)
    pairs = load_pseudo_data(args.pseudo)
    if not pairs:
        raise DatasetError(args.pseudo, None, "pseudo data holds no pairs")
    vocab = Vocab.build([pair.original_question for pair in pairs] + [pair.rewrite for pair in pairs])
    policy = RewriterPolicy.create(vocab, cfg.dim, max_len=cfg.max_len, seed=cfg.seed, init_scale=cfg.init_scale)
    result = train_warmup(policy, pairs, cfg)
    save_checkpoint(result.policy, args.out)
    final_loss = result.losses[-1] if result.losses else float("nan")
    print(
        f"warm-up: {len(pairs)} pairs, vocab {len(vocab)}, final nll {final_loss:.4f}, "
        f"reproduced {reproduction_rate(result.policy, pairs):.2%}"
    )
    return EXIT_OK


def cmd_ppo_train(args) -> int:
    run_config = _run_config(args)
    cfg = _train_config(args)
    kind = TaskKind(args.kind)
    dataset = load_dataset(args.dataset, kind)
    if not dataset:
        raise DatasetError(args.dataset, None, "dataset holds no samples")
    policy = load_checkpoint(args.init)
    components = build_components(run_config)
    env = make_env(components, kind, cfg)
    result = train_ppo(policy, env, dataset, cfg, log_path=f"{args.out}.log.jsonl", checkpoint_path=args.out)
    save_checkpoint(result.policy, args.out)
    if result.logs:
        print(
            f"ppo: {len(result.logs)} iterations, mean reward "
            f"{result.logs[0].mean_reward:.4f} -> {result.logs[-1].mean_reward:.4f}"
        )
    else:
        print("ppo: 0 iterations; checkpoint copied")
    return EXIT_OK


def cmd_report(args) -> int:
    reports = [load_run(run_dir) for run_dir in args.runs]
    print(format_table(render_report(reports)))
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "collect-pseudo": cmd_collect_pseudo,
    "warmup": cmd_warmup,
    "ppo-train": cmd_ppo_train,
    "report": cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, ValueError, MissingArtifactError, DatasetError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RRRError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
