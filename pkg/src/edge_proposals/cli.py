from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import Settings, configure_logging, load_settings
from .errors import ConfigurationError
from .evaluation import FilterRankOptions, FilterRankPipeline
from .experiments import (jin_trial, sbm_ratio_sweep, sbm_trial, summarize_sweep,
                          summarize_trials, trial_frame)
from .generators import JinConfig, SbmConfig, generate_jin, generate_sbm
from .graph import build_graph_with_report
from .io import (LabelTable, num_nodes_hint, read_edge_list, read_feature_matrix, read_json, read_proposal_set,
                 read_split, write_csv, write_edge_list, write_json, write_proposal_set, write_split)
from .models.base import FeatureMatrix
from .models.service import ScorerFactory
from .proposal import ProposalSet, TargetSizeGrid, target_size_grid
from .quality import quality_fixed, quality_grow, summarize_quality
from .spectral import commute_change_curve, spectral_embedding
from .splits import random_split, sbm_eval_edges, temporal_split

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def _int_list(text: str) -> List[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _float_list(text: str) -> List[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _strip_out(argv: Sequence[str]) -> List[str]:
    """argv without the output directory, so a manifest replays anywhere."""
    out: List[str] = []
    skip = False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok == "--out":
            skip = True
            continue
        if tok.startswith("--out="):
            continue
        out.append(tok)
    return out


def _features(args: argparse.Namespace, split) -> Optional[FeatureMatrix]:
    if getattr(args, "features", None):
        return read_feature_matrix(args.features, split.num_nodes)
    if getattr(args, "spectral_dim", None):
        return spectral_embedding(split.train_graph(), args.spectral_dim)
    return None


def _scorer(kind: str, features: Optional[FeatureMatrix]):
    if ScorerFactory.needs_features(kind) and features is None:
        raise ConfigurationError(f"Scorer '{kind}' needs --features or --spectral-dim")
    return ScorerFactory.create_scorer(kind, features)


def _options(args: argparse.Namespace, settings: Settings) -> FilterRankOptions:
    return FilterRankOptions(
        hits_k=getattr(args, "hits_k", 10),
        include_valid=getattr(args, "include_valid", False),
        force_valid=getattr(args, "force_valid", False),
        n_jobs=settings.n_jobs,
        starting_set_cap=settings.starting_set_cap,
    )


def cmd_generate(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    if args.model == "sbm":
        cfg = SbmConfig(block_sizes=_int_list(args.blocks), p_in=args.p, p_out=args.q, seed=args.seed)
        g, blocks = generate_sbm(cfg)
        write_edge_list(out / "edges.tsv", g.edges())
        write_json(out / "blocks.json", {"num_nodes": cfg.num_nodes, "blocks": blocks})
        return {"config": cfg.to_dict(), "num_edges": g.num_edges}
    cfg = JinConfig(num_nodes=args.nodes, r1=args.r1, r0=args.r0, gamma=args.gamma, z_star=args.z_star,
                    iterations=args.iterations, seed=args.seed)
    edges = generate_jin(cfg)
    write_edge_list(out / "edges.tsv", edges.pairs(), edges.timestamps)
    return {"config": cfg.to_dict(), "num_edges": len(edges)}


def cmd_split(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    labels = LabelTable.read(args.labels) if args.labels else None
    edges, labels = read_edge_list(args.edges, labels)
    if labels is not None:
        labels.write(out / "labels.tsv")
    fractions = _float_list(args.fractions)
    if args.kind == "sbm":
        if not args.blocks:
            raise ConfigurationError("An sbm split needs --blocks (the blocks.json written by generate sbm)")
        blocks = np.asarray(read_json(args.blocks)["blocks"], dtype=np.int64)
        g, _ = build_graph_with_report(len(blocks), edges)
        split = sbm_eval_edges(g, blocks, args.seed, fractions)
    else:
        num_nodes = args.num_nodes or num_nodes_hint(edges, labels)
        make = temporal_split if args.kind == "temporal" else random_split
        split = make(edges, num_nodes, fractions, args.seed)
    write_split(out, split)
    return {"sizes": split.sizes(), "kind": split.split_kind}


def cmd_propose(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    split = read_split(args.split)
    options = _options(args, settings)
    pipeline = FilterRankPipeline(split.train_graph(), split, _scorer(args.filter, _features(args, split)),
                                  ScorerFactory.create_scorer("common-neighbors"), options)
    k = args.k if args.k is not None else split.kbar
    proposal = pipeline.proposal(k, "test")
    write_proposal_set(out / "proposal.tsv", proposal, {"kbar": split.kbar})
    return {"size": len(proposal), "kbar": split.kbar}


def cmd_rank(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    split = read_split(args.split)
    features = _features(args, split)
    pipeline = FilterRankPipeline(split.train_graph(), split, None, _scorer(args.rank, features),
                                  _options(args, settings))
    if args.proposal:
        proposal = read_proposal_set(args.proposal)
        k = len(proposal) if args.k is None else min(args.k, len(proposal))
        result = pipeline.evaluate_proposal(proposal, k, args.eval_on)
    else:
        result = pipeline.evaluate_proposal(ProposalSet.empty({"source": "none"}), 0, args.eval_on)
    payload = result.to_dict()
    write_json(out / "results.json", payload)
    return {"value": result.value}


def cmd_search(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    split = read_split(args.split)
    features = _features(args, split)
    pipeline = FilterRankPipeline(split.train_graph(), split, _scorer(args.filter, features),
                                  _scorer(args.rank, features), _options(args, settings))
    start = len(pipeline.starting_set)
    if args.sizes:
        grid = TargetSizeGrid.from_sizes(split.kbar, _int_list(args.sizes), start)
    else:
        grid = target_size_grid(split.kbar, args.scale, start)
    result = pipeline.search(grid)
    write_json(out / "results.json", result.to_dict())
    write_csv(out / "curves.csv", result.curves_frame())
    return {"best_k": result.best_k, "value": result.test_result.value}


def cmd_quality(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    split = read_split(args.split)
    g_train = split.train_graph()
    rank_scorer = _scorer(args.rank, _features(args, split))
    options = _options(args, settings)
    seeds = _int_list(args.seeds)
    if args.mode == "grow":
        levels = _int_list(args.levels)
        runs = [quality_grow(g_train, split, rank_scorer, levels, s, options) for s in seeds]
    else:
        levels = _float_list(args.levels)
        runs = [quality_fixed(g_train, split, rank_scorer, levels, s, options) for s in seeds]
    summary = summarize_quality(runs)
    write_csv(out / "quality.csv", summary)
    write_json(out / "results.json", {
        "mode": args.mode,
        "levels": levels,
        "seeds": seeds,
        "rank": rank_scorer.describe(),
        "points": [[p.to_dict() for p in run] for run in runs],
    })
    return {"levels": len(levels), "seeds": len(seeds)}


def cmd_commute(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    split = read_split(args.split)
    proposal = read_proposal_set(args.proposal)
    sizes = _int_list(args.sizes) if args.sizes else list(range(0, len(proposal) + 1, max(len(proposal) // 10, 1)))
    curve = commute_change_curve(split.train_graph(), split, proposal, sizes)
    write_csv(out / "commute.csv", curve)
    return {"sizes": len(curve)}


def cmd_reproduce(args: argparse.Namespace, out: Path, settings: Settings) -> Dict[str, Any]:
    seeds = list(range(args.seed, args.seed + args.trials))
    options = FilterRankOptions(hits_k=args.hits_k, n_jobs=settings.n_jobs, starting_set_cap=settings.starting_set_cap)
    if args.study == "sbm":
        trials = [sbm_trial(SbmConfig(seed=s), options=options) for s in seeds]
        write_json(out / "results.json", summarize_trials(trials))
        write_csv(out / "trials.csv", trial_frame(trials))
    elif args.study == "sbm-sweep":
        frame = sbm_ratio_sweep(seeds, options=options)
        write_csv(out / "sweep.csv", frame)
        write_csv(out / "sweep_summary.csv", summarize_sweep(frame))
    else:
        options.include_valid = True
        trials = [jin_trial(JinConfig(seed=s), options=options) for s in seeds]
        write_json(out / "results.json", summarize_trials(trials))
        write_csv(out / "trials.csv", trial_frame(trials))
    return {"study": args.study, "seeds": seeds}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", type=str, default=None, help="Output directory (default $EDGE_PROPOSALS_OUTPUT_DIR)")
    sub.add_argument("--seed", type=int, default=0, help="Run seed; every stage derives its own sub-seed")


def _add_eval(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--hits-k", type=int, default=10, help="K for Hits@K (default 10)")
    sub.add_argument("--include-valid", action="store_true", help="Add positive validation edges at test inference")
    sub.add_argument("--force-valid", action="store_true", help="Force validation edges into the test proposal")


def _add_features(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--features", type=str, default=None, help="Node feature CSV for cos-common")
    sub.add_argument("--spectral-dim", type=int, default=None, help="Use a spectral embedding of this dimension")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edge-proposals",
                                     description="Proposal-set augmented link prediction experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("generate", help="Generate a synthetic graph")
    models = gen.add_subparsers(dest="model", required=True)
    sbm = models.add_parser("sbm", help="Stochastic block model")
    sbm.add_argument("--blocks", type=str, default="50,50", help="Comma-separated block sizes")
    sbm.add_argument("--p", type=float, default=0.3, help="Within-block edge probability")
    sbm.add_argument("--q", type=float, default=1.0 / 30.0, help="Between-block edge probability")
    _add_common(sbm)
    jin = models.add_parser("jin", help="Triangle-closing growth model with timestamps")
    jin.add_argument("--nodes", type=int, default=2000)
    jin.add_argument("--r1", type=float, default=2.0)
    jin.add_argument("--r0", type=float, default=0.0005)
    jin.add_argument("--gamma", type=float, default=0.005)
    jin.add_argument("--z-star", type=int, default=5)
    jin.add_argument("--iterations", type=int, default=30_000)
    _add_common(jin)

    split = commands.add_parser("split", help="Split an edge list into train/valid/test")
    split.add_argument("--edges", type=str, required=True, help="Edge list TSV")
    split.add_argument("--kind", choices=["temporal", "random", "sbm"], default="temporal")
    split.add_argument("--fractions", type=str, default="0.8,0.1,0.1")
    split.add_argument("--blocks", type=str, default=None, help="blocks.json for --kind sbm")
    split.add_argument("--labels", type=str, default=None, help="Existing label table for string node ids")
    split.add_argument("--num-nodes", type=int, default=None)
    _add_common(split)

    propose = commands.add_parser("propose", help="Build a proposal set with a filtering scorer")
    propose.add_argument("--split", type=str, required=True, help="Split directory")
    propose.add_argument("--filter", type=str, default="common-neighbors")
    propose.add_argument("--k", type=int, default=None, help="Target size (default kbar)")
    _add_features(propose)
    _add_eval(propose)
    _add_common(propose)

    rank = commands.add_parser("rank", help="Rank evaluation edges on an (augmented) graph")
    rank.add_argument("--split", type=str, required=True)
    rank.add_argument("--rank", type=str, default="common-neighbors")
    rank.add_argument("--proposal", type=str, default=None, help="Proposal TSV; omitted means no augmentation")
    rank.add_argument("--k", type=int, default=None)
    rank.add_argument("--eval-on", choices=["valid", "test"], default="test")
    _add_features(rank)
    _add_eval(rank)
    _add_common(rank)

    search = commands.add_parser("search", help="Select the target size on validation edges")
    search.add_argument("--split", type=str, required=True)
    search.add_argument("--filter", type=str, default="common-neighbors")
    search.add_argument("--rank", type=str, default="common-neighbors")
    search.add_argument("--scale", choices=["large", "small"], default="small")
    search.add_argument("--sizes", type=str, default=None, help="Explicit comma-separated target sizes")
    _add_features(search)
    _add_eval(search)
    _add_common(search)

    quality = commands.add_parser("quality", help="Hits@K under controlled proposal quality")
    quality.add_argument("--split", type=str, required=True)
    quality.add_argument("--rank", type=str, default="cos-common")
    quality.add_argument("--mode", choices=["grow", "fixed"], default="grow")
    quality.add_argument("--levels", type=str, required=True,
                         help="Negative counts (grow) or kept positive fractions (fixed)")
    quality.add_argument("--seeds", type=str, default="0,1,2,3,4")
    _add_features(quality)
    _add_eval(quality)
    _add_common(quality)

    commute = commands.add_parser("commute", help="Commute-time change as proposal edges are added")
    commute.add_argument("--split", type=str, required=True)
    commute.add_argument("--proposal", type=str, required=True)
    commute.add_argument("--sizes", type=str, default=None)
    _add_common(commute)

    reproduce = commands.add_parser("reproduce", help="Run a synthetic study end to end")
    reproduce.add_argument("study", choices=["sbm", "sbm-sweep", "jin"])
    reproduce.add_argument("--trials", type=int, default=10)
    reproduce.add_argument("--hits-k", type=int, default=10)
    _add_common(reproduce)

    rerun = commands.add_parser("rerun", help="Replay a run from its manifest")
    rerun.add_argument("manifest", type=str)
    rerun.add_argument("--out", type=str, default=None, help="Output directory (default: the manifest's)")
    return parser


COMMANDS = {
    "generate": cmd_generate,
    "split": cmd_split,
    "propose": cmd_propose,
    "rank": cmd_rank,
    "search": cmd_search,
    "quality": cmd_quality,
    "commute": cmd_commute,
    "reproduce": cmd_reproduce,
}


def run(argv: Sequence[str]) -> int:
    argv = list(argv)
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
        configure_logging(settings.log_level)

        if args.command == "rerun":
            manifest = read_json(args.manifest)
            out = args.out or str(Path(args.manifest).parent)
            return run(list(manifest["argv"]) + ["--out", out])

        out = Path(args.out or settings.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        logger.info("Running %s into %s", args.command, out)
        summary = COMMANDS[args.command](args, out, settings)
        snapshot = {key: val for key, val in vars(args).items() if key != "out"}
        write_json(out / MANIFEST_NAME, {
            "argv": _strip_out(argv),
            "args": snapshot,
            "version": __version__,
            "summary": summary,
        })
        print(json.dumps({"out": str(out), **summary}, sort_keys=True, default=str))
        return 0
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    code = run(sys.argv[1:])
    sys.exit(code)


if __name__ == "__main__":
    main()
