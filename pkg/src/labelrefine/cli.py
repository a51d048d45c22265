"""Command-line entry point.

Subcommands: encode, refine-dual, refine-single, refine-fewshot,
cluster-random, ensemble, eval, sweep.  Every run is deterministic given
its inputs and seed; reports carry no timestamps, so repeated invocations
produce byte-identical files.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import fileio
from .errors import EmptyInput, RefineError
from .evaluation import SweepSpec, accuracy, ensemble, one_to_one_accuracy, run_sweep
from .model import (
    EarlyStopping,
    EmbeddingMatrix,
    FEWSHOT_WEIGHTS,
    GoldLabels,
    Metric,
    RefinementConfig,
    validate_dataset,
)
from .refinement import (
    AugmentedInputs,
    LabeledAnchors,
    cluster_random_init,
    refine_dual,
    refine_fewshot,
    refine_single,
)

_METRICS = {"cosine": Metric.COSINE, "l2": Metric.SQUARED_L2}
_STOPPING = {
    "min-objective": EarlyStopping.MIN_OBJECTIVE,
    "last": EarlyStopping.LAST_ITERATION,
}


def _add_config_flags(p: argparse.ArgumentParser, weights: tuple, stopping: str) -> None:
    p.add_argument("--metric", choices=sorted(_METRICS), default="l2",
                   help="distance function (default: l2)")
    p.add_argument("--max-iters", type=int, default=100,
                   help="iteration cap (default: 100)")
    p.add_argument("--weights", type=float, nargs=3, default=list(weights),
                   metavar=("W_MEAN", "W_ANCHOR", "W_CATEGORY"),
                   help=f"centroid interpolation weights (default: {weights})")
    p.add_argument("--early-stopping", choices=sorted(_STOPPING), default=stopping,
                   help=f"iteration selection rule (default: {stopping})")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--no-renormalize", action="store_true",
                   help="keep interpolated centroids off the unit sphere under cosine")


def _config(args) -> RefinementConfig:
    return RefinementConfig(
        metric=_METRICS[args.metric],
        max_iters=args.max_iters,
        centroid_weights=tuple(args.weights),
        early_stopping=_STOPPING[args.early_stopping],
        seed=args.seed,
        renormalize_centroids=not args.no_renormalize,
    )


def _display_names(cats: EmbeddingMatrix) -> Optional[list[str]]:
    if cats.ids is None:
        return None
    return [t.replace("_", " ") for t in cats.ids]


def _load_dual_inputs(manifest_path):
    manifest = fileio.load_manifest(manifest_path)
    if "docs" not in manifest or "cats" not in manifest:
        raise EmptyInput("manifest must name docs= and cats= files")
    docs = fileio.load_embedding_matrix(manifest["docs"])
    cats = fileio.load_embedding_matrix(manifest["cats"])
    gold = fileio.load_gold_labels(manifest["gold"]) if "gold" in manifest else None
    return manifest, docs, cats, gold


def _config_echo(args, subcommand: str) -> dict:
    return {
        "subcommand": subcommand,
        "metric": args.metric,
        "max_iters": args.max_iters,
        "weights": " ".join(repr(float(w)) for w in args.weights),
        "early_stopping": args.early_stopping,
        "seed": args.seed,
        "renormalize_centroids": not args.no_renormalize,
    }


def _cmd_encode(args) -> int:
    table = fileio.load_vectors(args.vectors, lowercase=not args.no_lowercase)
    vectors = []
    tokens = []
    with open(args.input, encoding="utf-8") as f:
        for line in f:
            text = line.strip()
            if not text:
                continue
            vectors.append(fileio.encode_average(text, table))
            tokens.append("_".join(text.split()))
    if not vectors:
        raise EmptyInput(f"no text lines in {args.input}")
    m = EmbeddingMatrix(np.stack(vectors))
    fileio.write_embedding_matrix(args.output, m, ids=tokens)
    return 0


def _cmd_refine_dual(args) -> int:
    manifest, docs, cats, gold = _load_dual_inputs(args.manifest)
    validate_dataset(docs, cats, gold)
    augmented = AugmentedInputs(
        extra_category_embeddings=(
            fileio.load_embedding_matrix(manifest["aug_cats"]) if "aug_cats" in manifest else None
        ),
        extra_text_embeddings=(
            fileio.load_embedding_matrix(manifest["aug_text"]) if "aug_text" in manifest else None
        ),
    )
    result = refine_dual(docs, cats, _config(args), augmented)
    fileio.write_refinement_report(
        result, args.output,
        category_names=_display_names(cats),
        config_echo=_config_echo(args, "refine-dual"),
    )
    return 0


def _cmd_refine_fewshot(args) -> int:
    manifest, docs, cats, gold = _load_dual_inputs(args.manifest)
    validate_dataset(docs, cats, gold)
    if "anchors" not in manifest:
        raise EmptyInput("few-shot refinement needs an anchors= manifest entry")
    anchor_embeddings, labels = fileio.load_anchors(manifest["anchors"])
    anchors = LabeledAnchors.from_labels(anchor_embeddings, labels, cats.rows)
    result = refine_fewshot(docs, cats, anchors, _config(args))
    fileio.write_refinement_report(
        result, args.output,
        category_names=_display_names(cats),
        config_echo=_config_echo(args, "refine-fewshot"),
    )
    return 0


def _cmd_refine_single(args) -> int:
    scores = fileio.load_score_matrix(args.scores)
    config = RefinementConfig(
        max_iters=args.max_iters,
        early_stopping=EarlyStopping.LAST_ITERATION,
        seed=args.seed,
    )
    result = refine_single(scores, config)
    fileio.write_refinement_report(
        result, args.output,
        config_echo={"subcommand": "refine-single", "max_iters": args.max_iters, "seed": args.seed},
    )
    return 0


def _cmd_cluster_random(args) -> int:
    manifest, docs, cats, gold = _load_dual_inputs(args.manifest)
    k = args.k if args.k is not None else cats.rows
    result = cluster_random_init(
        docs, k, seed=args.seed, metric=_METRICS[args.metric], max_iters=args.max_iters
    )
    lines = [
        "kind: clustering_result",
        f"k: {k}",
        f"seed: {args.seed}",
        f"metric: {args.metric}",
        f"converged: {str(result.converged).lower()}",
        f"iterations_run: {result.iterations_run}",
        "objective_per_iter: " + " ".join(repr(float(x)) for x in result.objective_per_iter),
    ]
    if gold is not None:
        acc, mapping = one_to_one_accuracy(result.assignments, gold, k)
        lines.append(f"one_to_one_accuracy: {acc!r}")
        lines.append("mapping: " + " ".join(str(m) for m in mapping))
    lines.append("assignments:")
    for pos, c in enumerate(result.assignments):
        lines.append(f"{pos}\t{int(c)}")
    with open(args.output, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return 0


def _cmd_ensemble(args) -> int:
    runs = [fileio.load_score_matrix(p) for p in args.inputs]
    preds = ensemble(runs)
    lines = ["kind: ensemble_result", f"runs: {len(runs)}", "predictions:"]
    for pos, c in enumerate(preds):
        lines.append(f"{pos}\t{int(c)}")
    with open(args.output, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return 0


def _load_predictions(path) -> np.ndarray:
    with open(path, encoding="utf-8") as f:
        first = f.readline()
    if first.startswith("kind: refinement_result"):
        return fileio.read_refinement_report(path).final_predictions
    is_report = first.startswith("kind:")
    preds = []
    with open(path, encoding="utf-8") as f:
        in_block = not is_report
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line == "predictions:" or line == "assignments:":
                in_block = True
                continue
            if not in_block:
                continue
            parts = line.split("\t")
            preds.append(int(parts[1] if len(parts) > 1 else parts[0]))
    if not preds:
        raise EmptyInput(f"no predictions found in {path}")
    return np.array(preds, dtype=np.int64)


def _cmd_eval(args) -> int:
    preds = _load_predictions(args.preds)
    gold = fileio.load_gold_labels(args.gold)
    acc = accuracy(preds, gold)
    lines = ["kind: eval_result", f"accuracy: {acc!r}"]
    if args.one_to_one:
        k = args.k if args.k is not None else int(max(preds.max(), gold.labels.max())) + 1
        o2o, mapping = one_to_one_accuracy(preds, gold, k)
        lines.append(f"one_to_one_accuracy: {o2o!r}")
        lines.append("mapping: " + " ".join(str(m) for m in mapping))
    with open(args.output, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    return 0


def _read_name_lines(path) -> list[tuple[str, ...]]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            out.append(tuple(n.strip() for n in line.split(";") if n.strip()))
    return out


def _cmd_sweep(args) -> int:
    manifest = fileio.load_manifest(args.manifest)
    if "docs" not in manifest or "gold" not in manifest:
        raise EmptyInput("sweep manifest must name docs= and gold= files")
    docs = fileio.load_embedding_matrix(manifest["docs"])
    gold = fileio.load_gold_labels(manifest["gold"])
    table = fileio.load_vectors(args.vectors)

    from .model import CategorySet, Dataset

    label_sets: tuple = ()
    pools: tuple = ()
    if args.label_sets:
        label_sets = tuple(CategorySet(names) for names in _read_name_lines(args.label_sets))
    if args.synonym_pools:
        pools = tuple(_read_name_lines(args.synonym_pools))
    spec = SweepSpec(
        label_sets=label_sets,
        synonym_pools=pools,
        sample_count=args.samples,
        seed=args.seed,
    )
    config = _config(args)
    dataset = Dataset(docs=docs, cats=docs, gold=gold)  # cats filled per label set
    report = run_sweep(
        dataset, spec, config,
        encoder=lambda name: fileio.encode_average(name, table),
        jobs=args.jobs,
    )
    fileio.write_evaluation_report(report, args.output)
    fileio.write_scatter_table(report, args.output + ".scatter.tsv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labelrefine",
        description="k-means label refinement and evaluation for dataless text classification",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("encode", help="average word vectors over text lines")
    p.add_argument("--vectors", required=True, help="word2vec-format vector table")
    p.add_argument("--input", required=True, help="one text per line")
    p.add_argument("--output", required=True)
    p.add_argument("--no-lowercase", action="store_true")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("refine-dual", help="refine predictions in embedding space")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output", required=True)
    _add_config_flags(p, (0.5, 0.0, 0.5), "min-objective")
    p.set_defaults(func=_cmd_refine_dual)

    p = sub.add_parser("refine-fewshot", help="refine with labeled anchors")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output", required=True)
    _add_config_flags(p, FEWSHOT_WEIGHTS, "min-objective")
    p.set_defaults(func=_cmd_refine_fewshot)

    p = sub.add_parser("refine-single", help="refine a score matrix in probability space")
    p.add_argument("--scores", required=True, help="TSV score matrix")
    p.add_argument("--output", required=True)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_refine_single)

    p = sub.add_parser("cluster-random", help="k-means from random document centroids")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=int, default=None, help="cluster count (default: number of categories)")
    p.add_argument("--metric", choices=sorted(_METRICS), default="l2")
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_cluster_random)

    p = sub.add_parser("ensemble", help="sum score matrices and predict")
    p.add_argument("--inputs", required=True, nargs="+", help="score matrix files")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_ensemble)

    p = sub.add_parser("eval", help="score predictions against gold labels")
    p.add_argument("--preds", required=True, help="report file or one index per line")
    p.add_argument("--gold", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--one-to-one", action="store_true", help="also report optimal-assignment accuracy")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="refine under many label-name choices")
    p.add_argument("--manifest", required=True)
    p.add_argument("--vectors", required=True, help="word2vec-format vector table")
    p.add_argument("--label-sets", default=None, help="one label set per line, names ';'-separated")
    p.add_argument("--synonym-pools", default=None, help="one per-category pool per line, ';'-separated")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", required=True)
    _add_config_flags(p, (0.5, 0.0, 0.5), "min-objective")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RefineError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
