"""Command-line pipeline: gen-corpus -> extract -> train -> evaluate/predict.

Feature extraction writes CSV caches; training and evaluation consume
caches only, never raw audio, so slow decoding happens once. Every
command that takes --seed is fully reproducible: identical invocations
produce byte-identical caches, models, and reports.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .audio_io import CANONICAL_RATE, DEFAULT_TARGET_RMS, decode_wav, resample
from .corpus import SynthSpec, generate_corpus
from .datafiles import (
    label_name,
    read_cache,
    read_manifest,
    write_cache,
)
from .errors import FadogateError
from .evaluation import cross_validate, evaluate_split, train_test_split, write_report
from .excerpt import ExcerptStrategy, select_excerpt
from .features import FeatureConfig, extract_feature_vector
from .model_io import load_model, save_model
from .svm import decision_value, fit_svm, grid_search

log = logging.getLogger("fadogate")

STRATEGY_CHOICES = [s.value for s in ExcerptStrategy]


def _add_audio_flags(parser):
    parser.add_argument("--strategy", choices=STRATEGY_CHOICES,
                        default=ExcerptStrategy.MAX_RMS.value,
                        help="which 10-second window to analyze")
    parser.add_argument("--duration", type=float, default=10.0,
                        help="excerpt length in seconds")
    parser.add_argument("--sample-rate", type=int, default=CANONICAL_RATE,
                        help="analysis rate; sources are downsampled to this")
    parser.add_argument("--fft-size", type=int, default=2048)
    parser.add_argument("--n-mels", type=int, default=40)
    parser.add_argument("--target-rms", type=float, default=DEFAULT_TARGET_RMS)
    # extraction is deterministic; the flag exists so every command shares
    # the same replayable interface
    parser.add_argument("--seed", type=int, default=0)


def _feature_config(args) -> FeatureConfig:
    return FeatureConfig(fft_size=args.fft_size, n_mels=args.n_mels,
                         target_rms=args.target_rms)


def _song_vector(path, args):
    """Full single-file pipeline: decode, downsample, excerpt, features."""
    buf = decode_wav(path)
    buf = resample(buf, args.sample_rate)
    strategy = ExcerptStrategy.from_cli(args.strategy)
    cut = select_excerpt(buf, strategy, args.duration)
    if cut.padded:
        log.warning("%s: shorter than %gs, zero-padded", path, args.duration)
    return extract_feature_vector(cut, _feature_config(args))


def _extract_one(job):
    path, args = job
    return _song_vector(path, args).values


def cmd_extract(args) -> int:
    entries = read_manifest(args.manifest)
    manifest_dir = Path(args.manifest).resolve().parent

    def resolve(p):
        q = Path(p)
        return q if q.is_absolute() else manifest_dir / q

    jobs = [(resolve(e.path), args) for e in entries]
    results = []
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            futures = [pool.submit(_extract_one, job) for job in jobs]
            for entry, fut in zip(entries, futures):
                try:
                    results.append((entry, fut.result()))
                except (FadogateError, OSError) as exc:
                    results.append((entry, exc))
    else:
        for entry, job in zip(entries, jobs):
            try:
                results.append((entry, _extract_one(job)))
            except (FadogateError, OSError) as exc:
                results.append((entry, exc))

    rows = []
    failed = 0
    for entry, outcome in results:
        if isinstance(outcome, Exception):
            failed += 1
            log.error("%s: %s", entry.path, outcome)
        else:
            rows.append((entry.path, entry.label, outcome))
    if not rows:
        print("error: no song could be processed", file=sys.stderr)
        return 1
    write_cache(rows, args.out)
    print(f"processed {len(rows)}, failed {failed} -> {args.out}")
    return 0


def _require_both_classes(dataset) -> None:
    if len(set(dataset.labels.tolist())) < 2:
        raise FadogateError(
            "cache holds a single class; training needs both fado and other"
        )


def cmd_train(args) -> int:
    dataset = read_cache(args.cache)
    _require_both_classes(dataset)

    run_grid = args.grid or args.c is None or args.gamma is None
    grid_points = None
    cv_accuracy = None
    if run_grid:
        result = grid_search(dataset, folds=args.folds, seed=args.seed)
        c, gamma, cv_accuracy = result.best_c, result.best_gamma, result.cv_accuracy
        grid_points = result.points
        print(f"grid search: C={c:g} gamma={gamma:g} "
              f"cv accuracy {cv_accuracy:.2f}%")
    else:
        c, gamma = args.c, args.gamma

    model = fit_svm(dataset, c, gamma, cache_mb=args.cache_mb)
    if not model.converged:
        log.warning("training hit its iteration budget before tolerance")
    save_model(model, args.model_out)

    report_path = args.report_out or f"{args.model_out}.train.json"
    doc = {
        "C": c,
        "gamma": gamma,
        "cv_accuracy": cv_accuracy,
        "grid": run_grid,
        "folds": args.folds,
        "seed": args.seed,
        "n_songs": len(dataset),
        "n_support_vectors": len(model.support_vectors),
        "converged": model.converged,
    }
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

    if run_grid and not args.no_figures:
        from .plots import save_grid_figure
        fig = save_grid_figure(grid_points, report_path)
        log.info("wrote %s", fig)
    print(f"model -> {args.model_out} (C={c:g}, gamma={gamma:g}, "
          f"{len(model.support_vectors)} SVs)")
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    failed = 0

    for path in args.audio:
        try:
            vector = _song_vector(path, args)
            dv = decision_value(model, vector.values)
        except (FadogateError, OSError) as exc:
            failed += 1
            print(f"error: {path}: {exc}", file=sys.stderr)
            continue
        name = label_name(1 if dv >= 0 else -1)
        print(f"{path}\t{name}\t{dv:.9g}")

    if args.cache:
        dataset = read_cache(args.cache)
        for item_id, vec in zip(dataset.ids, dataset.vectors):
            dv = decision_value(model, vec)
            name = label_name(1 if dv >= 0 else -1)
            print(f"{item_id}\t{name}\t{dv:.9g}")

    return 1 if failed else 0


def cmd_evaluate(args) -> int:
    dataset = read_cache(args.cache)
    _require_both_classes(dataset)

    c, gamma = args.c, args.gamma
    extra = {"mode": args.mode}
    if c is None or gamma is None:
        # mirror the usual protocol: pick (C, gamma) by grid search on the
        # training side only
        if args.mode == "split":
            grid_train, _ = train_test_split(dataset, args.train_fraction,
                                             args.seed)
        else:
            grid_train = dataset
        result = grid_search(grid_train, folds=args.folds, seed=args.seed)
        c, gamma = result.best_c, result.best_gamma
        extra["grid"] = True
        log.info("grid search chose C=%g gamma=%g (cv %.2f%%)",
                 c, gamma, result.cv_accuracy)

    if args.mode == "cv":
        report = cross_validate(dataset, c, gamma, args.folds, args.seed)
    else:
        report = evaluate_split(dataset, c, gamma, args.train_fraction,
                                args.seed)
        print(f"train {report.params['n_train']} / test {report.params['n_test']}")

    write_report(report, args.report, strategy=args.strategy, extra_params=extra)
    cm = report.confusion
    print(f"accuracy {report.accuracy:.2f}%")
    print("confusion (predicted x actual):")
    print(f"  fado : {cm.tp:5d} {cm.fp:5d}")
    print(f"  other: {cm.fn:5d} {cm.tn:5d}")

    if not args.no_figures:
        from .plots import save_report_figures
        for fig in save_report_figures(report, args.report):
            log.info("wrote %s", fig)
    return 0


def cmd_gen_corpus(args) -> int:
    spec = SynthSpec(n_per_class=args.n_per_class, seed=args.seed,
                     duration_s=args.duration)
    manifest = generate_corpus(spec, args.out_dir)
    print(f"{2 * args.n_per_class} clips -> {manifest}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fadogate",
        description="Decide whether a song is Fado from a 10-second excerpt.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="compute feature vectors for a manifest")
    p.add_argument("manifest", help="CSV of path,label rows")
    p.add_argument("--out", required=True, help="feature cache to write")
    _add_audio_flags(p)
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel extraction workers")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train a classifier from a feature cache")
    p.add_argument("cache")
    p.add_argument("--model-out", required=True)
    p.add_argument("--c", type=float, default=None, help="penalty parameter")
    p.add_argument("--gamma", type=float, default=None, help="RBF width")
    p.add_argument("--grid", action="store_true",
                   help="pick C/gamma by grid search even if both are given")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-out", default=None)
    p.add_argument("--cache-mb", type=float, default=256.0,
                   help="kernel row-cache budget during training")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify audio files or cached vectors")
    p.add_argument("model")
    p.add_argument("audio", nargs="*", help="WAV files to classify")
    p.add_argument("--cache", default=None,
                   help="classify the rows of a feature cache instead")
    _add_audio_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="cross-validate or train/test a cache")
    p.add_argument("cache")
    p.add_argument("--mode", choices=["cv", "split"], default="cv")
    p.add_argument("--c", type=float, default=None,
                   help="penalty parameter; omitted: grid search")
    p.add_argument("--gamma", type=float, default=None,
                   help="RBF width; omitted: grid search")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--train-fraction", type=float, default=2.0 / 3.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True, help="report JSON to write")
    p.add_argument("--strategy", choices=STRATEGY_CHOICES, default=None,
                   help="recorded in the report for bookkeeping")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-corpus", help="write a synthetic two-class corpus")
    p.add_argument("out_dir")
    p.add_argument("--n-per-class", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=12.0,
                   help="clip length in seconds")
    p.set_defaults(func=cmd_gen_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (FadogateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
