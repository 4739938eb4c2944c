"""
Command-line front end: preprocess corpora, generate synthetic data,
split, train, evaluate and run the raw-vs-preprocessed benchmark.

A corpus is a directory holding images and a `labels.csv` file with
at least the columns `filename` and `digit`.
"""
import argparse
import dataclasses
import logging
import sys
import numpy as np
import pandas as pd

from pathlib import Path
from tqdm import tqdm
from typing import List, Optional, Sequence, Tuple

from .config import RunConfig
from .constants import NUMTAPREP_LOGGER
from .dataset import LabeledDataset, load_labeled, split, write_corpus, generate_synthetic
from .errors import (BlankImage, ConfigError, CorpusMismatch, EmptyTestSet, EmptyTrainingSet,
                     ItemError, MalformedCsv, MissingColumn, ModelFormatError, SingleClass,
                     UnsupportedModelType)
from .learners import IMPLEMENTED_MODELS, RESERVED_MODELS, evaluate, features, get_model, load_model, save_model
from .pipeline import preprocess_batch, raw_baseline, write_trace
from .pnm import write_pgm
from .report import BenchReport, BenchRow
from .utils import data_digest, file_stem

logger = logging.getLogger(NUMTAPREP_LOGGER)

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2

LABELS_CSV = 'labels.csv'

_USAGE_ERRORS = (ConfigError, MalformedCsv, MissingColumn, CorpusMismatch, ModelFormatError,
                 UnsupportedModelType, EmptyTrainingSet, EmptyTestSet, SingleClass, FileNotFoundError)

##
# Helpers
#

def _load_corpus(data_dir: str, csv: Optional[str], cfg: RunConfig) -> LabeledDataset:
    csv_path = Path(csv) if csv else Path(data_dir) / LABELS_CSV
    if not csv_path.exists():
        raise FileNotFoundError(f'label file {csv_path} not found')
    return load_labeled(csv_path, data_dir, **cfg.dataset)

def _row_indices(ds: LabeledDataset) -> List[int]:
    """
    Original CSV row of every loaded item: rows are either loaded or
    listed among the errors, and items keep row order.
    """
    failed = {e.index for e in ds.errors}
    total = len(ds.items) + len(ds.errors)
    return [i for i in range(total) if i not in failed]

def _model_inputs(ds: LabeledDataset, cfg: RunConfig) -> np.ndarray:
    # gray target-size images pass through raw_baseline unchanged
    return features([raw_baseline(img, cfg.pipeline) for img in ds.images])

def _exit_status(n_ok: int, n_total: int) -> int:
    return EXIT_OK if n_ok == n_total else EXIT_PARTIAL

##
# Commands
#

def cmd_prep(args, cfg: RunConfig) -> int:
    ds = _load_corpus(args.data_dir, args.csv, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    results = preprocess_batch(ds.images, cfg.pipeline, names=ds.filenames, workers=args.workers,
                               with_traces=True, snapshots=args.trace, progress=args.progress)

    records = []
    for row, it, res in zip(_row_indices(ds), ds.items, results):
        rel = f'{it.label}/{file_stem(it.filename)}.pgm'
        if isinstance(res, ItemError):
            status = 'skipped' if res.kind == BlankImage.__name__ else 'error'
            records.append((row, rel, it.label, status, it.source_tag, res.message))
            continue
        img, trace = res
        (out / str(it.label)).mkdir(exist_ok=True)
        write_pgm(img, out / rel)
        if args.trace:
            write_trace(trace, out / 'trace' / file_stem(it.filename))
        records.append((row, rel, it.label, 'ok', it.source_tag, ''))
    for e in ds.errors:
        records.append((e.index, f'{file_stem(e.filename)}.pgm', '', 'error', '', e.message))

    records.sort(key=lambda r: r[0])
    manifest = pd.DataFrame([r[1:] for r in records],
                            columns=['filename', 'digit', 'status', 'source', 'error'])
    manifest.to_csv(out / LABELS_CSV, index=False)

    n_ok = int((manifest['status'] == 'ok').sum())
    print(f'{n_ok} of {len(manifest)} image(s) preprocessed into {out}')
    for status in ('skipped', 'error'):
        n = int((manifest['status'] == status).sum())
        if n:
            print(f'{n} image(s) {status}')
    return _exit_status(n_ok, len(manifest))

def cmd_synth(args, cfg: RunConfig) -> int:
    flags = {
        'count': args.count, 'seed': args.seed, 'salt_pepper_rate': args.salt_pepper,
        'spot_probability': args.spot_prob, 'invert_probability': args.invert_prob,
        'grid_lines_probability': args.grid_prob, 'color_probability': args.color_prob,
        'size': args.size, 'stroke_width': args.stroke_width,
    }
    synth = dataclasses.replace(cfg.synth, **{k: v for k, v in flags.items() if v is not None})
    ds = generate_synthetic(synth)
    csv_path = write_corpus(ds, args.out)
    print(f'{len(ds)} synthetic image(s) written, labels in {csv_path}')
    return EXIT_OK

def cmd_split(args, cfg: RunConfig) -> int:
    split_cfg = cfg.split
    if args.train_frac is not None:
        split_cfg = dataclasses.replace(split_cfg, train_frac=args.train_frac)
    ds = _load_corpus(args.data_dir, args.csv, cfg)
    train, test = split(ds, split_cfg)
    for name, part in (('train', train), ('test', test)):
        renamed = LabeledDataset([
            it._replace(filename=f'{it.label}/{file_stem(it.filename)}.{"ppm" if it.image.ndim == 3 else "pgm"}')
            for it in part])
        write_corpus(renamed, Path(args.out) / name)
        print(f'{name}: {len(part)} image(s)')
    return _exit_status(len(ds), len(ds) + len(ds.errors))

def cmd_train(args, cfg: RunConfig) -> int:
    ds = _load_corpus(args.data_dir, args.csv, cfg)
    model = get_model(args.model, cfg.model_params)
    model.fit(_model_inputs(ds, cfg), ds.labels)
    save_model(model, args.model_path)
    print(f'{model.name} fitted on {len(ds)} image(s) in {model.fit_seconds:.3f}s, saved to {args.model_path}')
    return _exit_status(len(ds), len(ds) + len(ds.errors))

def cmd_eval(args, cfg: RunConfig) -> int:
    model = load_model(args.model_path)
    ds = _load_corpus(args.data_dir, args.csv, cfg)
    metrics = evaluate(model, _model_inputs(ds, cfg), ds.labels)
    print(f'{model.name}: {metrics}')
    print(pd.DataFrame(metrics.confusion).to_string())
    return _exit_status(len(ds), len(ds) + len(ds.errors))

def align_corpora(raw: LabeledDataset, prep: LabeledDataset) -> Tuple[LabeledDataset, LabeledDataset, int]:
    """
    Restricts both pathways to the stems loaded in both. The stem
    sets listed by the two corpora (failed rows included) must agree.
    """
    def listed(ds):
        stems = [file_stem(n) for n in ds.filenames + [e.filename for e in ds.errors]]
        if len(set(stems)) != len(stems):
            raise CorpusMismatch('corpus lists the same file stem twice')
        return set(stems)

    raw_listed, prep_listed = listed(raw), listed(prep)
    if raw_listed != prep_listed:
        diff = sorted(raw_listed ^ prep_listed)
        raise CorpusMismatch(f'{len(diff)} stem(s) differ between corpora, e.g. {diff[:3]}')

    raw_by_stem = dict(zip(raw.stems, raw.items))
    prep_by_stem = dict(zip(prep.stems, prep.items))
    common = sorted(set(raw_by_stem) & set(prep_by_stem))
    for s in common:
        if raw_by_stem[s].label != prep_by_stem[s].label:
            raise CorpusMismatch(f'{s}: label {raw_by_stem[s].label} vs {prep_by_stem[s].label}')
    dropped = len(raw_listed) - len(common)
    return (LabeledDataset([raw_by_stem[s] for s in common]),
            LabeledDataset([prep_by_stem[s] for s in common]), dropped)

def run_bench(raw: LabeledDataset, prep: LabeledDataset, models: Sequence[str],
              cfg: RunConfig, progress: bool = False) -> BenchReport:
    config_hash = cfg.digest()
    report = BenchReport(reserved=RESERVED_MODELS)
    test_digests = {}
    jobs = [(pathway, ds) for pathway, ds in (('raw', raw), ('preprocessed', prep))]
    for pathway, ds in jobs:
        train, test = split(ds, cfg.split)
        test_digests[pathway] = data_digest(sorted(test.stems))
        X_train, X_test = _model_inputs(train, cfg), _model_inputs(test, cfg)
        for name in tqdm(models, disable=not progress, desc=pathway):
            model = get_model(name, cfg.model_params)
            model.fit(X_train, train.labels)
            metrics = evaluate(model, X_test, test.labels)
            logger.info(f'{name}/{pathway}: {metrics}')
            report.add(BenchRow(name, pathway, metrics.accuracy, model.fit_seconds,
                                metrics.predict_seconds, len(train), len(test), config_hash))

    if test_digests['raw'] != test_digests['preprocessed']:
        raise CorpusMismatch('pathways ended up with different test sets')
    report.meta = {
        'schema': 1,
        'seed': cfg.split.seed,
        'train_frac': cfg.split.train_frac,
        'models': list(models),
        'n_items': len(raw),
        'config_hash': config_hash,
        'test_filenames_digest': test_digests,
        'config': cfg.raw,
    }
    return report

def cmd_bench(args, cfg: RunConfig) -> int:
    models = [m.strip() for m in args.models.split(',') if m.strip()]
    for m in models:
        if m not in IMPLEMENTED_MODELS:
            raise UnsupportedModelType(m if m not in RESERVED_MODELS else f'{m} is reserved but not implemented')

    raw, prep, dropped = align_corpora(_load_corpus(args.raw_dir, args.raw_csv, cfg),
                                       _load_corpus(args.prep_dir, args.prep_csv, cfg))
    if dropped:
        logger.warning(f'{dropped} item(s) missing from a pathway were left out')
    report = run_bench(raw, prep, models, cfg, args.progress)
    report.meta['dropped'] = dropped

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_csv(out / 'report.csv')
    report.write_meta(out / 'report.meta.yaml')
    text = report.to_text()
    (out / 'report.txt').write_text(text + '\n')
    if args.plot:
        report.plot(out / 'report.png')
    print(text)
    return EXIT_PARTIAL if dropped else EXIT_OK

##
# Argument parsing
#

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None,
                        help='YAML config file with pipeline, spot, model, split and synth sections')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='override a config option, e.g. --set pipeline.median_k=5 (repeatable)')
    common.add_argument('--seed', type=int, default=None, help='seed for splitting and generation')
    common.add_argument('--progress', action='store_true', help='show progress bars')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    common.add_argument('-q', '--quiet', action='store_true', help='warnings only')

    parser = argparse.ArgumentParser(
        prog='numtaprep',
        description='Handwritten digit image preprocessing and classifier benchmark.',
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest='command', required=True)

    def corpus_args(p, name='data_dir'):
        p.add_argument(name, type=str, help='corpus directory')
        p.add_argument('--csv', type=str, default=None, help=f'label file (default: <dir>/{LABELS_CSV})')

    p = sub.add_parser('prep', parents=[common], help='preprocess a corpus')
    corpus_args(p)
    p.add_argument('--out', type=str, required=True, help='output corpus directory')
    p.add_argument('--trace', action='store_true', help='write per-stage snapshots under <out>/trace/')
    p.add_argument('--workers', type=int, default=1, help='worker processes')
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser('synth', parents=[common], help='generate a synthetic corpus')
    p.add_argument('--out', type=str, required=True)
    p.add_argument('--count', type=int, default=None)
    p.add_argument('--size', type=int, default=None, help='canvas side in pixels')
    p.add_argument('--stroke-width', type=float, default=None, help='stroke width at 64 px')
    p.add_argument('--salt-pepper', type=float, default=None, help='salt-and-pepper pixel rate')
    p.add_argument('--spot-prob', type=float, default=None, help='probability of a dark spot')
    p.add_argument('--invert-prob', type=float, default=None, help='probability of global inversion')
    p.add_argument('--grid-prob', type=float, default=None, help='probability of gridlines')
    p.add_argument('--color-prob', type=float, default=None, help='probability of coloured ink')
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser('split', parents=[common], help='split a corpus into train and test')
    corpus_args(p)
    p.add_argument('--out', type=str, required=True)
    p.add_argument('--train-frac', type=float, default=None)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser('train', parents=[common], help='fit a model and save it')
    corpus_args(p)
    p.add_argument('--model', type=str, required=True, help=f'one of {", ".join(IMPLEMENTED_MODELS)}')
    p.add_argument('--out', dest='model_path', type=str, required=True, help='model file to write')
    p.set_defaults(func=cmd_train)

    p = sub.add_parser('eval', parents=[common], help='evaluate a saved model')
    corpus_args(p)
    p.add_argument('--model', dest='model_path', type=str, required=True, help='model file to read')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser('bench', parents=[common], help='compare raw and preprocessed pathways')
    p.add_argument('raw_dir', type=str, help='raw corpus directory')
    p.add_argument('prep_dir', type=str, help='preprocessed corpus directory')
    p.add_argument('--raw-csv', type=str, default=None)
    p.add_argument('--prep-csv', type=str, default=None)
    p.add_argument('--models', type=str, default=','.join(IMPLEMENTED_MODELS),
                   help='comma-separated model names')
    p.add_argument('--out', type=str, required=True, help='report directory')
    p.add_argument('--plot', action='store_true', help='also draw report.png')
    p.set_defaults(func=cmd_bench)
    return parser

def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else (logging.WARNING if args.quiet else logging.INFO)
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        cfg = RunConfig.load(args.config, args.overrides).with_seed(args.seed)
        return args.func(args, cfg)
    except _USAGE_ERRORS as e:
        logger.error(f'{args.command}: {type(e).__name__}: {e}')
        return EXIT_USAGE

if __name__ == '__main__':
    sys.exit(main())
