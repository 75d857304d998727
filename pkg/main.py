"""HELENA channel estimation: dataset generation, training, evaluation and benchmarking."""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import numpy as np

from chansim.dataset import Dataset, generate_dataset
from errors import (ConfigurationError, DimensionError, FormatError, HelenaError, NumericError, TrainingError)
from evaluation import (EvalReport, HelenaEstimator, LsEstimator, LsLiEstimator, benchmark_inference, evaluate,
                        resolve_methods)
from fileio import atomic_write, write_text_atomic
from network.complexity import count_flops, flop_breakdown
from network.model import ModelConfig, ModelWeights, build, count_params
from numeric.tensor import set_default_dtype
from settings import RunConfig
from training import TrainingHistory, fit, load_checkpoint, save_checkpoint, split_dataset

logger = logging.getLogger('helena')

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DIVERGED = 4
EXIT_ARTIFACT = 5

INIT_STREAM = 6

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(message)s'


# ==================== LOGGING ====================
def setup_logging(run_dir: str, verbose: bool = False) -> List[logging.Handler]:
    """stderr plus ``run.log`` in ``run_dir``; returns the handlers so they can be detached."""
    level = logging.DEBUG if verbose else logging.INFO
    root = logging.getLogger()
    root.setLevel(level)
    fmt = logging.Formatter(LOG_FORMAT)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if run_dir:
        os.makedirs(run_dir, exist_ok=True)
    handlers.append(logging.FileHandler(os.path.join(run_dir or '.', 'run.log'), encoding='utf-8'))
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(fmt)
        root.addHandler(handler)
    return handlers


def teardown_logging(handlers: List[logging.Handler]):
    root = logging.getLogger()
    for handler in handlers:
        root.removeHandler(handler)
        handler.close()


# ==================== HELPERS ====================
def stem(path: str) -> str:
    return os.path.splitext(path)[0]


def write_manifest(out_path: str, command: str, config: RunConfig):
    lines = [f"# {command} run manifest", f"command={command}"]
    for key, value in config.items():
        lines.append(f"{key}={value}  # {config.sources[key]}")
    write_text_atomic(os.path.join(os.path.dirname(os.path.abspath(out_path)), 'run-manifest.txt'),
                      '\n'.join(lines) + '\n')


def load_dataset(path: str, model: ModelConfig) -> Dataset:
    ds = Dataset.load(path)
    if ds.grid_shape != model.grid_shape:
        raise DimensionError(f"dataset {path} holds grids {list(ds.grid_shape)}, "
                             f"model config expects {list(model.grid_shape)}")
    return ds


def model_weights(config: RunConfig, fresh: bool = False) -> ModelWeights:
    model = config.model_config()
    if fresh:
        return build(model, np.random.default_rng([config.get_int('seed'), INIT_STREAM]))
    return load_checkpoint(config.get('checkpoint'), model)


# ==================== COMMANDS ====================
def cmd_generate(config: RunConfig) -> int:
    out = config.get('out') or config.get('dataset')
    ds = generate_dataset(config.get_int('samples'), out, config.get_int('seed'),
                          pattern=config.pilot_pattern(), n_subcarriers=config.get_int('n_subcarriers'),
                          n_symbols=config.get_int('n_symbols'), threads=config.get_int('threads'),
                          progress=sys.stderr.isatty())
    write_manifest(out, 'generate', config)
    print(f"{out}\t{len(ds)} samples\t{os.path.getsize(out)} bytes")
    return EXIT_OK


def cmd_train(config: RunConfig) -> int:
    model = config.model_config()
    train_cfg = config.train_config()
    checkpoint = config.get('out') or config.get('checkpoint')
    history_path = stem(checkpoint) + '.history.csv'
    ds = load_dataset(config.get('dataset'), model)
    train_idx, val_idx, test_idx = split_dataset(ds, train_cfg.ratios, train_cfg.seed)
    logger.info("split %d samples into %d/%d/%d", len(ds), len(train_idx), len(val_idx), len(test_idx))

    weights = model_weights(config, fresh=True)
    logger.info("HELENA%s: %d parameters", '' if model.use_se else '-MHSA', count_params(weights))
    try:
        best, history = fit(weights, ds, train_cfg, train_idx, val_idx, checkpoint_path=checkpoint,
                            pattern=config.pilot_pattern(), progress=sys.stderr.isatty())
    except TrainingError as e:
        if isinstance(e.history, TrainingHistory):
            e.history.export_csv(history_path)
        raise
    if not len(history):
        save_checkpoint(checkpoint, best, 0, float('nan'), train_cfg.lr0)
    history.export_csv(history_path)
    write_manifest(checkpoint, 'train', config)
    best_epoch = history.best_epoch()
    if best_epoch is not None:
        print(f"{checkpoint}\tepoch {best_epoch.epoch}\tval_loss {best_epoch.val_loss:.6g}\t"
              f"{len(history)} epochs")
    else:
        print(f"{checkpoint}\tinitial weights\t0 epochs")
    return EXIT_OK


def cmd_eval(config: RunConfig) -> int:
    model = config.model_config()
    train_cfg = config.train_config()
    methods = resolve_methods(config.get('method'))
    out = config.get('out') or 'report.csv'
    pattern = config.pilot_pattern()

    ds = load_dataset(config.get('dataset'), model)
    _, _, test_idx = split_dataset(ds, train_cfg.ratios, train_cfg.seed)
    report = EvalReport()
    estimators = {'ls': lambda: LsEstimator(), 'lsli': lambda: LsLiEstimator(pattern)}
    if 'helena' in methods:
        weights = model_weights(config)
        report.param_count = count_params(weights)
        report.flop_count = count_flops(model)
        estimators['helena'] = lambda: HelenaEstimator(weights, train_cfg.input_mode, pattern)
    for method in methods:
        report.add(evaluate(estimators[method](), ds, test_idx, batch_size=train_cfg.batch_size,
                            threads=config.get_int('threads'), method=method))

    report.export_csv(out)
    report.export_json(stem(out) + '.json')
    write_manifest(out, 'eval', config)
    for result in report.results:
        change = report.relative_change(result.method)
        suffix = ''
        if change is not None and result.method != report.reference:
            suffix = f"\t{change:+.1f}% vs {report.reference}"
        print(f"{result.method}\t{result.nmse_db:.3f} dB{suffix}")
    return EXIT_OK


def cmd_bench(config: RunConfig, fresh: bool = False) -> int:
    model = config.model_config()
    out = config.get('out') or 'bench.json'
    weights = model_weights(config, fresh=fresh)
    breakdown = flop_breakdown(model)
    flops = count_flops(model)
    params = count_params(weights)
    latency = benchmark_inference(weights, runs=config.get_int('runs'), warmup=config.get_int('warmup'),
                                  seed=config.get_int('seed'))

    document = {
        'param_count': params,
        'flop_count': flops,
        'flop_breakdown': [{'layer': name, 'flops': value} for name, value in breakdown],
        'latency': latency.to_dict(),
        'model': model.to_dict(),
    }
    with atomic_write(out, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write('\n')
    write_manifest(out, 'bench', config)

    print(f"params\t{params}")
    print(f"flops\t{flops}")
    for name, value in breakdown:
        print(f"  {name}\t{value}")
    print(f"latency_ms\tmean {latency.mean_ms:.4f}\tstd {latency.std_ms:.4f}\tmin {latency.min_ms:.4f}\t"
          f"max {latency.max_ms:.4f}\truns {latency.runs}\tbudget {100 * latency.budget_fraction:.1f}%")
    return EXIT_OK


# ==================== ARGUMENTS ====================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='key=value run configuration file')
    common.add_argument('--seed', type=int, help='master seed (u64)')
    common.add_argument('--threads', type=int, help='worker threads (default 1)')
    common.add_argument('--out', help='output path')
    common.add_argument('--precision', choices=['float32', 'float64'])
    common.add_argument('--verbose', action='store_true', help='debug logging')

    parser = argparse.ArgumentParser(prog='helena', description=__doc__)
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('generate', parents=[common], help='synthesize a dataset file')
    gen.add_argument('--samples', type=int, help='sample count, a multiple of the 11 SNR values')

    train = sub.add_parser('train', parents=[common], help='train HELENA on a dataset')
    train.add_argument('--dataset')
    train.add_argument('--checkpoint')
    train.add_argument('--epochs', type=int, dest='max_epochs')
    train.add_argument('--no-se', action='store_true', help='train the MHSA-only variant')
    train.add_argument('--input-mode', choices=['pilots', 'interpolated'], dest='input_mode')

    ev = sub.add_parser('eval', parents=[common], help='NMSE per SNR on the test split')
    ev.add_argument('--dataset')
    ev.add_argument('--checkpoint')
    ev.add_argument('--method', choices=['all', 'helena', 'ls', 'lsli'])
    ev.add_argument('--no-se', action='store_true')
    ev.add_argument('--input-mode', choices=['pilots', 'interpolated'], dest='input_mode')

    bench = sub.add_parser('bench', parents=[common], help='parameter, FLOP and latency report')
    bench.add_argument('--checkpoint')
    bench.add_argument('--runs', type=int)
    bench.add_argument('--fresh', action='store_true', help='benchmark freshly initialized weights')
    bench.add_argument('--no-se', action='store_true')
    return parser


OVERRIDE_KEYS = ('seed', 'threads', 'out', 'precision', 'samples', 'dataset', 'checkpoint', 'max_epochs', 'method',
                 'runs', 'input_mode')


def resolve_config(args: argparse.Namespace) -> RunConfig:
    overrides = {key: getattr(args, key) for key in OVERRIDE_KEYS if getattr(args, key, None) is not None}
    if getattr(args, 'no_se', False):
        overrides['use_se'] = False
    return RunConfig.load(args.config, overrides).validate()


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    set_default_dtype(config.get('precision'))
    if args.command == 'generate':
        return cmd_generate(config)
    if args.command == 'train':
        return cmd_train(config)
    if args.command == 'eval':
        return cmd_eval(config)
    return cmd_bench(config, fresh=args.fresh)


# ==================== ENTRY POINT ====================
def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    run_dir = os.path.dirname(os.path.abspath(args.out)) if args.out else os.getcwd()
    handlers: List[logging.Handler] = []
    try:
        handlers = setup_logging(run_dir, args.verbose)
        return run(args)
    except ConfigurationError as e:
        logger.error("configuration error%s: %s", f" [{e.field}]" if e.field else '', e)
        return EXIT_CONFIG
    except TrainingError as e:
        logger.error("training diverged after %d finite epochs: %s", len(e.history), e)
        return EXIT_DIVERGED
    except (FormatError, DimensionError) as e:
        logger.error("artifact mismatch: %s", e)
        return EXIT_ARTIFACT
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO
    except (NumericError, HelenaError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ARTIFACT
    finally:
        set_default_dtype('float32')
        teardown_logging(handlers)


if __name__ == '__main__':
    sys.exit(main())
