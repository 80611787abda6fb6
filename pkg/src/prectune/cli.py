"""Command line front end.

Wires datasets, model training, tuning runs and the experiment protocols
(dataset-size sweep, input-set transfer, hardware snapping, brute-force
oracle) into reproducible jobs with persisted artifacts.

Configuration comes from an optional flat key=value file plus flag
overrides; flags win.  All randomness flows from three named seeds
(input, sample, train) and every output file records them.  Output files
are written atomically, and repeated runs with identical configuration
produce byte-identical CSVs.

Exit codes: 0 success, 1 at least one target infeasible, 2 usage,
configuration or IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field, replace

from .dataset import (
    DatasetFormatError,
    build_dataset,
    compute_error,
    load_dataset,
    reference_output,
    save_dataset,
)
from .flexnum import MANTISSA_MAX, MANTISSA_MIN
from .kernels import gen_input_set, list_benchmarks, run_kernel
from .learn import (
    TrainConfig,
    eval_models,
    save_classifier,
    save_regressor,
    split_dataset,
    train_classifier,
    train_regressor,
)
from .solve import brute_force_optimum, fptuning_baseline, smart_tune, smart_tune_plus

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2

# targets used when none are given
DEFAULT_TARGETS = (1e-30, 1e-25, 1e-20, 1e-15, 1e-10, 1e-7, 1e-5, 1e-3, 1e-1)
# mantissa widths of the common hardware formats, smallest to largest
DEFAULT_HW_FORMATS = (3, 7, 10, 23, 52)
MODES = ("smart", "smart_plus", "baseline")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    benchmark: str = "saxpy"
    shape: dict = field(default_factory=dict)
    targets: tuple = DEFAULT_TARGETS
    nbit_min: int = MANTISSA_MIN
    nbit_max: int = MANTISSA_MAX
    dataset_size: int = 1000
    budget: int = 100
    mode: str = "smart_plus"
    seed_input: int = 0
    seed_sample: int = 0
    seed_train: int = 0
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 0.001
    max_depth: int = 20
    out: str = "runs"

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            max_depth=self.max_depth,
            seed=self.seed_train,
        )

    def seed_line(self) -> str:
        return (
            f"# seed_input={self.seed_input} seed_sample={self.seed_sample}"
            f" seed_train={self.seed_train}"
        )

    def seed_fields(self) -> dict:
        return {
            "seed_input": self.seed_input,
            "seed_sample": self.seed_sample,
            "seed_train": self.seed_train,
        }


# --- configuration loading ------------------------------------------------------

_INT_KEYS = {
    "nbit_min",
    "nbit_max",
    "dataset_size",
    "budget",
    "seed_input",
    "seed_sample",
    "seed_train",
    "epochs",
    "batch_size",
    "max_depth",
}
_FLOAT_KEYS = {"learning_rate"}
_STR_KEYS = {"benchmark", "mode", "out"}


def parse_shape_items(items) -> dict:
    shape = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"shape entry {item!r} is not name=value")
        try:
            shape[key] = int(value)
        except ValueError:
            raise UsageError(f"shape entry {item!r}: value must be an integer") from None
    return shape


def parse_targets(text: str) -> tuple:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            value = float(piece)
        except ValueError:
            raise UsageError(f"target {piece!r} is not a number") from None
        if not value > 0.0:
            raise UsageError(f"target {piece!r} must be positive")
        out.append(value)
    if not out:
        raise UsageError("target list is empty")
    return tuple(out)


def parse_int_list(text: str, what: str) -> tuple:
    try:
        values = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise UsageError(f"{what} {text!r} is not a comma-separated integer list") from None
    if not values:
        raise UsageError(f"{what} list is empty")
    return values


def load_config_file(path: str) -> dict:
    """Flat key=value lines; blank lines and # comments ignored."""
    if not os.path.exists(path):
        raise UsageError(f"config file {path} does not exist")
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key = key.strip()
            value = value.strip()
            if key in _INT_KEYS:
                try:
                    values[key] = int(value)
                except ValueError:
                    raise UsageError(f"{path}:{lineno}: {key} must be an integer") from None
            elif key in _FLOAT_KEYS:
                try:
                    values[key] = float(value)
                except ValueError:
                    raise UsageError(f"{path}:{lineno}: {key} must be a number") from None
            elif key in _STR_KEYS:
                values[key] = value
            elif key == "target":
                values["targets"] = parse_targets(value)
            elif key == "shape":
                values["shape"] = parse_shape_items(
                    [p for p in value.split(",") if p.strip()]
                )
            else:
                raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
    return values


def make_run_config(args) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    flag_map = {
        "benchmark": "benchmark",
        "nbit_min": "nbit_min",
        "nbit_max": "nbit_max",
        "dataset_size": "dataset_size",
        "budget": "budget",
        "mode": "mode",
        "seed_input": "seed_input",
        "seed_sample": "seed_sample",
        "seed_train": "seed_train",
        "epochs": "epochs",
        "batch_size": "batch_size",
        "learning_rate": "learning_rate",
        "max_depth": "max_depth",
        "out": "out",
    }
    for attr, key in flag_map.items():
        flag = getattr(args, attr, None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "target", None):
        values["targets"] = tuple(
            t for chunk in args.target for t in parse_targets(chunk)
        )
    if getattr(args, "shape", None):
        shape = dict(values.get("shape", {}))
        shape.update(parse_shape_items(args.shape))
        values["shape"] = shape

    cfg = RunConfig(**values)
    if not MANTISSA_MIN <= cfg.nbit_min <= cfg.nbit_max <= MANTISSA_MAX:
        raise UsageError(
            f"nbit_min/nbit_max [{cfg.nbit_min}, {cfg.nbit_max}] outside"
            f" [{MANTISSA_MIN}, {MANTISSA_MAX}] or reversed"
        )
    if cfg.mode not in MODES:
        raise UsageError(f"mode {cfg.mode!r} not one of {', '.join(MODES)}")
    if cfg.dataset_size < 1:
        raise UsageError(f"dataset_size {cfg.dataset_size} must be >= 1")
    if cfg.budget < 0:
        raise UsageError(f"budget {cfg.budget} must be >= 0")
    for t in cfg.targets:
        if not t > 0.0:
            raise UsageError(f"target {t!r} must be positive")
    return cfg


def benchmarks_of(cfg: RunConfig) -> list[str]:
    names = [b.strip() for b in cfg.benchmark.split(",") if b.strip()]
    if not names:
        raise UsageError("no benchmark given")
    known = set(list_benchmarks())
    for name in names:
        if name not in known:
            raise UsageError(
                f"unknown benchmark {name!r}; available: {', '.join(sorted(known))}"
            )
    return names


def single_benchmark(cfg: RunConfig) -> str:
    names = benchmarks_of(cfg)
    if len(names) != 1:
        raise UsageError("this command takes exactly one benchmark")
    return names[0]


# --- output helpers -------------------------------------------------------------


def write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_json(path: str, doc: dict) -> None:
    write_atomic(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def csv_text(cfg: RunConfig, header, rows) -> str:
    buf = io.StringIO()
    buf.write(cfg.seed_line() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def target_slug(target: float) -> str:
    return f"{target:g}".replace("e-0", "e-").replace("e+0", "e+")


def ensure_outdir(cfg: RunConfig) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


# --- subcommands ----------------------------------------------------------------


def cmd_dataset(args) -> int:
    cfg = make_run_config(args)
    bench = single_benchmark(cfg)
    outdir = ensure_outdir(cfg)
    ds = build_dataset(
        bench,
        n_samples=cfg.dataset_size,
        nbit_lo=cfg.nbit_min,
        nbit_hi=cfg.nbit_max,
        shape=cfg.shape or None,
        seed_input=cfg.seed_input,
        seed_sample=cfg.seed_sample,
    )
    path = os.path.join(outdir, f"{bench}_dataset.csv")
    save_dataset(ds, path)
    class1 = sum(s.class_label for s in ds.samples)
    print(f"{path}: {len(ds.samples)} samples, {class1} class-1")
    return EXIT_OK


def _load_or_build_dataset(cfg: RunConfig, bench: str, dataset_path, input_set=None):
    if dataset_path:
        ds = load_dataset(dataset_path)
        if ds.benchmark != bench:
            raise UsageError(
                f"dataset {dataset_path} is for {ds.benchmark!r}, not {bench!r}"
            )
        return ds
    return build_dataset(
        bench,
        n_samples=cfg.dataset_size,
        nbit_lo=cfg.nbit_min,
        nbit_hi=cfg.nbit_max,
        shape=cfg.shape or None,
        seed_input=cfg.seed_input,
        seed_sample=cfg.seed_sample,
        input_set=input_set,
    )


def cmd_train(args) -> int:
    cfg = make_run_config(args)
    bench = single_benchmark(cfg)
    outdir = ensure_outdir(cfg)
    ds = _load_or_build_dataset(cfg, bench, args.dataset)
    tc = cfg.train_config()

    # quality is measured on a held-out split, the saved models use all data
    train_part, hold_part = split_dataset(ds, 0.2, seed=cfg.seed_train)
    reg_eval = train_regressor(train_part, tc)
    clf_eval = train_classifier(train_part, tc)
    metrics = eval_models(reg_eval, clf_eval, hold_part)

    regressor = train_regressor(ds, tc)
    classifier = train_classifier(ds, tc)
    reg_path = os.path.join(outdir, f"{bench}_regressor.json")
    clf_path = os.path.join(outdir, f"{bench}_classifier.json")
    save_regressor(regressor, reg_path)
    save_classifier(classifier, clf_path)
    write_json(
        os.path.join(outdir, f"{bench}_metrics.json"),
        {
            "benchmark": bench,
            "n_samples": len(ds.samples),
            "holdout_fraction": 0.2,
            **metrics,
            **cfg.seed_fields(),
        },
    )
    print(
        f"{bench}: rmse={metrics['rmse']} accuracy={metrics['accuracy']:.4f}"
        f" -> {reg_path}, {clf_path}"
    )
    return EXIT_OK


def _run_method(cfg: RunConfig, bench, input_set, target, dataset):
    if cfg.mode == "baseline":
        return fptuning_baseline(bench, input_set, target, cfg.nbit_min, cfg.nbit_max)
    runner = smart_tune if cfg.mode == "smart" else smart_tune_plus
    return runner(
        bench,
        input_set,
        target,
        budget=cfg.budget,
        nbit_min=cfg.nbit_min,
        nbit_max=cfg.nbit_max,
        dataset=dataset,
        dataset_size=cfg.dataset_size,
        seed_sample=cfg.seed_sample,
        train_cfg=cfg.train_config(),
    )


def cmd_tune(args) -> int:
    cfg = make_run_config(args)
    bench = single_benchmark(cfg)
    outdir = ensure_outdir(cfg)
    input_set = gen_input_set(bench, cfg.shape or None, cfg.seed_input)

    dataset = None
    dataset_runs = 0
    if cfg.mode != "baseline":
        dataset = _load_or_build_dataset(cfg, bench, args.dataset, input_set=input_set)
        dataset_runs = 0 if args.dataset else len(dataset.samples)

    rows = []
    all_feasible = True
    for target in cfg.targets:
        result = _run_method(cfg, bench, input_set, target, dataset)
        sol = result.solution
        feasible = bool(result.feasible)
        all_feasible = all_feasible and feasible
        rows.append(
            [
                target_slug(target),
                cfg.mode,
                sol.total_bits if sol is not None else "",
                repr(result.actual_error),
                "true" if feasible else "false",
                result.refinement_iterations,
                result.kernel_runs,
            ]
        )
        write_json(
            os.path.join(outdir, f"{bench}_{cfg.mode}_{target_slug(target)}.json"),
            {
                "benchmark": bench,
                "mode": cfg.mode,
                "target": target,
                "config": list(sol.config) if sol is not None else None,
                "total_bits": sol.total_bits if sol is not None else None,
                "actual_error": result.actual_error,
                "feasible": feasible,
                "status": result.status,
                "iterations": result.refinement_iterations,
                "samples_added": result.samples_added,
                "kernel_runs": result.kernel_runs,
                "pre_refine_total_bits": result.pre_refine_total_bits,
                "pre_refine_error": result.pre_refine_error,
                "dataset_runs": dataset_runs,
                "wall_time_s": result.wall_time,
                "nbit_min": cfg.nbit_min,
                "nbit_max": cfg.nbit_max,
                "shape": dict(sorted(input_set.shape.items())),
                **cfg.seed_fields(),
            },
        )
        state = "ok" if feasible else f"FAILED ({result.status})"
        bits = sol.total_bits if sol is not None else "-"
        print(f"{bench} {cfg.mode} target={target_slug(target)}: {state} bits={bits}")

    summary_path = os.path.join(outdir, f"{bench}_{cfg.mode}_summary.csv")
    header = ["target", "method", "total_bits", "actual_error", "feasible", "iterations", "kernel_runs"]
    write_atomic(summary_path, csv_text(cfg, header, rows))
    print(summary_path)
    return EXIT_OK if all_feasible else EXIT_INFEASIBLE


def cmd_sweep(args) -> int:
    cfg = make_run_config(args)
    benches = benchmarks_of(cfg)
    outdir = ensure_outdir(cfg)
    sizes = parse_int_list(args.sizes, "sizes") if args.sizes else (100, 500, 1000, 2000)
    if list(sizes) != sorted(sizes):
        raise UsageError(f"sizes {sizes} must be ascending")
    if sizes[0] < 1:
        raise UsageError("sizes must be positive")
    hold_n = args.holdout
    if hold_n < 1:
        raise UsageError(f"holdout {hold_n} must be >= 1")

    tc = cfg.train_config()
    rows = []
    for bench in benches:
        # one master draw; prefixes are nested, the tail is the fixed
        # held-out set shared by every size
        master = build_dataset(
            bench,
            n_samples=sizes[-1] + hold_n,
            nbit_lo=cfg.nbit_min,
            nbit_hi=cfg.nbit_max,
            shape=cfg.shape or None,
            seed_input=cfg.seed_input,
            seed_sample=cfg.seed_sample,
        )
        holdout = replace(master, samples=master.samples[sizes[-1]:])
        for size in sizes:
            sub = replace(master, samples=master.samples[:size])
            regressor = train_regressor(sub, tc)
            classifier = train_classifier(sub, tc)
            metrics = eval_models(regressor, classifier, holdout)
            rows.append(
                [size, bench, repr(metrics["rmse"]), repr(metrics["accuracy"])]
            )
            print(f"{bench} size={size}: rmse={metrics['rmse']} accuracy={metrics['accuracy']:.4f}")

    path = os.path.join(outdir, "sweep_rmse.csv")
    write_atomic(path, csv_text(cfg, ["size", "benchmark", "rmse", "accuracy"], rows))
    print(path)
    return EXIT_OK


def cmd_transfer(args) -> int:
    cfg = make_run_config(args)
    benches = benchmarks_of(cfg)
    outdir = ensure_outdir(cfg)
    n_inputs = args.n_inputs
    if n_inputs < 2:
        raise UsageError(f"n_inputs {n_inputs} must be >= 2")

    rows = []
    for bench in benches:
        input_sets = [
            gen_input_set(bench, cfg.shape or None, cfg.seed_input + i)
            for i in range(n_inputs)
        ]
        first = input_sets[0]
        others = input_sets[1:]
        refs = [reference_output(bench, inp) for inp in others]
        dataset = build_dataset(
            bench,
            n_samples=cfg.dataset_size,
            nbit_lo=cfg.nbit_min,
            nbit_hi=cfg.nbit_max,
            shape=cfg.shape or None,
            seed_sample=cfg.seed_sample,
            input_set=first,
        )

        def violation_pct(result, target) -> float:
            # no config found means the target is violated everywhere
            if not result.feasible or result.solution is None:
                return 100.0
            config = result.solution.config
            misses = 0
            for inp, ref in zip(others, refs):
                err = compute_error(run_kernel(bench, inp, config), ref)
                if err > target:
                    misses += 1
            return 100.0 * misses / len(others)

        for target in cfg.targets:
            smart = smart_tune(
                bench,
                first,
                target,
                budget=cfg.budget,
                nbit_min=cfg.nbit_min,
                nbit_max=cfg.nbit_max,
                dataset=dataset,
                train_cfg=cfg.train_config(),
            )
            base = fptuning_baseline(bench, first, target, cfg.nbit_min, cfg.nbit_max)
            pct_smart = violation_pct(smart, target)
            pct_base = violation_pct(base, target)
            rows.append(
                [bench, target_slug(target), repr(pct_smart), repr(pct_base)]
            )
            print(
                f"{bench} target={target_slug(target)}:"
                f" smart={pct_smart:.1f}% baseline={pct_base:.1f}%"
            )

    path = os.path.join(outdir, "transfer_violations.csv")
    header = ["benchmark", "target", "smart_violation_pct", "baseline_violation_pct"]
    write_atomic(path, csv_text(cfg, header, rows))
    print(path)
    return EXIT_OK


def cmd_snap_hw(args) -> int:
    cfg = make_run_config(args)
    formats = (
        parse_int_list(args.formats, "formats") if args.formats else DEFAULT_HW_FORMATS
    )
    formats = tuple(sorted(set(formats)))
    if not formats:
        raise UsageError("format set is empty")
    for f in formats:
        if not MANTISSA_MIN <= f <= MANTISSA_MAX:
            raise UsageError(f"format width {f} outside [{MANTISSA_MIN}, {MANTISSA_MAX}]")
    if not os.path.exists(args.result):
        raise UsageError(f"result file {args.result} does not exist")
    with open(args.result) as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise UsageError(f"{args.result}: not valid JSON ({exc})") from None
    for key in ("benchmark", "config", "target", "shape", "seed_input"):
        if key not in doc:
            raise UsageError(f"{args.result}: missing field {key!r}")
    if doc["config"] is None:
        raise UsageError(f"{args.result}: result has no config to snap")

    def snap_up(width: int) -> int:
        for f in formats:
            if f >= width:
                return f
        return formats[-1]

    bench = doc["benchmark"]
    config = [int(v) for v in doc["config"]]
    snapped = [snap_up(v) for v in config]
    input_set = gen_input_set(bench, dict(doc["shape"]), int(doc["seed_input"]))
    ref = reference_output(bench, input_set)
    err = compute_error(run_kernel(bench, input_set, snapped), ref)
    target = float(doc["target"])
    feasible = err <= target

    outdir = ensure_outdir(cfg)
    stem = os.path.splitext(os.path.basename(args.result))[0]
    out_path = os.path.join(outdir, f"{stem}_snapped.json")
    write_json(
        out_path,
        {
            "benchmark": bench,
            "source_result": os.path.basename(args.result),
            "formats": list(formats),
            "config": config,
            "snapped_config": snapped,
            "total_bits": int(sum(config)),
            "snapped_total_bits": int(sum(snapped)),
            "target": target,
            "actual_error": err,
            "feasible": feasible,
            "shape": dict(sorted(input_set.shape.items())),
            "seed_input": int(doc["seed_input"]),
        },
    )
    state = "ok" if feasible else "INFEASIBLE after snapping"
    print(f"{out_path}: {state}, bits {sum(config)} -> {sum(snapped)}")
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def cmd_oracle(args) -> int:
    cfg = make_run_config(args)
    bench = single_benchmark(cfg)
    outdir = ensure_outdir(cfg)
    input_set = gen_input_set(bench, cfg.shape or None, cfg.seed_input)
    ref = reference_output(bench, input_set)

    rows = []
    all_feasible = True
    for target in cfg.targets:
        try:
            sol = brute_force_optimum(
                bench, input_set, target, cfg.nbit_min, cfg.nbit_max
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if sol is None:
            all_feasible = False
            rows.append([target_slug(target), "", "", "false"])
            print(f"{bench} target={target_slug(target)}: no feasible config")
            continue
        err = compute_error(run_kernel(bench, input_set, sol.config), ref)
        rows.append(
            [
                target_slug(target),
                sol.total_bits,
                " ".join(str(v) for v in sol.config),
                repr(err),
            ]
        )
        print(f"{bench} target={target_slug(target)}: bits={sol.total_bits} config={sol.config}")

    path = os.path.join(outdir, f"{bench}_oracle.csv")
    write_atomic(
        path, csv_text(cfg, ["target", "total_bits", "config", "actual_error"], rows)
    )
    print(path)
    return EXIT_OK if all_feasible else EXIT_INFEASIBLE


# --- parser ---------------------------------------------------------------------


def add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--benchmark", help="benchmark name (comma list where supported)")
    sub.add_argument("--target", action="append", help="error target, repeatable or comma list")
    sub.add_argument("--nbit-min", dest="nbit_min", type=int)
    sub.add_argument("--nbit-max", dest="nbit_max", type=int)
    sub.add_argument("--dataset-size", dest="dataset_size", type=int)
    sub.add_argument("--budget", type=int)
    sub.add_argument("--mode", choices=MODES)
    sub.add_argument("--seed-input", dest="seed_input", type=int)
    sub.add_argument("--seed-sample", dest="seed_sample", type=int)
    sub.add_argument("--seed-train", dest="seed_train", type=int)
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--batch-size", dest="batch_size", type=int)
    sub.add_argument("--learning-rate", dest="learning_rate", type=float)
    sub.add_argument("--max-depth", dest="max_depth", type=int)
    sub.add_argument("--shape", action="append", help="input shape override, name=value")
    sub.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prectune",
        description="per-variable floating-point precision tuning toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("dataset", help="sample a width/error dataset and save it")
    add_common_flags(p)
    p.set_defaults(func=cmd_dataset)

    p = subs.add_parser("train", help="train and save the error models")
    add_common_flags(p)
    p.add_argument("--dataset", help="load this dataset instead of building one")
    p.set_defaults(func=cmd_train)

    p = subs.add_parser("tune", help="find minimal widths for each error target")
    add_common_flags(p)
    p.add_argument("--dataset", help="load this dataset instead of building one")
    p.set_defaults(func=cmd_tune)

    p = subs.add_parser("sweep", help="dataset-size sweep with a fixed held-out set")
    add_common_flags(p)
    p.add_argument("--sizes", help="comma list of training sizes, ascending")
    p.add_argument("--holdout", type=int, default=500, help="held-out sample count")
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("transfer", help="tune on one input set, validate on others")
    add_common_flags(p)
    p.add_argument("--n-inputs", dest="n_inputs", type=int, default=30)
    p.set_defaults(func=cmd_transfer)

    p = subs.add_parser("snap-hw", help="snap a tuned config up to hardware widths")
    add_common_flags(p)
    p.add_argument("--result", required=True, help="per-target result JSON from tune")
    p.add_argument("--formats", help="comma list of hardware mantissa widths")
    p.set_defaults(func=cmd_snap_hw)

    p = subs.add_parser("oracle", help="brute-force optimum over a small width box")
    add_common_flags(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
