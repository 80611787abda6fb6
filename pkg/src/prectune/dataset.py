"""Training data for the error models.

A sample pairs a per-slot width config with the output error it produces
on one fixed input set.  The error metric is the worst-case relative
squared deviation from the binary64 run of the same kernel on the same
inputs:

    error = max_i (out_i - ref_i)^2 / max(ref_i^2, 1e-60)

Any non-finite entry in the tuned output makes the error infinite.  The
regression target is the negated decimal log of the error, clamped to
[-40, 40]; the classification label marks configs whose error exceeds 0.9
(outputs with no usable digits, including overflow to inf or nan).

Configs are drawn by integer Latin hypercube sampling over the full width
box.  Dependency edges between slots are deliberately not enforced here:
the models see the whole box and the solver applies the constraints.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .flexnum import MANTISSA_MAX, MANTISSA_MIN
from .kernels import InputSet, gen_input_set, get_benchmark, run_kernel

ERROR_FLOOR = 1e-40
LOG_ERR_CAP = 40.0
CLASS_THRESHOLD = 0.9
_REF_EPS = 1e-60


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    config: tuple[int, ...]
    error: float
    log_err: float
    class_label: int


@dataclass
class Dataset:
    benchmark: str
    nbit_lo: int
    nbit_hi: int
    seed_input: int
    seed_sample: int
    shape: dict[str, int]
    samples: list[Sample]

    @property
    def n_var(self) -> int:
        if self.samples:
            return len(self.samples[0].config)
        return get_benchmark(self.benchmark).n_var

    def configs(self) -> np.ndarray:
        return np.array([s.config for s in self.samples], dtype=np.int64)

    def log_errs(self) -> np.ndarray:
        return np.array([s.log_err for s in self.samples])

    def class_labels(self) -> np.ndarray:
        return np.array([s.class_label for s in self.samples], dtype=np.int64)


def lhs_configs(n_samples: int, n_dims: int, lo: int, hi: int, seed: int) -> np.ndarray:
    """Integer Latin hypercube: per dimension, one draw from each of
    n_samples equal strata of [lo, hi], in shuffled stratum order."""
    if n_samples < 1:
        raise ValueError(f"need at least one sample, got {n_samples}")
    if not (MANTISSA_MIN <= lo <= hi <= MANTISSA_MAX):
        raise ValueError(f"width bounds [{lo}, {hi}] invalid")
    rng = np.random.default_rng(seed)
    width = hi - lo + 1
    out = np.empty((n_samples, n_dims), dtype=np.int64)
    for d in range(n_dims):
        strata = rng.permutation(n_samples)
        u = rng.random(n_samples)
        out[:, d] = lo + np.floor((strata + u) * width / n_samples).astype(np.int64)
    return out


def compute_error(out: np.ndarray, ref: np.ndarray) -> float:
    out = np.asarray(out, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if out.shape != ref.shape:
        raise ValueError(f"output shape {out.shape} != reference shape {ref.shape}")
    if not np.all(np.isfinite(out)):
        return float("inf")
    rel = (out - ref) ** 2 / np.maximum(ref**2, _REF_EPS)
    worst = float(np.max(rel))
    return worst if worst == worst else float("inf")


def log_error(error: float) -> float:
    return float(np.clip(-np.log10(max(error, ERROR_FLOOR)), -LOG_ERR_CAP, LOG_ERR_CAP))


def reference_output(benchmark: str, input_set: InputSet) -> np.ndarray:
    """Binary64 run used as the error baseline, whatever the width box."""
    n = get_benchmark(benchmark).n_var
    return run_kernel(benchmark, input_set, [MANTISSA_MAX] * n)


def make_sample(benchmark: str, input_set: InputSet, config, ref: np.ndarray) -> Sample:
    out = run_kernel(benchmark, input_set, config)
    err = compute_error(out, ref)
    return Sample(
        config=tuple(int(b) for b in config),
        error=err,
        log_err=log_error(err),
        class_label=int(err > CLASS_THRESHOLD),
    )


def build_dataset(
    benchmark: str,
    n_samples: int = 1000,
    nbit_lo: int = MANTISSA_MIN,
    nbit_hi: int = MANTISSA_MAX,
    shape: dict[str, int] | None = None,
    seed_input: int = 0,
    seed_sample: int = 0,
    input_set: InputSet | None = None,
) -> Dataset:
    desc = get_benchmark(benchmark)
    if input_set is None:
        input_set = gen_input_set(benchmark, shape, seed_input)
    ref = reference_output(benchmark, input_set)
    configs = lhs_configs(n_samples, desc.n_var, nbit_lo, nbit_hi, seed_sample)
    samples = [make_sample(benchmark, input_set, cfg, ref) for cfg in configs]
    return Dataset(
        benchmark=benchmark,
        nbit_lo=nbit_lo,
        nbit_hi=nbit_hi,
        seed_input=input_set.seed,
        seed_sample=seed_sample,
        shape=dict(input_set.shape),
        samples=samples,
    )


# --- serialization -----------------------------------------------------------
# samples.csv holds one row per sample; a .meta.json sidecar carries the
# benchmark identity, width box, seeds and input shape.


def _sidecar(path) -> str:
    return str(path) + ".meta.json"


def save_dataset(ds: Dataset, path) -> None:
    n = ds.n_var
    header = ",".join([f"w{i}" for i in range(n)] + ["error", "log_err", "class"])
    lines = [header]
    for s in ds.samples:
        cfg = ",".join(str(b) for b in s.config)
        lines.append(f"{cfg},{repr(s.error)},{repr(s.log_err)},{s.class_label}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = {
        "benchmark": ds.benchmark,
        "nbit_lo": ds.nbit_lo,
        "nbit_hi": ds.nbit_hi,
        "seed_input": ds.seed_input,
        "seed_sample": ds.seed_sample,
        "shape": ds.shape,
        "n_samples": len(ds.samples),
    }
    with open(_sidecar(path), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_dataset(path) -> Dataset:
    if not os.path.exists(_sidecar(path)):
        raise DatasetFormatError(f"{path}: missing sidecar {_sidecar(path)}")
    with open(_sidecar(path)) as fh:
        meta = json.load(fh)
    benchmark = meta["benchmark"]
    n = get_benchmark(benchmark).n_var
    samples: list[Sample] = []
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DatasetFormatError(f"{path}:1: empty dataset file")
    expected_cols = n + 3
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != expected_cols:
            raise DatasetFormatError(
                f"{path}:{lineno}: expected {expected_cols} columns, got {len(parts)}"
            )
        try:
            cfg = tuple(int(p) for p in parts[:n])
            error = float(parts[n])
            log_err = float(parts[n + 1])
            label = int(parts[n + 2])
        except ValueError as exc:
            raise DatasetFormatError(f"{path}:{lineno}: {exc}") from None
        samples.append(Sample(cfg, error, log_err, label))
    if len(samples) != meta["n_samples"]:
        raise DatasetFormatError(
            f"{path}: sidecar promises {meta['n_samples']} samples, file has {len(samples)}"
        )
    return Dataset(
        benchmark=benchmark,
        nbit_lo=meta["nbit_lo"],
        nbit_hi=meta["nbit_hi"],
        seed_input=meta["seed_input"],
        seed_sample=meta["seed_sample"],
        shape={k: int(v) for k, v in meta["shape"].items()},
        samples=samples,
    )
