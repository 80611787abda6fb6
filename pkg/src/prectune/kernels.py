"""Benchmark kernels executed under per-slot reduced precision.

Each kernel declares a fixed set of precision slots.  A slot is either a
program variable (an input array, a coefficient, an output array) or a
temporary that stages the result of an expression.  Running a kernel under
a config rounds every arithmetic result and every stored value to the
format of the slot it lands in; inputs are rounded into their slots on
load.  All slots use 11 exponent bits, only the mantissa width is tuned.

Two kinds of dependency edges relate slots:

  * assignment src -> dst: the value produced at src is stored into dst
    (rounded again at dst).  Widening dst below src is pointless, so the
    induced constraint is  x_src <= x_dst.
  * cast (s1, s2, ...) -> dst: dst stages an expression over operands
    living in the source slots.  Bits beyond the narrowest operand carry
    no information, so the induced constraint is  x_dst = min(x_si).

Slot maps (slot count is fixed per kernel):

fwt (2): 0 data, 1 butterfly stage.  Both butterfly outputs (sum and
  difference) share the staging slot, then are stored back into data.
saxpy (3): 0 x, 1 y, 2 multiply-accumulate stage.  The scalar coefficient
  is folded into the staged expression and carried at slot 2.
convolution (4): 0 image, 1 stencil weights, 2 product stage,
  3 accumulator (the output).
dwt (7): 0 input, then per level the smooth and detail arrays
  (1 a1, 2 d1, 3 a2, 4 d2, 5 a3, 6 d3); each output array doubles as the
  slot of the expression chain that fills it.
correlation (7): 0 series data, 1 per-series mean, 2 centered values
  (a named temporary), 3 covariance accumulator, 4 variance accumulator,
  5 standard deviation, 6 correlation matrix (final expression slot).
bscholes (15): 0 spot, 1 strike, 2 rate, 3 volatility, 4 maturity,
  5 spot/strike ratio, 6 log of the ratio, 7 drift term, 8 vol*sqrt(t),
  9 d1, 10 d2, 11 cdf(d1), 12 cdf(d2), 13 discounted strike, 14 price.
jacobi (25): 0 grid A, 1 grid B, 2 diffusion coefficient, 3 source term,
  4 output copy, 5-14 the ten staged expressions of the A->B half step
  (four neighbor differences, two pair sums, their sum, the scaled
  laplacian, the updated cell, the cell plus source), 15-24 the same for
  the B->A half step.

Transcendentals (log, sqrt, exp, the normal cdf) are evaluated in binary64
and their result is rounded once at the consuming slot, like any other op.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .flexnum import MANTISSA_MAX, MANTISSA_MIN, FlexFormat, round_to_format

EXPONENT_BITS = 11

ASSIGNMENT = "assignment"
CAST = "cast"


class UnknownBenchmarkError(ValueError):
    pass


class InvalidShapeError(ValueError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DependencyEdge:
    kind: str
    sources: tuple[int, ...]
    destination: int

    def __post_init__(self) -> None:
        if self.kind not in (ASSIGNMENT, CAST):
            raise ValueError(f"bad edge kind {self.kind!r}")
        if self.kind == ASSIGNMENT and len(self.sources) != 1:
            raise ValueError("assignment edges take exactly one source")
        if self.kind == CAST and len(self.sources) < 2:
            raise ValueError("cast edges take at least two sources")


def _assign(src: int, dst: int) -> DependencyEdge:
    return DependencyEdge(ASSIGNMENT, (src,), dst)


def _cast(sources: tuple[int, ...], dst: int) -> DependencyEdge:
    return DependencyEdge(CAST, sources, dst)


@dataclass(frozen=True)
class BenchmarkDescriptor:
    name: str
    n_var: int
    slot_names: tuple[str, ...]
    edges: tuple[DependencyEdge, ...]
    default_shape: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        assert len(self.slot_names) == self.n_var
        for e in self.edges:
            for s in (*e.sources, e.destination):
                assert 0 <= s < self.n_var, f"{self.name}: slot {s} out of range"


@dataclass(frozen=True)
class InputSet:
    benchmark: str
    arrays: dict[str, np.ndarray]
    seed: int
    shape: dict[str, int]


_DESCRIPTORS: dict[str, BenchmarkDescriptor] = {}
_GENERATORS = {}
_RUNNERS = {}


def _register(desc: BenchmarkDescriptor, gen, run) -> None:
    _DESCRIPTORS[desc.name] = desc
    _GENERATORS[desc.name] = gen
    _RUNNERS[desc.name] = run


def list_benchmarks() -> list[str]:
    return sorted(_DESCRIPTORS)


def get_benchmark(name: str) -> BenchmarkDescriptor:
    try:
        return _DESCRIPTORS[name]
    except KeyError:
        raise UnknownBenchmarkError(
            f"unknown benchmark {name!r}, available: {list_benchmarks()}"
        ) from None


def dependency_graph(name: str) -> tuple[DependencyEdge, ...]:
    return get_benchmark(name).edges


def cast_destinations(name: str) -> frozenset[int]:
    """Slots whose width is an equality function of other slots."""
    return frozenset(e.destination for e in get_benchmark(name).edges if e.kind == CAST)


def gen_input_set(name: str, shape: dict[str, int] | None = None, seed: int = 0) -> InputSet:
    desc = get_benchmark(name)
    merged = dict(desc.default_shape)
    for k, v in (shape or {}).items():
        if k not in merged:
            raise InvalidShapeError(f"{name}: unknown shape key {k!r}")
        merged[k] = int(v)
    rng = np.random.default_rng(seed)
    arrays = _GENERATORS[name](merged, rng)
    return InputSet(benchmark=name, arrays=arrays, seed=seed, shape=merged)


def run_kernel(name: str, input_set: InputSet, config) -> np.ndarray:
    """Run a kernel under the given per-slot mantissa widths.

    Returns the flattened output vector.  The config must list one
    integer width per slot; widths live in the global mantissa range.
    """
    desc = get_benchmark(name)
    if input_set.benchmark != name:
        raise ConfigError(
            f"input set was generated for {input_set.benchmark!r}, not {name!r}"
        )
    cfg = [int(b) for b in config]
    if len(cfg) != desc.n_var:
        raise ConfigError(f"{name}: config has {len(cfg)} widths, expected {desc.n_var}")
    for b in cfg:
        if not MANTISSA_MIN <= b <= MANTISSA_MAX:
            raise ConfigError(f"{name}: mantissa width {b} outside [{MANTISSA_MIN}, {MANTISSA_MAX}]")
    fmts = [FlexFormat(b, EXPONENT_BITS) for b in cfg]

    def rnd(slot, value):
        return round_to_format(value, fmts[slot])

    return _RUNNERS[name](input_set, rnd)


# --- input serialization ---------------------------------------------------


def save_input_set(inp: InputSet, path) -> None:
    """One value per line; the header carries benchmark, seed and shapes."""
    shape_part = " ".join(f"{k}={v}" for k, v in sorted(inp.shape.items()))
    layout = ",".join(
        f"{name}:{'x'.join(str(d) for d in arr.shape) or '0'}"
        for name, arr in inp.arrays.items()
    )
    lines = [f"# benchmark={inp.benchmark} seed={inp.seed} {shape_part} arrays={layout}"]
    for arr in inp.arrays.values():
        lines.extend(repr(float(v)) for v in np.asarray(arr, dtype=np.float64).ravel())
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_input_set(path) -> InputSet:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing input set header")
    fields = dict(part.split("=", 1) for part in lines[0][2:].split(" ") if "=" in part)
    name = fields.pop("benchmark")
    seed = int(fields.pop("seed"))
    layout = fields.pop("arrays")
    shape = {k: int(v) for k, v in fields.items()}
    values = iter(lines[1:])
    arrays: dict[str, np.ndarray] = {}
    for part in layout.split(","):
        arr_name, dims = part.split(":")
        dims_t = tuple(int(d) for d in dims.split("x")) if dims != "0" else ()
        count = int(np.prod(dims_t)) if dims_t else 1
        flat = np.array([float(next(values)) for _ in range(count)])
        arrays[arr_name] = flat.reshape(dims_t) if dims_t else flat[0]
    return InputSet(benchmark=name, arrays=arrays, seed=seed, shape=shape)


# --- fwt: in-place fast Walsh-Hadamard transform ----------------------------


def _gen_fwt(shape, rng):
    n = shape["n"]
    if n < 2 or n & (n - 1):
        raise InvalidShapeError(f"fwt length must be a power of two >= 2, got {n}")
    return {"x": rng.uniform(0.1, 10.0, n)}


def _run_fwt(inp, rnd):
    data = rnd(0, inp.arrays["x"])
    n = data.shape[0]
    h = 1
    while h < n:
        view = data.reshape(-1, 2 * h)
        u = view[:, :h]
        v = view[:, h:]
        s = rnd(1, u + v)
        d = rnd(1, u - v)
        view[:, :h] = rnd(0, s)
        view[:, h:] = rnd(0, d)
        h *= 2
    return data.ravel()


_register(
    BenchmarkDescriptor(
        name="fwt",
        n_var=2,
        slot_names=("data", "stage"),
        edges=(_cast((0, 0), 1), _assign(1, 0)),
        default_shape={"n": 1024},
    ),
    _gen_fwt,
    _run_fwt,
)


# --- saxpy: y = a*x + y ------------------------------------------------------


def _gen_saxpy(shape, rng):
    n = shape["n"]
    if n < 1:
        raise InvalidShapeError(f"saxpy length must be >= 1, got {n}")
    return {
        "x": rng.uniform(0.1, 10.0, n),
        "y": rng.uniform(0.1, 10.0, n),
        "a": np.float64(rng.uniform(0.1, 10.0)),
    }


def _run_saxpy(inp, rnd):
    x = rnd(0, inp.arrays["x"])
    y = rnd(1, inp.arrays["y"])
    a = rnd(2, float(inp.arrays["a"]))  # coefficient rides at the stage slot
    t = rnd(2, a * x)
    t = rnd(2, t + y)
    return rnd(1, t)


_register(
    BenchmarkDescriptor(
        name="saxpy",
        n_var=3,
        slot_names=("x", "y", "stage"),
        edges=(_cast((0, 1), 2), _assign(2, 1)),
        default_shape={"n": 1024},
    ),
    _gen_saxpy,
    _run_saxpy,
)


# --- convolution: valid 2-d convolution with an 11x11 stencil ---------------

_CONV_K = 11


def _gen_convolution(shape, rng):
    rows, cols = shape["rows"], shape["cols"]
    if rows < _CONV_K or cols < _CONV_K:
        raise InvalidShapeError(
            f"convolution image must be at least {_CONV_K}x{_CONV_K}, got {rows}x{cols}"
        )
    return {
        "image": rng.uniform(0.1, 10.0, (rows, cols)),
        "weights": rng.uniform(0.1, 10.0, (_CONV_K, _CONV_K)),
    }


def _run_convolution(inp, rnd):
    img = rnd(0, inp.arrays["image"])
    ker = rnd(1, inp.arrays["weights"])
    kh, kw = ker.shape
    oh = img.shape[0] - kh + 1
    ow = img.shape[1] - kw + 1
    acc = np.zeros((oh, ow))
    for u in range(kh):
        for v in range(kw):
            t = rnd(2, img[u : u + oh, v : v + ow] * ker[u, v])
            acc = rnd(3, acc + t)
    return acc.ravel()


_register(
    BenchmarkDescriptor(
        name="convolution",
        n_var=4,
        slot_names=("image", "weights", "product", "acc"),
        edges=(_cast((0, 1), 2), _assign(2, 3)),
        default_shape={"rows": 64, "cols": 64},
    ),
    _gen_convolution,
    _run_convolution,
)


# --- dwt: three-level Haar wavelet decomposition ----------------------------

_DWT_LEVELS = 3
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _gen_dwt(shape, rng):
    n = shape["n"]
    if n < 2**_DWT_LEVELS or n % (2**_DWT_LEVELS):
        raise InvalidShapeError(
            f"dwt length must be a positive multiple of {2 ** _DWT_LEVELS}, got {n}"
        )
    return {"x": rng.uniform(0.1, 10.0, n)}


def _run_dwt(inp, rnd):
    x = rnd(0, inp.arrays["x"])

    def level(prev, slot_a, slot_d):
        even = prev[0::2]
        odd = prev[1::2]
        a = rnd(slot_a, rnd(slot_a, even + odd) * _INV_SQRT2)
        d = rnd(slot_d, rnd(slot_d, even - odd) * _INV_SQRT2)
        return a, d

    a1, d1 = level(x, 1, 2)
    a2, d2 = level(a1, 3, 4)
    a3, d3 = level(a2, 5, 6)
    return np.concatenate([a3, d3, d2, d1])


_register(
    BenchmarkDescriptor(
        name="dwt",
        n_var=7,
        slot_names=("x", "a1", "d1", "a2", "d2", "a3", "d3"),
        edges=(
            _assign(0, 1),
            _assign(0, 2),
            _assign(1, 3),
            _assign(1, 4),
            _assign(3, 5),
            _assign(3, 6),
        ),
        default_shape={"n": 1024},
    ),
    _gen_dwt,
    _run_dwt,
)


# --- correlation: pairwise correlation matrix of independent series ---------


def _gen_correlation(shape, rng):
    s, t = shape["series"], shape["points"]
    if s < 2 or t < 2:
        raise InvalidShapeError(f"correlation needs >=2 series of >=2 points, got {s}x{t}")
    return {"series": rng.uniform(0.1, 10.0, (s, t))}


def _run_correlation(inp, rnd):
    data = rnd(0, inp.arrays["series"])
    s, t = data.shape
    acc = np.zeros(s)
    for j in range(t):
        acc = rnd(1, acc + data[:, j])
    mean = rnd(1, acc / t)
    dev = rnd(2, data - mean[:, None])
    cov = np.zeros((s, s))
    for j in range(t):
        cov = rnd(3, cov + rnd(3, np.outer(dev[:, j], dev[:, j])))
    cov = rnd(3, cov / t)
    var = np.zeros(s)
    for j in range(t):
        var = rnd(4, var + rnd(4, dev[:, j] * dev[:, j]))
    var = rnd(4, var / t)
    std = rnd(5, np.sqrt(var))
    denom = rnd(6, np.outer(std, std))
    corr = rnd(6, cov / denom)
    return corr.ravel()


_register(
    BenchmarkDescriptor(
        name="correlation",
        n_var=7,
        slot_names=("data", "mean", "dev", "cov", "var", "std", "corr"),
        edges=(
            _assign(0, 1),
            _cast((0, 1), 2),
            _assign(2, 3),
            _assign(2, 4),
            _assign(4, 5),
            _cast((3, 5), 6),
        ),
        default_shape={"series": 16, "points": 256},
    ),
    _gen_correlation,
    _run_correlation,
)


# --- bscholes: European call option pricing ---------------------------------

_SQRT2 = math.sqrt(2.0)
_erf = np.vectorize(math.erf)


def _norm_cdf(x):
    return 0.5 * (1.0 + _erf(x / _SQRT2))


def _gen_bscholes(shape, rng):
    n = shape["n"]
    if n < 1:
        raise InvalidShapeError(f"bscholes needs at least one option, got {n}")
    return {
        "spot": rng.uniform(10.0, 100.0, n),
        "strike": rng.uniform(10.0, 100.0, n),
        "rate": rng.uniform(0.01, 0.05, n),
        "volatility": rng.uniform(0.1, 0.5, n),
        "maturity": rng.uniform(0.25, 2.0, n),
    }


def _run_bscholes(inp, rnd):
    s = rnd(0, inp.arrays["spot"])
    k = rnd(1, inp.arrays["strike"])
    r = rnd(2, inp.arrays["rate"])
    sig = rnd(3, inp.arrays["volatility"])
    t = rnd(4, inp.arrays["maturity"])

    ratio = rnd(5, s / k)
    lnr = rnd(6, np.log(ratio))
    sig2 = rnd(7, sig * sig)
    half = rnd(7, sig2 * 0.5)
    rp = rnd(7, r + half)
    drift = rnd(7, rp * t)
    st = rnd(8, np.sqrt(t))
    vst = rnd(8, sig * st)
    num = rnd(9, lnr + drift)
    d1 = rnd(9, num / vst)
    d2 = rnd(10, d1 - vst)
    nd1 = rnd(11, _norm_cdf(d1))
    nd2 = rnd(12, _norm_cdf(d2))
    rt = rnd(13, r * t)
    ert = rnd(13, np.exp(-rt))
    disc = rnd(13, k * ert)
    term1 = rnd(14, s * nd1)
    term2 = rnd(14, disc * nd2)
    return rnd(14, term1 - term2)


_register(
    BenchmarkDescriptor(
        name="bscholes",
        n_var=15,
        slot_names=(
            "spot",
            "strike",
            "rate",
            "volatility",
            "maturity",
            "ratio",
            "ln_ratio",
            "drift",
            "vol_sqrt_t",
            "d1",
            "d2",
            "cdf_d1",
            "cdf_d2",
            "discounted_strike",
            "price",
        ),
        edges=(
            _cast((0, 1), 5),
            _assign(5, 6),
            _cast((2, 3, 4), 7),
            _cast((3, 4), 8),
            _cast((6, 7, 8), 9),
            _cast((8, 9), 10),
            _assign(9, 11),
            _assign(10, 12),
            _cast((1, 2, 4), 13),
            _cast((0, 11, 12, 13), 14),
        ),
        default_shape={"n": 256},
    ),
    _gen_bscholes,
    _run_bscholes,
)


# --- jacobi: explicit heat diffusion on a square grid ------------------------

_JACOBI_ALPHA = 0.1


def _gen_jacobi(shape, rng):
    side, iters = shape["side"], shape["iters"]
    if side < 2:
        raise InvalidShapeError(f"jacobi grid side must be >= 2, got {side}")
    if iters < 1:
        raise InvalidShapeError(f"jacobi needs >= 1 iteration, got {iters}")
    return {
        "grid": rng.uniform(0.1, 10.0, (side, side)),
        "source": rng.uniform(0.1, 10.0, (side, side)),
    }


def _jacobi_half_step(u, dst, dst_slot, base, alpha, src, rnd):
    c = u[1:-1, 1:-1]
    dn = rnd(base + 0, u[:-2, 1:-1] - c)
    ds = rnd(base + 1, u[2:, 1:-1] - c)
    dw = rnd(base + 2, u[1:-1, :-2] - c)
    de = rnd(base + 3, u[1:-1, 2:] - c)
    sv = rnd(base + 4, dn + ds)
    sh = rnd(base + 5, dw + de)
    lap = rnd(base + 6, sv + sh)
    diff = rnd(base + 7, alpha * lap)
    new = rnd(base + 8, c + diff)
    tot = rnd(base + 9, new + src[1:-1, 1:-1])
    dst[1:-1, 1:-1] = rnd(dst_slot, tot)


def _run_jacobi(inp, rnd):
    a = rnd(0, inp.arrays["grid"])
    src = rnd(3, inp.arrays["source"])
    alpha = rnd(2, _JACOBI_ALPHA)
    b = rnd(1, a)
    for _ in range(inp.shape["iters"]):
        _jacobi_half_step(a, b, 1, 5, alpha, src, rnd)
        _jacobi_half_step(b, a, 0, 15, alpha, src, rnd)
    return rnd(4, a).ravel()


_register(
    BenchmarkDescriptor(
        name="jacobi",
        n_var=25,
        slot_names=(
            "grid_a",
            "grid_b",
            "alpha",
            "source",
            "out",
            *(f"ab_{t}" for t in ("dn", "ds", "dw", "de", "sv", "sh", "lap", "diff", "new", "tot")),
            *(f"ba_{t}" for t in ("dn", "ds", "dw", "de", "sv", "sh", "lap", "diff", "new", "tot")),
        ),
        edges=(
            _assign(0, 1),
            _cast((0, 0), 5),
            _cast((0, 0), 6),
            _cast((0, 0), 7),
            _cast((0, 0), 8),
            _cast((5, 6), 9),
            _cast((7, 8), 10),
            _cast((9, 10), 11),
            _cast((2, 11), 12),
            _cast((0, 12), 13),
            _cast((13, 3), 14),
            _assign(14, 1),
            _cast((1, 1), 15),
            _cast((1, 1), 16),
            _cast((1, 1), 17),
            _cast((1, 1), 18),
            _cast((15, 16), 19),
            _cast((17, 18), 20),
            _cast((19, 20), 21),
            _cast((2, 21), 22),
            _cast((1, 22), 23),
            _cast((23, 3), 24),
            _assign(24, 0),
            _assign(0, 4),
        ),
        default_shape={"side": 32, "iters": 50},
    ),
    _gen_jacobi,
    _run_jacobi,
)
