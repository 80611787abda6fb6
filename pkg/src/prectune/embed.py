"""Bounding model output over boxes of width configs.

The search works on axis-aligned integer boxes.  For the regressor,
interval bound propagation pushes the box through the network layer by
layer (splitting each weight matrix into its positive and negative parts);
the result is a sound overapproximation of the attainable outputs, and for
a single-point box it degenerates to the exact forward pass.  For the
classifier the box is walked down the tree, clipping coordinates at each
split; the set of reachable leaves is exact, so the returned status is
exact too.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .learn import DTModel, MLPModel


@dataclass(frozen=True)
class DomainBox:
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise ValueError("box bound lengths differ")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise ValueError(f"empty box: lo {self.lo} hi {self.hi}")

    @staticmethod
    def singleton(config) -> "DomainBox":
        t = tuple(int(v) for v in config)
        return DomainBox(t, t)

    @property
    def n_dims(self) -> int:
        return len(self.lo)

    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def contains(self, config) -> bool:
        return all(a <= int(v) <= b for a, v, b in zip(self.lo, config, self.hi))

    def volume(self) -> int:
        v = 1
        for a, b in zip(self.lo, self.hi):
            v *= b - a + 1
        return v

    def with_dim(self, d: int, lo: int, hi: int) -> "DomainBox":
        new_lo = list(self.lo)
        new_hi = list(self.hi)
        new_lo[d] = lo
        new_hi[d] = hi
        return DomainBox(tuple(new_lo), tuple(new_hi))


@dataclass(frozen=True)
class OutputInterval:
    lo: float
    hi: float


class BoxStatus(enum.Enum):
    ALL_ZERO = "all_zero"
    ALL_ONE = "all_one"
    MIXED = "mixed"


def nn_output_bounds(model: MLPModel, box: DomainBox) -> OutputInterval:
    if box.is_singleton():
        v = float(model.forward(np.array(box.lo, dtype=np.float64))[0])
        return OutputInterval(v, v)
    lo = model.normalize(np.array(box.lo, dtype=np.float64))
    hi = model.normalize(np.array(box.hi, dtype=np.float64))
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        w_pos = np.maximum(w, 0.0)
        w_neg = np.minimum(w, 0.0)
        z_lo = lo @ w_pos + hi @ w_neg + b
        z_hi = hi @ w_pos + lo @ w_neg + b
        if l == last:
            lo, hi = z_lo, z_hi
        else:
            lo = np.maximum(z_lo, 0.0)
            hi = np.maximum(z_hi, 0.0)
    return OutputInterval(float(lo[0]), float(hi[0]))


def dt_box_status(model: DTModel, box: DomainBox) -> BoxStatus:
    labels: set[int] = set()

    def walk(node: dict, lo: list[int], hi: list[int]) -> None:
        if len(labels) == 2:
            return
        if "leaf" in node:
            labels.add(int(node["leaf"]))
            return
        f = node["feature"]
        t = node["threshold"]
        if lo[f] <= t:
            clipped = hi[f]
            hi[f] = min(hi[f], t)
            walk(node["left"], lo, hi)
            hi[f] = clipped
        if hi[f] > t:
            clipped = lo[f]
            lo[f] = max(lo[f], t + 1)
            walk(node["right"], lo, hi)
            lo[f] = clipped

    walk(model.root, list(box.lo), list(box.hi))
    if labels == {0}:
        return BoxStatus.ALL_ZERO
    if labels == {1}:
        return BoxStatus.ALL_ONE
    return BoxStatus.MIXED
