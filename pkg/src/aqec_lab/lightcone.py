"""Light cones of layered circuits and the resulting depth lower bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .ensembles import CircuitSpec
from .errors import ContractViolation, ParameterError


@dataclass(frozen=True)
class Layout:
    n: int
    layers: tuple[tuple[tuple[int, ...], ...], ...]
    logical: tuple[int, ...]

    @classmethod
    def from_spec(cls, spec: CircuitSpec) -> "Layout":
        layers = tuple(tuple(tuple(g.support) for g in layer) for layer in spec.layers)
        return cls(spec.n_qubits, layers, tuple(spec.logical_slots)).validate()

    def validate(self) -> "Layout":
        for li, layer in enumerate(self.layers):
            seen: set[int] = set()
            for g in layer:
                for q in g:
                    if not 0 <= q < self.n or q in seen:
                        raise ContractViolation(f"bad or overlapping support in layer {li}")
                    seen.add(q)
        if any(not 0 <= q < self.n for q in self.logical):
            raise ContractViolation("logical qubit out of range")
        return self


def _layout(obj: Union[CircuitSpec, Layout]) -> Layout:
    return Layout.from_spec(obj) if isinstance(obj, CircuitSpec) else obj.validate()


def _gate_of(layer: Sequence[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    owner: list[tuple[int, ...]] = [(q,) for q in range(n)]
    for g in layer:
        for q in g:
            owner[q] = tuple(g)
    return owner


@dataclass(frozen=True)
class LightCones:
    forward: dict
    backward: tuple
    M: int


def forward_cone(layout: Layout, i: int, depth: int = -1) -> frozenset:
    """L_{i,j}: qubits reached from qubit i after the first ``depth`` layers (all by default)."""
    layers = layout.layers if depth < 0 else layout.layers[:depth]
    cone = {i}
    for layer in layers:
        owner = _gate_of(layer, layout.n)
        cone = {q for c in cone for q in owner[c]}
    return frozenset(cone)


def backward_cone(layout: Layout, i: int) -> frozenset:
    """B_{i,0}: input qubits that can influence output qubit i."""
    cone = {i}
    for layer in reversed(layout.layers):
        owner = _gate_of(layer, layout.n)
        cone = {q for c in cone for q in owner[c]}
    return frozenset(cone)


def light_cones(layout: Union[CircuitSpec, Layout]) -> LightCones:
    lay = _layout(layout)
    forward = {i: forward_cone(lay, i) for i in lay.logical}
    backward = tuple(backward_cone(lay, q) for q in range(lay.n))
    sizes = [len(c) for c in forward.values()] + [len(c) for c in backward]
    return LightCones(forward, backward, max(sizes) if sizes else 1)


def disjoint_logical_set(layout: Union[CircuitSpec, Layout]) -> list[int]:
    """Greedy set of logical qubits with pairwise disjoint forward cones (lowest index first)."""
    lay = _layout(layout)
    cones = light_cones(lay)
    chosen: list[int] = []
    used: set[int] = set()
    for i in sorted(lay.logical):
        cone = cones.forward[i]
        if used.isdisjoint(cone):
            chosen.append(i)
            used |= cone
    return chosen


def _lhs(mode: str, d: int, p: float, dim: int) -> float:
    if mode == "ddim":
        return (2 * d) ** dim * math.log(1 / p) + 2 * dim * math.log(2 * d)
    return 2.0 ** d * math.log(1 / p) + 2 * d


def depth_lower_bound(mode: str, p: float, eps: float, k: int, dim: int = 1) -> int:
    """Smallest depth d compatible with Choi error ``eps`` under depolarizing strength ``p``.

    ``mode`` is ``"ddim"`` (nearest-neighbour gates in ``dim`` dimensions) or
    ``"all-to-all"``.
    """
    if mode not in ("ddim", "all-to-all"):
        raise ParameterError("mode must be 'ddim' or 'all-to-all'")
    if not 0 < eps < 0.1:
        raise ParameterError("depth bound needs 0 < eps < 0.1")
    if not 0 < p < 1:
        raise ParameterError("p must lie in (0, 1)")
    if k < 1 or dim < 1:
        raise ParameterError("k and dim must be >= 1")
    rhs = math.log(3 / (8 * eps * eps)) + math.log(k)
    if _lhs(mode, 1, p, dim) >= rhs:
        return 1
    hi = 2
    while _lhs(mode, hi, p, dim) < rhs:
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _lhs(mode, mid, p, dim) >= rhs:
            hi = mid
        else:
            lo = mid
    return hi


def choi_floor(layout: Union[CircuitSpec, Layout], p: float) -> float:
    """Lower bound sqrt(3 |J| p^M / 8) on the Choi error, clipped to [0, 1]."""
    if not 0 <= p <= 1:
        raise ParameterError("p must lie in [0, 1]")
    lay = _layout(layout)
    cones = light_cones(lay)
    j = disjoint_logical_set(lay)
    return min(1.0, math.sqrt(3 * len(j) * p ** cones.M / 8))


__all__ = [
    "Layout",
    "LightCones",
    "forward_cone",
    "backward_cone",
    "light_cones",
    "disjoint_logical_set",
    "depth_lower_bound",
    "choi_floor",
]
