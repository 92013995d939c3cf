"""Builders for the random encoding circuit families.

Qubits are 0-indexed. A :class:`CircuitSpec` fixes the layout; gates marked
:data:`FRESH` are replaced by an independent uniform Clifford each time the
spec is instantiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import ContractViolation, ParameterError
from .stabilizer import CliffordElement, sample_uniform_clifford

SCHEMA_VERSION = 1
RNG_ALGORITHM = "numpy.PCG64/SeedSequence"

FAMILIES = ("brickwork", "double-layer", "block", "clifford")


class FreshUniform:
    """Marker for a gate that is drawn uniformly at instantiation time."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "FRESH"


FRESH = FreshUniform()

Element = Union[CliffordElement, FreshUniform]


@dataclass(frozen=True)
class Gate:
    support: tuple[int, ...]
    element: Element = FRESH

    @property
    def fresh(self) -> bool:
        return self.element is FRESH


@dataclass(frozen=True)
class CircuitSpec:
    n_qubits: int
    layers: tuple[tuple[Gate, ...], ...]
    logical_slots: tuple[int, ...]
    boundary: str = "open"
    family: str = "custom"
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def k(self) -> int:
        return len(self.logical_slots)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def validate(self) -> "CircuitSpec":
        n = self.n_qubits
        if n < 1:
            raise ContractViolation("circuit needs at least one qubit")
        for li, layer in enumerate(self.layers):
            seen: set[int] = set()
            for g in layer:
                if not g.support:
                    raise ContractViolation(f"empty gate support in layer {li}")
                for q in g.support:
                    if not 0 <= q < n:
                        raise ContractViolation(f"qubit {q} out of range in layer {li}")
                    if q in seen:
                        raise ContractViolation(f"overlapping gate supports in layer {li}")
                    seen.add(q)
                if not g.fresh and g.element.m != len(g.support):
                    raise ContractViolation(f"gate size mismatch in layer {li}")
        if len(set(self.logical_slots)) != len(self.logical_slots):
            raise ContractViolation("logical slots must be distinct")
        if any(not 0 <= q < n for q in self.logical_slots):
            raise ContractViolation("logical slot out of range")
        return self

    def supports(self) -> list[list[list[int]]]:
        return [[list(g.support) for g in layer] for layer in self.layers]

    def instantiate(self, rng: np.random.Generator) -> Iterator[tuple[tuple[int, ...], CliffordElement]]:
        """Yield ``(support, element)`` in application order, drawing fresh gates from ``rng``."""
        for layer in self.layers:
            for g in layer:
                elem = sample_uniform_clifford(len(g.support), rng) if g.fresh else g.element
                yield g.support, elem

    def to_dict(self) -> dict:
        layers = []
        for layer in self.layers:
            out = []
            for g in layer:
                entry: dict[str, Any] = {"support": list(g.support)}
                entry["element"] = "fresh" if g.fresh else g.element.to_dict()
                out.append(entry)
            layers.append(out)
        return {
            "version": SCHEMA_VERSION,
            "n": self.n_qubits,
            "boundary": self.boundary,
            "family": self.family,
            "layers": layers,
            "logical_slots": list(self.logical_slots),
            "seed": self.seed,
            "rng": RNG_ALGORITHM,
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CircuitSpec":
        """Parse a serialized spec; a layer entry may also be a bare support list."""
        try:
            n = int(d["n"])
            raw_layers = d["layers"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractViolation(f"malformed circuit document: {exc}") from exc
        layers = []
        for layer in raw_layers:
            gates = []
            for entry in layer:
                if isinstance(entry, dict):
                    support = tuple(int(q) for q in entry["support"])
                    el = entry.get("element", "fresh")
                    element = FRESH if el == "fresh" else CliffordElement.from_dict(el)
                else:
                    support = tuple(int(q) for q in entry)
                    element = FRESH
                gates.append(Gate(support, element))
            layers.append(tuple(gates))
        spec = cls(
            n_qubits=n,
            layers=tuple(layers),
            logical_slots=tuple(int(q) for q in d.get("logical_slots", [])),
            boundary=d.get("boundary", "open"),
            family=d.get("family", "custom"),
            seed=d.get("seed"),
            meta=dict(d.get("meta", {})),
        )
        return spec.validate()


@dataclass(frozen=True)
class EnsembleParams:
    n: int
    k: int
    epsilon: float
    family: str = "double-layer"
    xi: Optional[int] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if not 0 <= self.k <= self.n:
            raise ParameterError("k must satisfy 0 <= k <= n")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ParameterError("epsilon must be positive and finite")
        if self.xi is not None and self.xi < 1:
            raise ParameterError("xi must be >= 1")


def _ceil_log2(x: float) -> int:
    v = math.log2(x)
    r = round(v)
    if abs(v - r) < 1e-9:
        return int(r)
    return math.ceil(v)


def xi_of(n: int, epsilon: float) -> int:
    """Region width ``ceil(log2(n / epsilon))`` (at least 1)."""
    if epsilon <= 0:
        raise ParameterError("epsilon must be positive")
    return max(1, _ceil_log2(n / epsilon))


def matched_xi(n: int, epsilon: float, multiple: int = 4) -> int:
    """Smallest ``xi >= xi_of(n, epsilon)`` with ``multiple * xi`` dividing ``n``."""
    xi = xi_of(n, epsilon)
    while multiple * xi <= n:
        if n % (multiple * xi) == 0:
            return xi
        xi += 1
    raise ParameterError(f"no xi >= {xi_of(n, epsilon)} with {multiple}*xi dividing n={n}")


def brickwork_eta(q_log2: float) -> float:
    """``eta = q / (q^2 + 1)`` for ``q = 2**q_log2``."""
    return 1.0 / (2.0 ** q_log2 + 2.0 ** (-q_log2))


def brickwork_depth(n: int, k: int, epsilon: float) -> int:
    """Prescribed brickwork depth, rounded up."""
    if k < 1 or n % k:
        raise ParameterError("brickwork needs n/k to be a positive integer")
    w = n // k
    # log2(1 / (2 eta)) = log2((q^2 + 1) / (2q)), written to stay finite for large q.
    lg = (w - 1) + math.log2(1.0 + 2.0 ** (-2 * w))
    value = math.log2(n / epsilon) + math.log2(n) / lg + math.log2(math.e - 1) / lg + 1
    return _ceil_int(value)


def _ceil_int(v: float) -> int:
    r = round(v)
    if abs(v - r) < 1e-9:
        return int(r)
    return math.ceil(v)


def distribute_slots(region_sizes: Sequence[int], k: int) -> list[int]:
    """Per-region logical counts by ceil-cumulative rounding (totals equal k)."""
    n = sum(region_sizes)
    counts = []
    prev = 0
    cum = 0
    for size in region_sizes:
        cum += size
        cur = -(-k * cum // n)
        counts.append(cur - prev)
        prev = cur
    return counts


def _slots_from_regions(regions: Sequence[Sequence[int]], k: int) -> tuple[int, ...]:
    counts = distribute_slots([len(r) for r in regions], k)
    slots: list[int] = []
    for reg, c in zip(regions, counts):
        slots.extend(reg[:c])
    return tuple(slots)


def build_brickwork(params: EnsembleParams, seed: Optional[int] = None, depth: Optional[int] = None) -> CircuitSpec:
    """Periodic brickwork of two-qudit gates over k qudits of n/k qubits each."""
    n, k = params.n, params.k
    if k < 1 or n % k:
        raise ParameterError("brickwork needs n/k to be a positive integer")
    if k < 2 or k % 2:
        raise ParameterError("periodic brickwork needs an even number of qudits (k >= 2)")
    if not 0 < params.epsilon <= n:
        raise ParameterError("brickwork needs 0 < epsilon <= n")
    w = n // k
    d = brickwork_depth(n, k, params.epsilon) if depth is None else int(depth)
    qudits = [tuple(range(i * w, (i + 1) * w)) for i in range(k)]
    layers = []
    for l in range(d):
        off = l % 2
        gates = []
        for i in range(off, k + off, 2):
            a, b = i % k, (i + 1) % k
            gates.append(Gate(qudits[a] + qudits[b]))
        layers.append(tuple(gates))
    spec = CircuitSpec(
        n_qubits=n,
        layers=tuple(layers),
        logical_slots=tuple(q[0] for q in qudits),
        boundary="periodic",
        family="brickwork",
        seed=seed,
        meta={"q_log2": w, "depth": d, "epsilon": params.epsilon},
    )
    return spec.validate()


def double_layer_regions(n: int, xi: int) -> list[list[int]]:
    """Split n qubits into an even number of width-xi regions; the last absorbs the remainder."""
    if xi >= n:
        raise ParameterError("blocks exceed register (xi >= n)")
    r = n // xi
    if r % 2:
        r -= 1
    if r < 2:
        raise ParameterError("blocks exceed register (fewer than two regions)")
    bounds = [i * xi for i in range(r)] + [n]
    return [list(range(bounds[i], bounds[i + 1])) for i in range(r)]


def build_double_layer(params: EnsembleParams, seed: Optional[int] = None) -> CircuitSpec:
    """Two staggered layers of 2xi-qubit Clifford blocks with open boundary."""
    n, k = params.n, params.k
    xi = params.xi if params.xi is not None else xi_of(n, params.epsilon)
    regions = double_layer_regions(n, xi)
    half = len(regions) // 2
    first = tuple(Gate(tuple(regions[2 * i] + regions[2 * i + 1])) for i in range(half))
    second = tuple(Gate(tuple(regions[2 * i + 1] + regions[2 * i + 2])) for i in range(half - 1))
    layers = (first, second) if second else (first,)
    spec = CircuitSpec(
        n_qubits=n,
        layers=layers,
        logical_slots=_slots_from_regions(regions, k),
        boundary="open",
        family="double-layer",
        seed=seed,
        meta={
            "xi": xi,
            "regions": len(regions),
            "remainder": n - xi * len(regions),
            "epsilon": params.epsilon,
        },
    )
    return spec.validate()


def build_block_encoding(params: EnsembleParams, block_regions: int = 4, seed: Optional[int] = None) -> CircuitSpec:
    """One layer of disjoint Clifford blocks of ``block_regions * xi`` consecutive qubits."""
    n, k = params.n, params.k
    xi = params.xi if params.xi is not None else xi_of(n, params.epsilon)
    size = block_regions * xi
    if n % size:
        raise ParameterError(f"block size {size} does not divide n={n}")
    blocks = [list(range(s, s + size)) for s in range(0, n, size)]
    spec = CircuitSpec(
        n_qubits=n,
        layers=(tuple(Gate(tuple(b)) for b in blocks),),
        logical_slots=_slots_from_regions(blocks, k),
        boundary="open",
        family="block",
        seed=seed,
        meta={"xi": xi, "block_size": size, "epsilon": params.epsilon},
    )
    return spec.validate()


def build_full_clifford(params: EnsembleParams, seed: Optional[int] = None) -> CircuitSpec:
    n = params.n
    spec = CircuitSpec(
        n_qubits=n,
        layers=((Gate(tuple(range(n))),),),
        logical_slots=tuple(range(params.k)),
        boundary="open",
        family="clifford",
        seed=seed,
        meta={"epsilon": params.epsilon},
    )
    return spec.validate()


def build(params: EnsembleParams, seed: Optional[int] = None) -> CircuitSpec:
    """Dispatch on ``params.family``."""
    if params.family == "brickwork":
        return build_brickwork(params, seed)
    if params.family == "double-layer":
        return build_double_layer(params, seed)
    if params.family == "block":
        return build_block_encoding(params, seed=seed)
    return build_full_clifford(params, seed)


def constructed_depth(spec: CircuitSpec) -> int:
    """Depth in two-qubit-gate layers used for light-cone comparisons.

    Brickwork layers count once each. A block gate on w qubits counts as
    w / 2 layers, the light-cone width it could reach with nearest-neighbour
    gates, so the double-layer family has depth ``2 xi``.
    """
    total = 0
    for layer in spec.layers:
        widest = max(len(g.support) for g in layer)
        if spec.family == "brickwork":
            total += 1
        else:
            total += max(1, widest // 2)
    return total


def _is_pauli_layer(layer: Sequence[Gate], slots: Sequence[int]) -> bool:
    if sorted(g.support[0] for g in layer if len(g.support) == 1) != sorted(slots):
        return False
    for g in layer:
        if g.fresh or len(g.support) != 1:
            return False
        if not np.array_equal(g.element.matrix, np.eye(2, dtype=np.uint8)):
            return False
    return True


def pauli_twirl_wrap(spec: CircuitSpec, rng: np.random.Generator) -> CircuitSpec:
    """Prepend a uniformly random Pauli on every logical slot.

    If the circuit already starts with such a layer the two are merged, so
    repeated wrapping keeps a single Pauli layer.
    """
    labels = rng.integers(0, 4, size=len(spec.logical_slots))
    new = {q: CliffordElement.pauli("IXYZ"[int(c)]) for q, c in zip(spec.logical_slots, labels)}
    layers = list(spec.layers)
    if layers and spec.logical_slots and _is_pauli_layer(layers[0], spec.logical_slots):
        old = {g.support[0]: g.element for g in layers[0]}
        layers[0] = tuple(Gate((q,), old[q].then(new[q])) for q in spec.logical_slots)
    elif spec.logical_slots:
        layers.insert(0, tuple(Gate((q,), new[q]) for q in spec.logical_slots))
    meta = dict(spec.meta)
    meta["pauli_twirl"] = True
    return CircuitSpec(spec.n_qubits, tuple(layers), spec.logical_slots, spec.boundary,
                       spec.family, spec.seed, meta).validate()


__all__ = [
    "FRESH",
    "FreshUniform",
    "Gate",
    "CircuitSpec",
    "EnsembleParams",
    "FAMILIES",
    "xi_of",
    "matched_xi",
    "brickwork_eta",
    "brickwork_depth",
    "distribute_slots",
    "double_layer_regions",
    "build_brickwork",
    "build_double_layer",
    "build_block_encoding",
    "build_full_clifford",
    "build",
    "constructed_depth",
    "pauli_twirl_wrap",
]
