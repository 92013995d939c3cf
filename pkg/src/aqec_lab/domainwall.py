"""Second-moment engines for random two-copy circuit averages.

Each site carries a label in {I, F} (identity or swap on its two copies). A
configuration is stored as a bitmask with bit j set when site j carries F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .ensembles import CircuitSpec, distribute_slots
from .errors import ContractViolation, InvariantViolation, ParameterError

MARKOV_MAX_SITES = 12

Layers = Sequence[Sequence[Sequence[int]]]


def haar_second_moment(tr1_i: float, tr1_f: float, tr2_i: float, tr2_f: float, n: int, q: int) -> float:
    """tr(O2 Phi(O1)) for the two-copy Haar twirl on n qudits of dimension q."""
    if q < 2:
        raise ParameterError("q must be >= 2")
    dim = float(q) ** n
    return (tr1_i * tr2_i + tr1_f * tr2_f - (tr1_i * tr2_f + tr1_f * tr2_i) / dim) / (dim * dim - 1.0)


@dataclass(frozen=True)
class BoundaryTraces:
    """``table[mask] = tr(O (x)_j gamma_j)`` for every configuration of n sites."""

    n: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=float)
        if t.shape != (2 ** self.n,):
            raise ContractViolation("trace table must have 2**n entries")
        if not np.all(np.isfinite(t)):
            raise ContractViolation("trace table must be finite")
        object.__setattr__(self, "table", t)

    @classmethod
    def from_product(cls, pairs: Sequence[tuple[float, float]]) -> "BoundaryTraces":
        """Product operator from per-site ``(tr with I, tr with F)`` pairs."""
        n = len(pairs)
        t = np.ones([2] * n) if n else np.ones(())
        for j, (ti, tf) in enumerate(pairs):
            shape = [1] * n
            shape[j] = 2
            t = t * np.array([ti, tf], dtype=float).reshape(shape)
        # Axis j is site j; bit j of the mask is site j, so reverse to little-endian order.
        return cls(n, np.transpose(t, list(reversed(range(n)))).reshape(-1) if n else t.reshape(1))

    @property
    def identity_trace(self) -> float:
        return float(self.table[0])

    @property
    def swap_trace(self) -> float:
        return float(self.table[-1])


def swap_operator(q: int) -> np.ndarray:
    """SWAP of two copies of a q-dimensional site."""
    f = np.zeros((q * q, q * q))
    for a in range(q):
        for b in range(q):
            f[a * q + b, b * q + a] = 1.0
    return f


def random_product_traces(n: int, q: int, rng: np.random.Generator) -> BoundaryTraces:
    """Traces of a random product of unit-trace positive two-copy site operators."""
    f = swap_operator(q)
    pairs = []
    for _ in range(n):
        g = rng.normal(size=(q * q, q * q)) + 1j * rng.normal(size=(q * q, q * q))
        o = g @ g.conj().T
        o /= np.trace(o).real
        pairs.append((1.0, float(np.trace(f @ o).real)))
    return BoundaryTraces.from_product(pairs)


def _as_tensor(vec: np.ndarray, n: int) -> np.ndarray:
    """View a 2**n vector as a tensor whose axis j is site j."""
    return np.transpose(vec.reshape([2] * n), list(reversed(range(n)))) if n else vec


def _from_tensor(t: np.ndarray, n: int) -> np.ndarray:
    return np.transpose(t, list(reversed(range(n)))).reshape(-1) if n else t


def _layers_of(layout: Union[CircuitSpec, Layers]) -> list[list[tuple[int, ...]]]:
    if isinstance(layout, CircuitSpec):
        return [[tuple(g.support) for g in layer] for layer in layout.layers]
    return [[tuple(int(s) for s in g) for g in layer] for layer in layout]


def initial_weights(o1: BoundaryTraces, q: int) -> np.ndarray:
    """Coefficients after a layer of single-site twirls, indexed like the trace table."""
    n = o1.n
    m = np.array([[1.0, -1.0 / q], [-1.0 / q, 1.0]]) / (q * q - 1.0)
    t = _as_tensor(o1.table.copy(), n)
    for j in range(n):
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [j])), 0, j)
    return _from_tensor(t, n)


def apply_two_site_gate(w: np.ndarray, a: int, b: int, q: int) -> np.ndarray:
    """Twirl of a two-site gate: mixed labels move weight eta to both II and FF."""
    eta = q / (q * q + 1.0)
    n = int(round(math.log2(w.size)))
    t = _as_tensor(w, n).copy()
    idx_if = [slice(None)] * n
    idx_fi = [slice(None)] * n
    idx_ii = [slice(None)] * n
    idx_ff = [slice(None)] * n
    idx_if[a], idx_if[b] = 0, 1
    idx_fi[a], idx_fi[b] = 1, 0
    idx_ii[a], idx_ii[b] = 0, 0
    idx_ff[a], idx_ff[b] = 1, 1
    mixed = t[tuple(idx_if)] + t[tuple(idx_fi)]
    t[tuple(idx_ii)] += eta * mixed
    t[tuple(idx_ff)] += eta * mixed
    t[tuple(idx_if)] = 0.0
    t[tuple(idx_fi)] = 0.0
    return _from_tensor(t, n)


def markov_second_moment_exact(layout: Union[CircuitSpec, Layers], n: int, q: int,
                               o1: BoundaryTraces, o2: BoundaryTraces) -> float:
    """Exact tr(O2 Phi(O1)) for a layered circuit of Haar two-site gates.

    A layer of single-site Haar twirls always precedes the circuit.
    """
    if n > MARKOV_MAX_SITES:
        raise ParameterError(f"exact Markov engine limited to {MARKOV_MAX_SITES} sites")
    if o1.n != n or o2.n != n:
        raise ContractViolation("trace tables must match n")
    if q < 2:
        raise ParameterError("q must be >= 2")
    w = initial_weights(o1, q)
    for layer in _layers_of(layout):
        for g in layer:
            if len(g) == 1:
                continue
            if len(g) != 2 or not all(0 <= s < n for s in g) or g[0] == g[1]:
                raise ContractViolation(f"gate {g} is not a two-site gate on {n} sites")
            w = apply_two_site_gate(w, g[0], g[1], q)
    return float(np.dot(w, o2.table))


def brickwork_layers(n: int, depth: int, periodic: bool = True) -> list[list[tuple[int, int]]]:
    """Staggered nearest-neighbour pairs; odd layers wrap around when periodic."""
    layers = []
    for d in range(depth):
        if d % 2 == 0:
            layer = [(i, i + 1) for i in range(0, n - 1, 2)]
        else:
            layer = [(i, i + 1) for i in range(1, n - 1, 2)]
            if periodic and n % 2 == 0 and n > 2:
                layer.append((n - 1, 0))
        layers.append(layer)
    return layers


def biased_walk_absorption(m: int, n: int, q: int) -> tuple[float, float]:
    """Probabilities that a walk starting with m F-sites ends at all-I or all-F."""
    if not 0 <= m <= n or n < 1:
        raise ParameterError("need 0 <= m <= n and n >= 1")
    qq = float(q) ** -2
    denom = 1.0 - qq ** n
    to_f = (qq ** (n - m) - qq ** n) / denom
    to_i = (1.0 - qq ** (n - m)) / denom
    return to_i, to_f


@dataclass
class WalkResult:
    to_i: float
    to_f: float
    unabsorbed: int
    walks: int


def simulate_biased_walk(m: int, n: int, q: int, walks: int, rng: np.random.Generator,
                         max_layers: int = 100_000) -> WalkResult:
    """Simulate the reweighted domain-wall walk on a periodic brickwork.

    On a mixed pair the I site flips to F with probability 1/(q^2+1);
    otherwise the F site flips to I.
    """
    if not 0 <= m <= n or n < 2 or n % 2:
        raise ParameterError("need even n >= 2 and 0 <= m <= n")
    p_up = 1.0 / (q * q + 1.0)
    state = np.zeros((walks, n), dtype=bool)
    state[:, :m] = True
    layers = brickwork_layers(n, 2)
    active = np.ones(walks, dtype=bool)
    for step in range(max_layers):
        counts = state.sum(axis=1)
        active = (counts > 0) & (counts < n)
        if not active.any():
            break
        for a, b in layers[step % 2]:
            mixed = active & (state[:, a] != state[:, b])
            if not mixed.any():
                continue
            up = rng.random(walks) < p_up
            new = np.where(up, True, False)
            state[mixed, a] = new[mixed]
            state[mixed, b] = new[mixed]
    counts = state.sum(axis=1)
    absorbed_f = int(np.sum(counts == n))
    absorbed_i = int(np.sum(counts == 0))
    return WalkResult(absorbed_i / walks, absorbed_f / walks, walks - absorbed_i - absorbed_f, walks)


def first_layer_logical_counts(n: int, k: int, xi: int) -> list[int]:
    """Logical qubits per first-layer block under the double-layer slot placement."""
    counts = distribute_slots([xi] * (n // xi), k)
    return [counts[2 * i] + counts[2 * i + 1] for i in range(len(counts) // 2)]


def _pair_coefficients(xi: int, logical: int, exact: bool):
    one = Fraction(1) if exact else 1.0
    d = one * 2 ** (2 * xi)
    r = one * 2 ** logical
    a = (1 / r - 1 / d) / (d * d - 1)
    b = (1 - 1 / (r * d)) / (d * d - 1)
    return a, b


def block_erasure_transfer(n: int, k: int, xi: int, pattern: Sequence[int],
                           logical_counts: Optional[Sequence[int]] = None,
                           exact: bool = True) -> Union[Fraction, float]:
    """E_U tr[rho_RE^2] for the double-layer ensemble and a fixed erasure pattern.

    ``pattern[i]`` is the number of erased qubits in region i (2N regions of
    width xi). ``logical_counts`` gives the logical qubits per first-layer
    block and defaults to the builder's placement.
    """
    if xi < 1 or n % xi or (n // xi) % 2:
        raise ParameterError("need an even number 2N = n/xi of regions")
    regions = n // xi
    if len(pattern) != regions:
        raise ContractViolation(f"pattern must have {regions} entries")
    if any(not 0 <= c <= xi for c in pattern):
        raise ContractViolation("per-region erasure counts must lie in [0, xi]")
    big_n = regions // 2
    if logical_counts is None:
        logical_counts = first_layer_logical_counts(n, k, xi)
    if len(logical_counts) != big_n or sum(logical_counts) != k:
        raise ContractViolation("logical_counts must have N entries summing to k")
    one = Fraction(1) if exact else 1.0
    u = [one * 2 ** (xi - c) for c in pattern]
    v = [one * 2 ** c for c in pattern]
    eta = one * 2 ** xi / (2 ** (2 * xi) + 1)
    coeffs = [_pair_coefficients(xi, c, exact) for c in logical_counts]
    # Right-to-left: C_1 (u_1, v_1)^T, then alternate second-layer and first-layer blocks.
    a, b = coeffs[0]
    x, y = a * u[0], b * v[0]
    for i in range(1, big_n):
        lo, hi = 2 * i - 1, 2 * i
        uu = u[lo] * u[hi]
        vv = v[lo] * v[hi]
        off = eta * (uu + vv)
        x, y = uu * x + off * y, off * x + vv * y
        a, b = coeffs[i]
        x, y = a * x, b * y
    return one * 2 ** n * (u[-1] * x + v[-1] * y)


# Dense oracle: exact two-copy twirls on (R S)^(x)2 with integer matrices.

def _perm_for(a_qubits: Sequence[int], m: int) -> list[int]:
    rest = [q for q in range(m) if q not in set(a_qubits)]
    rows = list(a_qubits) + [m + q for q in a_qubits] + rest + [m + q for q in rest]
    return rows + [2 * m + r for r in rows]


class _ScaledMatrix:
    """Two-copy operator stored as ``data / scale`` (integers when exact)."""

    def __init__(self, data: np.ndarray, scale, m: int):
        self.data = data
        self.scale = scale
        self.m = m

    def twirl(self, a_qubits: Sequence[int], exact: bool) -> None:
        m = self.m
        na = len(a_qubits)
        d = 2 ** na
        rest = 2 ** (2 * (m - na))
        perm = _perm_for(a_qubits, m)
        t = np.transpose(self.data.reshape([2] * (4 * m)), perm).reshape(d, d, rest, d, d, rest)
        tr = np.einsum("abxaby->xy", t)
        trf = np.einsum("abxbay->xy", t)
        alpha = d * tr - trf
        beta = d * trf - tr
        eye = np.eye(d, dtype=t.dtype)
        new = (np.einsum("ac,bd,xy->abxcdy", eye, eye, alpha)
               + np.einsum("ad,bc,xy->abxcdy", eye, eye, beta))
        new = new.reshape([2] * (4 * m))
        self.data = np.transpose(new, np.argsort(perm)).reshape(self.data.shape)
        self.scale = self.scale * (d * (d * d - 1))
        if exact and np.max(np.abs(self.data)) > 2 ** 60:
            raise InvariantViolation("integer overflow risk in exact dense oracle")

    def swap_trace(self, swapped: Sequence[int]):
        """Numerator of tr[Y (x)_q (F_q or I_q)] with F on ``swapped`` qubits."""
        m = self.m
        letters = [chr(ord("a") + i) for i in range(2 * m)]
        rows = letters
        cols = list(letters)
        for q in swapped:
            cols[q], cols[m + q] = letters[m + q], letters[q]
        spec = "".join(rows) + "".join(cols) + "->"
        return np.einsum(spec, self.data.reshape([2] * (4 * m)))


def dense_transfer_oracle(spec: CircuitSpec, patterns: Sequence[Sequence[int]],
                          exact: bool = True) -> list[Union[Fraction, float]]:
    """E_U tr[rho_RE^2] by exact two-copy twirls, one value per erased set.

    Every gate is treated as a 2-design on its support (true for uniform
    Cliffords). Reference qubits are 0..k-1; physical qubit j is k + j.
    """
    k, n = spec.k, spec.n_qubits
    m = k + n
    if m > 6:
        raise ContractViolation("dense transfer oracle limited to 6 qubits per copy")
    psi = np.zeros([2] * m, dtype=np.int64)
    for bits in range(2 ** k):
        idx = [0] * m
        for j in range(k):
            b = (bits >> (k - 1 - j)) & 1
            idx[j] = b
            idx[k + spec.logical_slots[j]] = b
        psi[tuple(idx)] = 1
    vec = psi.reshape(-1)
    rho = np.outer(vec, vec)
    dt = np.int64 if exact else float
    two = np.kron(rho, rho).astype(dt)
    # kron orders indices as (row1, row2, col1, col2); regroup to (row1 row2)(col1 col2).
    dim = 2 ** m
    two = two.reshape(dim, dim, dim, dim).transpose(0, 2, 1, 3).reshape(dim * dim, dim * dim)
    mat = _ScaledMatrix(two, 4 ** k if exact else float(4 ** k), m)
    for layer in spec.layers:
        for g in layer:
            mat.twirl([k + q for q in g.support], exact)
    out = []
    for pat in patterns:
        swapped = list(range(k)) + [k + q for q in pat]
        num = mat.swap_trace(swapped)
        out.append(Fraction(int(num), int(mat.scale)) if exact else float(num) / mat.scale)
    return out


def coef_domination_check(a, b, m: int, n: int) -> bool:
    """Every z^t coefficient of (1+az)^m (1+bz)^n is at most that of (1+cz)^(m+n), c the mean."""
    a, b = Fraction(a), Fraction(b)
    if a <= 0 or b <= 0 or m < 0 or n < 0:
        raise ParameterError("need a, b > 0 and m, n >= 0")
    total = m + n
    if total == 0:
        return True
    mean_num = a * m + b * n
    for t in range(total + 1):
        lhs = sum(math.comb(m, i) * math.comb(n, t - i) * a ** i * b ** (t - i)
                  for i in range(max(0, t - n), min(m, t) + 1))
        if lhs * total ** t > math.comb(total, t) * mean_num ** t:
            return False
    return True


def hypergeom_bound_check(n: int, t: int, m: int) -> bool:
    """E[4^X] <= (1 + 3t/n)^m for X hypergeometric (m draws, t marked, n total)."""
    if not (0 <= t <= n and 0 <= m <= n and n >= 1):
        raise ParameterError("need 0 <= t, m <= n")
    lhs = sum(4 ** x * math.comb(t, x) * math.comb(n - t, m - x) for x in range(0, min(t, m) + 1))
    return lhs * n ** m <= math.comb(n, m) * (n + 3 * t) ** m


__all__ = [
    "MARKOV_MAX_SITES",
    "haar_second_moment",
    "BoundaryTraces",
    "swap_operator",
    "random_product_traces",
    "initial_weights",
    "apply_two_site_gate",
    "markov_second_moment_exact",
    "brickwork_layers",
    "biased_walk_absorption",
    "WalkResult",
    "simulate_biased_walk",
    "first_layer_logical_counts",
    "block_erasure_transfer",
    "dense_transfer_oracle",
    "coef_domination_check",
    "hypergeom_bound_check",
]
