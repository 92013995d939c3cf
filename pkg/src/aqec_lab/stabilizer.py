"""Aaronson-Gottesman tableau simulation of pure stabilizer states.

Conventions
-----------
A Hermitian Pauli with bit vectors ``(x, z)`` and sign bit ``r`` is
``(-1)^r * i^(x.z) * X^x Z^z`` where ``X^x Z^z`` places all X factors to the
left of all Z factors. A :class:`StabilizerState` on ``n`` qubits stores
``2n`` such rows: rows ``0..n-1`` are destabilizers, rows ``n..2n-1`` are
stabilizers.

A :class:`CliffordElement` on ``m`` qubits stores the images of the
generators as rows of a ``2m x 2m`` symplectic matrix. Row ``j < m`` is the
image of ``X_j``; row ``m + j`` is the image of ``Z_j``. Each row is laid out
as ``(x bits | z bits)`` and ``phase_bits[j]`` is the sign bit of that image.
Global phases are dropped throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import gf2
from .errors import ContractViolation, InvariantViolation
from .gf2 import BitMatrix

_PAULI_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_CHAR_BITS = {v: k for k, v in _PAULI_CHARS.items()}


@dataclass(frozen=True)
class PauliString:
    """Pauli operator ``i^phase * (-1)^0 * i^(x.z) X^x Z^z``.

    ``phase`` is an exponent of ``i`` taken mod 4, so Hermitian operators
    have phase 0 (``+``) or 2 (``-``).
    """

    x: tuple[int, ...]
    z: tuple[int, ...]
    phase: int = 0

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise ContractViolation("x and z must have equal length")
        object.__setattr__(self, "phase", self.phase % 4)

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def sign(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase]

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        phase = 0
        body = label
        for prefix, ph in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2)):
            if label.startswith(prefix):
                phase, body = ph, label[len(prefix):]
                break
        try:
            bits = [_CHAR_BITS[ch] for ch in body.upper()]
        except KeyError as exc:
            raise ContractViolation(f"bad Pauli label {label!r}") from exc
        return cls(tuple(b[0] for b in bits), tuple(b[1] for b in bits), phase)

    def label(self) -> str:
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return prefix + "".join(_PAULI_CHARS[(a, b)] for a, b in zip(self.x, self.z))

    def commutes_with(self, other: "PauliString") -> bool:
        s = sum(a * d + b * c for a, b, c, d in zip(self.x, self.z, other.x, other.z))
        return s % 2 == 0


class CliffordElement:
    """Clifford unitary modulo global phase, as a signed symplectic matrix."""

    __slots__ = ("m", "symplectic", "phase_bits", "_dense")

    def __init__(self, m: int, symplectic: BitMatrix | np.ndarray, phase_bits: Sequence[int], check: bool = True):
        if m < 1:
            raise ContractViolation("Clifford elements need m >= 1")
        mat = symplectic.to_dense() if isinstance(symplectic, BitMatrix) else np.asarray(symplectic)
        mat = (mat.astype(np.uint8) & 1)
        if mat.shape != (2 * m, 2 * m):
            raise ContractViolation(f"symplectic matrix must be {2*m}x{2*m}")
        ph = np.asarray(phase_bits, dtype=np.uint8) & 1
        if ph.shape != (2 * m,):
            raise ContractViolation("phase_bits must have length 2m")
        self.m = m
        self._dense = mat
        self._dense.setflags(write=False)
        ph.setflags(write=False)
        self.phase_bits = ph
        self.symplectic = BitMatrix.from_dense(mat)
        if check and not is_symplectic(mat):
            raise ContractViolation("matrix does not preserve the symplectic form")

    @property
    def matrix(self) -> np.ndarray:
        """Dense ``uint8`` view of the symplectic matrix (read-only)."""
        return self._dense

    @classmethod
    def identity(cls, m: int) -> "CliffordElement":
        return cls(m, np.eye(2 * m, dtype=np.uint8), np.zeros(2 * m, dtype=np.uint8), check=False)

    @classmethod
    def from_gate(cls, name: str) -> "CliffordElement":
        """Element equal to a named gate (qubit order follows the gate's support)."""
        name = name.upper()
        if name not in _GATE_ELEMENTS:
            raise ContractViolation(f"unknown gate {name!r}")
        m, rows, phases = _GATE_ELEMENTS[name]
        return cls(m, np.array(rows, dtype=np.uint8), phases)

    @classmethod
    def pauli(cls, label: str) -> "CliffordElement":
        """Conjugation by a Pauli operator, e.g. ``"XZ"``."""
        p = PauliString.from_label(label)
        m = p.n
        # P X_j P = -X_j iff P anticommutes with X_j iff z_j = 1.
        phases = np.concatenate([np.array(p.z), np.array(p.x)]).astype(np.uint8)
        return cls(m, np.eye(2 * m, dtype=np.uint8), phases, check=False)

    def images(self) -> list[PauliString]:
        out = []
        for j in range(2 * self.m):
            row = self._dense[j]
            out.append(PauliString(tuple(int(b) for b in row[: self.m]),
                                   tuple(int(b) for b in row[self.m:]),
                                   2 * int(self.phase_bits[j])))
        return out

    def then(self, other: "CliffordElement") -> "CliffordElement":
        """Composite that applies ``self`` first and ``other`` second."""
        if other.m != self.m:
            raise ContractViolation("composition needs equal sizes")
        x = self._dense[:, : self.m].copy()
        z = self._dense[:, self.m:].copy()
        r = self.phase_bits.copy()
        _conjugate_rows(x, z, r, other, np.arange(self.m))
        return CliffordElement(self.m, np.hstack([x, z]), r, check=False)

    def key(self) -> bytes:
        """Hashable identity of the element (used for class counting)."""
        return self._dense.tobytes() + self.phase_bits.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.m == other.m and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"CliffordElement(m={self.m})"

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "symplectic": self._dense.tolist(),
            "phase_bits": self.phase_bits.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CliffordElement":
        return cls(int(d["m"]), np.array(d["symplectic"], dtype=np.uint8), d["phase_bits"])


_GATE_ELEMENTS = {
    # name: (m, rows [(x|z) images of X_0..X_{m-1}, Z_0..Z_{m-1}], phase bits)
    "I": (1, [[1, 0], [0, 1]], [0, 0]),
    "H": (1, [[0, 1], [1, 0]], [0, 0]),
    "S": (1, [[1, 1], [0, 1]], [0, 0]),
    "X": (1, [[1, 0], [0, 1]], [0, 1]),
    "Y": (1, [[1, 0], [0, 1]], [1, 1]),
    "Z": (1, [[1, 0], [0, 1]], [1, 0]),
    "CNOT": (2, [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 1, 1]], [0, 0, 0, 0]),
    "CZ": (2, [[1, 0, 0, 1], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]], [0, 0, 0, 0]),
    "SWAP": (2, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], [0, 0, 0, 0]),
}


def symplectic_form(m: int) -> np.ndarray:
    lam = np.zeros((2 * m, 2 * m), dtype=np.uint8)
    lam[:m, m:] = np.eye(m, dtype=np.uint8)
    lam[m:, :m] = np.eye(m, dtype=np.uint8)
    return lam


def is_symplectic(mat: np.ndarray) -> bool:
    m = mat.shape[0] // 2
    a = mat.astype(np.int64)
    return bool(np.array_equal((a @ symplectic_form(m) @ a.T) & 1, symplectic_form(m)))


def _symp_inner(rows: np.ndarray, v: np.ndarray, m: int) -> np.ndarray:
    """Symplectic products of each row of ``rows`` with ``v``."""
    return ((rows[:, :m].astype(np.int64) @ v[m:] + rows[:, m:].astype(np.int64) @ v[:m]) & 1).astype(np.uint8)


def _random_nonzero_bits(d: int, rng: np.random.Generator) -> np.ndarray:
    if d <= 62:
        value = int(rng.integers(1, 1 << d))
        return np.array([(value >> i) & 1 for i in range(d)], dtype=np.uint8)
    while True:  # all-zero draw has probability below 2**-62
        bits = rng.integers(0, 2, size=d, dtype=np.uint8)
        if bits.any():
            return bits


def sample_uniform_clifford(m: int, rng: np.random.Generator) -> CliffordElement:
    """Uniform draw from the m-qubit Clifford group modulo global phase.

    Builds a random symplectic basis pair by pair: ``v`` is a uniform nonzero
    vector of the current subspace ``W`` and ``w`` a uniform vector of ``W``
    with ``<v, w> = 1``; ``W`` then shrinks to the symplectic complement of
    ``{v, w}``. Uniform sign bits supply the Pauli part.
    """
    if m < 1:
        raise ContractViolation("m must be >= 1")
    dim = 2 * m
    basis = np.eye(dim, dtype=np.uint8)
    out = np.zeros((dim, dim), dtype=np.uint8)
    for i in range(m):
        d = basis.shape[0]
        c = _random_nonzero_bits(d, rng)
        v = (c.astype(np.int64) @ basis & 1).astype(np.uint8)
        e = rng.integers(0, 2, size=d, dtype=np.uint8)
        w = (e.astype(np.int64) @ basis & 1).astype(np.uint8)
        ip_basis = _symp_inner(basis, v, m)
        if int(_symp_inner(w[None, :], v, m)[0]) == 0:
            l = int(np.flatnonzero(ip_basis)[0])
            e[l] ^= 1
            w ^= basis[l]
        out[i] = v
        out[m + i] = w
        if i == m - 1:
            break
        j = int(np.flatnonzero(c)[0])
        f = (e + e[j] * c) & 1
        f[j] = 0
        j2 = int(np.flatnonzero(f)[0])
        keep = np.ones(d, dtype=bool)
        keep[[j, j2]] = False
        b = basis[keep]
        bw = _symp_inner(b, w, m)
        bv = _symp_inner(b, v, m)
        basis = b ^ np.outer(bw, v).astype(np.uint8) ^ np.outer(bv, w).astype(np.uint8)
    phases = rng.integers(0, 2, size=dim, dtype=np.uint8)
    return CliffordElement(m, out, phases, check=False)


def _conjugate_rows(x: np.ndarray, z: np.ndarray, r: np.ndarray, c: CliffordElement, support: np.ndarray) -> None:
    """Conjugate every Pauli row ``(x, z, r)`` in place by ``c`` acting on ``support``."""
    m = c.m
    sub = np.concatenate([x[:, support], z[:, support]], axis=1).astype(np.int64)
    if not sub.any():
        return
    g = c.matrix.astype(np.int64)
    gx, gz = g[:, :m], g[:, m:]
    new = (sub @ g) & 1
    nx, nz = new[:, :m], new[:, m:]
    # Phase exponent (mod 4) of i^(x.z) * prod_j G_j^{a_j} written as i^e X^nx Z^nz.
    e = np.sum(sub[:, :m] * sub[:, m:], axis=1)
    e += sub @ (2 * c.phase_bits.astype(np.int64) + np.sum(gx * gz, axis=1))
    upper = np.triu((gz @ gx.T) & 1, k=1)
    e += 2 * (np.sum((sub @ upper) * sub, axis=1) & 1)
    e -= np.sum(nx * nz, axis=1)
    e &= 3
    if np.any(e & 1):
        raise InvariantViolation("non-Hermitian image while conjugating a Pauli row")
    r ^= (e >> 1).astype(np.uint8)
    x[:, support] = nx.astype(np.uint8)
    z[:, support] = nz.astype(np.uint8)


class StabilizerState:
    """Pure stabilizer state; single-owner and updated in place."""

    __slots__ = ("n", "x", "z", "r")

    def __init__(self, n: int, x: Optional[np.ndarray] = None, z: Optional[np.ndarray] = None,
                 r: Optional[np.ndarray] = None):
        if n < 0:
            raise ContractViolation("n must be >= 0")
        self.n = n
        if x is None:
            x = np.zeros((2 * n, n), dtype=np.uint8)
            z = np.zeros((2 * n, n), dtype=np.uint8)
            x[np.arange(n), np.arange(n)] = 1
            z[n + np.arange(n), np.arange(n)] = 1
            r = np.zeros(2 * n, dtype=np.uint8)
        self.x = np.asarray(x, dtype=np.uint8)
        self.z = np.asarray(z, dtype=np.uint8)
        self.r = np.asarray(r, dtype=np.uint8)
        if self.x.shape != (2 * n, n) or self.z.shape != (2 * n, n) or self.r.shape != (2 * n,):
            raise ContractViolation("tableau arrays have wrong shapes")

    @classmethod
    def zero(cls, n: int) -> "StabilizerState":
        """The state |0...0>."""
        return cls(n)

    @classmethod
    def from_stabilizers(cls, labels: Sequence[str]) -> "StabilizerState":
        """State stabilized by n independent commuting Hermitian Paulis such as ``"-XZZXI"``.

        Destabilizers are completed by solving the symplectic pairing conditions.
        """
        paulis = [PauliString.from_label(s) for s in labels]
        n = len(paulis)
        if any(p.n != n for p in paulis):
            raise ContractViolation("need n generators on n qubits")
        if any(p.phase % 2 for p in paulis):
            raise ContractViolation("generators must be Hermitian")
        s = np.array([list(p.x) + list(p.z) for p in paulis], dtype=np.uint8)
        if gf2.rank(BitMatrix.from_dense(s)) != n:
            raise ContractViolation("generators are not independent")
        omega = symplectic_form(n)
        if np.any((s.astype(np.int64) @ omega @ s.T.astype(np.int64)) & 1):
            raise ContractViolation("generators do not commute")
        # d_i must satisfy <s_j, d_i> = delta_ij.
        lhs = BitMatrix.from_dense((s.astype(np.int64) @ omega) & 1)
        d = np.zeros((n, 2 * n), dtype=np.uint8)
        for i in range(n):
            sol = gf2.solve(lhs, np.eye(n, dtype=np.uint8)[i])
            if sol is None:
                raise InvariantViolation("no destabilizer solution")
            d[i] = sol
        for k in range(n):
            for i in range(k):
                if int(d[i].astype(np.int64) @ omega @ d[k].astype(np.int64)) & 1:
                    d[k] ^= s[i]
        x = np.concatenate([d[:, :n], s[:, :n]])
        z = np.concatenate([d[:, n:], s[:, n:]])
        r = np.concatenate([np.zeros(n, dtype=np.uint8), np.array([p.phase // 2 for p in paulis], dtype=np.uint8)])
        state = cls(n, x, z, r)
        state.validate()
        return state

    def copy(self) -> "StabilizerState":
        return StabilizerState(self.n, self.x.copy(), self.z.copy(), self.r.copy())

    def stabilizers(self) -> list[PauliString]:
        return [self._row(i) for i in range(self.n, 2 * self.n)]

    def destabilizers(self) -> list[PauliString]:
        return [self._row(i) for i in range(self.n)]

    def _row(self, i: int) -> PauliString:
        return PauliString(tuple(int(b) for b in self.x[i]), tuple(int(b) for b in self.z[i]), 2 * int(self.r[i]))

    def _check_support(self, support: Sequence[int]) -> np.ndarray:
        sup = np.asarray(list(support), dtype=np.int64)
        if sup.size and (sup.min() < 0 or sup.max() >= self.n):
            raise ContractViolation(f"support {list(support)} out of range for n={self.n}")
        if len(set(sup.tolist())) != sup.size:
            raise ContractViolation("support indices must be distinct")
        return sup

    def validate(self) -> None:
        """Raise :class:`InvariantViolation` unless all tableau invariants hold."""
        n = self.n
        a = np.concatenate([self.x, self.z], axis=1).astype(np.int64)
        gram = (a @ symplectic_form(n) @ a.T) & 1
        if not np.array_equal(gram, symplectic_form(n)):
            raise InvariantViolation("tableau commutation relations are broken")

    def __repr__(self) -> str:
        return f"StabilizerState(n={self.n})"


def apply_gate(state: StabilizerState, gate: str, support: Sequence[int]) -> StabilizerState:
    """Apply a named gate in place (and return the state for chaining)."""
    name = gate.upper()
    arity = {"H": 1, "S": 1, "X": 1, "Y": 1, "Z": 1, "CNOT": 2, "CX": 2, "CZ": 2, "SWAP": 2}
    if name not in arity:
        raise ContractViolation(f"unknown gate {gate!r}")
    sup = state._check_support(support)
    if sup.size != arity[name]:
        raise ContractViolation(f"{name} acts on {arity[name]} qubit(s)")
    x, z, r = state.x, state.z, state.r
    if name == "H":
        a = int(sup[0])
        r ^= x[:, a] & z[:, a]
        x[:, a], z[:, a] = z[:, a].copy(), x[:, a].copy()
    elif name == "S":
        a = int(sup[0])
        r ^= x[:, a] & z[:, a]
        z[:, a] ^= x[:, a]
    elif name == "X":
        r ^= z[:, int(sup[0])]
    elif name == "Z":
        r ^= x[:, int(sup[0])]
    elif name == "Y":
        a = int(sup[0])
        r ^= x[:, a] ^ z[:, a]
    elif name in ("CNOT", "CX"):
        a, b = int(sup[0]), int(sup[1])
        r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
        x[:, b] ^= x[:, a]
        z[:, a] ^= z[:, b]
    elif name == "CZ":
        a, b = int(sup[0]), int(sup[1])
        apply_gate(state, "H", [b])
        apply_gate(state, "CNOT", [a, b])
        apply_gate(state, "H", [b])
    elif name == "SWAP":
        a, b = int(sup[0]), int(sup[1])
        x[:, [a, b]] = x[:, [b, a]]
        z[:, [a, b]] = z[:, [b, a]]
    return state


def apply_clifford(state: StabilizerState, c: CliffordElement, support: Sequence[int]) -> StabilizerState:
    """Conjugate the state by ``c`` placed on ``support`` (in place)."""
    sup = state._check_support(support)
    if sup.size != c.m:
        raise ContractViolation(f"support size {sup.size} != element size {c.m}")
    _conjugate_rows(state.x, state.z, state.r, c, sup)
    return state


def _restricted(state: StabilizerState, subset: np.ndarray) -> BitMatrix:
    rows = slice(state.n, 2 * state.n)
    return BitMatrix.from_dense(np.concatenate([state.x[rows][:, subset], state.z[rows][:, subset]], axis=1))


def subsystem_entropy(state: StabilizerState, subset: Iterable[int]) -> int:
    """Von Neumann entropy (bits) of the reduced state on ``subset``."""
    a = np.array(sorted(set(int(i) for i in subset)), dtype=np.int64)
    if a.size == 0:
        return 0
    state._check_support(a)
    return gf2.rank(_restricted(state, a)) - int(a.size)


def mutual_information(state: StabilizerState, erased: Iterable[int], reference: Iterable[int]) -> int:
    """I(R:T) in bits between reference and erased qubits."""
    t = sorted(set(int(i) for i in erased))
    ref = sorted(set(int(i) for i in reference))
    if set(t) & set(ref):
        raise ContractViolation("erased qubits must lie outside the reference")
    if not t:
        return 0
    info = subsystem_entropy(state, ref) + subsystem_entropy(state, t) - subsystem_entropy(state, ref + t)
    if info < 0:
        raise InvariantViolation(f"negative mutual information {info}")
    return info


def damage_count(state: StabilizerState, erased: Iterable[int], reference: Iterable[int]) -> float:
    """Half the mutual information I(R:T); a multiple of 1/2.

    Odd I(R:T) arises when the erased qubits hold only classical correlations
    with the reference (GHZ-type), so g is not always an integer.
    """
    return mutual_information(state, erased, reference) / 2


def _columns_as_ints(mat: np.ndarray) -> list[int]:
    """Each column of a 0/1 matrix as a Python int (bit i = row i)."""
    packed = np.packbits(np.ascontiguousarray(mat.T), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


class ErasureAnalyzer:
    """Fast repeated damage counts for one encoded state.

    The stabilizer rows are reduced once so that a set of "logical" rows has
    independent support on the reference while the remaining "code" rows
    vanish there. Then ``I(R:T) = rank(all rows on T) - rank(code rows on T)``
    needs only ``2|T|`` column vectors per pattern.
    """

    def __init__(self, state: StabilizerState, reference: Sequence[int], system: Optional[Sequence[int]] = None):
        n = state.n
        ref = np.array(sorted(set(int(i) for i in reference)), dtype=np.int64)
        if system is None:
            system = [q for q in range(n) if q not in set(ref.tolist())]
        self.system = np.array(list(system), dtype=np.int64)
        g = np.concatenate([state.x[n:], state.z[n:]], axis=1).astype(np.uint8)
        ref_cols = np.concatenate([ref, n + ref])
        rows = g.shape[0]
        pivot_row = 0
        for col in ref_cols:
            if pivot_row == rows:
                break
            hits = np.flatnonzero(g[pivot_row:, col])
            if hits.size == 0:
                continue
            p = pivot_row + int(hits[0])
            if p != pivot_row:
                g[[pivot_row, p]] = g[[p, pivot_row]]
            mask = g[:, col].astype(bool)
            mask[pivot_row] = False
            g[mask] ^= g[pivot_row]
            pivot_row += 1
        self.n_logical_rows = pivot_row
        code_mask = 0
        for i in range(pivot_row, rows):
            code_mask |= 1 << i
        cols_x = _columns_as_ints(g[:, self.system])
        cols_z = _columns_as_ints(g[:, n + self.system])
        index = {int(q): i for i, q in enumerate(self.system)}
        self._index = index
        self._all = [(cx, cz) for cx, cz in zip(cols_x, cols_z)]
        self._code = [(cx & code_mask, cz & code_mask) for cx, cz in self._all]

    def damage(self, erased: Iterable[int]) -> float:
        """Damage count ``g`` for erased qubit labels (state indices)."""
        return self.mutual_information(erased) / 2

    def mutual_information(self, erased: Iterable[int]) -> int:
        """I(R:T) for erased qubit labels (state indices)."""
        return self.mutual_information_local([self._index[int(q)] for q in erased])

    def damage_local(self, positions: Iterable[int]) -> float:
        return self.mutual_information_local(positions) / 2

    def mutual_information_local(self, positions: Iterable[int]) -> int:
        """I(R:T) for erased positions indexed within ``system``."""
        all_vecs = []
        code_vecs = []
        for p in positions:
            ax, az = self._all[p]
            cx, cz = self._code[p]
            all_vecs.append(ax)
            all_vecs.append(az)
            code_vecs.append(cx)
            code_vecs.append(cz)
        info = gf2.rank_of_ints(all_vecs) - gf2.rank_of_ints(code_vecs)
        if info < 0:
            raise InvariantViolation("negative mutual information in damage count")
        return info


def format_tableau(state: StabilizerState, include_destabilizers: bool = False) -> str:
    """Text dump, one signed generator per line (e.g. ``+XXIZ``)."""
    lines = []
    if include_destabilizers:
        lines.extend(p.label() for p in state.destabilizers())
        lines.append("---")
    lines.extend(p.label() for p in state.stabilizers())
    return "\n".join(lines) + "\n"


def stabilizer_group_equal(a: StabilizerState, b: StabilizerState) -> bool:
    """True if both tableaux stabilize the same state (signs included)."""
    if a.n != b.n:
        return False
    for p in b.stabilizers():
        if not _in_stabilizer_group(a, p):
            return False
    return True


def _in_stabilizer_group(state: StabilizerState, p: PauliString) -> bool:
    n = state.n
    gens = np.concatenate([state.x[n:], state.z[n:]], axis=1)
    target = np.array(p.x + p.z, dtype=np.uint8)
    sol = gf2.solve(BitMatrix.from_dense(gens.T), target)
    if sol is None:
        return False
    # Multiply the selected generators and compare signs.
    x = np.zeros(n, dtype=np.int64)
    z = np.zeros(n, dtype=np.int64)
    e = 0
    for i in np.flatnonzero(sol):
        gx = state.x[n + i].astype(np.int64)
        gz = state.z[n + i].astype(np.int64)
        e += 2 * int(state.r[n + i]) + int(gx @ gz) + 2 * int(z @ gx)
        x ^= gx
        z ^= gz
    e -= int(x @ z)
    return (e - p.phase) % 4 == 0


__all__ = [
    "PauliString",
    "CliffordElement",
    "StabilizerState",
    "ErasureAnalyzer",
    "apply_gate",
    "apply_clifford",
    "sample_uniform_clifford",
    "subsystem_entropy",
    "damage_count",
    "mutual_information",
    "format_tableau",
    "stabilizer_group_equal",
    "is_symplectic",
    "symplectic_form",
]
