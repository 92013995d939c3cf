"""Choi-error estimation for random stabilizer encoders under erasure.

The encoded state lives on ``k + n`` qubits: reference qubits ``0..k-1``,
each maximally entangled with a logical slot, then physical qubits
``k..k+n-1``. For an erased set T the per-pattern fidelity is
``F_T = 2^(-g(T))`` with ``g = I(R:T)/2``; the dense oracle below checks this
on small instances.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .dense import MAX_QUBITS, partial_trace, psd_sqrt, statevector
from .ensembles import CircuitSpec, pauli_twirl_wrap
from .errors import ContractViolation, InvariantViolation, ParameterError
from .noise import ErasureFixedT, ErasureIID, NoiseSpec, is_erasure, noise_to_dict, sample_erasure_patterns
from .stabilizer import ErasureAnalyzer, StabilizerState, apply_clifford, apply_gate

EXACT_PATTERN_LIMIT = 10_000
BOOTSTRAP_RESAMPLES = 1000
Z95 = 1.959963984540054
THREADS_ENV = "AQEC_LAB_THREADS"


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        w = int(raw)
    except ValueError as exc:
        raise ParameterError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if w < 1:
        raise ParameterError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return w


def encode_epr_state(spec: CircuitSpec, rng: np.random.Generator) -> StabilizerState:
    """Encode half of k Bell pairs with a fresh draw of ``spec``."""
    k, n = spec.k, spec.n_qubits
    state = StabilizerState.zero(k + n)
    for j, q in enumerate(spec.logical_slots):
        state = apply_gate(state, "H", [j])
        state = apply_gate(state, "CNOT", [j, k + q])
    for support, element in spec.instantiate(rng):
        state = apply_clifford(state, element, [k + q for q in support])
    return state


@dataclass
class ChoiEstimate:
    epsilon: float
    ci: tuple[float, float]
    f2: float
    f2_se: float
    f_mixture: float
    exact: bool
    n_patterns: int


def _patterns(noise: NoiseSpec, n: int, n_patterns: int, rng: np.random.Generator):
    """Return (patterns, weights, exact)."""
    if isinstance(noise, ErasureFixedT):
        if noise.t > n:
            raise ParameterError(f"t={noise.t} exceeds n={n}")
        if math.comb(n, noise.t) <= EXACT_PATTERN_LIMIT:
            pats = [np.array(c, dtype=np.int64) for c in itertools.combinations(range(n), noise.t)]
            return pats, np.full(len(pats), 1.0 / len(pats)), True
    elif isinstance(noise, ErasureIID):
        if 2 ** n <= EXACT_PATTERN_LIMIT:
            pats, weights = [], []
            for bits in itertools.product((0, 1), repeat=n):
                idx = np.flatnonzero(bits)
                pats.append(idx)
                weights.append(noise.p ** idx.size * (1 - noise.p) ** (n - idx.size))
            return pats, np.array(weights), True
    else:
        raise ContractViolation(f"{noise.tag} noise is not an erasure model")
    if n_patterns < 1:
        raise ParameterError("n_patterns must be >= 1")
    pats = sample_erasure_patterns(noise, n, n_patterns, rng)
    return pats, np.full(n_patterns, 1.0 / n_patterns), False


def erasure_choi_error(state: StabilizerState, noise: NoiseSpec, n_patterns: int, rng: np.random.Generator,
                       k: Optional[int] = None, analyzer: Optional[ErasureAnalyzer] = None) -> ChoiEstimate:
    """Estimate ``eps = sqrt(1 - E_T[4^-g(T)])`` for one encoded state.

    ``f_mixture = E_T[2^-g(T)]`` is the root fidelity of the flagged mixture,
    reported alongside for comparison.
    """
    if not is_erasure(noise):
        raise ContractViolation(f"{noise.tag} noise is not an erasure model")
    if k is None:
        if analyzer is None:
            raise ContractViolation("pass k or a prepared analyzer")
    if analyzer is None:
        analyzer = ErasureAnalyzer(state, range(k))
    n = len(analyzer.system)
    pats, weights, exact = _patterns(noise, n, n_patterns, rng)
    info = np.array([analyzer.mutual_information_local(p) for p in pats], dtype=float)
    f2_terms = 2.0 ** -info
    f_terms = 2.0 ** (-info / 2)
    f2 = float(np.dot(weights, f2_terms))
    f_mix = float(np.dot(weights, f_terms))
    if exact:
        se = 0.0
    else:
        se = float(np.std(f2_terms, ddof=1) / math.sqrt(len(pats))) if len(pats) > 1 else math.inf
    f2 = min(max(f2, 0.0), 1.0)
    eps = math.sqrt(1.0 - f2)
    if se == 0.0:
        ci = (eps, eps)
    elif eps > 0:
        half = Z95 * se / (2.0 * eps)
        ci = (max(0.0, eps - half), min(1.0, eps + half))
    else:
        # Delta method degenerates at eps = 0; transform the F^2 interval instead.
        ci = (0.0, math.sqrt(min(1.0, Z95 * se)))
    return ChoiEstimate(eps, ci, f2, se, f_mix, exact, len(pats))


@dataclass
class SimReport:
    family: str
    n: int
    k: int
    noise: dict
    n_circuits: int
    n_patterns: int
    seed: int
    pauli_twirl: bool
    mean_epsilon: float
    ci: tuple[float, float]
    mean_f2: float
    mean_epsilon_mixture: float
    exact_inner: bool
    per_circuit: list = field(default_factory=list)
    workers: int = 1
    wall_time: float = 0.0
    version: str = __version__

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ci"] = list(self.ci)
        return d


def circuit_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, index)))


def _one_circuit(args) -> tuple[float, float, float, bool]:
    spec_dict, noise, n_patterns, seed, index, twirl = args
    spec = CircuitSpec.from_dict(spec_dict)
    rng = circuit_stream(seed, index)
    if twirl:
        spec = pauli_twirl_wrap(spec, rng)
    state = encode_epr_state(spec, rng)
    est = erasure_choi_error(state, noise, n_patterns, rng, k=spec.k)
    return est.epsilon, est.f2, math.sqrt(max(0.0, 1.0 - est.f_mixture ** 2)), est.exact


def bootstrap_ci(values: Sequence[float], seed: int, resamples: int = BOOTSTRAP_RESAMPLES) -> tuple[float, float]:
    vals = np.asarray(values, dtype=float)
    if vals.size < 2:
        return (float(vals.mean()), float(vals.mean())) if vals.size else (math.nan, math.nan)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    idx = rng.integers(0, vals.size, size=(resamples, vals.size))
    means = vals[idx].mean(axis=1)
    lo, hi = np.percentile(means, [2.5, 97.5])
    return float(lo), float(hi)


def estimate_ensemble_choi(spec: CircuitSpec, noise: NoiseSpec, n_circuits: int, n_patterns: int, seed: int,
                           workers: Optional[int] = None, pauli_twirl: bool = False) -> SimReport:
    """Mean Choi error over circuit draws, with a bootstrap CI over circuits.

    Circuit ``i`` uses its own stream ``SeedSequence(seed, spawn_key=(0, i))``
    so results do not depend on ``workers``.
    """
    if not is_erasure(noise):
        raise ContractViolation(f"{noise.tag} noise is not an erasure model")
    if n_circuits < 1:
        raise ParameterError("n_circuits must be >= 1")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ParameterError("workers must be >= 1")
    start = time.perf_counter()
    spec_dict = spec.to_dict()
    jobs = [(spec_dict, noise, n_patterns, seed, i, pauli_twirl) for i in range(n_circuits)]
    if workers == 1 or n_circuits == 1:
        results = [_one_circuit(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_circuit, jobs, chunksize=max(1, n_circuits // (4 * workers))))
    eps = [r[0] for r in results]
    return SimReport(
        family=spec.family,
        n=spec.n_qubits,
        k=spec.k,
        noise=noise_to_dict(noise),
        n_circuits=n_circuits,
        n_patterns=n_patterns,
        seed=seed,
        pauli_twirl=pauli_twirl,
        mean_epsilon=float(np.mean(eps)),
        ci=bootstrap_ci(eps, seed),
        mean_f2=float(np.mean([r[1] for r in results])),
        mean_epsilon_mixture=float(np.mean([r[2] for r in results])),
        exact_inner=all(r[3] for r in results),
        per_circuit=eps,
        workers=workers,
        wall_time=time.perf_counter() - start,
    )


@dataclass
class DenseChoiResult:
    fidelity: float
    transpose_fidelity: float

    @property
    def epsilon(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.fidelity ** 2))


def _trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def _optimal_fidelity(rho: np.ndarray, d_r: int, d_e: int, rng: np.random.Generator,
                      starts: int = 4, iters: int = 500, tol: float = 1e-14) -> float:
    """max over zeta of F(rho_RE, I/d_R (x) zeta_E) by alternating polar ascent."""
    sq = psd_sqrt(rho)
    rho_e = np.einsum("iaib->ab", rho.reshape(d_r, d_e, d_r, d_e))
    inits = [psd_sqrt(rho_e)]
    for _ in range(starts - 1):
        g = rng.normal(size=(d_e, d_e)) + 1j * rng.normal(size=(d_e, d_e))
        inits.append(g)
    best = 0.0
    eye_r = np.eye(d_r)
    for kmat in inits:
        kmat = kmat / np.linalg.norm(kmat)
        prev = -1.0
        for _ in range(iters):
            m = sq @ np.kron(eye_r, kmat)
            u, s, vh = np.linalg.svd(m)
            val = float(np.sum(s))
            if val - prev <= tol:
                break
            prev = val
            w = (u @ vh).conj().T
            g = np.einsum("iaib->ab", (w @ sq).reshape(d_r, d_e, d_r, d_e))
            kmat = g.conj().T / np.linalg.norm(g)
        best = max(best, prev)
    return best / math.sqrt(d_r)


def _transpose_fidelity(psi: np.ndarray, k: int, n: int, erased_phys: Sequence[int]) -> float:
    """Root entanglement fidelity of the transpose (Petz) recovery."""
    d_l = 2 ** k
    t = len(erased_phys)
    kept = [q for q in range(n) if q not in set(erased_phys)]
    # V |j> = sqrt(d_L) (<j|_R (x) I) psi, as an n-qubit isometry column.
    v = math.sqrt(d_l) * psi.reshape(d_l, 2 ** n).T
    v = v.reshape([2] * n + [d_l])
    v = np.transpose(v, list(erased_phys) + kept + [n]).reshape(2 ** t, 2 ** (n - t), d_l)
    kraus = [v[j] for j in range(2 ** t)]
    omega = sum(a @ a.conj().T for a in kraus) / d_l
    w, vecs = np.linalg.eigh((omega + omega.conj().T) / 2)
    inv_sqrt = np.where(w > 1e-12, 1.0 / np.sqrt(np.clip(w, 1e-300, None)), 0.0)
    om_isqrt = (vecs * inv_sqrt) @ vecs.conj().T
    recov = [a.conj().T @ om_isqrt / math.sqrt(d_l) for a in kraus]
    fe = sum(abs(np.trace(b @ a)) ** 2 for b in recov for a in kraus) / d_l ** 2
    return math.sqrt(min(1.0, max(0.0, float(fe))))


def dense_oracle_choi(state: StabilizerState, k: int, erased: Sequence[int],
                      rng: Optional[np.random.Generator] = None, check_sandwich: bool = True) -> DenseChoiResult:
    """Exact optimal recovery fidelity for erasing ``erased`` (physical indices 0..n-1).

    The optimum comes from maximizing the complementary-channel fidelity over
    environment states. The transpose-channel fidelity must satisfy
    ``(1 - F~)/2 <= 1 - F <= 1 - F~``.
    """
    total = state.n
    if total > MAX_QUBITS:
        raise ContractViolation(f"dense oracle limited to {MAX_QUBITS} qubits")
    n = total - k
    erased = sorted(set(int(q) for q in erased))
    if any(not 0 <= q < n for q in erased):
        raise ContractViolation("erased index out of range")
    rng = np.random.default_rng(0) if rng is None else rng
    psi = statevector(state)
    if not erased:
        fid = 1.0
    else:
        keep = list(range(k)) + [k + q for q in erased]
        rho = partial_trace(np.outer(psi, psi.conj()), keep, total)
        fid = min(1.0, _optimal_fidelity(rho, 2 ** k, 2 ** len(erased), rng))
    ft = _transpose_fidelity(psi, k, n, erased)
    if check_sandwich:
        slack = 1e-8
        if not (0.5 * (1 - ft) <= (1 - fid) + slack and (1 - fid) <= (1 - ft) + slack):
            raise InvariantViolation(f"transpose-channel sandwich violated: F={fid}, F~={ft}")
    return DenseChoiResult(fid, ft)


__all__ = [
    "THREADS_ENV",
    "EXACT_PATTERN_LIMIT",
    "default_workers",
    "encode_epr_state",
    "ChoiEstimate",
    "erasure_choi_error",
    "SimReport",
    "circuit_stream",
    "bootstrap_ci",
    "estimate_ensemble_choi",
    "DenseChoiResult",
    "dense_oracle_choi",
]
