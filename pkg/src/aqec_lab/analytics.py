"""Closed-form encoding rates, Choi-error bounds and baselines.

All logarithms are base 2. Exponentially small or large addends are combined
in log-space so that n up to 10**6 neither underflows nor overflows.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import optimize

from .ensembles import brickwork_depth, xi_of
from .errors import ContractViolation, ParameterError, UnsupportedError
from .noise import (
    AmplitudeDamping,
    Depolarizing,
    ErasureFixedT,
    ErasureIID,
    NoiseSpec,
    PauliIID,
    PauliVec,
    ZZCoupling,
    noise_to_dict,
    to_pauli_vec,
)

NONSMOOTH = "nonsmooth"
SMOOTH = "smooth"


def _xlog2x(x: float) -> float:
    return 0.0 if x <= 0 else x * math.log2(x)


def binary_entropy(x: float) -> float:
    return -_xlog2x(x) - _xlog2x(1.0 - x)


def relative_entropy_bits(a: float, b: float) -> float:
    """Binary relative entropy D(a || b) in bits."""
    if not (0 < b < 1):
        raise ParameterError("D(a||b) needs 0 < b < 1")
    out = 0.0
    if a > 0:
        out += a * math.log2(a / b)
    if a < 1:
        out += (1 - a) * math.log2((1 - a) / (1 - b))
    return out


def f_of_p(v: PauliVec) -> float:
    return 2.0 * math.log2(sum(math.sqrt(p) for p in v.as_tuple()))


def h_of_p(v: PauliVec) -> float:
    return -sum(_xlog2x(p) for p in v.as_tuple())


def _amp_nonsmooth(p: float) -> float:
    return -math.log2(1.0 / (2.0 - p) + math.sqrt(p / (2.0 - p)))


def _zz_log(p: float) -> float:
    return math.log2(math.sqrt(1.0 - p) + math.sqrt(p))


def achievable_rate(noise: NoiseSpec, regime: str = NONSMOOTH, family: str = "double-layer",
                    k_over_n: Optional[float] = None, xi: Optional[int] = None,
                    n: Optional[int] = None) -> float:
    """Encoding rate below which the relevant bound decays.

    ``xi`` switches the double-layer ZZ rate to its finite-width form
    ``1 - 2(1 + 1/xi) log(sqrt(1-p) + sqrt(p))``. Fixed-t erasure needs ``n``.
    """
    if regime not in (NONSMOOTH, SMOOTH):
        raise ParameterError(f"regime must be {NONSMOOTH!r} or {SMOOTH!r}")
    if regime == SMOOTH and family == "brickwork":
        raise UnsupportedError("no smooth bound for the brickwork family")
    if isinstance(noise, (PauliIID, Depolarizing)):
        v = to_pauli_vec(noise)
        return 1.0 - (f_of_p(v) if regime == NONSMOOTH else h_of_p(v))
    if isinstance(noise, ErasureIID):
        p = noise.p
        return 1.0 - math.log2(1.0 + 3.0 * p) if regime == NONSMOOTH else 1.0 - 2.0 * p
    if isinstance(noise, ErasureFixedT):
        if n is None:
            raise ParameterError("fixed-t erasure rate needs n")
        if regime == SMOOTH:
            raise UnsupportedError("no smooth bound for fixed-t erasure")
        return 1.0 - math.log2(1.0 + 3.0 * noise.t / n)
    if isinstance(noise, AmplitudeDamping):
        p = noise.p
        if regime == NONSMOOTH:
            return _amp_nonsmooth(p)
        return binary_entropy((1.0 - p) / 2.0) - binary_entropy(p / 2.0)
    if isinstance(noise, ZZCoupling):
        if regime == SMOOTH:
            raise UnsupportedError("no smooth bound for ZZ-coupling noise")
        if family == "brickwork":
            if k_over_n is None:
                raise ParameterError("brickwork ZZ rate needs k_over_n")
            c = 1.0 + k_over_n
        elif xi is not None:
            c = 1.0 + 1.0 / xi
        else:
            c = 1.0
        return 1.0 - 2.0 * c * _zz_log(noise.p)
    raise ContractViolation(f"unknown noise {noise!r}")


@dataclass
class BoundReport:
    family: str
    noise: dict
    n: int
    k: int
    epsilon: Optional[float]
    value: float
    formula_id: str
    delta: Optional[float] = None
    t: Optional[int] = None
    log2_terms: dict = field(default_factory=dict)
    rate: Optional[float] = None
    warnings: list = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return not (self.value < 1.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vacuous"] = self.vacuous
        return d


def _pow2(x: float) -> float:
    # Saturate instead of overflowing when the rate condition fails badly.
    return math.inf if x > 1023.0 else 2.0 ** x


def _log2sum(*terms: float) -> float:
    out = -math.inf
    for t in terms:
        out = float(np.logaddexp2(out, t))
    return out


def _log2_dl_poly(n: int, k: int, epsilon: float) -> float:
    """log2 of 4 eps^(1-k/n) n^(k/n) / log2(n/eps)."""
    r = k / n
    lx = math.log2(n / epsilon)
    if lx <= 0:
        raise ParameterError("bounds need epsilon < n")
    return 2.0 + (1.0 - r) * math.log2(epsilon) + r * math.log2(n) - math.log2(lx)


def _log2_bw_poly(n: int, k: int, epsilon: float) -> float:
    """log2 of (eps/k)^(n/k - 2)."""
    return (n / k - 2.0) * math.log2(epsilon / k)


def _noise_t(noise: NoiseSpec, t: Optional[int]) -> Optional[int]:
    if isinstance(noise, ErasureFixedT):
        if t is not None and t != noise.t:
            raise ContractViolation("t disagrees with the fixed-t noise")
        return noise.t
    if t is not None:
        raise ContractViolation("t is only meaningful for fixed-t erasure noise")
    return None


def _check_sizes(n: int, k: int) -> None:
    if n < 1 or not 0 <= k <= n:
        raise ParameterError("need n >= 1 and 0 <= k <= n")


def choi_upper_bound(family: str, noise: NoiseSpec, n: int, k: int, epsilon: float,
                     delta: Optional[float] = None, t: Optional[int] = None,
                     regime: str = NONSMOOTH, xi_exact: bool = False) -> BoundReport:
    """Upper bound on the expected Choi error for an ensemble and noise model."""
    _check_sizes(n, k)
    t = _noise_t(noise, t)
    if family == "clifford":
        return clifford_baseline(noise, n, k, t=t, delta=delta if regime == SMOOTH else None)
    if family == "block":
        raise UnsupportedError("only a lower bound exists for the block family; see block_lower_bound")
    if family not in ("double-layer", "brickwork"):
        raise ParameterError(f"unknown family {family!r}")
    if not epsilon > 0:
        raise ParameterError("epsilon must be positive")
    r = k / n
    warnings: list[str] = []
    report = BoundReport(family=family, noise=noise_to_dict(noise), n=n, k=k, epsilon=epsilon,
                         value=math.nan, formula_id="", delta=delta, t=t)

    if family == "brickwork":
        if k < 1 or n % k:
            raise ParameterError("brickwork bound needs n/k integer")
        if regime == SMOOTH or t is not None:
            raise UnsupportedError("brickwork bounds exist only for i.i.d. noise in the non-smooth regime")
        rate = achievable_rate(noise, NONSMOOTH, "brickwork", k_over_n=r)
        if n / k - 2 <= 0:
            warnings.append("n/k <= 2: the approximation term does not decay")
        l_exp = -n * (rate - r)
        l_poly = _log2_bw_poly(n, k, epsilon)
        total = _log2sum(l_exp, l_poly)
        report.value = _pow2(total / 4.0)
        report.formula_id = f"brickwork/{noise.tag}/nonsmooth"
        report.log2_terms = {"exponential": l_exp, "approximation": l_poly}
        report.rate = rate
    else:
        l_poly = _log2_dl_poly(n, k, epsilon)
        xi = xi_of(n, epsilon) if xi_exact else None
        if t is not None:
            if regime == SMOOTH:
                raise UnsupportedError("no smooth bound for fixed-t erasure")
            rate = 1.0 - math.log2(1.0 + 3.0 * t / n)
            l_exp = -float(n - 2 * t - k)
            total = _log2sum(l_exp, l_poly)
            report.value = _pow2(total / 4.0)
            report.formula_id = "double-layer/erasure-fixed/nonsmooth"
        elif regime == NONSMOOTH:
            rate = achievable_rate(noise, NONSMOOTH, "double-layer", xi=xi)
            l_exp = -n * (rate - r)
            total = _log2sum(l_exp, l_poly)
            report.value = _pow2(total / 4.0)
            report.formula_id = f"double-layer/{noise.tag}/nonsmooth"
        else:
            if delta is None or not 0 < delta < 1:
                raise ParameterError("smooth bounds need 0 < delta < 1")
            rate = achievable_rate(noise, SMOOTH, "double-layer")
            l_exp = -n * (rate - r - delta)
            inner = _pow2(_log2sum(l_exp, l_poly) / 2.0)
            report.value = math.sqrt(8.0 * delta + inner)
            report.formula_id = f"double-layer/{noise.tag}/smooth"
        report.log2_terms = {"exponential": l_exp, "approximation": l_poly}
        report.rate = rate
        if n * (epsilon / n) ** (1.0 - r) >= 1.0:
            warnings.append("epsilon too large for the asymptotic coefficient estimate: need (eps/n)^(1-k/n) << 1/n")
    if report.rate is not None and r > report.rate:
        warnings.append(f"rate condition violated: k/n={r:.6g} exceeds achievable rate {report.rate:.6g}")
    report.warnings = warnings
    return report


def clifford_baseline(noise: NoiseSpec, n: int, k: int, t: Optional[int] = None,
                      delta: Optional[float] = None) -> BoundReport:
    """Choi-error bound for a uniformly random n-qubit Clifford encoder."""
    _check_sizes(n, k)
    t = _noise_t(noise, t)
    r = k / n
    report = BoundReport(family="clifford", noise=noise_to_dict(noise), n=n, k=k, epsilon=None,
                         value=math.nan, formula_id="", delta=delta, t=t)
    if t is not None:
        l_exp = -float(n - 2 * t - k)
        report.value = _pow2(l_exp / 4.0)
        report.formula_id = "clifford/erasure-fixed/nonsmooth"
        report.log2_terms = {"exponential": l_exp}
        if n - 2 * t - k < 0:
            report.warnings.append("Singleton condition n - 2t - k >= 0 violated")
        return report
    if delta is None:
        rate = achievable_rate(noise, NONSMOOTH, "double-layer")
        l_exp = -n * (rate - r)
        report.value = _pow2(l_exp / 4.0)
        report.formula_id = f"clifford/{noise.tag}/nonsmooth"
    else:
        if not 0 < delta < 1:
            raise ParameterError("smooth bounds need 0 < delta < 1")
        rate = achievable_rate(noise, SMOOTH, "double-layer")
        l_exp = -n * (rate - r - delta)
        report.value = math.sqrt(8.0 * delta + _pow2(l_exp / 2.0))
        report.formula_id = f"clifford/{noise.tag}/smooth"
    report.log2_terms = {"exponential": l_exp}
    report.rate = rate
    if r > rate:
        report.warnings.append(f"rate condition violated: k/n={r:.6g} exceeds achievable rate {rate:.6g}")
    return report


class BlockLowerBound(NamedTuple):
    term_poly: float
    term_const: float


def block_lower_bound(n: int, k: int, epsilon: float, p: float, xi: Optional[int] = None) -> BlockLowerBound:
    """The two competing terms of the block-encoding lower bound under i.i.d. erasure.

    ``term_poly = n (eps/n)^(8 D(tau || p))`` with ``tau = (1 - k/n)/2`` and the
    o(1) correction dropped; ``term_const = (1 - (1 - 1/m)^m) / sqrt(2)`` with
    ``m = n / (4 xi)`` blocks.
    """
    _check_sizes(n, k)
    tau = (1.0 - k / n) / 2.0
    if not 0 < p < 1:
        raise ParameterError("p must lie in (0, 1)")
    if tau <= p:
        raise ParameterError(f"outside Chernoff regime: tau={tau:.6g} <= p={p:.6g}")
    d = relative_entropy_bits(tau, p)
    term_poly = n * (epsilon / n) ** (8.0 * d)
    xi = xi_of(n, epsilon) if xi is None else xi
    m = n / (4.0 * xi)
    if m < 1:
        raise ParameterError("fewer than one block: n < 4 xi")
    term_const = (1.0 - (1.0 - 1.0 / m) ** m) / math.sqrt(2.0)
    return BlockLowerBound(term_poly, term_const)


def block_poly_exponent(k_over_n: float, p: float, eps_exponent: float) -> float:
    """Power of n in the block lower bound's polynomial term when eps = n^(-eps_exponent)."""
    d = relative_entropy_bits((1.0 - k_over_n) / 2.0, p)
    return 1.0 - 8.0 * (1.0 + eps_exponent) * d


def double_layer_poly_exponent(k_over_n: float, eps_exponent: float) -> float:
    """Power of n in the double-layer bound's approximation term (logs ignored)."""
    return ((1.0 - k_over_n) * (-eps_exponent) + k_over_n) / 4.0


def fitted_exponent(fn, n1: float, n2: float) -> float:
    """Log-log slope of ``fn`` between two sizes."""
    return (math.log(fn(n2)) - math.log(fn(n1))) / (math.log(n2) - math.log(n1))


def depth_formula(family: str, n: int, k: int, epsilon: float) -> int:
    """Brickwork: number of layers. Double-layer and block: the block width xi.

    The full random Clifford has no depth parameter; ``n`` is returned.
    """
    if family == "brickwork":
        return brickwork_depth(n, k, epsilon)
    if family in ("double-layer", "block"):
        return xi_of(n, epsilon)
    if family == "clifford":
        return n
    raise ParameterError(f"unknown family {family!r}")


def f_ave_from_choi(f_choi: float, k: int) -> float:
    """Average fidelity from Choi (entanglement) fidelity for a 2^k-dimensional code."""
    if not 0 <= f_choi <= 1:
        raise ParameterError("Choi fidelity must lie in [0, 1]")
    d = 2.0 ** k
    return math.sqrt((d * f_choi ** 2 + 1.0) / (d + 1.0))


def _p2(x: float) -> float:
    return 0.0 if x == -math.inf else 2.0 ** x


def decoupling_rhs(variant: str, h_se: Sequence[float], h_sr: Sequence[float], n: int,
                   xi_or_q: float, epsilon: Optional[float] = None) -> float:
    """Right-hand side of the tensor-product decoupling bounds.

    ``variant="double-layer"`` takes 2N per-region entropies and region width
    ``xi``. ``variant="brickwork"`` takes n per-qudit entropies, local dimension
    ``q`` and ``epsilon``. ``+inf`` entropies are allowed (limit ``2^-H = 0``).
    """
    h_se = [float(x) for x in h_se]
    h_sr = [float(x) for x in h_sr]
    if len(h_se) != len(h_sr):
        raise ContractViolation("entropy lists must have equal length")
    first = _p2(-(sum(h_se) + sum(h_sr)))
    log_prod = sum(max(0.0, -(a + b)) for a, b in zip(h_se, h_sr))
    if variant == "double-layer":
        if len(h_se) % 2:
            raise ContractViolation("double-layer entropies come in 2N regions")
        N = len(h_se) // 2
        xi = float(xi_or_q)
        two_eta = 2.0 ** (xi + 1) / (2.0 ** (2 * xi) + 1)
        if N <= 1:
            c = 0.0
        else:
            rho = max(max(2.0 ** -h, 2.0 ** h) for h in h_sr)
            c = 2.0 * math.expm1((N - 1) * math.log1p(two_eta * rho))
        second = c * 2.0 ** log_prod
    elif variant == "brickwork":
        if len(h_se) != n:
            raise ContractViolation("brickwork entropies must have length n")
        if epsilon is None:
            raise ParameterError("brickwork variant needs epsilon")
        q = float(xi_or_q)
        eta = q / (q * q + 1.0)
        rho_m = max(max(2.0 ** h, 2.0 ** -h) for h in h_sr)
        expo = math.log2(1.0 / (2.0 * eta * rho_m))
        second = 2.0 ** (expo * math.log2(epsilon / n) + log_prod)
    else:
        raise ParameterError(f"unknown decoupling variant {variant!r}")
    return math.sqrt(first + second)


CURVE_COLUMNS = (
    "p",
    "pauli_nonsmooth",
    "pauli_hashing",
    "erasure_nonsmooth",
    "erasure_capacity",
    "amp_nonsmooth",
    "amp_smooth",
    "zz_nonsmooth",
)


def curve_row(p: float) -> list[float]:
    """Unclipped rates at one noise strength (Pauli curves use depolarizing noise)."""
    dep = to_pauli_vec(Depolarizing(p))
    return [
        p,
        1.0 - f_of_p(dep),
        1.0 - h_of_p(dep),
        1.0 - math.log2(1.0 + 3.0 * p),
        1.0 - 2.0 * p,
        _amp_nonsmooth(p),
        binary_entropy((1.0 - p) / 2.0) - binary_entropy(p / 2.0),
        1.0 - 2.0 * _zz_log(p),
    ]


def emit_rate_curves(p_grid: Sequence[float]) -> np.ndarray:
    """Rate table with columns :data:`CURVE_COLUMNS`, rates clipped at 0."""
    grid = [float(p) for p in p_grid]
    if any(not 0.0 <= p <= 0.6 for p in grid):
        raise ParameterError("curve grid must lie in [0, 0.6]")
    rows = np.array([curve_row(p) for p in grid], dtype=float).reshape(len(grid), len(CURVE_COLUMNS))
    rows[:, 1:] = np.clip(rows[:, 1:], 0.0, None)
    return rows


def default_grid(points: int = 61, top: float = 0.6) -> list[float]:
    return [round(top * i / (points - 1), 12) for i in range(points)]


def hashing_threshold(method: str = "bisect") -> float:
    """Depolarizing strength where 1 - h(p) crosses zero."""
    fn = lambda p: 1.0 - h_of_p(to_pauli_vec(Depolarizing(p)))
    if method == "bisect":
        return optimize.bisect(fn, 0.01, 0.5, xtol=1e-14)
    if method == "newton":
        return optimize.newton(fn, 0.2, tol=1e-14)
    raise ParameterError("method must be 'bisect' or 'newton'")


__all__ = [
    "NONSMOOTH",
    "SMOOTH",
    "BoundReport",
    "BlockLowerBound",
    "binary_entropy",
    "relative_entropy_bits",
    "f_of_p",
    "h_of_p",
    "achievable_rate",
    "choi_upper_bound",
    "clifford_baseline",
    "block_lower_bound",
    "block_poly_exponent",
    "double_layer_poly_exponent",
    "fitted_exponent",
    "depth_formula",
    "f_ave_from_choi",
    "decoupling_rhs",
    "CURVE_COLUMNS",
    "curve_row",
    "emit_rate_curves",
    "default_grid",
    "hashing_threshold",
]
