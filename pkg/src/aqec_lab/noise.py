"""Noise model descriptors and erasure-pattern samplers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np

from .errors import ContractViolation, ParameterError, UnsupportedError


def _check_prob(p: float, name: str = "p") -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise ParameterError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class PauliVec:
    p_I: float
    p_X: float
    p_Y: float
    p_Z: float

    def __post_init__(self):
        for name in ("p_I", "p_X", "p_Y", "p_Z"):
            _check_prob(getattr(self, name), name)
        if abs(self.p_I + self.p_X + self.p_Y + self.p_Z - 1.0) > 1e-12:
            raise ParameterError("Pauli probabilities must sum to 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_I, self.p_X, self.p_Y, self.p_Z)


@dataclass(frozen=True)
class PauliIID:
    vec: PauliVec
    tag = "pauli"


@dataclass(frozen=True)
class Depolarizing:
    p: float
    tag = "depolarizing"

    def __post_init__(self):
        _check_prob(self.p)


@dataclass(frozen=True)
class ErasureIID:
    p: float
    tag = "erasure-iid"

    def __post_init__(self):
        _check_prob(self.p)


@dataclass(frozen=True)
class ErasureFixedT:
    t: int
    tag = "erasure-fixed"

    def __post_init__(self):
        if int(self.t) != self.t or self.t < 0:
            raise ParameterError("t must be a nonnegative integer")


@dataclass(frozen=True)
class AmplitudeDamping:
    p: float
    tag = "amplitude-damping"

    def __post_init__(self):
        _check_prob(self.p)


@dataclass(frozen=True)
class ZZCoupling:
    p: float
    tag = "zz"

    def __post_init__(self):
        _check_prob(self.p)


NoiseSpec = Union[PauliIID, Depolarizing, ErasureIID, ErasureFixedT, AmplitudeDamping, ZZCoupling]

_TAGS = {cls.tag: cls for cls in (PauliIID, Depolarizing, ErasureIID, ErasureFixedT, AmplitudeDamping, ZZCoupling)}


def to_pauli_vec(noise: NoiseSpec) -> PauliVec:
    if isinstance(noise, PauliIID):
        return noise.vec
    if isinstance(noise, Depolarizing):
        p = noise.p
        return PauliVec(1 - 3 * p / 4, p / 4, p / 4, p / 4)
    raise ContractViolation(f"{noise.tag} noise has no Pauli-vector form")


def is_erasure(noise: NoiseSpec) -> bool:
    return isinstance(noise, (ErasureIID, ErasureFixedT))


def noise_to_dict(noise: NoiseSpec) -> dict:
    if isinstance(noise, PauliIID):
        return {"tag": noise.tag, **asdict(noise.vec)}
    return {"tag": noise.tag, **asdict(noise)}


def noise_from_dict(d: dict) -> NoiseSpec:
    d = dict(d)
    tag = d.pop("tag", None)
    if tag not in _TAGS:
        raise ParameterError(f"unknown noise tag {tag!r}")
    try:
        if tag == "pauli":
            return PauliIID(PauliVec(**d))
        return _TAGS[tag](**d)
    except TypeError as exc:
        raise ParameterError(f"bad fields for {tag} noise: {exc}") from exc


def parse_noise(text: str) -> NoiseSpec:
    """Parse ``tag:value`` strings such as ``erasure-iid:0.1`` or ``pauli:0.9,0.05,0,0.05``."""
    tag, sep, value = text.partition(":")
    if not sep or tag not in _TAGS:
        raise ParameterError(f"noise must look like TAG:VALUE with TAG in {sorted(_TAGS)}; got {text!r}")
    try:
        if tag == "pauli":
            parts = [float(v) for v in value.split(",")]
            if len(parts) != 4:
                raise ParameterError("pauli noise needs four comma-separated probabilities")
            return PauliIID(PauliVec(*parts))
        if tag == "erasure-fixed":
            return ErasureFixedT(int(value))
        return _TAGS[tag](float(value))
    except ParameterError:
        raise
    except ValueError as exc:
        raise ParameterError(f"bad noise value in {text!r}") from exc


def sample_erasure_patterns(noise: NoiseSpec, n: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Draw ``count`` erasure patterns (sorted index arrays)."""
    if isinstance(noise, ErasureIID):
        mask = rng.random((count, n)) < noise.p
        return [np.flatnonzero(row) for row in mask]
    if isinstance(noise, ErasureFixedT):
        t = noise.t
        if t > n:
            raise ParameterError(f"t={t} exceeds n={n}")
        perm = np.tile(np.arange(n), (count, 1))
        rows = np.arange(count)
        # Partial Fisher-Yates, vectorized over patterns.
        for i in range(t):
            j = rng.integers(i, n, size=count)
            a = perm[rows, i].copy()
            perm[rows, i] = perm[rows, j]
            perm[rows, j] = a
        return [np.sort(row[:t]) for row in perm]
    raise UnsupportedError(f"{noise.tag} noise is unsupported for sampling")


def sample_erasure_pattern(noise: NoiseSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    return sample_erasure_patterns(noise, n, 1, rng)[0]


__all__ = [
    "PauliVec",
    "PauliIID",
    "Depolarizing",
    "ErasureIID",
    "ErasureFixedT",
    "AmplitudeDamping",
    "ZZCoupling",
    "NoiseSpec",
    "to_pauli_vec",
    "is_erasure",
    "noise_to_dict",
    "noise_from_dict",
    "parse_noise",
    "sample_erasure_patterns",
    "sample_erasure_pattern",
]
