"""Pattern declarations, parameter checks and the analytic amplitude oracle."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Sequence, Union

import numpy as np

COMPLEX_TOL = 1e-12


class PatternError(ValueError):
    """A pattern's parameters violate its declared constraints."""


def is_complex(z: complex) -> bool:
    return abs(complex(z).imag) > COMPLEX_TOL


def num_qubits(N: int) -> int:
    N = int(N)
    if N < 2 or N & (N - 1):
        raise PatternError(f"N must be a power of two >= 2, got {N}")
    return N.bit_length() - 1


def _c(z) -> complex:
    return complex(z)


# ---------------------------------------------------------------------------
# leaf patterns


@dataclass(frozen=True)
class Sparse:
    entries: tuple[tuple[int, complex], ...]
    name = "SPARSE"

    def __init__(self, entries):
        object.__setattr__(self, "entries", tuple((int(i), _c(a)) for i, a in entries))

    def params(self):
        return {"entries": [[i, a] for i, a in self.entries]}


@dataclass(frozen=True)
class Step:
    k_e: int
    c: complex = 1.0
    name = "STEP"

    def params(self):
        return {"k_e": self.k_e, "c": self.c}


@dataclass(frozen=True)
class Square:
    k_s: int
    k_e: int
    c: complex = 1.0
    name = "SQUARE"

    def params(self):
        return {"k_s": self.k_s, "k_e": self.k_e, "c": self.c}


@dataclass(frozen=True)
class Walsh:
    k: int
    c0: complex = 1.0
    c1: complex = -1.0
    name = "WALSH"

    def params(self):
        return {"k": self.k, "c0": self.c0, "c1": self.c1}


@dataclass(frozen=True)
class Fourier:
    modes: tuple[tuple[int, float, float], ...]
    name = "FOURIER"

    def __init__(self, modes):
        object.__setattr__(self, "modes", tuple((int(n), float(a), float(p)) for n, a, p in modes))

    def params(self):
        return {"modes": [list(m) for m in self.modes]}


@dataclass(frozen=True)
class Geometric:
    r: complex
    k_s: int = 0
    c: complex = 1.0
    name = "GEOMETRIC"

    def params(self):
        return {"r": self.r, "k_s": self.k_s, "c": self.c}


@dataclass(frozen=True)
class Hamming:
    r: complex
    c: complex = 1.0
    name = "HAMMING"

    def params(self):
        return {"r": self.r, "c": self.c}


@dataclass(frozen=True)
class Staircase:
    r: complex
    c: complex = 1.0
    name = "STAIRCASE"

    def params(self):
        return {"r": self.r, "c": self.c}


@dataclass(frozen=True)
class Dicke:
    k: int
    c: float = 1.0
    name = "DICKE"

    def params(self):
        return {"k": self.k, "c": self.c}


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[complex, ...]
    name = "POLYNOMIAL"

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", tuple(_c(x) for x in coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def params(self):
        return {"coeffs": list(self.coeffs)}


# ---------------------------------------------------------------------------
# compositions


@dataclass(frozen=True)
class Sum:
    terms: tuple[tuple[complex, Any], ...]
    name = "SUM"

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple((_c(w), p) for w, p in terms))

    def params(self):
        return {"terms": [[w, p.name] for w, p in self.terms]}


@dataclass(frozen=True)
class Partition:
    parts: tuple[Any, ...]
    name = "PARTITION"

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple(parts))

    def params(self):
        return {"parts": [p.name for p in self.parts]}


@dataclass(frozen=True)
class Tensor:
    parts: tuple[tuple[Any, int], ...]
    name = "TENSOR"

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple((p, int(n)) for p, n in parts))

    def params(self):
        return {"parts": [[p.name, n] for p, n in self.parts]}


Leaf = Union[Sparse, Step, Square, Walsh, Fourier, Geometric, Hamming, Staircase, Dicke, Polynomial]
Pattern = Union[Leaf, Sum, Partition, Tensor]
LEAVES = (Sparse, Step, Square, Walsh, Fourier, Geometric, Hamming, Staircase, Dicke, Polynomial)
COMPOSITIONS = (Sum, Partition, Tensor)
BOUNDED = (Sparse, Step, Square, Geometric)


# ---------------------------------------------------------------------------
# metadata record


@dataclass
class EncodingInfo:
    pattern_name: str
    N: int
    m: int
    params: dict
    gate_count: int
    gate_count_1q: int
    gate_count_2q: int
    circuit_depth: int
    complexity: str
    success_probability: float = 1.0
    circuit_code: str = ""
    validated: bool = False
    vector: np.ndarray | None = None
    num_ancillas: int = 0
    warnings: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# support descriptors


@dataclass(frozen=True)
class Support:
    kind: str  # "interval" | "set" | "full"
    start: int = 0
    stop: int = 0
    indices: frozenset[int] = frozenset()

    def contains(self, i: int) -> bool:
        if self.kind == "full":
            return True
        if self.kind == "interval":
            return self.start <= i < self.stop
        return i in self.indices

    def disjoint(self, other: "Support") -> bool:
        if self.kind == "full" or other.kind == "full":
            return False
        if self.kind == "interval" and other.kind == "interval":
            return self.stop <= other.start or other.stop <= self.start
        if self.kind == "set" and other.kind == "set":
            return not (self.indices & other.indices)
        s, iv = (self, other) if self.kind == "set" else (other, self)
        return not any(iv.start <= i < iv.stop for i in s.indices)


def support(pattern, N: int) -> Support:
    if isinstance(pattern, Sparse):
        return Support("set", indices=frozenset(i for i, _ in pattern.entries))
    if isinstance(pattern, Step):
        return Support("interval", 0, pattern.k_e)
    if isinstance(pattern, Square):
        return Support("interval", pattern.k_s, pattern.k_e)
    if isinstance(pattern, Geometric):
        return Support("interval", pattern.k_s, N)
    return Support("full", 0, N)


# ---------------------------------------------------------------------------
# validation


def _nonzero_ratio(r, label):
    r = _c(r)
    if abs(r) < COMPLEX_TOL:
        raise PatternError(f"{label}: r must be nonzero")
    if abs(r - 1) < COMPLEX_TOL:
        raise PatternError(f"{label}: r must differ from 1")


def _nonzero(c, label):
    if abs(_c(c)) < COMPLEX_TOL:
        raise PatternError(f"{label}: amplitude c must be nonzero")


def validate_params(pattern, N: int, *, _nested: bool = False) -> None:
    m = num_qubits(N)
    if isinstance(pattern, Sparse):
        if not pattern.entries:
            raise PatternError("SPARSE: at least one entry required")
        idx = [i for i, _ in pattern.entries]
        if len(set(idx)) != len(idx):
            raise PatternError("SPARSE: indices must be distinct")
        for i, a in pattern.entries:
            if not 0 <= i < N:
                raise PatternError(f"SPARSE: index {i} outside [0, {N})")
            if abs(a) < COMPLEX_TOL:
                raise PatternError(f"SPARSE: amplitude at index {i} must be nonzero")
    elif isinstance(pattern, Step):
        if not 1 <= pattern.k_e <= N:
            raise PatternError(f"STEP: need 1 <= k_e <= N, got k_e={pattern.k_e}")
        _nonzero(pattern.c, "STEP")
    elif isinstance(pattern, Square):
        if not 0 <= pattern.k_s < pattern.k_e <= N:
            raise PatternError(f"SQUARE: need 0 <= k_s < k_e <= N, got [{pattern.k_s}, {pattern.k_e})")
        _nonzero(pattern.c, "SQUARE")
    elif isinstance(pattern, Walsh):
        if not 0 <= pattern.k < m:
            raise PatternError(f"WALSH: need 0 <= k < m={m}, got k={pattern.k}")
        if abs(_c(pattern.c0)) < COMPLEX_TOL and abs(_c(pattern.c1)) < COMPLEX_TOL:
            raise PatternError("WALSH: c0 and c1 cannot both be zero")
    elif isinstance(pattern, Fourier):
        if not pattern.modes:
            raise PatternError("FOURIER: at least one mode required")
        for n, a, _ in pattern.modes:
            if not 1 <= n < N / 2:
                raise PatternError(f"FOURIER: need 1 <= n < N/2, got n={n}")
            if a == 0:
                raise PatternError("FOURIER: mode amplitude A must be nonzero")
        if not fourier_coefficients(pattern, N):
            raise PatternError("FOURIER: modes cancel to the zero vector")
    elif isinstance(pattern, Geometric):
        _nonzero_ratio(pattern.r, "GEOMETRIC")
        _nonzero(pattern.c, "GEOMETRIC")
        if not 0 <= pattern.k_s < N:
            raise PatternError(f"GEOMETRIC: need 0 <= k_s < N, got k_s={pattern.k_s}")
    elif isinstance(pattern, (Hamming, Staircase)):
        _nonzero_ratio(pattern.r, pattern.name)
        _nonzero(pattern.c, pattern.name)
    elif isinstance(pattern, Dicke):
        if not 0 <= pattern.k <= m:
            raise PatternError(f"DICKE: need 0 <= k <= m={m}, got k={pattern.k}")
        if isinstance(pattern.c, complex) or not float(pattern.c) > 0:
            raise PatternError("DICKE: c must be real and positive")
    elif isinstance(pattern, Polynomial):
        if not pattern.coeffs:
            raise PatternError("POLYNOMIAL: at least one coefficient required")
        if np.linalg.norm(_poly_grid(pattern, N)) < 1e-14:
            raise PatternError("POLYNOMIAL: polynomial vanishes on the grid")
    elif isinstance(pattern, COMPOSITIONS):
        if _nested:
            raise PatternError("compositions may only contain leaf patterns")
        _validate_composition(pattern, N)
    else:
        raise PatternError(f"unknown pattern {pattern!r}")


def _validate_composition(pattern, N: int) -> None:
    if isinstance(pattern, Sum):
        if not pattern.terms:
            raise PatternError("SUM: at least one term required")
        for w, p in pattern.terms:
            if abs(w) < COMPLEX_TOL:
                raise PatternError("SUM: weights must be nonzero")
            validate_params(p, N, _nested=True)
        if np.linalg.norm(raw_vector(pattern, N)) < 1e-12:
            raise PatternError("SUM: weighted components cancel to the zero vector")
    elif isinstance(pattern, Partition):
        if not pattern.parts:
            raise PatternError("PARTITION: at least one part required")
        for p in pattern.parts:
            if not isinstance(p, BOUNDED):
                raise PatternError(
                    f"PARTITION: {p.name} has full-register support; only SPARSE, STEP, SQUARE "
                    "and GEOMETRIC parts are accepted (use SUM for dense components)"
                )
            validate_params(p, N, _nested=True)
        sups = [support(p, N) for p in pattern.parts]
        for i in range(len(sups)):
            for j in range(i + 1, len(sups)):
                if not sups[i].disjoint(sups[j]):
                    raise PatternError(
                        f"PARTITION: parts {i} and {j} have overlapping support; "
                        "use SUM for overlapping components"
                    )
    elif isinstance(pattern, Tensor):
        if not pattern.parts:
            raise PatternError("TENSOR: at least one part required")
        total = 1
        for p, n_i in pattern.parts:
            num_qubits(n_i)
            validate_params(p, n_i, _nested=True)
            total *= n_i
        if total != N:
            raise PatternError(f"TENSOR: product of part widths {total} != N={N}")


# ---------------------------------------------------------------------------
# analytic vectors


def _popcount(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    out = np.zeros(a.shape, dtype=np.int64)
    for b in range(int(a.max()).bit_length() if a.size else 0):
        out += (a >> b) & 1
    return out


def _poly_grid(p: Polynomial, N: int) -> np.ndarray:
    x = np.arange(N) / (N - 1)
    return np.polynomial.polynomial.polyval(x, np.array(p.coeffs, dtype=complex))


def fourier_coefficients(p: Fourier, N: int) -> dict[int, complex]:
    """F with f_i = sum_k F[k] exp(2 pi i k i / N); each mode fills +n and N-n."""
    out: dict[int, complex] = {}
    for n, a, ph in p.modes:
        pos = a / 2j * cmath.exp(1j * ph)
        out[n] = out.get(n, 0) + pos
        out[N - n] = out.get(N - n, 0) - a / 2j * cmath.exp(-1j * ph)
    return {k: v for k, v in out.items() if abs(v) > 1e-15}


def raw_vector(pattern, N: int) -> np.ndarray:
    """Unnormalized amplitudes exactly as declared."""
    m = num_qubits(N)
    i = np.arange(N)
    f = np.zeros(N, dtype=complex)
    if isinstance(pattern, Sparse):
        for x, a in pattern.entries:
            f[x] = a
    elif isinstance(pattern, Step):
        f[: pattern.k_e] = pattern.c
    elif isinstance(pattern, Square):
        f[pattern.k_s : pattern.k_e] = pattern.c
    elif isinstance(pattern, Walsh):
        f[:] = np.where((i >> pattern.k) & 1, _c(pattern.c1), _c(pattern.c0))
    elif isinstance(pattern, Fourier):
        for n, a, ph in pattern.modes:
            f += a * np.sin(2 * np.pi * n * i / N + ph)
    elif isinstance(pattern, Geometric):
        j = np.arange(N - pattern.k_s)
        f[pattern.k_s :] = _c(pattern.c) * _c(pattern.r) ** j
    elif isinstance(pattern, Hamming):
        f[:] = _c(pattern.c) * _c(pattern.r) ** _popcount(i)
    elif isinstance(pattern, Staircase):
        for k in range(m + 1):
            f[(1 << k) - 1] = _c(pattern.c) * _c(pattern.r) ** k
    elif isinstance(pattern, Dicke):
        f[_popcount(i) == pattern.k] = pattern.c
    elif isinstance(pattern, Polynomial):
        f = _poly_grid(pattern, N).astype(complex)
    elif isinstance(pattern, Sum):
        for w, p in pattern.terms:
            f += w * raw_vector(p, N)
    elif isinstance(pattern, Partition):
        for p in pattern.parts:
            f += raw_vector(p, N)
    elif isinstance(pattern, Tensor):
        f = np.ones(1, dtype=complex)
        for p, n_i in pattern.parts:
            f = np.kron(f, raw_vector(p, n_i))
    else:
        raise PatternError(f"unknown pattern {pattern!r}")
    return f


def build_vector(pattern, N: int) -> np.ndarray:
    """Normalized target state for ``pattern`` on ``N`` amplitudes."""
    validate_params(pattern, N)
    f = raw_vector(pattern, N)
    nrm = np.linalg.norm(f)
    if nrm == 0:
        raise PatternError("pattern evaluates to the zero vector")
    return f / nrm


def _geom_sq_sum(r_abs: float, count: int) -> float:
    """sum_{j<count} r_abs^(2j)."""
    q = r_abs * r_abs
    if abs(q - 1) < 1e-15:
        return float(count)
    return (1 - q**count) / (1 - q)


def vector_norm(pattern, N: int) -> float:
    """L2 norm of the declared (unnormalized) vector, closed form where one exists."""
    m = num_qubits(N)
    if isinstance(pattern, Sparse):
        return math.sqrt(sum(abs(a) ** 2 for _, a in pattern.entries))
    if isinstance(pattern, Step):
        return abs(_c(pattern.c)) * math.sqrt(pattern.k_e)
    if isinstance(pattern, Square):
        return abs(_c(pattern.c)) * math.sqrt(pattern.k_e - pattern.k_s)
    if isinstance(pattern, Walsh):
        return math.sqrt(N / 2 * (abs(_c(pattern.c0)) ** 2 + abs(_c(pattern.c1)) ** 2))
    if isinstance(pattern, Fourier):
        return math.sqrt(N * sum(abs(v) ** 2 for v in fourier_coefficients(pattern, N).values()))
    if isinstance(pattern, Geometric):
        return abs(_c(pattern.c)) * math.sqrt(_geom_sq_sum(abs(_c(pattern.r)), N - pattern.k_s))
    if isinstance(pattern, Hamming):
        return abs(_c(pattern.c)) * (1 + abs(_c(pattern.r)) ** 2) ** (m / 2)
    if isinstance(pattern, Staircase):
        return abs(_c(pattern.c)) * math.sqrt(_geom_sq_sum(abs(_c(pattern.r)), m + 1))
    if isinstance(pattern, Dicke):
        return float(pattern.c) * math.sqrt(math.comb(m, pattern.k))
    return float(np.linalg.norm(raw_vector(pattern, N)))
