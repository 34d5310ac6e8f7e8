"""Finite direct sums of matrix blocks with a weighted trace.

A ``TracedAlgebra`` is a finite von Neumann algebra of the form
``M_{n_1} + ... + M_{n_K}`` (block-diagonal complex matrices) carrying the
faithful finite trace ``rho(X) = sum_k w_k * Tr(X_k)`` with strictly positive
weights ``w_k``.  Elements live in every L^p space of the trace, with
``||X||_p = rho(|X|^p)^(1/p)`` and ``||X||_inf`` the operator norm.

The module provides the spectral toolkit used throughout the package:
Schatten norms, polar decomposition, spectral tail projections, functional
calculus, hermitian real/imaginary splitting, the four-positive-parts Jordan
splitting, Hoelder and trace-pairing checks, and the dual-norm achiever for
1 < p < infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError, StructureError

__all__ = [
    "TracedAlgebra",
    "AlgebraElement",
    "PExponent",
    "trace",
    "schatten_norm",
    "polar_decomposition",
    "spectral_tail_projection",
    "functional_calculus",
    "real_imag_parts",
    "jordan_split",
    "holder_check",
    "trace_pairing_checks",
    "dual_norm_achiever",
    "HolderReport",
    "TracePairingReport",
]


def structure_tol(scale: float) -> float:
    """Tolerance for recomputable structural predicates."""
    return 1e-10 * (1.0 + scale)


def psd_tol(op_norm: float) -> float:
    """An element counts as PSD when its minimum eigenvalue exceeds -psd_tol."""
    return 1e-9 * (1.0 + op_norm)


@dataclass(frozen=True)
class TracedAlgebra:
    """Direct sum of full matrix blocks with per-block trace weights."""

    block_sizes: tuple[int, ...]
    weights: tuple[float, ...]

    def __init__(self, block_sizes: Iterable[int], weights: Iterable[float] | None = None):
        sizes = tuple(int(n) for n in block_sizes)
        if not sizes:
            raise StructureError("at least one block is required")
        if any(n < 1 for n in sizes):
            raise StructureError(f"block sizes must be >= 1, got {sizes}")
        if weights is None:
            w = tuple(1.0 for _ in sizes)
        else:
            w = tuple(float(x) for x in weights)
        if len(w) != len(sizes):
            raise StructureError("weights and block_sizes must have equal length")
        if any(not (x > 0.0) for x in w):
            raise StructureError(f"trace weights must be strictly positive, got {w}")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "weights", w)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def total_dim(self) -> int:
        """Dimension of the Hilbert space the algebra acts on."""
        return sum(self.block_sizes)

    @property
    def coord_dim(self) -> int:
        """Complex dimension of the algebra as a vector space."""
        return sum(n * n for n in self.block_sizes)

    @property
    def trace_of_identity(self) -> float:
        return float(sum(w * n for w, n in zip(self.weights, self.block_sizes)))

    def element(self, blocks: Sequence[np.ndarray]) -> "AlgebraElement":
        return AlgebraElement(self, blocks)

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(n, dtype=complex) for n in self.block_sizes])

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((n, n), dtype=complex) for n in self.block_sizes])

    def diagonal(self, entries: Sequence[float | complex]) -> "AlgebraElement":
        """Element with the given diagonal, filled block after block."""
        vals = list(entries)
        if len(vals) != self.total_dim:
            raise StructureError("need one diagonal entry per Hilbert space dimension")
        blocks, at = [], 0
        for n in self.block_sizes:
            blocks.append(np.diag(np.asarray(vals[at:at + n], dtype=complex)))
            at += n
        return AlgebraElement(self, blocks)

    def from_coords(self, coords: np.ndarray) -> "AlgebraElement":
        """Inverse of ``AlgebraElement.coords`` (block-major, row-major)."""
        coords = np.asarray(coords, dtype=complex).ravel()
        if coords.size != self.coord_dim:
            raise StructureError(f"expected {self.coord_dim} coordinates, got {coords.size}")
        blocks, at = [], 0
        for n in self.block_sizes:
            blocks.append(coords[at:at + n * n].reshape(n, n))
            at += n * n
        return AlgebraElement(self, blocks)

    def from_dense(self, mat: np.ndarray) -> "AlgebraElement":
        """Extract the block-diagonal part of a dense total_dim x total_dim matrix."""
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (self.total_dim, self.total_dim):
            raise StructureError("dense matrix has wrong shape for this algebra")
        blocks, at = [], 0
        for n in self.block_sizes:
            blocks.append(mat[at:at + n, at:at + n])
            at += n
        return AlgebraElement(self, blocks)


class AlgebraElement:
    """A block-diagonal complex matrix belonging to a TracedAlgebra.

    Instances are immutable: the stored blocks are copies with the writeable
    flag cleared, so elements can be shared freely between threads.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: TracedAlgebra, blocks: Sequence[np.ndarray]):
        if len(blocks) != algebra.n_blocks:
            raise StructureError(f"expected {algebra.n_blocks} blocks, got {len(blocks)}")
        frozen = []
        for n, b in zip(algebra.block_sizes, blocks):
            arr = np.array(b, dtype=complex, copy=True)
            if arr.shape != (n, n):
                raise StructureError(f"block has shape {arr.shape}, expected {(n, n)}")
            arr.setflags(write=False)
            frozen.append(arr)
        self.algebra = algebra
        self.blocks = tuple(frozen)

    # -- arithmetic ---------------------------------------------------------

    def _require_same_algebra(self, other: "AlgebraElement") -> None:
        if self.algebra != other.algebra:
            raise StructureError("elements belong to different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._require_same_algebra(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._require_same_algebra(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, c: complex) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [complex(c) * a for a in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._require_same_algebra(other)
        return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, [a.conj().T for a in self.blocks])

    @property
    def H(self) -> "AlgebraElement":
        return self.adjoint()

    # -- views --------------------------------------------------------------

    def coords(self) -> np.ndarray:
        """Flatten to a coord_dim vector, block-major and row-major in blocks."""
        return np.concatenate([b.ravel() for b in self.blocks])

    def dense(self) -> np.ndarray:
        """Embed as a dense block-diagonal total_dim x total_dim matrix."""
        n = self.algebra.total_dim
        out = np.zeros((n, n), dtype=complex)
        at = 0
        for b, m in zip(self.blocks, self.algebra.block_sizes):
            out[at:at + m, at:at + m] = b
            at += m
        return out

    @property
    def max_abs_entry(self) -> float:
        return max(float(np.max(np.abs(b))) if b.size else 0.0 for b in self.blocks)

    def __repr__(self) -> str:
        return f"AlgebraElement(blocks={self.algebra.block_sizes}, weights={self.algebra.weights})"

    # -- recomputable predicates ---------------------------------------------

    def _tol(self, tol: float | None) -> float:
        return structure_tol(self.max_abs_entry) if tol is None else tol

    def is_hermitian(self, tol: float | None = None) -> bool:
        t = self._tol(tol)
        return all(np.max(np.abs(b - b.conj().T), initial=0.0) <= t for b in self.blocks)

    def is_psd(self, tol: float | None = None) -> bool:
        if not self.is_hermitian(tol):
            return False
        t = psd_tol(operator_norm(self)) if tol is None else tol
        return all(b.size == 0 or np.linalg.eigvalsh(hermitian_part_of(b)).min() >= -t
                   for b in self.blocks)

    def is_projection(self, tol: float | None = None) -> bool:
        t = self._tol(tol)
        return self.is_hermitian(t) and all(
            np.max(np.abs(b @ b - b), initial=0.0) <= t for b in self.blocks)

    def is_unitary(self, tol: float | None = None) -> bool:
        t = self._tol(tol)
        return all(np.max(np.abs(b.conj().T @ b - np.eye(b.shape[0])), initial=0.0) <= t
                   for b in self.blocks)

    def is_partial_isometry(self, tol: float | None = None) -> bool:
        t = self._tol(tol)
        for b in self.blocks:
            p = b.conj().T @ b
            if np.max(np.abs(p @ p - p), initial=0.0) > t or np.max(np.abs(p - p.conj().T), initial=0.0) > t:
                return False
        return True

    def is_normal(self, tol: float | None = None) -> bool:
        t = self._tol(tol) * (1.0 + self.max_abs_entry)  # commutator scales quadratically
        return all(np.max(np.abs(b @ b.conj().T - b.conj().T @ b), initial=0.0) <= t
                   for b in self.blocks)


class PExponent:
    """An exponent p in [1, inf] together with its conjugate q, 1/p + 1/q = 1."""

    __slots__ = ("value",)

    def __init__(self, value: float):
        v = float(value)
        if math.isnan(v) or v < 1.0:
            raise DomainError(f"p must satisfy 1 <= p <= inf, got {value}")
        self.value = v

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.value)

    @property
    def q(self) -> float:
        """Conjugate exponent; q = inf when p = 1, q = 1 when p = inf."""
        if self.is_inf:
            return 1.0
        if self.value == 1.0:
            return math.inf
        return self.value / (self.value - 1.0)

    def conjugate(self) -> "PExponent":
        return PExponent(self.q)

    def __repr__(self) -> str:
        return f"PExponent({self.value})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PExponent) and self.value == other.value

    def __hash__(self) -> int:
        return hash(("PExponent", self.value))


def as_exponent(p: "PExponent | float | str") -> PExponent:
    if isinstance(p, PExponent):
        return p
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity", "oo"):
            return PExponent(math.inf)
        return PExponent(float(p))
    return PExponent(p)


# -- helpers on raw blocks ----------------------------------------------------

def hermitian_part_of(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.conj().T)


def singular_values(x: AlgebraElement) -> list[np.ndarray]:
    return [np.linalg.svd(b, compute_uv=False) for b in x.blocks]


def eigh_blocks(x: AlgebraElement) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-block hermitian eigendecomposition (W assumed hermitian within tol)."""
    return [np.linalg.eigh(hermitian_part_of(b)) for b in x.blocks]


# -- trace and norms ----------------------------------------------------------

def trace(x: AlgebraElement) -> complex:
    """Weighted trace rho(X) = sum_k w_k Tr(X_k)."""
    return complex(sum(w * np.trace(b) for w, b in zip(x.algebra.weights, x.blocks)))


def operator_norm(x: AlgebraElement) -> float:
    return max((float(s[0]) if s.size else 0.0) for s in singular_values(x))


def schatten_norm(x: AlgebraElement, p: PExponent | float | str) -> float:
    """||X||_p = rho(|X|^p)^(1/p); the operator norm for p = inf."""
    pe = as_exponent(p)
    svals = singular_values(x)
    if pe.is_inf:
        return max((float(s[0]) if s.size else 0.0) for s in svals)
    acc = sum(w * float(np.sum(s ** pe.value)) for w, s in zip(x.algebra.weights, svals))
    return float(acc ** (1.0 / pe.value))


# -- spectral toolkit ----------------------------------------------------------

def polar_decomposition(x: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement]:
    """X = Z |X| with Z a partial isometry whose initial space is range(X*).

    Z*Z is the support projection of |X|; the zero matrix yields Z = 0.
    """
    zs, abss = [], []
    for b in x.blocks:
        u, s, vh = np.linalg.svd(b)
        cut = 1e-12 * (s[0] if s.size else 0.0)
        keep = s > cut
        z = (u[:, keep]) @ (vh[keep, :])
        absb = (vh.conj().T * s) @ vh
        zs.append(z)
        abss.append(hermitian_part_of(absb))
    return AlgebraElement(x.algebra, zs), AlgebraElement(x.algebra, abss)


def support_projection(x: AlgebraElement) -> AlgebraElement:
    """Projection onto range(X*) (equivalently the support of |X|)."""
    z, _ = polar_decomposition(x)
    return z.adjoint() @ z


def spectral_tail_projection(w: AlgebraElement, t: float) -> AlgebraElement:
    """Spectral projection of a PSD element onto eigenvalues strictly above t.

    The returned projection P commutes with W and ||W(I - P)||_inf <= t.
    """
    if not t > 0.0:
        raise DomainError(f"threshold must be positive, got {t}")
    opn = operator_norm(w)
    tol = psd_tol(opn)
    blocks = []
    for b in w.blocks:
        lam, q = np.linalg.eigh(hermitian_part_of(b))
        if lam.size and lam.min() < -tol:
            raise DomainError(f"element is not PSD: min eigenvalue {lam.min():.3e}")
        keep = lam > t
        blocks.append((q[:, keep]) @ (q[:, keep].conj().T))
    return AlgebraElement(w.algebra, blocks)


def functional_calculus(w: AlgebraElement,
                        f: Callable[[np.ndarray], np.ndarray],
                        clip_psd: bool = False) -> AlgebraElement:
    """Q f(diag(lambda)) Q* from the eigendecomposition of a hermitian element.

    ``f`` receives a 1-d array of eigenvalues and must return finite values on
    all of them; with ``clip_psd`` eigenvalues in [-psd_tol, 0) are clipped to 0
    first so that positivity-dependent functions (sqrt, powers) stay real.
    """
    if not w.is_hermitian():
        raise DomainError("functional calculus requires a hermitian element")
    tol = psd_tol(operator_norm(w))
    blocks = []
    for b in w.blocks:
        lam, q = np.linalg.eigh(hermitian_part_of(b))
        if clip_psd:
            lam = np.where((lam < 0.0) & (lam >= -tol), 0.0, lam)
        try:
            with np.errstate(invalid="ignore", divide="ignore"):
                vals = np.asarray(f(lam), dtype=complex)
        except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
            raise DomainError(f"function undefined on the spectrum: {exc}") from exc
        if vals.shape != lam.shape:
            vals = np.broadcast_to(vals, lam.shape)
        if not np.all(np.isfinite(vals)):
            raise DomainError("function returned non-finite values on the spectrum")
        blocks.append((q * vals) @ q.conj().T)
    return AlgebraElement(w.algebra, blocks)


def abs_element(x: AlgebraElement) -> AlgebraElement:
    _, a = polar_decomposition(x)
    return a


def real_imag_parts(x: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement]:
    """Hermitian parts with X = Re X + i Im X exactly."""
    re = AlgebraElement(x.algebra, [0.5 * (b + b.conj().T) for b in x.blocks])
    im = AlgebraElement(x.algebra, [(b - b.conj().T) / 2j for b in x.blocks])
    return re, im


def positive_negative_parts(h: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement]:
    """Jordan decomposition h = h+ - h- with h+ h- = 0, both PSD."""
    pos, neg = [], []
    for b in h.blocks:
        lam, q = np.linalg.eigh(hermitian_part_of(b))
        pos.append((q * np.maximum(lam, 0.0)) @ q.conj().T)
        neg.append((q * np.maximum(-lam, 0.0)) @ q.conj().T)
    return AlgebraElement(h.algebra, pos), AlgebraElement(h.algebra, neg)


def jordan_split(x: AlgebraElement) -> tuple[AlgebraElement, AlgebraElement,
                                             AlgebraElement, AlgebraElement]:
    """Four PSD parts with X = x1 - x2 + i(x3 - x4), x1 x2 = x3 x4 = 0.

    Orthogonal supports give ||x1 - x2||_p = ||x1 + x2||_p for every p, and
    likewise for the imaginary pair.
    """
    re, im = real_imag_parts(x)
    x1, x2 = positive_negative_parts(re)
    x3, x4 = positive_negative_parts(im)
    return x1, x2, x3, x4


# -- pairing checks -------------------------------------------------------------

@dataclass
class HolderReport:
    lhs: float
    rhs: float
    holds: bool
    p: float
    q: float


def holder_check(a: AlgebraElement, b: AlgebraElement, p: PExponent | float) -> HolderReport:
    """Check ||AB||_1 <= ||A||_p ||B||_q."""
    pe = as_exponent(p)
    lhs = schatten_norm(a @ b, 1.0)
    rhs = schatten_norm(a, pe) * schatten_norm(b, pe.q)
    return HolderReport(lhs=lhs, rhs=rhs, holds=lhs <= rhs + 1e-9 * (1.0 + rhs),
                        p=pe.value, q=pe.q)


@dataclass
class TracePairingReport:
    value: complex
    declared: str
    real_part_ok: bool
    imag_part_ok: bool
    tol: float


def trace_pairing_checks(a: AlgebraElement, b: AlgebraElement,
                         declared: str) -> TracePairingReport:
    """rho(AB) for a declared PSD pair (value >= 0) or hermitian pair (value real).

    The declaration is validated against the inputs before the pairing is
    evaluated.
    """
    if declared not in ("psd", "hermitian"):
        raise DomainError(f"declared case must be 'psd' or 'hermitian', got {declared!r}")
    if declared == "psd":
        if not (a.is_psd() and b.is_psd()):
            raise PreconditionError("declared PSD pair but an input is not PSD")
    else:
        if not (a.is_hermitian() and b.is_hermitian()):
            raise PreconditionError("declared hermitian pair but an input is not hermitian")
    val = trace(a @ b)
    tol = 1e-10 * max(schatten_norm(a, 2.0) * schatten_norm(b, 2.0), 1e-300)
    imag_ok = abs(val.imag) <= tol
    real_ok = (val.real >= -tol) if declared == "psd" else True
    return TracePairingReport(value=val, declared=declared,
                              real_part_ok=real_ok, imag_part_ok=imag_ok, tol=tol)


def dual_norm_achiever(a: AlgebraElement, p: PExponent | float) -> tuple[AlgebraElement, float]:
    """B with ||B||_q = 1 and rho(AB) = ||A||_p, for 1 < p < inf.

    Built from the polar decomposition A = u|A| as B = |A|^(p-1) u* / ||A||_p^(p-1).
    """
    pe = as_exponent(p)
    if pe.is_inf or pe.value <= 1.0:
        raise DomainError("dual norm achiever requires 1 < p < inf")
    norm_p = schatten_norm(a, pe)
    if norm_p == 0.0:
        raise DomainError("zero element has no dual norm achiever")
    u, absa = polar_decomposition(a)
    power = functional_calculus(absa, lambda lam: lam ** (pe.value - 1.0), clip_psd=True)
    b = (norm_p ** (1.0 - pe.value)) * (power @ u.adjoint())
    attained = trace(a @ b).real
    return b, float(attained)
