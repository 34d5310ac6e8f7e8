"""GNS-type representations from left-invariant positive sesquilinear maps.

Given a positive hermitian map ``Phi`` on a finite unital *-algebra (or a
positive linear map ``omega`` via ``Phi(x, y) = omega(y* x)``), the
construction computes

* the null space N = {x : Phi(x, x) = 0}, found as the kernel of the scalar
  gram ``S[a,b] = rho(Phi(e_b, e_a))`` (faithfulness of the trace makes
  ``rho(Phi(x,x)) = 0`` equivalent to ``Phi(x,x) = 0``),
* an S-orthonormal frame for the quotient, built by rank-revealing pivoted
  Gram-Schmidt so that rescaling Phi leaves the frame direction choices and
  hence the representation matrices unchanged,
* the representation pi(a) Lambda(b) = Lambda(a b) as matrices on the frame,
  with cyclic vector Lambda(e),
* residuals of adjointness, multiplicativity, cyclicity and of the
  reconstruction identity Phi(a, b) = <pi(a) xi, pi(b) xi>_Phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, TracedAlgebra, as_exponent, schatten_norm
from .errors import ConditioningError, InconsistencyError, PreconditionError
from .sampling import rng_from
from .sesquilinear import (SesquilinearMap, check_left_invariance, check_positivity,
                           evaluate, from_linear_map, scalar_gram)
from .star import StarAlgebra

__all__ = ["GnsRepresentation", "null_space", "gns_construct", "verify_representation",
           "VerificationReport"]

KERNEL_THRESHOLD = 1e-10
GAP_CEILING = 1e-6
INVARIANCE_TOL = 1e-8


def _hermitian_scalar_gram(phi: SesquilinearMap) -> np.ndarray:
    s = scalar_gram(phi)
    defect = float(np.max(np.abs(s - s.conj().T), initial=0.0))
    scale = 1.0 + float(np.max(np.abs(s), initial=0.0))
    if defect > 1e-9 * scale:
        raise InconsistencyError(
            f"scalar gram is not hermitian (defect {defect:.3e}); map must be hermitian")
    return 0.5 * (s + s.conj().T)


def null_space(phi: SesquilinearMap) -> np.ndarray:
    """Orthonormal basis (columns) of N_Phi = {x : Phi(x, x) = 0}.

    Computed as the kernel of the scalar gram by eigenvalue thresholding at
    1e-10 * lambda_max; each basis vector is post-verified to annihilate the
    map.  Eigenvalues inside (1e-10, 1e-6) * lambda_max abort with a
    conditioning error because the null-space decision would be ambiguous.
    """
    s = _hermitian_scalar_gram(phi)
    lam, q = np.linalg.eigh(s)
    lam_max = float(lam[-1]) if lam.size else 0.0
    if lam_max <= 0.0:
        return np.eye(phi.domain_dim, dtype=complex)
    thr = KERNEL_THRESHOLD * lam_max
    in_gap = (lam > thr) & (lam < GAP_CEILING * lam_max)
    if np.any(in_gap):
        raise ConditioningError(
            "scalar gram has eigenvalues in the ambiguous band "
            f"({thr:.3e}, {GAP_CEILING * lam_max:.3e}); refusing to pick a kernel")
    kernel = q[:, lam <= thr]
    scale = 1.0 + max(schatten_norm(g, 2.0) for row in phi.gram for g in row)
    for v in kernel.T:
        resid = schatten_norm(evaluate(phi, v, v), 2.0)
        if resid > 1e-8 * scale:
            raise InconsistencyError(
                f"kernel vector of the scalar gram does not annihilate the map ({resid:.3e})")
    return kernel


def _pivoted_frame(s: np.ndarray, kernel: np.ndarray, rank: int) -> np.ndarray:
    """S-orthonormal frame (columns) spanning the quotient, deterministic pivots.

    Standard basis vectors are projected off the kernel, then chosen greedily
    by largest remaining S-norm (ties resolved by lowest index) and
    orthonormalized in the S-inner product <u, v>_S = v* S u.
    """
    d = s.shape[0]
    proj_kernel = kernel @ kernel.conj().T if kernel.size else np.zeros((d, d))
    pool = [np.eye(d, dtype=complex)[:, i] - proj_kernel @ np.eye(d, dtype=complex)[:, i]
            for i in range(d)]
    frame: list[np.ndarray] = []

    def s_ip(u: np.ndarray, v: np.ndarray) -> complex:
        return complex(v.conj() @ (s @ u))

    for _ in range(rank):
        norms = [max(s_ip(u, u).real, 0.0) for u in pool]
        pick = int(np.argmax(norms))
        u = pool[pick]
        n = np.sqrt(norms[pick])
        if n <= 0.0:
            raise ConditioningError("frame construction ran out of independent directions")
        f = u / n
        frame.append(f)
        pool = [v - s_ip(v, f) * f for v in pool]
        # one re-orthogonalization pass for numerical stability
        pool = [v - s_ip(v, f) * f for v in pool]
    return np.stack(frame, axis=1)


@dataclass
class GnsRepresentation:
    domain: StarAlgebra
    target: TracedAlgebra
    phi: SesquilinearMap
    null_basis: np.ndarray            # (d, d - r), euclidean-orthonormal columns
    quotient_frame: np.ndarray        # (d, r), S-orthonormal columns
    pi: tuple[np.ndarray, ...]        # matrices of pi(e_i) on the frame
    cyclic: np.ndarray                # frame coordinates of Lambda(e)
    p: float
    residuals: dict = field(default_factory=dict)

    @property
    def quotient_dim(self) -> int:
        return self.quotient_frame.shape[1]

    def pi_of(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=complex).ravel()
        out = np.zeros((self.quotient_dim, self.quotient_dim), dtype=complex)
        for c, m in zip(coords, self.pi):
            if c != 0:
                out = out + c * m
        return out

    def class_coords(self, frame_vec: np.ndarray) -> np.ndarray:
        """Algebra coordinates of a representative of the given frame vector."""
        return self.quotient_frame @ np.asarray(frame_vec, dtype=complex).ravel()

    def lambda_norm(self, coords: np.ndarray) -> float:
        """||Lambda(a)||_Phi = ||Phi(a, a)||_p^(1/2), the quotient quasi-norm."""
        return float(np.sqrt(max(schatten_norm(
            evaluate(self.phi, coords, coords), self.p), 0.0)))


def gns_construct(source: Sequence[AlgebraElement] | SesquilinearMap,
                  domain: StarAlgebra, target: TracedAlgebra,
                  p: float | str = 2.0,
                  positivity_trials: int = 256, seed: int = 0) -> GnsRepresentation:
    """Build the cyclic representation of a positive linear map or invariant Phi.

    ``source`` is either the list of values ``omega(e_i)`` of a positive
    linear map (turned into ``Phi(x,y) = omega(y* x)``, left-invariant by
    construction) or an already-assembled left-invariant SesquilinearMap over
    ``domain``.
    """
    pe = as_exponent(p)
    if isinstance(source, SesquilinearMap):
        phi = source
        if phi.domain_algebra is None or phi.domain_algebra.dim != domain.dim:
            raise PreconditionError("map must carry the StarAlgebra domain")
        resid = check_left_invariance(phi)
        if resid > INVARIANCE_TOL:
            raise PreconditionError(f"map is not left-invariant: residual {resid:.3e}")
    else:
        phi = from_linear_map(list(source), domain, target)
    cert = check_positivity(phi, trials=positivity_trials, seed=seed)
    if cert.status == "violated":
        raise PreconditionError(
            f"map failed positivity sampling (min eig {cert.witness_min_eig:.3e})")

    s = _hermitian_scalar_gram(phi)
    kernel = null_space(phi)
    d = domain.dim
    rank = d - kernel.shape[1]

    if rank == 0:
        rep = GnsRepresentation(domain=domain, target=target, phi=phi,
                                null_basis=kernel,
                                quotient_frame=np.zeros((d, 0), dtype=complex),
                                pi=tuple(np.zeros((0, 0), dtype=complex) for _ in range(d)),
                                cyclic=np.zeros(0, dtype=complex), p=pe.value)
        rep.residuals = {"reconstruction": 0.0, "multiplicativity": 0.0,
                         "adjointness": 0.0, "cyclicity_rank": 0,
                         "invariance": 0.0}
        return rep

    frame = _pivoted_frame(s, kernel, rank)

    def s_coords(vec: np.ndarray) -> np.ndarray:
        """Frame coordinates of Lambda(vec): <vec, f_b>_S = f_b* S vec."""
        return frame.conj().T @ (s @ vec)

    pi = []
    for i in range(d):
        cols = []
        for c in range(rank):
            prod = domain.multiply(domain.basis_vector(i), frame[:, c])
            cols.append(s_coords(prod))
        pi.append(np.stack(cols, axis=1))
    xi = s_coords(domain.unit)

    rep = GnsRepresentation(domain=domain, target=target, phi=phi, null_basis=kernel,
                            quotient_frame=frame, pi=tuple(pi), cyclic=xi, p=pe.value)
    rep.residuals = _residuals(rep)
    return rep


def _residuals(rep: GnsRepresentation) -> dict:
    domain, phi = rep.domain, rep.phi
    d = domain.dim
    r = rep.quotient_dim
    scale = 1.0 + max(schatten_norm(g, 2.0) for row in phi.gram for g in row)

    recon = 0.0
    vecs = [rep.class_coords(rep.pi[i] @ rep.cyclic) for i in range(d)]
    for i in range(d):
        for j in range(d):
            lhs = phi.gram[i][j]
            rhs = evaluate(phi, vecs[i], vecs[j])
            recon = max(recon, schatten_norm(lhs - rhs, 2.0) / scale)

    mult = 0.0
    adjoint = 0.0
    pscale = 1.0 + max(float(np.max(np.abs(m), initial=0.0)) for m in rep.pi)
    for i in range(d):
        star = rep.pi_of(domain.involute(domain.basis_vector(i)))
        adjoint = max(adjoint, float(np.max(np.abs(star - rep.pi[i].conj().T),
                                            initial=0.0)) / pscale)
        for j in range(d):
            prod = rep.pi_of(domain.multiply(domain.basis_vector(i),
                                             domain.basis_vector(j)))
            mult = max(mult, float(np.max(np.abs(prod - rep.pi[i] @ rep.pi[j]),
                                          initial=0.0)) / (pscale * pscale))

    span = np.stack([rep.pi[i] @ rep.cyclic for i in range(d)], axis=1) if r else \
        np.zeros((0, d))
    cyc_rank = int(np.linalg.matrix_rank(span, tol=1e-10 * (1.0 + float(
        np.max(np.abs(span), initial=0.0))))) if r else 0

    inv = check_left_invariance(phi)
    return {"reconstruction": recon, "multiplicativity": mult, "adjointness": adjoint,
            "cyclicity_rank": cyc_rank, "invariance": inv}


@dataclass
class VerificationReport:
    trials: int
    reconstruction: float
    multiplicativity: float
    adjointness: float
    cyclic_span_dim: int
    quotient_dim: int

    @property
    def cyclic(self) -> bool:
        return self.cyclic_span_dim == self.quotient_dim


def verify_representation(rep: GnsRepresentation, trials: int = 50,
                          seed: int = 0) -> VerificationReport:
    """Residuals of the representation identities on random algebra elements."""
    rng = rng_from(seed)
    d = rep.domain.dim
    phi = rep.phi
    scale = 1.0 + max(schatten_norm(g, 2.0) for row in phi.gram for g in row)
    recon = mult = adj = 0.0
    for _ in range(max(trials, 1)):
        a = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        b = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        pa, pb = rep.pi_of(a), rep.pi_of(b)
        pscale = 1.0 + float(np.max(np.abs(pa), initial=0.0)) \
            + float(np.max(np.abs(pb), initial=0.0))
        ab = rep.domain.multiply(a, b)
        mult = max(mult, float(np.max(np.abs(rep.pi_of(ab) - pa @ pb), initial=0.0))
                   / (pscale * pscale))
        adj = max(adj, float(np.max(np.abs(rep.pi_of(rep.domain.involute(a))
                                           - pa.conj().T), initial=0.0)) / pscale)
        va = rep.class_coords(pa @ rep.cyclic)
        vb = rep.class_coords(pb @ rep.cyclic)
        diff = evaluate(phi, a, b) - evaluate(phi, va, vb)
        norm_ab = 1.0 + float(np.linalg.norm(a)) * float(np.linalg.norm(b))
        recon = max(recon, schatten_norm(diff, 2.0) / (scale * norm_ab))
    span = np.stack([rep.pi[i] @ rep.cyclic for i in range(d)], axis=1) \
        if rep.quotient_dim else np.zeros((0, d))
    span_dim = int(np.linalg.matrix_rank(span, tol=1e-10 * (1.0 + float(
        np.max(np.abs(span), initial=0.0))))) if rep.quotient_dim else 0
    return VerificationReport(trials=trials, reconstruction=recon, multiplicativity=mult,
                              adjointness=adj, cyclic_span_dim=span_dim,
                              quotient_dim=rep.quotient_dim)
