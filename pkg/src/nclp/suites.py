"""Reusable property sweeps over the whole inequality and construction stack.

Each suite runs a deterministic seeded sweep and returns a JSON-ready dict
with a ``violations`` count plus the measured extremes.  The CLI ``check-all``
command and the acceptance tests drive these same functions, only with
different trial counts.
"""

from __future__ import annotations

import math
import time
from typing import Sequence

import numpy as np

from .algebra import (TracedAlgebra, holder_check, operator_norm, schatten_norm,
                      spectral_tail_projection, trace)
from .gns import gns_construct, verify_representation
from .inequalities import check_cs_lp, check_re_im, uncertainty_check
from .kernels import KernelMap, OnePlusXTKernel
from .radius import (OperatorValuedMap, SearchBudget, check_cs_operator_valued,
                     numerical_radius, triple_norm)
from .sampling import (parallel_map, random_complex_matrix, random_element,
                       random_psd, random_psd_with_spectrum, random_unit_vector,
                       rng_from, substreams)
from .sesquilinear import evaluate, random_map
from .star import StarAlgebra, cyclic_group_algebra, matrix_algebra

__all__ = ["target_pool", "commutative_pool", "cs_lp_sweep", "cs_normal_sweep",
           "re_im_sweep", "uncertainty_suite", "pairing_and_holder_suite",
           "tail_projection_suite", "numerical_radius_suite", "triple_norm_suite",
           "operator_valued_suite", "gns_suite", "random_positive_linear_map"]


def target_pool() -> list[TracedAlgebra]:
    """Targets up to total dimension 6, including multi-block weighted traces."""
    return [
        TracedAlgebra([2]),
        TracedAlgebra([3]),
        TracedAlgebra([1, 1], [2.0, 1.0]),
        TracedAlgebra([2, 1], [0.5, 2.0]),
        TracedAlgebra([2, 2], [1.0, 0.75]),
        TracedAlgebra([1, 1, 1], [1.0, 0.5, 0.25]),
        TracedAlgebra([3, 2], [1.0, 0.5]),
        TracedAlgebra([4]),
    ]


def commutative_pool() -> list[TracedAlgebra]:
    return [
        TracedAlgebra([1]),
        TracedAlgebra([1, 1], [1.0, 2.0]),
        TracedAlgebra([1, 1, 1], [0.5, 1.0, 1.5]),
        TracedAlgebra([1, 1, 1, 1], [1.0, 0.25, 2.0, 0.5]),
    ]


def _ratio_against_one(phi, x, y, p) -> tuple[float, dict]:
    rep = check_cs_lp(phi, x, y, p, constant=1.0)
    ratio = rep.ratio if math.isfinite(rep.ratio) else 0.0
    return ratio, {"lhs": rep.lhs, "rhs": rep.rhs, "ratio": ratio,
                   "margin": rep.margin, "status": rep.status}


def cs_lp_sweep(trials: int, p_values: Sequence[float], seed: int = 0,
                pool: Sequence[TracedAlgebra] | None = None,
                max_domain_dim: int = 4, threads: int = 1) -> dict:
    """Cauchy-Schwarz ratios of random certified-positive maps, per exponent.

    Ratios are measured against the constant-1 right-hand side; callers
    compare the recorded maxima with the applicable constant (2 in general,
    sqrt(2) at p = 2, 1 on commutative targets).  Trials run on per-trial
    seed substreams, so the result is independent of the thread count.
    """
    pool = list(pool) if pool is not None else target_pool()
    t0 = time.perf_counter()
    per_p = {}
    for p in p_values:
        streams = substreams(seed + int(round(p * 1000)), trials)

        def one_trial(item: tuple[int, np.random.Generator], p=p) -> tuple[float, dict]:
            t, rng = item
            target = pool[t % len(pool)]
            d = 1 + (t % max_domain_dim)
            rank = 1 + (t % 3)
            phi = random_map(d, target, rank=rank, seed=int(rng.integers(0, 2 ** 62)))
            x = random_unit_vector(rng, d)
            y = random_unit_vector(rng, d)
            return _ratio_against_one(phi, x, y, p)

        outcomes = parallel_map(one_trial, list(enumerate(streams)), threads=threads)
        worst = max(range(trials), key=lambda i: outcomes[i][0])
        per_p[str(p)] = {"max_ratio": outcomes[worst][0], "trials": trials,
                         "worst_report": outcomes[worst][1]}
    return {"name": "cs_lp_sweep", "per_p": per_p,
            "elapsed_s": time.perf_counter() - t0}


def cs_normal_sweep(trials: int, p_values: Sequence[float], seed: int = 0,
                    threads: int = 1) -> dict:
    """Constant-1 ratios on commutative targets (all values normal)."""
    out = cs_lp_sweep(trials, p_values, seed=seed, pool=commutative_pool(),
                      threads=threads)
    out["name"] = "cs_normal_sweep"
    return out


def re_im_sweep(trials: int, seed: int = 0) -> dict:
    """Real/imaginary part estimates at p = 2 on random positive maps."""
    pool = target_pool()
    violations = 0
    worst_margin = math.inf
    for t, rng in enumerate(substreams(seed, trials)):
        target = pool[t % len(pool)]
        d = 1 + (t % 4)
        phi = random_map(d, target, rank=1 + (t % 3), seed=int(rng.integers(0, 2 ** 62)))
        x = random_unit_vector(rng, d)
        y = random_unit_vector(rng, d)
        rep_re, rep_im = check_re_im(phi, x, y)
        for rep in (rep_re, rep_im):
            worst_margin = min(worst_margin, rep.margin)
            if not rep.ok:
                violations += 1
    return {"name": "re_im_sweep", "trials": trials, "violations": violations,
            "worst_margin": worst_margin}


# -- uncertainty -------------------------------------------------------------------

def uncertainty_suite(seed: int = 0, grid_points: int = 41) -> dict:
    """Kernel-map uncertainty instance with its closed-form gamma and Delta.

    W = diag(1, 2), k(x, t) = 1 + x t, T = I on M_2 with a = sigma_x and
    b = sigma_y gives gamma = sqrt(20) and Delta_a(0) Delta_b(0) = sqrt(89);
    commuting a, b force gamma = 0.
    """
    alg = TracedAlgebra([2])
    km = KernelMap(alg.diagonal([1.0, 2.0]), OnePlusXTKernel())
    phi = km.as_sesquilinear()
    sigma_x = np.array([0, 1, 1, 0], dtype=complex)
    sigma_y = np.array([0, -1j, 1j, 0], dtype=complex)
    grid = list(np.linspace(-3.0, 3.0, grid_points))
    reports = uncertainty_check(phi, sigma_x, sigma_y, grid, grid)
    at_zero = min(reports, key=lambda r: abs(r.lam) + abs(r.mu))
    gamma = reports[0].gamma
    bound_failures = sum(0 if r.bound_ok else 1 for r in reports)
    min_product = min(r.delta_a * r.delta_b for r in reports)
    # commuting pair: a = sigma_z, b = diag(1, 2) commute, so gamma must vanish
    sigma_z = np.array([1, 0, 0, -1], dtype=complex)
    diag12 = np.array([1, 0, 0, 2], dtype=complex)
    commuting = uncertainty_check(phi, sigma_z, diag12, [0.0], [0.0])[0]
    return {"name": "uncertainty_suite",
            "gamma": gamma, "gamma_expected": math.sqrt(20.0),
            "delta_product_at_zero": at_zero.delta_a * at_zero.delta_b,
            "delta_product_expected": math.sqrt(89.0),
            "grid_points": len(reports), "bound_failures": bound_failures,
            "min_delta_product": min_product,
            "half_gamma": 0.5 * gamma,
            "commutator_residual": reports[0].commutator_residual,
            "k_hermitian_defect": reports[0].k_hermitian_defect,
            "commuting_gamma": commuting.gamma}


# -- trace pairing, Hoelder, tail projections ------------------------------------------

def pairing_and_holder_suite(trials: int, seed: int = 0,
                             p_values: Sequence[float] = (1.0, 1.5, 2.0, 3.0, math.inf)
                             ) -> dict:
    """rho(AB) positivity/realness for PSD pairs and the Hoelder inequality.

    Inputs are normalised to ||.||_2 = 1 so the absolute tolerances 1e-10
    (pairing) and 1e-9 (Hoelder) are meaningful.
    """
    pool = target_pool()
    worst_re = math.inf
    worst_im = 0.0
    holder_violations = 0
    worst_holder_margin = math.inf
    for t, rng in enumerate(substreams(seed, trials)):
        alg = pool[t % len(pool)]
        a = random_psd(alg, rng)
        b = random_psd(alg, rng)
        a = (1.0 / schatten_norm(a, 2.0)) * a
        b = (1.0 / schatten_norm(b, 2.0)) * b
        val = trace(a @ b)
        worst_re = min(worst_re, val.real)
        worst_im = max(worst_im, abs(val.imag))
        g = random_element(alg, rng)
        h = random_element(alg, rng)
        g = (1.0 / schatten_norm(g, 2.0)) * g
        h = (1.0 / schatten_norm(h, 2.0)) * h
        for p in p_values:
            rep = holder_check(g, h, p)
            worst_holder_margin = min(worst_holder_margin, rep.rhs - rep.lhs)
            if rep.lhs > rep.rhs + 1e-9:
                holder_violations += 1
    return {"name": "pairing_and_holder", "trials": trials,
            "worst_re": worst_re, "worst_im": worst_im,
            "holder_violations": holder_violations,
            "worst_holder_margin": worst_holder_margin}


def tail_projection_suite(trials: int, seed: int = 0,
                          p_values: Sequence[float] = (1.5, 2.0, 3.0),
                          n_max: int = 8) -> dict:
    """||W (I - P_{1/n})||_p is nonincreasing in n and hits 0 past the spectrum.

    Random PSD anchors carry controlled spectra: eigenvalues are either exact
    zeros or lie in [0.25, 3], so 1/n < 0.25 guarantees the tail vanishes.
    """
    pool = target_pool()
    monotone_failures = 0
    final_nonzero = 0
    worst_final = 0.0
    for t, rng in enumerate(substreams(seed, trials)):
        alg = pool[t % len(pool)]
        spectrum = [0.0 if rng.random() < 0.3 else float(rng.uniform(0.25, 3.0))
                    for _ in range(alg.total_dim)]
        w = random_psd_with_spectrum(alg, rng, spectrum)
        ident = alg.identity()
        for p in p_values:
            prev = math.inf
            last = math.inf
            for n in range(1, n_max + 1):
                proj = spectral_tail_projection(w, 1.0 / n)
                val = schatten_norm(w @ (ident - proj), p)
                if val > prev + 1e-12 * (1.0 + prev):
                    monotone_failures += 1
                prev = val
                last = val
            worst_final = max(worst_final, last)
            if last > 1e-12 * (1.0 + operator_norm(w)):
                final_nonzero += 1
    return {"name": "tail_projection", "trials": trials,
            "monotone_failures": monotone_failures,
            "final_nonzero": final_nonzero, "worst_final": worst_final}


# -- numerical radius and the L^2 radius norm -------------------------------------------

def numerical_radius_suite(trials: int, seed: int = 0) -> dict:
    """w on the shift block, the operator-norm sandwich and the hermitian case."""
    shift = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    w_shift = numerical_radius(shift)
    sandwich_failures = 0
    hermitian_defect = 0.0
    unitary_defect = 0.0
    for t, rng in enumerate(substreams(seed, trials)):
        n = 2 + (t % 4)
        m = random_complex_matrix(rng, n, n)
        wm = numerical_radius(m)
        opn = float(np.linalg.svd(m, compute_uv=False)[0])
        if not (0.5 * opn - 1e-9 * (1.0 + opn) <= wm <= opn + 1e-9 * (1.0 + opn)):
            sandwich_failures += 1
        h = 0.5 * (m + m.conj().T)
        wh = numerical_radius(h)
        spectral_radius = float(np.max(np.abs(np.linalg.eigvalsh(h))))
        hermitian_defect = max(hermitian_defect, abs(wh - spectral_radius))
        # invariance under * and unitary conjugation
        wadj = numerical_radius(m.conj().T)
        q = np.linalg.qr(random_complex_matrix(rng, n, n))[0]
        wconj = numerical_radius(q @ m @ q.conj().T)
        unitary_defect = max(unitary_defect, abs(wadj - wm), abs(wconj - wm))
    return {"name": "numerical_radius", "trials": trials,
            "w_shift": w_shift, "sandwich_failures": sandwich_failures,
            "hermitian_defect": hermitian_defect, "unitary_defect": unitary_defect}


def triple_norm_suite(samples: int, seed: int = 0,
                      budget: SearchBudget | None = None) -> dict:
    """Exact anchors, the w(F) <= value <= ||F||_2 sandwich, and the
    constant-1 Cauchy-Schwarz in the radius norm on random positive maps."""
    budget = budget or SearchBudget(starts=4, iters=25, seed=seed)
    tr2 = TracedAlgebra([2])
    anchor_a = triple_norm(tr2.diagonal([1.0, 0.0]), budget)
    anchor_b = triple_norm(tr2.identity(), budget)
    algebras = [TracedAlgebra([2]), TracedAlgebra([3]), TracedAlgebra([4])]
    sandwich_failures = 0
    worst_low = math.inf
    worst_high = -math.inf
    for t, rng in enumerate(substreams(seed + 1, samples)):
        alg = algebras[t % len(algebras)]
        f = random_element(alg, rng)
        res = triple_norm(f, budget)
        wf = numerical_radius(f, grid=512)
        up = schatten_norm(f, 2.0)
        worst_low = min(worst_low, res.value - wf)
        worst_high = max(worst_high, res.value - up)
        if not (wf - 1e-6 <= res.value <= up + 1e-9):
            sandwich_failures += 1
    cs_failures = 0
    worst_cs = -math.inf
    for t, rng in enumerate(substreams(seed + 2, samples)):
        alg = algebras[t % len(algebras)]
        d = 1 + (t % 3)
        phi = random_map(d, alg, rank=1 + (t % 2), seed=int(rng.integers(0, 2 ** 62)))
        x = random_unit_vector(rng, d)
        y = random_unit_vector(rng, d)
        lhs = triple_norm(evaluate(phi, x, y), budget, quick=True).value
        rx = triple_norm(evaluate(phi, x, x), budget)      # PSD: exact knapsack
        ry = triple_norm(evaluate(phi, y, y), budget)
        rhs = math.sqrt(max(rx.value, 0.0)) * math.sqrt(max(ry.value, 0.0))
        worst_cs = max(worst_cs, lhs - rhs)
        if lhs > rhs + 1e-6:
            cs_failures += 1
    return {"name": "triple_norm", "anchor_diag10": anchor_a.value,
            "anchor_identity": anchor_b.value,
            "anchor_statuses": [anchor_a.status, anchor_b.status],
            "samples": samples, "sandwich_failures": sandwich_failures,
            "worst_low": worst_low, "worst_high": worst_high,
            "cs_failures": cs_failures, "worst_cs_excess": worst_cs}


# -- operator-valued Cauchy-Schwarz -------------------------------------------------

def random_operator_valued(source: TracedAlgebra, target_dim: int, d: int,
                           rank: int, seed: int) -> OperatorValuedMap:
    rng = rng_from(seed)
    factors = [[random_complex_matrix(rng, target_dim, source.total_dim)
                for _ in range(d)] for _ in range(rank)]
    return OperatorValuedMap.from_generator(source, factors)


def operator_valued_suite(instances: int, seed: int = 0, starts: int = 64,
                          target_norms: Sequence[str] = ("nr", "triple2"),
                          iters: int = 12) -> dict:
    """Generator-form sweeps of the operator-norm Cauchy-Schwarz inequality.

    d = 1 instances must come out with ratio exactly 1 (the norms factor);
    higher-dimensional instances are checked at matched budgets with
    automatic escalation on any flagged violation.
    """
    out: dict = {"name": "operator_valued", "instances": instances, "starts": starts}
    exact_defect = 0.0
    for t, rng in enumerate(substreams(seed, 8)):
        source = TracedAlgebra([2]) if t % 2 == 0 else TracedAlgebra([2, 1], [1.0, 0.5])
        phi = random_operator_valued(source, 2, 1, 1 + t % 2,
                                     int(rng.integers(0, 2 ** 62)))
        a = complex(rng.standard_normal() + 1j * rng.standard_normal())
        scale = float(rng.uniform(0.5, 2.0))
        rep = check_cs_operator_valued(phi, np.array([a]), np.array([scale * a]),
                                       "nr", SearchBudget(starts=8, iters=8, seed=seed))
        exact_defect = max(exact_defect, abs(rep.ratio - 1.0))
    out["d1_ratio_defect"] = exact_defect
    for norm in target_norms:
        violations = 0
        escalations = 0
        max_ratio = 0.0
        for t, rng in enumerate(substreams(seed + 17, instances)):
            source = TracedAlgebra([2]) if t % 2 == 0 else TracedAlgebra([3])
            n = 2 if t % 2 == 0 else 3
            d = 2 + (t % 2)
            phi = random_operator_valued(source, n, d, 1 + (t % 2),
                                         int(rng.integers(0, 2 ** 62)))
            x = random_unit_vector(rng, d)
            y = random_unit_vector(rng, d)
            rep = check_cs_operator_valued(
                phi, x, y, norm, SearchBudget(starts=starts, iters=iters, seed=seed + t))
            if rep.witness.get("escalated"):
                escalations += 1
            if math.isfinite(rep.ratio):
                max_ratio = max(max_ratio, rep.ratio)
            if rep.status == "violated":
                violations += 1
        out[norm] = {"violations": violations, "escalations": escalations,
                     "max_ratio": max_ratio}
    return out


# -- GNS ------------------------------------------------------------------------------

def random_positive_linear_map(domain: StarAlgebra, target: TracedAlgebra,
                               rank: int, rng: np.random.Generator) -> list:
    """omega(a) = sum_r B_r* L(a) B_r blockwise, positive by construction.

    L is left multiplication in basis coordinates; both builtin domains make
    L(a*) = L(a)* (matrix units are Hilbert-Schmidt orthonormal, the cyclic
    shift is unitary), so omega(a* a) is PSD.
    """
    d = domain.dim
    bs = [[random_complex_matrix(rng, d, n) for n in target.block_sizes]
          for _ in range(rank)]
    values = []
    for i in range(d):
        lam = domain.left_mult_matrix(domain.basis_vector(i))
        blocks = []
        for kb in range(len(target.block_sizes)):
            acc = sum(bs[r][kb].conj().T @ lam @ bs[r][kb] for r in range(rank))
            blocks.append(acc)
        values.append(target.element(blocks))
    return values


def gns_suite(per_domain: int, seed: int = 0) -> dict:
    """Random positive linear maps on the builtin domains plus exact anchors."""
    scal = TracedAlgebra([1])
    m2 = matrix_algebra(2)
    domains = [("matrix_algebra(2)", m2, TracedAlgebra([2])),
               ("matrix_algebra(3)", matrix_algebra(3), TracedAlgebra([1])),
               ("cyclic_group_algebra(4)", cyclic_group_algebra(4), TracedAlgebra([2]))]
    worst = {"reconstruction": 0.0, "multiplicativity": 0.0, "adjointness": 0.0}
    cyclic_failures = 0
    count = 0
    for name, dom, target in domains:
        for rng in substreams(seed + dom.dim, per_domain):
            omega = random_positive_linear_map(dom, target, rank=2, rng=rng)
            rep = gns_construct(omega, dom, target)
            vr = verify_representation(rep, trials=20, seed=int(rng.integers(0, 2 ** 62)))
            worst["reconstruction"] = max(worst["reconstruction"], rep.residuals["reconstruction"],
                                          vr.reconstruction)
            worst["multiplicativity"] = max(worst["multiplicativity"],
                                            rep.residuals["multiplicativity"],
                                            vr.multiplicativity)
            worst["adjointness"] = max(worst["adjointness"], rep.residuals["adjointness"],
                                       vr.adjointness)
            if not vr.cyclic:
                cyclic_failures += 1
            count += 1
    # exact anchors: omega(a) = a_11 has quotient dim 2; the algebra trace is faithful
    omega_a11 = [scal.element([np.array([[1.0 if i == 0 else 0.0]], dtype=complex)])
                 for i in range(4)]
    rep_a11 = gns_construct(omega_a11, m2, scal)
    omega_tr = [scal.element([np.array([[1.0 if i in (0, 3) else 0.0]], dtype=complex)])
                for i in range(4)]
    rep_tr = gns_construct(omega_tr, m2, scal)
    return {"name": "gns", "instances": count, "worst": worst,
            "cyclic_failures": cyclic_failures,
            "a11_quotient_dim": rep_a11.quotient_dim,
            "trace_quotient_dim": rep_tr.quotient_dim}
