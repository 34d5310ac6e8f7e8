import numpy as np
import pytest

from nclp.algebra import TracedAlgebra, schatten_norm, trace
from nclp.errors import PreconditionError, StructureError
from nclp.sesquilinear import (SesquilinearMap, check_left_invariance,
                               check_positivity, evaluate, from_linear_map,
                               random_map, scalar_gram)
from nclp.star import matrix_algebra


@pytest.fixture
def kraus_map(tr2):
    return random_map(3, tr2, rank=2, seed=11)


class TestEvaluate:
    def test_basis_evaluation(self, kraus_map):
        x = np.array([0, 1, 0])
        y = np.array([0, 0, 1])
        val = evaluate(kraus_map, x, y)
        assert np.allclose(val.blocks[0], kraus_map.gram[1][2].blocks[0])

    def test_zero_vector(self, kraus_map):
        val = evaluate(kraus_map, np.zeros(3), np.ones(3))
        assert np.allclose(val.blocks[0], 0)

    def test_diagonal_psd(self, kraus_map, rng):
        for _ in range(25):
            x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            assert evaluate(kraus_map, x, x).is_psd()

    def test_sesquilinearity(self, kraus_map, rng):
        x1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        x2 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        y = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        a, b = 1.3 - 0.2j, -0.7 + 2.1j
        lhs = evaluate(kraus_map, a * x1 + b * x2, y)
        rhs = a * evaluate(kraus_map, x1, y) + b * evaluate(kraus_map, x2, y)
        assert np.allclose(lhs.blocks[0], rhs.blocks[0], atol=1e-10)
        lhs2 = evaluate(kraus_map, y, a * x1)
        rhs2 = np.conj(a) * evaluate(kraus_map, y, x1)
        assert np.allclose(lhs2.blocks[0], rhs2.blocks[0], atol=1e-10)

    def test_dimension_mismatch(self, kraus_map):
        with pytest.raises(StructureError):
            evaluate(kraus_map, np.ones(2), np.ones(3))

    def test_hermitian_kraus_1000(self, kraus_map, rng):
        for _ in range(1000):
            x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            y = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            lhs = evaluate(kraus_map, y, x)
            rhs = evaluate(kraus_map, x, y).adjoint()
            assert np.allclose(lhs.blocks[0], rhs.blocks[0], atol=1e-10)

    def test_polarization(self, kraus_map, rng):
        x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        y = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        acc = kraus_map.target.zero()
        for k in range(4):
            z = x + (1j ** k) * y
            acc = acc + (1j ** k) * evaluate(kraus_map, z, z)
        assert np.allclose((0.25 * acc).blocks[0],
                           evaluate(kraus_map, x, y).blocks[0], atol=1e-10)


class TestPositivity:
    def test_kraus_certified(self, kraus_map):
        cert = check_positivity(kraus_map)
        assert cert.status == "certified"

    def test_scalar_counterexample(self):
        alg = TracedAlgebra([2])
        gram = [[alg.diagonal([1.0, -1.0])]]
        cert = check_positivity(SesquilinearMap(alg, gram), trials=16, seed=0)
        assert cert.status == "violated"
        assert cert.witness is not None
        assert cert.witness_min_eig < 0

    def test_block_psd_sufficient(self, tr2, rng):
        # gram of a Kraus map, with the generator stripped
        phi = random_map(2, tr2, rank=2, seed=3)
        bare = SesquilinearMap(tr2, [list(r) for r in phi.gram])
        cert = check_positivity(bare)
        assert cert.status == "certified"
        assert "block gram" in cert.reason

    def test_gram_generator_consistency_enforced(self, tr2):
        phi = random_map(2, tr2, rank=1, seed=4)
        bad = [list(row) for row in phi.gram]
        bad[0][0] = bad[0][0] + tr2.identity()
        from nclp.errors import InconsistencyError
        with pytest.raises(InconsistencyError):
            SesquilinearMap(tr2, bad, generator=phi.generator)

    def test_kraus_entry_formula(self, tr2, rng):
        # Phi(x, y) must equal sum_r T_r(x) C_r T_r(y)*
        phi = random_map(2, tr2, rank=2, seed=9)
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        acc = tr2.zero()
        for f in phi.generator:
            acc = acc + f.apply(x) @ f.middle @ f.apply(y).adjoint()
        assert np.allclose(acc.blocks[0], evaluate(phi, x, y).blocks[0], atol=1e-9)


class TestLeftInvariance:
    def test_trace_form_invariant(self):
        # Phi(a, b) = tr~(b* a) * F0 is left-invariant by trace cyclicity
        dom = matrix_algebra(2)
        target = TracedAlgebra([2])
        f0 = target.diagonal([1.0, 2.0])
        hs = np.eye(4)      # tr~(e_j* e_i) = HS inner product of matrix units
        gram = [[complex(hs[i, j]) * f0 for j in range(4)] for i in range(4)]
        phi = SesquilinearMap(target, gram, domain_algebra=dom)
        assert check_left_invariance(phi) <= 1e-12

    def test_functional_square_not_invariant(self):
        # Phi(a, b) = omega(a) conj(omega(b)) F0 with non-multiplicative omega
        dom = matrix_algebra(2)
        target = TracedAlgebra([1])
        f0 = target.identity()
        w = np.array([1.0, 0.5, 0.25, -1.0], dtype=complex)  # not a homomorphism
        gram = [[complex(w[i] * np.conj(w[j])) * f0 for j in range(4)]
                for i in range(4)]
        phi = SesquilinearMap(target, gram, domain_algebra=dom)
        assert check_left_invariance(phi) > 1e-3

    def test_from_linear_map_invariant(self, rng):
        dom = matrix_algebra(2)
        target = TracedAlgebra([2, 1], [1.0, 0.5])
        from nclp.suites import random_positive_linear_map
        omega = random_positive_linear_map(dom, target, rank=2, rng=rng)
        phi = from_linear_map(omega, dom, target)
        assert check_left_invariance(phi) <= 1e-12
        # gram-only maps may fall back to sampling; they must never be violated
        assert check_positivity(phi).status in ("certified", "sampled")

    def test_requires_domain(self, kraus_map):
        with pytest.raises(PreconditionError):
            check_left_invariance(kraus_map)


class TestRandomMap:
    def test_deterministic(self, tr2):
        a = random_map(2, tr2, rank=2, seed=42)
        b = random_map(2, tr2, rank=2, seed=42)
        for i in range(2):
            for j in range(2):
                assert np.array_equal(a.gram[i][j].blocks[0], b.gram[i][j].blocks[0])

    def test_rank_one_scalar_domain(self, tr2):
        phi = random_map(1, tr2, rank=1, seed=0)
        f = phi.generator[0]
        expected = f.coeffs[0] @ f.middle @ f.coeffs[0].adjoint()
        assert np.allclose(phi.gram[0][0].blocks[0], expected.blocks[0])

    def test_scaling_keeps_structure(self, kraus_map):
        doubled = kraus_map.scaled(2.0)
        assert check_positivity(doubled).status == "certified"
        assert np.allclose(doubled.gram[1][2].blocks[0],
                           2.0 * kraus_map.gram[1][2].blocks[0])


class TestScalarGram:
    def test_matches_trace_of_map(self, kraus_map, rng):
        s = scalar_gram(kraus_map)
        for _ in range(20):
            x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            y = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            direct = trace(evaluate(kraus_map, x, y))
            via_s = complex(y.conj() @ (s @ x))
            assert direct == pytest.approx(via_s, abs=1e-9)

    def test_null_space_coincidence(self):
        # degenerate map: {x: Phi(x,x)=0} found via the scalar gram must also
        # satisfy Phi(x, y) = 0 for every y (the two null-space descriptions
        # coincide under the generalized Cauchy-Schwarz inequality)
        alg = TracedAlgebra([2])
        dom = matrix_algebra(2)
        scal = TracedAlgebra([1])
        omega = [scal.element([np.array([[1.0 if i == 0 else 0.0]])]) for i in range(4)]
        phi = from_linear_map(omega, dom, scal)
        s = scalar_gram(phi)
        lam, q = np.linalg.eigh(0.5 * (s + s.conj().T))
        kernel = q[:, lam <= 1e-10 * lam[-1]]
        assert kernel.shape[1] == 2
        for v in kernel.T:
            assert schatten_norm(evaluate(phi, v, v), 2.0) <= 1e-12
            for j in range(4):
                ej = np.eye(4)[:, j]
                assert schatten_norm(evaluate(phi, v, ej), 2.0) <= 1e-12

    def test_random_map_profile_certified(self):
        phi = random_map(4, TracedAlgebra([3]), rank=3, seed=21)
        assert check_positivity(phi).status == "certified"
        rng = np.random.default_rng(2)
        for _ in range(100):
            x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            assert evaluate(phi, x, x).is_psd()
