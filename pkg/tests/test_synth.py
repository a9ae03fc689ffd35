import numpy as np
import pytest
from scipy import integrate, special

from posmult import symbols as sym
from posmult.engine import GridSpec, lp_vector_norm
from posmult.errors import (
    AtomAtOrigin,
    DimensionMismatch,
    NegativeWeight,
    NonPsdWeight,
    UnderResolved,
)
from posmult.psd import SamplingPlan, block_gram, is_psd
from posmult.psd import test_cpsd_function as cpsd_test
from posmult.psd import test_psd_function as psd_test
from posmult.symbols import MatrixSymbol
from posmult.synth import (
    AtomicMeasure,
    LKParams,
    MollifierSpec,
    RadialProfile,
    basis_test_field,
    bochner_matrix,
    bochner_scalar,
    example_f0,
    exp_f0_closed_form,
    hadamard_exp,
    levy_khintchine,
    lk_matrix,
    matrix_exp,
    mollifier,
    random_bump_field,
    random_lk_params,
    random_nonnegative_measure,
    random_psd_measure,
)

C1 = (2 * np.pi) ** -0.5
PLAN = SamplingPlan(trials=20, seed=5)
XS = np.linspace(-6, 6, 49)[:, None]


def const_matrix(W):
    W = np.asarray(W, dtype=complex)
    m = W.shape[0]
    return MatrixSymbol(lambda x: np.broadcast_to(W, x.shape[:-1] + (m, m)), 1, m,
                        bound=np.linalg.norm(W, 2))


class TestAtomicMeasure:
    def test_shapes(self):
        mu = AtomicMeasure([0.0, 1.0], [0.5, 0.5])
        assert (mu.n, mu.size, mu.is_matrix, mu.m) == (1, 2, False, None)
        W = np.stack([np.eye(2)] * 3)
        nu = AtomicMeasure(np.zeros((3, 2)), W)
        assert (nu.n, nu.m, nu.is_matrix) == (2, 2, True)

    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            AtomicMeasure([[0.0]], [1.0, 2.0])
        with pytest.raises(DimensionMismatch):
            AtomicMeasure([[0.0]], np.ones((1, 2, 3)))
        with pytest.raises(ValueError):
            AtomicMeasure([[np.nan]], [1.0])

    def test_total_variation(self):
        assert AtomicMeasure([0.0, 1.0], [0.5, -0.25]).total_variation() == pytest.approx(0.75)
        W = np.array([np.diag([2.0, 1.0]), np.diag([0.0, 3.0])])
        assert AtomicMeasure([0.0, 1.0], W).total_variation() == pytest.approx(5.0)

    def test_nonnegativity(self):
        with pytest.raises(NegativeWeight):
            AtomicMeasure([0.0], [-1.0]).check_nonnegative()
        with pytest.raises(NegativeWeight):
            AtomicMeasure([0.0], [1j]).check_nonnegative()
        with pytest.raises(NonPsdWeight):
            AtomicMeasure([0.0], [[[0.0, 1.0], [1.0, 0.0]]]).check_nonnegative()

    def test_config_roundtrip(self, rng):
        for mu in (random_nonnegative_measure(rng, 2), random_psd_measure(rng, 1, 3)):
            back = AtomicMeasure.from_config(mu.to_config())
            np.testing.assert_array_equal(back.locations, mu.locations)
            np.testing.assert_array_equal(back.weights, mu.weights)


class TestBochner:
    def test_origin_atom_is_constant(self):
        F = bochner_scalar(AtomicMeasure([[0.0]], [1.0]))
        np.testing.assert_allclose(F(XS), C1)
        F2 = bochner_scalar(AtomicMeasure([[0.0, 0.0]], [1.0]))
        np.testing.assert_allclose(F2(np.ones((3, 2))), 1 / (2 * np.pi))

    def test_two_atoms_give_cosine(self):
        F = bochner_scalar(AtomicMeasure([[1.0], [-1.0]], [0.5, 0.5]))
        np.testing.assert_allclose(F(XS), C1 * np.cos(XS[:, 0]), atol=1e-15)
        assert F.bound == pytest.approx(C1)

    def test_rejects_negative_weight(self):
        with pytest.raises(NegativeWeight):
            bochner_scalar(AtomicMeasure([[1.0]], [-0.5]))

    def test_matrix_origin_atom(self, rng):
        W = random_psd_measure(rng, 1, 3, atoms=(1, 1)).weights[0]
        F = bochner_matrix(AtomicMeasure([[0.0]], [W]))
        np.testing.assert_allclose(F(XS), np.broadcast_to(C1 * W, (len(XS), 3, 3)))

    def test_matrix_two_atom_block_gram(self, rng):
        mu = random_psd_measure(rng, 2, 2, atoms=(2, 2))
        F = bochner_matrix(mu)
        plan = SamplingPlan(trials=50, seed=2)
        for pts in plan.point_sets(2):
            assert is_psd(block_gram(F, pts)).passed

    def test_bessel_measure_reproduces_closed_form(self):
        # e^{t(cos x - 1)} = sum_k e^{-t} I_k(t) e^{ikx}, so exp(tF0) with a = cos - 1
        # is the transform of a lattice matrix measure with weights K * e^{-t} I_k(t)
        t, b = 1.5, 0.5
        ks = np.arange(-40, 41)
        K = np.array([[np.cosh(t * b), np.sinh(t * b)], [np.sinh(t * b), np.cosh(t * b)]])
        W = np.sqrt(2 * np.pi) * special.ive(ks, t)[:, None, None] * K
        F = bochner_matrix(AtomicMeasure(-ks[:, None].astype(float), W))
        a = sym.cosine(1.0) + (-1.0)
        want = exp_f0_closed_form(a, b, t)(XS)
        np.testing.assert_allclose(F(XS), want, atol=1e-14)
        assert psd_test(F, PLAN).passed

    def test_random_measures_pass(self, rng):
        for i in range(6):
            mu = random_nonnegative_measure(rng, 1 + i % 2)
            assert psd_test(bochner_scalar(mu), PLAN).passed
            nu = random_psd_measure(rng, 1 + i % 2, 2 + i % 2)
            assert psd_test(bochner_matrix(nu), PLAN).passed

    def test_lattice_snap(self, rng):
        mu = random_nonnegative_measure(rng, 1, lattice=0.25)
        np.testing.assert_allclose(mu.locations / 0.25, np.round(mu.locations / 0.25), atol=1e-12)
        nu = random_psd_measure(rng, 1, 2, entrywise_nonnegative=True)
        assert np.all(nu.weights.real >= 0) and np.all(nu.weights.imag == 0)


class TestLevyKhintchine:
    def test_pure_quadratic(self):
        F = levy_khintchine(LKParams(0.0, [0.0], [[1.0]], AtomicMeasure.empty(1)))
        np.testing.assert_allclose(F(XS), -XS[:, 0] ** 2)

    def test_drift(self):
        v = np.array([0.5, -2.0])
        F = levy_khintchine(LKParams(0.0, v, np.zeros((2, 2)), AtomicMeasure.empty(2)))
        X = np.array([[1.0, 1.0], [0.0, 3.0]])
        np.testing.assert_allclose(F(X), 1j * X @ v)

    def test_single_atom(self):
        w, y0 = 0.7, 1.3
        F = levy_khintchine(LKParams(0.0, [0.0], [[0.0]], AtomicMeasure([[y0]], [w])))
        x = XS[:, 0]
        want = w * (np.exp(1j * x * y0) - 1 - 1j * x * y0 / (1 + y0 ** 2)) * (1 + y0 ** 2) / y0 ** 2
        np.testing.assert_allclose(F(XS), want, atol=1e-14)
        assert cpsd_test(F, PLAN).passed

    def test_real_part_bounded_by_alpha(self, rng):
        for _ in range(5):
            p = random_lk_params(rng, 2)
            F = levy_khintchine(p)
            X = rng.uniform(-20, 20, size=(500, 2))
            assert F(X).real.max() <= p.alpha + 1e-12
            assert F.re_bound == p.alpha

    def test_random_params_are_cpsd(self, rng):
        for n in (1, 2):
            for _ in range(3):
                assert cpsd_test(levy_khintchine(random_lk_params(rng, n)), PLAN).passed

    def test_semigroup_bridge(self, rng):
        for _ in range(3):
            F = levy_khintchine(random_lk_params(rng, 1))
            for t in (0.1, 1.0, 10.0):
                assert psd_test(sym.exp_of(F, t), PLAN).passed

    def test_validation(self):
        with pytest.raises(DimensionMismatch):
            LKParams(0.0, [0.0, 0.0], [[1.0]], AtomicMeasure.empty(2))
        with pytest.raises(NonPsdWeight):
            LKParams(0.0, [0.0], [[-1.0]], AtomicMeasure.empty(1))
        with pytest.raises(AtomAtOrigin):
            LKParams(0.0, [0.0], [[0.0]], AtomicMeasure([[0.0]], [1.0]))
        with pytest.raises(NegativeWeight):
            LKParams(0.0, [0.0], [[0.0]], AtomicMeasure([[1.0]], [-1.0]))

    def test_config_roundtrip(self, rng):
        p = random_lk_params(rng, 2)
        q = LKParams.from_config(p.to_config())
        X = rng.standard_normal((10, 2))
        np.testing.assert_array_equal(levy_khintchine(p)(X), levy_khintchine(q)(X))


class TestMatrixGenerators:
    def test_lk_matrix_identical_entries(self, rng):
        p = random_lk_params(rng, 1)
        F = lk_matrix([[p, p], [p, p]])
        want = levy_khintchine(p)(XS)
        np.testing.assert_allclose(F(XS), want[:, None, None] * np.ones((2, 2)))

    def test_lk_matrix_diagonal(self):
        q = LKParams(0.0, [0.0], [[1.0]], AtomicMeasure.empty(1))
        z = LKParams.zero(1)
        F = lk_matrix([[q, z], [z, q]])
        vals = F(XS)
        np.testing.assert_array_equal(vals[:, 0, 1], 0)
        np.testing.assert_allclose(vals[:, 1, 1], -XS[:, 0] ** 2)

    def test_lk_matrix_quadratic_entries_cpsd(self):
        ps = [[LKParams(0.0, [0.0], [[c]], AtomicMeasure.empty(1)) for c in row] for row in ((1.0, 2.0), (0.5, 3.0))]
        F = lk_matrix(ps)
        for j in range(2):
            for k in range(2):
                assert cpsd_test(F.entry(j, k), PLAN).passed

    def test_hadamard_exp_constant(self):
        S = const_matrix([[0.0, np.log(2)], [np.log(2), 0.0]])
        np.testing.assert_allclose(hadamard_exp(S, 1.0)([[0.0], [3.0]]), [[[1, 2], [2, 1]]] * 2)

    def test_hadamard_exp_small_t_tends_to_ones(self):
        F = lk_matrix([[LKParams(0.0, [0.0], [[1.0]], AtomicMeasure.empty(1))] * 2] * 2)
        vals = hadamard_exp(F, 1e-12)(XS)
        np.testing.assert_allclose(vals, np.ones_like(vals), atol=1e-10)

    def test_hadamard_exp_requires_positive_t(self):
        with pytest.raises(ValueError):
            hadamard_exp(const_matrix(np.eye(2)), 0.0)

    def test_hadamard_exp_of_cpsd_entries_is_psd(self, rng):
        F = lk_matrix([[random_lk_params(rng, 1) for _ in range(2)] for _ in range(2)])
        for t in (0.1, 1.0, 10.0):
            H = hadamard_exp(F, t)
            for j in range(2):
                for k in range(2):
                    assert psd_test(H.entry(j, k), PLAN).passed

    def test_hadamard_exp_of_psd_entries(self, rng):
        F = bochner_matrix(random_psd_measure(rng, 1, 2, entrywise_nonnegative=True))
        for t in (0.5, 3.0):
            H = hadamard_exp(F, t)
            for j in range(2):
                for k in range(2):
                    assert psd_test(H.entry(j, k), PLAN).passed

    def test_matrix_exp_of_zero(self):
        E = matrix_exp(const_matrix(np.zeros((2, 2))), 1.0)
        np.testing.assert_allclose(E(XS), np.broadcast_to(np.eye(2), (len(XS), 2, 2)))

    def test_matrix_exp_diagonal(self):
        a = sym.quadratic(1, -1.0)
        F = MatrixSymbol.from_entries([[a, sym.constant(0.0)], [sym.constant(0.0), a]])
        t = 0.7
        vals = matrix_exp(F, t)(XS)
        np.testing.assert_allclose(vals[:, 0, 0], np.exp(-t * XS[:, 0] ** 2), rtol=1e-14)
        np.testing.assert_allclose(vals[:, 1, 1], vals[:, 0, 0])
        np.testing.assert_array_equal(vals[:, 0, 1], 0)

    def test_matrix_exp_vs_power_series(self):
        # exp of [[0, b], [b, 0]] summed term by term with 40 terms
        from math import factorial
        for beta in (0.25, 1.0, 2.0):
            A = np.array([[0.0, beta], [beta, 0.0]])
            series = sum(np.linalg.matrix_power(A, k) / factorial(k) for k in range(40))
            E = matrix_exp(const_matrix(A), 1.0)([[0.0]])[0]
            C = exp_f0_closed_form(sym.constant(0.0), beta, 1.0)([[0.0]])[0]
            np.testing.assert_allclose(E, C, atol=1e-12)
            np.testing.assert_allclose(series, C, atol=1e-12)


class TestMollifier:
    @pytest.mark.parametrize("n", [1, 2])
    @pytest.mark.parametrize("eps", [1.0, 0.1])
    def test_unit_mass(self, n, eps):
        # independent quadrature of the radial integral sphere * int r^(n-1) phi_eps(r) dr
        phi = mollifier(MollifierSpec(n, eps, 0.25)).phi
        sphere = 2.0 if n == 1 else 2 * np.pi

        def radial(r):
            x = np.zeros((1, n))
            x[0, 0] = r
            return float(phi(x)[0].real) * r ** (n - 1)

        mass, _ = integrate.quad(radial, 0, eps, points=[0.25 * eps], epsabs=1e-14, epsrel=1e-13, limit=200)
        assert sphere * mass == pytest.approx(1.0, abs=1e-10)

    def test_support(self):
        for n in (1, 2, 3):
            phi = mollifier(MollifierSpec(n, 0.3)).phi
            d = np.zeros((4, n))
            d[:, 0] = [0.3, 0.31, 1.0, -0.3]
            np.testing.assert_array_equal(phi(d), 0.0)

    def test_nonincreasing_profile(self):
        prof = RadialProfile(1, 0.25)
        r = np.linspace(0, 1.2, 10_000)
        vals = prof(r)
        assert np.all(np.diff(vals) <= 0)
        np.testing.assert_array_equal(vals[r >= 1], 0)
        np.testing.assert_allclose(vals[r <= 0.25], prof.c)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_transform_against_quadrature(self, n):
        prof = RadialProfile(n, 0.25)
        kern = {1: lambda kr: np.cos(kr), 2: special.j0, 3: lambda kr: np.sinc(kr / np.pi)}[n]
        sphere = {1: 2.0, 2: 2 * np.pi, 3: 4 * np.pi}[n]
        ks = np.array([0.0, 0.5, 3.0, 17.0, 60.0])
        got = prof.transform(ks)
        for k, g in zip(ks, got):
            want = sum(
                integrate.quad(lambda r: sphere * float(prof(r)) * r ** (n - 1) * kern(k * r), lo, hi,
                               epsabs=1e-13, epsrel=1e-12, limit=400)[0]
                for lo, hi in ((0, 0.25), (0.25, 1.0))
            )
            assert g == pytest.approx(want, abs=1e-9)
        assert got[0] == pytest.approx(1.0, abs=1e-13)

    def test_transform_levels_agree(self):
        prof = RadialProfile(1, 0.25)
        k = np.linspace(0, 10, 50)
        coarse = prof.transform(k)
        fine = prof.transform(np.append(k, 1500.0))[:-1]
        np.testing.assert_allclose(coarse, fine, atol=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_limit_constant(self, n):
        pair = mollifier(MollifierSpec(n, 1e-6))
        xi = np.ones((3, n)) * np.array([[0.5], [2.0], [10.0]])
        np.testing.assert_allclose(pair.phi_hat(xi), (2 * np.pi) ** (-n / 2), rtol=1e-9)
        assert pair.limit == pytest.approx((2 * np.pi) ** (-n / 2))
        alt = mollifier(MollifierSpec(n, 1e-6, normalization="unit-transform-limit"))
        np.testing.assert_allclose(alt.phi_hat(xi), 1.0, rtol=1e-9)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            MollifierSpec(eps=0.0)
        with pytest.raises(ValueError):
            MollifierSpec(n=4)
        with pytest.raises(ValueError):
            MollifierSpec(normalization="other")


class TestTestFields:
    grid = GridSpec(1, 1024, 16.0)

    def test_slot_placement(self):
        f = basis_test_field(0.5, 2, 3, self.grid)
        assert f.m == 3
        np.testing.assert_array_equal(f.data[0], 0)
        np.testing.assert_array_equal(f.data[2], 0)
        phi = mollifier(MollifierSpec(1, 0.5)).phi
        np.testing.assert_allclose(f.data[1], phi(self.grid.points()).real)

    def test_single_component(self):
        f = basis_test_field(0.25, 1, 1, self.grid)
        assert f.m == 1 and f.is_nonnegative()

    def test_grid_mass(self):
        for eps in (0.5, 0.125):
            f = basis_test_field(eps, 1, 1, self.grid)
            assert lp_vector_norm(f, 1) == pytest.approx(1.0, abs=1e-10)

    def test_under_resolved(self):
        with pytest.raises(UnderResolved):
            basis_test_field(0.05, 1, 1, self.grid)

    def test_bad_slot(self):
        with pytest.raises(ValueError):
            basis_test_field(0.5, 0, 2, self.grid)

    def test_random_bump_field(self, rng):
        grid = GridSpec(1, 1024, 40.0)
        f = random_bump_field(grid, 3, rng)
        assert f.m == 3 and f.is_nonnegative()
        assert np.all(f.data.real.max(axis=1) > 0)
        # decays to zero well inside the box
        edge = np.abs(grid.axis()) > 0.36 * grid.L
        np.testing.assert_array_equal(f.data[:, edge], 0)


class TestExampleF0:
    def test_zero_a(self):
        F = example_f0(sym.constant(0.0), 1.0)
        np.testing.assert_allclose(F(XS), np.broadcast_to([[0, 1], [1, 0]], (len(XS), 2, 2)))

    def test_diagonal_case(self):
        F = example_f0(sym.quadratic(1, -1.0), 0.0)
        vals = F(XS)
        np.testing.assert_allclose(vals[:, 0, 0], -XS[:, 0] ** 2)
        np.testing.assert_array_equal(vals[:, 0, 1], 0)

    def test_mlak_conditional_psd(self):
        assert cpsd_test(example_f0(sym.quadratic(1, -1.0), 1.0), PLAN).passed

    def test_negative_b_rejected(self):
        with pytest.raises(ValueError):
            example_f0(sym.constant(0.0), -1.0)

    def test_closed_form_b_zero(self):
        a = sym.quadratic(1, -1.0)
        C = exp_f0_closed_form(a, 0.0, 2.0)(XS)
        np.testing.assert_allclose(C[:, 0, 0], np.exp(-2 * XS[:, 0] ** 2))
        np.testing.assert_array_equal(C[:, 0, 1], 0)

    def test_closed_form_ln2(self):
        C = exp_f0_closed_form(sym.constant(0.0), np.log(2), 1.0)([[0.0]])[0]
        np.testing.assert_allclose(C, [[1.25, 0.75], [0.75, 1.25]], atol=1e-15)

    def test_matrix_exp_matches_closed_form(self):
        a = sym.quadratic(1, -1.0)
        for b in (0.0, 0.5, 2.0):
            for t in (0.1, 1.0, 10.0):
                E = matrix_exp(example_f0(a, b), t)(XS)
                C = exp_f0_closed_form(a, b, t)(XS)
                bound = np.exp(t * b)  # e^{t sup a} * max(cosh, sinh) <= e^{tb}
                assert np.abs(E - C).max() <= 1e-12 * bound

    def test_exp_block_gram_two_points(self):
        E = matrix_exp(example_f0(sym.quadratic(1, -1.0), 1.0), 1.0)
        B = block_gram(E, [[0.0], [1.0]])
        assert B.shape == (4, 4)
        assert is_psd(B).passed
