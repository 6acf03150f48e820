import math

import numpy as np
import pytest
import scipy.sparse as sp

from glvortex import fem
from glvortex import mesh as M
from glvortex.errors import CompatibilityError, InvalidParameterError, SolverError
from glvortex.quadrature import integrate_barycentric_monomial, quadrature_rule

PI = math.pi


@pytest.fixture(scope="module")
def square_p1():
    return fem.build_space(M.gen_unit_square(8), 1)


def l2_error(space, coeffs, exact):
    diff = space.values_at_quad(coeffs) - exact(
        space.qpoints[..., 0], space.qpoints[..., 1]
    )
    return math.sqrt(space.integrate(np.abs(diff) ** 2))


class TestQuadrature:
    @pytest.mark.parametrize("degree", [1, 2, 4, 6, 8])
    def test_monomial_exactness(self, degree):
        rule = quadrature_rule(degree)
        assert abs(rule.weights.sum() - 0.5) < 1e-15
        for a in range(rule.degree + 1):
            for b in range(rule.degree + 1 - a):
                c = rule.degree - a - b
                got = float(
                    (rule.weights * rule.points[:, 0] ** a
                     * rule.points[:, 1] ** b * rule.points[:, 2] ** c).sum()
                )
                assert abs(got - integrate_barycentric_monomial(a, b, c)) < 1e-13

    def test_positive_weights(self):
        for degree in (1, 2, 4, 6, 8):
            assert quadrature_rule(degree).weights.min() > 0

    def test_random_polynomial(self):
        # random quartic integrated by the default r=1 rule vs exact formula
        rng = np.random.default_rng(7)
        rule = quadrature_rule(4)
        coef = rng.standard_normal((5, 5))
        exact = got = 0.0
        for a in range(5):
            for b in range(5 - a):
                exact += coef[a, b] * integrate_barycentric_monomial(a, b, 0)
                got += coef[a, b] * float(
                    (rule.weights * rule.points[:, 0] ** a * rule.points[:, 1] ** b).sum()
                )
        assert abs(got - exact) < 1e-13


class TestSpaces:
    def test_p1_dof_count(self):
        v = fem.build_space(M.gen_unit_square(2), 1)
        assert v.n_dofs == 9

    def test_p2_dof_count(self):
        v = fem.build_space(M.gen_unit_square(2), 2)
        assert v.n_dofs == 25  # 9 vertices + 16 edges

    def test_lshape_p1_matches_node_count(self):
        mesh = M.gen_lshape(16)
        assert fem.build_space(mesh, 1).n_dofs == mesh.n_nodes

    def test_boundary_dofs_lie_on_boundary(self):
        mesh = M.gen_unit_square(4)
        for r in (1, 2):
            v = fem.build_space(mesh, r)
            p = v.dof_coords[v.boundary_dofs]
            on_edge = (
                (np.abs(p[:, 0]) < 1e-14) | (np.abs(p[:, 0] - 1) < 1e-14)
                | (np.abs(p[:, 1]) < 1e-14) | (np.abs(p[:, 1] - 1) < 1e-14)
            )
            assert on_edge.all()

    def test_rejects_unsupported_degree(self):
        with pytest.raises(InvalidParameterError):
            fem.build_space(M.gen_unit_square(2), 3)


class TestAssembly:
    def test_stiffness_annihilates_constants(self, square_p1):
        k = fem.stiffness_matrix(square_p1)
        assert np.abs(k @ np.ones(square_p1.n_dofs)).max() < 1e-12

    def test_mass_row_sums_are_basis_integrals(self, square_p1):
        m = fem.mass_matrix(square_p1)
        rows = np.asarray(m.sum(axis=1)).ravel()
        assert np.allclose(rows, square_p1.dof_measures(), atol=1e-14)
        # for r=1 the basis integral is a third of the adjacent triangle area
        areas = square_p1.mesh.signed_areas()
        lumped = np.zeros(square_p1.n_dofs)
        np.add.at(lumped, square_p1.mesh.triangles.ravel(), np.repeat(areas / 3, 3))
        assert np.allclose(rows, lumped, atol=1e-14)

    def test_weighted_mass_with_unit_weight(self, square_p1):
        m = fem.mass_matrix(square_p1)
        w = fem.weighted_mass_matrix(square_p1, 1.0)
        assert abs(w - m).max() < 1e-15

    def test_assembly_linearity(self, square_p1):
        rng = np.random.default_rng(3)
        c1 = rng.standard_normal(square_p1.qweights.shape)
        c2 = rng.standard_normal(square_p1.qweights.shape)
        a, b = 1.7, -0.4
        lhs = fem.weighted_mass_matrix(square_p1, a * c1 + b * c2)
        rhs = a * fem.weighted_mass_matrix(square_p1, c1) + b * fem.weighted_mass_matrix(square_p1, c2)
        scale = abs(lhs).max()
        assert abs(lhs - rhs).max() < 1e-12 * scale

    def test_symmetric_forms_are_symmetric(self, square_p1):
        for mat in (fem.mass_matrix(square_p1), fem.stiffness_matrix(square_p1)):
            assert abs(mat - mat.T).max() < 1e-13 * abs(mat).max()

    def test_partial_stiffness_recombines(self, square_p1):
        k = fem.stiffness_matrix(square_p1)
        kxx = fem.partial_stiffness_matrix(square_p1, 0, 0)
        kyy = fem.partial_stiffness_matrix(square_p1, 1, 1)
        assert abs((kxx + kyy) - k).max() < 1e-13


class TestSolveSPD:
    def test_identity(self):
        b = np.arange(5, dtype=float)
        x = fem.solve_spd(sp.identity(5, format="csr"), b)
        assert np.allclose(x, b, atol=1e-12)

    def test_zero_rhs(self, square_p1):
        k = fem.stiffness_matrix(square_p1) + fem.mass_matrix(square_p1)
        assert np.all(fem.solve_spd(k, np.zeros(square_p1.n_dofs)) == 0)

    def test_manufactured_poisson_rate(self):
        errs = []
        for m in (8, 16, 32):
            space = fem.build_space(M.gen_unit_square(m), 1)
            x, y = space.qpoints[..., 0], space.qpoints[..., 1]
            rhs = fem.load_vector(space, 2 * PI**2 * np.sin(PI * x) * np.sin(PI * y))
            k = fem.stiffness_matrix(space)
            a2, b2 = fem.constrain_dirichlet(space, k, rhs, space.boundary_dofs, 0.0)
            u = fem.solve_spd(a2, b2)
            errs.append(l2_error(space, u, lambda x, y: np.sin(PI * x) * np.sin(PI * y)))
        rate = 0.5 * math.log2(errs[0] / errs[2])
        assert 1.8 <= rate <= 2.2

    def test_galerkin_residual(self, square_p1):
        rng = np.random.default_rng(11)
        k = fem.stiffness_matrix(square_p1) + fem.mass_matrix(square_p1)
        b = rng.standard_normal(square_p1.n_dofs)
        x = fem.solve_spd(k, b, tol=1e-10)
        assert np.linalg.norm(b - k @ x) <= 1e-10 * np.linalg.norm(b) * 1.01

    def test_iteration_budget_error(self, square_p1):
        k = fem.stiffness_matrix(square_p1) + fem.mass_matrix(square_p1)
        b = np.ones(square_p1.n_dofs)
        with pytest.raises(SolverError):
            fem.solve_spd(k, b, maxiter=2)


class TestSolveNeumann:
    def test_zero_rhs(self, square_p1):
        k = fem.stiffness_matrix(square_p1)
        x = fem.solve_neumann_meanzero(k, np.zeros(square_p1.n_dofs), square_p1.dof_measures())
        assert np.all(x == 0)

    def test_analytic_neumann_rate(self):
        errs = []
        for m in (8, 16, 32):
            space = fem.build_space(M.gen_unit_square(m), 1)
            x, y = space.qpoints[..., 0], space.qpoints[..., 1]
            grad = np.stack([-PI * np.sin(PI * x), np.zeros_like(x)], axis=-1)
            b = fem.grad_pairing_vector(space, grad)
            k = fem.stiffness_matrix(space)
            u = fem.solve_neumann_meanzero(k, b, space.dof_measures(), scale=1.0)
            errs.append(l2_error(space, u, lambda x, y: np.cos(PI * x)))
        rate = 0.5 * math.log2(errs[0] / errs[2])
        assert 1.8 <= rate <= 2.2

    def test_mean_zero(self, square_p1):
        rng = np.random.default_rng(5)
        k = fem.stiffness_matrix(square_p1)
        b = rng.standard_normal(square_p1.n_dofs)
        b -= b.mean()
        w = square_p1.dof_measures()
        x = fem.solve_neumann_meanzero(k, b, w)
        assert abs(w @ x) / w.sum() < 1e-12

    def test_constant_rhs_incompatible(self, square_p1):
        k = fem.stiffness_matrix(square_p1)
        b = fem.mass_matrix(square_p1) @ np.ones(square_p1.n_dofs)
        with pytest.raises(CompatibilityError):
            fem.solve_neumann_meanzero(k, b, square_p1.dof_measures())


class TestSolveComplex:
    def test_i_times_identity(self):
        rng = np.random.default_rng(0)
        b = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        a = sp.identity(20, format="csr", dtype=complex) * 1j
        x = fem.solve_complex(a, b)
        assert np.allclose(x, -1j * b, atol=1e-12)

    def test_hermitian_matches_real_block_system(self):
        # oracle: a Hermitian PD system is equivalent to the real 2N SPD
        # system [[Re, -Im], [Im, Re]]
        rng = np.random.default_rng(42)
        n = 60
        base = sp.random(n, n, density=0.1, random_state=7)
        h = base + base.T + sp.identity(n) * (4.0 + 0j)
        h = h + 1j * (sp.random(n, n, density=0.05, random_state=8)
                      - sp.random(n, n, density=0.05, random_state=8).T)
        h = (h + h.conj().T) * 0.5 + sp.identity(n) * 4.0
        h = sp.csr_matrix(h)
        b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x = fem.solve_complex(h, b, tol=1e-12)
        re, im = sp.csr_matrix(h.real), sp.csr_matrix(h.imag)
        big = sp.bmat([[re, -im], [im, re]], format="csr")
        xy = fem.solve_spd(big, np.concatenate([b.real, b.imag]), tol=1e-12)
        assert np.abs(x - (xy[:n] + 1j * xy[n:])).max() < 1e-9

    def test_singular_matrix_raises(self):
        a = sp.csr_matrix(np.array([[1.0, 0.0], [0.0, 0.0]]), dtype=complex)
        with pytest.raises(SolverError):
            fem.solve_complex(a, np.array([1.0, 1.0], dtype=complex))


class TestConstrainDirichlet:
    def test_all_dofs_constrained(self):
        space = fem.build_space(M.gen_unit_square(2), 1)
        k = fem.stiffness_matrix(space) + fem.mass_matrix(space)
        vals = np.linspace(0, 1, space.n_dofs)[space.boundary_dofs]
        a2, b2 = fem.constrain_dirichlet(
            space, k, np.zeros(space.n_dofs), space.boundary_dofs, vals
        )
        x = fem.solve_spd(a2, b2)
        assert np.allclose(x[space.boundary_dofs], vals, atol=1e-12)

    def test_no_dofs_unchanged(self, square_p1):
        k = fem.stiffness_matrix(square_p1)
        b = np.ones(square_p1.n_dofs)
        a2, b2 = fem.constrain_dirichlet(square_p1, k, b, np.array([], dtype=int), 0.0)
        assert abs(a2 - k).max() == 0
        assert np.array_equal(b2, b)

    def test_p2_reproduces_bilinear_solution(self):
        # u* = x y is harmonic and lies in the P2 space: the constrained
        # solve must reproduce its interpolant to solver tolerance
        space = fem.build_space(M.gen_unit_square(4), 2)
        k = fem.stiffness_matrix(space)
        exact = space.dof_coords[:, 0] * space.dof_coords[:, 1]
        a2, b2 = fem.constrain_dirichlet(
            space, k, np.zeros(space.n_dofs),
            space.boundary_dofs, exact[space.boundary_dofs],
        )
        u = fem.solve_spd(a2, b2)
        assert np.abs(u - exact).max() < 1e-10

    def test_interior_dof_rejected(self, square_p1):
        k = fem.stiffness_matrix(square_p1)
        interior = np.setdiff1d(np.arange(square_p1.n_dofs), square_p1.boundary_dofs)
        with pytest.raises(InvalidParameterError):
            fem.constrain_dirichlet(
                square_p1, k, np.zeros(square_p1.n_dofs), interior[:1], 0.0
            )


class TestFactorizedPaths:
    def test_factorized_matches_cg(self, square_p1):
        rng = np.random.default_rng(9)
        k = fem.stiffness_matrix(square_p1) + fem.mass_matrix(square_p1)
        b = rng.standard_normal(square_p1.n_dofs)
        x_cg = fem.solve_spd(k, b, tol=1e-12)
        x_lu = fem.FactorizedSolver(k).solve(b)
        assert np.abs(x_cg - x_lu).max() < 1e-9

    def test_bordered_matches_deflated_cg(self, square_p1):
        rng = np.random.default_rng(10)
        k = fem.stiffness_matrix(square_p1)
        w = square_p1.dof_measures()
        b = rng.standard_normal(square_p1.n_dofs)
        b -= b.mean()
        x_cg = fem.solve_neumann_meanzero(k, b, w, tol=1e-12)
        x_lu = fem.FactorizedMeanZero(k, w).solve(b)
        assert np.abs(x_cg - x_lu).max() < 1e-8
        assert abs(w @ x_lu) / w.sum() < 1e-12

    def test_bordered_rejects_incompatible(self, square_p1):
        k = fem.stiffness_matrix(square_p1)
        w = square_p1.dof_measures()
        with pytest.raises(CompatibilityError):
            fem.FactorizedMeanZero(k, w).solve(fem.mass_matrix(square_p1) @ np.ones(square_p1.n_dofs))
