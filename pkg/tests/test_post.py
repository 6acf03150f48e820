import math

import numpy as np
import pytest

from glvortex import fem, hodge
from glvortex import mesh as M
from glvortex import post, tdgl
from glvortex.errors import EvaluationError, FieldUnavailableError

PI = math.pi


@pytest.fixture(scope="module")
def square8():
    return fem.build_space(M.gen_unit_square(8), 1)


class TestDensity:
    def test_unit(self):
        assert np.all(post.density(np.ones(5, dtype=complex)) == 1.0)

    def test_unit_modulus_phase(self):
        d = post.density(np.full(4, 0.6 + 0.8j))
        assert np.abs(d - 1.0).max() < 1e-15

    def test_zero(self):
        assert np.all(post.density(np.zeros(3, dtype=complex)) == 0.0)


class TestMagneticInduction:
    def test_hodge_offset_plus_applied(self, square8):
        p = tdgl.SimParams(eta=1, kappa=4, h_ext=0.8, tau=0.1, t_end=0.1,
                           solver="hodge", track_w=True)
        st = tdgl.SimState(
            t=0.0, psi=np.ones(square8.n_dofs, dtype=complex),
            a_quad=np.zeros(square8.qpoints.shape),
            pair=hodge.PotentialPair(np.zeros(square8.n_dofs), np.zeros(square8.n_dofs)),
            w=np.zeros(square8.n_dofs),
        )
        b = post.magnetic_induction(square8, st, p)
        assert np.abs(b - 0.8).max() < 1e-15

    def test_hodge_without_w_unavailable(self, square8):
        p = tdgl.SimParams(eta=1, kappa=4, h_ext=0.8, tau=0.1, t_end=0.1, solver="hodge")
        st = tdgl.init_state(square8, p, 1.0)
        with pytest.raises(FieldUnavailableError):
            post.magnetic_induction(square8, st, p)

    def test_gauge_projected_curl_of_rigid_rotation(self, square8):
        # A = (-y/2, x/2) is in the P1 space with curl identically 1
        p = tdgl.SimParams(eta=1, kappa=4, h_ext=1.0, tau=0.1, t_end=0.1, solver="temporal")
        x, y = square8.dof_coords[:, 0], square8.dof_coords[:, 1]
        avec = np.concatenate([-y / 2, x / 2])
        st = tdgl.SimState(
            t=0.0, psi=np.ones(square8.n_dofs, dtype=complex),
            a_quad=np.zeros(square8.qpoints.shape), avec=avec,
        )
        b = post.magnetic_induction(square8, st, p)
        assert np.abs(b - 1.0).max() < 1e-9

    def test_initial_state_zero_field(self, square8):
        p = tdgl.SimParams(eta=1, kappa=4, h_ext=0.8, tau=0.1, t_end=0.1, solver="temporal")
        st = tdgl.init_state(square8, p, 1.0)
        b = post.magnetic_induction(square8, st, p)
        assert np.abs(b).max() < 1e-12


class TestElectricField:
    def test_zero(self, square8):
        st = tdgl.SimState(
            t=0.0, psi=np.ones(square8.n_dofs, dtype=complex),
            a_quad=np.zeros(square8.qpoints.shape),
            pair=hodge.PotentialPair(np.zeros(square8.n_dofs), np.zeros(square8.n_dofs)),
            w=np.zeros(square8.n_dofs),
        )
        e = post.electric_field(square8, st, np.zeros(square8.qpoints.shape))
        assert np.abs(e).max() == 0.0

    def test_linear_w(self, square8):
        # w = x: curl w = (0, -1), so E = (0, 1) - F
        st = tdgl.SimState(
            t=0.0, psi=np.ones(square8.n_dofs, dtype=complex),
            a_quad=np.zeros(square8.qpoints.shape),
            pair=hodge.PotentialPair(np.zeros(square8.n_dofs), np.zeros(square8.n_dofs)),
            w=square8.dof_coords[:, 0].copy(),
        )
        f = np.broadcast_to([0.25, -0.5], square8.qpoints.shape).copy()
        e = post.electric_field(square8, st, f)
        assert np.abs(e[..., 0] - (0.0 - 0.25)).max() < 1e-14
        assert np.abs(e[..., 1] - (1.0 + 0.5)).max() < 1e-14

    def test_requires_w(self, square8):
        st = tdgl.SimState(
            t=0.0, psi=np.ones(square8.n_dofs, dtype=complex),
            a_quad=np.zeros(square8.qpoints.shape),
        )
        with pytest.raises(FieldUnavailableError):
            post.electric_field(square8, st, np.zeros(square8.qpoints.shape))

    def test_cross_check_against_potential_rate(self):
        # one smooth step on the unit square: -curl(w) - F matches the
        # finite-difference dA/dt estimate (the electric field is dA/dt plus
        # a gradient part that is small on the first step from rest)
        space = fem.build_space(M.gen_unit_square(16), 1)
        p = tdgl.SimParams(eta=1, kappa=10.0, h_ext=5.0, tau=0.1, t_end=0.1,
                           solver="hodge", track_w=True)
        stepper = tdgl.make_stepper(space, p)
        st0 = tdgl.init_state(space, p, 0.6 + 0.8j)
        st1 = stepper.step(st0)
        current = tdgl.compute_supercurrent(space, st1.psi, st0.psi, st0.a_quad, p.kappa)
        e_quad = post.electric_field(space, st1, current)
        fd = (st1.a_quad - st0.a_quad) / p.tau
        num = math.sqrt(space.integrate(((e_quad - fd) ** 2).sum(axis=-1)))
        den = math.sqrt(space.integrate((fd**2).sum(axis=-1)))
        assert num / den < 0.2


class TestFreeEnergy:
    def test_ground_state(self, square8):
        psi = np.ones(square8.n_dofs, dtype=complex)
        zero = np.zeros(square8.qweights.shape)
        a = np.zeros(square8.qpoints.shape)
        assert post.free_energy(square8, psi, a, zero, 10.0, 0.0) == pytest.approx(0.0)

    def test_normal_state_condensation_energy(self):
        # |Omega|/2 = 0.375 on the L-shape
        space = fem.build_space(M.gen_lshape(8), 1)
        psi = np.zeros(space.n_dofs, dtype=complex)
        zero = np.zeros(space.qweights.shape)
        a = np.zeros(space.qpoints.shape)
        assert post.free_energy(space, psi, a, zero, 10.0, 0.0) == pytest.approx(0.375)

    def test_field_energy(self, square8):
        psi = np.zeros(square8.n_dofs, dtype=complex)
        zero = np.zeros(square8.qweights.shape)
        a = np.zeros(square8.qpoints.shape)
        got = post.free_energy(square8, psi, a, zero, 10.0, 1.0)
        assert got == pytest.approx(0.5 + 1.0)


class TestVortexRegions:
    def test_uniform_superconducting(self, square8):
        assert post.vortex_regions(square8.mesh, np.ones(81), 0.1) == []

    def test_uniform_normal(self, square8):
        regions = post.vortex_regions(square8.mesh, np.zeros(81), 0.1)
        assert len(regions) == 1
        assert regions[0].area == pytest.approx(1.0)

    def test_two_gaussian_dips(self):
        mesh = M.gen_unit_square(32)
        nodes = mesh.nodes
        centers = [(0.25, 0.25), (0.75, 0.75)]
        dens = np.ones(mesh.n_nodes)
        for cx, cy in centers:
            r2 = (nodes[:, 0] - cx) ** 2 + (nodes[:, 1] - cy) ** 2
            dens -= np.exp(-r2 / 0.002)
        dens = np.clip(dens, 0.0, 1.0)
        regions = post.vortex_regions(mesh, dens, 0.1)
        assert len(regions) == 2
        for region, (cx, cy) in zip(regions, centers):
            assert abs(region.centroid[0] - cx) < 1 / 32
            assert abs(region.centroid[1] - cy) < 1 / 32

    def test_deterministic_ordering(self, square8):
        dens = np.ones(81)
        dens[[10, 60]] = 0.0
        one = post.vortex_regions(square8.mesh, dens, 0.5)
        two = post.vortex_regions(square8.mesh, dens, 0.5)
        assert [r.centroid for r in one] == [r.centroid for r in two]
        assert one == sorted(one, key=lambda r: r.centroid)


class TestGaugeTransform:
    def test_identity(self, square8):
        psi = np.full(square8.n_dofs, 0.6 + 0.8j)
        a = np.zeros(square8.qpoints.shape)
        psi2, a2, phi2 = post.gauge_transform(
            square8, psi, a, np.zeros(square8.n_dofs), np.zeros(square8.n_dofs), 10.0
        )
        assert np.array_equal(psi2, psi)
        assert np.array_equal(a2, a)

    def test_density_invariance_exact(self, square8):
        rng = np.random.default_rng(1)
        psi = rng.standard_normal(square8.n_dofs) + 1j * rng.standard_normal(square8.n_dofs)
        chi = rng.standard_normal(square8.n_dofs)
        psi2, _, _ = post.gauge_transform(
            square8, psi, np.zeros(square8.qpoints.shape), np.zeros(square8.n_dofs), chi, 10.0
        )
        assert np.abs(post.density(psi2) - post.density(psi)).max() < 1e-14

    @staticmethod
    def _projected_curl_norm(space, chi):
        mass = fem.mass_matrix(space)
        a = np.zeros(space.qpoints.shape)
        _, a2, _ = post.gauge_transform(
            space, np.ones(space.n_dofs, dtype=complex), a,
            np.zeros(space.n_dofs), chi, 10.0,
        )
        bx = post.project_to_nodal(space, a2[..., 0], mass=mass)
        by = post.project_to_nodal(space, a2[..., 1], mass=mass)
        gbx, gby = space.grads_at_quad(bx), space.grads_at_quad(by)
        return math.sqrt(space.integrate((gby[..., 0] - gbx[..., 1]) ** 2))

    def test_projected_curl_of_gradient_vanishes_under_refinement(self):
        # chi = x^2 interpolated at P1 DOFs: grad(chi_h) is a genuinely
        # discontinuous discrete gradient; its projected curl tends to zero
        errs = []
        for m in (8, 16, 32):
            space = fem.build_space(M.gen_unit_square(m), 1)
            errs.append(self._projected_curl_norm(space, space.dof_coords[:, 0] ** 2))
        assert errs[2] < errs[1] < errs[0]
        rate = 0.5 * math.log2(errs[0] / errs[2])
        assert rate >= 1.0

    def test_projected_curl_exact_for_p2_representable_gauge(self):
        # x^2 lies in the P2 space, so its discrete gradient is exact and the
        # projected curl is zero up to solver tolerance
        space = fem.build_space(M.gen_unit_square(16), 2)
        assert self._projected_curl_norm(space, space.dof_coords[:, 0] ** 2) < 1e-7


class TestCompareFields:
    def test_equal_fields(self, square8):
        f = np.linspace(0, 1, square8.n_dofs)
        assert post.compare_fields(square8, f, square8, f) == 0.0

    def test_constant_shift(self, square8):
        g = np.ones(square8.n_dofs)
        f = g + 0.1
        assert post.compare_fields(square8, f, square8, g) == pytest.approx(0.1)

    def test_coarse_to_fine_linear_exact(self):
        coarse = fem.build_space(M.gen_unit_square(4), 1)
        fine = fem.build_space(M.gen_unit_square(8), 1)
        lin = lambda space: 2.0 * space.dof_coords[:, 0] - space.dof_coords[:, 1]
        d = post.compare_fields(coarse, lin(coarse), fine, lin(fine))
        assert d < 1e-12

    def test_subdomain_restriction(self, square8):
        g = np.ones(square8.n_dofs)
        f = g + np.where(square8.dof_coords[:, 0] < 0.5, 1.0, 0.0)
        right = lambda pts: pts[..., 0] > 0.55
        assert post.compare_fields(square8, f, square8, g, subdomain=right) < 1e-12

    def test_point_outside_mesh_rejected(self):
        coarse = fem.build_space(M.gen_lshape(4), 1)
        fine = fem.build_space(M.gen_unit_square(8), 1)  # covers the removed quadrant
        with pytest.raises(EvaluationError):
            post.compare_fields(coarse, np.ones(coarse.n_dofs), fine, np.ones(fine.n_dofs))

    def test_eval_at_points_p2(self):
        space = fem.build_space(M.gen_unit_square(4), 2)
        coeffs = space.dof_coords[:, 0] * space.dof_coords[:, 1]  # xy is in P2
        rng = np.random.default_rng(6)
        pts = rng.uniform(0.01, 0.99, size=(50, 2))
        vals = post.eval_at_points(space, coeffs, pts)
        assert np.abs(vals - pts[:, 0] * pts[:, 1]).max() < 1e-13


class TestSnapshotInvariant:
    def test_density_consistency_enforced(self, square8):
        n = square8.mesh.n_nodes
        with pytest.raises(ValueError, match="density"):
            post.FieldSnapshot(
                time=0.0, solver="hodge", mesh=square8.mesh,
                re_psi=np.ones(n), im_psi=np.zeros(n),
                density=np.full(n, 0.5),
                b_field=np.zeros(n), a_field=np.zeros((n, 2)),
            )
