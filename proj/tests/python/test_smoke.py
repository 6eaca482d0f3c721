import math
import os

import numpy as np
import pytest

import matern_recon as mr


def test_kernel_values():
    spec = mr.KernelSpec.matern(0.5, 1.0)
    assert mr.eval_kernel(spec, np.zeros(3), np.array([1.0, 0, 0])) == pytest.approx(math.exp(-1))
    k = mr.gram_matrix(spec, np.array([[0.0], [1.0]]))
    assert k[0, 1] == pytest.approx(math.exp(-1))
    assert mr.KernelSpec.from_key("arccos").key() == "arccos"


def test_errors_carry_kind():
    with pytest.raises(mr.MaternError) as info:
        mr.KernelSpec.from_key("matern72")
    assert info.value.kind == "invalid input"


def test_solve_interpolates():
    s = mr.sphere_samples(200, 0.3, seed=1)
    cloud = mr.OrientedPointCloud(s.points, s.normals)
    system = mr.build_system(cloud)
    field, report = mr.solve(system, mr.KernelSpec.matern(1.5, 1.0))
    assert report.relative_residual < 1e-8
    values = field(system.centers)
    assert np.max(np.abs(values - system.targets)) < 5e-6


def test_reconstruct_and_metrics():
    s = mr.sphere_samples(300, 0.3, seed=2)
    rec = mr.reconstruct(mr.OrientedPointCloud(s.points, s.normals), mr.KernelSpec.matern(1.5, 1.0), resolution=32)
    assert rec.mesh.euler_characteristic() == 2
    radii = np.linalg.norm(rec.mesh.vertices, axis=1)
    assert np.max(np.abs(radii - 0.3)) < 0.03
    gt = mr.sphere_mesh(0.3, 32, 64)
    report = mr.benchmark_meshes(rec.mesh, gt, samples=5000)
    assert 0.0 < report.chamfer_x1000 < 10.0
    assert 0.0 <= report.f_score <= 1.0


def test_analysis():
    fit = mr.empirical_edr(mr.KernelSpec.matern(0.5, 1.0), 300, 1, seed=3)
    assert fit.slope < 0
    x = np.linspace(0, 1, 256, endpoint=False)
    bump = np.exp(-50 * (x - 0.5) ** 2)
    rep = mr.norm_bound_report_1d(bump, 0.5, [0.01, 0.1, 1.0, 10.0])
    assert rep.bound_holds
    assert rep.h_star_numeric == pytest.approx(rep.h_star_closed, rel=1e-6)
    est = mr.rff_kernel_estimate(mr.KernelSpec.matern(0.5, 1.0), np.zeros(3), np.zeros(3), 20000, seed=1)
    assert abs(est - 1.0) < 0.05


def test_io_round_trip(tmp_path):
    mesh = mr.sphere_mesh(0.3, 12, 24)
    path = str(tmp_path / "m.ply")
    mr.save_mesh(mesh, path)
    back = mr.load_mesh(path)
    assert np.max(np.abs(back.vertices - mesh.vertices)) < 1e-6
    data = os.environ.get("MATERN_TEST_DATA")
    if data:
        cloud = mr.load_cloud(os.path.join(data, "sphere_1000.ply"))
        assert len(cloud) == 1000
