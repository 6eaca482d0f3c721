#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <matern/analysis.hpp>
#include <matern/error.hpp>
#include <matern/field.hpp>
#include <matern/io.hpp>
#include <matern/kernel.hpp>
#include <matern/krr.hpp>
#include <matern/mesher.hpp>
#include <matern/metrics.hpp>
#include <matern/parallel.hpp>
#include <matern/shapes.hpp>

namespace py = pybind11;
using namespace matern;

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Eigen::VectorXd eval_many(const ImplicitField& f, const PointMatrix& x, bool world) {
    Eigen::VectorXd out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = eval(f, row3(x, i), world);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Matern kernel implicit surface reconstruction";

    static PyObject* error_type =
        PyErr_NewException("matern_recon._core.MaternError", PyExc_RuntimeError, nullptr);
    m.add_object("MaternError", py::handle(error_type).inc_ref());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type)(py::str(e.what()));
            exc.attr("kind") = to_string(e.kind());
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    m.def("set_num_threads", &set_num_threads, py::arg("threads"));
    m.def("num_threads", &num_threads);

    py::enum_<KernelFamily>(m, "KernelFamily")
        .value("Matern", KernelFamily::Matern)
        .value("Gaussian", KernelFamily::Gaussian)
        .value("ArcCosine", KernelFamily::ArcCosine);

    py::class_<KernelSpec>(m, "KernelSpec")
        .def_static("matern", &KernelSpec::matern, py::arg("nu"), py::arg("h"))
        .def_static("gaussian", &KernelSpec::gaussian, py::arg("h"))
        .def_static("arc_cosine", &KernelSpec::arc_cosine)
        .def_static("from_key", &KernelSpec::from_key, py::arg("key"), py::arg("h") = 1.0)
        .def("with_taper", &KernelSpec::with_taper, py::arg("h_prime") = 0.0, py::arg("nu_prime") = 2.0)
        .def_readonly("family", &KernelSpec::family)
        .def_readonly("nu", &KernelSpec::nu)
        .def_readonly("h", &KernelSpec::h)
        .def_property_readonly("tapered", [](const KernelSpec& s) { return s.taper.has_value(); })
        .def("key", &KernelSpec::key)
        .def("__repr__", [](const KernelSpec& s) { return "KernelSpec(" + s.key() + ", h=" + std::to_string(s.h) + ")"; });

    m.def("eval_kernel", [](const KernelSpec& s, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return eval_kernel(s, as_span(x), as_span(y));
    });
    m.def("kernel_gradient", [](const KernelSpec& s, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return kernel_gradient(s, as_span(x), as_span(y));
    });
    m.def("gram_matrix", [](const KernelSpec& s, const PointMatrix& x, std::optional<PointMatrix> y) {
        return y ? gram_matrix(s, x, *y) : gram_matrix(s, x);
    }, py::arg("spec"), py::arg("x"), py::arg("y") = py::none());
    m.def("spectral_density", [](int d, double nu, double h, const Eigen::VectorXd& omega) {
        return spectral_density(SpectralParams::make(d, nu, h), as_span(omega));
    }, py::arg("d"), py::arg("nu"), py::arg("h"), py::arg("omega"));

    py::class_<OrientedPointCloud>(m, "OrientedPointCloud")
        .def(py::init(&OrientedPointCloud::make), py::arg("points"), py::arg("normals"))
        .def_readonly("points", &OrientedPointCloud::points)
        .def_readonly("normals", &OrientedPointCloud::normals)
        .def("__len__", &OrientedPointCloud::size);

    py::class_<SimilarityTransform>(m, "SimilarityTransform")
        .def_readonly("scale", &SimilarityTransform::scale)
        .def_readonly("translation", &SimilarityTransform::translation);

    py::class_<RidgeSystem>(m, "RidgeSystem")
        .def_readonly("centers", &RidgeSystem::centers)
        .def_readonly("targets", &RidgeSystem::targets)
        .def_readonly("epsilon", &RidgeSystem::epsilon)
        .def_readonly("lambda_", &RidgeSystem::lambda)
        .def_readonly("min_center_distance", &RidgeSystem::min_center_distance);

    py::class_<ImplicitField>(m, "ImplicitField")
        .def_readonly("centers", &ImplicitField::centers)
        .def_readonly("alpha", &ImplicitField::alpha)
        .def_readonly("spec", &ImplicitField::spec)
        .def_readonly("transform", &ImplicitField::transform)
        .def("__call__", &eval_many, py::arg("x"), py::arg("world") = false)
        .def("gradient", [](const ImplicitField& f, const Vec3& x, bool world) { return gradient_auto(f, x, world); },
             py::arg("x"), py::arg("world") = false)
        .def("rkhs_norm", &rkhs_norm);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("relative_residual", &SolveReport::relative_residual)
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("nonzeros", &SolveReport::nonzeros)
        .def_readonly("sparse", &SolveReport::sparse);

    m.def("build_system", &build_system, py::arg("cloud"), py::arg("epsilon") = kDefaultEpsilon,
          py::arg("lambda_") = kDefaultLambda);
    m.def("solve", [](const RidgeSystem& s, const KernelSpec& spec) {
        auto sol = solve(s, spec);
        return py::make_tuple(sol.field, sol.report);
    });
    m.def("normalize", &normalize, py::arg("cloud"), py::arg("padding") = kDefaultPadding);

    py::class_<TriangleMesh>(m, "TriangleMesh")
        .def(py::init([](const PointMatrix& v, const FaceMatrix& f) {
            TriangleMesh mesh;
            mesh.vertices = v;
            mesh.faces = f;
            mesh.validate();
            return mesh;
        }), py::arg("vertices"), py::arg("faces"))
        .def_readonly("vertices", &TriangleMesh::vertices)
        .def_readonly("faces", &TriangleMesh::faces)
        .def_readonly("vertex_normals", &TriangleMesh::vertex_normals)
        .def("euler_characteristic", &TriangleMesh::euler_characteristic)
        .def("is_closed_manifold", &TriangleMesh::is_closed_manifold);

    py::class_<StageTimings>(m, "StageTimings")
        .def_readonly("normalize_s", &StageTimings::normalize_s)
        .def_readonly("assembly_s", &StageTimings::assembly_s)
        .def_readonly("solve_s", &StageTimings::solve_s)
        .def_readonly("extraction_s", &StageTimings::extraction_s);

    py::class_<Reconstruction>(m, "Reconstruction")
        .def_readonly("mesh", &Reconstruction::mesh)
        .def_readonly("field", &Reconstruction::field)
        .def_readonly("solve", &Reconstruction::solve)
        .def_readonly("timings", &Reconstruction::timings);

    m.def("reconstruct", [](const OrientedPointCloud& cloud, const KernelSpec& spec, double epsilon, double lambda,
                            int resolution) {
        ReconstructOptions opt;
        opt.epsilon = epsilon;
        opt.lambda = lambda;
        opt.resolution = resolution;
        return reconstruct(cloud, spec, opt);
    }, py::arg("cloud"), py::arg("spec"), py::arg("epsilon") = kDefaultEpsilon, py::arg("lambda_") = kDefaultLambda,
          py::arg("resolution") = kDefaultResolution, py::call_guard<py::gil_scoped_release>());
    m.def("extract_surface", py::overload_cast<const ImplicitField&, int, double>(&extract_surface),
          py::arg("field"), py::arg("resolution") = kDefaultResolution, py::arg("iso") = 0.0);

    py::class_<SampledSurface>(m, "SampledSurface")
        .def(py::init([](const PointMatrix& p, const PointMatrix& n) { return SampledSurface{p, n}; }),
             py::arg("points"), py::arg("normals"))
        .def_readonly("points", &SampledSurface::points)
        .def_readonly("normals", &SampledSurface::normals);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("chamfer_x1000", &MetricsReport::chamfer_x1000)
        .def_readonly("hausdorff", &MetricsReport::hausdorff)
        .def_readonly("f_score", &MetricsReport::f_score)
        .def_readonly("normal_consistency", &MetricsReport::normal_consistency)
        .def_readonly("sample_count", &MetricsReport::sample_count);

    m.def("sample_mesh", &sample_mesh, py::arg("mesh"), py::arg("n"), py::arg("seed") = 0);
    m.def("chamfer", &chamfer);
    m.def("hausdorff", &hausdorff);
    m.def("f_score", &f_score, py::arg("pred"), py::arg("gt"), py::arg("threshold") = kDefaultFScoreThreshold);
    m.def("normal_consistency", &normal_consistency);
    m.def("benchmark_meshes", &benchmark_meshes, py::arg("pred"), py::arg("gt"),
          py::arg("samples") = kDefaultMetricSamples, py::arg("seed") = 0);
    m.def("point_mesh_distances", &point_mesh_distances);

    m.def("sphere_samples", [](std::int64_t n, double r, std::uint64_t seed) { return shapes::sphere_samples(n, r, seed); },
          py::arg("n"), py::arg("radius"), py::arg("seed") = 0);
    m.def("torus_samples", [](std::int64_t n, double rr, double r, std::uint64_t seed) {
        return shapes::torus_samples(n, rr, r, seed);
    }, py::arg("n"), py::arg("ring_radius"), py::arg("tube_radius"), py::arg("seed") = 0);
    m.def("to_cloud", &shapes::to_cloud);
    m.def("sphere_mesh", &shapes::sphere_mesh, py::arg("radius"), py::arg("rings"), py::arg("segments"));

    py::class_<EdrFit>(m, "EdrFit")
        .def_readonly("slope", &EdrFit::slope)
        .def_readonly("intercept", &EdrFit::intercept)
        .def_readonly("r_squared", &EdrFit::r_squared)
        .def_readonly("eigenvalues", &EdrFit::eigenvalues)
        .def_property_readonly("window", [](const EdrFit& f) {
            return py::make_tuple(f.eigenvalues_used.first, f.eigenvalues_used.last);
        });
    m.def("empirical_edr", [](const KernelSpec& s, int n, int d, std::uint64_t seed) { return empirical_edr(s, n, d, seed); },
          py::arg("spec"), py::arg("n"), py::arg("d"), py::arg("seed") = 0);
    m.def("spectrum_table", [](const KernelSpec& s, int d, double omega_max, int steps) {
        return spectrum_table(s, d, omega_max, steps);
    }, py::arg("spec"), py::arg("d"), py::arg("omega_max"), py::arg("steps"));
    m.def("rff_kernel_estimate", [](const KernelSpec& s, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                    std::int64_t n, std::uint64_t seed) {
        return rff_kernel_estimate(s, as_span(x), as_span(y), n, seed);
    }, py::arg("spec"), py::arg("x"), py::arg("y"), py::arg("num_features"), py::arg("seed") = 0);

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("d", &BoundReport::d)
        .def_readonly("nu", &BoundReport::nu)
        .def_readonly("c1", &BoundReport::c1)
        .def_readonly("c2", &BoundReport::c2)
        .def_readonly("h_star_closed", &BoundReport::h_star_closed)
        .def_readonly("h_star_numeric", &BoundReport::h_star_numeric)
        .def_readonly("bound_values", &BoundReport::bound_values)
        .def_readonly("norm_values", &BoundReport::norm_values)
        .def_readonly("windowed", &BoundReport::windowed)
        .def_readonly("bound_holds", &BoundReport::bound_holds)
        .def("bound_at", &BoundReport::bound_at);
    m.def("norm_bound_report_1d", [](const Eigen::VectorXd& samples, double nu, const std::vector<double>& hs, int padding) {
        ScalarGrid g;
        g.spec.resolution = {static_cast<int>(samples.size()), 1, 1};
        g.spec.spacing = 1.0 / static_cast<double>(samples.size());
        g.values.assign(samples.data(), samples.data() + samples.size());
        BoundOptions opt;
        opt.padding = padding;
        return norm_bound_report(g, nu, hs, opt);
    }, py::arg("samples"), py::arg("nu"), py::arg("h_values"), py::arg("padding") = 1);

    m.def("load_cloud", [](const std::string& p) { return io::load_cloud(p); });
    m.def("save_cloud", &io::save_cloud);
    m.def("load_mesh", [](const std::string& p) { return io::load_mesh(p); });
    m.def("save_mesh", [](const TriangleMesh& mesh, const std::string& p) { io::save_mesh(mesh, p); });
}
