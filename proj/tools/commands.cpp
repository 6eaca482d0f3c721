#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <new>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "matern/analysis.hpp"
#include "matern/error.hpp"
#include "matern/io.hpp"
#include "matern/mesher.hpp"
#include "matern/metrics.hpp"
#include "matern/parallel.hpp"
#include "matern/shapes.hpp"

namespace matern::cli {

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

KernelSpec make_spec(const RunConfig& c) {
    KernelSpec spec = KernelSpec::from_key(c.kernel, c.h);
    if (c.taper_h) spec = spec.with_taper(*c.taper_h);
    spec.validate();
    return spec;
}

ReconstructOptions make_options(const RunConfig& c) {
    ReconstructOptions o;
    o.epsilon = c.epsilon;
    o.lambda = c.lambda;
    o.resolution = c.resolution;
    return o;
}

// Writes to the file when a path is given, else to the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            os_ = &fallback;
        } else {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) fail(ErrorKind::Io, "cannot write " + path);
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

}  // namespace

std::string RunConfig::describe() const {
    std::ostringstream os;
    os << "kernel=" << kernel << " h=" << fmt_double(h) << " lambda=" << fmt_double(lambda)
       << " epsilon=" << fmt_double(epsilon) << " resolution=" << resolution
       << " taper_h=" << (taper_h ? fmt_double(*taper_h) : std::string("none")) << " threads=" << num_threads()
       << " seed=" << seed;
    return os.str();
}

int report_failure(std::ostream& err) {
    try {
        throw;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return e.is_usage_error() ? kExitUsage : kExitNumeric;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

int cmd_reconstruct(const std::string& input, const std::string& output, const RunConfig& config,
                    std::ostream& out, std::ostream& err) {
    try {
        const KernelSpec spec = make_spec(config);
        const OrientedPointCloud cloud = io::load_cloud(input);
        // Fail on an unusable output path before spending time on the solve.
        io::mesh_format_from_path(output);
        const Reconstruction r = reconstruct(cloud, spec, make_options(config));
        io::save_mesh(r.mesh, output);
        out << "points: " << cloud.size() << "\n"
            << "solver: " << (r.solve.sparse ? "sparse" : "dense");
        if (r.solve.sparse) out << " (nonzeros " << r.solve.nonzeros << ", iterations " << r.solve.iterations << ")";
        out << "\n"
            << "relative residual: " << fmt_double(r.solve.relative_residual) << "\n"
            << std::fixed << std::setprecision(3) << "assembly: " << r.timings.assembly_s << " s\n"
            << "solve: " << r.timings.solve_s << " s\n"
            << "extraction: " << r.timings.extraction_s << " s\n"
            << std::defaultfloat << "mesh: " << r.mesh.vertex_count() << " vertices, " << r.mesh.face_count()
            << " faces -> " << output << "\n";
        return kExitOk;
    } catch (...) {
        return report_failure(err);
    }
}

int cmd_benchmark(const std::string& pred, const std::string& gt, std::int64_t samples, std::uint64_t seed,
                  const std::string& csv_path, std::ostream& out, std::ostream& err) {
    try {
        const TriangleMesh a = io::load_mesh(pred);
        const TriangleMesh b = io::load_mesh(gt);
        const MetricsReport m = benchmark_meshes(a, b, samples, seed);
        const std::string text = MetricsReport::csv_header() + "\n" + m.csv_row() + "\n";
        out << text;
        if (!csv_path.empty()) {
            Sink file(csv_path, out);
            *file << text;
        }
        return kExitOk;
    } catch (...) {
        return report_failure(err);
    }
}

int cmd_sweep(const std::string& input, const std::string& gt, const std::vector<double>& h_list,
              const std::vector<double>& lambdas, const RunConfig& config, std::int64_t samples,
              const std::string& csv_path, std::ostream& out, std::ostream& err) {
    try {
        if (h_list.empty()) fail(ErrorKind::InvalidInput, "sweep needs at least one h");
        const OrientedPointCloud cloud = io::load_cloud(input);
        const TriangleMesh truth = io::load_mesh(gt);
        const std::vector<double> lams = lambdas.empty() ? std::vector<double>{config.lambda} : lambdas;
        Sink sink(csv_path, out);
        *sink << "h,lambda," << MetricsReport::csv_header() << ",relative_residual\n";
        for (double lam : lams) {
            for (double h : h_list) {
                RunConfig c = config;
                c.h = h;
                c.lambda = lam;
                const Reconstruction r = reconstruct(cloud, make_spec(c), make_options(c));
                const MetricsReport m = benchmark_meshes(r.mesh, truth, samples, config.seed);
                *sink << fmt_double(h) << ',' << fmt_double(lam) << ',' << m.csv_row() << ','
                      << fmt_double(r.solve.relative_residual) << "\n";
                sink.operator*().flush();
            }
        }
        return kExitOk;
    } catch (...) {
        return report_failure(err);
    }
}

namespace {

constexpr double kPi = 3.14159265358979323846;

double bound_test_function(const std::string& name, std::span<const double> x) {
    double r2 = 0.0;
    for (double v : x) r2 += (v - 0.5) * (v - 0.5);
    if (name == "bump") return std::exp(-50.0 * r2);
    if (name == "two-bumps") {
        double a = 0.0;
        double b = 0.0;
        for (double v : x) {
            a += (v - 0.3) * (v - 0.3);
            b += (v - 0.7) * (v - 0.7);
        }
        return std::exp(-200.0 * a) + 0.5 * std::exp(-200.0 * b);
    }
    if (name == "sine-window") {
        double w = 1.0;
        for (double v : x) w *= std::pow(std::sin(kPi * v), 2);
        return std::sin(2.0 * kPi * 6.0 * x[0]) * w;
    }
    fail(ErrorKind::InvalidInput, "unknown test function '" + name + "'");
}

ScalarGrid read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "input not found: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": malformed number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            fail(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(ErrorKind::Parse, path + ": no samples");
    const bool one_d = rows.front().size() == 1;
    const int n = static_cast<int>(rows.size());
    ScalarGrid g;
    g.spec.resolution = {n, one_d ? 1 : static_cast<int>(rows.front().size()), 1};
    g.spec.spacing = 1.0 / n;
    g.values.resize(g.spec.node_count());
    for (int j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < rows[static_cast<std::size_t>(j)].size(); ++i) {
            // One column: rows are the x axis. Otherwise rows are y and columns x.
            if (one_d) {
                g.values[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j)][0];
            } else {
                g.values[g.index(static_cast<int>(i), j, 0)] = rows[static_cast<std::size_t>(j)][i];
            }
        }
    }
    return g;
}

struct AnalyzeArgs {
    std::string kernel = "matern32";
    double h = 1.0;
    int d = 1;
    double omega_max = 0.0;
    int steps = 256;
    int n = 2000;
    std::uint64_t seed = 0;
    int first = 0;
    int last = 0;
    std::int64_t features = 100000;
    int pairs = 100;
    double nu = 0.5;
    std::string input;
    std::string function = "bump";
    int grid = 256;
    double h_min = 1e-2;
    double h_max = 1e2;
    int h_count = 30;
    int padding = 1;
    std::string out_path;
};

int analyze_spectrum(const AnalyzeArgs& a, std::ostream& out) {
    const KernelSpec spec = KernelSpec::from_key(a.kernel, a.h);
    const double wmax = a.omega_max > 0.0 ? a.omega_max : 2.0 / a.h;
    Sink sink(a.out_path, out);
    *sink << "omega,density\n";
    for (const auto& [w, p] : spectrum_table(spec, a.d, wmax, a.steps)) {
        *sink << fmt_double(w) << ',' << fmt_double(p) << "\n";
    }
    return kExitOk;
}

int analyze_edr(const AnalyzeArgs& a, std::ostream& out) {
    const KernelSpec spec = KernelSpec::from_key(a.kernel, a.h);
    const EdrFit fit = empirical_edr(spec, a.n, a.d, a.seed, {a.first, a.last});
    if (!a.out_path.empty()) {
        Sink sink(a.out_path, out);
        *sink << "index,eigenvalue\n";
        for (Eigen::Index s = 0; s < fit.eigenvalues.size(); ++s) {
            *sink << (s + 1) << ',' << fmt_double(fit.eigenvalues[s]) << "\n";
        }
    }
    out << "kernel,h,d,n,slope,intercept,r_squared,first,last\n"
        << a.kernel << ',' << fmt_double(a.h) << ',' << a.d << ',' << a.n << ',' << fmt_double(fit.slope) << ','
        << fmt_double(fit.intercept) << ',' << fmt_double(fit.r_squared) << ',' << fit.eigenvalues_used.first << ','
        << fit.eigenvalues_used.last << "\n";
    return kExitOk;
}

int analyze_rff(const AnalyzeArgs& a, std::ostream& out) {
    const KernelSpec spec = KernelSpec::from_key(a.kernel, a.h);
    if (a.d < 1) fail(ErrorKind::InvalidInput, "--d must be >= 1");
    if (a.pairs < 1) fail(ErrorKind::InvalidInput, "--pairs must be >= 1");
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Sink sink(a.out_path, out);
    *sink << "pair,distance,estimate,exact,abs_error\n";
    std::vector<double> x(static_cast<std::size_t>(a.d));
    std::vector<double> y(static_cast<std::size_t>(a.d));
    for (int p = 0; p < a.pairs; ++p) {
        for (int c = 0; c < a.d; ++c) {
            x[static_cast<std::size_t>(c)] = uni(rng);
            y[static_cast<std::size_t>(c)] = uni(rng);
        }
        const std::uint64_t feature_seed = rng();
        const double est = spec.family == KernelFamily::Gaussian
                               ? rff_gaussian_kernel_estimate(a.h, x, y, a.features, feature_seed)
                               : rff_kernel_estimate(spec, x, y, a.features, feature_seed);
        const double exact = eval_kernel(spec, x, y);
        double dist = 0.0;
        for (int c = 0; c < a.d; ++c) dist += std::pow(x[static_cast<std::size_t>(c)] - y[static_cast<std::size_t>(c)], 2);
        *sink << p << ',' << fmt_double(std::sqrt(dist)) << ',' << fmt_double(est) << ',' << fmt_double(exact) << ','
              << fmt_double(std::abs(est - exact)) << "\n";
    }
    return kExitOk;
}

int analyze_bound(const AnalyzeArgs& a, std::ostream& out) {
    const ScalarGrid grid = a.input.empty()
                                ? sample_unit_grid(a.d, a.grid, [&](std::span<const double> x) {
                                      return bound_test_function(a.function, x);
                                  })
                                : read_grid_csv(a.input);
    if (a.h_count < 1 || !(a.h_min > 0.0) || !(a.h_max >= a.h_min)) {
        fail(ErrorKind::InvalidInput, "need h_count >= 1 and 0 < h_min <= h_max");
    }
    std::vector<double> hs;
    for (int i = 0; i < a.h_count; ++i) {
        const double t = a.h_count == 1 ? 0.0 : static_cast<double>(i) / (a.h_count - 1);
        hs.push_back(a.h_min * std::pow(a.h_max / a.h_min, t));
    }
    BoundOptions opt;
    opt.padding = a.padding;
    const BoundReport r = norm_bound_report(grid, a.nu, hs, opt);
    Sink sink(a.out_path, out);
    *sink << "h,bound,norm\n";
    for (std::size_t i = 0; i < hs.size(); ++i) {
        *sink << fmt_double(hs[i]) << ',' << fmt_double(r.bound_values[i].second) << ','
              << fmt_double(r.norm_values[i].second) << "\n";
    }
    out << "# c1=" << fmt_double(r.c1) << " c2=" << fmt_double(r.c2) << "\n"
        << "# h_star_closed=" << fmt_double(r.h_star_closed) << " h_star_numeric=" << fmt_double(r.h_star_numeric)
        << " relative_difference=" << fmt_double(std::abs(r.h_star_numeric - r.h_star_closed) / r.h_star_closed)
        << "\n"
        << "# windowed=" << (r.windowed ? "yes" : "no") << " bound_holds=" << (r.bound_holds ? "yes" : "no") << "\n";
    return kExitOk;
}

int synth(const std::string& shape, std::int64_t n, std::uint64_t seed, double radius, double ring, double tube,
          const std::string& cloud_path, const std::string& mesh_path, int mesh_res, std::ostream& out) {
    SampledSurface s;
    TriangleMesh m;
    if (shape == "sphere") {
        s = shapes::sphere_samples(n, radius, seed);
        if (!mesh_path.empty()) m = shapes::sphere_mesh(radius, mesh_res, 2 * mesh_res);
    } else {
        s = shapes::torus_samples(n, ring, tube, seed);
        if (!mesh_path.empty()) m = shapes::torus_mesh(ring, tube, 2 * mesh_res, mesh_res);
    }
    if (!cloud_path.empty()) io::save_cloud(shapes::to_cloud(s), cloud_path);
    if (!mesh_path.empty()) io::save_mesh(m, mesh_path);
    out << shape << ": " << n << " samples";
    if (!cloud_path.empty()) out << " -> " << cloud_path;
    if (!mesh_path.empty()) out << ", mesh -> " << mesh_path;
    out << "\n";
    return kExitOk;
}

void apply_threads(int requested) {
    int threads = requested;
    if (threads <= 0) {
        if (const char* env = std::getenv("RECON_THREADS")) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                fail(ErrorKind::InvalidInput, std::string("RECON_THREADS is not an integer: ") + env);
            }
        }
    }
    set_num_threads(threads);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Implicit surface reconstruction with Matern kernels"};
    // "--h" is the bandwidth, so help gets no short form.
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig config;
    app.add_option("--threads", config.threads, "Worker threads (default: RECON_THREADS, else hardware)")
        ->check(CLI::NonNegativeNumber);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    const std::vector<std::string> kernel_keys{"matern12", "matern32", "matern52", "gaussian", "arccos"};
    auto add_run_options = [&](CLI::App* sub, bool with_h) {
        sub->add_option("--kernel", config.kernel, "Kernel key")->check(CLI::IsMember(kernel_keys))->capture_default_str();
        if (with_h) sub->add_option("--h", config.h, "Bandwidth")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--lambda", config.lambda, "Ridge parameter")->check(CLI::NonNegativeNumber)->capture_default_str();
        sub->add_option("--epsilon", config.epsilon, "Normal offset")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--resolution", config.resolution, "Grid nodes per axis")->check(CLI::Range(16, 1024))->capture_default_str();
        sub->add_option("--taper-h", config.taper_h, "Taper cutoff h' (enables the sparse solver)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", config.seed, "Seed")->capture_default_str();
    };

    std::string input;
    std::string output;
    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a mesh from an oriented point cloud");
    rec->add_option("input", input, "Point cloud (.ply, .obj, .xyz)")->required();
    rec->add_option("output", output, "Output mesh (.obj, .ply)")->required();
    add_run_options(rec, true);

    std::string pred;
    std::string gt;
    std::int64_t samples = kDefaultMetricSamples;
    std::string csv_path;
    auto* bench = app.add_subcommand("benchmark", "Compare a predicted mesh to a ground-truth mesh");
    bench->add_option("pred", pred, "Predicted mesh")->required();
    bench->add_option("gt", gt, "Ground-truth mesh")->required();
    bench->add_option("--samples", samples, "Surface samples per mesh")->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_option("--seed", config.seed, "Sampling seed")->capture_default_str();
    bench->add_option("--csv", csv_path, "Also write the CSV here");

    std::vector<double> h_list;
    std::vector<double> lambdas;
    auto* sweep = app.add_subcommand("sweep", "Reconstruct and benchmark over a list of bandwidths");
    sweep->add_option("input", input, "Point cloud")->required();
    sweep->add_option("gt", gt, "Ground-truth mesh")->required();
    sweep->add_option("--h-list", h_list, "Comma-separated bandwidths")->delimiter(',')->required();
    sweep->add_option("--lambdas", lambdas, "Comma-separated ridge parameters")->delimiter(',');
    sweep->add_option("--samples", samples, "Surface samples per mesh")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--csv", csv_path, "Write the CSV here instead of stdout");
    add_run_options(sweep, false);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Spectral and bandwidth analysis");
    analyze->require_subcommand(1);
    auto* spectrum = analyze->add_subcommand("spectrum", "Tabulate the spectral density");
    auto* edr = analyze->add_subcommand("edr", "Empirical eigenvalue decay rate");
    auto* rff = analyze->add_subcommand("rff", "Random Fourier feature kernel estimates");
    auto* bound = analyze->add_subcommand("bound", "RKHS norm bound and optimal bandwidth");
    for (auto* sub : {spectrum, edr, rff}) {
        sub->add_option("--kernel", an.kernel, "Kernel key")->check(CLI::IsMember(kernel_keys))->capture_default_str();
        sub->add_option("--h", an.h, "Bandwidth")->check(CLI::PositiveNumber)->capture_default_str();
        sub->add_option("--d", an.d, "Input dimension")->check(CLI::Range(1, 3))->capture_default_str();
        sub->add_option("--seed", an.seed, "Seed")->capture_default_str();
    }
    for (auto* sub : {spectrum, edr, rff, bound}) sub->add_option("--out", an.out_path, "CSV path (default stdout)");
    spectrum->add_option("--omega-max", an.omega_max, "Largest |omega| (default 2/h)");
    spectrum->add_option("--steps", an.steps, "Rows")->check(CLI::Range(2, 1000000))->capture_default_str();
    edr->add_option("--n", an.n, "Points")->check(CLI::Range(256, 20000))->capture_default_str();
    edr->add_option("--first", an.first, "First eigenvalue index of the fit (1-based)");
    edr->add_option("--last", an.last, "Last eigenvalue index of the fit");
    rff->add_option("--features", an.features, "Random features")->check(CLI::PositiveNumber)->capture_default_str();
    rff->add_option("--pairs", an.pairs, "Random (x, y) pairs")->check(CLI::PositiveNumber)->capture_default_str();
    bound->add_option("--nu", an.nu, "Smoothness")->check(CLI::PositiveNumber)->capture_default_str();
    bound->add_option("--input", an.input, "CSV samples on [0,1)^d (one column: d=1)");
    bound->add_option("--function", an.function, "Built-in test function")
        ->check(CLI::IsMember({"bump", "two-bumps", "sine-window"}))
        ->capture_default_str();
    bound->add_option("--d", an.d, "Dimension of the built-in function")->check(CLI::Range(1, 2))->capture_default_str();
    bound->add_option("--grid", an.grid, "Nodes per axis for the built-in function")->capture_default_str();
    bound->add_option("--h-min", an.h_min, "Smallest h")->capture_default_str();
    bound->add_option("--h-max", an.h_max, "Largest h")->capture_default_str();
    bound->add_option("--h-count", an.h_count, "Log-spaced h values")->capture_default_str();
    bound->add_option("--padding", an.padding, "Zero-padding factor per axis")->check(CLI::PositiveNumber)->capture_default_str();

    std::string shape;
    std::int64_t synth_n = 1000;
    double radius = 0.3;
    double ring = 0.3;
    double tube = 0.1;
    std::string cloud_out;
    std::string mesh_out;
    int mesh_res = 128;
    auto* syn = app.add_subcommand("synth", "Write synthetic benchmark clouds and ground-truth meshes");
    syn->add_option("shape", shape, "sphere or torus")->check(CLI::IsMember({"sphere", "torus"}))->required();
    syn->add_option("--n", synth_n, "Samples")->check(CLI::PositiveNumber)->capture_default_str();
    syn->add_option("--seed", config.seed, "Seed")->capture_default_str();
    syn->add_option("--radius", radius, "Sphere radius")->capture_default_str();
    syn->add_option("--ring", ring, "Torus ring radius")->capture_default_str();
    syn->add_option("--tube", tube, "Torus tube radius")->capture_default_str();
    syn->add_option("--cloud", cloud_out, "Output point cloud (.ply)");
    syn->add_option("--mesh", mesh_out, "Output ground-truth mesh (.obj, .ply)");
    syn->add_option("--mesh-res", mesh_res, "Ground-truth mesh rings")->check(CLI::Range(3, 4096))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        auto logger = spdlog::get("matern");
        if (!logger) logger = spdlog::stderr_color_mt("matern");
        spdlog::set_default_logger(logger);
        spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
        apply_threads(config.threads);
    } catch (...) {
        return report_failure(err);
    }

    if (*rec) {
        err << "config: " << config.describe() << "\n";
        return cmd_reconstruct(input, output, config, out, err);
    }
    if (*bench) {
        err << "config: samples=" << samples << " seed=" << config.seed << " threads=" << num_threads() << "\n";
        return cmd_benchmark(pred, gt, samples, config.seed, csv_path, out, err);
    }
    if (*sweep) {
        err << "config: " << config.describe() << "\n";
        return cmd_sweep(input, gt, h_list, lambdas, config, samples, csv_path, out, err);
    }
    try {
        if (*syn) return synth(shape, synth_n, config.seed, radius, ring, tube, cloud_out, mesh_out, mesh_res, out);
        if (*bound) {
            err << "config: nu=" << fmt_double(an.nu) << " input=" << (an.input.empty() ? an.function : an.input)
                << " d=" << an.d << " grid=" << an.grid << " padding=" << an.padding << " threads=" << num_threads()
                << "\n";
        } else {
            err << "config: kernel=" << an.kernel << " h=" << fmt_double(an.h) << " d=" << an.d << " seed=" << an.seed
                << " threads=" << num_threads() << "\n";
        }
        if (*spectrum) return analyze_spectrum(an, out);
        if (*edr) return analyze_edr(an, out);
        if (*rff) return analyze_rff(an, out);
        if (*bound) return analyze_bound(an, out);
    } catch (...) {
        return report_failure(err);
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace matern::cli
