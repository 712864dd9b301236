#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "config_file.hpp"
#include "tvcert/errors.hpp"
#include "tvcert/precertificate.hpp"
#include "tvcert/report.hpp"
#include "tvcert/stability.hpp"
#include "tvcert/tvgrid/level_structure.hpp"
#include "tvcert/tvgrid/phantom.hpp"
#include "tvcert/tvgrid/solver.hpp"

namespace tvcert::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string out_dir = ".";
    unsigned jobs = 1;
    bool reproducible = false;
    std::string config;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out_dir, "Output directory (created if missing)");
    sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--reproducible", c.reproducible, "Omit the timestamp comment from SVG output");
    sub->add_option("--config", c.config, "Flat key=value file; command-line flags win");
}

struct RadialArgs {
    std::vector<double> radii;
    std::vector<double> amps;
    double sigma = 0.2;
    std::string convention = "stddev";
};

void add_radial(CLI::App* sub, RadialArgs& a, bool sigma_required) {
    sub->add_option("--radii", a.radii, "Comma-separated increasing radii")
        ->delimiter(',')
        ->required();
    sub->add_option("--amps", a.amps, "Comma-separated non-zero amplitudes")
        ->delimiter(',')
        ->required();
    if (sigma_required)
        sub->add_option("--sigma", a.sigma, "Blur width")->required();
    sub->add_option("--sigma-convention", a.convention,
                    "Whether --sigma is the kernel's standard deviation or its variance")
        ->check(CLI::IsMember({"stddev", "variance"}));
}

kernels::SigmaConvention convention_of(const std::string& s) {
    return s == "variance" ? kernels::SigmaConvention::Variance
                           : kernels::SigmaConvention::StandardDeviation;
}

struct CertifyArgs {
    double tol_sat = 1e-6;
    double tol_stab = 1e-10;
    double exclusion = 0.02;
    double r_max_factor = 6.0;
    std::size_t min_grid = 4000;
};

void add_certify_options(CLI::App* sub, CertifyArgs& a) {
    sub->add_option("--tol-sat", a.tol_sat, "Saturation tolerance");
    sub->add_option("--tol-stab", a.tol_stab, "Stability tolerance");
    sub->add_option("--exclusion", a.exclusion, "Exclusion window half-width relative to R_i");
    sub->add_option("--r-max-factor", a.r_max_factor, "Scan to R_N + factor * tau");
    sub->add_option("--min-grid", a.min_grid, "Minimum scan points");
}

precert::CertifyOptions to_options(const CertifyArgs& a) {
    precert::CertifyOptions o;
    o.tol_sat = a.tol_sat;
    o.tol_stab = a.tol_stab;
    o.exclusion = a.exclusion;
    o.r_max_factor = a.r_max_factor;
    o.min_grid = a.min_grid;
    return o;
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

class Output {
public:
    explicit Output(const Common& c) : common_(c) { fs::create_directories(c.out_dir); }

    fs::path path(const std::string& name) const { return fs::path(common_.out_dir) / name; }

    std::ofstream open(const std::string& name, bool binary = false) const {
        std::ofstream f(path(name), binary ? std::ios::binary : std::ios::out);
        if (!f) throw Error("cannot write " + path(name).string());
        return f;
    }

    void json_file(const std::string& name, const json& j) const { open(name) << j.dump(2) << '\n'; }

    void svg(const std::string& name, const report::LinePlot& plot) const {
        auto f = open(name);
        std::optional<std::string> comment;
        if (!common_.reproducible) comment = "generated " + timestamp();
        report::write_svg(f, plot, comment);
    }

private:
    const Common& common_;
};

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = n == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
    return v;
}

json radial_parameters(const RadialArgs& a) {
    return {{"radii", a.radii}, {"amplitudes", a.amps}, {"sigma", a.sigma},
            {"sigma_convention", a.convention}};
}

int verdict_exit(precert::Verdict v) {
    return v == precert::Verdict::Nondegenerate ? kOk : kVerdictFailed;
}

// certify ---------------------------------------------------------------

int cmd_certify(const Common& common, const RadialArgs& ra, const CertifyArgs& ca,
                std::size_t profile_points, std::ostream& out) {
    const precert::SimpleRadialSpec spec(ra.radii, ra.amps);
    const kernels::GaussianKernel kernel(ra.sigma, convention_of(ra.convention));
    Output o(common);
    json j;
    j["command"] = "certify";
    j["parameters"] = radial_parameters(ra);
    try {
        const auto rep = precert::certify(spec, kernel, to_options(ca));
        j["report"] = report::to_json(rep);
        o.json_file("certify.json", j);

        const auto pc = precert::solve_precert(spec, kernel);
        const auto grid = linspace(0.0, rep.scan_radius, std::max<std::size_t>(profile_points, 2));
        const auto fv = precert::eval_fv(pc, grid);
        const auto eta = precert::eval_eta_profile(pc, grid);
        auto csv = o.open("fv_profile.csv");
        report::write_csv(csv, {"r", "f_v", "eta_v"}, {grid, fv.values, eta.values});

        report::LinePlot plot;
        plot.title = "f_v, sigma = " + report::format17(ra.sigma) + ", verdict " +
                     precert::to_string(rep.verdict);
        plot.x_label = "r";
        plot.y_label = "f_v(r)";
        plot.series.push_back({"f_v", grid, fv.values, false});
        plot.horizontal_guides = {-1.0, 1.0};
        plot.vertical_markers = ra.radii;
        o.svg("fv_profile.svg", plot);

        out << "verdict " << precert::to_string(rep.verdict) << " feasibility_margin "
            << report::format17(rep.feasibility_margin);
        for (double m : rep.stability_margins) out << " stability_margin " << report::format17(m);
        out << '\n';
        return verdict_exit(rep.verdict);
    } catch (const ConditioningError& e) {
        j["error"] = e.what();
        j["condition"] = e.condition();
        o.json_file("certify.json", j);
        throw;
    }
}

// sweep -----------------------------------------------------------------

int cmd_sweep(const Common& common, const RadialArgs& ra, const CertifyArgs& ca,
              std::vector<double> sigmas, double smin, double smax, double sstep,
              std::ostream& out) {
    if (sigmas.empty()) {
        if (!(sstep > 0.0) || !(smax >= smin))
            throw InvalidArgument("sweep needs --sigmas or a valid --sigma-min/--sigma-max/--sigma-step");
        const auto n = static_cast<std::size_t>(std::floor((smax - smin) / sstep + 1e-9)) + 1;
        for (std::size_t k = 0; k < n; ++k) sigmas.push_back(smin + static_cast<double>(k) * sstep);
    }
    const precert::SimpleRadialSpec spec(ra.radii, ra.amps);
    const auto rows =
        precert::sweep_sigma(spec, sigmas, to_options(ca), convention_of(ra.convention), common.jobs);
    Output o(common);

    const std::size_t N = spec.size();
    auto csv = o.open("sweep.csv");
    csv << "sigma,verdict,feasibility_margin";
    for (std::size_t i = 0; i < N; ++i)
        csv << ",stability_margin_" << i + 1 << ",fv_second_" << i + 1 << ",fv_second_numeric_"
            << i + 1;
    csv << ",error\n";
    json reports = json::array();
    report::Series curve{"f_v''(R_1)", {}, {}, true};
    bool all_ok = true;
    for (const auto& row : rows) {
        csv << report::format17(row.sigma) << ',';
        if (row.report) {
            const auto& r = *row.report;
            csv << precert::to_string(r.verdict) << ',' << report::format17(r.feasibility_margin);
            for (std::size_t i = 0; i < N; ++i)
                csv << ',' << report::format17(r.stability_margins[i]) << ','
                    << report::format17(r.fv_second_closed[i]) << ','
                    << report::format17(r.fv_second_numeric[i]);
            csv << ",\n";
            reports.push_back(report::to_json(r));
            curve.x.push_back(row.sigma);
            curve.y.push_back(r.fv_second_closed[0]);
            all_ok = all_ok && r.verdict == precert::Verdict::Nondegenerate;
        } else {
            csv << "error,nan";
            for (std::size_t i = 0; i < N; ++i) csv << ",nan,nan,nan";
            std::string msg = row.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            csv << ',' << msg << '\n';
            reports.push_back({{"sigma", row.sigma}, {"error", row.error}});
            all_ok = false;
        }
    }
    o.json_file("sweep.json", {{"command", "sweep"}, {"parameters", radial_parameters(ra)},
                               {"rows", reports}});
    report::LinePlot plot;
    plot.title = "f_v''(R_1) against sigma";
    plot.x_label = "sigma";
    plot.y_label = "f_v''(R_1)";
    report::Series line = curve;
    line.points = false;
    line.label.clear();
    plot.series = {line, curve};
    plot.horizontal_guides = {0.0};
    o.svg("sweep.svg", plot);
    out << "rows " << rows.size() << (all_ok ? " all nondegenerate" : " not all nondegenerate")
        << '\n';
    return all_ok ? kOk : kVerdictFailed;
}

// profile ---------------------------------------------------------------

int cmd_profile(const Common& common, const RadialArgs& ra, double r_max, std::size_t points,
                std::ostream& out) {
    const precert::SimpleRadialSpec spec(ra.radii, ra.amps);
    const kernels::GaussianKernel kernel(ra.sigma, convention_of(ra.convention));
    const auto pc = precert::solve_precert(spec, kernel);
    if (!(r_max > 0.0)) r_max = spec.radii().back() + 6.0 * pc.tau();
    const auto grid = linspace(0.0, r_max, std::max<std::size_t>(points, 2));
    const auto fv = precert::eval_fv(pc, grid);
    const auto eta = precert::eval_eta_profile(pc, grid);
    Output o(common);
    auto csv = o.open("profile.csv");
    report::write_csv(csv, {"r", "eta_v", "f_v"}, {grid, eta.values, fv.values});
    report::LinePlot plot;
    plot.title = "eta_v and f_v, sigma = " + report::format17(ra.sigma);
    plot.x_label = "r";
    plot.y_label = "value";
    plot.series = {{"eta_v", grid, eta.values, false}, {"f_v", grid, fv.values, false}};
    plot.horizontal_guides = {-1.0, 1.0};
    plot.vertical_markers = ra.radii;
    o.svg("profile.svg", plot);
    out << "points " << grid.size() << " r_max " << report::format17(r_max) << '\n';
    return kOk;
}

// stability -------------------------------------------------------------

struct StabilityArgs {
    std::optional<double> radius;
    std::optional<double> c;
    int k_max = 20;
};

int cmd_stability(const Common& common, const RadialArgs& ra, const StabilityArgs& sa,
                  std::ostream& out) {
    if (sa.k_max < 0) throw InvalidArgument("--k-max must be non-negative");
    struct Shape {
        double radius, c;
    };
    std::vector<Shape> shapes;
    json params;
    if (sa.radius || sa.c) {
        if (!sa.radius || !sa.c) throw InvalidArgument("--radius and --c go together");
        shapes.push_back({*sa.radius, *sa.c});
        params = {{"radius", *sa.radius}, {"c", *sa.c}};
    } else {
        if (ra.radii.empty())
            throw InvalidArgument("stability needs --radius/--c or --radii/--amps/--sigma");
        const precert::SimpleRadialSpec spec(ra.radii, ra.amps);
        const kernels::GaussianKernel kernel(ra.sigma, convention_of(ra.convention));
        const auto pc = precert::solve_precert(spec, kernel);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            const double R = spec.radius(i);
            shapes.push_back({R, 1.0 / (R * R) + spec.sign(i) * pc.eta_dr(R)});
        }
        params = radial_parameters(ra);
    }
    Output o(common);
    auto csv = o.open("spectrum.csv");
    csv << "shape,k,quotient\n";
    json shapes_json = json::array();
    report::LinePlot plot;
    plot.title = "H1-normalized quotients on circles";
    plot.x_label = "k";
    plot.y_label = "quotient";
    plot.horizontal_guides = {0.0};
    bool all = true;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        const auto spec = stability::circle_spectrum(shapes[s].radius, shapes[s].c, sa.k_max);
        report::Series ser{"shape " + std::to_string(s + 1), {}, {}, true};
        double qmin = INFINITY;
        for (const auto& m : spec) {
            csv << s + 1 << ',' << m.k << ',' << report::format17(m.quotient) << '\n';
            ser.x.push_back(m.k);
            ser.y.push_back(m.quotient);
            qmin = std::min(qmin, m.quotient);
        }
        const bool coercive = stability::is_coercive(spec);
        all = all && coercive;
        shapes_json.push_back({{"radius", shapes[s].radius},
                               {"c", shapes[s].c},
                               {"min_quotient", qmin},
                               {"coercive", coercive}});
        plot.series.push_back(std::move(ser));
        out << "shape " << s + 1 << " c " << report::format17(shapes[s].c)
            << (coercive ? " coercive" : " not coercive") << '\n';
    }
    o.json_file("stability.json",
                {{"command", "stability"}, {"parameters", params}, {"shapes", shapes_json}});
    o.svg("spectrum.svg", plot);
    return all ? kOk : kVerdictFailed;
}

// reconstruct -----------------------------------------------------------

struct ReconstructArgs {
    std::string phantom = "disk";
    double radius = 10.0;
    double inner = 6.0;
    double outer = 12.0;
    std::size_t obs_rows = 50;
    std::size_t obs_cols = 50;
    std::size_t factor = 5;
    double pixel_size = 1.0;
    double blur_sigma = 2.0;
    double lambda = 0.01;
    std::optional<double> lambda_fraction;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::size_t seeds = 1;
    std::size_t max_iter = 20000;
    double gap_tol = 1e-6;
    double threshold = 0.25;
    std::size_t min_pixels = 1;
};

int cmd_reconstruct(const Common& common, const ReconstructArgs& a, std::ostream& out) {
    using namespace tvgrid;
    if (a.seeds == 0) throw InvalidArgument("--seeds must be positive");
    Phantom ph;
    switch (Phantom::parse_kind(a.phantom)) {
        case Phantom::Kind::Disk: ph = Phantom::disk(a.radius); break;
        case Phantom::Kind::Annulus: ph = Phantom::annulus(a.inner, a.outer); break;
        case Phantom::Kind::ThreeShapes: ph = Phantom::three_shapes(); break;
    }
    const ForwardBlurSubsample op(a.blur_sigma, a.factor, a.obs_rows, a.obs_cols, a.pixel_size);
    const GridImage u0 = make_phantom(ph, op.fine_rows(), op.fine_cols(), a.pixel_size);
    const GridImage y0 = op.forward(u0);
    Output o(common);
    write_grid(o.path("u0.grid").string(), u0);

    struct Run {
        std::uint64_t seed;
        GridImage y;
        double lambda = 0.0;
        std::optional<double> lambda_max;
        std::optional<SolveResult> result;
        bool converged = false;
        std::string error;
    };
    std::vector<Run> runs(a.seeds);
    for (std::size_t s = 0; s < a.seeds; ++s) runs[s].seed = a.seed + s;
    SolveParams sp;
    sp.max_iter = a.max_iter;
    sp.gap_tol = a.gap_tol;

    parallel_for(runs.size(), common.jobs, [&](std::size_t s) {
        Run& run = runs[s];
        run.y = add_noise(y0, a.noise, run.seed);
        run.lambda = a.lambda;
        if (a.lambda_fraction) {
            run.lambda_max = lambda_max(op, run.y);
            run.lambda = *a.lambda_fraction * *run.lambda_max;
        }
        try {
            run.result = solve_tv(op, run.y, run.lambda, sp);
            run.converged = true;
        } catch (const NotConverged& e) {
            run.result = e.result();
            run.error = e.what();
        }
    });

    json runs_json = json::array();
    bool all_converged = true;
    for (const Run& run : runs) {
        const std::string suffix = a.seeds > 1 ? "_seed" + std::to_string(run.seed) : "";
        write_grid(o.path("y" + suffix + ".grid").string(), run.y);
        json rj{{"seed", run.seed}, {"lambda", run.lambda}, {"converged", run.converged}};
        if (run.lambda_max) rj["lambda_max"] = *run.lambda_max;
        if (!run.error.empty()) rj["error"] = run.error;
        if (run.result) {
            const SolveResult& r = *run.result;
            write_grid(o.path("u" + suffix + ".grid").string(), r.u);
            const auto st = level_structure(r.u, a.threshold, a.min_pixels);
            auto csv = o.open("structure" + suffix + ".csv");
            write_level_structure_csv(csv, st);
            rj["primal_value"] = r.primal_value;
            rj["dual_value"] = r.dual_value;
            rj["gap"] = r.gap;
            rj["normalized_gap"] = r.normalized_gap();
            rj["iterations"] = r.iterations;
            rj["structure"] = report::to_json(st);
            out << "seed " << run.seed << " lambda " << report::format17(run.lambda)
                << " components " << st.component_count()
                << (run.converged ? " converged" : " not converged") << '\n';
        }
        all_converged = all_converged && run.converged;
        runs_json.push_back(rj);
    }
    json params{{"phantom", a.phantom},     {"radius", a.radius},
                {"inner", a.inner},         {"outer", a.outer},
                {"obs_rows", a.obs_rows},   {"obs_cols", a.obs_cols},
                {"factor", a.factor},       {"pixel_size", a.pixel_size},
                {"blur_sigma", a.blur_sigma}, {"noise", a.noise},
                {"threshold", a.threshold}, {"min_pixels", a.min_pixels},
                {"max_iter", a.max_iter},   {"gap_tol", a.gap_tol}};
    if (a.lambda_fraction) params["lambda_fraction"] = *a.lambda_fraction;
    else params["lambda"] = a.lambda;
    o.json_file("structure.json", {{"command", "reconstruct"}, {"parameters", params}, {"runs", runs_json}});
    return all_converged ? kOk : kNotConverged;
}

// gnorm -----------------------------------------------------------------

struct GnormArgs {
    std::size_t grid = 300;
    double half_width = 3.0;
    double scale = 1.0;
    bool zero = false;
    std::string input;
    double tol = 1e-3;
    std::size_t max_iter = 20000;
};

int cmd_gnorm(const Common& common, const RadialArgs& ra, const GnormArgs& ga, std::ostream& out) {
    using namespace tvgrid;
    if (ga.grid == 0 || !(ga.half_width > 0.0)) throw InvalidArgument("--grid and --half-width must be positive");
    Output o(common);
    json j{{"command", "gnorm"}};
    GridImage eta;
    std::optional<double> sup_fv;
    if (!ga.input.empty()) {
        if (!fs::is_regular_file(ga.input)) throw InvalidArgument("cannot read grid file " + ga.input);
        eta = read_grid(ga.input);
        j["parameters"] = {{"input", ga.input}, {"scale", ga.scale}};
    } else {
        const double h = 2.0 * ga.half_width / static_cast<double>(ga.grid);
        if (ga.zero) {
            eta = GridImage(ga.grid, ga.grid, h);
        } else {
            const precert::SimpleRadialSpec spec(ra.radii, ra.amps);
            const kernels::GaussianKernel kernel(ra.sigma, convention_of(ra.convention));
            const auto pc = precert::solve_precert(spec, kernel);
            eta = rasterize([&](double x, double y) { return pc.eta(std::hypot(x, y)); }, ga.grid,
                            ga.grid, h);
            const auto rep = precert::certify(spec, kernel);
            double s = rep.sup_outside;
            for (double w : rep.window_max) s = std::max(s, w);
            sup_fv = std::abs(ga.scale) * s;
        }
        j["parameters"] = radial_parameters(ra);
        j["parameters"]["grid"] = ga.grid;
        j["parameters"]["half_width"] = ga.half_width;
        j["parameters"]["scale"] = ga.scale;
        j["parameters"]["zero"] = ga.zero;
    }
    for (double& v : eta.data()) v *= ga.scale;
    write_grid(o.path("eta.grid").string(), eta);

    GnormParams gp;
    gp.tol = ga.tol;
    gp.max_iter = ga.max_iter;
    GridImage b = eta;
    for (double& v : b.data()) v *= eta.pixel_size();
    try {
        const auto r = discrete_gnorm_detailed(b, gp);
        const bool feasible = r.value <= 1.0 + ga.tol;
        j["value"] = r.value;
        j["lower_bound"] = r.lower_bound;
        j["iterations"] = r.iterations;
        j["divergence_residual"] = r.divergence_residual;
        j["feasible"] = feasible;
        if (sup_fv) j["sup_abs_fv"] = *sup_fv;
        o.json_file("gnorm.json", j);
        out << "gnorm " << report::format17(r.value) << (feasible ? " feasible" : " infeasible")
            << '\n';
        return feasible ? kOk : kVerdictFailed;
    } catch (const NotConverged& e) {
        j["error"] = e.what();
        o.json_file("gnorm.json", j);
        throw;
    }
}

/// Appends config entries as flags for options the command line left unset.
std::vector<std::string> merge_config(CLI::App* sub, std::vector<std::string> args,
                                      const std::map<std::string, std::string>& config) {
    for (const auto& [key, value] : config) {
        if (key == "config") continue;
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw InvalidArgument("unknown config key '" + key + "' for " + sub->get_name());
        if (has_flag(args, key)) continue;
        if (opt->get_expected_max() == 0) {
            if (value == "true" || value == "1" || value == "yes") args.push_back("--" + key);
            else if (value != "false" && value != "0" && value != "no")
                throw InvalidArgument("config key '" + key + "' expects true/false");
        } else {
            args.push_back("--" + key + "=" + value);
        }
    }
    return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certificates and discrete checks for TV deconvolution of radial shapes", "tvcert"};
    app.require_subcommand(1);

    Common common;
    RadialArgs radial;
    CertifyArgs cert;
    std::size_t profile_points = 2001;
    std::vector<double> sigmas;
    double smin = 0.0, smax = -1.0, sstep = 0.0;
    double r_max = 0.0;
    StabilityArgs stab;
    ReconstructArgs rec;
    GnormArgs gn;

    auto* certify = app.add_subcommand("certify", "Certify a radial configuration at one blur width");
    add_common(certify, common);
    add_radial(certify, radial, true);
    add_certify_options(certify, cert);
    certify->add_option("--profile-points", profile_points, "Samples in the f_v profile");

    auto* sweep = app.add_subcommand("sweep", "Certify over a list of blur widths");
    add_common(sweep, common);
    add_radial(sweep, radial, false);
    add_certify_options(sweep, cert);
    sweep->add_option("--sigmas", sigmas, "Comma-separated blur widths")->delimiter(',');
    sweep->add_option("--sigma-min", smin);
    sweep->add_option("--sigma-max", smax);
    sweep->add_option("--sigma-step", sstep);

    auto* profile = app.add_subcommand("profile", "Dump eta_v and f_v on a radial grid");
    add_common(profile, common);
    add_radial(profile, radial, true);
    profile->add_option("--r-max", r_max, "Profile extent (default R_N + 6 tau)");
    profile->add_option("--points", profile_points, "Samples");

    auto* stability = app.add_subcommand("stability", "Circle spectrum of the second shape derivative");
    add_common(stability, common);
    stability->add_option("--radii", radial.radii)->delimiter(',');
    stability->add_option("--amps", radial.amps)->delimiter(',');
    stability->add_option("--sigma", radial.sigma);
    stability->add_option("--sigma-convention", radial.convention)
        ->check(CLI::IsMember({"stddev", "variance"}));
    stability->add_option("--radius", stab.radius, "Circle radius (with --c)");
    stability->add_option("--c", stab.c, "Constant zeroth-order coefficient (with --radius)");
    stability->add_option("--k-max", stab.k_max, "Highest Fourier mode");

    auto* reconstruct = app.add_subcommand("reconstruct", "Simulate, solve and analyse a TV reconstruction");
    add_common(reconstruct, common);
    reconstruct->add_option("--phantom", rec.phantom)
        ->check(CLI::IsMember({"disk", "annulus", "three_shapes"}));
    reconstruct->add_option("--radius", rec.radius, "Disk radius");
    reconstruct->add_option("--inner", rec.inner, "Annulus inner radius");
    reconstruct->add_option("--outer", rec.outer, "Annulus outer radius");
    reconstruct->add_option("--obs-rows", rec.obs_rows);
    reconstruct->add_option("--obs-cols", rec.obs_cols);
    reconstruct->add_option("--factor", rec.factor, "Subsampling stride");
    reconstruct->add_option("--pixel-size", rec.pixel_size);
    reconstruct->add_option("--blur-sigma", rec.blur_sigma);
    reconstruct->add_option("--lambda", rec.lambda);
    reconstruct->add_option("--lambda-fraction", rec.lambda_fraction,
                            "lambda as a multiple of the measured lambda_max");
    reconstruct->add_option("--noise", rec.noise, "Noise standard deviation per observation pixel");
    reconstruct->add_option("--seed", rec.seed);
    reconstruct->add_option("--seeds", rec.seeds, "Number of consecutive seeds");
    reconstruct->add_option("--max-iter", rec.max_iter);
    reconstruct->add_option("--gap-tol", rec.gap_tol);
    reconstruct->add_option("--threshold", rec.threshold, "Level-set threshold fraction");
    reconstruct->add_option("--min-pixels", rec.min_pixels);

    auto* gnorm = app.add_subcommand("gnorm", "Discrete dual norm of a rasterized certificate");
    add_common(gnorm, common);
    gnorm->add_option("--radii", radial.radii)->delimiter(',');
    gnorm->add_option("--amps", radial.amps)->delimiter(',');
    gnorm->add_option("--sigma", radial.sigma);
    gnorm->add_option("--sigma-convention", radial.convention)
        ->check(CLI::IsMember({"stddev", "variance"}));
    gnorm->add_option("--grid", gn.grid, "Pixels per side");
    gnorm->add_option("--half-width", gn.half_width, "Domain is [-w, w]^2");
    gnorm->add_option("--scale", gn.scale, "Multiply the field by this factor");
    gnorm->add_flag("--zero", gn.zero, "Use the zero field");
    gnorm->add_option("--input", gn.input, "Read the field from a grid file instead");
    gnorm->add_option("--tol", gn.tol);
    gnorm->add_option("--max-iter", gn.max_iter);

    try {
        std::vector<std::string> argv = args;
        if (!argv.empty()) {
            if (auto cfg = flag_value(argv, "config")) {
                if (CLI::App* sub = app.get_subcommand_no_throw(argv.front()))
                    argv = merge_config(sub, argv, read_config_file(*cfg));
            }
        }
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (gnorm->parsed() && radial.radii.empty()) {
            radial.radii = {1.0};
            radial.amps = {1.0};
        }
        if (*certify) return cmd_certify(common, radial, cert, profile_points, out);
        if (*sweep) return cmd_sweep(common, radial, cert, sigmas, smin, smax, sstep, out);
        if (*profile) return cmd_profile(common, radial, r_max, profile_points, out);
        if (*stability) return cmd_stability(common, radial, stab, out);
        if (*reconstruct) return cmd_reconstruct(common, rec, out);
        if (*gnorm) return cmd_gnorm(common, radial, gn, out);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidDims& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ConditioningError& e) {
        err << "conditioning error: " << e.what() << '\n';
        return kConditioning;
    } catch (const tvgrid::NotConverged& e) {
        err << "not converged: " << e.what() << '\n';
        return kNotConverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kConfigError;
}

}  // namespace tvcert::cli
