#include "ifslearn/pipeline.hpp"
#include "ifslearn/errors.hpp"
#include "ifslearn/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace ifsl {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::filesystem::path ensure_out_dir(const ExperimentConfig& config) {
    std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_manifest(const ExperimentConfig& config, const std::string& command,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::uint64_t>& replicate_seeds) {
    json m;
    m["artifact_version"] = "1.0.0";
    m["command"] = command;
    m["config_hash"] = config.config_hash();
    m["timestamp_utc"] = utc_timestamp();
    m["outputs"] = outputs;
    if (!replicate_seeds.empty()) m["replicate_seeds"] = replicate_seeds;
    write_text(std::filesystem::path(config.out_dir) / "manifest.json", m.dump(2) + "\n");
}

std::string copula_csv(const GridCopula& copula) {
    const std::size_t g = copula.grid_size();
    std::string out = "u,v,value\r\n";
    for (std::size_t p = 0; p <= g; ++p)
        for (std::size_t q = 0; q <= g; ++q)
            out += fmt(static_cast<double>(p) / static_cast<double>(g)) + "," +
                   fmt(static_cast<double>(q) / static_cast<double>(g)) + "," +
                   fmt(copula.value(p, q)) + "\r\n";
    return out;
}

// d_inf checkpoints for the empirical-copula convergence curve.
const std::vector<std::size_t> kCheckpoints = {100, 1000, 10000, 100000};

} // namespace

Kernel KernelConfig::make() const {
    if (family == "gaussian") return Kernel::gaussian(width);
    if (family == "polynomial") return Kernel::polynomial(degree, offset);
    if (family == "constant") return Kernel::constant(value);
    throw ValidationError("unknown kernel family: " + family);
}

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        bool found = false;
        for (const std::string& k : known)
            if (item.key() == k) found = true;
        if (!found) throw IoError("config: unknown key \"" + item.key() + "\" in " + where);
    }
}

KernelConfig parse_kernel(const json& j) {
    KernelConfig k;
    reject_unknown_keys(j, {"family", "width", "degree", "offset", "value"}, "kernel");
    if (j.contains("family")) k.family = j.at("family").get<std::string>();
    if (j.contains("width")) k.width = j.at("width").get<double>();
    if (j.contains("degree")) k.degree = j.at("degree").get<int>();
    if (j.contains("offset")) k.offset = j.at("offset").get<double>();
    if (j.contains("value")) k.value = j.at("value").get<double>();
    return k;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("config parse: ") + e.what());
    }
    try {
        reject_unknown_keys(
            j,
            {"matrix", "matrix_file", "kernel", "theta", "lambda", "beta", "M", "noise_level",
             "delta", "epsilon", "T", "replicates", "copula_grid", "spectral_grid",
             "mixing_cells", "mixing_starts", "mixing_reps", "mixing_horizon", "seed",
             "out_dir"},
            "config");
        ExperimentConfig cfg;
        if (!j.contains("seed")) throw IoError("config: \"seed\" is mandatory");
        cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("matrix") && j.contains("matrix_file"))
            throw IoError("config: give \"matrix\" or \"matrix_file\", not both");
        if (j.contains("matrix"))
            cfg.matrix_rows = j.at("matrix").get<std::vector<std::vector<double>>>();
        else if (j.contains("matrix_file")) {
            const TransformationMatrix m = load_matrix_file(j.at("matrix_file").get<std::string>());
            cfg.matrix_rows.assign(m.rows(), std::vector<double>(m.cols()));
            for (std::size_t r = 0; r < m.rows(); ++r)
                for (std::size_t c = 0; c < m.cols(); ++c) cfg.matrix_rows[r][c] = m.entry(c, r);
        } else {
            cfg.matrix_rows = {{0.25, 0.25}, {0.25, 0.25}};
        }
        if (j.contains("kernel")) cfg.kernel = parse_kernel(j.at("kernel"));
        if (j.contains("theta")) cfg.theta = j.at("theta").get<double>();
        if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
        if (j.contains("beta")) cfg.beta = j.at("beta").get<double>();
        if (j.contains("M")) cfg.bound_M = j.at("M").get<double>();
        if (j.contains("noise_level")) cfg.noise_level = j.at("noise_level").get<double>();
        if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
        if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
        if (j.contains("T")) cfg.T = j.at("T").get<std::size_t>();
        if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<std::size_t>();
        if (j.contains("copula_grid")) cfg.copula_grid = j.at("copula_grid").get<std::size_t>();
        if (j.contains("spectral_grid"))
            cfg.spectral_grid = j.at("spectral_grid").get<std::size_t>();
        if (j.contains("mixing_cells")) cfg.mixing_cells = j.at("mixing_cells").get<std::size_t>();
        if (j.contains("mixing_starts"))
            cfg.mixing_starts = j.at("mixing_starts").get<std::size_t>();
        if (j.contains("mixing_reps")) cfg.mixing_reps = j.at("mixing_reps").get<std::size_t>();
        if (j.contains("mixing_horizon"))
            cfg.mixing_horizon = j.at("mixing_horizon").get<std::size_t>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw IoError(std::string("config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_json_text(read_text(path));
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["matrix"] = matrix_rows;
    j["kernel"] = {{"family", kernel.family}};
    if (kernel.family == "gaussian") j["kernel"]["width"] = kernel.width;
    if (kernel.family == "polynomial") {
        j["kernel"]["degree"] = kernel.degree;
        j["kernel"]["offset"] = kernel.offset;
    }
    if (kernel.family == "constant") j["kernel"]["value"] = kernel.value;
    j["theta"] = theta;
    j["lambda"] = lambda;
    j["beta"] = beta;
    j["M"] = bound_M;
    j["noise_level"] = noise_level;
    j["delta"] = delta;
    j["epsilon"] = epsilon;
    j["T"] = T;
    j["replicates"] = replicates;
    j["copula_grid"] = copula_grid;
    j["spectral_grid"] = spectral_grid;
    j["mixing_cells"] = mixing_cells;
    j["mixing_starts"] = mixing_starts;
    j["mixing_reps"] = mixing_reps;
    j["mixing_horizon"] = mixing_horizon;
    // out_dir is deliberately excluded: the hash identifies the experiment,
    // not where its artifacts land.
    j["seed"] = seed;
    return j.dump();
}

std::string ExperimentConfig::config_hash() const {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_json())));
    return buf;
}

TransformationMatrix ExperimentConfig::make_matrix() const {
    return TransformationMatrix(matrix_rows);
}

void ExperimentConfig::validate() const {
    make_matrix();
    kernel.make();
    if (theta <= 0.5 || theta > 1.0) throw ValidationError("config: theta must be in (1/2, 1]");
    if (lambda <= 0.0) throw ValidationError("config: lambda must be positive");
    if (beta <= 0.0 || beta > 1.0) throw ValidationError("config: beta must be in (0, 1]");
    if (bound_M <= 0.0) throw ValidationError("config: M must be positive");
    if (noise_level < 0.0) throw ValidationError("config: noise_level must be >= 0");
    if (noise_level > bound_M)
        throw ValidationError("config: noise_level must not exceed M");
    if (delta <= 0.0 || delta >= 1.0) throw ValidationError("config: delta must be in (0, 1)");
    if (epsilon <= 0.0 || epsilon > 1.0) throw ValidationError("config: epsilon must be in (0, 1]");
    if (T < 1) throw ValidationError("config: T must be >= 1");
    if (replicates < 1) throw ValidationError("config: replicates must be >= 1");
    if (copula_grid < 8) throw ValidationError("config: copula_grid must be >= 8");
    if (spectral_grid < 2 || copula_grid % spectral_grid != 0)
        throw ValidationError("config: copula_grid must be a multiple of spectral_grid >= 2");
    if (out_dir.empty()) throw ValidationError("config: out_dir must be non-empty");
}

TransformationMatrix load_matrix_file(const std::string& path) {
    const std::string text = read_text(path);
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw IoError("matrix file is empty: " + path);

    std::vector<std::vector<double>> rows;
    std::string orientation;
    if (text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
            reject_unknown_keys(j, {"orientation", "rows"}, "matrix file");
            orientation = j.at("orientation").get<std::string>();
            rows = j.at("rows").get<std::vector<std::vector<double>>>();
        } catch (const json::exception& e) {
            throw IoError("matrix file " + path + ": " + e.what());
        }
    } else {
        std::istringstream in(text);
        std::string line;
        bool have_orientation = false;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t start = line.find_first_not_of(" \t");
            if (start == std::string::npos) continue;
            if (!have_orientation) {
                const std::size_t colon = line.find(':');
                if (colon == std::string::npos || line.substr(start, colon - start) != "orientation")
                    throw IoError("matrix file " + path +
                                  ": first line must be \"orientation: <value>\"");
                orientation = line.substr(colon + 1);
                orientation.erase(0, orientation.find_first_not_of(" \t"));
                orientation.erase(orientation.find_last_not_of(" \t") + 1);
                have_orientation = true;
                continue;
            }
            std::istringstream row_in(line);
            std::vector<double> row;
            double v;
            while (row_in >> v) row.push_back(v);
            if (!row_in.eof()) throw IoError("matrix file " + path + ": bad number in: " + line);
            if (!row.empty()) rows.push_back(std::move(row));
        }
        if (!have_orientation) throw IoError("matrix file " + path + ": missing orientation line");
    }
    if (orientation == "top_to_bottom") {
        std::reverse(rows.begin(), rows.end());
    } else if (orientation != "bottom_to_top") {
        throw IoError("matrix file " + path + ": orientation must be bottom_to_top or "
                      "top_to_bottom (got \"" + orientation + "\")");
    }
    return TransformationMatrix(std::move(rows));
}

namespace {

int copula_outputs(const ExperimentConfig& config, std::vector<std::string>& outputs) {
    const std::filesystem::path dir = ensure_out_dir(config);
    const TransformationMatrix matrix = config.make_matrix();
    const GridCopula invariant = invariant_copula(matrix, config.copula_grid);
    invariant.check_axioms();
    write_text(dir / "invariant_copula.csv", copula_csv(invariant));
    outputs.push_back("invariant_copula.csv");

    const IfsSystem ifs = build_ifs(matrix);
    const std::size_t n_max = kCheckpoints.back();
    const Trajectory traj = simulate_chain(ifs, {0.5, 0.5}, n_max, config.seed);

    std::string conv = "n,d_inf\r\n";
    double final_d = 0.0;
    for (std::size_t n : kCheckpoints) {
        const std::vector<Point> prefix(traj.states.begin(),
                                        traj.states.begin() + static_cast<long>(n));
        const GridCopula emp = empirical_copula(prefix, config.copula_grid);
        emp.check_axioms();
        const double d = d_inf(emp, invariant);
        final_d = d;
        write_text(dir / ("empirical_copula_n" + std::to_string(n) + ".csv"), copula_csv(emp));
        outputs.push_back("empirical_copula_n" + std::to_string(n) + ".csv");
        conv += std::to_string(n) + "," + fmt(d) + "\r\n";
    }
    write_text(dir / "copula_convergence.csv", conv);
    outputs.push_back("copula_convergence.csv");
    return final_d <= 0.05 ? 0 : 1;
}

int mixing_outputs(const ExperimentConfig& config, std::vector<std::string>& outputs) {
    const std::filesystem::path dir = ensure_out_dir(config);
    const IfsSystem ifs = build_ifs(config.make_matrix());

    auto write_curve = [&](const std::vector<double>& d_curve, double t_mix_for_bound) {
        std::string csv = "t,d,decay_bound\r\n";
        for (std::size_t t = 0; t < d_curve.size(); ++t) {
            const double bound =
                std::exp2(1.0 - static_cast<double>(t) / std::max(t_mix_for_bound, 1.0));
            csv += std::to_string(t) + "," + fmt(d_curve[t]) + "," + fmt(bound) + "\r\n";
        }
        write_text(dir / "mixing_curve.csv", csv);
        outputs.push_back("mixing_curve.csv");
    };

    json report;
    report["epsilon"] = config.epsilon;
    int status = 0;
    try {
        const MixingEstimate est =
            estimate_mixing(ifs, config.mixing_cells, config.epsilon, config.mixing_starts,
                            config.mixing_reps, config.mixing_horizon, config.seed);
        const MixingBoundsReport bounds = check_mixing_bounds(est, config.T);
        write_curve(est.d_curve, static_cast<double>(std::max<std::size_t>(est.t_mix, 1)));
        report["mixed"] = true;
        report["t_mix"] = est.t_mix;
        report["decay_bound_ok"] = bounds.decay_bound_ok;
        report["sum_bound_ok"] = bounds.sum_bound_ok;
        report["decay_worst_margin"] = bounds.decay_worst_margin;
        report["sum_margin"] = bounds.sum_margin;
        if (!bounds.all_ok()) {
            status = 1;
            if (!bounds.decay_bound_ok)
                report["decay_first_violation"] = bounds.decay_first_violation;
        }
    } catch (const NotMixedError& e) {
        write_curve(e.d_curve, 1.0);
        report["mixed"] = false;
        report["error"] = e.what();
        status = 1;
    }
    write_text(dir / "mixing_report.json", report.dump(2) + "\n");
    outputs.push_back("mixing_report.json");
    return status;
}

double estimated_t_mix(const ExperimentConfig& config) {
    const IfsSystem ifs = build_ifs(config.make_matrix());
    const MixingEstimate est =
        estimate_mixing(ifs, config.mixing_cells, config.epsilon, config.mixing_starts,
                        config.mixing_reps, config.mixing_horizon, config.seed);
    return static_cast<double>(std::max<std::size_t>(est.t_mix, 1));
}

std::string trace_csv(const IterateTrace& trace) {
    std::string out = "t,gamma,residual,l2_error,rkhs_norm\r\n";
    for (const IterateRecord& r : trace.records)
        out += std::to_string(r.t) + "," + fmt(r.gamma) + "," + fmt(r.residual) + "," +
               fmt(r.l2_error) + "," + fmt(r.rkhs_norm) + "\r\n";
    return out;
}

std::string expansion_csv(const KernelExpansion& f) {
    std::string out = "global_scale," + fmt(f.global_scale) + "\r\n";
    out += "center_x,center_y,coefficient\r\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        out += fmt(f.centers[i].x) + "," + fmt(f.centers[i].y) + "," + fmt(f.coeffs[i]) + "\r\n";
    return out;
}

int learn_outputs(const ExperimentConfig& config, const LearnArtifacts& art,
                  std::vector<std::string>& outputs) {
    const std::filesystem::path dir = ensure_out_dir(config);
    for (std::size_t r = 0; r < art.traces.size(); ++r) {
        char name[32];
        std::snprintf(name, sizeof(name), "trace_%03zu.csv", r);
        write_text(dir / name, trace_csv(art.traces[r]));
        outputs.push_back(name);
    }
    write_text(dir / "final_expansion_000.csv", expansion_csv(art.traces[0].final_expansion));
    outputs.push_back("final_expansion_000.csv");

    std::string agg = "t,mean_sq,min_sq,max_sq\r\n";
    const std::size_t steps = art.traces[0].records.size();
    double mean_initial = 0.0, mean_final = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        double sum = 0.0, lo = 0.0, hi = 0.0;
        for (std::size_t r = 0; r < art.traces.size(); ++r) {
            const double e = art.traces[r].records[i].l2_error;
            const double sq = e * e;
            sum += sq;
            if (r == 0 || sq < lo) lo = sq;
            if (r == 0 || sq > hi) hi = sq;
        }
        const double mean = sum / static_cast<double>(art.traces.size());
        if (i == 0) mean_initial = mean;
        if (i + 1 == steps) mean_final = mean;
        agg += std::to_string(art.traces[0].records[i].t) + "," + fmt(mean) + "," + fmt(lo) +
               "," + fmt(hi) + "\r\n";
    }
    write_text(dir / "error_decay.csv", agg);
    outputs.push_back("error_decay.csv");
    return mean_final < mean_initial ? 0 : 1;
}

int bounds_outputs(const ExperimentConfig& config, const LearnArtifacts& art,
                   std::vector<std::string>& outputs) {
    const std::filesystem::path dir = ensure_out_dir(config);
    json report_json;
    int status = 0;
    double t_mix = 1.0;
    bool mixed = true;
    try {
        t_mix = estimated_t_mix(config);
    } catch (const NotMixedError& e) {
        mixed = false;
        report_json["skipped"] = true;
        report_json["reason"] = e.what();
        status = 1;
    }
    if (mixed) {
        const double c_k = config.kernel.make().sup_sqrt_diag();
        const BoundParams params =
            BoundParams::create(config.theta, config.lambda, c_k, config.bound_M, t_mix,
                                config.T, config.delta, config.beta, art.g_norm, art.dist0_sq);
        const BoundReport report = validate_bounds(art.traces, params);
        status = report.all_ok() ? 0 : 1;

        report_json["skipped"] = false;
        report_json["theoretical"] = {{"e_init", report.e_init_value},
                                      {"c_theta_lambda", report.c_theta_lambda},
                                      {"b_theta_lambda", report.b_theta_lambda},
                                      {"total_bound", report.total_bound_value},
                                      {"sigma_sq", report.sigma_sq},
                                      {"t_mix", report.t_mix},
                                      {"quantile_threshold", report.quantile_threshold}};
        report_json["empirical"] = {{"n_replicates", report.n_replicates},
                                    {"mean_initial_sq", report.mean_initial_sq},
                                    {"mean_final_sq", report.mean_final_sq},
                                    {"mean_final_norm", report.mean_final_norm},
                                    {"sqrt_mean_final_sq", report.sqrt_mean_final_sq},
                                    {"quantile_fraction", report.quantile_fraction},
                                    {"quantile_cap", report.quantile_cap}};
        report_json["checks"] = {{"mean_bound_ok", report.mean_bound_ok},
                                 {"quantile_ok", report.quantile_ok},
                                 {"jensen_ok", report.jensen_ok},
                                 {"reduction_ok", report.reduction_ok},
                                 {"mean_bound_margin", report.mean_bound_margin}};

        std::string csv = "t,empirical_mean_sq,e_init,c_term,mean_bound,total_bound\r\n";
        for (std::size_t t = 2; t <= config.T; t *= 2) {
            BoundParams pt = params;
            pt.T = t;
            const SampConstants samp = e_samp_constants(pt);
            const double ei = e_init(pt.theta, pt.kappa, pt.T, pt.dist0_sq);
            double emp = 0.0;
            for (const IterateTrace& tr : art.traces) {
                const double e = tr.records[t - 1].l2_error;
                emp += e * e;
            }
            emp /= static_cast<double>(art.traces.size());
            csv += std::to_string(t) + "," + fmt(emp) + "," + fmt(ei) + "," +
                   fmt(samp.c_theta_lambda * pt.t_mix) + "," +
                   fmt(ei + samp.c_theta_lambda * pt.t_mix) + "," + fmt(total_bound(pt)) +
                   "\r\n";
        }
        write_text(dir / "bounds_vs_T.csv", csv);
        outputs.push_back("bounds_vs_T.csv");
    }
    write_text(dir / "bound_report.json", report_json.dump(2) + "\n");
    outputs.push_back("bound_report.json");
    return status;
}

} // namespace

LearnArtifacts run_learn_pipeline(const ExperimentConfig& config) {
    const TransformationMatrix matrix = config.make_matrix();
    const Kernel kernel = config.kernel.make();
    GridCopula copula = invariant_copula(matrix, config.copula_grid);
    SpectralModel spec = build_spectral_model(kernel, copula, config.spectral_grid);
    if (spec.n_eigs() < 2)
        throw ValidationError("learn: spectral model retains fewer than 2 eigenfunctions");

    // g = psi_2, sign-normalized so the first node value is positive.
    L2Function g = spec.eigvec_values().col(1);
    for (Eigen::Index m = 0; m < g.size(); ++m) {
        if (g(m) != 0.0) {
            if (g(m) < 0.0) g = -g;
            break;
        }
    }
    const double g_norm = l2_norm_mu(spec, g);
    L2Function f_rho = operator_power_apply(spec, config.beta, g);
    L2Function f_target = regularization_target(spec, config.lambda, f_rho);
    KernelExpansion w_star = regularization_expansion(spec, config.lambda, f_rho);
    const double w_norm = rkhs_norm(w_star);
    const double dist0_sq = w_norm * w_norm;

    // Pointwise f_rho via the Nystrom extension of T^beta g.
    Eigen::VectorXd rho_coeffs = spec.coefficients(g);
    for (Eigen::Index i = 0; i < rho_coeffs.size(); ++i)
        rho_coeffs(i) *= std::pow(spec.eigenvalues()(i), config.beta);
    auto target_fn = [&spec, rho_coeffs](Point x) { return spec.eval_in_span(rho_coeffs, x); };

    const IfsSystem ifs = build_ifs(matrix);
    const SgdConfig sgd =
        SgdConfig::create(config.theta, config.lambda, config.T, config.bound_M, kernel);

    std::vector<std::uint64_t> seeds(config.replicates);
    for (std::size_t r = 0; r < config.replicates; ++r)
        seeds[r] = derive_seed(config.seed, Stream::replicate_base, r);

    std::vector<IterateTrace> traces(config.replicates);
    std::vector<std::string> failures(config.replicates);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= config.replicates) return;
            try {
                const Trajectory traj = simulate_chain(ifs, {0.5, 0.5}, config.T, seeds[r]);
                const std::vector<LabeledSample> samples = attach_observations(
                    traj, target_fn, config.noise_level, config.bound_M, seeds[r]);
                KernelExpansion f1(kernel);
                traces[r] = run_mcsgd(samples, sgd, f1, spec, f_target);
            } catch (const std::exception& e) {
                failures[r] = "replicate " + std::to_string(r) + ": " + e.what();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min<std::size_t>(hw, config.replicates);
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    for (const std::string& f : failures)
        if (!f.empty()) throw ValidationError("learn: " + f);

    return LearnArtifacts{std::move(copula), std::move(spec),     std::move(g),
                          g_norm,            std::move(f_rho),    std::move(f_target),
                          std::move(w_star), dist0_sq,            std::move(traces),
                          std::move(seeds)};
}

int cmd_copula(const ExperimentConfig& config) {
    std::vector<std::string> outputs;
    const int status = copula_outputs(config, outputs);
    write_manifest(config, "copula", outputs, {});
    return status;
}

int cmd_mixing(const ExperimentConfig& config) {
    std::vector<std::string> outputs;
    const int status = mixing_outputs(config, outputs);
    write_manifest(config, "mixing", outputs, {});
    return status;
}

int cmd_learn(const ExperimentConfig& config) {
    std::vector<std::string> outputs;
    const LearnArtifacts art = run_learn_pipeline(config);
    const int status = learn_outputs(config, art, outputs);
    write_manifest(config, "learn", outputs, art.replicate_seeds);
    return status;
}

int cmd_bounds(const ExperimentConfig& config) {
    std::vector<std::string> outputs;
    const LearnArtifacts art = run_learn_pipeline(config);
    const int status = bounds_outputs(config, art, outputs);
    write_manifest(config, "bounds", outputs, art.replicate_seeds);
    return status;
}

int run_all(const ExperimentConfig& config) {
    std::vector<std::string> outputs;
    int status = copula_outputs(config, outputs);
    status = std::max(status, mixing_outputs(config, outputs));
    const LearnArtifacts art = run_learn_pipeline(config);
    status = std::max(status, learn_outputs(config, art, outputs));
    status = std::max(status, bounds_outputs(config, art, outputs));
    write_manifest(config, "all", outputs, art.replicate_seeds);
    return status;
}

} // namespace ifsl
