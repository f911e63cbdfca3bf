#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ontd/errors.hpp"
#include "ontd/factor.hpp"
#include "ontd/io.hpp"
#include "ontd/pipeline.hpp"
#include "ontd/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::size_t> parse_size_list(const std::string& s, const std::string& flag) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string tok = s.substr(start, (comma == std::string::npos ? s.size() : comma) - start);
        std::size_t v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
            throw std::invalid_argument(flag + ": cannot parse '" + tok + "' as an integer");
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

struct CommonOptions {
    ontd::AdmmParams params;
    std::uint64_t seed = 0;
    std::string format = "text";
    bool parallel_modes = false;
};

void add_admm_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--theta", opt.params.theta, "l1 weight of the projector model");
    cmd->add_option("--rho1", opt.params.rho1, "penalty for the l1 split");
    cmd->add_option("--rho2", opt.params.rho2, "penalty for the nonnegativity split");
    cmd->add_option("--rho3", opt.params.rho3, "penalty for the spectral-box split");
    cmd->add_option("--gamma", opt.params.gamma, "dual step scale in (0, (1+sqrt(5))/2)");
    cmd->add_option("--eps", opt.params.eps, "stopping tolerance");
    cmd->add_option("--max-iter", opt.params.max_iter, "iteration cap per mode");
    cmd->add_flag("--literal-m-projection", opt.params.literal_m_projection,
                  "use the literal half-scaled spectral projection (diagnostic)");
}

std::vector<ontd::ReportEntry> effective_config(const CommonOptions& opt,
                                                const std::string& input,
                                                const std::string& ranks,
                                                const std::string& partial) {
    using ontd::format_double;
    return {{"input", input},
            {"ranks", ranks},
            {"partial", partial},
            {"theta", format_double(opt.params.theta)},
            {"rho1", format_double(opt.params.rho1)},
            {"rho2", format_double(opt.params.rho2)},
            {"rho3", format_double(opt.params.rho3)},
            {"gamma", format_double(opt.params.gamma)},
            {"eps", format_double(opt.params.eps)},
            {"max_iter", std::to_string(opt.params.max_iter)},
            {"literal_m_projection", opt.params.literal_m_projection ? "yes" : "no"},
            {"seed", std::to_string(opt.seed)},
            {"format", opt.format},
            {"parallel_modes", opt.parallel_modes ? "yes" : "no"}};
}

// Flat `key = value` config file; command-line flags override. The file is
// applied as new defaults before parsing.
std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ontd::IoError(path + ": cannot open config file");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '-', '_');
        if (!key.empty()) kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

template <typename T>
void config_get(const std::map<std::string, std::string>& kv, const std::string& key, T& out) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    if constexpr (std::is_same_v<T, std::string>) {
        out = it->second;
    } else if constexpr (std::is_same_v<T, bool>) {
        out = it->second == "1" || it->second == "true" || it->second == "yes";
    } else if constexpr (std::is_floating_point_v<T>) {
        out = std::stod(it->second);
    } else {
        out = static_cast<T>(std::stoull(it->second));
    }
}

int run_synth(const std::string& dims_str, const std::string& ranks_str,
              const CommonOptions& opt, double noise, std::size_t min_cluster_size,
              const std::string& out_dir) {
    ontd::SynthSpec spec;
    spec.dims = parse_size_list(dims_str, "--dims");
    spec.ranks = parse_size_list(ranks_str, "--ranks");
    spec.seed = opt.seed;
    spec.noise_level = noise;
    spec.min_cluster_size = min_cluster_size;

    const ontd::SynthInstance inst = ontd::gen_tensor(spec);
    const ontd::TensorFormat fmt = ontd::parse_format(opt.format);
    fs::create_directories(out_dir);
    const fs::path tensor_path = fs::path(out_dir) / ("A" + ontd::format_extension(fmt));
    ontd::write_tensor(inst.tensor, tensor_path, fmt);
    ontd::write_model(inst.truth, fs::path(out_dir) / "truth", fmt);
    std::cout << "wrote " << tensor_path.string() << " and " << (fs::path(out_dir) / "truth").string()
              << "\n";
    return 0;
}

int run_decompose(const std::string& input, const std::string& ranks_str,
                  const std::string& partial_str, const CommonOptions& opt,
                  const std::string& out_dir) {
    const ontd::DenseTensor a = ontd::read_tensor(input);
    const std::vector<std::size_t> ranks = parse_size_list(ranks_str, "--ranks");

    std::vector<std::size_t> identity_modes;
    if (!partial_str.empty()) {
        for (std::size_t m : parse_size_list(partial_str, "--partial")) {
            if (m == 0 || m > a.order())
                throw std::invalid_argument("--partial: mode numbers are 1-based and at most the order");
            identity_modes.push_back(m - 1);
        }
    }

    const ontd::DecomposeReport report =
        ontd::decompose(a, ranks, identity_modes, opt.params, opt.seed, opt.parallel_modes);

    const ontd::TensorFormat fmt = ontd::parse_format(opt.format);
    fs::create_directories(out_dir);
    ontd::write_model(report.model, fs::path(out_dir) / "model", fmt);
    ontd::write_report(report, effective_config(opt, input, ranks_str, partial_str), out_dir);
    {
        std::ofstream timing(fs::path(out_dir) / "timing.txt");
        timing << "admm_seconds=" << report.times.admm_seconds << "\n";
        timing << "recovery_seconds=" << report.times.recovery_seconds << "\n";
        timing << "core_seconds=" << report.times.core_seconds << "\n";
        timing << "total_seconds=" << report.times.total_seconds << "\n";
    }

    std::cout << "relative_error=" << ontd::format_double(report.relative_error) << "\n";
    std::cout << "compression_ratio=" << ontd::format_double(report.compression_ratio) << "\n";
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";

    const bool hit_max_iter = std::any_of(
        report.mode_diagnostics.begin(), report.mode_diagnostics.end(),
        [](const auto& d) { return d && !d->converged; });
    return hit_max_iter ? 4 : 0;
}

int run_reconstruct(const std::string& model_dir, const CommonOptions& opt,
                    const std::string& out_file) {
    const ontd::OntdModel model = ontd::read_model(model_dir);
    ontd::write_tensor(ontd::reconstruct(model), out_file, ontd::parse_format(opt.format));
    std::cout << "wrote " << out_file << "\n";
    return 0;
}

int run_evaluate(const std::string& model_dir, const std::string& truth_dir,
                 const std::string& out_file) {
    const ontd::OntdModel model = ontd::read_model(model_dir);
    const ontd::OntdModel truth = ontd::read_model(truth_dir);
    if (model.output_dims() != truth.output_dims())
        throw ontd::IoError("evaluate: the two models reconstruct different tensor dims");

    const ontd::DenseTensor a_model = ontd::reconstruct(model);
    const ontd::DenseTensor a_truth = ontd::reconstruct(truth);

    std::vector<ontd::ReportEntry> lines;
    lines.push_back({"avg_error", ontd::format_double(ontd::avg_error({a_truth}, {a_model}))});

    double sim_sum = 0.0;
    std::size_t sim_count = 0;
    for (std::size_t n = 0; n < model.order(); ++n) {
        const std::string prefix = "mode_" + std::to_string(n + 1) + "_";
        if (!model.factors[n] || !truth.factors[n]) {
            lines.push_back({prefix + "factor", !model.factors[n] && !truth.factors[n]
                                                    ? "identity"
                                                    : "identity-mismatch"});
            continue;
        }
        if (model.factors[n]->cols() != truth.factors[n]->cols()) {
            lines.push_back({prefix + "factor", "rank-mismatch"});
            continue;
        }
        const ontd::FactorMatch match = ontd::match_factors(*model.factors[n], *truth.factors[n]);
        lines.push_back({prefix + "match_error", ontd::format_double(match.max_error)});

        std::vector<std::vector<double>> ucols, vcols;
        for (std::size_t j = 0; j < model.factors[n]->cols(); ++j) {
            std::vector<double> uc(model.factors[n]->rows()), vc(model.factors[n]->rows());
            for (std::size_t i = 0; i < model.factors[n]->rows(); ++i) {
                uc[i] = model.factors[n]->matrix()(i, j);
                vc[i] = truth.factors[n]->matrix()(i, j);
            }
            ucols.push_back(std::move(uc));
            vcols.push_back(std::move(vc));
        }
        const double sim = ontd::similarity(ucols, vcols);
        lines.push_back({prefix + "similarity", ontd::format_double(sim)});
        sim_sum += sim;
        ++sim_count;
    }
    if (sim_count > 0)
        lines.push_back({"factor_similarity_mean",
                         ontd::format_double(sim_sum / static_cast<double>(sim_count))});
    lines.push_back({"core_norm_model", ontd::format_double(ontd::frob_norm(model.core))});
    lines.push_back({"core_norm_truth", ontd::format_double(ontd::frob_norm(truth.core))});

    std::string text;
    for (const auto& e : lines) text += e.key + "=" + e.value + "\n";
    std::cout << text;
    if (!out_file.empty()) {
        std::ofstream out(out_file);
        if (!out) throw ontd::IoError(out_file + ": cannot open for writing");
        out << text;
    }
    return 0;
}

int run_info(const std::string& file) {
    std::string format = "text";
    {
        std::ifstream probe(file, std::ios::binary);
        if (!probe) throw ontd::IoError(file + ": cannot open file");
        char magic[4] = {0, 0, 0, 0};
        probe.read(magic, 4);
        if (probe.gcount() == 4 && std::string(magic, 4) == "DTTB") format = "binary";
    }
    const ontd::DenseTensor t = ontd::read_tensor(file);
    std::cout << "format: " << format << "\n";
    std::cout << "dims:";
    for (std::size_t n = 0; n < t.order(); ++n) std::cout << " " << t.dim(n);
    std::cout << "\n";
    std::cout << "values: " << t.size() << "\n";
    std::cout << "frob_norm: " << ontd::format_double(ontd::frob_norm(t)) << "\n";
    std::cout << "min: " << ontd::format_double(ontd::min_value(t)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonal nonnegative Tucker decomposition toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "flat key = value config file (flags override; also read from ONTD_CONFIG)");

    CommonOptions opt;
    std::string dims_str, ranks_str, partial_str, input, out_path, truth_dir;
    double noise = 0.0;
    std::size_t min_cluster_size = 1;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic instance plus its truth");
    synth->add_option("--dims", dims_str, "tensor dimensions I1,I2,...")->required();
    synth->add_option("--ranks", ranks_str, "multilinear rank J1,J2,...")->required();
    synth->add_option("--seed", opt.seed, "random seed");
    synth->add_option("--noise", noise, "relative Frobenius noise level");
    synth->add_option("--min-cluster-size", min_cluster_size, "rows required per cluster");
    synth->add_option("--format", opt.format, "tensor file format: text|binary");
    synth->add_option("--out", out_path, "output directory")->required();

    CLI::App* dec = app.add_subcommand("decompose", "run the decomposition on a tensor file");
    dec->add_option("input", input, "input tensor (.dtt/.dttb)")->required();
    dec->add_option("--ranks", ranks_str, "multilinear rank J1,J2,...")->required();
    dec->add_option("--partial", partial_str, "1-based modes kept as identity factors");
    add_admm_flags(dec, opt);
    dec->add_option("--seed", opt.seed, "random seed for factor recovery");
    dec->add_option("--format", opt.format, "output tensor format: text|binary");
    dec->add_flag("--parallel-modes", opt.parallel_modes, "solve the modes concurrently");
    dec->add_option("--out", out_path, "output directory")->required();

    CLI::App* rec = app.add_subcommand("reconstruct", "rebuild the tensor from a model directory");
    rec->add_option("model", input, "model directory")->required();
    rec->add_option("--format", opt.format, "tensor file format: text|binary");
    rec->add_option("--out", out_path, "output tensor file")->required();

    CLI::App* eva = app.add_subcommand("evaluate", "compare a model against a truth model");
    eva->add_option("model", input, "model directory")->required();
    eva->add_option("truth", truth_dir, "truth model directory")->required();
    eva->add_option("--out", out_path, "also write the metrics to this file");

    CLI::App* info = app.add_subcommand("info", "print a tensor file's header");
    info->add_option("file", input, "tensor file")->required();

    try {
        // Config file (flag wins over the environment variable); its values
        // become new defaults, then the command line overrides.
        std::string pre_config;
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") pre_config = argv[i + 1];
        if (pre_config.empty())
            if (const char* env = std::getenv("ONTD_CONFIG")) pre_config = env;
        if (!pre_config.empty()) {
            const auto kv = load_config_file(pre_config);
            config_get(kv, "theta", opt.params.theta);
            config_get(kv, "rho1", opt.params.rho1);
            config_get(kv, "rho2", opt.params.rho2);
            config_get(kv, "rho3", opt.params.rho3);
            config_get(kv, "gamma", opt.params.gamma);
            config_get(kv, "eps", opt.params.eps);
            config_get(kv, "max_iter", opt.params.max_iter);
            config_get(kv, "literal_m_projection", opt.params.literal_m_projection);
            config_get(kv, "seed", opt.seed);
            config_get(kv, "noise", noise);
            config_get(kv, "min_cluster_size", min_cluster_size);
            config_get(kv, "format", opt.format);
            config_get(kv, "parallel_modes", opt.parallel_modes);
            config_get(kv, "ranks", ranks_str);
            config_get(kv, "partial", partial_str);
            config_get(kv, "dims", dims_str);
            config_get(kv, "out", out_path);
        }

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 1;
        }

        if (synth->parsed()) return run_synth(dims_str, ranks_str, opt, noise, min_cluster_size, out_path);
        if (dec->parsed()) return run_decompose(input, ranks_str, partial_str, opt, out_path);
        if (rec->parsed()) return run_reconstruct(input, opt, out_path);
        if (eva->parsed()) return run_evaluate(input, truth_dir, out_path);
        if (info->parsed()) return run_info(input);
        return 1;
    } catch (const ontd::IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ontd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
