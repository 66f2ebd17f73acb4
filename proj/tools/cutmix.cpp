#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "cutmix/study.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

/// Optional key=value file; command-line flags override its entries.
void apply_config_file(const std::string& path, std::map<std::string, std::string>& kv) {
    std::ifstream in(path);
    if (!in) throw cutmix::ConfigError("cannot read config file '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
}

} // namespace

int main(int argc, char** argv) {
    using namespace cutmix;

    CLI::App app{"Unfitted mixed finite element solver for elliptic interface problems"};

    std::string config_file, mesh_sizes_str, xi_list_str;
    RunConfig cfg;
    long seed_opt = -1;

    app.add_option("--config", config_file, "key=value configuration file (flags override)");
    auto* opt_problem =
        app.add_option("--problem", cfg.problem, "problem name (example1 .. example5)");
    app.add_option("--alpha1", cfg.alpha1, "conductivity in subdomain 1");
    app.add_option("--alpha2", cfg.alpha2, "conductivity in subdomain 2");
    auto* opt_sizes = app.add_option("--mesh-sizes", mesh_sizes_str,
                                     "comma-separated mesh sizes, e.g. 8,16,32");
    app.add_option("--gamma", cfg.gamma, "interface flux penalty");
    app.add_option("--gamma1", cfg.gamma1, "cut-edge stabilization weight");
    app.add_option("--gamma2", cfg.gamma2, "interface jump stabilization weight");
    app.add_option("--xi", cfg.xi, "interface offset (example3)");
    auto* opt_xilist =
        app.add_option("--xi-list", xi_list_str, "comma-separated offsets: sweep mode");
    app.add_option("--mesh-file", cfg.mesh_file, "mesh file instead of structured meshes");
    app.add_option("--depth", cfg.polyline_depth, "interface polyline refinement depth");
    app.add_option("--assembly-degree", cfg.assembly_degree, "volume quadrature degree (assembly)");
    app.add_option("--norm-degree", cfg.norm_degree, "volume quadrature degree (error norms)");
    app.add_option("--output", cfg.output, "CSV output path");
    app.add_option("--seed", seed_opt, "jitter interior vertices of structured meshes");
    app.add_option("--dump-matrix", cfg.dump_matrix, "write the assembled matrix (Matrix Market)");

    try {
        // pre-scan for --config so flags can override file entries
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") config_file = argv[i + 1];
        if (!config_file.empty()) {
            std::map<std::string, std::string> kv;
            apply_config_file(config_file, kv);
            auto take = [&](const char* key) -> std::optional<std::string> {
                auto it = kv.find(key);
                if (it == kv.end()) return std::nullopt;
                return it->second;
            };
            if (auto v = take("problem")) cfg.problem = *v;
            if (auto v = take("alpha1")) cfg.alpha1 = std::stod(*v);
            if (auto v = take("alpha2")) cfg.alpha2 = std::stod(*v);
            if (auto v = take("mesh-sizes")) mesh_sizes_str = *v;
            if (auto v = take("gamma")) cfg.gamma = std::stod(*v);
            if (auto v = take("gamma1")) cfg.gamma1 = std::stod(*v);
            if (auto v = take("gamma2")) cfg.gamma2 = std::stod(*v);
            if (auto v = take("xi")) cfg.xi = std::stod(*v);
            if (auto v = take("xi-list")) xi_list_str = *v;
            if (auto v = take("mesh-file")) cfg.mesh_file = *v;
            if (auto v = take("depth")) cfg.polyline_depth = std::stoi(*v);
            if (auto v = take("output")) cfg.output = *v;
            if (auto v = take("seed")) seed_opt = std::stol(*v);
            if (auto v = take("dump-matrix")) cfg.dump_matrix = *v;
        }

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            std::cerr << e.what() << "\n" << app.help();
            return 3;
        }

        if (cfg.problem.empty() && !*opt_problem) {
            std::cerr << "error: --problem is required\n" << app.help();
            return 3;
        }
        if (!mesh_sizes_str.empty()) cfg.mesh_sizes = parse_int_list(mesh_sizes_str);
        if (!xi_list_str.empty()) cfg.xi_list = parse_double_list(xi_list_str);
        if (seed_opt >= 0) {
            cfg.seeded = true;
            cfg.seed = static_cast<uint64_t>(seed_opt);
        }
        if (const char* env = std::getenv("CUTMIX_THREADS"))
            cfg.threads = std::max(1, std::atoi(env));

        if (!cfg.xi_list.empty() || *opt_xilist) {
            if (cfg.mesh_sizes.empty()) cfg.mesh_sizes = {32};
            const auto rows = run_sweep(cfg);
            std::cout << to_csv(rows);
        } else {
            if (cfg.mesh_sizes.empty() && cfg.mesh_file.empty()) {
                std::cerr << "error: --mesh-sizes or --mesh-file is required\n" << app.help();
                return 3;
            }
            const auto table = run_study(cfg);
            std::cout << to_csv(table);
        }
        (void)opt_sizes;
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const MeshError& e) {
        std::cerr << "mesh error: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
