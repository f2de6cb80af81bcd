// SPDX-License-Identifier: MIT
//
// Command-line surface: sharp product bounds with feasibility diagnostics,
// extremal-coupling sampling, trivariate support-curve export, and
// one-command reproduction bundles for the built-in example problems.
//
// Exit codes: 0 ok, 2 spec error, 3 infeasible target, 4 numerical failure.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "parity_bounds/bounds.hpp"
#include "parity_bounds/coupling.hpp"
#include "parity_bounds/errors.hpp"
#include "parity_bounds/format.hpp"
#include "parity_bounds/verify.hpp"

namespace pb = parity_bounds;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpec = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct ProblemSpec {
    std::vector<pb::Marginal> marginals;
    pb::Target target = pb::Target::max;
    std::uint64_t seed = 1;
    int grid = 4097;
    int n_samples = 20000;
};

pb::Target parse_target(const std::string& s) {
    if (s == "max") return pb::Target::max;
    if (s == "min") return pb::Target::min;
    throw pb::spec_error("target must be \"max\" or \"min\"");
}

ProblemSpec parse_spec(const json& j) {
    if (!j.is_object()) throw pb::spec_error("problem spec must be a JSON object");
    if (!j.contains("marginals") || !j["marginals"].is_array())
        throw pb::spec_error("problem spec requires a \"marginals\" array");
    ProblemSpec spec;
    for (const auto& jm : j["marginals"]) spec.marginals.push_back(pb::Marginal::from_json(jm));
    if (spec.marginals.size() < 2) throw pb::spec_error("problem spec requires d >= 2");
    if (j.contains("d") && j["d"].get<std::size_t>() != spec.marginals.size())
        throw pb::spec_error("field \"d\" disagrees with the marginals array");
    if (j.contains("target")) spec.target = parse_target(j["target"].get<std::string>());
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("grid")) spec.grid = j["grid"].get<int>();
    if (j.contains("n_samples")) spec.n_samples = j["n_samples"].get<int>();
    return spec;
}

json spec_to_json(const ProblemSpec& spec) {
    json j;
    j["d"] = spec.marginals.size();
    auto arr = json::array();
    for (const auto& m : spec.marginals) arr.push_back(m.to_json());
    j["marginals"] = std::move(arr);
    j["target"] = pb::target_name(spec.target);
    j["seed"] = spec.seed;
    j["grid"] = spec.grid;
    j["n_samples"] = spec.n_samples;
    return j;
}

ProblemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pb::spec_error("cannot open spec file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw pb::spec_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_spec(j);
}

pb::CouplingSpec coupling_spec(const ProblemSpec& spec, int pivot) {
    pb::CouplingSpec c;
    c.marginals = spec.marginals;
    c.target = spec.target;
    c.strategy = spec.marginals.size() == 3 ? pb::Strategy::closed_form_d3
                                            : pb::Strategy::recursive_pivot;
    if (spec.marginals.size() == 2) c.strategy = pb::Strategy::lp_weights;
    c.pivot = pivot;
    c.seed = spec.seed;
    c.feasibility_grid = spec.grid;
    return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pb::spec_error("cannot write file: " + path.string());
    out << text;
}

std::string sample_csv(const ProblemSpec& spec, int n, int pivot) {
    const auto batch = pb::sample(coupling_spec(spec, pivot), n);
    std::ostringstream os;
    batch.write_csv(os);
    if (batch.n >= 2) {
        const auto est = pb::mc_expected_product(batch);
        os << "# mean=" << pb::format_double(est.mean)
           << " stderr=" << pb::format_double(est.stderr_) << " n=" << est.n << "\n";
    }
    return os.str();
}

std::string support_csv(const ProblemSpec& spec, int grid) {
    const auto rep =
        pb::feasibility(spec.marginals, pb::target_parity(spec.target), spec.grid);
    if (!rep.sharp)
        throw pb::infeasible_error("support curves require a sharp target", rep);
    const auto curves = pb::support_curves(spec.marginals, spec.target, grid);
    std::ostringstream os;
    pb::write_support_csv(os, curves);
    return os.str();
}

int cmd_bounds(const std::string& spec_path, std::optional<int> grid) {
    ProblemSpec spec = load_spec(spec_path);
    if (grid) spec.grid = *grid;
    const auto result = pb::sharp_bounds(spec.marginals, spec.grid);
    std::cout << result.to_json().dump(2) << "\n";
    return kExitOk;
}

int cmd_sample(const std::string& spec_path, std::optional<int> n,
               std::optional<std::uint64_t> seed, std::optional<std::string> target,
               int pivot, const std::string& out_path) {
    ProblemSpec spec = load_spec(spec_path);
    if (n) spec.n_samples = *n;
    if (seed) spec.seed = *seed;
    if (target) spec.target = parse_target(*target);
    const std::string csv = sample_csv(spec, spec.n_samples, pivot);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        write_file(out_path, csv);
    }
    return kExitOk;
}

int cmd_support(const std::string& spec_path, int grid, std::optional<std::string> target,
                const std::string& out_path) {
    ProblemSpec spec = load_spec(spec_path);
    if (target) spec.target = parse_target(*target);
    if (spec.marginals.size() != 3)
        throw pb::spec_error("support curves are defined for d = 3");
    const std::string csv = support_csv(spec, grid);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        write_file(out_path, csv);
    }
    return kExitOk;
}

int cmd_oracle(const std::string& spec_path, int atoms, std::optional<std::string> target) {
    ProblemSpec spec = load_spec(spec_path);
    if (target) spec.target = parse_target(*target);
    const auto oracle = pb::discrete_oracle(pb::quantize(spec.marginals, atoms, spec.target));
    const double bound = pb::universal_bound(spec.marginals).value;
    const double signed_bound = spec.target == pb::Target::max ? bound : -bound;
    std::cout << oracle.to_json(signed_bound).dump(2) << "\n";
    return kExitOk;
}

ProblemSpec example_spec(const std::string& name) {
    ProblemSpec spec;
    if (name == "linear") {
        spec.marginals = {pb::Marginal::linear_density(0.4), pb::Marginal::linear_density(0.2),
                          pb::Marginal::linear_density(-0.3)};
    } else if (name == "shifted_exp") {
        spec.marginals.assign(3, pb::Marginal::shifted_exponential(1.0, 0.3));
    } else if (name == "shifted_exp_hetero") {
        spec.marginals = {pb::Marginal::shifted_exponential(0.8, 0.15),
                          pb::Marginal::shifted_exponential(1.0, 0.38),
                          pb::Marginal::shifted_exponential(1.9, 0.20)};
    } else if (name == "normal_max") {
        spec.marginals.assign(3, pb::Marginal::normal(0.674, 1.0));
    } else if (name == "normal_min") {
        spec.marginals.assign(3, pb::Marginal::normal(-0.674, 1.0));
        spec.target = pb::Target::min;
    } else if (name == "d4_normal") {
        spec.marginals.assign(4, pb::Marginal::normal(0.0, 1.0));
    } else {
        throw pb::spec_error("unknown example: " + name);
    }
    return spec;
}

int cmd_example(const std::string& name, std::string out_dir) {
    const ProblemSpec spec = example_spec(name);
    if (out_dir.empty()) out_dir = name + "_bundle";
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    write_file(dir / "spec.json", spec_to_json(spec).dump(2) + "\n");

    const auto result = pb::sharp_bounds(spec.marginals, spec.grid);
    write_file(dir / "bounds.json", result.to_json().dump(2) + "\n");
    json feas;
    feas["even"] = result.even_report.to_json();
    feas["odd"] = result.odd_report.to_json();
    write_file(dir / "feasibility.json", feas.dump(2) + "\n");

    write_file(dir / "samples.csv", sample_csv(spec, spec.n_samples, 0));
    if (spec.marginals.size() == 3) write_file(dir / "support.csv", support_csv(spec, 257));
    std::cout << "wrote bundle: " << out_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sharp dependence-uncertainty bounds for expected products"};
    app.require_subcommand(1);

    std::string spec_path, out_path, target_str, example_name, out_dir;
    int grid = 257;
    std::optional<int> opt_grid, opt_n;
    std::optional<std::uint64_t> opt_seed;
    std::optional<std::string> opt_target;
    int pivot = 0;

    auto* bounds_cmd = app.add_subcommand("bounds", "Bound values and sharpness report");
    bounds_cmd->add_option("--spec", spec_path, "problem spec JSON")->required();
    int bounds_grid = -1;
    bounds_cmd->add_option("--grid", bounds_grid, "feasibility grid size");

    auto* sample_cmd = app.add_subcommand("sample", "Draw from the extremal coupling");
    sample_cmd->add_option("--spec", spec_path, "problem spec JSON")->required();
    int sample_n = -1;
    std::int64_t sample_seed = -1;
    sample_cmd->add_option("--n", sample_n, "number of rows");
    sample_cmd->add_option("--seed", sample_seed, "RNG seed");
    sample_cmd->add_option("--target", target_str, "max or min");
    sample_cmd->add_option("--pivot", pivot, "pivot coordinate for d >= 4");
    sample_cmd->add_option("--out", out_path, "output CSV path (stdout when absent)");

    auto* support_cmd = app.add_subcommand("support", "Trivariate support-curve CSV");
    support_cmd->add_option("--spec", spec_path, "problem spec JSON")->required();
    support_cmd->add_option("--grid", grid, "points per leg");
    support_cmd->add_option("--target", target_str, "max or min");
    support_cmd->add_option("--out", out_path, "output CSV path (stdout when absent)");

    auto* oracle_cmd =
        app.add_subcommand("oracle", "Exact quantized transport optimum vs the bound");
    oracle_cmd->add_option("--spec", spec_path, "problem spec JSON")->required();
    int oracle_atoms = 8;
    oracle_cmd->add_option("--atoms", oracle_atoms, "atoms per margin");
    oracle_cmd->add_option("--target", target_str, "max or min");

    auto* example_cmd = app.add_subcommand("example", "Write a reproduction bundle");
    example_cmd
        ->add_option("name", example_name,
                     "linear | shifted_exp | shifted_exp_hetero | normal_max | "
                     "normal_min | d4_normal")
        ->required();
    example_cmd->add_option("--out", out_dir, "bundle directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitSpec;
    }

    try {
        if (bounds_cmd->parsed()) {
            if (bounds_grid > 0) opt_grid = bounds_grid;
            return cmd_bounds(spec_path, opt_grid);
        }
        if (sample_cmd->parsed()) {
            if (sample_n >= 0) opt_n = sample_n;
            if (sample_seed >= 0) opt_seed = static_cast<std::uint64_t>(sample_seed);
            if (!target_str.empty()) opt_target = target_str;
            return cmd_sample(spec_path, opt_n, opt_seed, opt_target, pivot, out_path);
        }
        if (support_cmd->parsed()) {
            if (!target_str.empty()) opt_target = target_str;
            return cmd_support(spec_path, grid, opt_target, out_path);
        }
        if (oracle_cmd->parsed()) {
            if (!target_str.empty()) opt_target = target_str;
            return cmd_oracle(spec_path, oracle_atoms, opt_target);
        }
        if (example_cmd->parsed()) return cmd_example(example_name, out_dir);
    } catch (const pb::infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n"
                  << e.report.to_json().dump(2) << "\n";
        return kExitInfeasible;
    } catch (const pb::spec_error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitSpec;
    } catch (const pb::size_error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitSpec;
    } catch (const pb::accuracy_error& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (partial=" << e.partial_value << ", err=" << e.error_estimate << ")\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitSpec;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitSpec;
}
