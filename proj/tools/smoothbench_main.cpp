// Command-line front end: run scenarios, sweep an axis, verify nets, and run
// the hypercube lower-bound experiment.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smoothbench/harness.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    for (double v : parse_double_list(csv)) out.push_back(static_cast<int>(v));
    return out;
}

std::vector<std::string> parse_string_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

void write_rows(const std::string& path, const std::vector<smoothbench::ResultRow>& rows,
                bool lb_columns) {
    std::ofstream out(path);
    if (!out) throw smoothbench::ScenarioError("cannot open output file: " + path);
    smoothbench::write_csv(rows, out, lb_columns);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace smoothbench;
    CLI::App app{"smoothbench: smoothed-request experiments for k-server, k-taxi and set chasing"};
    app.require_subcommand(1);

    std::string config_path, out_path, axis, values_csv, k_csv = "4,8,16";
    std::string problem_name_arg = "kserver", algorithms_csv = "greedy";
    std::string save_net_path;
    size_t lb_T = 20000, samples = 100000;
    int lb_seeds = 20;
    bool timing = false;

    std::string dump_trace_path;
    auto* run_cmd = app.add_subcommand("run", "run all seeds of one scenario config");
    run_cmd->add_option("--config", config_path, "scenario config file")->required();
    run_cmd->add_option("--out", out_path, "output CSV")->required();
    run_cmd->add_flag("--timing", timing, "fill the runtime column (breaks byte reproducibility)");
    run_cmd->add_option("--dump-trace", dump_trace_path,
                        "write the first seed's instance as a trace file with its OPT section");

    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one axis of a scenario config");
    sweep_cmd->add_option("--config", config_path, "scenario config file")->required();
    sweep_cmd->add_option("--axis", axis, "axis: sigma | k | T | m")->required();
    sweep_cmd->add_option("--values", values_csv, "comma-separated axis values")->required();
    sweep_cmd->add_option("--out", out_path, "output CSV")->required();
    sweep_cmd->add_flag("--timing", timing, "fill the runtime column");

    auto* verify_cmd = app.add_subcommand("verify-net", "build the scenario's net and verify it");
    verify_cmd->add_option("--config", config_path, "scenario config file")->required();
    verify_cmd->add_option("--samples", samples, "fresh density samples");
    verify_cmd->add_option("--save", save_net_path, "write the net to a file");

    auto* lb_cmd = app.add_subcommand("lb-experiment", "hypercube lower-bound ratio experiment");
    lb_cmd->add_option("--k", k_csv, "comma-separated k values (each >= 2)");
    lb_cmd->add_option("--T", lb_T, "requests per trial");
    lb_cmd->add_option("--seeds", lb_seeds, "number of seeds");
    lb_cmd->add_option("--out", out_path, "output CSV")->required();
    lb_cmd->add_option("--problem", problem_name_arg, "kserver | ktaxi | chasing");
    lb_cmd->add_option("--algorithms", algorithms_csv, "comma-separated algorithm names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            Scenario sc = load_scenario(config_path);
            write_rows(out_path, run_scenario(sc, timing), false);
            if (!dump_trace_path.empty()) {
                std::ofstream out(dump_trace_path);
                if (!out) throw ScenarioError("cannot open trace output: " + dump_trace_path);
                save_trace(build_trial_trace(sc, sc.seeds.at(0)), out);
            }
        } else if (sweep_cmd->parsed()) {
            Scenario sc = load_scenario(config_path);
            write_rows(out_path, sweep(sc, axis, parse_double_list(values_csv), timing), false);
        } else if (verify_cmd->parsed()) {
            Scenario sc = load_scenario(config_path);
            normalize_scenario(sc);
            const NormedSpace space(sc.m, sc.norm);
            const Ball ball(space, sc.center, sc.radius);
            double eta = sc.eta_override;
            if (eta <= 0.0) {
                GeneratorDescriptor desc;
                desc.kind = sc.generator;
                desc.problem = sc.problem;
                desc.k = sc.k;
                desc.rho = sc.rho;
                const double sigma = sigma_of_generator(desc, ball);
                eta = choose_eta(sc.problem, sigma, sc.k, sc.m, sc.radius);
            }
            const Net net = build_eta_net(ball, eta);
            const NetReport rep = verify_net_sampled(net, 12345, samples);
            std::cout << "eta " << eta << "\n";
            std::cout << "net_size " << net.points.size() << "\n";
            std::cout << "size_bound " << rep.size_bound << "\n";
            std::cout << "separated " << (rep.separated ? "yes" : "no") << "\n";
            std::cout << "dense " << (rep.dense ? "yes" : "no") << "\n";
            std::cout << "max_projection_distance " << rep.max_projection_distance << "\n";
            std::cout << "min_pairwise_distance " << rep.min_pairwise_distance << "\n";
            if (!save_net_path.empty()) {
                std::ofstream out(save_net_path);
                save_net(net, out);
            }
            if (!(rep.separated && rep.dense && rep.size_ok)) return 3;
        } else if (lb_cmd->parsed()) {
            const auto rows = ratio_experiment(problem_from_name(problem_name_arg),
                                               parse_int_list(k_csv), lb_T, lb_seeds,
                                               parse_string_list(algorithms_csv));
            write_rows(out_path, rows, true);
        }
    } catch (const ScenarioError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
