// Command-line front end: reproduction experiments, the six-stage pipeline,
// feature-model dumps and the acceptance suite.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deepmod/efm.hpp"
#include "deepmod/format.hpp"
#include "deepmod/harness.hpp"

namespace {

using namespace deepmod;

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void print_report(const RunReport& rep) {
    std::cout << "experiment: " << rep.experiment;
    if (!rep.seeds.empty()) {
        std::cout << " (seeds";
        for (std::uint64_t s : rep.seeds) std::cout << ' ' << s;
        std::cout << ')';
    }
    std::cout << '\n';

    if (!rep.columns.empty()) {
        std::printf("%-6s", "state");
        for (const MethodColumn& c : rep.columns) std::printf(" %15s", c.method.c_str());
        std::printf("\n");
        const int n = static_cast<int>(rep.columns.front().values.v.size());
        for (int i = 0; i < n; ++i) {
            std::printf("%-6c", static_cast<char>('A' + i % 26));
            for (const MethodColumn& c : rep.columns) std::printf(" %15.3f", c.values.v[i]);
            std::printf("\n");
        }
    }
    for (const auto& [method, secs] : rep.method_seconds)
        std::printf("seconds %-20s %.2f\n", method.c_str(), secs);
    for (const CheckResult& c : rep.checks) {
        std::printf("%s %s: measured %.4g, limit %.4g", c.passed ? "[ok]  " : "[FAIL]",
                    c.name.c_str(), c.measured, c.limit);
        if (!c.detail.empty()) std::printf(" (%s)", c.detail.c_str());
        std::printf("\n");
    }
}

int run_pipeline_command(const ExperimentOptions& opt, bool noisy, bool use_dqn,
                         std::uint64_t master, bool dump_efm_to_stdout) {
    PipelineConfig pc;
    pc.noisy = noisy;
    pc.use_dqn = use_dqn;
    pc.n_noise = opt.n_noise;
    pc.extraction_layer = opt.extraction_layer;
    pc.master_seed = master;
    pc.q_learning = opt.qlearn;
    pc.dqn = opt.dqn;
    pc.ddpn1 = opt.ddpn_full;
    pc.ddpn2 = opt.ddpn_reduced;
    pc.exploration = opt.explore;

    PipelineArtifacts art = run_deepmod_pipeline(opt.spec, pc);

    if (dump_efm_to_stdout) {
        std::cout << efm_csv(art.efm);
        return 0;
    }

    const GridSpec& spec = opt.spec;
    ValueTable ddpn2_vals = ValueTable::zeros(spec);
    for (int i = 0; i < spec.n_states(); ++i)
        ddpn2_vals.v[i] = art.ddpn2.net.predict(feature_input(art.fmap[State{i}]))[0];

    std::vector<MethodColumn> cols = {{"stage1", art.stage1_values},
                                      {"deepmod_ddpn2", ddpn2_vals}};
    write_file(opt.out_dir + "/values_pipeline.csv", values_csv(spec, cols, {}));
    write_file(opt.out_dir + "/feature_map.csv", feature_map_csv(spec, art.fmap));
    write_file(opt.out_dir + "/efm.csv", efm_csv(art.efm));
    write_file(opt.out_dir + "/trace_ddpn_distill_" + std::to_string(master) + ".csv",
               trace_csv(art.ddpn1.trace, true));
    write_file(opt.out_dir + "/trace_deepmod_ddpn2_" + std::to_string(master) + ".csv",
               trace_csv(art.ddpn2.trace, true));
    save_network_file(art.ddpn1.net, opt.out_dir + "/ddpn1.net");
    save_network_file(art.ddpn2.net, opt.out_dir + "/ddpn2.net");

    std::ostringstream pol;
    pol << "state,action\n";
    for (int i = 0; i < spec.n_states(); ++i)
        pol << spec.label(State{i}) << ',' << action_name(art.policy.choice[i]) << '\n';
    write_file(opt.out_dir + "/policy.csv", pol.str());

    std::cout << "pipeline done: master seed " << master << ", stage 1 "
              << (art.used_dqn ? "action-value net" : "tabular q-learning")
              << ", feature model " << (art.efm.fully_covered ? "complete" : "incomplete")
              << " after " << art.efm.episodes_used << " episodes, artifacts in "
              << opt.out_dir << '\n';
    if (!art.fmap.injective)
        std::cout << "note: feature map is not injective ("
                  << art.fmap.collisions.size() << " collision pairs)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic-programming and feature-model laboratory for the 4x4 frozen lake"};
    app.require_subcommand(1);

    std::string config_path, out_flag, seeds_str, map_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--out", out_flag, "output directory (default: $DEEPMOD_OUT or ./out)");
    app.add_option("--seeds", seeds_str, "comma-separated seed list, e.g. 1,2,3,4,5");
    app.add_option("--set", overrides, "extra key=value override (repeatable)");
    app.add_option("--map", map_path, "grid map file using S/G/H/. rows");

    CLI::App* t1 = app.add_subcommand("table1", "clean-input state-value comparison");
    CLI::App* t2 = app.add_subcommand("table2", "noisy-input state-value comparison");

    CLI::App* cv = app.add_subcommand("curves", "reward-curve experiments");
    int fig = 5;
    cv->add_option("--fig", fig, "figure id: 5 (noisy), 6 (clean) or 7 (pipeline)")
        ->required()
        ->check(CLI::IsMember({5, 6, 7}));

    CLI::App* pl = app.add_subcommand("pipeline", "run the six-stage pipeline once");
    bool noisy = true, use_dqn = true;
    std::uint64_t master = 1;
    pl->add_flag("--noisy,!--clean", noisy, "add noise bits to network inputs (default on)");
    CLI::Option* dqn_flag = pl->add_flag(
        "--use-dqn,!--use-tabular", use_dqn,
        "stage 1: action-value net (default) or tabular q-learning");
    pl->add_option("--seed", master, "master seed (default 1)");

    CLI::App* ed = app.add_subcommand("efm-dump", "build a feature model and print its csv");
    bool ed_noisy = true;
    std::uint64_t ed_master = 1;
    ed->add_flag("--noisy,!--clean", ed_noisy, "add noise bits to network inputs (default on)");
    ed->add_option("--seed", ed_master, "master seed (default 1)");

    CLI::App* ck = app.add_subcommand("check", "run the full acceptance suite");

    CLI11_PARSE(app, argc, argv);

    try {
        KeyValueConfig cfg;
        if (!config_path.empty()) cfg = KeyValueConfig::from_file(config_path);
        for (const std::string& ov : overrides) {
            std::size_t eq = ov.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got: " + ov);
            cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
        }
        if (!map_path.empty()) cfg.set("grid.map_file", map_path);
        if (!seeds_str.empty()) cfg.set("seeds", seeds_str);

        ExperimentOptions opt = options_from_config(cfg);
        if (const char* env = std::getenv("DEEPMOD_OUT"); env != nullptr && !cfg.has("out"))
            opt.out_dir = env;
        if (!out_flag.empty()) opt.out_dir = out_flag;

        if (t1->parsed()) {
            RunReport rep = reproduce_table1(opt);
            print_report(rep);
            return rep.all_passed() ? 0 : 1;
        }
        if (t2->parsed()) {
            RunReport rep = reproduce_table2(opt);
            print_report(rep);
            return rep.all_passed() ? 0 : 1;
        }
        if (cv->parsed()) {
            CurveSummary summary = reproduce_curves(fig, opt);
            print_report(summary.report);
            for (const auto& [method, it] : summary.stabilization_median)
                std::printf("stabilization %-20s iteration %d (median)\n", method.c_str(), it);
            return summary.report.all_passed() ? 0 : 1;
        }
        if (pl->parsed()) {
            if (dqn_flag->count() == 0) use_dqn = opt.pipeline_use_dqn;
            return run_pipeline_command(opt, noisy, use_dqn, master, false);
        }
        if (ed->parsed())
            return run_pipeline_command(opt, ed_noisy, opt.pipeline_use_dqn, ed_master, true);
        if (ck->parsed()) {
            std::vector<CriterionResult> results = run_acceptance(opt);
            return print_acceptance(results) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
