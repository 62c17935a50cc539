#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "deepmod/efm.hpp"
#include "deepmod/gridworld.hpp"
#include "deepmod/learners.hpp"
#include "deepmod/tabular.hpp"

namespace deepmod {

/// Flat key=value configuration ("section.key=value" per line, '#' comments).
struct KeyValueConfig {
    std::map<std::string, std::string> values;

    static KeyValueConfig from_text(const std::string& text);
    static KeyValueConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
};

/// Everything an experiment preset needs. Defaults reproduce the reference
/// setup; a KeyValueConfig (plus CLI overrides) can adjust any knob.
struct ExperimentOptions {
    GridSpec spec = GridSpec::lake_4x4();
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    int n_noise = 20;
    int extraction_layer = 3;
    bool pipeline_use_dqn = true;  // stage (i) of the six-stage runs
    QLearningConfig qlearn;
    DqnConfig dqn;
    DdpnConfig ddpn_full;     // one-hot or noisy inputs, full trunk
    DdpnConfig ddpn_reduced;  // feature inputs, reduced trunk
    ExplorationConfig explore;
    std::string out_dir = "out";
    bool write_artifacts = true;

    ExperimentOptions() { ddpn_reduced.hidden = reduced_value_trunk(); }
};

ExperimentOptions options_from_config(const KeyValueConfig& config);

/// Published reference columns the experiments are held against.
const std::array<double, 16>& table1_q_learning_reference();
const std::array<double, 16>& table1_value_iteration_reference();
const std::array<double, 16>& table1_ddpn_reference();
const std::array<double, 16>& table1_reduced_ddpn_reference();

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct MethodColumn {
    std::string method;
    ValueTable values;
};

struct RunReport {
    std::string experiment;
    std::vector<std::uint64_t> seeds;
    std::vector<MethodColumn> columns;
    std::vector<CheckResult> checks;
    std::map<std::string, double> method_seconds;  // median training seconds

    bool all_passed() const;
};

/// One seed of the paired full/reduced training used by several experiments:
/// train the full net (clean or noisy), extract its feature map, train the
/// reduced net on those features.
struct ValueStudyRun {
    TrainedValueNet full;
    StateFeatureMap fmap;
    TrainedValueNet reduced;
    ValueTable full_values;     // deterministic evaluation inputs
    ValueTable reduced_values;
};

ValueStudyRun run_value_study(const GridSpec& spec, const DdpnConfig& full_cfg,
                              const DdpnConfig& reduced_cfg, int n_noise,
                              int extraction_layer, std::uint64_t seed);

/// Reproduces the four-column state-value table (tabular Q-learning, exact
/// value iteration, full net, reduced net) as cell-wise medians over the
/// seeds, writes values_table1.csv plus per-seed traces, and records
/// tolerance checks.
RunReport reproduce_table1(const ExperimentOptions& options);

/// Reproduces the five-column noisy-input table (action-value net, exact
/// value iteration, noisy full net, reduced net on its features, and the
/// feature-model net from the full pipeline), with structural checks.
RunReport reproduce_table2(const ExperimentOptions& options);

struct CurveSummary {
    RunReport report;
    std::map<std::string, int> stabilization_median;  // per method, iterations
};

/// Reward-curve experiments. fig 5: noisy full vs reduced (stabilization
/// ordering). fig 6: clean full vs reduced (constant 4.0 in test). fig 7:
/// distilled full net vs feature-model net from the pipeline.
CurveSummary reproduce_curves(int fig, const ExperimentOptions& options);

/// Median training seconds of the noisy full net vs the reduced net; asserts
/// ordering only (reduced strictly faster), never absolute times.
RunReport timing_report(const ExperimentOptions& options);

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// The full acceptance suite (nine criteria). Pure compute: writes nothing.
std::vector<CriterionResult> run_acceptance(const ExperimentOptions& options);

/// One "[PASS] criterion N: ..." line per criterion; returns true iff all
/// passed.
bool print_acceptance(const std::vector<CriterionResult>& results);

/// Deterministic two-panel SVG line plot (train / test reward curves).
/// Contains no timestamps, so identical inputs give identical bytes.
struct CurveSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (iteration, reward)
};
std::string curves_svg(const std::string& train_title,
                       const std::vector<CurveSeries>& train_series,
                       const std::string& test_title,
                       const std::vector<CurveSeries>& test_series);

std::string values_csv(const GridSpec& spec, const std::vector<MethodColumn>& columns,
                       const std::vector<MethodColumn>& deltas);

/// Backprop vs central finite differences (step h); returns the maximum
/// relative error over all parameters.
double gradient_check(const Network& net, const std::vector<double>& input,
                      const std::vector<double>& target, double h = 1e-5);

}  // namespace deepmod
