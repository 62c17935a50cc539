#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace deepmod {

/// The four grid moves. Encodings are part of the artifact contract: they are
/// used for tie-breaking, CSV columns and feature-model keys.
enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr int kNumActions = 4;
inline constexpr Action kAllActions[kNumActions] = {Action::Up, Action::Down,
                                                    Action::Left, Action::Right};

const char* action_name(Action a);
Action action_from_int(int code);  // throws std::invalid_argument outside 0..3
inline int action_index(Action a) { return static_cast<int>(a); }

/// A cell identity. Row-major: index = row * width + col.
struct State {
    int index = 0;
    auto operator<=>(const State&) const = default;
};

/// Static description of a rectangular grid with one start, one goal and a set
/// of hole cells. Default-constructed spec is the built-in 4x4 lake layout.
struct GridSpec {
    int width = 4;
    int height = 4;
    State start{0};
    State goal{15};
    std::set<int> holes{5, 7, 11, 12};

    int n_states() const { return width * height; }
    bool contains(State s) const { return s.index >= 0 && s.index < n_states(); }
    bool is_hole(State s) const { return holes.count(s.index) > 0; }
    bool is_goal(State s) const { return s == goal; }
    int row_of(State s) const { return s.index / width; }
    int col_of(State s) const { return s.index % width; }
    State at(int row, int col) const { return State{row * width + col}; }

    /// Display label: single letters A.. for grids up to 26 cells, else "s<i>".
    std::string label(State s) const;

    void validate() const;  // throws std::invalid_argument on malformed specs

    static GridSpec lake_4x4();
    /// Parse a map from text, one row per line: S start, G goal, H hole,
    /// '.' free ice. Throws std::invalid_argument on ragged or invalid input.
    static GridSpec from_map(const std::string& text);
    static GridSpec from_map_file(const std::string& path);
    std::string to_map() const;
};

/// Which reward convention a transition is scored under.
///
/// DpArrival scores only arrival events (+goal_reward on entering the goal,
/// hole_penalty on entering a hole, 0 otherwise) and is what every value
/// target in the artifact is built from. EpisodeEval adds a constant per-step
/// penalty on top and is what every reported episode reward uses. The two
/// differ by exactly step_penalty on every transition.
enum class RewardVariant { DpArrival, EpisodeEval };

struct RewardModel {
    RewardVariant variant = RewardVariant::DpArrival;
    double goal_reward = 10.0;
    double hole_penalty = -10.0;
    double step_penalty = 0.0;  // -1 under EpisodeEval

    static RewardModel dp_arrival();
    static RewardModel episode_eval();

    /// Arrival component only: what entering `entered` is worth.
    double arrival_reward(const GridSpec& spec, State entered) const;
    /// Full per-transition reward under this variant.
    double transition_reward(const GridSpec& spec, State entered) const;
};

struct TransitionOutcome {
    State next;
    double reward = 0.0;
    bool terminal = false;  // true iff next is the goal; holes do not terminate
};

/// One deterministic move. Off-grid moves clamp (the agent stays in place) and
/// still cost a step under EpisodeEval. Stepping from the goal is a contract
/// violation and throws std::invalid_argument.
TransitionOutcome step(const GridSpec& spec, const RewardModel& model, State s,
                       Action a);

/// One-hot encoding of a state, length n_states, exactly one 1.0.
std::vector<double> encode_one_hot(const GridSpec& spec, State s);

struct EpisodeResult {
    double total_reward = 0.0;
    int steps = 0;
    bool reached_goal = false;
};

using PolicyFn = std::function<Action(State)>;

/// Roll one episode from the start cell under a deterministic policy.
/// Terminates on the goal, after max_steps, or once the running total falls to
/// budget_floor; the returned total is clamped at budget_floor.
EpisodeResult run_episode(const GridSpec& spec, const RewardModel& model,
                          const PolicyFn& policy, int max_steps = 100,
                          double budget_floor = -100.0);

}  // namespace deepmod
