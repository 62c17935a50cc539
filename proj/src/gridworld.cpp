#include "deepmod/gridworld.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace deepmod {

const char* action_name(Action a) {
    switch (a) {
        case Action::Up: return "up";
        case Action::Down: return "down";
        case Action::Left: return "left";
        case Action::Right: return "right";
    }
    throw std::invalid_argument("action_name: bad action code");
}

Action action_from_int(int code) {
    if (code < 0 || code >= kNumActions)
        throw std::invalid_argument("action_from_int: code " + std::to_string(code) +
                                    " outside 0..3");
    return static_cast<Action>(code);
}

std::string GridSpec::label(State s) const {
    if (n_states() <= 26) return std::string(1, static_cast<char>('A' + s.index));
    return "s" + std::to_string(s.index);
}

void GridSpec::validate() const {
    if (width < 1 || height < 1)
        throw std::invalid_argument("GridSpec: non-positive dimensions");
    if (!contains(start)) throw std::invalid_argument("GridSpec: start off grid");
    if (!contains(goal)) throw std::invalid_argument("GridSpec: goal off grid");
    if (start == goal) throw std::invalid_argument("GridSpec: start equals goal");
    for (int h : holes) {
        if (h < 0 || h >= n_states())
            throw std::invalid_argument("GridSpec: hole off grid");
        if (h == start.index) throw std::invalid_argument("GridSpec: start is a hole");
        if (h == goal.index) throw std::invalid_argument("GridSpec: goal is a hole");
    }
}

GridSpec GridSpec::lake_4x4() { return GridSpec{}; }

GridSpec GridSpec::from_map(const std::string& text) {
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(line);
    }
    if (rows.empty()) throw std::invalid_argument("grid map: empty");

    GridSpec spec;
    spec.height = static_cast<int>(rows.size());
    spec.width = static_cast<int>(rows[0].size());
    spec.holes.clear();
    int starts = 0, goals = 0;
    for (int r = 0; r < spec.height; ++r) {
        if (static_cast<int>(rows[r].size()) != spec.width)
            throw std::invalid_argument("grid map: ragged rows");
        for (int c = 0; c < spec.width; ++c) {
            State s = spec.at(r, c);
            switch (rows[r][c]) {
                case 'S': spec.start = s; ++starts; break;
                case 'G': spec.goal = s; ++goals; break;
                case 'H': spec.holes.insert(s.index); break;
                case '.': break;
                default:
                    throw std::invalid_argument(std::string("grid map: bad cell '") +
                                                rows[r][c] + "'");
            }
        }
    }
    if (starts != 1) throw std::invalid_argument("grid map: need exactly one S");
    if (goals != 1) throw std::invalid_argument("grid map: need exactly one G");
    spec.validate();
    return spec;
}

GridSpec GridSpec::from_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("grid map: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_map(buf.str());
}

std::string GridSpec::to_map() const {
    std::string out;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            State s = at(r, c);
            char ch = '.';
            if (s == start) ch = 'S';
            else if (s == goal) ch = 'G';
            else if (is_hole(s)) ch = 'H';
            out += ch;
        }
        out += '\n';
    }
    return out;
}

RewardModel RewardModel::dp_arrival() { return RewardModel{}; }

RewardModel RewardModel::episode_eval() {
    RewardModel m;
    m.variant = RewardVariant::EpisodeEval;
    m.step_penalty = -1.0;
    return m;
}

double RewardModel::arrival_reward(const GridSpec& spec, State entered) const {
    if (spec.is_goal(entered)) return goal_reward;
    if (spec.is_hole(entered)) return hole_penalty;
    return 0.0;
}

double RewardModel::transition_reward(const GridSpec& spec, State entered) const {
    return arrival_reward(spec, entered) + step_penalty;
}

TransitionOutcome step(const GridSpec& spec, const RewardModel& model, State s,
                       Action a) {
    if (!spec.contains(s)) throw std::invalid_argument("step: state off grid");
    if (spec.is_goal(s)) throw std::invalid_argument("step: stepping from the goal");

    int row = spec.row_of(s), col = spec.col_of(s);
    switch (a) {
        case Action::Up: row -= 1; break;
        case Action::Down: row += 1; break;
        case Action::Left: col -= 1; break;
        case Action::Right: col += 1; break;
    }
    // Boundary clamp: an off-grid move leaves the agent where it was.
    if (row < 0) row = 0;
    if (row >= spec.height) row = spec.height - 1;
    if (col < 0) col = 0;
    if (col >= spec.width) col = spec.width - 1;

    TransitionOutcome out;
    out.next = spec.at(row, col);
    out.reward = model.transition_reward(spec, out.next);
    out.terminal = spec.is_goal(out.next);
    return out;
}

std::vector<double> encode_one_hot(const GridSpec& spec, State s) {
    if (!spec.contains(s)) throw std::invalid_argument("encode_one_hot: state off grid");
    std::vector<double> x(spec.n_states(), 0.0);
    x[s.index] = 1.0;
    return x;
}

EpisodeResult run_episode(const GridSpec& spec, const RewardModel& model,
                          const PolicyFn& policy, int max_steps,
                          double budget_floor) {
    EpisodeResult res;
    State s = spec.start;
    while (res.steps < max_steps) {
        TransitionOutcome t = step(spec, model, s, policy(s));
        res.total_reward += t.reward;
        res.steps += 1;
        s = t.next;
        if (t.terminal) {
            res.reached_goal = true;
            break;
        }
        if (res.total_reward <= budget_floor) break;
    }
    if (res.total_reward < budget_floor) res.total_reward = budget_floor;
    return res;
}

}  // namespace deepmod
