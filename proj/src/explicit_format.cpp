#include "imdp/explicit_format.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace imdp {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return std::string(buf, end);
}

std::string format_interval(const ProbabilityInterval& interval) {
  return "[" + format_double(interval.low) + "," + format_double(interval.high) + "]";
}

void export_explicit(const IntervalMDP& model, std::ostream& states, std::ostream& transitions) {
  states << "# confidence=" << format_double(model.confidence) << '\n';
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    states << s << ' ' << state_label(model.state(s)) << '\n';
  }
  for (std::size_t s = 0; s < model.num_states(); ++s) {
    for (const auto& c : model.choices(s)) {
      for (const auto& t : model.row(c.row)) {
        transitions << s << ' ' << c.action << ' ' << t.successor << ' '
                    << format_interval(t.interval) << '\n';
      }
    }
  }
}

void export_explicit(const IntervalMDP& model, const std::filesystem::path& states_path,
                     const std::filesystem::path& transitions_path) {
  std::ofstream sta(states_path, std::ios::binary);
  std::ofstream tra(transitions_path, std::ios::binary);
  if (!sta || !tra) throw FormatError("cannot open explicit model files for writing");
  export_explicit(model, sta, tra);
}

namespace {

class LineError {
 public:
  LineError(std::string file, std::size_t line) : file_(std::move(file)), line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(file_ + " line " + std::to_string(line_) + ": " + what);
  }

 private:
  std::string file_;
  std::size_t line_;
};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, const LineError& err, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    err.fail(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

StateInfo parse_label(std::string_view label, const LineError& err) {
  if (label == "goal") return {StateKind::goal, 0};
  if (label == "unsafe") return {StateKind::unsafe, 0};
  if (label == "out") return {StateKind::out, 0};
  constexpr std::string_view prefix = "region:";
  if (label.substr(0, prefix.size()) == prefix) {
    return {StateKind::region,
            parse_number<std::size_t>(label.substr(prefix.size()), err, "region id")};
  }
  err.fail("unknown state label '" + std::string(label) + "'");
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

IntervalMDP import_explicit(std::istream& states, std::istream& transitions) {
  IntervalMDP model;
  std::string line;
  std::size_t lineno = 0;
  while (next_line(states, line)) {
    ++lineno;
    const LineError err("states", lineno);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view key = "# confidence=";
      if (std::string_view(line).substr(0, key.size()) == key) {
        model.confidence =
            parse_number<double>(std::string_view(line).substr(key.size()), err, "confidence");
      }
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != 2) err.fail("expected 'index label'");
    const auto index = parse_number<std::size_t>(fields[0], err, "state index");
    if (index != model.num_states()) err.fail("state indices must be consecutive from 0");
    model.add_state(parse_label(fields[1], err));
  }

  struct Pending {
    std::size_t state = 0;
    std::size_t action = 0;
    Distribution dist;
  };
  std::vector<Pending> groups;
  lineno = 0;
  while (next_line(transitions, line)) {
    ++lineno;
    const LineError err("transitions", lineno);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line);
    if (fields.size() != 4) err.fail("expected 'state action successor [low,high]'");
    const auto s = parse_number<std::size_t>(fields[0], err, "state");
    const auto a = parse_number<std::size_t>(fields[1], err, "action");
    const auto t = parse_number<std::size_t>(fields[2], err, "successor");
    if (s >= model.num_states() || t >= model.num_states()) err.fail("state index out of range");
    const auto iv = fields[3];
    const auto comma = iv.find(',');
    if (iv.size() < 5 || iv.front() != '[' || iv.back() != ']' || comma == std::string_view::npos) {
      err.fail("expected interval '[low,high]'");
    }
    ProbabilityInterval interval{
        parse_number<double>(iv.substr(1, comma - 1), err, "lower bound"),
        parse_number<double>(iv.substr(comma + 1, iv.size() - comma - 2), err, "upper bound")};
    if (!(interval.low >= 0.0 && interval.low <= interval.high && interval.high <= 1.0)) {
      err.fail("interval must satisfy 0 <= low <= high <= 1");
    }
    if (groups.empty() || groups.back().state != s || groups.back().action != a) {
      if (!groups.empty() && (groups.back().state > s ||
                              (groups.back().state == s && groups.back().action >= a))) {
        err.fail("transitions must be grouped by increasing (state, action)");
      }
      groups.push_back({s, a, {}});
    } else if (groups.back().dist.back().successor >= t) {
      err.fail("successors must be increasing within a (state, action) group");
    }
    groups.back().dist.push_back({t, interval});
  }

  // Pool identical rows of the same action.
  std::map<std::size_t, std::vector<std::size_t>> rows_by_action;
  for (auto& g : groups) {
    auto& candidates = rows_by_action[g.action];
    std::size_t row = model.num_rows();
    for (const auto r : candidates) {
      if (model.row(r) == g.dist) {
        row = r;
        break;
      }
    }
    if (row == model.num_rows()) {
      row = model.add_row(std::move(g.dist));
      candidates.push_back(row);
    }
    if (model.is_absorbing(g.state)) {
      throw FormatError("transitions: absorbing state " + std::to_string(g.state) +
                        " has actions");
    }
    model.add_choice(g.state, g.action, row);
  }
  return model;
}

IntervalMDP import_explicit(const std::filesystem::path& states_path,
                            const std::filesystem::path& transitions_path) {
  std::ifstream sta(states_path, std::ios::binary);
  std::ifstream tra(transitions_path, std::ios::binary);
  if (!sta) throw FormatError("cannot open " + states_path.string());
  if (!tra) throw FormatError("cannot open " + transitions_path.string());
  return import_explicit(sta, tra);
}

}  // namespace imdp
