#pragma once

#include "imdp/robust_mdp.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace imdp {

/// Explicit-state text format.
///
/// States file: optional `# confidence=<x>` line, then one `index label`
/// line per state, label in {region:<id>, goal, unsafe, out}.
/// Transitions file: one `state action successor [low,high]` line per
/// transition, grouped by (state, action) in increasing order. Numbers are
/// written as the shortest decimal that round-trips exactly.
void export_explicit(const IntervalMDP& model, std::ostream& states, std::ostream& transitions);
void export_explicit(const IntervalMDP& model, const std::filesystem::path& states_path,
                     const std::filesystem::path& transitions_path);

/// Inverse of export_explicit. Rows of the same action with identical
/// contents are pooled. Throws FormatError naming the file and line.
IntervalMDP import_explicit(std::istream& states, std::istream& transitions);
IntervalMDP import_explicit(const std::filesystem::path& states_path,
                            const std::filesystem::path& transitions_path);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);
std::string format_interval(const ProbabilityInterval& interval);

}  // namespace imdp
