#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bdmix/chain.hpp"

namespace bdmix {

inline constexpr std::size_t kDefaultMaxStates = 1'000'000;

/// Reads {"n", "p", "q", "r"} or {"conductances": {"edges", "loops",
/// "loop_counting"?}}. Numbers may be JSON doubles or decimal strings.
/// Malformed JSON is reported with line and column; non-finite values and
/// chains larger than max_states are rejected with InvalidInput.
Chain parse_chain_json(std::string_view text, std::size_t max_states = kDefaultMaxStates);
Chain read_chain_file(const std::string& path, std::size_t max_states = kDefaultMaxStates);

/// A bare array of reals, or {"thetas": [...]}.
std::vector<double> parse_real_array_json(std::string_view text);

/// Shortest round-trip representation of every probability.
std::string chain_to_json(const Chain& chain);

/// Whole file as bytes; throws InvalidInput when unreadable.
std::string read_text_file(const std::string& path);

}  // namespace bdmix
