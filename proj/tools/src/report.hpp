#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace bdmix::cli {

using Json = nlohmann::ordered_json;

/// %.17g; "inf", "-inf" and "nan" for non-finite values.
std::string format_real(double x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex_digest(std::uint64_t h);

/// Pretty JSON (two-space indent, trailing newline) with every floating-point
/// value printed by format_real. Non-finite values become null.
void write_json(std::ostream& os, const Json& value);

struct Manifest {
  std::string command;
  std::string input_digest;
  std::string version;
  double tolerance = 0.0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;

  Json to_json() const;
  /// First line of every CSV the run writes.
  std::string csv_banner() const;
};

/// Leads the banner line of every CSV; bumped when columns change meaning.
inline constexpr std::string_view kCsvVersion = "bdmix-csv/1";

}  // namespace bdmix::cli
