#include "report.hpp"

#include <cmath>
#include <cstdio>

namespace bdmix::cli {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

namespace {

void indent(std::ostream& os, int level) {
  for (int i = 0; i < level; ++i) os << "  ";
}

void emit(std::ostream& os, const Json& v, int level) {
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) os << ",\n";
        first = false;
        indent(os, level + 1);
        os << Json(key).dump() << ": ";
        emit(os, item, level + 1);
      }
      os << "\n";
      indent(os, level);
      os << "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalars = true;
      for (const auto& item : v) scalars = scalars && !item.is_structured();
      if (scalars) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) os << ", ";
          emit(os, v[i], level);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        indent(os, level + 1);
        emit(os, v[i], level + 1);
      }
      os << "\n";
      indent(os, level);
      os << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      os << (std::isfinite(x) ? format_real(x) : "null");
      return;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

void write_json(std::ostream& os, const Json& value) {
  emit(os, value, 0);
  os << "\n";
}

Json Manifest::to_json() const {
  Json m;
  m["command"] = command;
  m["input_digest"] = input_digest;
  m["tool_version"] = version;
  m["tolerance"] = tolerance;
  m["seed"] = seed ? Json(*seed) : Json(nullptr);
  m["outputs"] = outputs;
  return m;
}

std::string Manifest::csv_banner() const {
  std::string s = "# ";
  s += kCsvVersion;
  s += " command=" + command + " input=" + input_digest + " version=" + version +
       " tolerance=" + format_real(tolerance);
  if (seed) s += " seed=" + std::to_string(*seed);
  return s;
}

}  // namespace bdmix::cli
