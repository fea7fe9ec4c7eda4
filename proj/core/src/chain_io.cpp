#include "bdmix/chain_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bdmix/errors.hpp"

namespace bdmix {
namespace {

using json = nlohmann::json;

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character.
    const std::size_t offset = e.byte == 0 ? 0 : std::min<std::size_t>(e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string detail = e.what();
    if (const auto colon = detail.rfind(": "); colon != std::string::npos) detail = detail.substr(colon + 2);
    throw InvalidInput("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                       detail);
  }
}

double to_real(const json& v, const std::string& where) {
  double x = 0.0;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    if (first < last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || first == last) {
      throw InvalidInput(where + ": '" + s + "' is not a decimal number");
    }
  } else {
    throw InvalidInput(where + ": expected a number or a decimal string");
  }
  if (!std::isfinite(x)) throw InvalidInput(where + ": non-finite value");
  return x;
}

std::vector<double> to_reals(const json& doc, const char* key, const std::string& prefix = "") {
  const std::string name = prefix + key;
  if (!doc.contains(key)) throw InvalidInput("missing field \"" + name + "\"");
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw InvalidInput("field \"" + name + "\" must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(to_real(arr[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

void check_size(std::size_t states, std::size_t max_states) {
  if (states > max_states) {
    throw InvalidInput("chain has " + std::to_string(states) + " states, above the limit of " +
                       std::to_string(max_states));
  }
}

}  // namespace

Chain parse_chain_json(std::string_view text, std::size_t max_states) {
  const json doc = parse_document(text);
  if (!doc.is_object()) throw InvalidInput("chain JSON must be an object");

  if (doc.contains("conductances")) {
    const json& c = doc.at("conductances");
    if (!c.is_object()) throw InvalidInput("field \"conductances\" must be an object");
    std::vector<double> edges = to_reals(c, "edges", "conductances.");
    std::vector<double> loops = to_reals(c, "loops", "conductances.");
    check_size(loops.size(), max_states);
    LoopCounting counting = LoopCounting::once;
    if (c.contains("loop_counting")) {
      const json& lc = c.at("loop_counting");
      if (lc == "once") {
        counting = LoopCounting::once;
      } else if (lc == "twice") {
        counting = LoopCounting::twice;
      } else {
        throw InvalidInput("conductances.loop_counting must be \"once\" or \"twice\"");
      }
    }
    return from_conductances(edges, loops, counting);
  }

  std::vector<double> p = to_reals(doc, "p");
  std::vector<double> q = to_reals(doc, "q");
  std::vector<double> r = to_reals(doc, "r");
  check_size(p.size(), max_states);
  if (doc.contains("n")) {
    const json& n = doc.at("n");
    if (!n.is_number_integer() || n.get<long long>() < 0) throw InvalidInput("field \"n\" must be a non-negative integer");
    const auto declared = n.get<std::size_t>();
    if (declared + 1 != p.size()) {
      throw InvalidInput("dimension mismatch: n = " + std::to_string(declared) + " but p has " +
                         std::to_string(p.size()) + " entries");
    }
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Chain read_chain_file(const std::string& path, std::size_t max_states) {
  return parse_chain_json(read_text_file(path), max_states);
}

std::vector<double> parse_real_array_json(std::string_view text) {
  const json doc = parse_document(text);
  if (doc.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < doc.size(); ++i) out.push_back(to_real(doc[i], "[" + std::to_string(i) + "]"));
    return out;
  }
  if (doc.is_object()) return to_reals(doc, "thetas");
  throw InvalidInput("expected an array of numbers or {\"thetas\": [...]}");
}

std::string chain_to_json(const Chain& chain) {
  json doc;
  doc["n"] = chain.n();
  doc["p"] = std::vector<double>(chain.births().begin(), chain.births().end());
  doc["q"] = std::vector<double>(chain.deaths().begin(), chain.deaths().end());
  doc["r"] = std::vector<double>(chain.holds().begin(), chain.holds().end());
  return doc.dump(2) + "\n";
}

}  // namespace bdmix
