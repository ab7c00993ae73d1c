#include "steklame/boundary_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace steklame {

namespace {

using nlohmann::json;

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += number(values[i]);
  }
  return out + "]";
}

[[noreturn]] void fail(const std::string& msg) {
  throw Error(ErrorKind::config, "boundary file: " + msg);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) fail("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    fail(std::string("missing numeric field '") + key + "'");
  }
  return obj[key].get<double>();
}

std::vector<double> get_array(const json& obj, const char* key, int order) {
  if (!obj.contains(key) || !obj[key].is_array()) {
    fail(std::string("missing array field '") + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) fail(std::string("non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  if (static_cast<int>(out.size()) != order) {
    fail(std::string("array '") + key + "' must have 'order' entries");
  }
  return out;
}

}  // namespace

std::string boundary_to_json(const Boundary& boundary) {
  std::ostringstream os;
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, FourierBoundary>) {
          os << "{\n  \"type\": \"fourier\",\n  \"order\": " << b.order()
             << ",\n  \"coeffs\": {\n"
             << "    \"x_a0\": " << number(b.x().a0) << ",\n"
             << "    \"x_a\": " << array(b.x().a) << ",\n"
             << "    \"x_b\": " << array(b.x().b) << ",\n"
             << "    \"y_a0\": " << number(b.y().a0) << ",\n"
             << "    \"y_a\": " << array(b.y().a) << ",\n"
             << "    \"y_b\": " << array(b.y().b) << "\n  }\n}\n";
        } else {
          const TrigSeries& p = b.support();
          os << "{\n  \"type\": \"support\",\n  \"order\": " << b.order()
             << ",\n  \"coeffs\": {\n"
             << "    \"a0\": " << number(p.a0) << ",\n"
             << "    \"a\": " << array(p.a) << ",\n"
             << "    \"b\": " << array(p.b) << "\n  }\n}\n";
        }
      },
      boundary);
  return os.str();
}

Boundary boundary_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("top level must be an object");
  reject_unknown(doc, {"type", "order", "coeffs"}, "boundary");
  if (!doc.contains("type") || !doc["type"].is_string()) fail("missing 'type'");
  if (!doc.contains("order") || !doc["order"].is_number_integer()) {
    fail("missing integer 'order'");
  }
  if (!doc.contains("coeffs") || !doc["coeffs"].is_object()) fail("missing 'coeffs'");
  const int order = doc["order"].get<int>();
  if (order < 1) fail("'order' must be >= 1");
  const std::string type = doc["type"].get<std::string>();
  const json& c = doc["coeffs"];
  if (type == "fourier") {
    reject_unknown(c, {"x_a0", "x_a", "x_b", "y_a0", "y_a", "y_b"}, "coeffs");
    return FourierBoundary::create(
        TrigSeries(get_number(c, "x_a0"), get_array(c, "x_a", order),
                   get_array(c, "x_b", order)),
        TrigSeries(get_number(c, "y_a0"), get_array(c, "y_a", order),
                   get_array(c, "y_b", order)));
  }
  if (type == "support") {
    reject_unknown(c, {"a0", "a", "b"}, "coeffs");
    return SupportBoundary::create(TrigSeries(get_number(c, "a0"),
                                              get_array(c, "a", order),
                                              get_array(c, "b", order)));
  }
  fail("'type' must be \"fourier\" or \"support\"");
}

Boundary load_boundary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return boundary_from_json(ss.str());
}

void save_boundary(const Boundary& boundary, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::config, "cannot write " + path.string());
  }
  out << boundary_to_json(boundary);
}

}  // namespace steklame
