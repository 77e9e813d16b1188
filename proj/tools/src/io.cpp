#include "mirp_io/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mirp::io {

const char* version() { return MIRP_VERSION; }

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double x = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), x);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw InvalidInput("not a number: '" + std::string(text) + "'");
  return x;
}

Rational parse_exact(std::string_view text) {
  try {
    return parse_rational(std::string(text));
  } catch (const ParseError& e) {
    throw InvalidInput(std::string("not an exact number: '") + std::string(text) + "' (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------- rough paths

Json to_json(const RoughPathGrid& p) {
  const Grading g = p.grading();
  Json j;
  j["d"] = p.d();
  j["gamma"] = format_rational(g.gamma());
  j["max_norm"] = g.max_norm();
  j["times"] = p.times();
  Json incs = Json::array();
  for (const auto& x : p.increments()) {
    Json o = Json::object();
    for (std::size_t i = 0; i < x.size(); ++i) o[format(x.basis().mis[i])] = x[i];
    incs.push_back(std::move(o));
  }
  j["increments"] = std::move(incs);
  return j;
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  return j.at(key);
}

unsigned as_unsigned(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw InvalidInput(std::string(what) + " must be a non-negative integer");
  return j.get<unsigned>();
}

Rational rational_value(const Json& j) {
  if (j.is_string()) return parse_exact(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return Rational(j.get<double>());
  throw InvalidInput("expected a rational as string or number");
}

}  // namespace

RoughPathGrid grid_from_json(const Json& j) {
  const unsigned d = as_unsigned(field(j, "d"), "d");
  if (d < 1) throw InvalidInput("d must be >= 1");
  const Rational gamma = parse_rational(field(j, "gamma").get<std::string>());
  const Grading g(as_unsigned(field(j, "max_norm"), "max_norm"), gamma);
  const auto times = field(j, "times").get<std::vector<double>>();
  const Json& incs = field(j, "increments");
  if (!incs.is_array()) throw InvalidInput("increments must be an array");
  std::vector<GroupElement> out;
  for (const auto& o : incs) {
    if (!o.is_object()) throw InvalidInput("each increment must be an object");
    GroupElement x(d, g);
    for (const auto& [key, val] : o.items()) {
      if (!val.is_number()) throw InvalidInput("increment value for " + key + " is not a number");
      const MultiIndex m = parse_multi_index(key);
      if (m.max_letter() > d) throw InvalidInput("key " + key + " uses a letter above d");
      x.set(m, val.get<double>());
    }
    out.push_back(std::move(x));
  }
  return RoughPathGrid(times, std::move(out));
}

std::vector<std::vector<double>> read_samples_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      header = true;
      if (cells.size() < 2 || cells[0] != "t") throw InvalidInput("CSV header must be t,x1,...,xd");
      for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i] != "x" + std::to_string(i)) throw InvalidInput("CSV header must be t,x1,...,xd");
      width = cells.size();
      continue;
    }
    if (cells.size() != width)
      throw InvalidInput("CSV row " + std::to_string(rows.size() + 1) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(width));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    rows.push_back(std::move(row));
  }
  if (!header) throw InvalidInput("empty CSV");
  return rows;
}

void write_samples_csv(std::ostream& out, const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.empty() ? 1 : rows.front().size() - 1;
  out << "t";
  for (std::size_t i = 1; i <= d; ++i) out << ",x" << i;
  out << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
    out << "\n";
  }
}

// ---------------------------------------------------------------- fields and characters

Json to_json(const PolynomialField& f) {
  Json j;
  j["d"] = f.d();
  Json fields = Json::array();
  for (unsigned i = 0; i <= f.d(); ++i) {
    Json c = Json::array();
    for (const auto& q : f.fields()[i].coeffs()) c.push_back(format_rational(q));
    fields.push_back(Json{{"i", i}, {"coeffs", c}});
  }
  j["fields"] = std::move(fields);
  return j;
}

PolynomialField field_from_json(const Json& j) {
  const unsigned d = as_unsigned(field(j, "d"), "d");
  if (d < 1) throw InvalidInput("d must be >= 1");
  std::vector<Polynomial> polys(d + 1);
  std::vector<bool> seen(d + 1, false);
  for (const auto& e : field(j, "fields")) {
    const unsigned i = as_unsigned(field(e, "i"), "i");
    if (i > d) throw InvalidInput("field index " + std::to_string(i) + " exceeds d");
    if (seen[i]) throw InvalidInput("field index " + std::to_string(i) + " given twice");
    seen[i] = true;
    std::vector<Rational> c;
    for (const auto& v : field(e, "coeffs")) c.push_back(rational_value(v));
    polys[i] = Polynomial(std::move(c));
  }
  return PolynomialField(std::move(polys));
}

Json to_json(const Character& c) {
  Json j;
  j["direction"] = c.direction;
  Json t = Json::object();
  for (const auto& [m, v] : c.values) t[format(m)] = format_rational(v);
  j["terms"] = std::move(t);
  return j;
}

Character character_from_json(const Json& j) {
  Character c;
  c.direction = as_unsigned(field(j, "direction"), "direction");
  for (const auto& [key, val] : field(j, "terms").items()) c.values[parse_multi_index(key)] = rational_value(val);
  return c;
}

Translation translation_from_json(const Json& j) {
  const Json& arr = j.is_array() ? j : field(j, "characters");
  std::vector<Character> chars;
  for (const auto& c : arr) chars.push_back(character_from_json(c));
  unsigned d = 1;
  if (j.is_object() && j.contains("d")) {
    d = as_unsigned(j.at("d"), "d");
  } else {
    for (const auto& c : chars) d = std::max({d, c.direction, c.max_letter()});
  }
  return Translation(std::move(chars), d);
}

// ---------------------------------------------------------------- outputs

void write_solution_csv(std::ostream& out, const FlowSolution& sol) {
  out << "t,y\n";
  for (std::size_t j = 0; j < sol.times.size(); ++j)
    out << format_double(sol.times[j]) << "," << format_double(sol.values[j]) << "\n";
}

namespace {
Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
}  // namespace

Json to_json(const DavieReport& r) {
  Json j;
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(Json{{"s", row.s}, {"t", row.t}, {"residual", row.residual}});
  Json scales = Json::array();
  for (const auto& [h, res] : r.scales) scales.push_back(Json{{"h", h}, {"max_residual", res}});
  j["slope"] = number_or_null(r.slope);
  j["target"] = r.target;
  j["scales"] = std::move(scales);
  j["rows"] = std::move(rows);
  return j;
}

namespace {
std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}
}  // namespace

Json provenance_json(const Provenance& p) {
  Json j;
  j["tool"] = "mirp";
  j["version"] = version();
  j["command"] = p.command;
  j["rng"] = brownian_generator_name();
  j["config"] = p.config;
  if (p.timestamp) j["timestamp"] = utc_now();
  return j;
}

void write_provenance_comments(std::ostream& out, const Provenance& p) {
  const Json j = provenance_json(p);
  for (const auto& [k, v] : j.items()) out << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

}  // namespace mirp::io
