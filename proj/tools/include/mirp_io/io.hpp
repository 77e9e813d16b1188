#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mirp/elementary.hpp"
#include "mirp/flow.hpp"
#include "mirp/roughpath.hpp"
#include "mirp/translation.hpp"

namespace mirp::io {

using Json = nlohmann::ordered_json;

// shortest round-trip decimal text, '.' separator regardless of locale
std::string format_double(double x);
double parse_double(std::string_view text);
// "p/q", integers and decimals such as "-0.125" or "1e-3", exact; InvalidInput on failure
Rational parse_exact(std::string_view text);

Json to_json(const RoughPathGrid& p);
RoughPathGrid grid_from_json(const Json& j);

// rows (t, x1, …, xd); '#' lines are skipped
std::vector<std::vector<double>> read_samples_csv(std::istream& in);
void write_samples_csv(std::ostream& out, const std::vector<std::vector<double>>& rows);

Json to_json(const PolynomialField& f);
PolynomialField field_from_json(const Json& j);

Json to_json(const Character& c);
Character character_from_json(const Json& j);
// {"d":…, "characters":[…]} or a bare array of characters (d from the largest letter seen, at least 1)
Translation translation_from_json(const Json& j);

void write_solution_csv(std::ostream& out, const FlowSolution& sol);
Json to_json(const DavieReport& r);

struct Provenance {
  std::string command;
  Json config = Json::object();
  bool timestamp = true;
};
Json provenance_json(const Provenance& p);
// the same fields as '# key: value' comment lines
void write_provenance_comments(std::ostream& out, const Provenance& p);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

const char* version();

}  // namespace mirp::io
