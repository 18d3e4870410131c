#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cremona/minimize.hpp"

namespace cremona {

using Json = nlohmann::ordered_json;

// Strict parsing: unknown fields are rejected, ids must be unique, the
// format version must be 1.
AnySystem parse_system(const Json& j);
AnySystem parse_system_text(const std::string& text);

Json system_to_json(const PlaneSystem& s);
Json system_to_json(const HirzebruchSystem& s);
Json system_to_json(const AnySystem& s);

// Classical bracket notation, e.g. L(14;(8,[4^2]),3) or L_3(6,18;3,(2,[2])).
std::string render_system(const PlaneSystem& s);
std::string render_system(const HirzebruchSystem& s);
std::string render_system(const AnySystem& s);

Json classification_to_json(const ClassificationResult& c);
Json minimization_to_json(const MinimizationResult& m);
Json factorization_to_json(const Factorization& f);

// CLI driver; returns the process exit code (0 ok, 1 internal, 2 input).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cremona
