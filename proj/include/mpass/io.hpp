#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mpass/axioms.hpp"
#include "mpass/enumerate.hpp"
#include "mpass/problem.hpp"
#include "mpass/rational.hpp"
#include "mpass/theorem_lab.hpp"

namespace mpass::io {

using nlohmann::json;

enum class Format { Json, Csv };
Format parse_format(std::string_view text);

// Problem documents: {"museums": [..], "holders": [..], "price": "p/q", "entrance": [[0,1,..],..]}
json problem_to_json(const Problem& p);
/// Throws InputError on a malformed document.
Problem problem_from_json(const json& doc);

/// "1,3,4", "1-5", "1-3,7", or "" for the empty list.
std::vector<Label> parse_label_list(std::string_view text);

/// Visit log: one "holder,museum" pair per line, optional header line,
/// blank lines ignored, duplicates collapse. Every label must appear in the
/// explicit universe lists.
Problem read_visit_log(std::istream& in, const std::vector<Label>& museums, const std::vector<Label>& holders,
                       const Rational& price);
void write_visit_log(std::ostream& out, const Problem& p);

struct IngestOptions {
  Format format = Format::Json;
  std::optional<std::vector<Label>> museums;
  std::optional<std::vector<Label>> holders;
  std::optional<Rational> price;
};

/// Reads a problem from `text`. CSV needs museums, holders and price; for
/// JSON a given price must agree with the document.
Problem ingest_text(const std::string& text, const IngestOptions& opts);
/// Raw bytes of the file at `path` ("-" is standard input).
std::string read_input(const std::string& path);
Problem ingest(const std::string& path, const IngestOptions& opts);

/// Hex digest of the raw input bytes, stable within a build.
std::string digest(std::string_view bytes);

/// Exact shares plus 6-significant-digit decimals, labelled approximate.
json allocation_to_json(const Problem& p, const Allocation& a);
json config_to_json(const EnumerationConfig& cfg);
json witness_to_json(const Witness& w);
json verdict_to_json(const AxiomVerdict& v, const std::optional<EnumerationConfig>& cfg = std::nullopt);
json table_to_json(const AdditiveRuleTable& t);
json decomposition_to_json(const Frame& frame, const BetaDecomposition& d);
json synthesis_to_json(const Frame& frame, const SynthesisResult& r);
json certificate_to_json(const InfeasibilityCertificate& c);

}  // namespace mpass::io
