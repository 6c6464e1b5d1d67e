#include "mpass/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

#include "mpass/errors.hpp"

namespace mpass::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Label parse_label(std::string_view text) {
  text = trim(text);
  Label v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InputError("bad label '" + std::string(text) + "'");
  }
  return v;
}

json labels_to_json(const std::vector<Label>& labels) { return json(labels); }

json rationals_to_json(const std::vector<Rational>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(x.to_string());
  return out;
}

Rational rational_from_json(const json& v, const char* field) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw InputError(std::string("field '") + field + "' must be an integer or a \"p/q\" string");
}

json pattern_to_json(const Frame& frame, const Pattern& pattern) {
  json visited = json::array();
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i]) visited.push_back(frame.museums[i]);
  }
  return visited;
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "json") return Format::Json;
  if (text == "csv") return Format::Csv;
  throw InputError("unknown format '" + std::string(text) + "' (expected json or csv)");
}

json problem_to_json(const Problem& p) {
  json rows = json::array();
  for (const auto& row : p.entrance()) {
    json r = json::array();
    for (auto bit : row) r.push_back(static_cast<int>(bit));
    rows.push_back(std::move(r));
  }
  return {{"museums", labels_to_json(p.museums())},
          {"holders", labels_to_json(p.holders())},
          {"price", p.price().to_string()},
          {"entrance", std::move(rows)}};
}

Problem problem_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("problem document must be a JSON object");
  for (const char* key : {"museums", "holders", "price", "entrance"}) {
    if (!doc.contains(key)) throw InputError(std::string("problem document lacks '") + key + "'");
  }
  try {
    auto museums = doc.at("museums").get<std::vector<Label>>();
    auto holders = doc.at("holders").get<std::vector<Label>>();
    std::vector<VisitRow> rows;
    for (const auto& r : doc.at("entrance")) {
      VisitRow row;
      for (const auto& bit : r) {
        const int b = bit.get<int>();
        if (b != 0 && b != 1) throw InputError("entrance entries must be 0 or 1");
        row.push_back(static_cast<std::uint8_t>(b));
      }
      rows.push_back(std::move(row));
    }
    return Problem(std::move(museums), std::move(holders), rational_from_json(doc.at("price"), "price"),
                   std::move(rows));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed problem document: ") + e.what());
  }
}

std::vector<Label> parse_label_list(std::string_view text) {
  std::vector<Label> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = trim(text.substr(start, comma - start));
    const auto dash = item.find('-', 1);
    if (dash == std::string_view::npos) {
      out.push_back(parse_label(item));
    } else {
      const Label lo = parse_label(item.substr(0, dash));
      const Label hi = parse_label(item.substr(dash + 1));
      if (hi < lo) throw InputError("empty label range '" + std::string(item) + "'");
      for (Label l = lo; l <= hi; ++l) out.push_back(l);
    }
    start = comma + 1;
  }
  return out;
}

Problem read_visit_log(std::istream& in, const std::vector<Label>& museums, const std::vector<Label>& holders,
                       const Rational& price) {
  std::set<std::pair<Label, Label>> visits;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto comma = body.find(',');
    if (comma == std::string_view::npos) {
      throw InputError("visit log line " + std::to_string(lineno) + ": expected 'holder,museum'");
    }
    const auto h = trim(body.substr(0, comma));
    const auto m = trim(body.substr(comma + 1));
    if (lineno == 1 && h == "holder" && m == "museum") continue;
    try {
      visits.emplace(parse_label(h), parse_label(m));
    } catch (const InputError& e) {
      throw InputError("visit log line " + std::to_string(lineno) + ": " + e.what());
    }
  }

  // Build with zero rows first so labels are validated and sorted.
  const Problem blank(museums, holders, price,
                      std::vector<VisitRow>(holders.size(), VisitRow(museums.size(), 0)));
  auto rows = blank.entrance();
  for (const auto& [h, m] : visits) {
    std::size_t a = 0;
    std::size_t i = 0;
    try {
      a = blank.holder_index(h);
      i = blank.museum_index(m);
    } catch (const InputError&) {
      throw InputError("visit (" + std::to_string(h) + "," + std::to_string(m) +
                       ") names a label outside the given museum or holder list");
    }
    rows[a][i] = 1;
  }
  return Problem(blank.museums(), blank.holders(), price, std::move(rows));
}

void write_visit_log(std::ostream& out, const Problem& p) {
  out << "holder,museum\n";
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    for (std::size_t i = 0; i < p.museum_count(); ++i) {
      if (p.visited(a, i)) out << p.holders()[a] << ',' << p.museums()[i] << '\n';
    }
  }
}

Problem ingest_text(const std::string& text, const IngestOptions& opts) {
  if (opts.format == Format::Csv) {
    if (!opts.museums || !opts.holders) {
      throw InputError("csv input needs explicit --museums and --holders lists");
    }
    if (!opts.price) throw InputError("csv input needs --price");
    std::istringstream in(text);
    return read_visit_log(in, *opts.museums, *opts.holders, *opts.price);
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  Problem p = problem_from_json(doc);
  if (opts.price && *opts.price != p.price()) {
    throw InputError("--price " + opts.price->to_string() + " disagrees with the document price " +
                     p.price().to_string());
  }
  return p;
}

std::string read_input(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  return text;
}

Problem ingest(const std::string& path, const IngestOptions& opts) { return ingest_text(read_input(path), opts); }

std::string digest(std::string_view bytes) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string_view>{}(bytes);
  return os.str();
}

json allocation_to_json(const Problem& p, const Allocation& a) {
  json exact = json::object();
  json approx = json::object();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto key = std::to_string(p.museums()[i]);
    exact[key] = a[i].to_string();
    approx[key] = a[i].to_decimal(6);
  }
  return {{"museums", labels_to_json(p.museums())},
          {"exact", std::move(exact)},
          {"approximate", std::move(approx)},
          {"total", a.total().to_string()}};
}

json config_to_json(const EnumerationConfig& cfg) {
  return {{"m_max", cfg.m_max},
          {"n_max", cfg.n_max},
          {"prices", rationals_to_json(cfg.prices)},
          {"domain", to_string(cfg.domain)},
          {"budget", cfg.budget}};
}

json witness_to_json(const Witness& w) {
  json problems = json::array();
  for (const auto& p : w.problems) problems.push_back(problem_to_json(p));
  json out = {{"problems", std::move(problems)},
              {"museums", labels_to_json(w.museums)},
              {"lhs", w.lhs.to_string()},
              {"rhs", w.rhs.to_string()},
              {"relation", w.relation}};
  if (!w.permutation.empty()) out["permutation"] = labels_to_json(w.permutation);
  return out;
}

json verdict_to_json(const AxiomVerdict& v, const std::optional<EnumerationConfig>& cfg) {
  return {{"rule", v.rule},
          {"axiom", to_string(v.axiom)},
          {"config", cfg ? config_to_json(*cfg) : json(nullptr)},
          {"status", v.pass ? "pass" : "fail"},
          {"witness", v.witness ? witness_to_json(*v.witness) : json(nullptr)},
          {"instances_checked", v.instances_checked}};
}

json table_to_json(const AdditiveRuleTable& t) {
  json entries = json::array();
  for (const auto& [pattern, alloc] : t.entries) {
    entries.push_back({{"visited", pattern_to_json(t.frame, pattern)}, {"allocation", rationals_to_json(alloc.shares)}});
  }
  return {{"museums", labels_to_json(t.frame.museums)},
          {"price", t.frame.price.to_string()},
          {"entries", std::move(entries)}};
}

json decomposition_to_json(const Frame& frame, const BetaDecomposition& d) {
  json coeffs = json::array();
  for (const auto& c : d.coefficients) {
    coeffs.push_back({{"visited", pattern_to_json(frame, c.pattern)},
                      {"x", c.unvisited_share ? json(c.unvisited_share->to_string()) : json(nullptr)},
                      {"y", c.visited_share ? json(c.visited_share->to_string()) : json(nullptr)},
                      {"alpha", c.alpha.to_string()},
                      {"beta", c.beta.to_string()},
                      {"in_unit_interval", c.in_unit_interval}});
  }
  return {{"base", to_string(d.base)},
          {"all_in_unit_interval", d.all_in_unit_interval()},
          {"coefficients", std::move(coeffs)}};
}

json synthesis_to_json(const Frame& frame, const SynthesisResult& r) {
  if (const auto* u = std::get_if<UniqueTable>(&r)) {
    return {{"status", "unique"}, {"table", table_to_json(u->table)}};
  }
  if (const auto* f = std::get_if<Family>(&r)) {
    json cs = json::array();
    for (const auto& c : f->constraints) {
      cs.push_back({{"visited", pattern_to_json(frame, c.pattern)},
                    {"x_lower", c.lower.to_string()},
                    {"x_upper", c.upper.to_string()},
                    {"tie_class", c.tie_class}});
    }
    return {{"status", "family"}, {"tie_classes", f->tie_classes}, {"constraints", std::move(cs)}};
  }
  const auto& inf = std::get<Infeasible>(r);
  json pats = json::array();
  for (const auto& p : inf.patterns) pats.push_back(pattern_to_json(frame, p));
  return {{"status", "infeasible"}, {"patterns", std::move(pats)}, {"reason", inf.reason}};
}

json certificate_to_json(const InfeasibilityCertificate& c) {
  json problems = json::array();
  for (const auto& p : c.problems) problems.push_back(problem_to_json(p));
  return {{"tau", c.tau.to_string()},
          {"problems", std::move(problems)},
          {"equalities", c.equalities},
          {"inequalities", c.inequalities},
          {"share_cap", c.share_cap.to_string()},
          {"gap", c.gap.to_string()}};
}

}  // namespace mpass::io
