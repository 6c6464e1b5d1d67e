#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpass/axioms.hpp"
#include "mpass/errors.hpp"
#include "mpass/io.hpp"
#include "mpass/rules.hpp"
#include "mpass/theorem_lab.hpp"

namespace mpass::cli {

namespace {

using io::json;

std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? sep : "") + parts[k];
  return out;
}

std::string join_labels(const std::vector<Label>& labels) {
  std::vector<std::string> parts;
  for (auto l : labels) parts.push_back(std::to_string(l));
  return join(parts, ",");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    if (comma > start) out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

void print_problem(std::ostream& out, const Problem& p, const std::string& indent = "  ") {
  const auto cls = classify(p);
  out << indent << "museums {" << join_labels(p.museums()) << "}, holders {" << join_labels(p.holders())
      << "}, price " << p.price() << '\n';
  for (std::size_t a = 0; a < p.holder_count(); ++a) {
    out << indent << "  holder " << p.holders()[a] << ":";
    for (auto bit : p.row(a)) out << ' ' << static_cast<int>(bit);
    out << '\n';
  }
  if (!cls.dummy_museums.empty()) {
    out << indent << "dummy museums {" << join_labels({cls.dummy_museums.begin(), cls.dummy_museums.end()})
        << "}\n";
  }
  if (!cls.null_holders.empty()) {
    out << indent << "null holders {" << join_labels({cls.null_holders.begin(), cls.null_holders.end()}) << "}\n";
  }
}

std::string exact_list(const Allocation& a) {
  std::vector<std::string> parts;
  for (const auto& s : a.shares) parts.push_back(s.to_string());
  return join(parts);
}

std::string decimal_list(const Allocation& a) {
  std::vector<std::string> parts;
  for (const auto& s : a.shares) parts.push_back(s.to_decimal(6));
  return join(parts);
}

void print_verdict(std::ostream& out, const AxiomVerdict& v) {
  if (v.pass) {
    out << "PASS " << v.rule << " / " << to_string(v.axiom) << " (" << v.instances_checked << " cases)\n";
    return;
  }
  out << "FAIL " << v.rule << " / " << to_string(v.axiom) << " at case " << v.instances_checked << '\n';
  if (!v.witness) return;
  const auto& w = *v.witness;
  for (std::size_t k = 0; k < w.problems.size(); ++k) {
    out << "problem " << (k + 1) << ":\n";
    print_problem(out, w.problems[k]);
  }
  if (!w.permutation.empty()) out << "holder relabeling: " << join_labels(w.permutation) << '\n';
  out << "museums: " << join_labels(w.museums) << '\n';
  out << "required: " << w.lhs << ' ' << w.relation << ' ' << w.rhs << " (does not hold)\n";
}

/// Options shared by the commands that read a problem.
struct InputFlags {
  std::string path;
  std::string format = "json";
  std::string museums;
  std::string holders;
  std::string price;

  void attach(CLI::App* app, bool required) {
    auto* opt = app->add_option("--input,-i", path, "problem file (json or csv; - for stdin)");
    if (required) opt->required();
    app->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--museums", museums, "museum labels for csv input, e.g. 1-3");
    app->add_option("--holders", holders, "holder labels for csv input, e.g. 1-5");
    app->add_option("--price", price, "pass price, e.g. 1/2");
  }

  io::IngestOptions options() const {
    io::IngestOptions o;
    o.format = io::parse_format(format);
    if (!museums.empty()) o.museums = io::parse_label_list(museums);
    if (!holders.empty()) o.holders = io::parse_label_list(holders);
    if (!price.empty()) o.price = Rational::parse(price);
    return o;
  }
};

struct SweepFlags {
  std::size_t m_max = 3;
  std::optional<std::size_t> n_max;
  std::string domain = "reduced";
  std::size_t budget = EnumerationConfig{}.budget;

  void attach(CLI::App* app) {
    app->add_option("--m-max", m_max, "largest museum count enumerated");
    app->add_option("--n-max,--n", n_max, "largest holder count enumerated (per side for pair axioms)");
    app->add_option("--domain", domain, "reduced or enlarged")->check(CLI::IsMember({"reduced", "enlarged"}));
    app->add_option("--budget", budget, "maximum number of cases");
  }

  EnumerationConfig config(const AxiomId& axiom) const {
    EnumerationConfig cfg;
    cfg.m_max = m_max;
    cfg.n_max = n_max.value_or(is_pair_axiom(axiom.kind) ? 2 : 3);
    cfg.domain = parse_domain(domain);
    cfg.budget = budget;
    return cfg;
  }
};

AxiomId axiom_with_tau(const std::string& text, const std::string& tau) {
  if (text == "tau-opd") {
    if (tau.empty()) throw InputError("tau-opd needs --tau or the form tau-opd:<tau>");
    return parse_axiom("tau-opd:" + tau);
  }
  if (!tau.empty()) throw InputError("--tau only applies to tau-opd");
  return parse_axiom(text);
}

/// Everything a command produces: human text and the JSON report body.
struct Outcome {
  int code = Ok;
  json report = json::object();
};

using Handler = std::function<Outcome(std::ostream&)>;

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Revenue sharing rules and axiom audits for museum pass problems", "mpass-audit"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "print a machine-readable report")->configurable(false);

  InputFlags input;
  SweepFlags sweep;
  std::string rule_text;
  std::string axiom_text;
  std::string tau_text;
  std::string beta_text;
  std::string base_text = "sh";
  std::string domain_text = "reduced";
  std::string price_text = "1";
  std::size_t m = 3;
  std::size_t n = 2;
  std::optional<std::size_t> frame_m;
  std::string input_bytes;
  Handler handler;

  auto load = [&]() {
    input_bytes = io::read_input(input.path);
    return io::ingest_text(input_bytes, input.options());
  };

  // allocate
  auto* allocate = app.add_subcommand("allocate", "allocate one problem's revenue with a rule");
  input.attach(allocate, true);
  allocate->add_option("--rule,-r,rule", rule_text, "rule selection string")->required();
  allocate->callback([&] {
    handler = [&](std::ostream& os) {
      const Problem p = load();
      const Rule rule(parse_rule(rule_text));
      const Allocation a = rule(p);
      os << "rule " << rule.name() << ", m=" << p.museum_count() << ", n=" << p.holder_count() << ", price "
         << p.price() << '\n';
      os << "allocation: " << exact_list(a) << '\n';
      os << "approximate: " << decimal_list(a) << '\n';
      return Outcome{Ok, {{"rule", rule.name()}, {"problem", io::problem_to_json(p)},
                          {"allocation", io::allocation_to_json(p, a)}}};
    };
  });

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "exhaustively check an axiom for a rule");
  audit_cmd->add_option("--rule,-r,rule", rule_text, "rule selection string")->required();
  audit_cmd->add_option("--axiom,-a,axiom", axiom_text, "axiom name")->required();
  audit_cmd->add_option("--tau", tau_text, "tau for tau-opd");
  sweep.attach(audit_cmd);
  audit_cmd->callback([&] {
    handler = [&](std::ostream& os) {
      const Rule rule(parse_rule(rule_text));
      const AxiomId axiom = axiom_with_tau(axiom_text, tau_text);
      const EnumerationConfig cfg = sweep.config(axiom);
      const AxiomVerdict v = audit(rule, axiom, cfg);
      os << "domain " << to_string(cfg.domain) << ", m <= " << cfg.m_max << ", n <= " << cfg.n_max << '\n';
      print_verdict(os, v);
      return Outcome{v.pass ? Ok : AxiomFail, io::verdict_to_json(v, cfg)};
    };
  });

  // compare
  auto* compare = app.add_subcommand("compare", "every parameter-free rule on one problem");
  input.attach(compare, true);
  compare->callback([&] {
    handler = [&](std::ostream& os) {
      const Problem p = load();
      const auto cls = classify(p);
      os << "m=" << p.museum_count() << ", n=" << p.holder_count() << ", price " << p.price() << ", "
         << (cls.tag == DomainTag::Reduced ? "reduced" : "enlarged") << " domain\n";
      json rows = json::array();
      for (const char* name : {"uniform", "proportional", "shapley", "ea", "cea", "pa", "r1", "r2", "r5"}) {
        const Rule rule(parse_rule(name));
        json row = {{"rule", rule.name()}};
        try {
          const Allocation a = rule(p);
          os << "  " << rule.name() << ": " << exact_list(a) << '\n';
          row["allocation"] = io::allocation_to_json(p, a);
        } catch (const DomainError& e) {
          os << "  " << rule.name() << ": undefined (" << e.what() << ")\n";
          row["error"] = e.what();
        }
        rows.push_back(std::move(row));
      }
      return Outcome{Ok, {{"problem", io::problem_to_json(p)}, {"rules", std::move(rows)}}};
    };
  });

  // certify
  auto* certify = app.add_subcommand("certify", "certificate that tau-opd and ivd conflict on the enlarged domain");
  certify->add_option("--tau,tau", tau_text, "tau in [0,1]")->required();
  certify->callback([&] {
    handler = [&](std::ostream& os) {
      const auto cert = impossibility_certificate(Rational::parse(tau_text));
      if (!cert) {
        os << "tau = 1: no certificate (the uniform rule satisfies opd and ivd)\n";
        return Outcome{Ok, {{"tau", "1"}, {"certificate", nullptr}}};
      }
      os << "tau = " << cert->tau << '\n';
      const char* names[] = {"x", "y", "z"};
      for (std::size_t k = 0; k < cert->problems.size(); ++k) {
        os << "problem " << (k + 1) << " (allocation " << names[k] << "1, " << names[k] << "2):\n";
        print_problem(os, cert->problems[k]);
      }
      os << "equalities:\n";
      for (const auto& e : cert->equalities) os << "  " << e << '\n';
      os << "inequalities:\n";
      for (const auto& e : cert->inequalities) os << "  " << e << '\n';
      os << "gap: " << cert->gap << '\n';
      return Outcome{Ok, io::certificate_to_json(*cert)};
    };
  });

  // bound
  auto* bound = app.add_subcommand("bound", "largest beta for the scalar convex rule under tau-opd");
  bound->add_option("--tau,tau", tau_text, "tau in [0,1]")->required();
  bound->add_option("--n,n", n, "holder count")->required();
  bound->add_option("--m", frame_m, "museum count for the frame bound and witness search");
  bound->add_option("--beta", beta_text, "look for a tau-opd violation at this beta");
  bound->callback([&] {
    handler = [&](std::ostream& os) {
      const Rational tau = Rational::parse(tau_text);
      const Rational b = tau_beta_bound(tau, n);
      os << b << '\n';
      json report = {{"tau", tau.to_string()}, {"n", n}, {"bound", b.to_string()}};
      int code = Ok;
      if (frame_m) {
        const Rational fb = frame_beta_bound(tau, n, *frame_m);
        os << "frame bound (m = " << *frame_m << "): " << fb << '\n';
        report["m"] = *frame_m;
        report["frame_bound"] = fb.to_string();
      }
      if (!beta_text.empty()) {
        const Rational beta = Rational::parse(beta_text);
        const auto w = bound_witness(tau, n, frame_m.value_or(2), beta);
        report["beta"] = beta.to_string();
        if (w) {
          os << "violation at beta = " << beta << ":\n";
          print_verdict(os, w->verdict);
          report["witness"] = io::verdict_to_json(w->verdict);
          code = AxiomFail;
        } else {
          os << "no violation at beta = " << beta << '\n';
          report["witness"] = nullptr;
        }
      }
      return Outcome{code, std::move(report)};
    };
  });

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "single-holder tables forced by a set of axioms");
  synth->add_option("--axiom,-a,axioms", axiom_text, "comma separated axioms, e.g. ete,dummy")->required();
  synth->add_option("--m", m, "museum count");
  synth->add_option("--price", price_text, "pass price");
  synth->add_option("--domain", domain_text, "reduced or enlarged")->check(CLI::IsMember({"reduced", "enlarged"}));
  synth->callback([&] {
    handler = [&](std::ostream& os) {
      std::vector<AxiomId> axioms;
      for (const auto& a : split_list(axiom_text)) axioms.push_back(parse_axiom(a));
      const Frame frame = Frame::of(m, Rational::parse(price_text));
      const Domain domain = parse_domain(domain_text);
      const SynthesisResult r = synthesize(axioms, frame, domain);
      if (const auto* inf = std::get_if<Infeasible>(&r)) {
        const Pattern& first = inf->patterns.front();
        const bool empty = std::count(first.begin(), first.end(), 1) == 0;
        if (empty) {
          os << "INFEASIBLE: pattern E=0\n";
        } else {
          std::vector<std::string> pats;
          for (const auto& p : inf->patterns) pats.push_back(pattern_to_string(frame, p));
          os << "INFEASIBLE: patterns " << join(pats) << '\n';
        }
        os << inf->reason << '\n';
      } else if (const auto* u = std::get_if<UniqueTable>(&r)) {
        os << "UNIQUE\n";
        for (const auto& [pattern, alloc] : u->table.entries) {
          os << "  visited " << pattern_to_string(frame, pattern) << ": " << exact_list(alloc) << '\n';
        }
      } else {
        const auto& f = std::get<Family>(r);
        os << "FAMILY (" << f.tie_classes << " free parameters)\n";
        for (const auto& c : f.constraints) {
          os << "  visited " << pattern_to_string(frame, c.pattern) << ": " << c.lower << " <= x <= " << c.upper
             << " (class " << c.tie_class << ")\n";
        }
      }
      json report = io::synthesis_to_json(frame, r);
      report["museums"] = frame.museums;
      report["price"] = frame.price.to_string();
      report["domain"] = to_string(domain);
      return Outcome{Ok, std::move(report)};
    };
  });

  // decompose
  auto* decomp = app.add_subcommand("decompose", "write a rule's single-holder table as beta coefficients");
  decomp->add_option("--rule,-r,rule", rule_text, "rule selection string")->required();
  decomp->add_option("--base", base_text, "sh or ea");
  decomp->add_option("--m", m, "museum count");
  decomp->add_option("--price", price_text, "pass price");
  decomp->add_option("--domain", domain_text, "reduced or enlarged")->check(CLI::IsMember({"reduced", "enlarged"}));
  decomp->callback([&] {
    handler = [&](std::ostream& os) {
      const Rule rule(parse_rule(rule_text));
      const Frame frame = Frame::of(m, Rational::parse(price_text));
      const auto table = table_of(rule, frame, parse_domain(domain_text));
      const auto d = decompose(table, parse_base(base_text));
      os << "rule " << rule.name() << " against base " << to_string(d.base) << '\n';
      for (const auto& c : d.coefficients) {
        os << "  visited " << pattern_to_string(frame, c.pattern) << ": beta " << c.beta << ", alpha " << c.alpha
           << (c.in_unit_interval ? "" : "  (x > y: outside [0,1])") << '\n';
      }
      json report = io::decomposition_to_json(frame, d);
      report["rule"] = rule.name();
      return Outcome{d.all_in_unit_interval() ? Ok : AxiomFail, std::move(report)};
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : BadInput;
  }

  std::vector<std::string> echo(argv, argv + argc);
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream text;
  Outcome result;
  try {
    result = handler(text);
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return DomainFail;
  } catch (const DecompositionError& e) {
    err << "decomposition failed: " << e.what() << '\n';
    return AxiomFail;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return BadInput;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return BadInput;
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

  if (as_json) {
    json report = std::move(result.report);
    report["command"] = echo;
    if (!input_bytes.empty() || !input.path.empty()) report["input_digest"] = io::digest(input_bytes);
    report["elapsed_ms"] = elapsed.count();
    out << report.dump(2) << '\n';
  } else {
    out << text.str();
  }
  return result.code;
}

}  // namespace mpass::cli
