#include "mpass/enumerate.hpp"

#include <numeric>
#include <string>

#include "mpass/errors.hpp"

namespace mpass {

namespace {

constexpr std::size_t max_matrix_bits = 40;

bool row_is_zero(std::uint64_t bits, std::size_t row, std::size_t n, std::size_t m) {
  const std::size_t shift = (n - 1 - row) * m;
  const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
  return ((bits >> shift) & mask) == 0;
}

bool has_zero_row(std::uint64_t bits, std::size_t n, std::size_t m) {
  for (std::size_t a = 0; a < n; ++a) {
    if (row_is_zero(bits, a, n, m)) return true;
  }
  return false;
}

std::size_t count_one_size(std::size_t m, std::size_t n, Domain d) {
  if (d == Domain::Enlarged) return std::size_t{1} << (m * n);
  std::size_t nonzero_rows = (std::size_t{1} << m) - 1;
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) total *= nonzero_rows;
  return total;
}

}  // namespace

void EnumerationConfig::validate() const {
  if (m_max < 1 || n_max < 1) throw InputError("enumeration needs m_max >= 1 and n_max >= 1");
  if (m_max * n_max > max_matrix_bits) throw BudgetError("enumeration matrix size exceeds 40 entries");
  if (prices.empty()) throw InputError("enumeration needs at least one price");
  for (const auto& p : prices) {
    if (p.sign() <= 0) throw InputError("enumeration prices must be positive");
  }
}

Problem problem_from_bits(std::size_t m, std::size_t n, const Rational& price, std::uint64_t bits,
                          std::int64_t first_holder) {
  std::vector<Label> museums(m);
  std::iota(museums.begin(), museums.end(), Label{1});
  std::vector<Label> holders(n);
  std::iota(holders.begin(), holders.end(), Label{first_holder});
  std::vector<VisitRow> rows(n, VisitRow(m, 0));
  for (std::size_t pos = 0; pos < n * m; ++pos) {
    rows[pos / m][pos % m] = static_cast<std::uint8_t>((bits >> (n * m - 1 - pos)) & 1U);
  }
  return Problem(std::move(museums), std::move(holders), price, std::move(rows));
}

std::size_t count_problems(const EnumerationConfig& cfg) {
  cfg.validate();
  std::size_t per_price = 0;
  for (std::size_t m = 1; m <= cfg.m_max; ++m) {
    for (std::size_t n = 1; n <= cfg.n_max; ++n) per_price += count_one_size(m, n, cfg.domain);
  }
  return per_price * cfg.prices.size();
}

std::vector<Problem> enumerate_problems(const EnumerationConfig& cfg) {
  const std::size_t total = count_problems(cfg);
  if (total > cfg.budget) {
    throw BudgetError("enumeration of " + std::to_string(total) + " problems exceeds the budget of " +
                      std::to_string(cfg.budget));
  }
  std::vector<Problem> out;
  out.reserve(total);
  for (const auto& price : cfg.prices) {
    for (std::size_t m = 1; m <= cfg.m_max; ++m) {
      for (std::size_t n = 1; n <= cfg.n_max; ++n) {
        const std::uint64_t limit = std::uint64_t{1} << (m * n);
        for (std::uint64_t bits = 0; bits < limit; ++bits) {
          if (cfg.domain == Domain::Reduced && has_zero_row(bits, n, m)) continue;
          out.push_back(problem_from_bits(m, n, price, bits));
        }
      }
    }
  }
  return out;
}

std::string to_string(Domain d) { return d == Domain::Reduced ? "reduced" : "enlarged"; }

Domain parse_domain(std::string_view text) {
  if (text == "reduced") return Domain::Reduced;
  if (text == "enlarged") return Domain::Enlarged;
  throw InputError("unknown domain '" + std::string(text) + "' (expected reduced or enlarged)");
}

}  // namespace mpass
