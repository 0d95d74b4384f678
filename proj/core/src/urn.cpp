#include "polya/urn.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace polya {

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

ReplacementMatrix ReplacementMatrix::zero(std::size_t vocab) {
  return ReplacementMatrix(MatrixKind::zero, vocab);
}

ReplacementMatrix ReplacementMatrix::identity(std::size_t vocab) {
  return ReplacementMatrix(MatrixKind::identity, vocab);
}

ReplacementMatrix ReplacementMatrix::diagonal(std::vector<double> entries) {
  ReplacementMatrix m(MatrixKind::diagonal, entries.size());
  for (double e : entries) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("diagonal replacement entries must be > 0");
    }
  }
  m.data_ = std::move(entries);
  return m;
}

ReplacementMatrix ReplacementMatrix::full(std::size_t vocab,
                                          std::vector<double> rows) {
  if (rows.size() != vocab * vocab) {
    throw std::invalid_argument("full replacement matrix must be v*v");
  }
  ReplacementMatrix m(MatrixKind::full, vocab);
  m.row_sums_.resize(vocab);
  for (std::size_t k = 0; k < vocab; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < vocab; ++j) {
      const double e = rows[k * vocab + j];
      sum += e;
      if (e < 0.0) m.has_negative_ = true;
    }
    if (!(sum > 0.0)) {
      throw std::invalid_argument("full replacement rows must sum to > 0");
    }
    m.row_sums_[k] = sum;
  }
  m.data_ = std::move(rows);
  return m;
}

double ReplacementMatrix::row_sum(term_id t) const {
  switch (kind_) {
    case MatrixKind::zero:
      return 0.0;
    case MatrixKind::identity:
      return 1.0;
    case MatrixKind::diagonal:
      return data_[t];
    case MatrixKind::full:
      return row_sums_[t];
  }
  return 0.0;
}

double ReplacementMatrix::diag_entry(term_id t) const {
  switch (kind_) {
    case MatrixKind::zero:
      return 0.0;
    case MatrixKind::identity:
      return 1.0;
    case MatrixKind::diagonal:
      return data_[t];
    case MatrixKind::full:
      return data_[t * size_ + t];
  }
  return 0.0;
}

std::span<const double> ReplacementMatrix::diag() const {
  if (kind_ != MatrixKind::diagonal) {
    throw std::logic_error("diag() requires a diagonal matrix");
  }
  return data_;
}

std::span<const double> ReplacementMatrix::row(term_id t) const {
  if (kind_ != MatrixKind::full) {
    throw std::logic_error("row() requires a full matrix");
  }
  return std::span<const double>(data_).subspan(t * size_, size_);
}

UrnModel::UrnModel(std::vector<double> u0, ReplacementMatrix matrix)
    : u0_(std::move(u0)), matrix_(std::move(matrix)) {
  if (u0_.empty()) throw std::invalid_argument("u0 must be non-empty");
  if (matrix_.size() != u0_.size()) {
    throw std::invalid_argument("replacement matrix size must match u0");
  }
  double mass = 0.0;
  for (double u : u0_) {
    if (!(u > 0.0)) throw std::invalid_argument("u0 entries must be > 0");
    mass += u;
  }
  mass0_ = mass;
}

UrnState initial_state(const UrnModel& model) {
  return UrnState{std::vector<double>(model.u0().begin(), model.u0().end()),
                  model.mass0()};
}

void step(UrnState& state, term_id drawn, const ReplacementMatrix& matrix) {
  switch (matrix.kind()) {
    case MatrixKind::zero:
      return;
    case MatrixKind::identity:
      state.balls[drawn] += 1.0;
      state.mass += 1.0;
      return;
    case MatrixKind::diagonal: {
      const double m = matrix.diag()[drawn];
      state.balls[drawn] += m;
      state.mass += m;
      return;
    }
    case MatrixKind::full: {
      const auto row = matrix.row(drawn);
      for (std::size_t j = 0; j < row.size(); ++j) state.balls[j] += row[j];
      state.mass += matrix.row_sum(drawn);
      return;
    }
  }
}

namespace {

void check_tokens(std::span<const term_id> tokens, std::size_t vocab) {
  for (term_id t : tokens) {
    if (t >= vocab) {
      throw std::out_of_range("token id " + std::to_string(t) +
                              " out of range for vocabulary of " +
                              std::to_string(vocab));
    }
  }
}

double log_likelihood_full(const UrnModel& model,
                           std::span<const term_id> tokens) {
  UrnState state = initial_state(model);
  const bool check_positive = model.matrix().has_negative_entries();
  double ll = 0.0;
  for (term_id t : tokens) {
    if (!(state.balls[t] > 0.0)) {
      throw std::domain_error(
          "urn coordinate for drawn colour is non-positive");
    }
    ll += std::log(state.balls[t] / state.mass);
    step(state, t, model.matrix());
    if (check_positive) {
      for (double b : state.balls) {
        if (!(b > 0.0)) {
          throw std::domain_error(
              "negative replacement entries drove an urn coordinate "
              "non-positive");
        }
      }
    }
  }
  return ll;
}

}  // namespace

double log_likelihood(const UrnModel& model, std::span<const term_id> tokens) {
  check_tokens(tokens, model.size());
  const ReplacementMatrix& matrix = model.matrix();

  if (matrix.kind() == MatrixKind::full) {
    return log_likelihood_full(model, tokens);
  }

  // Only drawn coordinates ever change, so track just those.
  std::unordered_map<term_id, double> touched;
  touched.reserve(64);
  double mass = model.mass0();
  double ll = 0.0;
  for (term_id t : tokens) {
    auto [it, fresh] = touched.try_emplace(t, model.u0()[t]);
    ll += std::log(it->second / mass);
    const double add = matrix.row_sum(t);
    it->second += add;
    mass += add;
  }
  return ll;
}

double log_likelihood_multinomial(std::span<const double> u0,
                                  std::span<const TermCount> counts) {
  double mass = std::accumulate(u0.begin(), u0.end(), 0.0);
  const double log_mass = std::log(mass);
  double ll = 0.0;
  for (const TermCount& tc : counts) {
    if (tc.count == 0) continue;
    ll += tc.count * (std::log(u0[tc.term]) - log_mass);
  }
  return ll;
}

double log_likelihood_dcm(std::span<const double> u0,
                          std::span<const TermCount> counts, std::uint64_t n) {
  const double mass = std::accumulate(u0.begin(), u0.end(), 0.0);
  double ll = log_gamma(mass) - log_gamma(mass + static_cast<double>(n));
  for (const TermCount& tc : counts) {
    if (tc.count == 0) continue;
    ll += log_gamma(u0[tc.term] + tc.count) - log_gamma(u0[tc.term]);
  }
  return ll;
}

}  // namespace polya
