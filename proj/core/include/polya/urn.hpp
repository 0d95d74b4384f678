#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polya/types.hpp"

namespace polya {

enum class MatrixKind { zero, identity, diagonal, full };

// Replacement matrix of a generalised Polya urn over v colours. Row t holds
// the balls added after a ball of colour t is drawn. Zero and Identity carry
// no data; Diagonal stores the v diagonal entries; Full stores v*v entries
// row-major.
class ReplacementMatrix {
 public:
  static ReplacementMatrix zero(std::size_t vocab);
  static ReplacementMatrix identity(std::size_t vocab);
  static ReplacementMatrix diagonal(std::vector<double> entries);  // all > 0
  static ReplacementMatrix full(std::size_t vocab,
                                std::vector<double> rows);  // row sums > 0

  MatrixKind kind() const { return kind_; }
  std::size_t size() const { return size_; }

  // Mass added to the urn when colour t is drawn.
  double row_sum(term_id t) const;
  // Balls of colour t added when colour t is drawn.
  double diag_entry(term_id t) const;

  std::span<const double> diag() const;         // diagonal only
  std::span<const double> row(term_id t) const; // full only

  bool has_negative_entries() const { return has_negative_; }

 private:
  ReplacementMatrix(MatrixKind kind, std::size_t size)
      : kind_(kind), size_(size) {}

  MatrixKind kind_;
  std::size_t size_;
  std::vector<double> data_;  // diagonal: v entries; full: v*v row-major
  std::vector<double> row_sums_;  // full only
  bool has_negative_ = false;
};

// Initial urn parameters plus dynamics. Immutable after construction.
class UrnModel {
 public:
  UrnModel(std::vector<double> u0, ReplacementMatrix matrix);

  std::span<const double> u0() const { return u0_; }
  const ReplacementMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return u0_.size(); }
  double mass0() const { return mass0_; }

 private:
  std::vector<double> u0_;
  ReplacementMatrix matrix_;
  double mass0_;
};

// Dense urn state for stepping the recurrence directly.
struct UrnState {
  std::vector<double> balls;
  double mass = 0.0;
};

UrnState initial_state(const UrnModel& model);

// u' = u + e_t . M; the running mass grows by row t's sum.
void step(UrnState& state, term_id drawn, const ReplacementMatrix& matrix);

// Natural-log probability of observing the token sequence, draw by draw:
// sum_i log(u_i[t_i] / |u_i|). Sparse updates for zero/identity/diagonal
// matrices; dense for full. Throws std::out_of_range on a bad token id and
// std::domain_error if a full matrix with negative entries drives any urn
// coordinate non-positive.
double log_likelihood(const UrnModel& model, std::span<const term_id> tokens);

// Order-free fast path for the zero matrix (multinomial).
double log_likelihood_multinomial(std::span<const double> u0,
                                  std::span<const TermCount> counts);

// Order-free closed form for the identity matrix (Dirichlet-compound
// multinomial), via log-gamma. n is the total token count.
double log_likelihood_dcm(std::span<const double> u0,
                          std::span<const TermCount> counts, std::uint64_t n);

// Thread-safe log-gamma.
double log_gamma(double x);

}  // namespace polya
