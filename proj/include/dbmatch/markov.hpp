#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dbmatch/errors.hpp"

namespace dbmatch {

// First-order Markov row model: each database row is a stationary chain on the
// alphabet {1, ..., alphabet_size} with transition matrix
//   P = gamma * I + (1 - gamma) * U,
// where every row of U equals the stationary distribution u. gamma in
// (-min_j u_j / (1 - u_j), 1) keeps P a proper stochastic matrix; the lower end
// admits anti-correlated chains.
struct MarkovParams {
  int alphabet_size = 0;
  double gamma = 0.0;
  std::vector<double> u;  // strictly positive, sums to exactly 1 after validation
};

// Largest-lower-bound for gamma given u: -min_j u_j / (1 - u_j).
double gamma_lower_bound(std::span<const double> u);

// Validates and normalizes parameters. u must have length in [2, 256] with
// strictly positive entries (it is renormalized to sum exactly 1); gamma must
// lie in the open interval above. Throws InvalidDistribution / GammaOutOfRange.
MarkovParams validate_params(double gamma, std::vector<double> u);

// Dense row-stochastic matrix holding P^order.
struct TransitionMatrix {
  int order = 0;  // the power this matrix represents
  int size = 0;
  std::vector<double> entries;  // row-major size*size

  double operator()(int i, int j) const { return entries[static_cast<std::size_t>(i) * size + j]; }
};

// P^power via the closed form P^k = gamma^k I + (1 - gamma^k) U, valid because
// U is idempotent. power >= 1.
TransitionMatrix transition_power(const MarkovParams& params, int power);

// Shannon entropy in bits; 0 * log 0 = 0. Input need not be validated.
double shannon_entropy_bits(std::span<const double> p);

// H(X_0 | X_{-gap-1}) in bits: the conditional entropy of a symbol given the
// symbol gap+1 steps earlier, i.e. the entropy rate of the chain under P^{gap+1}.
// gap >= 0.
double conditional_entropy_rate(const MarkovParams& params, int gap);

struct CapacityResult {
  double capacity_bits = 0.0;     // truncated series value
  int terms_used = 0;             // number of series terms summed
  double tail_bound_bits = 0.0;   // certified bound on the truncation error
  double closed_form_bits = 0.0;  // independent evaluation, agrees within tolerance
};

// Matching capacity of the column-repetition channel with deletion probability
// delta = p_S(0):
//   C = (1 - delta)^2 * sum_{r>=0} delta^r * H(X_0 | X_{-r-1}).
// The series is truncated at the first R* with
// (1 - delta) * delta^{R*+1} * log2(alphabet) <= tolerance, which bounds the
// discarded tail. closed_form_bits re-evaluates C through an algebraically
// reduced expression that shares no code with the series route. delta in [0, 1]
// (both ends exact special cases); tolerance > 0.
CapacityResult matching_capacity(const MarkovParams& params, double delta,
                                 double tolerance = 1e-10);

// Memoryless special case: C = (1 - delta) * H(p_x). Equals
// matching_capacity(validate_params(0, p_x), delta) up to the series tolerance.
double iid_capacity(std::vector<double> p_x, double delta);

}  // namespace dbmatch
