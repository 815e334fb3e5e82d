#include "dbmatch/markov.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dbmatch {

namespace {

constexpr int kMaxAlphabet = 256;  // symbols are stored in a byte; 0 is reserved

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

double gamma_lower_bound(std::span<const double> u) {
  double bound = -std::numeric_limits<double>::infinity();
  for (const double v : u) bound = std::max(bound, -v / (1.0 - v));
  return bound;
}

MarkovParams validate_params(double gamma, std::vector<double> u) {
  if (u.size() < 2) throw InvalidDistribution("u must have at least 2 entries");
  if (u.size() > kMaxAlphabet)
    throw InvalidDistribution("alphabet larger than 256 symbols is not supported");
  double sum = 0.0;
  for (const double v : u) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidDistribution("u entries must be strictly positive and finite");
    sum += v;
  }
  for (double& v : u) v /= sum;
  // Renormalization leaves a last-ulp residue; fold it into the largest entry
  // so downstream exact-sum assumptions hold.
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] > u[argmax]) argmax = i;
  double resid = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (i != argmax) resid -= u[i];
  u[argmax] = resid;

  const double lower = gamma_lower_bound(u);
  if (!(gamma > lower) || !(gamma < 1.0) || !std::isfinite(gamma)) {
    std::ostringstream msg;
    msg << "gamma must lie in (" << lower << ", 1), got " << gamma;
    throw GammaOutOfRange(msg.str());
  }
  MarkovParams p;
  p.alphabet_size = static_cast<int>(u.size());
  p.gamma = gamma;
  p.u = std::move(u);
  return p;
}

TransitionMatrix transition_power(const MarkovParams& params, int power) {
  if (power < 1) throw Error("transition_power requires power >= 1");
  const int k = params.alphabet_size;
  const double a = std::pow(params.gamma, power);
  const double b = 1.0 - a;
  TransitionMatrix t;
  t.order = power;
  t.size = k;
  t.entries.resize(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      t.entries[static_cast<std::size_t>(i) * k + j] = (i == j ? a : 0.0) + b * params.u[j];
  return t;
}

double shannon_entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (const double v : p) h -= xlog2x(v);
  return h;
}

double conditional_entropy_rate(const MarkovParams& params, int gap) {
  if (gap < 0) throw Error("conditional_entropy_rate requires gap >= 0");
  const TransitionMatrix t = transition_power(params, gap + 1);
  const int k = params.alphabet_size;
  double h = 0.0;
  for (int i = 0; i < k; ++i) {
    double row_h = 0.0;
    for (int j = 0; j < k; ++j) row_h -= xlog2x(t(i, j));
    h += params.u[i] * row_h;
  }
  return h;
}

namespace {

// Independent second route for the capacity. Algebraically reducing
//   H(X_0 | X_{-r-1}) with rows gamma^{r+1} I + (1 - gamma^{r+1}) U
// gives, with a = gamma^{r+1}, b = 1 - a, squares = sum_i u_i^2:
//   H_r = b [H(u) + sum_i u_i^2 log u_i] - b log b (1 - squares)
//         - sum_i u_i (a + b u_i) log(a + b u_i),
// and sum_r (1-d)^2 d^r b_r of the first bracket collapses to the prefactor
// (1-d)(1-gamma)/(1-gamma d). Only scalar per-term algebra remains below; no
// matrix rows, no entropy helper, so the route is independent of the series
// evaluation above it.
double capacity_closed_form(const MarkovParams& params, double delta) {
  if (delta >= 1.0) return 0.0;
  const int k = params.alphabet_size;
  const double g = params.gamma;
  double h_u = 0.0, sq_log = 0.0, squares = 0.0;
  for (int i = 0; i < k; ++i) {
    const double u = params.u[i];
    h_u -= u * std::log2(u);
    sq_log += u * u * std::log2(u);
    squares += u * u;
  }
  const double head = (1.0 - delta) * (1.0 - g) / (1.0 - g * delta) * (h_u + sq_log);

  const double log_alpha = std::log2(static_cast<double>(k));
  // |g_r| <= 2|H(u)+sq_log| + |b log b| + ... <= 3 log2(k) comfortably; the
  // same geometric envelope as the series route then certifies the cut-off.
  const double term_bound = 3.0 * std::max(log_alpha, 1.0);
  const double tail_tol = 1e-13;

  double sum = 0.0;
  double dpow = 1.0;  // delta^r
  for (long r = 0;; ++r) {
    const double a = std::pow(g, static_cast<double>(r + 1));
    const double b = 1.0 - a;
    double g_r = (b > 0.0 ? b * std::log2(b) : 0.0) * (1.0 - squares);
    for (int i = 0; i < k; ++i) {
      const double u = params.u[i];
      const double p = a + b * u;
      if (p > 0.0) g_r += u * p * std::log2(p);
    }
    sum += dpow * g_r;
    const double tail = (1.0 - delta) * dpow * delta * term_bound;
    if (tail <= tail_tol || delta == 0.0) break;
    dpow *= delta;
  }
  return head - (1.0 - delta) * (1.0 - delta) * sum;
}

}  // namespace

CapacityResult matching_capacity(const MarkovParams& params, double delta, double tolerance) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidDelta("delta must lie in [0, 1]");
  if (!(tolerance > 0.0)) throw Error("tolerance must be positive");

  CapacityResult out;
  if (delta == 1.0) {
    // Every column is deleted; nothing survives the channel.
    return out;
  }
  if (delta == 0.0) {
    out.capacity_bits = conditional_entropy_rate(params, 0);
    out.terms_used = 1;
    out.tail_bound_bits = 0.0;
    out.closed_form_bits = capacity_closed_form(params, 0.0);
    return out;
  }

  const double log_alpha = std::log2(static_cast<double>(params.alphabet_size));
  double acc = 0.0;
  double dpow = 1.0;  // delta^r
  int terms = 0;
  double tail = (1.0 - delta) * log_alpha;  // bound before any term is summed
  for (int r = 0;; ++r) {
    acc += dpow * conditional_entropy_rate(params, r);
    ++terms;
    dpow *= delta;
    tail = (1.0 - delta) * dpow * log_alpha;  // (1-d) d^{r+1} log2|X|
    if (tail <= tolerance) break;
  }
  out.capacity_bits = (1.0 - delta) * (1.0 - delta) * acc;
  out.terms_used = terms;
  out.tail_bound_bits = tail;
  out.closed_form_bits = capacity_closed_form(params, delta);
  return out;
}

double iid_capacity(std::vector<double> p_x, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw InvalidDelta("delta must lie in [0, 1]");
  const MarkovParams params = validate_params(0.0, std::move(p_x));
  return (1.0 - delta) * shannon_entropy_bits(params.u);
}

}  // namespace dbmatch
