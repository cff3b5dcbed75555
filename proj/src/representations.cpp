#include "masskit/representations.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "masskit/numerics.hpp"

namespace masskit {

namespace {

constexpr double kCoeffDropTol = 1e-14;

double binom_double(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  const long long kk = std::min(k, n - k);
  double r = 1.0;
  for (long long i = 1; i <= kk; ++i)
    r *= static_cast<double>(n + 1 - i) / static_cast<double>(i);
  return r;
}

}  // namespace

LinearEstimator::LinearEstimator(long long n, std::vector<EstimatorTerm> terms)
    : n_(n), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.i < 1 || t.i > t.j || t.j > n_)
      throw std::domain_error("LinearEstimator: term indices outside sample domain");
    if (!std::isfinite(t.beta))
      throw std::domain_error("LinearEstimator: non-finite coefficient");
  }
  std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) {
    return std::tie(a.j, a.i) < std::tie(b.j, b.i);
  });
}

bool LinearEstimator::needs_prefixes() const {
  for (const auto& t : terms_)
    if (t.j < n_) return true;
  return false;
}

double LinearEstimator::evaluate(const SampleProfile& profile) const {
  if (profile.size() != n_)
    throw std::domain_error("LinearEstimator: sample size mismatch");
  CompensatedSum acc;
  if (!needs_prefixes()) {
    for (const auto& t : terms_)
      acc.add(t.beta * static_cast<double>(profile.phi(t.i)));
    return acc.result();
  }
  // One replay over the sequence; terms are sorted by j.
  size_t next = 0;
  profile.replay([&](long long j, const std::map<long long, long long>& phi) {
    while (next < terms_.size() && terms_[next].j == j) {
      const auto it = phi.find(terms_[next].i);
      if (it != phi.end()) acc.add(terms_[next].beta * static_cast<double>(it->second));
      ++next;
    }
  });
  return acc.result();
}

uint64_t LinearEstimator::content_hash() const {
  uint64_t h = 0x9E3779B97F4A7C15ULL ^ static_cast<uint64_t>(n_);
  auto mix = [&h](uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& t : terms_) {
    mix(static_cast<uint64_t>(t.i));
    mix(static_cast<uint64_t>(t.j));
    uint64_t bits;
    std::memcpy(&bits, &t.beta, sizeof bits);
    mix(bits);
  }
  return h;
}

double Representation::coeff(long long i, long long j) const {
  const auto it = coeffs_.find({i, j});
  return it == coeffs_.end() ? 0.0 : it->second;
}

void Representation::add_coeff(long long i, long long j, double value) {
  if (i < 1 || i > j || j > n_ + 1)
    throw std::domain_error("Representation: coefficient index out of domain");
  auto key = std::make_pair(i, j);
  const auto it = coeffs_.find(key);
  double merged = value + (it == coeffs_.end() ? 0.0 : it->second);
  if (std::fabs(merged) < kCoeffDropTol) {
    if (it != coeffs_.end()) coeffs_.erase(it);
    return;
  }
  coeffs_[key] = merged;
}

Representation initial_representation(long long n, long long k) {
  if (k < 0 || k > n) throw std::domain_error("initial_representation: bad k");
  Representation rep(n, k);
  rep.add_coeff(k + 1, n + 1, binom_double(n, k));
  return rep;
}

Representation minimal_bias_representation(long long n, long long k) {
  if (k < 0 || k > n) throw std::domain_error("minimal_bias_representation: bad k");
  Representation rep(n, k);
  const double cnk = binom_double(n, k);
  for (long long i = 1; i <= n - k; ++i)
    rep.add_coeff(k + i, n, (i % 2 == 0 ? -1.0 : 1.0) * cnk);
  rep.add_coeff(n + 1, n + 1, ((n - k) % 2 == 0 ? 1.0 : -1.0) * cnk);
  return rep;
}

Representation apply_identity(const Representation& rep, IdentityKind identity,
                              std::pair<long long, long long> target, double delta) {
  const auto [i, j] = target;
  const double alpha = rep.coeff(i, j);
  if (alpha == 0.0)
    throw std::domain_error("apply_identity: target has zero coefficient");
  const long long n = rep.sample_size();

  Representation out(rep);
  auto move_mass = [&out, i, j](double mass, long long i1, long long j1, double s1,
                                long long i2, long long j2, double s2) {
    out.add_coeff(i, j, -mass);
    out.add_coeff(i1, j1, s1 * mass);
    out.add_coeff(i2, j2, s2 * mass);
  };
  auto reject_remainder_cell = [n](long long ti, long long tj) {
    if (ti == n + 1 && tj == n + 1)
      throw std::domain_error(
          "apply_identity: rewrite would reach g_{n+1}(n+1), which has no plug-in statistic");
  };

  switch (identity) {
    case IdentityKind::kSplit:
      if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("apply_identity: delta must be in (0,1)");
      return out;  // a split alone does not change the merged table
    case IdentityKind::kDown:
      if (j + 1 > n + 1) throw std::domain_error("apply_identity: j+1 exceeds domain");
      reject_remainder_cell(i + 1, j + 1);
      reject_remainder_cell(i, j + 1);
      move_mass(alpha, i, j + 1, 1.0, i + 1, j + 1, 1.0);
      return out;
    case IdentityKind::kUpMinus:
      if (j - 1 < i) throw std::domain_error("apply_identity: j-1 < i");
      reject_remainder_cell(i + 1, j);
      move_mass(alpha, i, j - 1, 1.0, i + 1, j, -1.0);
      return out;
    case IdentityKind::kLeftUp:
      if (i < 2) throw std::domain_error("apply_identity: i must be >= 2");
      move_mass(alpha, i - 1, j - 1, 1.0, i - 1, j, -1.0);
      return out;
  }
  throw std::domain_error("apply_identity: unknown identity");
}

Representation split_and_rewrite(const Representation& rep,
                                 std::pair<long long, long long> target,
                                 double delta, IdentityKind identity) {
  if (identity == IdentityKind::kSplit)
    throw std::domain_error("split_and_rewrite: second step must be a rewrite");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::domain_error("split_and_rewrite: delta must be in (0,1)");
  const double alpha = rep.coeff(target.first, target.second);
  if (alpha == 0.0)
    throw std::domain_error("split_and_rewrite: target has zero coefficient");

  // Rewrite only the delta-half: scale the target down, rewrite a synthetic
  // table holding the half, merge.
  Representation half(rep.sample_size(), rep.target_k());
  half.add_coeff(target.first, target.second, delta * alpha);
  const Representation rewritten = apply_identity(half, identity, target);

  Representation out(rep);
  out.add_coeff(target.first, target.second, -delta * alpha);
  for (const auto& [key, value] : rewritten.coeffs())
    out.add_coeff(key.first, key.second, value);
  return out;
}

ValidationReport validate_representation(const Representation& rep) {
  const long long n = rep.sample_size();
  const long long k = rep.target_k();
  const double target_value = binom_double(n, k);

  ValidationReport report;
  report.valid = true;
  for (long long kp = 1; kp <= n + 1; ++kp) {
    // Two-product Neumaier accumulation keeps validator rounding far below
    // the tolerance even when c_{i,j} is large.
    CompensatedSum sum, err, scale;
    for (const auto& [key, alpha] : rep.coeffs()) {
      const auto [i, j] = key;
      const long long up = n + 1 - j, low = kp - i;
      if (low < 0 || low > up) continue;
      const double c = binom_double(up, low);
      const double prod = alpha * c;
      sum.add(prod);
      err.add(std::fma(alpha, c, -prod));
      scale.add(std::fabs(prod));
    }
    const double total = sum.result() + err.result();
    const double target = kp == k + 1 ? target_value : 0.0;
    const double residual = std::fabs(total - target);
    const double tol = kp == k + 1
                           ? 1e-8 * std::fabs(target_value)
                           : std::max(1e-10, 1e-8 * scale.result());
    if (residual > tol) {
      report.valid = false;
      if (residual > report.worst_residual) {
        report.worst_residual = residual;
        report.worst_kprime = kp;
        std::ostringstream msg;
        msg << "constraint violated at k'=" << kp << ": sum=" << total
            << " target=" << target << " residual=" << residual;
        report.message = msg.str();
      }
    }
  }
  return report;
}

LinearEstimator instantiate(const Representation& rep) {
  const long long n = rep.sample_size();
  std::map<std::pair<long long, long long>, double> betas;
  for (const auto& [key, alpha] : rep.coeffs()) {
    const auto [i, j] = key;
    if (i == n + 1 && j == n + 1) continue;  // the remainder cell
    if (j <= n)
      betas[{i, j}] += alpha / binom_double(j, i);
    else
      betas[{i, n}] += alpha / binom_double(n + 1, i);
  }
  std::vector<EstimatorTerm> terms;
  for (const auto& [key, beta] : betas)
    if (beta != 0.0) terms.push_back({key.first, key.second, beta});
  return LinearEstimator(n, std::move(terms));
}

Representation adapt_representation(const Representation& rep, long long m) {
  const long long n = rep.sample_size();
  if (m < n) throw std::domain_error("adapt_representation: m must be >= n");
  const long long k = rep.target_k();
  const double scale =
      k == 0 ? 1.0 : binom_double(m, k) / binom_double(n, k);
  Representation out(m, k);
  for (const auto& [key, alpha] : rep.coeffs())
    out.add_coeff(key.first, key.second + (m - n), scale * alpha);
  return out;
}

LinearEstimator adapt_to_larger_sample(const Representation& rep, long long m) {
  const long long n = rep.sample_size();
  if (m < n) throw std::domain_error("adapt_to_larger_sample: m must be >= n");
  const long long k = rep.target_k();
  const double scale =
      k == 0 ? 1.0 : binom_double(m, k) / binom_double(n, k);

  std::map<std::pair<long long, long long>, double> betas;
  for (const auto& [key, alpha] : rep.coeffs()) {
    const auto [i, j] = key;
    if (i == n + 1 && j == n + 1) continue;
    if (j <= n) {
      const long long jm = j + (m - n);
      betas[{i, jm}] += scale * alpha / binom_double(jm, i);
    } else {
      // Verbatim fold: the last column keeps its size-n denominator and
      // applies to the full-sample statistic Phi_i(m).
      betas[{i, m}] += scale * alpha / binom_double(n + 1, i);
    }
  }
  std::vector<EstimatorTerm> terms;
  for (const auto& [key, beta] : betas)
    if (beta != 0.0) terms.push_back({key.first, key.second, beta});
  return LinearEstimator(m, std::move(terms));
}

LinearEstimator good_turing_linear(long long n, long long k) {
  if (k < 0 || k + 1 > n) throw std::domain_error("good_turing_linear: needs k + 1 <= n");
  std::vector<EstimatorTerm> terms{
      {k + 1, n, static_cast<double>(k + 1) / static_cast<double>(n)}};
  return LinearEstimator(n, std::move(terms));
}

LinearEstimator minimal_bias_linear(long long n, long long k) {
  return instantiate(minimal_bias_representation(n, k));
}

Representation affine_combine(double a, const Representation& r1, double b,
                              const Representation& r2) {
  if (r1.sample_size() != r2.sample_size() || r1.target_k() != r2.target_k())
    throw std::domain_error("affine_combine: shape mismatch");
  Representation out(r1.sample_size(), r1.target_k());
  for (const auto& [key, value] : r1.coeffs())
    out.add_coeff(key.first, key.second, a * value);
  for (const auto& [key, value] : r2.coeffs())
    out.add_coeff(key.first, key.second, b * value);
  return out;
}

std::string representation_to_text(const Representation& rep) {
  std::ostringstream out;
  out << rep.sample_size() << ' ' << rep.target_k() << '\n';
  out.precision(17);
  for (const auto& [key, value] : rep.coeffs())
    out << key.first << ' ' << key.second << ' ' << value << '\n';
  return out.str();
}

Representation representation_from_text(const std::string& text) {
  std::istringstream in(text);
  long long n, k;
  if (!(in >> n >> k)) throw std::runtime_error("representation: bad header");
  Representation rep(n, k);
  long long i, j;
  double value;
  while (in >> i >> j >> value) rep.add_coeff(i, j, value);
  return rep;
}

void write_representation(const Representation& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write representation: " + path);
  out << representation_to_text(rep);
}

Representation read_representation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read representation: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return representation_from_text(buffer.str());
}

}  // namespace masskit
