#include "masskit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "masskit/numerics.hpp"

namespace masskit {

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() < 2)
    throw std::domain_error("DiscreteDistribution: support must be >= 2");
  CompensatedSum total;
  for (double p : probs_) {
    if (!(p > 0.0) || p > 1.0)
      throw std::domain_error("DiscreteDistribution: entries must be in (0,1]");
    total.add(p);
    p_max_ = std::max(p_max_, p);
    p_min_ = std::min(p_min_, p);
  }
  if (std::fabs(total.result() - 1.0) > 1e-12)
    throw std::domain_error("DiscreteDistribution: probabilities must sum to 1");
}

DistributionKind distribution_kind_from_name(const std::string& name) {
  if (name == "uniform") return DistributionKind::kUniform;
  if (name == "half-and-half" || name == "half&half" || name == "halfhalf")
    return DistributionKind::kHalfAndHalf;
  if (name == "zipf") return DistributionKind::kZipf;
  if (name == "dirichlet-prior" || name == "dirichlet")
    return DistributionKind::kDirichletPrior;
  throw std::domain_error("unknown distribution kind: " + name);
}

std::string distribution_kind_name(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kUniform: return "uniform";
    case DistributionKind::kHalfAndHalf: return "half-and-half";
    case DistributionKind::kZipf: return "zipf";
    case DistributionKind::kDirichletPrior: return "dirichlet-prior";
  }
  return "?";
}

DiscreteDistribution make_distribution(DistributionKind kind, size_t support,
                                       double param, uint64_t seed) {
  if (support < 2) throw std::domain_error("make_distribution: support must be >= 2");
  std::vector<double> p(support);
  switch (kind) {
    case DistributionKind::kUniform: {
      std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(support));
      break;
    }
    case DistributionKind::kHalfAndHalf: {
      // Larger half (ceil S/2) carries the 3x weight.
      const size_t heavy = (support + 1) / 2;
      const double unit = 1.0 / static_cast<double>(2 * heavy + support);
      for (size_t x = 0; x < support; ++x) p[x] = (x < heavy ? 3.0 : 1.0) * unit;
      break;
    }
    case DistributionKind::kZipf: {
      if (!(param > 0.0)) throw std::domain_error("zipf: s must be > 0");
      CompensatedSum norm;
      for (size_t x = 0; x < support; ++x) {
        p[x] = std::pow(static_cast<double>(x + 1), -param);
        norm.add(p[x]);
      }
      const double z = norm.result();
      for (double& v : p) v /= z;
      break;
    }
    case DistributionKind::kDirichletPrior: {
      if (!(param > 0.0)) throw std::domain_error("dirichlet-prior: a must be > 0");
      SplitMix64 rng(mix_seed(seed, kStreamDistribution));
      CompensatedSum norm;
      for (size_t x = 0; x < support; ++x) {
        double g = rng.next_gamma(param);
        while (!(g > 0.0)) g = rng.next_gamma(param);  // guard tiny-shape underflow
        p[x] = g;
        norm.add(g);
      }
      const double z = norm.result();
      for (double& v : p) v /= z;
      break;
    }
  }
  // Kill residual rounding in the normalization so the sum-to-1 invariant
  // holds exactly enough for downstream checks.
  CompensatedSum total;
  for (double v : p) total.add(v);
  const double t = total.result();
  for (double& v : p) v /= t;
  return DiscreteDistribution(std::move(p));
}

SampleProfile SampleProfile::draw(const DiscreteDistribution& dist, long long n,
                                  uint64_t seed) {
  if (n < 1) throw std::domain_error("draw_sample: n must be >= 1");
  std::vector<double> cdf(dist.support());
  CompensatedSum acc;
  for (size_t x = 0; x < dist.support(); ++x) {
    acc.add(dist.prob(x));
    cdf[x] = acc.result();
  }
  cdf.back() = 1.0;

  SplitMix64 rng(mix_seed(seed, kStreamSample));
  SampleProfile prof;
  prof.sequence_.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const double u = rng.next_double();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const size_t x = std::min(static_cast<size_t>(it - cdf.begin()),
                              dist.support() - 1);
    prof.sequence_.push_back(static_cast<uint32_t>(x));
  }
  prof.finalize_from_sequence();
  return prof;
}

SampleProfile SampleProfile::from_sequence(std::vector<uint32_t> classes) {
  if (classes.empty()) throw std::domain_error("SampleProfile: empty sequence");
  SampleProfile prof;
  prof.sequence_ = std::move(classes);
  prof.finalize_from_sequence();
  return prof;
}

SampleProfile SampleProfile::from_counts(
    const std::vector<std::pair<uint32_t, long long>>& counts) {
  SampleProfile prof;
  std::map<uint32_t, long long> merged;
  for (const auto& [klass, count] : counts) {
    if (count < 0) throw std::domain_error("SampleProfile: negative count");
    if (count > 0) merged[klass] += count;
  }
  if (merged.empty()) throw std::domain_error("SampleProfile: empty counts");
  for (const auto& [klass, count] : merged) {
    prof.counts_[klass] = count;
    prof.n_ += count;
    prof.phi_final_[count] += 1;
    prof.max_class_ = std::max(prof.max_class_, klass);
  }
  prof.distinct_ = static_cast<long long>(merged.size());
  prof.has_prefixes_ = false;
  return prof;
}

void SampleProfile::finalize_from_sequence() {
  n_ = static_cast<long long>(sequence_.size());
  for (uint32_t x : sequence_) {
    ++counts_[x];
    max_class_ = std::max(max_class_, x);
  }
  for (const auto& [klass, count] : counts_) {
    (void)klass;
    ++phi_final_[count];
  }
  distinct_ = static_cast<long long>(counts_.size());
  has_prefixes_ = true;
}

void SampleProfile::require_prefixes() const {
  if (!has_prefixes_)
    throw std::domain_error("SampleProfile: prefix profiles unavailable for count-ingested data");
}

const std::vector<uint32_t>& SampleProfile::sequence() const {
  require_prefixes();
  return sequence_;
}

long long SampleProfile::phi(long long k) const {
  const auto it = phi_final_.find(k);
  return it == phi_final_.end() ? 0 : it->second;
}

long long SampleProfile::phi_at(long long k, long long j) const {
  if (j == n_) return phi(k);
  require_prefixes();
  if (j < 1 || j > n_) throw std::domain_error("phi_at: prefix length out of range");
  std::unordered_map<uint32_t, long long> counts;
  long long hits = 0;
  for (long long t = 0; t < j; ++t) {
    long long& c = counts[sequence_[static_cast<size_t>(t)]];
    if (c == k) --hits;
    ++c;
    if (c == k) ++hits;
  }
  return hits;
}

std::map<long long, long long> SampleProfile::phi_table_at(long long j) const {
  if (j == n_) return phi_final_;
  require_prefixes();
  if (j < 1 || j > n_) throw std::domain_error("phi_table_at: prefix length out of range");
  std::unordered_map<uint32_t, long long> counts;
  for (long long t = 0; t < j; ++t) ++counts[sequence_[static_cast<size_t>(t)]];
  std::map<long long, long long> phi;
  for (const auto& [klass, c] : counts) {
    (void)klass;
    ++phi[c];
  }
  return phi;
}

long long SampleProfile::count_of(uint32_t klass) const {
  const auto it = counts_.find(klass);
  return it == counts_.end() ? 0 : it->second;
}

double realized_mass(const DiscreteDistribution& dist, const SampleProfile& profile,
                     long long k) {
  if (k < 0 || k > profile.size()) throw std::domain_error("realized_mass: bad k");
  if (static_cast<size_t>(profile.max_class()) >= dist.support())
    throw std::domain_error("realized_mass: profile class outside support");
  CompensatedSum acc;
  if (k == 0) {
    for (const auto& [klass, count] : profile.counts()) {
      (void)count;
      acc.add(dist.prob(klass));
    }
    return 1.0 - acc.result();
  }
  for (const auto& [klass, count] : profile.counts())
    if (count == k) acc.add(dist.prob(klass));
  return acc.result();
}

SampleProfile read_token_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  std::unordered_map<std::string, uint32_t> intern;
  std::vector<uint32_t> seq;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    const auto [it, inserted] =
        intern.emplace(line, static_cast<uint32_t>(intern.size()));
    (void)inserted;
    seq.push_back(it->second);
  }
  if (seq.empty()) throw std::runtime_error("sample file has no tokens: " + path);
  return SampleProfile::from_sequence(std::move(seq));
}

SampleProfile read_count_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open count file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty count file: " + path);
  std::unordered_map<std::string, uint32_t> intern;
  std::vector<std::pair<uint32_t, long long>> counts;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed count row: " + line);
    const std::string token = line.substr(0, comma);
    const long long count = std::stoll(line.substr(comma + 1));
    const auto [it, inserted] =
        intern.emplace(token, static_cast<uint32_t>(intern.size()));
    (void)inserted;
    counts.emplace_back(it->second, count);
  }
  return SampleProfile::from_counts(counts);
}

void write_token_file(const SampleProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sample file: " + path);
  for (uint32_t x : profile.sequence()) out << x + 1 << '\n';
}

}  // namespace masskit
