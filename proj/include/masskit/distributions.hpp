#pragma once

// Benchmark multinomial distributions, seeded sampling, and frequency
// profiles over every sample prefix.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "masskit/rng.hpp"

namespace masskit {

class DiscreteDistribution {
 public:
  /// Validates: S >= 2, all entries > 0, sum within 1e-12 of 1.
  explicit DiscreteDistribution(std::vector<double> probs);

  size_t support() const { return probs_.size(); }
  double prob(size_t x) const { return probs_.at(x); }
  const std::vector<double>& probs() const { return probs_; }
  double p_max() const { return p_max_; }
  double p_min() const { return p_min_; }

 private:
  std::vector<double> probs_;
  double p_max_ = 0.0, p_min_ = 1.0;
};

enum class DistributionKind { kUniform, kHalfAndHalf, kZipf, kDirichletPrior };

DistributionKind distribution_kind_from_name(const std::string& name);
std::string distribution_kind_name(DistributionKind kind);

/// uniform: 1/S each. half-and-half: the larger ceil(S/2) classes carry three
/// times the weight of the rest. zipf(s): p_x proportional to x^-s, ranks from
/// 1. dirichlet-prior(a, seed): one draw from the symmetric Dirichlet(a) via
/// the gamma-ratio method; the seed is part of the distribution's identity.
DiscreteDistribution make_distribution(DistributionKind kind, size_t support,
                                       double param = 0.0, uint64_t seed = 0);

/// An i.i.d. sample with its frequency-of-frequency profile available at
/// every prefix length. Profiles built from bare counts have no sequence
/// order, so prefix queries are marked unavailable.
class SampleProfile {
 public:
  static SampleProfile draw(const DiscreteDistribution& dist, long long n,
                            uint64_t seed);
  static SampleProfile from_sequence(std::vector<uint32_t> classes);
  /// counts[i] = (class index, count); expands in ascending class order.
  static SampleProfile from_counts(
      const std::vector<std::pair<uint32_t, long long>>& counts);

  long long size() const { return n_; }
  bool has_prefixes() const { return has_prefixes_; }
  const std::vector<uint32_t>& sequence() const;

  /// Phi_k(n): distinct classes seen exactly k times in the full sample.
  long long phi(long long k) const;
  const std::map<long long, long long>& phi_table() const { return phi_final_; }

  /// Phi_k(j) over the length-j prefix. Requires prefix availability.
  long long phi_at(long long k, long long j) const;
  /// Full frequency profile of the length-j prefix.
  std::map<long long, long long> phi_table_at(long long j) const;

  long long distinct() const { return distinct_; }
  long long count_of(uint32_t klass) const;
  const std::map<uint32_t, long long>& counts() const { return counts_; }
  uint32_t max_class() const { return max_class_; }

  /// Replays the prefix profile; visit(j, freq_counts) is called for each
  /// j = 1..n with freq_counts[k] = Phi_k(j) (only nonzero entries).
  template <class Visit>
  void replay(Visit&& visit) const {
    require_prefixes();
    std::map<uint32_t, long long> counts;
    std::map<long long, long long> phi;
    for (long long j = 0; j < n_; ++j) {
      const uint32_t x = sequence_[static_cast<size_t>(j)];
      long long& c = counts[x];
      if (c > 0) {
        if (--phi[c] == 0) phi.erase(c);
      }
      ++c;
      ++phi[c];
      visit(j + 1, phi);
    }
  }

 private:
  void finalize_from_sequence();
  void require_prefixes() const;

  std::vector<uint32_t> sequence_;
  std::map<uint32_t, long long> counts_;
  std::map<long long, long long> phi_final_;
  long long n_ = 0;
  long long distinct_ = 0;
  uint32_t max_class_ = 0;
  bool has_prefixes_ = false;
};

/// Sum over classes of p_x 1(N_x = k); k = 0 gives the realized missing mass.
/// Profile class indices must lie inside the distribution's support.
double realized_mass(const DiscreteDistribution& dist, const SampleProfile& profile,
                     long long k);

/// One class token per line; tokens interned to indices in first-seen order.
SampleProfile read_token_file(const std::string& path);
/// `class,count` CSV with header; expands counts in canonical class order,
/// prefix profiles unavailable.
SampleProfile read_count_csv(const std::string& path);
void write_token_file(const SampleProfile& profile, const std::string& path);

}  // namespace masskit
