#include "grnet/error.hpp"
#include "grnet/rng.hpp"

namespace grnet {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidShape: return "invalid shape";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kInvalidState: return "invalid state";
    case ErrorCode::kTrainingDivergence: return "training divergence";
    case ErrorCode::kInvalidDomain: return "invalid domain";
    case ErrorCode::kInapplicableAction: return "inapplicable action";
    case ErrorCode::kUnsatisfiableGoal: return "unsatisfiable goal";
    case ErrorCode::kGenerationFailure: return "generation failure";
    case ErrorCode::kInvalidInstance: return "invalid instance";
    case ErrorCode::kDegenerateNormalization: return "degenerate normalization";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kOutOfVocabulary: return "out of vocabulary";
    case ErrorCode::kIncompatible: return "incompatible";
    case ErrorCode::kInvalidConfig: return "invalid config";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown error";
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidConfig, "Rng::below(0)");
  // Lemire-style rejection keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::size_t Rng::weighted(const std::vector<long double>& weights) {
  long double total = 0;
  for (auto w : weights) total += w;
  if (!(total > 0)) throw Error(ErrorCode::kInvalidConfig, "weighted draw with zero total weight");
  long double r = static_cast<long double>(uniform()) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  // Rounding can leave r just past the last bucket.
  for (std::size_t i = weights.size(); i > 0; --i)
    if (weights[i - 1] > 0) return i - 1;
  return 0;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace grnet
