#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace graphpipe {

enum class Errc {
  // graph construction / comparison
  SelfLoop,
  NegativeWeight,
  MixedWeighting,
  NodeSetMismatch,
  DirectednessMismatch,
  // text representations
  EmptyEdgeSet,
  MissingPredicate,
  NoEdgesFound,
  MalformedItem,
  // llm client
  InvalidRequest,
  BackendError,
  ScriptExhausted,
  // sensory pipeline
  ChunkExhausted,
  // buffer
  FeatureRowMismatch,
  UnknownFormat,
  // solvers
  UnknownNode,
  UnknownCatalogKey,
  ParamSchemaViolation,
  // execution
  ArgExtraction,
  // benchmark generation / io
  SourceTooSmall,
  InfeasibleQuery,
  GraphTooSmall,
  IoError,
  SchemaViolation,
  BadConfig,
};

std::string_view errc_name(Errc c);

/// Error with a machine-checkable code. `index` carries a byte offset,
/// line number or chunk index where that is meaningful.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

  Error(Errc code, const std::string& message, std::size_t index = kNoIndex)
      : std::runtime_error(message), code_(code), index_(index) {}

  Errc code() const { return code_; }
  std::size_t index() const { return index_; }

 private:
  Errc code_;
  std::size_t index_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message,
                              std::size_t index = Error::kNoIndex) {
  throw Error(code, message, index);
}

struct TokenUsage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;

  std::int64_t total() const { return input_tokens + output_tokens; }
  TokenUsage& operator+=(const TokenUsage& other) {
    input_tokens += other.input_tokens;
    output_tokens += other.output_tokens;
    return *this;
  }
};

inline bool operator==(const TokenUsage& a, const TokenUsage& b) {
  return a.input_tokens == b.input_tokens && a.output_tokens == b.output_tokens;
}

// Deterministic RNG. All sampling in the project goes through this wrapper
// instead of <random> distributions, whose output is implementation-defined;
// identical seeds must give identical artifacts on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) fail(Errc::BadConfig, "Rng::below(0)");
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double unit() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool chance(double p) { return unit() < p; }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    if (items.empty()) fail(Errc::BadConfig, "Rng::pick on empty vector");
    return items[below(items.size())];
  }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

/// Stable seed derivation for parallel work split per cell.
std::uint64_t mix_seeds(std::initializer_list<std::uint64_t> parts);
std::uint64_t hash_str(std::string_view s);

/// Shortest decimal form that round-trips; integral values print without
/// a fractional part.
std::string format_number(double value);
std::optional<double> parse_number(std::string_view text);

inline std::string yes_no(bool value) { return value ? "Yes" : "No"; }

/// Exact-match comparison used for accuracy scoring: numeric strings compare
/// as values ("2" matches "2.0"), everything else byte-for-byte.
bool answers_equal(std::string_view a, std::string_view b);

/// Runs fn(0..n-1) on up to `concurrency` worker threads. Rethrows the first
/// exception after all workers drain.
void parallel_for(std::size_t n, std::size_t concurrency,
                  const std::function<void(std::size_t)>& fn);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace graphpipe
