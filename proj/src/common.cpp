#include "graphpipe/common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace graphpipe {

std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::MixedWeighting: return "MixedWeighting";
    case Errc::NodeSetMismatch: return "NodeSetMismatch";
    case Errc::DirectednessMismatch: return "DirectednessMismatch";
    case Errc::EmptyEdgeSet: return "EmptyEdgeSet";
    case Errc::MissingPredicate: return "MissingPredicate";
    case Errc::NoEdgesFound: return "NoEdgesFound";
    case Errc::MalformedItem: return "MalformedItem";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::BackendError: return "BackendError";
    case Errc::ScriptExhausted: return "ScriptExhausted";
    case Errc::ChunkExhausted: return "ChunkExhausted";
    case Errc::FeatureRowMismatch: return "FeatureRowMismatch";
    case Errc::UnknownFormat: return "UnknownFormat";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::UnknownCatalogKey: return "UnknownCatalogKey";
    case Errc::ParamSchemaViolation: return "ParamSchemaViolation";
    case Errc::ArgExtraction: return "ArgExtraction";
    case Errc::SourceTooSmall: return "SourceTooSmall";
    case Errc::InfeasibleQuery: return "InfeasibleQuery";
    case Errc::GraphTooSmall: return "GraphTooSmall";
    case Errc::IoError: return "IoError";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

std::uint64_t mix_seeds(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t acc = 0x243f6a8885a308d3ULL;
  for (std::uint64_t p : parts) {
    acc ^= p + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2);
    Rng r(acc);
    acc = r.next_u64();
  }
  return acc;
}

std::uint64_t hash_str(std::string_view s) {
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double value) {
  if (std::isfinite(value) && value == std::floor(value) &&
      std::fabs(value) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(value));
    return buf;
  }
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::optional<double> parse_number(std::string_view text) {
  std::string s(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return std::nullopt;
  return v;
}

bool answers_equal(std::string_view a, std::string_view b) {
  if (a == b) return true;
  auto na = parse_number(a);
  auto nb = parse_number(b);
  if (na && nb) {
    double x = *na, y = *nb;
    double scale = std::max({1.0, std::fabs(x), std::fabs(y)});
    return std::fabs(x - y) <= 1e-9 * scale;
  }
  return false;
}

void parallel_for(std::size_t n, std::size_t concurrency,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = std::min(concurrency == 0 ? 1 : concurrency, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(Errc::IoError, "short write: " + path);
}

}  // namespace graphpipe
