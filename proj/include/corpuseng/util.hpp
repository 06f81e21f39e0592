#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace corpuseng {

std::vector<std::string> split_whitespace(std::string_view text);

// Throws std::runtime_error naming the byte offset on malformed input.
void validate_utf8(std::string_view bytes, const std::string& where);
bool is_valid_utf8(std::string_view bytes);

std::vector<char32_t> utf8_to_codepoints(std::string_view bytes);
std::string codepoints_to_utf8(std::span<const char32_t> cps);
std::string codepoint_to_utf8(char32_t cp);

// Seeded PRNG with a fixed value mapping so identical seeds give identical
// draws on every platform. Engine: std::mt19937_64. Doubles are formed from
// the top 53 bits of one engine output; bounded ints by rejection sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double u =
        static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
    return lo + u * (hi - lo);
  }

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// FNV-1a over file contents, hex-encoded; used for run manifests.
std::string fnv1a_file_digest(const std::string& path);

}  // namespace corpuseng
