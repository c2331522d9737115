#ifndef PAN_RNG_HPP
#define PAN_RNG_HPP

#include <cstdint>
#include <cmath>

namespace pan {

// splitmix64: counter-style generator, cheap to seed per stream.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t s) : state(s) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// One independent stream per (seed, stream_id) pair; replicate index goes in
// stream_id so results do not depend on how replicates are scheduled.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : gen_(mix(seed, stream_id)) {}

  // uniform on (0, 1)
  double uniform() {
    return (static_cast<double>(gen_.next() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  // standard normal via Box-Muller; second value of each pair is cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double m = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = m * std::sin(a);
    has_spare_ = true;
    return m * std::cos(a);
  }

  std::uint64_t next_u64() { return gen_.next(); }

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t id) {
    SplitMix64 s(seed ^ (0xd1b54a32d192ed03ull * (id + 1)));
    s.next();
    return s.next();
  }

  SplitMix64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pan

#endif
