#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

#include <poscon/matrix.hpp>

namespace testing_support {

// Seed for randomized tests: POSCON_SEED if set, otherwise a fixed default.
inline std::uint64_t seed() {
    if (const char* s = std::getenv("POSCON_SEED"); s && *s) return std::strtoull(s, nullptr, 10);
    return 20240611ULL;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(seed());
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }
inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

// Worked systems with the entries as printed (four decimals).
inline poscon::Matrix primitive_polyhedral_closure_a() {
    return {{0.9727, 0, 0.0263}, {0.0388, 0.1273, 0.2156}, {0, 3.4497, 0}};
}
inline poscon::Vector primitive_polyhedral_closure_b() { return {0, 1, 1}; }

inline poscon::Matrix round_cone_a() { return {{0, 1, 0}, {1, 0, 0.5}, {0, 0.4, 1}}; }
inline poscon::Vector round_cone_b() { return {0, 1, 0}; }

inline poscon::Matrix vertex_six_a() {
    return {{0, 1.6333, 1.1049, 0}, {23.5667, 6.0944, 0, 0}, {0, 0, 1.1225, 1.0672}, {0, 1.6611, 0, 0.7830}};
}
inline poscon::Vector vertex_six_b() { return {0, 0, 1, 1}; }

inline poscon::Matrix planar_a() { return {{4, 4}, {11, 2}}; }
inline poscon::Vector planar_b() { return {2, 1}; }

inline std::string data_file(const std::string& name) { return std::string(POSCON_DATA_DIR) + "/" + name; }

}  // namespace testing_support
