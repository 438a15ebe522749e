#pragma once

// libsvm-format reading and writing, and seeded synthetic data generators.

#include "robsvm/core.hpp"
#include "robsvm/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace robsvm {

struct LoadResult {
  Dataset dataset;
  /// Number of samples whose label 0 was read as -1.
  std::size_t remapped_labels = 0;
};

/// Parses `label idx:val ...` lines (1-based indices, missing entries are zero). Labels are
/// +-1, or 0/1 with 0 read as -1. Blank lines and lines starting with '#' are skipped. Errors
/// name the source and line number.
LoadResult parse_libsvm(std::istream& in, const std::string& source = "<stream>");
LoadResult load_dataset(const std::string& path);

/// Writes every sample with round-trip precision; the last coordinate is always written so the
/// dimension survives a reload.
void write_libsvm(std::ostream& out, const Dataset& ds);
void save_dataset(const std::string& path, const Dataset& ds);

/// Two classes, alternating labels starting with +1, x ~ N(+-(separation/2) e_1, sigma^2 I).
Dataset gaussian_blobs(std::size_t m, Index n, double separation, double sigma, std::uint64_t seed);
Dataset gaussian_blobs(std::size_t m, Index n, double separation, double sigma, Rng& rng);

struct ReplicatedPair {
  Dataset base;
  /// base with x_i + N(0, noise^2 I) and the same labels.
  Dataset disturbed;
};

ReplicatedPair replicated_with_noise(const Dataset& base, double noise, std::uint64_t seed);

/// Two isotropic Gaussian classes in the plane at (+-separation/2, 0). Labels are i.i.d. fair
/// coin flips, or exactly alternating when `balanced`.
Dataset gaussian_mixture_2d(std::size_t m, double separation, double sigma, bool balanced, Rng& rng);

}  // namespace robsvm
