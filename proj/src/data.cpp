#include "robsvm/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace robsvm {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& tok, const std::string& source, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    parse_error(source, line, "malformed number '" + tok + "'");
  }
  if (used != tok.size()) parse_error(source, line, "malformed number '" + tok + "'");
  if (!std::isfinite(v)) parse_error(source, line, "non-finite value '" + tok + "'");
  return v;
}

}  // namespace

LoadResult parse_libsvm(std::istream& in, const std::string& source) {
  struct Row {
    std::map<long, double> entries;
    int y;
  };
  std::vector<Row> rows;
  std::size_t remapped = 0;
  long dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#') continue;

    Row row;
    const double label = parse_double(tok, source, lineno);
    if (label == 1.0) {
      row.y = 1;
    } else if (label == -1.0) {
      row.y = -1;
    } else if (label == 0.0) {
      row.y = -1;
      ++remapped;
    } else {
      parse_error(source, lineno, "invalid label '" + tok + "'");
    }
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_error(source, lineno, "expected idx:val, got '" + tok + "'");
      long idx = 0;
      const auto* first = tok.data();
      const auto res = std::from_chars(first, first + colon, idx);
      if (res.ec != std::errc() || res.ptr != first + colon || idx < 1) {
        parse_error(source, lineno, "invalid index in '" + tok + "'");
      }
      if (!row.entries.emplace(idx, parse_double(tok.substr(colon + 1), source, lineno)).second) {
        parse_error(source, lineno, "duplicate index " + std::to_string(idx));
      }
      dim = std::max(dim, idx);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(source + ": no samples");
  if (dim == 0) throw std::runtime_error(source + ": no features");

  std::vector<LabeledSample> samples;
  samples.reserve(rows.size());
  for (const auto& r : rows) {
    Vector x = Vector::Zero(dim);
    for (const auto& [i, v] : r.entries) x[i - 1] = v;
    samples.push_back({std::move(x), r.y});
  }
  return {Dataset(std::move(samples)), remapped};
}

LoadResult load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  return parse_libsvm(in, path);
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
  char buf[64];
  for (const auto& s : ds) {
    out << (s.y > 0 ? "+1" : "-1");
    for (Index k = 0; k < s.x.size(); ++k) {
      if (s.x[k] == 0.0 && k + 1 != s.x.size()) continue;
      std::snprintf(buf, sizeof buf, "%.17g", s.x[k]);
      out << ' ' << (k + 1) << ':' << buf;
    }
    out << '\n';
  }
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset '" + path + "'");
  write_libsvm(out, ds);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Dataset gaussian_blobs(std::size_t m, Index n, double separation, double sigma, Rng& rng) {
  if (m == 0 || n < 1) throw std::invalid_argument("gaussian_blobs: m and n must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(separation)) throw std::invalid_argument("gaussian_blobs: bad parameters");
  std::normal_distribution<double> normal;
  std::vector<LabeledSample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const int y = i % 2 == 0 ? 1 : -1;
    Vector x(n);
    for (Index k = 0; k < n; ++k) x[k] = sigma * normal(rng);
    x[0] += 0.5 * separation * y;
    out.push_back({std::move(x), y});
  }
  return Dataset(std::move(out));
}

Dataset gaussian_blobs(std::size_t m, Index n, double separation, double sigma, std::uint64_t seed) {
  Rng rng = make_rng(seed, {0x626c6f6273});
  return gaussian_blobs(m, n, separation, sigma, rng);
}

ReplicatedPair replicated_with_noise(const Dataset& base, double noise, std::uint64_t seed) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw std::invalid_argument("replicated_with_noise: bad noise scale");
  Rng rng = make_rng(seed, {0x7265706c});
  std::normal_distribution<double> normal;
  std::vector<LabeledSample> copy;
  copy.reserve(base.size());
  for (const auto& s : base) {
    Vector x = s.x;
    if (noise > 0.0)
      for (Index k = 0; k < x.size(); ++k) x[k] += noise * normal(rng);
    copy.push_back({std::move(x), s.y});
  }
  return {base, Dataset(std::move(copy))};
}

Dataset gaussian_mixture_2d(std::size_t m, double separation, double sigma, bool balanced, Rng& rng) {
  if (m == 0) throw std::invalid_argument("gaussian_mixture_2d: m must be positive");
  if (!(sigma > 0.0) || !std::isfinite(separation)) throw std::invalid_argument("gaussian_mixture_2d: bad parameters");
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  std::vector<LabeledSample> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const int y = balanced ? (i % 2 == 0 ? 1 : -1) : (coin(rng) ? 1 : -1);
    const double x0 = 0.5 * separation * y + sigma * normal(rng);
    const double x1 = sigma * normal(rng);
    out.push_back({Vector{{x0, x1}}, y});
  }
  return Dataset(std::move(out));
}

}  // namespace robsvm
