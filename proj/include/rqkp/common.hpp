#pragma once

// Shared tolerances, error types and small numeric helpers used across the
// library. All magnitude-dependent tests are of the form
//   quantity <= coeff * (1 + |reference|)
// so a single record controls every tolerance knob.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace rqkp {

struct Tolerances {
  double feasibility = 1e-9;  // |a'x - b| <= feasibility * (1 + |b|)
  double gap = 1e-6;          // f(x) - phi(lambda) <= gap * (1 + |phi|)
  double bound = 1e-12;       // box membership, relative
};

inline double scaled_tol(double coeff, double reference) {
  return coeff * (1.0 + std::fabs(reference));
}

// ---------------------------------------------------------------------------
// Errors. Indices are 0-based throughout.

struct ZeroRankFactor : std::invalid_argument {
  int index;
  explicit ZeroRankFactor(int i)
      : std::invalid_argument("rank-one factor q[" + std::to_string(i) +
                              "] is zero"),
        index(i) {}
};

struct BadBounds : std::invalid_argument {
  int index;
  explicit BadBounds(int i)
      : std::invalid_argument("lower bound exceeds upper bound at index " +
                              std::to_string(i)),
        index(i) {}
};

struct ParseError : std::runtime_error {
  std::string field;  // offending field name, empty for syntax errors
  ParseError(std::string f, const std::string& msg)
      : std::runtime_error(msg), field(std::move(f)) {}
};

struct TooLarge : std::invalid_argument {
  int n;
  explicit TooLarge(int n_, int limit)
      : std::invalid_argument("instance size " + std::to_string(n_) +
                              " exceeds enumeration limit " +
                              std::to_string(limit)),
        n(n_) {}
};

struct QueueEmpty : std::logic_error {
  QueueEmpty() : std::logic_error("no pending sweep events") {}
};

struct IndexOutOfRange : std::out_of_range {
  int index;
  explicit IndexOutOfRange(int i)
      : std::out_of_range("index " + std::to_string(i) + " out of range"),
        index(i) {}
};

// ---------------------------------------------------------------------------
// Numeric helpers.

// 17 significant digits: lossless for IEEE doubles, so text round-trips
// reproduce values exactly.
inline std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double vec_sum(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

}  // namespace rqkp
