// Copyright 2026 The qrem-bias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file
 * Symplectic Pauli strings and real-coefficient Pauli sums.
 *
 * A PauliString on n qubits is stored as two bit masks plus a global phase
 * i^k. Qubit j carries I, X, Z, Y for (x_j, z_j) = (0,0), (1,0), (0,1), (1,1);
 * the Y label denotes the Hermitian Pauli Y, so the global phase of a
 * Hermitian string is always +1 or -1. The single-qubit product table follows
 * the convention XZ = -iY.
 *
 * Qubit 0 is the least significant bit of computational basis indices and the
 * leftmost character of a text label.
 */

#include <algorithm>
#include <bitset>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qrem/detail/text.hpp"
#include "qrem/error.hpp"

namespace qrem {

inline constexpr std::size_t kMaxQubits = 128;
using QubitMask = std::bitset<kMaxQubits>;

/// Global phase i^k, k in {0,1,2,3}.
enum class Phase : std::uint8_t { kPlusOne = 0, kPlusI = 1, kMinusOne = 2, kMinusI = 3 };

constexpr Phase phase_from_exponent(int k) {
  return static_cast<Phase>(((k % 4) + 4) % 4);
}
constexpr int exponent(Phase p) { return static_cast<int>(p); }
constexpr Phase operator*(Phase a, Phase b) {
  return phase_from_exponent(exponent(a) + exponent(b));
}
inline std::complex<double> to_complex(Phase p) {
  switch (p) {
    case Phase::kPlusOne: return {1.0, 0.0};
    case Phase::kPlusI: return {0.0, 1.0};
    case Phase::kMinusOne: return {-1.0, 0.0};
    case Phase::kMinusI: return {0.0, -1.0};
  }
  return {1.0, 0.0};
}

inline QubitMask low_mask(std::size_t n) {
  QubitMask m;
  for (std::size_t i = 0; i < n; ++i) m.set(i);
  return m;
}

/// Converts the low 64 bits of `m` to an integer.
inline std::uint64_t to_u64(const QubitMask& m) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 64; ++i)
    if (m[i]) v |= std::uint64_t{1} << i;
  return v;
}

inline QubitMask from_u64(std::uint64_t v) {
  QubitMask m;
  for (std::size_t i = 0; i < 64; ++i)
    if ((v >> i) & 1U) m.set(i);
  return m;
}

class PauliString {
 public:
  PauliString() = default;

  /// Identity on `n_qubits`.
  explicit PauliString(std::size_t n_qubits) : n_(n_qubits) { check_size(n_); }

  PauliString(std::size_t n_qubits, const QubitMask& x, const QubitMask& z,
              Phase phase = Phase::kPlusOne)
      : n_(n_qubits), x_(x), z_(z), phase_(phase) {
    check_size(n_);
    if ((x_ | z_) != ((x_ | z_) & low_mask(n_)))
      throw DimensionError("PauliString: bits set beyond n_qubits");
  }

  /// Parses a label such as "XIZY" (leftmost character = qubit 0). An
  /// optional leading sign "+", "-", "+i", "-i" or "i" sets the phase.
  static PauliString from_label(std::string_view label) {
    Phase phase = Phase::kPlusOne;
    if (label.starts_with("-i")) {
      phase = Phase::kMinusI;
      label.remove_prefix(2);
    } else if (label.starts_with("+i")) {
      phase = Phase::kPlusI;
      label.remove_prefix(2);
    } else if (label.starts_with("i")) {
      phase = Phase::kPlusI;
      label.remove_prefix(1);
    } else if (label.starts_with("-")) {
      phase = Phase::kMinusOne;
      label.remove_prefix(1);
    } else if (label.starts_with("+")) {
      label.remove_prefix(1);
    }
    if (label.empty()) throw ParseError(0, "empty Pauli label");
    if (label.size() > kMaxQubits)
      throw DomainError("Pauli label longer than kMaxQubits");
    QubitMask x, z;
    for (std::size_t i = 0; i < label.size(); ++i) {
      switch (label[i]) {
        case 'I': break;
        case 'X': x.set(i); break;
        case 'Y': x.set(i); z.set(i); break;
        case 'Z': z.set(i); break;
        default:
          throw ParseError(0, std::string("bad Pauli character '") + label[i] + "'");
      }
    }
    return PauliString(label.size(), x, z, phase);
  }

  /// Single-qubit Pauli `op` in {'I','X','Y','Z'} on `qubit`.
  static PauliString single(std::size_t n_qubits, std::size_t qubit, char op) {
    if (qubit >= n_qubits) throw DomainError("qubit index out of range");
    QubitMask x, z;
    if (op == 'X' || op == 'Y') x.set(qubit);
    if (op == 'Z' || op == 'Y') z.set(qubit);
    if (op != 'I' && op != 'X' && op != 'Y' && op != 'Z')
      throw DomainError("bad Pauli operator");
    return PauliString(n_qubits, x, z);
  }

  std::size_t n_qubits() const noexcept { return n_; }
  const QubitMask& x_bits() const noexcept { return x_; }
  const QubitMask& z_bits() const noexcept { return z_; }
  Phase phase() const noexcept { return phase_; }
  QubitMask support() const noexcept { return x_ | z_; }
  std::size_t weight() const noexcept { return support().count(); }
  bool is_identity() const noexcept { return x_.none() && z_.none(); }
  bool is_hermitian() const noexcept {
    return phase_ == Phase::kPlusOne || phase_ == Phase::kMinusOne;
  }

  char op(std::size_t qubit) const {
    const bool x = x_[qubit], z = z_[qubit];
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  PauliString with_phase(Phase p) const {
    PauliString r = *this;
    r.phase_ = p;
    return r;
  }

  /// Support qubits in ascending order.
  std::vector<std::size_t> support_qubits() const {
    std::vector<std::size_t> out;
    const QubitMask s = support();
    for (std::size_t i = 0; i < n_; ++i)
      if (s[i]) out.push_back(i);
    return out;
  }

  /// Label without phase, e.g. "XIZ".
  std::string label() const {
    std::string s(n_, 'I');
    for (std::size_t i = 0; i < n_; ++i) s[i] = op(i);
    return s;
  }

  /// Label with phase prefix ("", "-", "i", "-i").
  std::string to_string() const {
    static constexpr const char* kPrefix[] = {"", "i", "-", "-i"};
    return kPrefix[exponent(phase_)] + label();
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_ && a.phase_ == b.phase_;
  }

  bool same_operator(const PauliString& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_;
  }

 private:
  static void check_size(std::size_t n) {
    if (n > kMaxQubits) throw DomainError("PauliString: n_qubits > kMaxQubits");
  }

  std::size_t n_ = 0;
  QubitMask x_;
  QubitMask z_;
  Phase phase_ = Phase::kPlusOne;
};

/// Product a·b with exact phase. Throws DimensionError on size mismatch.
inline PauliString multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits())
    throw DimensionError("multiply: qubit count mismatch");
  const QubitMask& x1 = a.x_bits();
  const QubitMask& z1 = a.z_bits();
  const QubitMask& x2 = b.x_bits();
  const QubitMask& z2 = b.z_bits();
  const QubitMask X1 = x1 & ~z1, Y1 = x1 & z1, Z1 = ~x1 & z1;
  const QubitMask X2 = x2 & ~z2, Y2 = x2 & z2, Z2 = ~x2 & z2;
  // XY = iZ, YZ = iX, ZX = iY and the reversed orders pick up -i.
  const QubitMask plus = (X1 & Y2) | (Y1 & Z2) | (Z1 & X2);
  const QubitMask minus = (X1 & Z2) | (Z1 & Y2) | (Y1 & X2);
  const int k = exponent(a.phase()) + exponent(b.phase()) +
                static_cast<int>(plus.count()) - static_cast<int>(minus.count());
  return PauliString(a.n_qubits(), x1 ^ x2, z1 ^ z2, phase_from_exponent(k));
}

inline PauliString operator*(const PauliString& a, const PauliString& b) {
  return multiply(a, b);
}

/// True iff the symplectic inner product of a and b is even.
inline bool commutes(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits())
    throw DimensionError("commutes: qubit count mismatch");
  const std::size_t s =
      (a.x_bits() & b.z_bits()).count() + (a.z_bits() & b.x_bits()).count();
  return s % 2 == 0;
}

/// Sum of Pauli strings with real coefficients.
///
/// Each stored string has phase +1 (Hermitian term) or +i (anti-Hermitian
/// term); a -1 or -i phase is folded into the coefficient sign. Terms sharing
/// (x_bits, z_bits) are merged on construction, first-occurrence order kept.
/// Terms whose merged coefficient magnitude is below 1e-14 are dropped.
class PauliSumOperator {
 public:
  struct Term {
    double coefficient;
    PauliString string;
  };

  PauliSumOperator() = default;
  explicit PauliSumOperator(std::size_t n_qubits) : n_(n_qubits) {}

  PauliSumOperator(std::size_t n_qubits, const std::vector<Term>& terms)
      : n_(n_qubits) {
    // Merge on (x, z); the map is keyed on x then scanned for z.
    std::unordered_multimap<QubitMask, std::size_t> by_x;
    for (const Term& t : terms) {
      if (t.string.n_qubits() != n_)
        throw DimensionError("PauliSumOperator: term qubit count mismatch");
      Term norm = normalized(t);
      auto [lo, hi] = by_x.equal_range(norm.string.x_bits());
      bool merged = false;
      for (auto it = lo; it != hi; ++it) {
        Term& existing = terms_[it->second];
        if (existing.string.z_bits() != norm.string.z_bits()) continue;
        if (existing.string.phase() != norm.string.phase())
          throw DomainError(
              "PauliSumOperator: real and imaginary coefficients on the same "
              "string " + norm.string.label());
        existing.coefficient += norm.coefficient;
        merged = true;
        break;
      }
      if (!merged) {
        by_x.emplace(norm.string.x_bits(), terms_.size());
        terms_.push_back(std::move(norm));
      }
    }
    std::erase_if(terms_, [](const Term& t) { return std::abs(t.coefficient) < 1e-14; });
  }

  std::size_t n_qubits() const noexcept { return n_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  /// True when every term is Hermitian (phase +1).
  bool is_hermitian() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const Term& t) { return t.string.phase() == Phase::kPlusOne; });
  }

  /// Coefficient of the operator (x, z) of `p`, ignoring its phase; 0 if
  /// absent.
  double coefficient_of(const PauliString& p) const {
    for (const Term& t : terms_)
      if (t.string.same_operator(p)) return t.coefficient;
    return 0.0;
  }

  /// Serializes to the line format `<coefficient> <label>`. Only Hermitian
  /// operators can be written.
  std::string to_text() const {
    if (!is_hermitian())
      throw DomainError("to_text: operator has imaginary coefficients");
    std::string out;
    for (const Term& t : terms_) {
      out += detail::format_double(t.coefficient);
      out += ' ';
      out += t.string.label();
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const PauliSumOperator& a, const PauliSumOperator& b) {
    if (a.n_ != b.n_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
      if (a.terms_[i].coefficient != b.terms_[i].coefficient ||
          !(a.terms_[i].string == b.terms_[i].string))
        return false;
    return true;
  }

 private:
  static Term normalized(const Term& t) {
    switch (t.string.phase()) {
      case Phase::kMinusOne:
        return {-t.coefficient, t.string.with_phase(Phase::kPlusOne)};
      case Phase::kMinusI:
        return {-t.coefficient, t.string.with_phase(Phase::kPlusI)};
      default:
        return t;
    }
  }

  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

/// Reads the `<coefficient> <string>` line format. Throws ParseError with the
/// offending line number.
inline PauliSumOperator parse_pauli_sum(std::string_view text) {
  std::vector<PauliSumOperator::Term> terms;
  std::size_t n = 0;
  for (const detail::Line& line : detail::tokenize_lines(text)) {
    if (line.tokens.size() != 2)
      throw ParseError(line.number, "expected '<coefficient> <pauli string>'");
    auto c = detail::parse_double(line.tokens[0]);
    if (!c || !std::isfinite(*c))
      throw ParseError(line.number, "unparseable coefficient '" +
                                        std::string(line.tokens[0]) + "'");
    const std::string_view label = line.tokens[1];
    for (char ch : label)
      if (ch != 'I' && ch != 'X' && ch != 'Y' && ch != 'Z')
        throw ParseError(line.number, std::string("bad Pauli character '") + ch + "'");
    if (label.size() > kMaxQubits)
      throw ParseError(line.number, "Pauli string longer than kMaxQubits");
    if (terms.empty()) {
      n = label.size();
    } else if (label.size() != n) {
      throw ParseError(line.number, "inconsistent Pauli string length (expected " +
                                        std::to_string(n) + ", got " +
                                        std::to_string(label.size()) + ")");
    }
    terms.push_back({*c, PauliString::from_label(label)});
  }
  if (terms.empty()) throw ParseError(0, "no Pauli terms found");
  return PauliSumOperator(n, terms);
}

}  // namespace qrem
