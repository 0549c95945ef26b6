// Copyright 2026 The oqc Authors
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

#include "oqc/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace oqc::exact {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "-p", "p/q" into a reduced rational.
inline Rational parse_rational(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s.push_back(ch);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = s.find('/');
  auto parse_int = [&](const std::string& part) {
    std::size_t start = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (start == part.size()) throw std::invalid_argument("malformed rational literal '" + text + "'");
    for (std::size_t i = start; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') throw std::invalid_argument("malformed rational literal '" + text + "'");
    return Integer(part[0] == '+' ? part.substr(1) : part);
  };
  if (slash == std::string::npos) return Rational(parse_int(s));
  Integer num = parse_int(s.substr(0, slash));
  Integer den = parse_int(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline std::string to_string(const Rational& r) {
  return denominator(r) == 1 ? numerator(r).str() : numerator(r).str() + "/" + denominator(r).str();
}

/// a + b sqrt(root) with rational a, b. root == 0 marks a plain rational (b == 0).
/// Values with b == 0 combine with any root; two irrational values must share the root.
class QuadraticNumber {
 public:
  QuadraticNumber() = default;
  QuadraticNumber(Rational a) : a_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  QuadraticNumber(long a) : a_(a) {}                 // NOLINT(google-explicit-constructor)
  QuadraticNumber(Rational a, Rational b, int root) : a_(std::move(a)), b_(std::move(b)), root_(root) {
    if (b_ != 0 && root_ < 2) throw std::invalid_argument("irrational part needs a root >= 2");
    normalize();
  }

  const Rational& rational_part() const { return a_; }
  const Rational& root_coefficient() const { return b_; }
  int root() const { return root_; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  double to_double() const {
    return static_cast<double>(a_) + (b_ == 0 ? 0.0 : static_cast<double>(b_) * std::sqrt(static_cast<double>(root_)));
  }

  std::string str() const {
    if (b_ == 0) return to_string(a_);
    return to_string(a_) + "+" + to_string(b_) + "*sqrt(" + std::to_string(root_) + ")";
  }

  friend QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y) {
    return {x.a_ + y.a_, x.b_ + y.b_, common_root(x, y)};
  }
  friend QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y) {
    return {x.a_ - y.a_, x.b_ - y.b_, common_root(x, y)};
  }
  friend QuadraticNumber operator-(const QuadraticNumber& x) { return {-x.a_, -x.b_, x.root_}; }
  friend QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y) {
    const int r = common_root(x, y);
    return {x.a_ * y.a_ + x.b_ * y.b_ * r, x.a_ * y.b_ + x.b_ * y.a_, r};
  }
  friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) { return x.a_ == y.a_ && x.b_ == y.b_; }

 private:
  static int common_root(const QuadraticNumber& x, const QuadraticNumber& y) {
    if (x.b_ != 0 && y.b_ != 0 && x.root_ != y.root_) throw std::invalid_argument("mixing different square roots");
    return x.b_ != 0 ? x.root_ : y.root_;
  }
  void normalize() {
    if (b_ == 0) root_ = 0;
  }

  Rational a_ = 0;
  Rational b_ = 0;
  int root_ = 0;
};

struct Complex {
  QuadraticNumber re;
  QuadraticNumber im;

  Complex conj() const { return {re, -im}; }
  cplx to_complex() const { return {re.to_double(), im.to_double()}; }
  std::string str() const { return "(" + re.str() + "," + im.str() + ")"; }

  friend Complex operator+(const Complex& x, const Complex& y) { return {x.re + y.re, x.im + y.im}; }
  friend Complex operator-(const Complex& x, const Complex& y) { return {x.re - y.re, x.im - y.im}; }
  friend Complex operator*(const Complex& x, const Complex& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  friend bool operator==(const Complex& x, const Complex& y) { return x.re == y.re && x.im == y.im; }
};

/// Dense matrix over Q(sqrt d)[i], row-major. Entries are kept in reduced form by construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}

  static Matrix identity(Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = Complex{1, 0};
    return m;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Complex& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Complex& operator()(Index i, Index j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
      for (Index j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j).conj();
    return out;
  }

  Complex trace() const {
    Complex t;
    for (Index i = 0; i < std::min(rows_, cols_); ++i) t = t + (*this)(i, i);
    return t;
  }

  CMatrix to_double() const {
    CMatrix out(rows_, cols_);
    for (Index i = 0; i < rows_; ++i)
      for (Index j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).to_complex();
    return out;
  }

  /// Injective textual key of the reduced entries.
  std::string key() const {
    std::string k = std::to_string(rows_) + "x" + std::to_string(cols_) + ":";
    for (const auto& e : data_) k += e.str() + ";";
    return k;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols_ != y.rows_) throw DimensionError("exact matrix product: shape mismatch");
    Matrix out(x.rows_, y.cols_);
    for (Index i = 0; i < x.rows_; ++i)
      for (Index j = 0; j < y.cols_; ++j) {
        Complex acc;
        for (Index k = 0; k < x.cols_; ++k) acc = acc + x(i, k) * y(k, j);
        out(i, j) = acc;
      }
    return out;
  }
  friend Matrix operator+(const Matrix& x, const Matrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw DimensionError("exact matrix sum: shape mismatch");
    Matrix out(x.rows_, x.cols_);
    for (std::size_t k = 0; k < x.data_.size(); ++k) out.data_[k] = x.data_[k] + y.data_[k];
    return out;
  }
  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.data_ == y.data_;
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Complex> data_;
};

/// Builds a matrix from rational entries given row by row as (re, im) pairs.
inline Matrix from_rationals(Index n, const std::vector<std::pair<Rational, Rational>>& entries) {
  if (static_cast<Index>(entries.size()) != n * n) throw DimensionError("from_rationals: wrong entry count");
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const auto& [re, im] = entries[static_cast<std::size_t>(i * n + j)];
      m(i, j) = Complex{re, im};
    }
  return m;
}

}  // namespace oqc::exact
