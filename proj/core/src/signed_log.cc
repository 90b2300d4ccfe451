// Copyright 2026 The WFA Hedge Authors.
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

#include "wfa_hedge/signed_log.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace wfa_hedge {

double LogAddExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double LogSumExp(const std::vector<double>& values) {
  double hi = kLogZero;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kLogZero) return kLogZero;
  if (std::isinf(hi)) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

SignedLogWeight SignedLogWeight::FromLog(double log_magnitude, int sign) {
  if (sign == 0 || log_magnitude == kLogZero) return SignedLogWeight();
  return SignedLogWeight(sign > 0 ? 1 : -1, log_magnitude);
}

SignedLogWeight SignedLogWeight::FromLinear(double value) {
  if (value == 0.0) return SignedLogWeight();
  return SignedLogWeight(value > 0 ? 1 : -1, std::log(std::fabs(value)));
}

double SignedLogWeight::ToLinear() const {
  if (sign_ == 0) return 0.0;
  return sign_ * std::exp(log_);
}

SignedLogWeight SignedLogWeight::operator-() const {
  return SignedLogWeight(-sign_, log_);
}

SignedLogWeight& SignedLogWeight::operator+=(const SignedLogWeight& other) {
  if (other.sign_ == 0) return *this;
  if (sign_ == 0) {
    *this = other;
    return *this;
  }
  if (sign_ == other.sign_) {
    log_ = LogAddExp(log_, other.log_);
    return *this;
  }
  // Opposite signs: the larger magnitude keeps its sign.
  const double hi = std::max(log_, other.log_);
  const double lo = std::min(log_, other.log_);
  const int hi_sign = log_ >= other.log_ ? sign_ : other.sign_;
  if (hi == lo) {
    *this = SignedLogWeight();
    return *this;
  }
  const double diff = -std::expm1(lo - hi);
  if (diff <= 0.0) {
    *this = SignedLogWeight();
    return *this;
  }
  sign_ = hi_sign;
  log_ = hi + std::log(diff);
  return *this;
}

SignedLogWeight& SignedLogWeight::operator-=(const SignedLogWeight& other) {
  return *this += -other;
}

SignedLogWeight& SignedLogWeight::operator*=(const SignedLogWeight& other) {
  if (sign_ == 0 || other.sign_ == 0) {
    *this = SignedLogWeight();
    return *this;
  }
  sign_ *= other.sign_;
  log_ += other.log_;
  return *this;
}

SignedLogWeight SignedLogWeight::ScaledByLog(double log_factor) const {
  if (sign_ == 0 || log_factor == kLogZero) return SignedLogWeight();
  return SignedLogWeight(sign_, log_ + log_factor);
}

std::string SignedLogWeight::DebugString() const {
  if (sign_ == 0) return "0";
  return absl::StrCat(sign_ < 0 ? "-" : "+", "exp(", log_, ")");
}

SignedLogWeight operator+(SignedLogWeight a, const SignedLogWeight& b) {
  return a += b;
}

SignedLogWeight operator-(SignedLogWeight a, const SignedLogWeight& b) {
  return a -= b;
}

SignedLogWeight operator*(SignedLogWeight a, const SignedLogWeight& b) {
  return a *= b;
}

SignedLogWeight operator/(const SignedLogWeight& a, const SignedLogWeight& b) {
  if (a.IsZero()) return a;
  return SignedLogWeight::FromLog(a.log_magnitude() - b.log_magnitude(),
                                  a.sign() * b.sign());
}

}  // namespace wfa_hedge
