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

// Signed log-domain reals. Used wherever path sums may underflow in the
// linear domain and where the failure-transition update needs subtraction.

#ifndef WFA_HEDGE_SIGNED_LOG_H_
#define WFA_HEDGE_SIGNED_LOG_H_

#include <limits>
#include <string>
#include <vector>

namespace wfa_hedge {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)).
double LogAddExp(double a, double b);

// log(sum_i exp(v_i)). Returns kLogZero for an empty input.
double LogSumExp(const std::vector<double>& values);

// A real number stored as sign * exp(log_magnitude).
class SignedLogWeight {
 public:
  SignedLogWeight() : sign_(0), log_(kLogZero) {}

  static SignedLogWeight Zero() { return SignedLogWeight(); }
  static SignedLogWeight One() { return FromLog(0.0); }
  static SignedLogWeight FromLog(double log_magnitude, int sign = 1);
  static SignedLogWeight FromLinear(double value);

  int sign() const { return sign_; }
  double log_magnitude() const { return log_; }
  bool IsZero() const { return sign_ == 0; }
  double ToLinear() const;

  SignedLogWeight operator-() const;
  SignedLogWeight& operator+=(const SignedLogWeight& other);
  SignedLogWeight& operator-=(const SignedLogWeight& other);
  SignedLogWeight& operator*=(const SignedLogWeight& other);

  // Multiplies by exp(log_factor).
  SignedLogWeight ScaledByLog(double log_factor) const;

  std::string DebugString() const;

 private:
  SignedLogWeight(int sign, double log) : sign_(sign), log_(log) {}

  int sign_;
  double log_;
};

SignedLogWeight operator+(SignedLogWeight a, const SignedLogWeight& b);
SignedLogWeight operator-(SignedLogWeight a, const SignedLogWeight& b);
SignedLogWeight operator*(SignedLogWeight a, const SignedLogWeight& b);
SignedLogWeight operator/(const SignedLogWeight& a, const SignedLogWeight& b);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_SIGNED_LOG_H_
