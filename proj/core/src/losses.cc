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

#include "wfa_hedge/losses.h"

#include <algorithm>
#include <cstdio>
#include <string>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace wfa_hedge {
namespace {

int UniformIndex(int n, Rng& rng) {
  return std::min(n - 1, static_cast<int>(rng.Uniform() * n));
}

absl::Status CheckShape(int num_experts, int horizon) {
  if (num_experts < 1) return absl::InvalidArgumentError("need >= 1 expert");
  if (horizon < 1) return absl::InvalidArgumentError("horizon must be >= 1");
  return absl::OkStatus();
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

absl::Status ValidateLosses(const LossStream& losses, int num_experts,
                            int horizon) {
  if (static_cast<int>(losses.size()) != horizon) {
    return absl::InvalidArgumentError(absl::StrCat(
        "loss stream has ", losses.size(), " rows, expected ", horizon));
  }
  for (size_t t = 0; t < losses.size(); ++t) {
    if (static_cast<int>(losses[t].size()) != num_experts) {
      return absl::InvalidArgumentError(
          absl::StrCat("loss row ", t + 1, " has ", losses[t].size(),
                       " entries, expected ", num_experts));
    }
    for (double v : losses[t]) {
      if (!(v >= 0.0 && v <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("loss row ", t + 1, " has a value outside [0,1]"));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<LossStream> GenIidUniform(int num_experts, int horizon,
                                         Rng& rng) {
  if (auto st = CheckShape(num_experts, horizon); !st.ok()) return st;
  LossStream out(horizon, std::vector<double>(num_experts));
  for (auto& row : out) {
    for (double& v : row) v = rng.Uniform();
  }
  return out;
}

absl::StatusOr<LossStream> GenPiecewiseStationary(int num_experts, int horizon,
                                                  int segment_length,
                                                  double low_mean,
                                                  double high_mean, Rng& rng) {
  if (auto st = CheckShape(num_experts, horizon); !st.ok()) return st;
  if (segment_length < 1) {
    return absl::InvalidArgumentError("segment length must be >= 1");
  }
  if (!(low_mean >= 0.0 && low_mean <= 1.0 && high_mean >= 0.0 &&
        high_mean <= 1.0)) {
    return absl::InvalidArgumentError("Bernoulli means must be in [0,1]");
  }
  LossStream out(horizon, std::vector<double>(num_experts));
  int good = 0;
  for (int t = 0; t < horizon; ++t) {
    if (t % segment_length == 0) good = UniformIndex(num_experts, rng);
    for (int a = 0; a < num_experts; ++a) {
      const double mean = a == good ? low_mean : high_mean;
      out[t][a] = rng.Uniform() < mean ? 1.0 : 0.0;
    }
  }
  return out;
}

absl::StatusOr<LossStream> GenAdversarialBestPath(
    int num_experts, const std::vector<Label>& target, Rng& rng) {
  const int horizon = target.size();
  if (auto st = CheckShape(num_experts, horizon); !st.ok()) return st;
  LossStream out(horizon, std::vector<double>(num_experts));
  for (int t = 0; t < horizon; ++t) {
    if (target[t] < 0 || target[t] >= num_experts) {
      return absl::InvalidArgumentError(
          absl::StrCat("target symbol ", target[t], " out of range"));
    }
    for (int a = 0; a < num_experts; ++a) {
      out[t][a] = a == target[t] ? 0.0 : rng.Uniform();
    }
  }
  return out;
}

absl::StatusOr<std::vector<Label>> RandomKShiftSequence(int num_experts, int k,
                                                        int horizon, Rng& rng) {
  if (auto st = CheckShape(num_experts, horizon); !st.ok()) return st;
  if (k < 0 || k > horizon - 1 || (k > 0 && num_experts < 2)) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot place ", k, " shifts in ", horizon, " rounds"));
  }
  // Partial Fisher-Yates over the T-1 boundaries.
  std::vector<int> slots(horizon - 1);
  for (int i = 0; i < horizon - 1; ++i) slots[i] = i + 1;
  for (int i = 0; i < k; ++i) {
    const int j = i + UniformIndex(horizon - 1 - i, rng);
    std::swap(slots[i], slots[j]);
  }
  std::vector<bool> shift(horizon, false);
  for (int i = 0; i < k; ++i) shift[slots[i]] = true;
  std::vector<Label> out(horizon);
  out[0] = UniformIndex(num_experts, rng);
  for (int t = 1; t < horizon; ++t) {
    if (!shift[t]) {
      out[t] = out[t - 1];
      continue;
    }
    const int step = 1 + UniformIndex(num_experts - 1, rng);
    out[t] = (out[t - 1] + step) % num_experts;
  }
  return out;
}

std::vector<AwakeSet> GenRandomAwakeSets(int num_experts, int horizon, double p,
                                         Rng& rng) {
  std::vector<AwakeSet> out(horizon, AwakeSet(num_experts, false));
  for (auto& row : out) {
    bool any = false;
    for (int a = 0; a < num_experts; ++a) {
      row[a] = rng.Uniform() < p;
      any = any || row[a];
    }
    if (!any) row[UniformIndex(num_experts, rng)] = true;
  }
  return out;
}

void WriteLossCsv(const LossStream& losses, std::ostream& out) {
  for (const auto& row : losses) {
    for (size_t a = 0; a < row.size(); ++a) {
      if (a > 0) out << ',';
      out << FormatDouble(row[a]);
    }
    out << '\n';
  }
}

absl::StatusOr<LossStream> ReadLossCsv(std::istream& in) {
  LossStream out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view[0] == '#') continue;
    std::vector<double> row;
    for (absl::string_view field : absl::StrSplit(view, ',')) {
      double v;
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(field), &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": bad number '", field, "'"));
      }
      row.push_back(v);
    }
    if (!out.empty() && row.size() != out.front().size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ragged row"));
    }
    out.push_back(std::move(row));
  }
  if (out.empty()) return absl::InvalidArgumentError("empty loss file");
  if (auto st = ValidateLosses(out, out.front().size(), out.size()); !st.ok()) {
    return st;
  }
  return out;
}

void WriteAwakeCsv(const std::vector<AwakeSet>& awake, std::ostream& out) {
  for (const auto& row : awake) {
    for (bool b : row) out << (b ? '1' : '0');
    out << '\n';
  }
}

absl::StatusOr<std::vector<AwakeSet>> ReadAwakeCsv(std::istream& in,
                                                   const SymbolTable& symbols) {
  std::vector<AwakeSet> out;
  std::string line;
  int line_no = 0;
  const int n = symbols.size();
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view[0] == '#') continue;
    AwakeSet row(n, false);
    const bool bits = static_cast<int>(view.size()) == n &&
                      view.find_first_not_of("01") == absl::string_view::npos;
    if (bits) {
      for (int a = 0; a < n; ++a) row[a] = view[a] == '1';
    } else {
      for (absl::string_view name :
           absl::StrSplit(view, absl::ByAnyChar(" ,"), absl::SkipEmpty())) {
        auto id = symbols.Find(std::string(name));
        if (!id.has_value()) {
          return absl::InvalidArgumentError(
              absl::StrCat("line ", line_no, ": unknown expert '", name, "'"));
        }
        row[*id] = true;
      }
    }
    if (std::find(row.begin(), row.end(), true) == row.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": empty awake set"));
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace wfa_hedge
