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

// Container, builders, text I/O and validation.

#include "wfa_hedge/wfa.h"

#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/brute_force.h"
#include "wfa_hedge/wfa_io.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

using testing::AllStrings;
using testing::BruteEvaluate;
using ::testing::ElementsAre;
using testing::Sequence;

int Shifts(const Sequence& x) {
  int k = 0;
  for (size_t t = 1; t < x.size(); ++t) k += x[t] != x[t - 1];
  return k;
}

TEST(SymbolTableTest, AlphabeticNames) {
  const SymbolTable s = SymbolTable::Alphabetic(28);
  EXPECT_EQ(s.size(), 28);
  EXPECT_EQ(s.Name(0), "a");
  EXPECT_EQ(s.Name(25), "z");
  EXPECT_EQ(s.Name(26), "e26");
  EXPECT_EQ(s.Find("c"), 2);
  EXPECT_FALSE(s.Find("zz").has_value());
}

TEST(SymbolTableTest, FromNamesRejectsDuplicatesAndReservedToken) {
  EXPECT_TRUE(SymbolTable::FromNames({"x", "y"}).ok());
  EXPECT_FALSE(SymbolTable::FromNames({"x", "x"}).ok());
  EXPECT_FALSE(SymbolTable::FromNames({"x", kPhiToken}).ok());
}

TEST(SymbolTableTest, AddSymbolIsIdempotent) {
  SymbolTable s;
  EXPECT_EQ(s.AddSymbol("up"), 0);
  EXPECT_EQ(s.AddSymbol("down"), 1);
  EXPECT_EQ(s.AddSymbol("up"), 0);
  EXPECT_THAT(s.names(), ElementsAre("up", "down"));
}

TEST(WfaTest, BasicAccessors) {
  Wfa a(SymbolTable::Alphabetic(2));
  const StateId s0 = a.AddState();
  a.AddStates(2);
  a.SetInitial(s0);
  a.AddArc(0, {1, 0.5, 1});
  a.AddArc(0, {0, 0.25, 2});
  a.AddArc(1, {kPhiLabel, 0.9, 0});
  a.SetFinal(2, 1.0);
  EXPECT_EQ(a.NumStates(), 3);
  EXPECT_EQ(a.NumArcs(), 3);
  EXPECT_EQ(a.NumArcs(0), 2);
  EXPECT_TRUE(a.HasPhi());
  ASSERT_NE(a.FindArc(0, 0), nullptr);
  EXPECT_EQ(a.FindArc(0, 0)->dest, 2);
  EXPECT_EQ(a.FindArc(2, 0), nullptr);
  ASSERT_NE(a.PhiArc(1), nullptr);
  EXPECT_FALSE(a.IsFinal(0));
  EXPECT_TRUE(a.IsFinal(2));
  a.SortArcs();
  EXPECT_EQ(a.Arcs(0)[0].label, 0);
  a.SetStateName(1, "mid");
  EXPECT_EQ(a.StateName(1), "mid");
}

// Strings of Sigma^T with exactly k changes: C(T-1, k) N (N-1)^k.
TEST(BuildKShiftTest, SupportMatchesPredicate) {
  for (int n : {2, 3}) {
    for (int k : {0, 1, 2}) {
      auto c = BuildKShift(n, k);
      ASSERT_TRUE(c.ok()) << c.status();
      for (int t = 1; t <= 6; ++t) {
        for (const Sequence& x : AllStrings(n, t)) {
          const double expected = Shifts(x) == k ? 1.0 : 0.0;
          EXPECT_EQ(BruteEvaluate(*c, x), expected);
        }
      }
    }
  }
}

TEST(BuildKShiftTest, AtMostAcceptsFewerShifts) {
  auto c = BuildKShift(3, 2, KShiftOptions{true});
  ASSERT_TRUE(c.ok());
  for (const Sequence& x : AllStrings(3, 5)) {
    EXPECT_EQ(BruteEvaluate(*c, x), Shifts(x) <= 2 ? 1.0 : 0.0);
  }
}

TEST(BuildKShiftTest, CountFormula) {
  auto c = BuildKShift(3, 2);
  auto s = BuildLengthAutomaton(3, 6);
  ASSERT_TRUE(c.ok() && s.ok());
  auto ct = Intersect(*c, *s);
  ASSERT_TRUE(ct.ok());
  auto k = CountAcceptingPaths(*ct);
  ASSERT_TRUE(k.ok());
  EXPECT_EQ(*k, 120u);  // C(5,2) * 3 * 2^2
}

TEST(BuildKShiftTest, RejectsBadArguments) {
  EXPECT_FALSE(BuildKShift(0, 1).ok());
  EXPECT_FALSE(BuildKShift(3, -1).ok());
  EXPECT_FALSE(BuildKShift(1, 1).ok());
}

TEST(BuildWeightedShiftTest, WeightIsProductOfEntries) {
  const std::vector<std::vector<double>> m = {{0.6, 0.4}, {0.3, 0.7}};
  const std::vector<double> init = {0.2, 0.8};
  auto c = BuildWeightedShift(m, init);
  ASSERT_TRUE(c.ok());
  for (int t = 1; t <= 5; ++t) {
    for (const Sequence& x : AllStrings(2, t)) {
      double w = init[x[0]];
      for (size_t i = 1; i < x.size(); ++i) w *= m[x[i - 1]][x[i]];
      EXPECT_NEAR(BruteEvaluate(*c, x), w, 1e-15);
    }
  }
  EXPECT_EQ(BruteEvaluate(*c, {}), 0.0);
}

TEST(BuildWeightedShiftTest, ValidatesMatrix) {
  EXPECT_FALSE(BuildWeightedShift({}).ok());
  EXPECT_FALSE(BuildWeightedShift({{0.5, 0.5}}).ok());
  EXPECT_FALSE(BuildWeightedShift({{1.5}}).ok());
  EXPECT_FALSE(BuildWeightedShift({{1.0}}, {0.5, 0.5}).ok());
}

// Starts on a, at most one shift onto b and two onto c, none back onto a.
TEST(BuildHierarchyTest, PresetMatchesPredicate) {
  auto c = BuildHierarchyPreset();
  ASSERT_TRUE(c.ok());
  for (int t = 1; t <= 7; ++t) {
    for (const Sequence& x : AllStrings(3, t)) {
      int onto[3] = {0, 0, 0};
      for (size_t i = 1; i < x.size(); ++i) {
        if (x[i] != x[i - 1]) ++onto[x[i]];
      }
      const bool ok = x[0] == 0 && onto[0] == 0 && onto[1] <= 1 && onto[2] <= 2;
      EXPECT_EQ(BruteEvaluate(*c, x), ok ? 1.0 : 0.0);
    }
  }
}

TEST(BuildHierarchyTest, RejectsInvalidTiers) {
  EXPECT_FALSE(BuildHierarchy(3, {}).ok());
  EXPECT_FALSE(BuildHierarchy(3, {{{0}, 0}, {{0}, 1}}).ok());
  EXPECT_FALSE(BuildHierarchy(3, {{{5}, 0}}).ok());
  EXPECT_FALSE(BuildHierarchy(3, {{{0}, -1}}).ok());
  EXPECT_FALSE(BuildHierarchy(3, {{{}, 1}}).ok());
}

TEST(BuildLengthAutomatonTest, AcceptsExactlyLengthT) {
  auto s = BuildLengthAutomaton(2, 3);
  ASSERT_TRUE(s.ok());
  for (int t = 0; t <= 5; ++t) {
    for (const Sequence& x : AllStrings(2, t)) {
      EXPECT_EQ(BruteEvaluate(*s, x), t == 3 ? 1.0 : 0.0);
    }
  }
  EXPECT_FALSE(BuildLengthAutomaton(0, 3).ok());
  EXPECT_FALSE(BuildLengthAutomaton(2, 0).ok());
}

TEST(WfaIoTest, TextRoundTripPreservesLanguage) {
  std::mt19937_64 rng(3);
  testing::RandomWfaOptions opts;
  for (int i = 0; i < 20; ++i) {
    Wfa a = testing::AddRandomPhi(testing::RandomWfa(opts, rng), 0.3, rng);
    std::istringstream in(ToText(a));
    auto b = ReadText(in, a.symbols());
    ASSERT_TRUE(b.ok()) << b.status();
    EXPECT_EQ(ToText(*b), ToText(a));
    for (const Sequence& x : testing::AllStringsUpTo(3, 4)) {
      EXPECT_EQ(BruteEvaluate(*b, x), BruteEvaluate(a, x));
    }
  }
}

TEST(WfaIoTest, SymbolsRoundTrip) {
  auto s = SymbolTable::FromNames({"sun", "rain", "fog"});
  ASSERT_TRUE(s.ok());
  std::istringstream in(SymbolsToText(*s));
  auto back = ReadSymbols(in);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(*back, *s);
}

TEST(WfaIoTest, ParseErrorsCarryLineNumbers) {
  const SymbolTable s = SymbolTable::Alphabetic(2);
  std::istringstream bad_symbol("0\t1\tq\t1\n");
  auto a = ReadText(bad_symbol, s);
  ASSERT_FALSE(a.ok());
  EXPECT_THAT(std::string(a.status().message()),
              ::testing::HasSubstr("line 1"));
  std::istringstream negative("0\t1\ta\t1\n1\t-2\n");
  EXPECT_FALSE(ReadText(negative, s).ok());
  std::istringstream empty("# nothing\n");
  EXPECT_FALSE(ReadText(empty, s).ok());
  std::istringstream gap("a\t0\nb\t2\n");
  EXPECT_FALSE(ReadSymbols(gap).ok());
}

TEST(WfaIoTest, FilesRoundTrip) {
  auto c = BuildKShift(3, 1);
  ASSERT_TRUE(c.ok());
  const std::string dir = ::testing::TempDir();
  const std::string path = dir + "/kshift.txt";
  const std::string syms = dir + "/kshift.syms";
  ASSERT_TRUE(WriteFiles(*c, path, syms).ok());
  auto back = ReadFiles(path, syms);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(ToText(*back), ToText(*c));
  EXPECT_FALSE(ReadFiles(dir + "/missing.txt", syms).ok());
}

TEST(ValidateTest, FlagsStructuralProblems) {
  Wfa a(SymbolTable::Alphabetic(2));
  a.AddStates(3);
  EXPECT_TRUE(Validate(a).Has("initial"));
  a.SetInitial(0);
  a.AddArc(0, {0, 0.5, 1});
  a.AddArc(0, {0, 0.5, 2});
  a.SetFinal(1, 1.0);
  Diagnostics d = Validate(a);
  EXPECT_FALSE(d.ok());
  EXPECT_TRUE(d.Has("determinism"));

  Wfa b(SymbolTable::Alphabetic(2));
  b.AddStates(3);
  b.SetInitial(0);
  b.AddArc(0, {0, -1.0, 1});
  b.AddArc(1, {kPhiLabel, 0.5, 0});
  b.AddArc(1, {kPhiLabel, 0.5, 0});
  b.SetFinal(1, 1.0);
  d = Validate(b);
  EXPECT_TRUE(d.Has("weight"));
  EXPECT_TRUE(d.Has("phi"));

  Wfa c(SymbolTable::Alphabetic(1));
  c.AddStates(3);
  c.SetInitial(0);
  c.AddArc(0, {0, 1.0, 1});
  c.SetFinal(1, 1.0);
  d = Validate(c);
  EXPECT_TRUE(d.ok());
  EXPECT_TRUE(d.Has("unreachable"));
  EXPECT_FALSE(d.ToString().empty());
}

}  // namespace
}  // namespace wfa_hedge
