/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "rankfuse/relevance.h"

#include "doctest.h"
#include "oracles.h"
#include "rankfuse/error.h"
#include "test_util.h"

namespace rankfuse {
namespace {

TEST_CASE("pair relevance on hand-checked cases") {
  const CaptionAnnotation a{"a", 3, {1, 2}};
  CHECK(PairRelevance(a, a) == 1.0);
  CHECK(PairRelevance(a, {"b", 4, {5, 6}}) == 0.0);
  // Same verb, nouns {1,2} vs {2,3}: (1 + 1/3) / 2.
  CHECK(PairRelevance(a, {"c", 3, {2, 3}}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  // Different verb, identical nouns.
  CHECK(PairRelevance(a, {"d", 9, {2, 1}}) == 0.5);
}

TEST_CASE("noun order does not matter") {
  CHECK(PairRelevance({"a", 1, {3, 1, 2}}, {"b", 1, {1, 2, 3}}) == 1.0);
}

TEST_CASE("relevance properties on random pairs") {
  Rng rng(11);
  for (int t = 0; t < 2000; ++t) {
    const auto a = testing::RandomAnnotation(rng, "a");
    const auto b = testing::RandomAnnotation(rng, "b");
    const double r = PairRelevance(a, b);
    CHECK(r == PairRelevance(b, a));
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    CHECK(r == oracle::Relevance(a, b));
    const bool same_nouns = oracle::SetIou({a.noun_classes.begin(), a.noun_classes.end()},
                                           {b.noun_classes.begin(), b.noun_classes.end()}) == 1.0;
    CHECK((r == 1.0) == (a.verb_class == b.verb_class && same_nouns));
  }
}

TEST_CASE("relevance matrix") {
  const CaptionAnnotation x{"x", 0, {0}}, y{"y", 1, {1}};
  SUBCASE("single item") {
    const std::vector<CaptionAnnotation> items{x};
    const auto rel = ComputeRelevanceMatrix(items);
    CHECK(rel.values == Matrix{{1.0}});
    CHECK(rel.row_ids == std::vector<std::string>{"x"});
  }
  SUBCASE("disjoint pair gives identity") {
    const std::vector<CaptionAnnotation> items{x, y};
    CHECK(ComputeRelevanceMatrix(items).values == Matrix::Identity(2));
  }
  SUBCASE("rectangular matches brute force, ids in input order") {
    Rng rng(5);
    const auto q = testing::RandomAnnotations(rng, 3);
    const auto g = testing::RandomAnnotations(rng, 5);
    const auto rel = ComputeRelevanceMatrix(q, g);
    REQUIRE(rel.rows() == 3);
    REQUIRE(rel.cols() == 5);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(rel.row_ids[i] == q[i].id);
      for (std::size_t j = 0; j < 5; ++j) CHECK(rel.values(i, j) == oracle::Relevance(q[i], g[j]));
    }
  }
  SUBCASE("square self relevance is symmetric with unit diagonal") {
    Rng rng(8);
    const auto items = testing::RandomAnnotations(rng, 12);
    const auto rel = ComputeRelevanceMatrix(items);
    for (std::size_t i = 0; i < 12; ++i) {
      CHECK(rel.values(i, i) == 1.0);
      for (std::size_t j = 0; j < 12; ++j) CHECK(rel.values(i, j) == rel.values(j, i));
    }
  }
  SUBCASE("empty input is a data error") {
    const std::vector<CaptionAnnotation> none;
    const std::vector<CaptionAnnotation> one{x};
    CHECK_THROWS_AS(ComputeRelevanceMatrix(none, one), DataError);
    CHECK_THROWS_AS(ComputeRelevanceMatrix(one, none), DataError);
  }
}

TEST_CASE("annotation validation") {
  CHECK_NOTHROW(Validate(CaptionAnnotation{"a", 0, {0, 4}}));
  CHECK_THROWS_AS(Validate(CaptionAnnotation{"a", 0, {}}), InvalidArgument);
  CHECK_THROWS_AS(Validate(CaptionAnnotation{"a", 0, {2, 2}}), InvalidArgument);
  CHECK_THROWS_AS(Validate(CaptionAnnotation{"a", -1, {2}}), InvalidArgument);
  CHECK_THROWS_AS(Validate(CaptionAnnotation{"a", 1, {-2}}), InvalidArgument);
}

}  // namespace
}  // namespace rankfuse
