#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "readerpanel/slop.hpp"

namespace readerpanel {
namespace {

using testing::make_concept;
using testing::plain_reader;

CheckResult scored(CheckName name, double score) {
  CheckResult r;
  r.check_name = name;
  r.score = score;
  return r;
}

std::vector<CheckResult> five(double rp, double gf, double cr, double sc, double am) {
  return {scored(CheckName::repetitive_phrasing, rp), scored(CheckName::generic_framing, gf),
          scored(CheckName::circular_reasoning, cr), scored(CheckName::score_clustering, sc),
          scored(CheckName::audience_mismatch, am)};
}

SlopReport report_with(double composite, std::vector<CheckName> flagged = {}) {
  SlopReport r;
  r.composite = composite;
  r.disposition = disposition_for(composite);
  for (auto name : all_values<CheckName>()) {
    auto c = scored(name, 0.0);
    if (std::find(flagged.begin(), flagged.end(), name) != flagged.end()) c.flags.push_back("x");
    r.per_check.push_back(c);
  }
  return r;
}

TEST(TokenizeTest, NormalisesCaseAndPunctuation) {
  EXPECT_EQ(tokenize("The cat, the CAT."), (std::vector<std::string>{"the", "cat", "the", "cat"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("4-gram copy"), (std::vector<std::string>{"4", "gram", "copy"}));
}

TEST(RepetitivePhrasingTest, TypeTokenRatioHandCount) {
  auto r = check_repetitive_phrasing("the cat sat on the mat");
  // six tokens, five types
  EXPECT_NEAR(r.components.at("ttr"), 5.0 / 6.0, 1e-12);
  EXPECT_EQ(std::count(r.flags.begin(), r.flags.end(), "type-token ratio below 0.35"), 0);
}

TEST(RepetitivePhrasingTest, RepeatedSentenceTripsTrigramRate) {
  std::string text;
  for (int i = 0; i < 10; ++i) text += "The harbour lights burned low over the quiet water. ";
  auto tokens = tokenize(text);
  // Oracle: distinct trigrams over total trigram positions.
  std::set<std::string> distinct;
  for (std::size_t i = 0; i + 3 <= tokens.size(); ++i) distinct.insert(tokens[i] + " " + tokens[i + 1] + " " + tokens[i + 2]);
  double total = static_cast<double>(tokens.size() - 2);
  double expected = (total - static_cast<double>(distinct.size())) / total;
  auto r = check_repetitive_phrasing(text);
  EXPECT_NEAR(r.components.at("trigram_rep_rate"), expected, 1e-12);
  EXPECT_GT(r.components.at("trigram_rep_rate"), 0.30);
  EXPECT_FALSE(r.flags.empty());
}

TEST(RepetitivePhrasingTest, SlopPhrasesRaiseDensity) {
  auto r = check_repetitive_phrasing("We delve into a tapestry of ideas about ships.");
  EXPECT_GT(r.components.at("phrase_density"), 0.0);
  EXPECT_GT(r.score, 0.0);
}

TEST(GenericFramingTest, ClicheOpenerCounted) {
  auto r = check_generic_framing("In today's rapidly changing world, books matter. Sales were 12 units.");
  EXPECT_GE(r.components.at("opener_hits"), 1.0);
}

TEST(GenericFramingTest, SpecificReasoningZeroesSpecificityTerm) {
  auto r = check_generic_framing("Chapter 7 puts Maya on a train, and the price of $12.99 fits the reader.");
  EXPECT_GE(r.components.at("specificity"), 3.0);
  EXPECT_DOUBLE_EQ(r.components.at("opener_hits"), 0.0);
  EXPECT_DOUBLE_EQ(r.score, 0.0);
}

TEST(GenericFramingTest, DenseQualifiersSaturate) {
  std::string text;
  for (int i = 0; i < 5; ++i) text += "somewhat arguably to some extent ";
  auto r = check_generic_framing(text);
  EXPECT_GE(r.components.at("qualifier_density"), 5.0);
  // qualifier sub-score saturated at 1, no opener, no specificity.
  EXPECT_NEAR(r.score, 0.3 * 1.0 + 0.3 * 1.0, 1e-12);
}

TEST(CircularReasoningTest, VerbatimRestatementScoresOne) {
  std::string x = "A lighthouse keeper finds a stranded whale and a buried letter";
  auto r = check_circular_reasoning(x, x);
  EXPECT_DOUBLE_EQ(r.components.at("overlap"), 1.0);
  EXPECT_DOUBLE_EQ(r.components.at("novelty"), 0.0);
  EXPECT_DOUBLE_EQ(r.components.at("copy4"), 1.0);
  EXPECT_DOUBLE_EQ(r.score, 1.0);
}

TEST(CircularReasoningTest, DisjointVocabularyScoresZero) {
  auto r = check_circular_reasoning("pacing drags midway through", "A lighthouse keeper finds a whale");
  EXPECT_DOUBLE_EQ(r.components.at("overlap"), 0.0);
  EXPECT_DOUBLE_EQ(r.components.at("novelty"), 1.0);
  EXPECT_DOUBLE_EQ(r.components.at("copy4"), 0.0);
  EXPECT_DOUBLE_EQ(r.score, 0.0);
}

TEST(CircularReasoningTest, HalfCopiedMatchesContainmentOracle) {
  std::string concept_text = "a lighthouse keeper finds a stranded whale on the winter shore";
  std::string reasoning = "a lighthouse keeper finds a stranded whale but pacing drags badly later";
  auto c = tokenize(concept_text);
  auto r = tokenize(reasoning);
  std::set<std::string> grams;
  for (std::size_t i = 0; i + 4 <= c.size(); ++i) grams.insert(c[i] + " " + c[i + 1] + " " + c[i + 2] + " " + c[i + 3]);
  int copied = 0;
  for (std::size_t i = 0; i + 4 <= r.size(); ++i) copied += grams.count(r[i] + " " + r[i + 1] + " " + r[i + 2] + " " + r[i + 3]);
  double expected = copied / static_cast<double>(r.size() - 3);
  auto result = check_circular_reasoning(reasoning, concept_text);
  EXPECT_NEAR(result.components.at("copy4"), expected, 1e-12);
  EXPECT_NEAR(expected, 4.0 / 9.0, 1e-12);
}

TEST(ScoreClusteringTest, IdenticalScoresMaximal) { EXPECT_DOUBLE_EQ(check_score_clustering({7, 7, 7, 7}).score, 1.0); }

TEST(ScoreClusteringTest, TightSpreadPopulationStddevOracle) {
  double sigma = std::sqrt((0.01 + 0.0 + 0.01) / 3.0);
  auto r = check_score_clustering({7.0, 7.1, 7.2});
  EXPECT_NEAR(r.components.at("stddev"), sigma, 1e-12);
  EXPECT_NEAR(r.score, 1.0 - sigma / 0.3, 1e-12);
  EXPECT_NEAR(r.score, 0.728, 1e-3);
  EXPECT_FALSE(r.flags.empty());
}

TEST(ScoreClusteringTest, WideSpreadScoresZero) {
  auto r = check_score_clustering({2, 5, 8, 9});
  EXPECT_NEAR(r.components.at("stddev"), std::sqrt(7.5), 1e-12);
  EXPECT_DOUBLE_EQ(r.score, 0.0);
  EXPECT_DOUBLE_EQ(check_score_clustering({5, 5}).score, 0.0);
}

TEST(AudienceMismatchTest, ChildUsingAcademicVocabulary) {
  auto p = plain_reader("kid");
  p.age_group = AgeGroup::child;
  p.reading_level = ReadingLevel::beginner;
  Evaluation e;
  e.reasoning = "The epistemological stakes felt huge.";
  auto book = make_concept("c1", "Moon Kite", "A kite flies to the moon.", {"picture books"});
  auto r = check_audience_mismatch(e, &p, book, default_rubric());
  EXPECT_DOUBLE_EQ(r.components.at("vocabulary_level"), 1.0);
  EXPECT_DOUBLE_EQ(r.components.at("age_register"), 1.0);
  EXPECT_DOUBLE_EQ(r.score, 1.0);
}

TEST(AudienceMismatchTest, HighScoreForDislikedGenre) {
  auto p = plain_reader("r");
  p.disliked_genres = {"romance"};
  Evaluation e;
  e.criterion_scores = {{"Market Appeal", 9}, {"Originality", 9}, {"Execution Potential", 9}, {"Audience Fit", 9}};
  e.reasoning = "Lovely.";
  auto r = check_audience_mismatch(e, &p, make_concept("c1", "Hearts", "Love story.", {"romance"}), default_rubric());
  EXPECT_DOUBLE_EQ(r.components.at("genre_alignment"), 1.0);
  EXPECT_DOUBLE_EQ(r.score, 1.0);
}

TEST(AudienceMismatchTest, PriceSensitiveReaderMentioningValuePasses) {
  auto p = plain_reader("r");
  p.price_sensitivity = Level::high;
  Evaluation e;
  e.reasoning = "Good value for the price.";
  auto r = check_audience_mismatch(e, &p, make_concept("c1", "T", "D"), default_rubric());
  EXPECT_DOUBLE_EQ(r.components.at("price_sensitivity"), 0.0);
  EXPECT_DOUBLE_EQ(r.score, 0.0);
  e.reasoning = "Good story.";
  EXPECT_DOUBLE_EQ(check_audience_mismatch(e, &p, make_concept("c1", "T", "D"), default_rubric()).score, 1.0);
}

TEST(AudienceMismatchTest, ExpertsAreNotApplicable) {
  Evaluation e;
  e.reasoning = "epistemological";
  EXPECT_DOUBLE_EQ(check_audience_mismatch(e, nullptr, make_concept("c1", "T", "D"), default_rubric()).score, 0.0);
}

TEST(CompositeTest, WeightArithmetic) {
  auto zero = composite_slop(five(0, 0, 0, 0, 0));
  EXPECT_DOUBLE_EQ(zero.composite, 0.0);
  EXPECT_EQ(zero.disposition, Disposition::accept);
  auto one = composite_slop(five(1, 1, 1, 1, 1));
  EXPECT_DOUBLE_EQ(one.composite, 1.0);
  EXPECT_EQ(one.disposition, Disposition::reject);
  auto clustered = composite_slop(five(0, 0, 0, 1, 0));
  EXPECT_NEAR(clustered.composite, 1.5 / 5.5, 1e-9);
  EXPECT_EQ(clustered.disposition, Disposition::accept);
  auto mixed = composite_slop(five(0.2, 0.5, 0.1, 0.9, 0.3));
  EXPECT_NEAR(mixed.composite, (0.2 * 1.0 + 0.5 * 0.8 + 0.1 * 1.2 + 0.9 * 1.5 + 0.3 * 1.0) / 5.5, 1e-12);
}

TEST(CompositeTest, BetweenMinAndMaxCheck) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> s(5);
    for (auto& v : s) v = rng.uniform();
    auto r = composite_slop(five(s[0], s[1], s[2], s[3], s[4]));
    EXPECT_GE(r.composite, *std::min_element(s.begin(), s.end()));
    EXPECT_LE(r.composite, *std::max_element(s.begin(), s.end()));
  }
}

TEST(CompositeTest, MissingOrDuplicateCheckIsSchemaError) {
  auto results = five(0, 0, 0, 0, 0);
  results.pop_back();
  EXPECT_THROW(composite_slop(results), Error);
  results.push_back(scored(CheckName::generic_framing, 0));
  EXPECT_THROW(composite_slop(results), Error);
}

TEST(DispositionTest, BoundariesExact) {
  EXPECT_EQ(disposition_for(0.3999999), Disposition::accept);
  EXPECT_EQ(disposition_for(0.4), Disposition::flag);
  EXPECT_EQ(disposition_for(0.5999999), Disposition::flag);
  EXPECT_EQ(disposition_for(0.6), Disposition::reject);
  EXPECT_EQ(composite_slop(five(0.4, 0.4, 0.4, 0.4, 0.4)).disposition, Disposition::flag);
  EXPECT_EQ(composite_slop(five(0.6, 0.6, 0.6, 0.6, 0.6)).disposition, Disposition::reject);
}

TEST(BatchSummaryTest, AllAccepted) {
  std::vector<SlopReport> reports(10, report_with(0.1));
  auto s = batch_summary(reports);
  EXPECT_EQ(s.total, 10);
  EXPECT_EQ(s.accepted, 10);
  EXPECT_EQ(s.flagged, 0);
  EXPECT_EQ(s.rejected, 0);
  EXPECT_FALSE(s.most_common_flag.has_value());
}

TEST(BatchSummaryTest, MostCommonFlagByCount) {
  std::vector<SlopReport> reports{report_with(0.1, {CheckName::score_clustering}),
                                  report_with(0.1, {CheckName::score_clustering, CheckName::generic_framing}),
                                  report_with(0.45, {CheckName::score_clustering}), report_with(0.7)};
  auto s = batch_summary(reports);
  EXPECT_EQ(s.most_common_flag, CheckName::score_clustering);
  EXPECT_EQ(s.flag_counts[static_cast<std::size_t>(CheckName::score_clustering)], 3);
  EXPECT_EQ(s.flag_counts[static_cast<std::size_t>(CheckName::generic_framing)], 1);
  EXPECT_EQ(s.accepted + s.flagged + s.rejected, s.total);
  EXPECT_EQ(s.flagged, 1);
  EXPECT_EQ(s.rejected, 1);
}

TEST(BatchSummaryTest, HistogramBins) {
  auto s = batch_summary({report_with(0.05), report_with(0.55), report_with(0.95)});
  EXPECT_EQ(s.score_histogram[0], 1);
  EXPECT_EQ(s.score_histogram[5], 1);
  EXPECT_EQ(s.score_histogram[9], 1);
  EXPECT_THROW(batch_summary({}), Error);
}

TEST(DetectorTest, OrderIndependentAndPure) {
  SlopDetector detector;
  auto book = make_concept("c1", "Tide Clock", "A clockmaker on a tidal island builds a machine that stops the sea.");
  auto member = PanelMember{plain_reader("r1")};
  auto a = testing::clean_evaluation(member, book, default_rubric(), 6.0);
  auto b = testing::sloppy_evaluation(member, book, default_rubric());
  auto ra = detector.analyze(a, member, book, default_rubric());
  auto rb = detector.analyze(b, member, book, default_rubric());
  EXPECT_EQ(detector.analyze(b, member, book, default_rubric()), rb);
  EXPECT_EQ(detector.analyze(a, member, book, default_rubric()), ra);
  EXPECT_EQ(ra.disposition, Disposition::accept);
  EXPECT_EQ(rb.disposition, Disposition::reject);
  for (const auto& c : rb.per_check) {
    EXPECT_GE(c.score, 0.0);
    EXPECT_LE(c.score, 1.0);
  }
}

TEST(SlopBanksTest, ShippedBanksHavePublishedExamples) {
  const auto& banks = SlopBanks::shipped();
  EXPECT_GE(banks.slop_phrases.size(), 20u);
  EXPECT_GE(banks.openers.size(), 15u);
  auto custom = SlopBanks::from_text("zorp\n", "^wibble\n", "meh\n", "", "", "");
  auto r = check_repetitive_phrasing("zorp zorp plain words", custom);
  EXPECT_GT(r.components.at("phrase_density"), 0.0);
}

}  // namespace
}  // namespace readerpanel
