#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/setup_document.hpp"

using namespace pathid;
using testing_support::bundled_setups;
using testing_support::load_setup;

TEST(SetupDocumentTest, BundledSetupsRoundTrip) {
  for (const auto& name : bundled_setups()) {
    const auto doc = load_setup(name);
    const auto again = SetupDocument::parse(doc.serialize());
    EXPECT_EQ(again, doc) << name;
    EXPECT_EQ(again.serialize(), doc.serialize()) << name;
    EXPECT_EQ(again.hash(), doc.hash()) << name;
    EXPECT_NO_THROW(doc.build()) << name;
  }
}

TEST(SetupDocumentTest, ParsesEveryKeyword) {
  const auto doc = SetupDocument::parse(
      "# comment\n"
      "order 3\n"
      "detectors a b c\n"
      "pattern {a|b}=1,c=1\n"
      "param phi = pi / 2\n"
      "annihilation off\n"
      "crystal a b weight=0.5 phase=phi modes=H,V\n"
      "crystal x y z\n"
      "bs x y -> c d phase=phi\n"
      "pbs a b -> e f\n"
      "phase e phi=-phi\n"
      "shift e oam=+1\n"
      "shift f rotate=0.3\n"
      "shift z set=H\n"
      "attenuator z T=0.5 Tphase=0.1 tag=~loss7\n"
      "identify z -> w\n"
      "target 1 a:H b:V\n");
  EXPECT_EQ(doc.truncation, 3);
  EXPECT_EQ(doc.detectors, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(doc.pattern, "{a|b}=1,c=1");
  ASSERT_EQ(doc.params.size(), 1u);
  EXPECT_DOUBLE_EQ(doc.params[0].second, 1.5707963267948966);
  EXPECT_FALSE(doc.annihilation);
  EXPECT_EQ(doc.elements.size(), 10u);
  EXPECT_EQ(doc.target.size(), 1u);
  EXPECT_EQ(SetupDocument::parse(doc.serialize()), doc);
  EXPECT_EQ(doc.detection_pattern()->str(), "{a|b}=1,c=1");
}

TEST(SetupDocumentTest, ParseErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    try {
      SetupDocument::parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("detectors a\nfoo bar\n"), 2);
  EXPECT_EQ(line_of("detectors a\n\ncrystal a\n"), 3);
  EXPECT_EQ(line_of("bs a b c d\n"), 1);
  EXPECT_EQ(line_of("crystal a b weight=(1\n"), 1);
  EXPECT_EQ(line_of("order x\n"), 1);
  EXPECT_EQ(line_of("param = 1\n"), 1);
  EXPECT_EQ(line_of("crystal a b colour=red\n"), 1);
  EXPECT_EQ(line_of("annihilation maybe\n"), 1);
  EXPECT_THROW(SetupDocument::load("/nonexistent/file.setup"), Error);
}

TEST(SetupDocumentTest, HashTracksContent) {
  const auto a = SetupDocument::parse("detectors a b\ncrystal a b\n");
  const auto b = SetupDocument::parse("# same\ndetectors  a b\n\ncrystal a  b\n");
  const auto c = SetupDocument::parse("detectors a b\ncrystal a b weight=0.5\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(SetupDocumentTest, TargetState) {
  const auto doc = load_setup("hardy-pol");
  const auto target = doc.target_state(2);
  ASSERT_TRUE(target.has_value());
  EXPECT_NEAR(norm_squared(*target), 1.0, 1e-15);
  EXPECT_FALSE(load_setup("zwm").target_state(1).has_value());
  EXPECT_EQ(parse_mode_label("a:H/l2").internal.oam, 2);
  EXPECT_EQ(parse_mode_label("b").path, "b");
}

TEST(SetupDocumentTest, BindingsAndBuild) {
  const auto doc = load_setup("zwm");
  const auto b = doc.bindings();
  EXPECT_EQ(b.at("T"), 1.0);
  const auto setup = doc.build();
  EXPECT_EQ(setup.truncation(), 1);
  EXPECT_EQ(setup.detectors(), (std::vector<std::string>{"Sd"}));
  EXPECT_TRUE(setup.options().annihilation);
}
