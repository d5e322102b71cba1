// Copyright 2026 The ASGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sstream>

#include "asgn/errors.hpp"
#include "asgn/runspec.hpp"

namespace asgn {
namespace {

TEST(RunSpec, ParsesKeysCommentsAndLists) {
  const RunSpec s = parse_runspec(
      "# demo\n"
      "data = /data/qm9   # trailing comment\n"
      "\n"
      "labeled = 200\n"
      "seeds = 0, 1,2\n"
      "strategies = asgn,supervised-random\n"
      "properties = homo,lumo\n"
      "dim = 32\n"
      "lr = 5e-4\n"
      "readout = sum\n"
      "disable_transfer = yes\n");
  EXPECT_EQ(s.data, "/data/qm9");
  EXPECT_EQ(s.split.labeled, 200u);
  EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(s.strategies, (std::vector<std::string>{"asgn", "supervised-random"}));
  EXPECT_EQ(s.loop.properties, (std::vector<std::string>{"homo", "lumo"}));
  EXPECT_EQ(s.loop.backbone.dim, 32u);
  EXPECT_DOUBLE_EQ(s.loop.adam.lr, 5e-4);
  EXPECT_EQ(s.loop.backbone.readout, Readout::Sum);
  EXPECT_TRUE(s.loop.disable_transfer);
}

TEST(RunSpec, RejectsUnknownRepeatedAndMalformedLines) {
  EXPECT_THROW(parse_runspec("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse_runspec("dim = 8\ndim = 16\n"), ConfigError);
  EXPECT_THROW(parse_runspec("dim 8\n"), ConfigError);
  EXPECT_THROW(parse_runspec("dim = -3\n"), ConfigError);
  EXPECT_THROW(parse_runspec("lr = fast\n"), ConfigError);
  EXPECT_THROW(parse_runspec("strategies = asgn,asgn\n"), ConfigError);
  EXPECT_THROW(parse_runspec("strategies = greedy\n"), ConfigError);
  EXPECT_THROW(parse_runspec("seeds = \n"), ConfigError);
  EXPECT_THROW(parse_runspec("disable_teacher = maybe\n"), ConfigError);
  try {
    parse_runspec("dim = 8\n\nbogus = 1\n", "exp.spec");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("exp.spec:3"), std::string::npos) << e.what();
  }
}

TEST(RunSpec, FormatRoundTrips) {
  RunSpec s = parse_runspec("dim = 24\nseeds = 4,5\nweight_cluster = 0.25\nproperty_reduction = sum\n");
  const std::string text = format_runspec(s);
  const RunSpec back = parse_runspec(text);
  EXPECT_EQ(format_runspec(back), text);
  EXPECT_EQ(back.loop.hash(), s.loop.hash());
}

TEST(RunSpec, ReferenceListsEveryKeyWithDefault) {
  const std::string ref = runspec_reference();
  std::istringstream lines(format_runspec(RunSpec{}));
  std::string line;
  std::size_t keys = 0;
  while (std::getline(lines, line)) {
    const std::string key = line.substr(0, line.find(" = "));
    const std::string value = line.substr(line.find(" = ") + 3);
    EXPECT_NE(ref.find("  " + key + " "), std::string::npos) << key;
    EXPECT_NE(ref.find("[default: " + value + "]"), std::string::npos) << key;
    ++keys;
  }
  EXPECT_GT(keys, 40u);
}

TEST(Variants, SwitchesMatchTheirNames) {
  const LoopConfig base;
  const auto full = apply_variant(base, "asgn");
  EXPECT_EQ(full.strategy, Strategy::KCenter);
  EXPECT_FALSE(full.disable_teacher || full.disable_student || full.disable_transfer);
  EXPECT_TRUE(apply_variant(base, "asgn-t").disable_student);
  EXPECT_TRUE(apply_variant(base, "asgn-s").disable_teacher);
  EXPECT_TRUE(apply_variant(base, "asgn-no-transfer").disable_transfer);
  const auto sup = apply_variant(base, "supervised-random");
  EXPECT_EQ(sup.strategy, Strategy::Random);
  EXPECT_TRUE(sup.disable_teacher && sup.disable_transfer);
  EXPECT_FALSE(sup.disable_student);
  EXPECT_EQ(apply_variant(base, "random").strategy, Strategy::Random);
  EXPECT_THROW(apply_variant(base, "asgn-x"), ConfigError);
  EXPECT_TRUE(is_known_variant("kcenter"));
  EXPECT_FALSE(is_known_variant("KCenter"));
}

TEST(LoopConfigValidation, RejectsBadValues) {
  LoopConfig c;
  EXPECT_NO_THROW(c.validate());
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = LoopConfig{};
  c.recon_alpha = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = LoopConfig{};
  c.sinkhorn.lambda = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = LoopConfig{};
  c.properties.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  LoopConfig a, b;
  b.minibatch = 31;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), LoopConfig{}.hash());
}

}  // namespace
}  // namespace asgn
