#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <random>

#include "../support/expect_errc.hpp"
#include "biasforge/assets.hpp"
#include "biasforge/sgl.hpp"

using namespace biasforge;

namespace {

// The scene-parsing prompt's own example output.
const char* kPromptScene = R"([
  {"ID": 1, "object_type": "manipulation object", "name": "cube",
   "category": ["cube", "geometry", "rectangular shape"], "state": "solid", "color": "red",
   "size": "small", "position": "left"},
  {"ID": 2, "object_type": "receiver object", "name": "box",
   "category": ["box", "container", "rectangular shape"], "state": "hollow", "color": "yellow",
   "size": "normal", "position": "right"},
  {"ID": 3, "object_type": "other object", "name": "pyramid", "category": ["pyramid", "geometry"],
   "state": "solid", "color": "blue", "size": "normal", "position": "middle"}
])";

SceneObject obj(int id, ObjectType t, std::string name, std::vector<std::string> cats, std::string color,
                SizeClass size = SizeClass::normal, PositionClass pos = PositionClass::normal,
                StateClass state = StateClass::solid) {
  return {id, t, std::move(name), std::move(cats), std::move(color), size, pos, state};
}

std::vector<Attribute> attrs_of(const std::vector<AttributeChoice>& c) {
  std::vector<Attribute> out;
  for (const auto& a : c) out.push_back(a.attribute);
  return out;
}

std::string value_of(const SceneObject& o, Attribute a) {
  switch (a) {
    case Attribute::color: return o.color;
    case Attribute::state: return std::string(state_name(o.state));
    case Attribute::size: return std::string(size_name(o.size));
    case Attribute::position: return std::string(position_name(o.position));
  }
  return {};
}

// Competitors still matching the target on every chosen attribute.
std::size_t survivors(const std::vector<SceneObject>& objs, const AmbiguityReport& r,
                      const std::vector<AttributeChoice>& chosen) {
  const auto target = std::find_if(objs.begin(), objs.end(), [&](const SceneObject& o) { return o.id == r.target; });
  std::size_t n = 0;
  for (int id : r.competing) {
    const auto o = std::find_if(objs.begin(), objs.end(), [&](const SceneObject& x) { return x.id == id; });
    bool same = true;
    for (const auto& c : chosen) same = same && value_of(*o, c.attribute) == value_of(*target, c.attribute);
    n += same;
  }
  return n;
}

}  // namespace

TEST(SglParse, PromptExampleScene) {
  const auto objs = parse_scene_json(kPromptScene);
  ASSERT_EQ(objs.size(), 3u);
  EXPECT_EQ(objs[0].object_type, ObjectType::manipulation);
  EXPECT_EQ(objs[1].object_type, ObjectType::receiver);
  EXPECT_EQ(objs[2].position, PositionClass::middle);
  EXPECT_EQ(manipulation_object(objs).name, "cube");
  EXPECT_EQ(receiver_object(objs)->name, "box");
  EXPECT_EQ(parse_scene_json(serialize_scene(objs)), objs);
}

TEST(SglParse, SchemaContract) {
  EXPECT_ERRC(parse_scene_json("[]"), Errc::NoManipulationObject);
  EXPECT_ERRC(parse_scene_json("[{"), Errc::MalformedJson);
  EXPECT_ERRC(parse_scene_json("{}"), Errc::SchemaViolation);
  const std::string base = R"({"ID": 1, "object_type": "manipulation object", "name": "cube", "category": ["cube"], "state": "solid", "color": "red", "size": "small", "position": "left"})";
  auto with = [&](const std::string& from, const std::string& to) {
    std::string s = base;
    s.replace(s.find(from), from.size(), to);
    return "[" + s + "]";
  };
  EXPECT_NO_THROW(parse_scene_json("[" + base + "]"));
  EXPECT_ERRC(parse_scene_json(with("\"small\"", "\"huge\"")), Errc::SchemaViolation);
  EXPECT_ERRC(parse_scene_json(with("\"solid\"", "\"liquid\"")), Errc::SchemaViolation);
  EXPECT_ERRC(parse_scene_json(with("\"left\"", "\"behind\"")), Errc::SchemaViolation);
  EXPECT_ERRC(parse_scene_json(with("\"ID\": 1", "\"ID\": \"1\"")), Errc::SchemaViolation);
  EXPECT_ERRC(parse_scene_json(with("\"name\": \"cube\", ", "")), Errc::SchemaViolation);
  EXPECT_ERRC(parse_scene_json(with("\"name\"", "\"weight\": 2, \"name\"")), Errc::SchemaViolation);
  EXPECT_ERRC(parse_scene_json(with("manipulation object", "tool")), Errc::SchemaViolation);
  EXPECT_ERRC(parse_scene_json("[" + base + "," + base + "]"), Errc::SchemaViolation);  // duplicate id
  std::string second = base;
  second.replace(second.find("\"ID\": 1"), 7, "\"ID\": 2");
  EXPECT_ERRC(parse_scene_json("[" + base + "," + second + "]"), Errc::MultipleManipulationObjects);
}

TEST(SglParse, ThroughClientUsesPromptTemplate) {
  struct Capture : AdjudicatorClient {
    AdjudicationRequest last;
    std::string reply;
    std::string adjudicate(const AdjudicationRequest& r) override {
      last = r;
      return reply;
    }
  } client;
  client.reply = std::string("\n") + kPromptScene + "\n";
  const auto objs = parse_scene("Put the small geometry into the box", "scene.png", client);
  EXPECT_EQ(objs.size(), 3u);
  EXPECT_EQ(client.last.image_ref, "scene.png");
  EXPECT_NE(client.last.prompt.find("The user's instruction is: \"Put the small geometry into the box\""),
            std::string::npos);
  EXPECT_EQ(client.last.prompt.find("{instruction}"), std::string::npos);
  client.reply = std::string("Here you go: ") + kPromptScene;
  EXPECT_ERRC(parse_scene("x", "s.png", client), Errc::ExtraneousText);
}

TEST(SglAmbiguity, SharedCategories) {
  const auto objs = parse_scene_json(kPromptScene);
  const auto r = detect_ambiguity(objs, 1);
  EXPECT_EQ(r.competing, (std::vector<int>{2, 3}));
  EXPECT_EQ(r.shared_categories, (std::vector<std::string>{"geometry", "rectangular shape"}));
  EXPECT_ERRC(detect_ambiguity(objs, 9), Errc::UnknownTarget);

  const std::vector<SceneObject> pair{obj(1, ObjectType::manipulation, "cube", {"cube", "geometry"}, "red"),
                                      obj(2, ObjectType::other, "pyramid", {"pyramid", "geometry"}, "blue")};
  const auto p = detect_ambiguity(pair, 1);
  EXPECT_EQ(p.competing, (std::vector<int>{2}));
  EXPECT_EQ(p.shared_categories, (std::vector<std::string>{"geometry"}));

  const std::vector<SceneObject> lone{obj(1, ObjectType::manipulation, "cube", {"cube"}, "red")};
  EXPECT_FALSE(detect_ambiguity(lone, 1).ambiguous());
  const std::vector<SceneObject> distinct{obj(1, ObjectType::manipulation, "cube", {"cube"}, "red"),
                                          obj(2, ObjectType::other, "ball", {"ball"}, "red")};
  EXPECT_TRUE(detect_ambiguity(distinct, 1).competing.empty());
}

TEST(SglSelect, PriorityWalk) {
  const auto objs = parse_scene_json(kPromptScene);
  EXPECT_EQ(select_discriminating_attributes(objs, detect_ambiguity(objs, 1)),
            (std::vector<AttributeChoice>{{Attribute::color, "red"}}));

  const std::vector<SceneObject> two_cubes{
      obj(1, ObjectType::manipulation, "cube", {"cube"}, "red", SizeClass::small),
      obj(2, ObjectType::other, "cube", {"cube"}, "red", SizeClass::big)};
  EXPECT_EQ(select_discriminating_attributes(two_cubes, detect_ambiguity(two_cubes, 1)),
            (std::vector<AttributeChoice>{{Attribute::size, "small"}}));

  const std::vector<SceneObject> twins{obj(1, ObjectType::manipulation, "cube", {"cube"}, "red"),
                                       obj(2, ObjectType::other, "cube", {"cube"}, "red")};
  EXPECT_ERRC(select_discriminating_attributes(twins, detect_ambiguity(twins, 1)), Errc::Indistinguishable);

  const std::vector<SceneObject> three{
      obj(1, ObjectType::manipulation, "cube", {"cube"}, "red", SizeClass::normal, PositionClass::left),
      obj(2, ObjectType::other, "cube", {"cube"}, "red", SizeClass::normal, PositionClass::right),
      obj(3, ObjectType::other, "cube", {"cube"}, "green", SizeClass::normal, PositionClass::left)};
  EXPECT_EQ(select_discriminating_attributes(three, detect_ambiguity(three, 1)),
            (std::vector<AttributeChoice>{{Attribute::color, "red"}, {Attribute::position, "left"}}));
  EXPECT_TRUE(select_discriminating_attributes(three, AmbiguityReport{1, {}, {}}).empty());
}

TEST(SglSelect, PropertiesOnRandomScenes) {
  std::mt19937_64 rng(5);
  const std::vector<std::string> colors{"red", "blue", "purple blue"};
  std::size_t checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<SceneObject> objs;
    const int n = 1 + int(rng() % 5);
    for (int i = 0; i < n; ++i) {
      objs.push_back(obj(i + 1, i == 0 ? ObjectType::manipulation : ObjectType::other, "thing",
                         {rng() % 2 ? "geometry" : "toy"}, colors[rng() % colors.size()],
                         SizeClass(rng() % 3), PositionClass(rng() % 6), StateClass(rng() % 2)));
    }
    const auto report = detect_ambiguity(objs, 1);
    std::vector<AttributeChoice> chosen;
    try {
      chosen = select_discriminating_attributes(objs, report);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), Errc::Indistinguishable);
      std::vector<AttributeChoice> all;
      for (Attribute a : {Attribute::color, Attribute::state, Attribute::size, Attribute::position}) {
        all.push_back({a, value_of(objs[0], a)});
      }
      EXPECT_GT(survivors(objs, report, all), 0u);
      continue;
    }
    ++checked;
    // sorted in priority order, no repeats
    for (std::size_t i = 1; i < chosen.size(); ++i) EXPECT_LT(int(chosen[i - 1].attribute), int(chosen[i].attribute));
    // separates the target
    EXPECT_EQ(survivors(objs, report, chosen), 0u);
    // minimal: dropping the last attribute leaves a competitor
    if (!chosen.empty()) {
      auto fewer = chosen;
      fewer.pop_back();
      EXPECT_GE(survivors(objs, report, fewer), 1u);
    }
    // deterministic
    EXPECT_EQ(select_discriminating_attributes(objs, report), chosen);
    // shuffling scene order changes nothing
    auto shuffled = objs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(select_discriminating_attributes(shuffled, detect_ambiguity(shuffled, 1)), chosen);
  }
  EXPECT_GT(checked, 500u);
}

TEST(SglRefine, Rendering) {
  const ActionEntry pick = default_lexicon().resolve("pick up the cube");
  const auto cube = obj(1, ObjectType::manipulation, "cube", {"cube"}, "red");
  EXPECT_EQ(refine_instruction(pick, cube, {}), "pick up the cube");
  // attribute list order does not matter; priority decides placement
  EXPECT_EQ(refine_instruction(pick, cube, {{Attribute::position, "left"}, {Attribute::color, "red"}}),
            "pick up the left red cube");
  EXPECT_EQ(refine_instruction(pick, cube, {{Attribute::color, "red"}, {Attribute::position, "left"}}),
            "pick up the left red cube");
  EXPECT_EQ(refine_instruction(pick, cube, {{Attribute::color, "purple blue"}}), "pick up the purple blue cube");
  const auto box = obj(2, ObjectType::receiver, "box", {"box"}, "yellow");
  EXPECT_EQ(refine_instruction(default_lexicon().resolve("put it"), cube, {{Attribute::color, "red"}},
                               ReceiverPhrase{&box, {{Attribute::color, "yellow"}}}),
            "put the red cube into the yellow box");
}

TEST(SglRefine, PromptSceneEndToEnd) {
  const auto objs = parse_scene_json(kPromptScene);
  const SglResult r = ground_instruction("Put the small geometry into the box", objs);
  EXPECT_EQ(r.refined, "put the red cube into the yellow box");
  EXPECT_EQ(r.receiver_report->competing, (std::vector<int>{1}));
  const std::string trace = sgl_trace_json(r);
  EXPECT_NE(trace.find("\"refined\": \"put the red cube into the yellow box\""), std::string::npos);
  EXPECT_EQ(sgl_trace_json(ground_instruction("Put the small geometry into the box", objs)), trace);
}

TEST(SglRefine, IdempotentOnRefinedInstruction) {
  const std::vector<SceneObject> scene{
      obj(1, ObjectType::manipulation, "cube", {"cube", "geometry"}, "red", SizeClass::small),
      obj(2, ObjectType::receiver, "cube", {"cube"}, "red", SizeClass::big),
      obj(3, ObjectType::other, "pyramid", {"pyramid", "geometry"}, "blue")};
  const SglResult once = ground_instruction("stack the cube", scene);
  const SglResult twice = ground_instruction(once.refined, scene);
  EXPECT_EQ(twice.target_attributes, once.target_attributes);
  EXPECT_EQ(twice.receiver_attributes, once.receiver_attributes);
}

TEST(SglLexicon, ResolveAndShippedFile) {
  const Lexicon& lex = default_lexicon();
  EXPECT_EQ(lex.resolve("Stack the cube").preposition, "on");
  EXPECT_EQ(lex.resolve("insert the peg").preposition, "into");
  EXPECT_EQ(lex.resolve("pick up the cube").phrase, "pick up");
  EXPECT_EQ(lex.resolve("pickle the cube").verb, "pickle");  // word boundary
  const ActionEntry push = lex.resolve("push the cube");
  EXPECT_EQ(push.phrase, "push");
  EXPECT_EQ(push.preposition, "to");

  std::ifstream in(BIASFORGE_DATA_DIR "/sgl_lexicon.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const Lexicon shipped = parse_lexicon(text);
  EXPECT_EQ(shipped.actions, lex.actions);
  EXPECT_EQ(shipped.fallback_preposition, lex.fallback_preposition);
  EXPECT_EQ(parse_lexicon(serialize_lexicon(lex)).actions, lex.actions);
  EXPECT_ERRC(parse_lexicon(R"({"format":"biasforge/lexicon/v2","actions":[]})"), Errc::UnsupportedFormat);
}
