#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biasforge/fairness.hpp"

namespace biasforge {

enum class ObjectType { manipulation, receiver, other };
enum class SizeClass { small, normal, big };
enum class PositionClass { left, right, top, bottom, middle, normal };
enum class StateClass { solid, hollow };

std::string_view object_type_name(ObjectType t);  // "manipulation object", ...
std::string_view size_name(SizeClass s);
std::string_view position_name(PositionClass p);
std::string_view state_name(StateClass s);

/// One parsed object, field for field the scene-parsing schema.
struct SceneObject {
  int id = 0;
  ObjectType object_type = ObjectType::other;
  std::string name;
  std::vector<std::string> category;
  std::string color;  // verbatim, composites like "purple blue" kept whole
  SizeClass size = SizeClass::normal;
  PositionClass position = PositionClass::normal;
  StateClass state = StateClass::solid;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

/// Strict parse of a JSON list of objects. Unknown keys, missing keys and
/// out-of-enum values are SchemaViolation; ids must be unique, and there must
/// be exactly one manipulation object and at most one receiver.
std::vector<SceneObject> parse_scene_json(std::string_view json_text);
std::string serialize_scene(const std::vector<SceneObject>& objects);

/// Sends the scene-parsing prompt for `instruction` to `client` and parses
/// the reply with parse_scene_json.
std::vector<SceneObject> parse_scene(std::string_view instruction, const std::string& image_ref,
                                     AdjudicatorClient& client);

const SceneObject& manipulation_object(const std::vector<SceneObject>& objects);
const SceneObject* receiver_object(const std::vector<SceneObject>& objects);

struct AmbiguityReport {
  int target = 0;
  std::vector<int> competing;                  // scene order
  std::vector<std::string> shared_categories;  // target's category order

  bool ambiguous() const { return !competing.empty(); }
  friend bool operator==(const AmbiguityReport&, const AmbiguityReport&) = default;
};

/// Competitors are all other objects sharing at least one category with the
/// target, whatever their object_type. Throws UnknownTarget.
AmbiguityReport detect_ambiguity(const std::vector<SceneObject>& objects, int target_id);

/// Priority order, highest first.
enum class Attribute { color, state, size, position };

std::string_view attribute_name(Attribute a);

struct AttributeChoice {
  Attribute attribute = Attribute::color;
  std::string value;

  friend bool operator==(const AttributeChoice&, const AttributeChoice&) = default;
};

/// Walks color > state > size > position, keeping each attribute on which the
/// target differs from a remaining competitor and dropping the competitors it
/// separates. Result is in priority order. Throws Indistinguishable when
/// competitors survive all four.
std::vector<AttributeChoice> select_discriminating_attributes(const std::vector<SceneObject>& objects,
                                                              const AmbiguityReport& report);

struct ActionEntry {
  std::string verb;         // first word(s) of the instruction, lowercase
  std::string phrase;       // what the refined instruction starts with
  std::string preposition;  // joins the receiver phrase

  friend bool operator==(const ActionEntry&, const ActionEntry&) = default;
};

struct Lexicon {
  std::vector<ActionEntry> actions;
  std::string fallback_preposition = "to";

  /// Longest verb matching the start of `instruction` (case-insensitive, on
  /// word boundaries). An unknown verb maps to itself with the fallback
  /// preposition.
  ActionEntry resolve(std::string_view instruction) const;
};

/// stack/place -> put ... on, put/insert -> put ... into, pick (up) -> pick up ... from.
const Lexicon& default_lexicon();

/// {"format":"biasforge/lexicon/v1","fallback_preposition":"to",
///  "actions":[{"verb","phrase","preposition"}]}
Lexicon parse_lexicon(std::string_view json_text);
std::string serialize_lexicon(const Lexicon& lexicon);

struct ReceiverPhrase {
  const SceneObject* object = nullptr;
  std::vector<AttributeChoice> attributes;
};

/// "<phrase> the <attrs> <name>[ <preposition> the <attrs> <name>]".
/// Attributes render lowest priority first so color sits next to the noun
/// ("left red cube"); a receiver's size renders as a comparative ("larger").
std::string refine_instruction(const ActionEntry& action, const SceneObject& target,
                               const std::vector<AttributeChoice>& attributes,
                               const std::optional<ReceiverPhrase>& receiver = std::nullopt);

struct SglResult {
  std::string original;
  ActionEntry action;
  AmbiguityReport target_report;
  std::vector<AttributeChoice> target_attributes;
  std::optional<AmbiguityReport> receiver_report;
  std::vector<AttributeChoice> receiver_attributes;
  std::string refined;
};

/// detect -> select -> refine for the manipulation object and, if present,
/// the receiver.
SglResult ground_instruction(std::string_view instruction, const std::vector<SceneObject>& objects,
                             const Lexicon& lexicon = default_lexicon());

/// Machine-readable trace: reports, chosen attributes and the refined text.
std::string sgl_trace_json(const SglResult& result);

}  // namespace biasforge
