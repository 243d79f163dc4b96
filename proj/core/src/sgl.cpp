#include "biasforge/sgl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "biasforge/assets.hpp"
#include "biasforge/error.hpp"
#include "json_util.hpp"

namespace biasforge {

using detail::json;
using detail::ordered_json;

namespace {

constexpr std::string_view kLexiconFormat = "biasforge/lexicon/v1";
constexpr Attribute kPriority[] = {Attribute::color, Attribute::state, Attribute::size,
                                   Attribute::position};

template <typename E, std::size_t N>
E enum_from(const json& obj, const char* key, const E (&all)[N], std::string_view (*name)(E),
            const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw Error(Errc::SchemaViolation, path + "." + key + ": expected a string");
  const std::string s = v.get<std::string>();
  for (E e : all) {
    if (name(e) == s) return e;
  }
  throw Error(Errc::SchemaViolation, path + "." + key + ": '" + s + "' is not an allowed value");
}

std::string string_field(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw Error(Errc::SchemaViolation, path + "." + key + ": expected a non-empty string");
  }
  return v.get<std::string>();
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

const SceneObject* by_id(const std::vector<SceneObject>& objects, int id) {
  for (const SceneObject& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string render_attribute(const AttributeChoice& c, bool comparative) {
  if (comparative && c.attribute == Attribute::size) {
    if (c.value == "big") return "larger";
    if (c.value == "small") return "smaller";
  }
  return c.value;
}

std::string noun_phrase(const SceneObject& o, const std::vector<AttributeChoice>& attrs,
                        bool comparative) {
  std::vector<AttributeChoice> sorted = attrs;
  std::stable_sort(sorted.begin(), sorted.end(), [](const AttributeChoice& a, const AttributeChoice& b) {
    return static_cast<int>(a.attribute) > static_cast<int>(b.attribute);
  });
  std::string out = "the";
  for (const AttributeChoice& c : sorted) out += " " + render_attribute(c, comparative);
  return out + " " + o.name;
}

ordered_json report_to_json(const AmbiguityReport& r) {
  ordered_json j;
  j["target"] = r.target;
  j["competing"] = r.competing;
  j["shared_categories"] = r.shared_categories;
  return j;
}

ordered_json attributes_to_json(const std::vector<AttributeChoice>& attrs) {
  ordered_json arr = ordered_json::array();
  for (const AttributeChoice& c : attrs) {
    arr.push_back({{"attribute", attribute_name(c.attribute)}, {"value", c.value}});
  }
  return arr;
}

}  // namespace

std::string_view object_type_name(ObjectType t) {
  switch (t) {
    case ObjectType::manipulation: return "manipulation object";
    case ObjectType::receiver: return "receiver object";
    case ObjectType::other: return "other object";
  }
  return "";
}

std::string_view size_name(SizeClass s) {
  switch (s) {
    case SizeClass::small: return "small";
    case SizeClass::normal: return "normal";
    case SizeClass::big: return "big";
  }
  return "";
}

std::string_view position_name(PositionClass p) {
  switch (p) {
    case PositionClass::left: return "left";
    case PositionClass::right: return "right";
    case PositionClass::top: return "top";
    case PositionClass::bottom: return "bottom";
    case PositionClass::middle: return "middle";
    case PositionClass::normal: return "normal";
  }
  return "";
}

std::string_view state_name(StateClass s) { return s == StateClass::solid ? "solid" : "hollow"; }

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::color: return "color";
    case Attribute::state: return "state";
    case Attribute::size: return "size";
    case Attribute::position: return "position";
  }
  return "";
}

std::vector<SceneObject> parse_scene_json(std::string_view json_text) {
  json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::MalformedJson, "scene is not valid JSON");
  if (!doc.is_array()) throw Error(Errc::SchemaViolation, "scene must be a JSON list of objects");

  static const std::set<std::string> kKeys = {"ID",    "object_type", "name", "category",
                                              "color", "size",        "position", "state"};
  static constexpr ObjectType kTypes[] = {ObjectType::manipulation, ObjectType::receiver,
                                          ObjectType::other};
  static constexpr SizeClass kSizes[] = {SizeClass::small, SizeClass::normal, SizeClass::big};
  static constexpr PositionClass kPositions[] = {PositionClass::left,   PositionClass::right,
                                                 PositionClass::top,    PositionClass::bottom,
                                                 PositionClass::middle, PositionClass::normal};
  static constexpr StateClass kStates[] = {StateClass::solid, StateClass::hollow};

  std::vector<SceneObject> out;
  std::set<int> ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "$[" + std::to_string(i) + "]";
    const json& o = doc[i];
    if (!o.is_object()) throw Error(Errc::SchemaViolation, path + ": expected an object");
    for (const auto& [key, _] : o.items()) {
      if (!kKeys.contains(key)) throw Error(Errc::SchemaViolation, path + ": unknown key '" + key + "'");
    }
    for (const std::string& key : kKeys) {
      if (!o.contains(key)) throw Error(Errc::SchemaViolation, path + ": missing key '" + key + "'");
    }
    SceneObject s;
    const json& id = o.at("ID");
    if (!id.is_number_integer()) throw Error(Errc::SchemaViolation, path + ".ID: expected an integer");
    s.id = id.get<int>();
    if (!ids.insert(s.id).second) {
      throw Error(Errc::SchemaViolation, path + ".ID: duplicate id " + std::to_string(s.id));
    }
    s.object_type = enum_from(o, "object_type", kTypes, &object_type_name, path);
    s.name = string_field(o, "name", path);
    s.color = string_field(o, "color", path);
    const json& cats = o.at("category");
    if (!cats.is_array()) throw Error(Errc::SchemaViolation, path + ".category: expected a list");
    for (const json& c : cats) {
      if (!c.is_string()) throw Error(Errc::SchemaViolation, path + ".category: expected strings");
      s.category.push_back(c.get<std::string>());
    }
    s.size = enum_from(o, "size", kSizes, &size_name, path);
    s.position = enum_from(o, "position", kPositions, &position_name, path);
    s.state = enum_from(o, "state", kStates, &state_name, path);
    out.push_back(std::move(s));
  }

  const auto count = [&](ObjectType t) {
    return std::count_if(out.begin(), out.end(), [t](const SceneObject& s) { return s.object_type == t; });
  };
  const auto manip = count(ObjectType::manipulation);
  if (manip == 0) throw Error(Errc::NoManipulationObject, "scene has no manipulation object");
  if (manip > 1) throw Error(Errc::MultipleManipulationObjects, "scene has more than one manipulation object");
  if (count(ObjectType::receiver) > 1) {
    throw Error(Errc::SchemaViolation, "scene has more than one receiver object");
  }
  return out;
}

std::string serialize_scene(const std::vector<SceneObject>& objects) {
  ordered_json arr = ordered_json::array();
  for (const SceneObject& s : objects) {
    ordered_json o;
    o["ID"] = s.id;
    o["object_type"] = object_type_name(s.object_type);
    o["name"] = s.name;
    o["category"] = s.category;
    o["state"] = state_name(s.state);
    o["color"] = s.color;
    o["size"] = size_name(s.size);
    o["position"] = position_name(s.position);
    arr.push_back(std::move(o));
  }
  return arr.dump(4) + "\n";
}

std::vector<SceneObject> parse_scene(std::string_view instruction, const std::string& image_ref,
                                     AdjudicatorClient& client) {
  AdjudicationRequest req;
  req.instance_id = image_ref;
  req.image_ref = image_ref;
  req.prompt = render_scene_parse_prompt(instruction);
  const std::string raw = client.adjudicate(req);
  std::string_view body = raw;
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
  if (!body.empty() && (body.front() != '[' || body.back() != ']') &&
      body.find('[') != std::string_view::npos) {
    throw Error(Errc::ExtraneousText, "scene parser reply has text outside the JSON list");
  }
  return parse_scene_json(body);
}

const SceneObject& manipulation_object(const std::vector<SceneObject>& objects) {
  for (const SceneObject& o : objects) {
    if (o.object_type == ObjectType::manipulation) return o;
  }
  throw Error(Errc::NoManipulationObject, "scene has no manipulation object");
}

const SceneObject* receiver_object(const std::vector<SceneObject>& objects) {
  for (const SceneObject& o : objects) {
    if (o.object_type == ObjectType::receiver) return &o;
  }
  return nullptr;
}

AmbiguityReport detect_ambiguity(const std::vector<SceneObject>& objects, int target_id) {
  const SceneObject* target = by_id(objects, target_id);
  if (target == nullptr) throw Error(Errc::UnknownTarget, "no object with id " + std::to_string(target_id));
  AmbiguityReport r;
  r.target = target_id;
  std::set<std::string> shared;
  for (const SceneObject& o : objects) {
    if (o.id == target_id) continue;
    bool competes = false;
    for (const std::string& c : target->category) {
      if (std::find(o.category.begin(), o.category.end(), c) != o.category.end()) {
        shared.insert(c);
        competes = true;
      }
    }
    if (competes) r.competing.push_back(o.id);
  }
  for (const std::string& c : target->category) {
    if (shared.contains(c) &&
        std::find(r.shared_categories.begin(), r.shared_categories.end(), c) == r.shared_categories.end()) {
      r.shared_categories.push_back(c);
    }
  }
  return r;
}

std::vector<AttributeChoice> select_discriminating_attributes(const std::vector<SceneObject>& objects,
                                                              const AmbiguityReport& report) {
  const SceneObject* target = by_id(objects, report.target);
  if (target == nullptr) throw Error(Errc::UnknownTarget, "no object with id " + std::to_string(report.target));
  std::vector<const SceneObject*> remaining;
  for (int id : report.competing) {
    const SceneObject* o = by_id(objects, id);
    if (o == nullptr) throw Error(Errc::UnknownTarget, "no object with id " + std::to_string(id));
    remaining.push_back(o);
  }

  std::vector<AttributeChoice> out;
  for (Attribute a : kPriority) {
    if (remaining.empty()) break;
    const std::string mine = value_of(*target, a);
    const auto same = [&](const SceneObject* o) { return value_of(*o, a) == mine; };
    const auto kept = std::stable_partition(remaining.begin(), remaining.end(), same);
    if (kept == remaining.end()) continue;  // tie with every remaining competitor
    remaining.erase(kept, remaining.end());
    out.push_back({a, mine});
  }
  if (!remaining.empty()) {
    std::string ids;
    for (const SceneObject* o : remaining) ids += (ids.empty() ? "" : ", ") + std::to_string(o->id);
    throw Error(Errc::Indistinguishable, "object " + std::to_string(report.target) +
                                             " cannot be told apart from " + ids);
  }
  return out;
}

ActionEntry Lexicon::resolve(std::string_view instruction) const {
  const std::string text = lower(instruction);
  const ActionEntry* best = nullptr;
  for (const ActionEntry& e : actions) {
    const bool prefix = text.rfind(e.verb, 0) == 0;
    const bool boundary = text.size() == e.verb.size() ||
                          std::isspace(static_cast<unsigned char>(text[e.verb.size()]));
    if (prefix && boundary && (best == nullptr || e.verb.size() > best->verb.size())) best = &e;
  }
  if (best != nullptr) return *best;
  const std::size_t space = text.find_first_of(" \t");
  const std::string verb = text.substr(0, space);
  return {verb, verb, fallback_preposition};
}

const Lexicon& default_lexicon() {
  static const Lexicon kLexicon{{
                                    {"stack", "put", "on"},
                                    {"place", "put", "on"},
                                    {"put", "put", "into"},
                                    {"insert", "put", "into"},
                                    {"pick up", "pick up", "from"},
                                    {"pick", "pick up", "from"},
                                },
                                "to"};
  return kLexicon;
}

Lexicon parse_lexicon(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "lexicon");
  detail::check_format(doc, kLexiconFormat, "$");
  Lexicon lex;
  if (doc.contains("fallback_preposition")) {
    lex.fallback_preposition = detail::require_string(doc, "fallback_preposition", "$");
  }
  const json& list = detail::require(doc, "actions", "$");
  if (!list.is_array()) throw Error(Errc::SchemaError, "$.actions: expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "$.actions[" + std::to_string(i) + "]";
    ActionEntry e{lower(detail::require_string(list[i], "verb", path)),
                  detail::require_string(list[i], "phrase", path),
                  detail::require_string(list[i], "preposition", path)};
    if (e.verb.empty()) throw Error(Errc::SchemaError, path + ".verb: must not be empty");
    lex.actions.push_back(std::move(e));
  }
  return lex;
}

std::string serialize_lexicon(const Lexicon& lexicon) {
  ordered_json doc;
  doc["format"] = kLexiconFormat;
  doc["fallback_preposition"] = lexicon.fallback_preposition;
  ordered_json arr = ordered_json::array();
  for (const ActionEntry& e : lexicon.actions) {
    arr.push_back({{"verb", e.verb}, {"phrase", e.phrase}, {"preposition", e.preposition}});
  }
  doc["actions"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string refine_instruction(const ActionEntry& action, const SceneObject& target,
                               const std::vector<AttributeChoice>& attributes,
                               const std::optional<ReceiverPhrase>& receiver) {
  std::string out = action.phrase + " " + noun_phrase(target, attributes, false);
  if (receiver && receiver->object != nullptr) {
    out += " " + action.preposition + " " + noun_phrase(*receiver->object, receiver->attributes, true);
  }
  return out;
}

SglResult ground_instruction(std::string_view instruction, const std::vector<SceneObject>& objects,
                             const Lexicon& lexicon) {
  SglResult r;
  r.original = std::string(instruction);
  r.action = lexicon.resolve(instruction);
  const SceneObject& target = manipulation_object(objects);
  r.target_report = detect_ambiguity(objects, target.id);
  r.target_attributes = select_discriminating_attributes(objects, r.target_report);
  std::optional<ReceiverPhrase> phrase;
  if (const SceneObject* recv = receiver_object(objects)) {
    r.receiver_report = detect_ambiguity(objects, recv->id);
    r.receiver_attributes = select_discriminating_attributes(objects, *r.receiver_report);
    phrase = ReceiverPhrase{recv, r.receiver_attributes};
  }
  r.refined = refine_instruction(r.action, target, r.target_attributes, phrase);
  return r;
}

std::string sgl_trace_json(const SglResult& r) {
  ordered_json doc;
  doc["original"] = r.original;
  doc["action"] = {{"verb", r.action.verb}, {"phrase", r.action.phrase},
                   {"preposition", r.action.preposition}};
  doc["target"] = report_to_json(r.target_report);
  doc["target_attributes"] = attributes_to_json(r.target_attributes);
  if (r.receiver_report) {
    doc["receiver"] = report_to_json(*r.receiver_report);
    doc["receiver_attributes"] = attributes_to_json(r.receiver_attributes);
  } else {
    doc["receiver"] = nullptr;
    doc["receiver_attributes"] = ordered_json::array();
  }
  doc["refined"] = r.refined;
  return doc.dump(2) + "\n";
}

}  // namespace biasforge
