#pragma once

#include <string>
#include <string_view>

namespace biasforge {

/// Screening prompt sent with every adjudication request.
std::string_view adjudication_prompt();

/// Scene-parsing prompt; contains an "{instruction}" slot.
std::string_view scene_parse_prompt();

std::string render_scene_parse_prompt(std::string_view instruction);

}  // namespace biasforge
