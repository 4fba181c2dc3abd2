#pragma once

#include <string_view>

// Data files from data/ compiled into the library.
namespace sia::embedded {

std::string_view reference_face_json();
std::string_view expression_templates_json();

}  // namespace sia::embedded
