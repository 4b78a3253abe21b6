#pragma once

#include <filesystem>
#include <string>

#include "latact/nn.hpp"

namespace latact {

// Writes content to path via a temp file and an atomic rename, so a partial
// file is never observed.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string serialize_model(const MlpModel& model);
MlpModel parse_model(const std::string& text);

// Line-oriented text format, reals printed with 17 significant digits so the
// round trip reproduces every parameter exactly. See README for the layout.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace latact
