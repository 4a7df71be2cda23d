#pragma once

#include "dexgrasp/model/gripper.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace dexgrasp::model {

/// Parses a gripper spec document. Mesh paths resolve against `base_dir`.
GripperSpec parse_gripper_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Loads and resolves a gripper from a JSON spec document.
GripperModel load_gripper(const std::string& text, const std::filesystem::path& base_dir);
GripperModel load_gripper_file(const std::filesystem::path& path);

}  // namespace dexgrasp::model
