#pragma once

#include "dexgrasp/model/loader.hpp"

#include <filesystem>
#include <string>

namespace dexgrasp::testing {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(DEXGRASP_FIXTURES) / rel;
}

inline model::GripperModel load_hand(const std::string& name) {
  return model::load_gripper_file(fixture("grippers/" + name + ".json"));
}

}  // namespace dexgrasp::testing
