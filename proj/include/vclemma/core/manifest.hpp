#ifndef VCLEMMA_CORE_MANIFEST_HPP_
#define VCLEMMA_CORE_MANIFEST_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "vclemma/core/types.hpp"

namespace vclemma {

// On-disk description of one verification task. The manifest stores paths;
// loading resolves them (relative to the manifest's directory) and inlines
// the file contents into the returned VerificationTask.
//
// Schema "vclemma.task", version 1:
// {
//   "schema": "vclemma.task", "version": 1,
//   "task_id": "...", "property_name": "...",
//   "property_file": "rel/or/abs/path.c", "property_line": 14,
//   "source_file": "rel/or/abs/path.c", "goal_file": "rel/or/abs/goal.v",
//   "property_type": "loop",            // optional
//   "suite": "..."                      // optional
// }
struct TaskManifest {
  std::string task_id;
  std::string property_name;
  std::string property_file;
  int property_line = 1;
  std::string source_file;
  std::string goal_file;
  std::optional<std::string> property_type;
  std::optional<std::string> suite;
};

TaskManifest load_task_manifest(const std::filesystem::path& path);
void save_task_manifest(const TaskManifest& m, const std::filesystem::path& path);

// Loads the manifest and reads the referenced source and goal files.
VerificationTask load_task(const std::filesystem::path& manifest_path);

// Whole-file helpers.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace vclemma

#endif  // VCLEMMA_CORE_MANIFEST_HPP_
