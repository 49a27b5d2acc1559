#include "vclemma/core/manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vclemma {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TaskManifest load_task_manifest(const fs::path& path) {
  json j = json::parse(read_file(path));
  if (j.value("schema", "") != "vclemma.task")
    throw std::runtime_error(path.string() + ": not a vclemma.task manifest");
  if (j.value("version", 0) != 1)
    throw std::runtime_error(path.string() + ": unsupported manifest version");

  TaskManifest m;
  m.task_id = j.at("task_id").get<std::string>();
  m.property_name = j.at("property_name").get<std::string>();
  m.property_file = j.at("property_file").get<std::string>();
  m.property_line = j.at("property_line").get<int>();
  m.source_file = j.at("source_file").get<std::string>();
  m.goal_file = j.at("goal_file").get<std::string>();
  if (j.contains("property_type"))
    m.property_type = j.at("property_type").get<std::string>();
  if (j.contains("suite")) m.suite = j.at("suite").get<std::string>();
  return m;
}

void save_task_manifest(const TaskManifest& m, const fs::path& path) {
  json j;
  j["schema"] = "vclemma.task";
  j["version"] = 1;
  j["task_id"] = m.task_id;
  j["property_name"] = m.property_name;
  j["property_file"] = m.property_file;
  j["property_line"] = m.property_line;
  j["source_file"] = m.source_file;
  j["goal_file"] = m.goal_file;
  if (m.property_type) j["property_type"] = *m.property_type;
  if (m.suite) j["suite"] = *m.suite;
  write_file(path, j.dump(2) + "\n");
}

VerificationTask load_task(const fs::path& manifest_path) {
  TaskManifest m = load_task_manifest(manifest_path);
  fs::path base = manifest_path.parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
  };

  VerificationTask task;
  task.task_id = m.task_id;
  task.property_name = m.property_name;
  task.property_location.file = m.property_file;
  task.property_location.line = m.property_line;
  task.annotated_source = read_file(resolve(m.source_file));
  task.goal_file = read_file(resolve(m.goal_file));
  return task;
}

}  // namespace vclemma
