// Instance and schedule documents: self-describing JSON, UTF-8, decimal
// numbers. Jobs, machines and periods are 1-based in the files.
#pragma once

#include <string>

#include <json.hpp>

#include "cafs/core.hpp"

namespace cafs {

nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

// Loads and validates; optional `warnings` receives non-fatal findings.
Instance load_instance(const std::string& path, std::vector<std::string>* warnings = nullptr);

// Writes a document that load_instance reads back bit-for-bit in every
// numeric field. Throws std::runtime_error on I/O failure.
void save_instance(const Instance& instance, const std::string& path);

nlohmann::json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const nlohmann::json& doc);

// Tolerates a leading `key=value` provenance line before the JSON body.
Schedule load_schedule(const std::string& path);
void save_schedule(const Schedule& schedule, const std::string& path,
                   const std::string& provenance_header = "");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cafs
