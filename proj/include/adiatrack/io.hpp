#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "adiatrack/bounds.hpp"
#include "adiatrack/dp.hpp"
#include "adiatrack/learners.hpp"
#include "adiatrack/schedules.hpp"

namespace adiatrack::io {

using json = nlohmann::json;

/// Stamped into every JSON document the tools write.
inline constexpr const char* kSpecVersion = "1.0";

// Matrices are either {"n": 2, "rows": [[...], ...]} or a bare array of rows.
TransitionMatrix matrix_from_json(const json& j);
json to_json(const TransitionMatrix& p);
/// JSON when the first non-blank character is '{' or '[', otherwise CSV with
/// one row per line.
TransitionMatrix read_matrix(const std::filesystem::path& path);
TransitionMatrix parse_matrix_csv(const std::string& text);

/// Exponents accept the string "inf".
double exponent_from_json(const json& j);
json exponent_to_json(double gamma);

DriftParams drift_params_from_json(const json& j);
json to_json(const DriftParams& params);

Schedule schedule_from_json(const json& j);
json to_json(const Schedule& s);

RewardSpec reward_from_json(const json& j);
json to_json(const RewardSpec& spec);

LearningRate rate_from_json(const json& j);
json to_json(const LearningRate& rate);
NoiseModel noise_from_json(const json& j);
json to_json(const NoiseModel& noise);

json to_json(const CheckResult& c);
json to_json(const DriftReport& r);

Thm2Constants constants_from_json(const json& j);
json to_json(const Thm2Constants& c);
ExponentTriple exponents_from_json(const json& j);
json to_json(const ExponentTriple& e);
/// Includes "spec_version".
json to_json(const BoundReport& r);

/// Key-sorted, whitespace-free dump; doubles use the shortest round-trip form.
std::string canonical_dump(const json& j);
/// 64-bit FNV-1a of canonical_dump, as 16 lowercase hex digits.
std::string config_hash(const json& j);

/// Header plus one row per checkpoint, LF line endings, shortest round-trip numbers.
std::string trace_csv(const TrackingTrace& trace);
std::string trace_file_name(const std::string& hash, std::uint64_t seed);

json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace adiatrack::io
