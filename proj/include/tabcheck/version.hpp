#pragma once

namespace tabcheck {

inline constexpr const char* kEngineName = "tabcheck";
inline constexpr const char* kEngineVersion = "0.1.0";
/// Version of the JSON report layout (schema/report.schema.json).
inline constexpr const char* kReportSchemaVersion = "0.1.0";

}  // namespace tabcheck
