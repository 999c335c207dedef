#pragma once

namespace srmr {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "srmr-report/1";

}  // namespace srmr
