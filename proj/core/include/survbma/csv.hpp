#pragma once

#include <string>

#include "survbma/families.hpp"

namespace survbma {

/// Reads a dataset from a UTF-8 CSV with header exactly `time,event,group`:
/// positive decimal days, event in {0,1}, group in {0,1}. Errors carry the
/// 1-based data-row number.
SurvivalData ingest_csv(const std::string& path);

/// Writes the same format; round-trips through ingest_csv.
void write_csv(const SurvivalData& data, const std::string& path);

}  // namespace survbma
