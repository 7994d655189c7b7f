#pragma once

#include "ahc/core.hpp"

#include <string>
#include <vector>

namespace ahc {

// Dataset CSV: item_id,text,gold_p1,...,gold_pn with gold values in {0,1}.
// Text fields follow standard CSV quoting.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& data, const std::string& path);

// Decisions CSV: item_id,verdict,source with verdict in {in,out} and source in
// {hybrid,ml_fallback}.
void save_decisions_csv(const std::vector<Decision>& decisions, const std::string& path);
std::vector<Decision> load_decisions_csv(const std::string& path);

}  // namespace ahc
