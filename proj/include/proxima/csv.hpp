#pragma once

#include <string>

#include "proxima/types.hpp"

namespace proxima {

// Fitting CSV: UTF-8, comma separated, header "x1,...,xD,y".
// Validation CSV: header "x1,...,xD,y[,a][,base]"; the base column holds 0/1
// flags with exactly one 1, and the flagged row becomes the base point.
FittingSet read_fitting_csv(const std::string& path);
ValidationSet read_validation_csv(const std::string& path);

void write_fitting_csv(const FittingSet& set, const std::string& path);
void write_validation_csv(const ValidationSet& set, const std::string& path);

}  // namespace proxima
