#pragma once

#include <filesystem>
#include <iosfwd>

#include "demandcast/estimation.hpp"

namespace demandcast {

inline constexpr int kModelFormatVersion = 1;

/// Plain-text key=value model file. Coefficients are written as hexadecimal
/// floats so a reload reproduces them bit for bit.
void write_model(std::ostream& out, const SarimaFit& fit);
void write_model_file(const std::filesystem::path& path, const SarimaFit& fit);

/// Reads the format written by write_model. Coefficient values may be hex or
/// decimal. Residuals and fitted values are not stored and come back empty.
SarimaFit read_model(std::istream& in);
SarimaFit read_model_file(const std::filesystem::path& path);

}  // namespace demandcast
