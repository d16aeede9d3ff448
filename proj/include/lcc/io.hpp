#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lcc/codegen.hpp"
#include "lcc/core.hpp"

namespace lcc::io {

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double v);

/// CSV, one matrix row per line, comma separated.
std::string matrix_to_csv(const DenseMatrix& m);
DenseMatrix matrix_from_csv(std::string_view text);

/// {"n":N, "k":K, "s_terms":[S_1,...], "steps":[[[[col,sign,exp] | null, ...] per row] per step]}
std::string decomposition_to_json(const Decomposition& d);
Decomposition decomposition_from_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace lcc::io
