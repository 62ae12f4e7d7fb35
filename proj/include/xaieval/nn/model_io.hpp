#pragma once

#include <filesystem>
#include <iosfwd>

#include "xaieval/nn/network.hpp"

namespace xaieval::nn {

// Current model file format version. Layout is documented in docs/formats.md.
inline constexpr int kModelFormatVersion = 1;

void save_model(const DenseNetwork& net, const std::filesystem::path& path);
DenseNetwork load_model(const std::filesystem::path& path);

void write_model(const DenseNetwork& net, std::ostream& out);
// Throws DecodeError on malformed or truncated input and on a version other
// than kModelFormatVersion. Never returns a partially read model.
DenseNetwork read_model(std::istream& in);

}  // namespace xaieval::nn
