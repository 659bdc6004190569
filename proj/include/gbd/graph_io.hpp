#pragma once

#include <filesystem>
#include <iosfwd>

#include "gbd/dataset.hpp"

namespace gbd {

// Dataset text format:
//
//   G <count>
//   g <n_nodes> <n_edges> <label>     (once per graph)
//   <u> <v>                           (n_edges lines, 0 <= u < v < n_nodes)
//
// Tokens are whitespace separated; '#' starts a comment running to end of line.

/// Throws FormatError on malformed input. num_classes becomes
/// max(2, largest label + 1).
LabeledDataset read_dataset(std::istream& in);
LabeledDataset read_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const LabeledDataset& dataset);
void write_dataset(const std::filesystem::path& path, const LabeledDataset& dataset);

}  // namespace gbd
