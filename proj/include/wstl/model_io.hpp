#pragma once

// Model files are JSON: a header with the format version, a body holding the
// preprocessing and training configuration, the label map and the node list
// (formulas in canonical text form), and a CRC-32 of the serialized body.

#include "wstl/tree.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wstl {

inline constexpr int kModelFormatVersion = 1;

struct StoredModel {
  TreeClassifier tree;
  std::vector<std::string> label_names; // label_names[c - 1] is the raw label of class c
};

/// The text written by save_model. The jobs setting is not stored, so the
/// output does not depend on how many threads trained the tree.
std::string serialize_model(const TreeClassifier& tree, std::span<const std::string> label_names);

/// Throws UnsupportedVersion for another format version and Integrity for
/// anything malformed (bad JSON, missing fields, checksum mismatch, a tree
/// that does not hang together).
StoredModel deserialize_model(std::string_view text);

/// Writes to a sibling temporary file and renames it into place.
void save_model(const std::filesystem::path& path, const TreeClassifier& tree,
                std::span<const std::string> label_names);
StoredModel load_model(const std::filesystem::path& path);

} // namespace wstl
