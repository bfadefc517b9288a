#pragma once

#include <string>

#include "mdcrbm/rbm.hpp"
#include "mdcrbm/schema.hpp"

namespace mdcrbm {

// A trained model bundles the fitted schema with the parameters so every
// downstream command can encode/decode from the model file alone.
struct Model {
    Schema schema;
    NormStats norm;
    RbmParams params;
};

// Flat little-endian file: 8-byte magic, u32 format version, u64 schema-text
// length, schema text (norm embedded), u32 J, u32 K, then row-major f64 W
// followed by b and c.
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace mdcrbm
