#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "cavity/assembly.hpp"
#include "cavity/config.hpp"
#include "cavity/mesh.hpp"
#include "cavity/modes.hpp"

namespace cavity {

/// Build the mesh requested by the config (generator or file).
TetMesh build_geometry(const RunConfig& config);

/// Assemble the full system for a config (mesh -> edges -> Y -> matrices).
AssembledSystem assemble_from_config(const RunConfig& config, const TetMesh& mesh);

/// Resolve the configured reference spectrum, if any.
std::optional<ReferenceSpectrum> resolve_reference(const RunConfig& config);

/**
 * Run the full pipeline: generate/load mesh, assemble, solve with each
 * configured method, classify, compare against the reference, and write
 * reports (CSV per method plus a `summary` key-value file) into
 * config.output.dir. Returns 0 iff every requested comparison passed
 * and no solver failed; diagnostics go to `diag`.
 */
int run(const RunConfig& config, std::ostream& diag);

}  // namespace cavity
