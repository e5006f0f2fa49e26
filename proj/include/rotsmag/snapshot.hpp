#pragma once

#include <filesystem>
#include <string>

#include "rotsmag/fields.hpp"

namespace rotsmag {

/// Field snapshots: one file per component, named <stem>.<tag>.bin. Each
/// file starts with a single text line
///   rotsmag-field dims=D cells=N0,N1,N2 spacing=H0,H1,H2 component=TAG shape=S0,S1,S2
/// followed by S0*S1*S2 little-endian float64 values, first index fastest.
void write_snapshot(const VectorField& u, const std::filesystem::path& stem);
void write_snapshot(const ScalarField& f, const std::filesystem::path& stem);

/// Read a snapshot written for a grid with the same dims, cells and
/// spacing. Throws ArgumentError on any header mismatch or short file.
VectorField read_vector_snapshot(const Grid& grid, const std::filesystem::path& stem);
ScalarField read_scalar_snapshot(const Grid& grid, const std::filesystem::path& stem);

/// Component tags used in file names: u0, u1, u2 and q.
std::string component_tag(bool vector, int c);

}  // namespace rotsmag
