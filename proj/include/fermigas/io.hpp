#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "fermigas/fermi_surface.hpp"
#include "fermigas/scattering.hpp"

namespace fermigas {

inline constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& data);

// Comment header carried by every artifact: version, config hash, seed, and
// the labels of the emitted quantities. No timestamps unless asked for.
std::string provenance_header(const std::string& kind, const std::string& config,
                              std::uint64_t seed, const std::vector<std::string>& labels);

std::string format_g17(double v);

void write_scattering_csv(std::ostream& os, const ScatteringSolution& sol,
                          const std::string& config, std::uint64_t seed);

void write_momenta_csv(std::ostream& os, const MomentumSet& ms, const std::string& config,
                       std::uint64_t seed);

std::string polyhedron_to_json(const FermiPolyhedron& poly);
FermiPolyhedron polyhedron_from_json(const std::string& text);

RadialPotential potential_from_json(const std::string& text);

}  // namespace fermigas
