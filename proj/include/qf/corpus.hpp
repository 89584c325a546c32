#pragma once

#include <cstdint>
#include <vector>

#include "qf/domain.hpp"
#include "qf/grid.hpp"

namespace qf {

// sums of 1-5 Gaussians, widths log-uniform in [0.2, 2], centres in the inner half box, amplitudes +-[0.5, 1.5]
std::vector<RealField> gaussian_corpus(const GridSpec& g, std::size_t count, std::uint64_t seed);

// Gaussians inside an interval or square domain times the vanishing factor ((x-lo)(hi-x)/((hi-lo)/2)^2)^4 per axis
std::vector<RealField> boundary_vanishing_corpus(const GridSpec& g, const DomainSpec& omega, std::size_t count,
                                                 std::uint64_t seed);

} // namespace qf
