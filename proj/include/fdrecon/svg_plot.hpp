#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fdrecon/reconstruct.hpp"

namespace fdrecon {

// Self-contained static SVG: every curve's observed segments in gray, filled
// reconstruction segments in red, and (when supplied) the true curves of the
// reconstructed indices in blue. No timestamps or other run-varying content,
// so identical inputs give byte-identical files.

void write_plot_svg(std::ostream& out, const FunctionalSample& sample,
                    const std::vector<ReconstructionResult>& reconstructions,
                    const FunctionalSample* truth = nullptr);

void write_plot_svg_file(const std::string& path, const FunctionalSample& sample,
                         const std::vector<ReconstructionResult>& reconstructions,
                         const FunctionalSample* truth = nullptr);

}  // namespace fdrecon
