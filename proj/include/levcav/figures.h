#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "levcav/csv.h"
#include "levcav/model.h"

namespace levcav {

/// Parameter set and short description behind one figure dataset.
struct FigureSpec {
    std::string id;
    std::string description;
    DimensionlessParams params;
    double perturbation = 0.0; // initial displacement from the well minimum
    double horizon = 0.0;      // dimensionless time span of trajectory figures
    double stride = 0.0;       // output spacing of trajectory figures
};

/// The compiled-in registry, in figure order.
const std::vector<FigureSpec>& figure_registry();
const FigureSpec& figure_spec(const std::string& id);

/// Raised when a figure needs an artifact (a completed sweep) that is missing.
class MissingArtifact : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FigureInputs {
    std::string sweepPath; // completed sweep CSV, needed by fig5b/fig5c
    unsigned workers = 0;
};

/// Builds the dataset for a figure. Throws InvalidParameters for an unknown
/// id and MissingArtifact when a required input is absent.
csv::Table emit_figure(const std::string& id, const FigureInputs& in = {});

} // namespace levcav
