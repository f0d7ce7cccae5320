#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "nls6/field.hpp"

namespace nls6 {

enum class Outcome {
    Completed,       // reached t_end
    BlowUpDetected,  // kinetic threshold crossed or non-finite values
    DtFloor          // adaptive step hit dt_min without the kinetic indicator
};

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Completed: return "Completed";
        case Outcome::BlowUpDetected: return "BlowUpDetected";
        default: return "DtFloor";
    }
}

// One recorded time sample. Iddot_fd is a post-pass over neighbouring samples and
// stays NaN at the endpoints; lambda_scale is NaN when H = 0 leaves it undefined.
// x_center is kept in memory for diagnostics but is not a series CSV column.
struct SeriesRow {
    double t = 0.0;
    double M = 0.0;
    double E = 0.0;
    double H = 0.0;
    double R = 0.0;
    double K = 0.0;
    std::array<double, 3> P{0.0, 0.0, 0.0};
    double I = 0.0;
    double Idot = 0.0;
    double Iddot_formula = 0.0;
    double Iddot_fd = std::numeric_limits<double>::quiet_NaN();
    double S_accum = 0.0;
    double lambda_scale = std::numeric_limits<double>::quiet_NaN();
    std::array<double, 3> x_center{0.0, 0.0, 0.0};
    double dt = 0.0;
};

template <class GridT>
struct RunResult {
    std::vector<SeriesRow> series;
    std::vector<std::pair<double, FieldPair<GridT>>> snapshots;
    Outcome outcome = Outcome::Completed;
    // time of the indicator for BlowUpDetected / DtFloor; NaN when Completed
    double t_stop = std::numeric_limits<double>::quiet_NaN();
    FieldPair<GridT> final_state;
};

}  // namespace nls6
