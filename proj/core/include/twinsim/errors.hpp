#pragma once

#include <stdexcept>

namespace twinsim {

// The Fock cutoff needed for the requested tail tolerance exceeds the hard cap.
struct TruncationCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The setup produces no coincidences at all; visibility is undefined.
struct DegenerateSetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A histogram lacks the structure the peak-extraction rule needs.
struct HistogramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fit could not be carried out on the given problem.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace twinsim
