#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cslr/kernel.hpp"
#include "cslr/model.hpp"

namespace cslr {

// A truncated score n^-1 sum_{i in J} phi_i (delta_i - F_i) / w_i with its
// bookkeeping: n_used points inside the truncation set contributed,
// n_excluded points had no defined estimate (or a zero denominator) and
// n_outside points fell outside [eps, 1 - eps].
struct ScoreValue {
    std::vector<double> value;
    std::size_t n_used = 0;
    std::size_t n_excluded = 0;
    std::size_t n_outside = 0;
};

// Simple score: weight x, fixed-beta MLE, no smoothing.
ScoreValue psi1(const Sample& sample, std::span<const double> beta, const TruncationSpec& trunc);

// Efficient score based on the MLE with the kernel density estimate
// f_nh = int K_h(. - w) dF-hat(w).
ScoreValue psi2(const Sample& sample, std::span<const double> beta, const TruncationSpec& trunc,
                const KernelConfig& cfg);

// Plug-in score: the Nadaraya-Watson estimate F_nh and its beta-derivative
// replace the MLE.
ScoreValue psi3(const Sample& sample, std::span<const double> beta, const TruncationSpec& trunc,
                const KernelConfig& cfg);

}  // namespace cslr
