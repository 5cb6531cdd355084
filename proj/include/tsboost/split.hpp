#pragma once

#include <cstddef>

#include "tsboost/series_frame.hpp"

namespace tsboost {

/// Train/validation/test boundaries along the time axis.
///   train  = [0, train_len - valid_len)
///   valid  = [train_len - valid_len, train_len)
///   test   = [train_len, train_len + test_len)
struct SplitSpec {
    std::size_t train_len = 0;  // t'
    std::size_t test_len = 0;   // tau
    std::size_t valid_len = 0;

    /// Throws DataError when the spec does not fit a series of `length` steps.
    void validate(std::size_t length) const;
};

struct SplitFrames {
    SeriesFrame train;
    SeriesFrame valid;  // default-constructed (length 0) when valid_len == 0
    SeriesFrame test;
};

SplitFrames split(const SeriesFrame& frame, const SplitSpec& spec);

}  // namespace tsboost
