#include "tsboost/split.hpp"

#include <fmt/format.h>

#include "tsboost/errors.hpp"

namespace tsboost {

void SplitSpec::validate(std::size_t length) const {
    if (train_len == 0 || test_len == 0) throw DataError("split needs positive training and test lengths");
    if (valid_len >= train_len) {
        throw DataError(fmt::format("validation length {} must be below training length {}", valid_len, train_len));
    }
    if (train_len + test_len > length) {
        throw DataError(fmt::format("split t' + tau = {} + {} exceeds series length {}", train_len, test_len, length));
    }
}

SplitFrames split(const SeriesFrame& frame, const SplitSpec& spec) {
    spec.validate(frame.length());
    const auto fit_end = spec.train_len - spec.valid_len;
    SplitFrames out;
    out.train = frame.slice(0, fit_end);
    if (spec.valid_len > 0) out.valid = frame.slice(fit_end, spec.train_len);
    out.test = frame.slice(spec.train_len, spec.train_len + spec.test_len);
    return out;
}

}  // namespace tsboost
