#ifndef FPR_ERRORS_HPP
#define FPR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fpr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FPR_DEFINE_ERROR(NAME)                          \
    struct NAME : Error {                               \
        explicit NAME(const std::string& msg = #NAME)   \
            : Error(std::string(#NAME) + ": " + msg) {} \
    }

FPR_DEFINE_ERROR(IoFailure);
FPR_DEFINE_ERROR(MalformedPgm);
FPR_DEFINE_ERROR(MalformedTemplate);
FPR_DEFINE_ERROR(DimensionMismatch);
FPR_DEFINE_ERROR(NotBinary);
FPR_DEFINE_ERROR(OutOfBounds);
FPR_DEFINE_ERROR(OutOfBoundsMinutia);
FPR_DEFINE_ERROR(EmptyTemplate);
FPR_DEFINE_ERROR(EmptyForeground);
FPR_DEFINE_ERROR(EmptyInput);
FPR_DEFINE_ERROR(EmptyRegistry);
FPR_DEFINE_ERROR(DuplicateRoll);
FPR_DEFINE_ERROR(InvalidSpec);

#undef FPR_DEFINE_ERROR

} // namespace fpr

#endif
