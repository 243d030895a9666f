#pragma once

#include <stdexcept>
#include <string>

namespace tpca {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define TPCA_DECLARE_ERROR(Name)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

TPCA_DECLARE_ERROR(EmptyLabel);
TPCA_DECLARE_ERROR(BadOrder);
TPCA_DECLARE_ERROR(DimensionMismatch);
TPCA_DECLARE_ERROR(ModeOutOfRange);
TPCA_DECLARE_ERROR(BadSplit);
TPCA_DECLARE_ERROR(SizeCapExceeded);
TPCA_DECLARE_ERROR(NotUnitQuery);
TPCA_DECLARE_ERROR(BudgetExceeded);
TPCA_DECLARE_ERROR(BadBound);
TPCA_DECLARE_ERROR(IncompatibleSpecs);
TPCA_DECLARE_ERROR(TooLarge);
TPCA_DECLARE_ERROR(OddOrder);
TPCA_DECLARE_ERROR(NoOddPart);
TPCA_DECLARE_ERROR(NoConvergence);
TPCA_DECLARE_ERROR(ZeroIterate);
TPCA_DECLARE_ERROR(PatternTooWide);
TPCA_DECLARE_ERROR(GuardFailed);
TPCA_DECLARE_ERROR(HypothesisViolated);
TPCA_DECLARE_ERROR(DegreeCap);
TPCA_DECLARE_ERROR(ConfigError);

#undef TPCA_DECLARE_ERROR

}  // namespace tpca
