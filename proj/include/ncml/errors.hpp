#ifndef NCML_ERRORS_HPP
#define NCML_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ncml {

// Base class for all workbench errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define NCML_DEFINE_ERROR(Name)                                  \
  struct Name : Error {                                          \
    explicit Name(const std::string& msg = #Name) : Error(msg) {} \
  }

NCML_DEFINE_ERROR(TableNotAGroup);
NCML_DEFINE_ERROR(BadGridParams);
NCML_DEFINE_ERROR(EmptyWindow);
NCML_DEFINE_ERROR(NonFiniteEntry);
NCML_DEFINE_ERROR(ShapeMismatch);
NCML_DEFINE_ERROR(ArityMismatch);
NCML_DEFINE_ERROR(HolderViolation);
NCML_DEFINE_ERROR(SupportEscape);
NCML_DEFINE_ERROR(LengthMismatch);
NCML_DEFINE_ERROR(GroupMismatch);
NCML_DEFINE_ERROR(AsymmetricWindow);
NCML_DEFINE_ERROR(BadTheta);
NCML_DEFINE_ERROR(ZeroOperator);
NCML_DEFINE_ERROR(InfiniteExponent);
NCML_DEFINE_ERROR(DimensionCap);
NCML_DEFINE_ERROR(NotUCP);
NCML_DEFINE_ERROR(NotASubgroup);
NCML_DEFINE_ERROR(ConfigError);

#undef NCML_DEFINE_ERROR

}  // namespace ncml

#endif  // NCML_ERRORS_HPP
