#pragma once

#include <stdexcept>
#include <string>

namespace fairmix {

// Base of every error raised by the library. The CLI maps the category
// onto an exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { config, data, experiment };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

#define FAIRMIX_DEFINE_ERROR(Name, Cat)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(Category::Cat, what) {} \
  };

// Data / input problems.
FAIRMIX_DEFINE_ERROR(InputError, data)
FAIRMIX_DEFINE_ERROR(ParseError, data)
FAIRMIX_DEFINE_ERROR(SchemaError, data)
FAIRMIX_DEFINE_ERROR(AlignmentError, data)
FAIRMIX_DEFINE_ERROR(SelectionError, data)
FAIRMIX_DEFINE_ERROR(ShapeError, data)
FAIRMIX_DEFINE_ERROR(EmptyTableError, data)

// Configuration problems.
FAIRMIX_DEFINE_ERROR(ConfigError, config)

// Failures while fitting or evaluating.
FAIRMIX_DEFINE_ERROR(FitError, experiment)
FAIRMIX_DEFINE_ERROR(UnreachableCellError, experiment)
FAIRMIX_DEFINE_ERROR(StackingError, experiment)
FAIRMIX_DEFINE_ERROR(UndefinedMetricError, experiment)
FAIRMIX_DEFINE_ERROR(ExperimentError, experiment)

#undef FAIRMIX_DEFINE_ERROR

}  // namespace fairmix
