#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairlicit {

// Base of every error raised by the library. name() is the stable error
// identifier that the CLI prints and the HTTP API puts in response bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(message), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

#define FAIRLICIT_DEFINE_ERROR(Type)                                   \
  class Type : public Error {                                          \
   public:                                                             \
    explicit Type(const std::string& message) : Error(#Type, message) {} \
  }

// schema_data
FAIRLICIT_DEFINE_ERROR(SchemaError);
FAIRLICIT_DEFINE_ERROR(DuplicateId);
FAIRLICIT_DEFINE_ERROR(BadMarginals);
FAIRLICIT_DEFINE_ERROR(IoError);

// metrics
FAIRLICIT_DEFINE_ERROR(UnknownAttribute);
FAIRLICIT_DEFINE_ERROR(MissingPredictions);
FAIRLICIT_DEFINE_ERROR(MissingLabels);

// similarity
FAIRLICIT_DEFINE_ERROR(SchemaMismatch);
FAIRLICIT_DEFINE_ERROR(UnknownCase);
FAIRLICIT_DEFINE_ERROR(InvalidWeights);

// elicitation
FAIRLICIT_DEFINE_ERROR(UnknownDataset);
FAIRLICIT_DEFINE_ERROR(UnknownSession);
FAIRLICIT_DEFINE_ERROR(SessionClosed);
FAIRLICIT_DEFINE_ERROR(UnknownQuestion);
FAIRLICIT_DEFINE_ERROR(DuplicateResponse);
FAIRLICIT_DEFINE_ERROR(WrongStage);
FAIRLICIT_DEFINE_ERROR(ValidationError);

// analysis
FAIRLICIT_DEFINE_ERROR(EmptyMatrix);
FAIRLICIT_DEFINE_ERROR(NoAnswers);

// training
FAIRLICIT_DEFINE_ERROR(NonFinite);
FAIRLICIT_DEFINE_ERROR(EmptyDataset);
FAIRLICIT_DEFINE_ERROR(UnknownModel);

#undef FAIRLICIT_DEFINE_ERROR

// First nonconforming cell of an imported table. row is 1-based over data
// rows (the header is row 0).
class ValueError : public Error {
 public:
  ValueError(std::size_t row, std::string column, const std::string& detail)
      : Error("ValueError", "row " + std::to_string(row) + ", column '" + column +
                                "': " + detail),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace fairlicit
