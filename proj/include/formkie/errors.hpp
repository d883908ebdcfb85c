#pragma once

#include <stdexcept>
#include <string>

namespace formkie {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class DegenerateProjection : public Error { using Error::Error; };
class DegenerateConfiguration : public Error { using Error::Error; };
class InsufficientPairs : public Error { using Error::Error; };
class NoConsensus : public Error { using Error::Error; };

// ingestion / file formats
class SchemaError : public Error { using Error::Error; };
class GeometryError : public Error { using Error::Error; };

// classification
class EmptyCorpus : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };

// assignment
class SizeLimit : public Error { using Error::Error; };
class Infeasible : public Error { using Error::Error; };

// synthetic data / evaluation
class SpecError : public Error { using Error::Error; };
class TemplateMismatch : public Error { using Error::Error; };

}  // namespace formkie
