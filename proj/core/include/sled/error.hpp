#pragma once

#include <stdexcept>
#include <string>

namespace sled {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter value (window size, scale, K, config entries).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Image could not be read or decoded.
class DecodeError : public Error {
 public:
  DecodeError(const std::string& path, const std::string& reason)
      : Error(path + ": " + reason), path_(path), reason_(reason) {}

  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

// Input too small or too uniform to produce the requested quantity.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Riemannian metric domain violation: dimension mismatch or non-SPD input.
class MetricError : public Error {
 public:
  using Error::Error;
};

// Two descriptors (or a descriptor and an index) built with different
// scale lists.
class IncompatibleDescriptorError : public Error {
 public:
  using Error::Error;
};

// Problems with a dataset directory (missing, empty, unlabeled files).
class DatasetError : public Error {
 public:
  using Error::Error;
};

// Index file could not be parsed.
class IndexFormatError : public Error {
 public:
  enum class Kind { kBadMagic, kVersionMismatch, kTruncated, kChecksumMismatch, kMalformed, kIo };

  IndexFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace sled
