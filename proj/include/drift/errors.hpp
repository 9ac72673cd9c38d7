#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace drift {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid UTF-8 in an input document.
class DecodeError : public Error {
 public:
  explicit DecodeError(std::size_t byte_offset)
      : Error("invalid UTF-8 sequence at byte offset " +
              std::to_string(byte_offset)),
        byte_offset(byte_offset) {}
  std::size_t byte_offset;
};

/// Bad configuration: duplicate field labels, non-positive sizes, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, written, or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A queried word is not part of the vocabulary.
class OutOfVocabularyError : public Error {
 public:
  explicit OutOfVocabularyError(const std::string& word)
      : Error("word not in vocabulary: \"" + word + "\""), word(word) {}
  std::string word;
};

/// Fewer than two words; no binary code exists.
class VocabularyTooSmallError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared during SGD.
class TrainingDivergedError : public Error {
 public:
  explicit TrainingDivergedError(std::uint64_t step)
      : Error("training diverged (non-finite value) at step " +
              std::to_string(step)),
        step(step) {}
  std::uint64_t step;
};

/// A vector that must be normalizable has zero norm.
class DegenerateVectorError : public Error {
 public:
  explicit DegenerateVectorError(const std::string& word)
      : Error("zero-norm vector for word \"" + word + "\""), word(word) {}
  std::string word;
};

/// A word count too small for the log normalizer (log(wc) <= 0).
class UndefinedNormalizerError : public Error {
 public:
  UndefinedNormalizerError(const std::string& word, const std::string& field)
      : Error("word count of \"" + word + "\" in field \"" + field +
              "\" is below 2; log normalizer undefined"),
        word(word),
        field(field) {}
  std::string word;
  std::string field;
};

/// Point set unusable for projection (e.g. all points identical).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

}  // namespace drift
