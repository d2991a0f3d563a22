// Copyright 2026 The morphalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MORPHALIGN_ERRORS_HPP
#define MORPHALIGN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace morphalign {

/// Base class of every error raised by the library. Each subclass maps
/// onto one failure family so the command layer can choose an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ingestion failures.
class IngestError : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public IngestError {
 public:
  explicit FileNotFound(const std::string& path)
      : IngestError("cannot open file: " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class LineCountMismatch : public IngestError {
 public:
  LineCountMismatch(std::size_t source_lines, std::size_t target_lines)
      : IngestError("line count mismatch: source has " +
                    std::to_string(source_lines) + " lines, target has " +
                    std::to_string(target_lines)),
        source_lines_(source_lines),
        target_lines_(target_lines) {}
  std::size_t source_lines() const { return source_lines_; }
  std::size_t target_lines() const { return target_lines_; }

 private:
  std::size_t source_lines_;
  std::size_t target_lines_;
};

class EmptyLine : public IngestError {
 public:
  EmptyLine(const std::string& file, std::size_t line_no)
      : IngestError(file + ":" + std::to_string(line_no) + ": empty line"),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class EncodingError : public IngestError {
 public:
  EncodingError(const std::string& file, std::size_t line_no,
                const std::string& what)
      : IngestError(file + ":" + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class UnknownToken : public Error {
 public:
  explicit UnknownToken(const std::string& surface)
      : Error("unknown token: " + surface), surface_(surface) {}
  const std::string& surface() const { return surface_; }

 private:
  std::string surface_;
};

// Training failures.
class TrainError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public TrainError {
 public:
  EmptyCorpus() : TrainError("empty corpus") {}
};

class NumericUnderflow : public TrainError {
 public:
  explicit NumericUnderflow(std::size_t line_no)
      : TrainError("sentence probability is not finite at line " +
                   std::to_string(line_no)) {}
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class StageMismatch : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class CorpusMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace morphalign

#endif  // MORPHALIGN_ERRORS_HPP
